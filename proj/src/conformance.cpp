/*!
 * Copyright (c) 2026 by Contributors
 * \file src/conformance.cpp
 * \brief Suite loading, case running, aggregation.
 */
#include "tokengate/conformance.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "tokengate/compiler.hpp"

namespace tokengate {

namespace fs = std::filesystem;

std::string_view failure_kind_name(FailureKind k) {
  switch (k) {
    case FailureKind::CompileError: return "compile_error";
    case FailureKind::OverConstrained: return "over_constrained";
    case FailureKind::UnderConstrained: return "under_constrained";
  }
  return "compile_error";
}

// ---------------------------------------------------------------------------
// Suite loading
// ---------------------------------------------------------------------------

namespace {

// Remote references have a scheme or authority; only same-document fragment
// refs stay resolvable offline.
bool value_has_remote_ref(const JsonValue& v) {
  if (v.is_object()) {
    for (const auto& m : v.as_object()) {
      if ((m.key == "$ref" || m.key == "$dynamicRef" || m.key == "$recursiveRef") &&
          m.value.is_string()) {
        const std::string& target = m.value.as_string();
        if (!target.empty() && target[0] != '#') return true;
      }
      if (m.key == "$id" && m.value.is_string()) {
        // base-URI games need remote-style resolution
        const std::string& id = m.value.as_string();
        if (id.find("://") != std::string::npos) return true;
      }
      if (value_has_remote_ref(m.value)) return true;
    }
  } else if (v.is_array()) {
    for (const auto& item : v.as_array())
      if (value_has_remote_ref(item)) return true;
  }
  return false;
}

}  // namespace

std::vector<TestCase> load_suite(const std::string& dir, SuiteLoadReport* report) {
  SuiteLoadReport local;
  std::vector<TestCase> cases;
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw SchemaError(SchemaError::Code::IoError, "suite directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::set<std::string> kept_categories;
  for (const auto& file : files) {
    std::string category = file.stem().string();
    ++local.categories_seen;
    if (category == "format") {
      // the format keyword is ignored by default in the current standard
      continue;
    }
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    JsonValue doc;
    try {
      doc = JsonValue::parse(ss.str());
    } catch (const JsonParseError& e) {
      throw SchemaError(SchemaError::Code::MalformedJson,
                        "malformed suite file " + file.string() + ": " + e.what());
    }
    if (!doc.is_array())
      throw SchemaError(SchemaError::Code::MalformedJson,
                        "suite file " + file.string() + " must hold an array of cases");
    size_t index = 0;
    for (const auto& case_doc : doc.as_array()) {
      if (!case_doc.is_object()) continue;
      const JsonValue* schema = case_doc.find("schema");
      const JsonValue* tests = case_doc.find("tests");
      if (!schema || !tests || !tests->is_array()) continue;
      if (value_has_remote_ref(*schema)) {
        ++local.remote_cases_dropped;
        continue;
      }
      TestCase tc;
      tc.category = category;
      tc.index = index++;
      if (const JsonValue* d = case_doc.find("description"); d && d->is_string())
        tc.description = d->as_string();
      tc.schema.raw = *schema;
      tc.schema.source_id = category + "/" + std::to_string(tc.index);
      if (const JsonValue* s = schema->find("$schema"); s && s->is_string())
        tc.schema.declared_draft_uri = s->as_string();
      for (const auto& t : tests->as_array()) {
        if (!t.is_object()) continue;
        TestInstance ti;
        if (const JsonValue* d = t.find("description"); d && d->is_string())
          ti.description = d->as_string();
        if (const JsonValue* v = t.find("valid"); v && v->is_boolean()) ti.valid = v->as_boolean();
        if (const JsonValue* data = t.find("data")) ti.data = *data;
        tc.tests.push_back(std::move(ti));
      }
      if (tc.tests.empty()) continue;
      kept_categories.insert(category);
      cases.push_back(std::move(tc));
    }
  }
  local.categories_kept = kept_categories.size();
  if (report) *report = local;
  return cases;
}

// ---------------------------------------------------------------------------
// Case running
// ---------------------------------------------------------------------------

CaseOutcome run_case(const TestCase& test_case, const KeywordManifest& manifest,
                     const Vocabulary& vocab, const TokenTrie& trie,
                     const RunCaseOptions& options) {
  CaseOutcome outcome;
  outcome.category = test_case.category;
  outcome.description = test_case.description;
  outcome.index = test_case.index;

  bool all_invalid = true;
  for (const auto& t : test_case.tests)
    if (t.valid) all_invalid = false;

  std::shared_ptr<const ConstraintAutomaton> automaton;
  std::string compile_detail;
  try {
    SchemaIR ir = normalize(test_case.schema);
    CompileOptions copts;
    copts.compile_timeout_seconds = options.compile_timeout_seconds;
    CompileOutcome co = compile(ir, manifest, copts);
    if (co.ok()) {
      automaton = co.automaton;
    } else if (co.status == CompileOutcome::Status::Rejected) {
      compile_detail = "rejected:";
      for (const auto& u : co.rejected) compile_detail += " " + u.path;
    } else {
      compile_detail = "compile timeout";
    }
  } catch (const SchemaError& e) {
    compile_detail = e.what();
  }

  if (!automaton) {
    // Unsatisfiable-schema allowance: a compile-time error passes when the
    // case asserts nothing generatable (every instance invalid).
    if (all_invalid) {
      outcome.pass = true;
    } else {
      outcome.pass = false;
      outcome.failures.insert(FailureKind::CompileError);
    }
    for (const auto& t : test_case.tests)
      outcome.verdicts.push_back(InstanceVerdict{t.valid, false, compile_detail});
    return outcome;
  }

  for (const auto& t : test_case.tests) {
    std::string bytes = t.data.serialize();
    WalkResult walk = walk_instance(*automaton, vocab, trie, bytes);
    bool accepted = walk.status == WalkResult::Status::Accepted;
    InstanceVerdict verdict{t.valid, accepted, ""};
    if (t.valid && !accepted) {
      outcome.failures.insert(FailureKind::OverConstrained);
      verdict.detail = "valid instance blocked at byte " + std::to_string(walk.byte_pos);
    } else if (!t.valid && accepted) {
      outcome.failures.insert(FailureKind::UnderConstrained);
      verdict.detail = "invalid instance accepted";
    }
    outcome.verdicts.push_back(std::move(verdict));
  }
  outcome.pass = outcome.failures.empty();
  return outcome;
}

std::vector<CaseOutcome> run_suite(const std::vector<TestCase>& cases,
                                   const KeywordManifest& manifest, const Vocabulary& vocab,
                                   const TokenTrie& trie, const ConformanceRunOptions& options) {
  std::vector<CaseOutcome> outcomes(cases.size());
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, cases.size() == 0 ? 1 : static_cast<unsigned>(cases.size()));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= cases.size()) break;
      outcomes[i] = run_case(cases[i], manifest, vocab, trie, options.case_options);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return outcomes;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

AggregateReport aggregate(const std::vector<CaseOutcome>& outcomes) {
  std::map<std::string, CategoryCoverage> by_category;
  for (const auto& o : outcomes) {
    CategoryCoverage& c = by_category[o.category];
    c.category = o.category;
    ++c.cases_total;
    if (o.pass) ++c.cases_passed;
    if (o.failures.count(FailureKind::CompileError)) ++c.compile_error_cases;
    if (o.failures.count(FailureKind::OverConstrained)) ++c.over_constrained_cases;
    if (o.failures.count(FailureKind::UnderConstrained)) ++c.under_constrained_cases;
  }
  AggregateReport report;
  for (auto& [name, c] : by_category) {
    c.proportion = c.cases_total ? static_cast<double>(c.cases_passed) / c.cases_total : 0.0;
    if (c.proportion > 0.0) ++report.thresholds.minimal;
    if (c.proportion > 0.25) ++report.thresholds.partial;
    if (c.proportion > 0.50) ++report.thresholds.moderate;
    if (c.proportion > 0.75) ++report.thresholds.high;
    if (c.proportion == 1.0) ++report.thresholds.full;
    report.categories.push_back(c);
  }
  return report;
}

FailureBreakdown failure_breakdown(const std::vector<CaseOutcome>& outcomes) {
  std::set<std::string> with_compile, with_over, with_under;
  for (const auto& o : outcomes) {
    if (o.failures.count(FailureKind::CompileError)) with_compile.insert(o.category);
    if (o.failures.count(FailureKind::OverConstrained)) with_over.insert(o.category);
    if (o.failures.count(FailureKind::UnderConstrained)) with_under.insert(o.category);
  }
  FailureBreakdown b;
  b.compile_error = with_compile.size();
  b.over_constrained = with_over.size();
  b.under_constrained = with_under.size();
  return b;
}

JsonValue AggregateReport::to_json() const {
  JsonValue doc = JsonValue::object();
  JsonValue cats = JsonValue::array();
  for (const auto& c : categories) {
    JsonValue row = JsonValue::object();
    row.set("category", JsonValue::string(c.category));
    row.set("cases_total", JsonValue::number(static_cast<int64_t>(c.cases_total)));
    row.set("cases_passed", JsonValue::number(static_cast<int64_t>(c.cases_passed)));
    row.set("proportion", JsonValue::number(c.proportion));
    row.set("compile_error_cases", JsonValue::number(static_cast<int64_t>(c.compile_error_cases)));
    row.set("over_constrained_cases",
            JsonValue::number(static_cast<int64_t>(c.over_constrained_cases)));
    row.set("under_constrained_cases",
            JsonValue::number(static_cast<int64_t>(c.under_constrained_cases)));
    cats.push_back(std::move(row));
  }
  doc.set("categories", std::move(cats));
  JsonValue th = JsonValue::object();
  th.set("minimal_gt_0", JsonValue::number(static_cast<int64_t>(thresholds.minimal)));
  th.set("partial_gt_25", JsonValue::number(static_cast<int64_t>(thresholds.partial)));
  th.set("moderate_gt_50", JsonValue::number(static_cast<int64_t>(thresholds.moderate)));
  th.set("high_gt_75", JsonValue::number(static_cast<int64_t>(thresholds.high)));
  th.set("full_eq_100", JsonValue::number(static_cast<int64_t>(thresholds.full)));
  doc.set("thresholds", std::move(th));
  return doc;
}

std::string AggregateReport::to_text() const {
  std::ostringstream out;
  out << "Coverage                     Categories\n";
  out << "Minimal coverage (>0%)       " << thresholds.minimal << "\n";
  out << "Partial coverage (>25%)      " << thresholds.partial << "\n";
  out << "Moderate coverage (>50%)     " << thresholds.moderate << "\n";
  out << "High coverage (>75%)         " << thresholds.high << "\n";
  out << "Full coverage (100%)         " << thresholds.full << "\n";
  return out.str();
}

JsonValue FailureBreakdown::to_json() const {
  JsonValue doc = JsonValue::object();
  doc.set("compile_error", JsonValue::number(static_cast<int64_t>(compile_error)));
  doc.set("over_constrained", JsonValue::number(static_cast<int64_t>(over_constrained)));
  doc.set("under_constrained", JsonValue::number(static_cast<int64_t>(under_constrained)));
  return doc;
}

std::string FailureBreakdown::to_text() const {
  std::ostringstream out;
  out << "Failure type        Categories\n";
  out << "Compile Error       " << compile_error << "\n";
  out << "Over-constrained    " << over_constrained << "\n";
  out << "Under-constrained   " << under_constrained << "\n";
  return out.str();
}

JsonValue conformance_report(const std::vector<CaseOutcome>& outcomes) {
  JsonValue doc = JsonValue::object();
  JsonValue case_list = JsonValue::array();
  for (const auto& o : outcomes) {
    JsonValue row = JsonValue::object();
    row.set("category", JsonValue::string(o.category));
    row.set("index", JsonValue::number(static_cast<int64_t>(o.index)));
    row.set("description", JsonValue::string(o.description));
    row.set("pass", JsonValue::boolean(o.pass));
    JsonValue fails = JsonValue::array();
    for (FailureKind k : o.failures) fails.push_back(JsonValue::string(std::string(failure_kind_name(k))));
    row.set("failures", std::move(fails));
    JsonValue verdicts = JsonValue::array();
    for (const auto& v : o.verdicts) {
      JsonValue vr = JsonValue::object();
      vr.set("expected_valid", JsonValue::boolean(v.expected_valid));
      vr.set("accepted", JsonValue::boolean(v.accepted));
      if (!v.detail.empty()) vr.set("detail", JsonValue::string(v.detail));
      verdicts.push_back(std::move(vr));
    }
    row.set("verdicts", std::move(verdicts));
    case_list.push_back(std::move(row));
  }
  doc.set("cases", std::move(case_list));
  AggregateReport agg = aggregate(outcomes);
  doc.set("aggregate", agg.to_json());
  doc.set("failure_breakdown", failure_breakdown(outcomes).to_json());
  return doc;
}

}  // namespace tokengate
