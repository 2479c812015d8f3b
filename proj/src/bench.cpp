/*!
 * Copyright (c) 2026 by Contributors
 * \file src/bench.cpp
 * \brief Coverage and efficiency runs, prompt building, report emission.
 */
#include "tokengate/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "tokengate/compiler.hpp"
#include "tokengate/validator.hpp"

namespace tokengate {

std::string_view run_failure_name(RunFailure f) {
  switch (f) {
    case RunFailure::None: return "none";
    case RunFailure::CompileReject: return "compile_reject";
    case RunFailure::CompileTimeout: return "compile_timeout";
    case RunFailure::GenTimeout: return "gen_timeout";
    case RunFailure::DeadEnd: return "dead_end";
    case RunFailure::Invalid: return "invalid";
  }
  return "none";
}

double round2_half_up(double v) { return std::floor(v * 100.0 + 0.5) / 100.0; }

double median_lower(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

// ---------------------------------------------------------------------------
// Single schema run
// ---------------------------------------------------------------------------

namespace {

EfficiencyRecord to_efficiency(const DecodeResult& d) {
  EfficiencyRecord e;
  e.gct_seconds = d.gct_seconds;
  e.ttft_seconds = d.ttft_seconds;
  e.tgt_seconds = d.tgt_seconds;
  e.output_tokens = d.tokens.size();
  e.ff_tokens = d.ff_token_count;
  if (d.tokens.size() > 1)
    e.tpot_ms = (d.tgt_seconds - d.ttft_seconds) / (static_cast<double>(d.tokens.size()) - 1.0) *
                1000.0;
  return e;
}

struct SingleRun {
  SchemaRunRecord record;
};

SchemaRunRecord run_one(const DatasetRecord& entry, const RunConfig& config,
                        const KeywordManifest& manifest, const Vocabulary& vocab,
                        const TokenTrie& trie, const SourceFactory& make_source, uint64_t seed,
                        bool mask_on, bool fast_forward) {
  SchemaRunRecord rec;
  rec.source_id = entry.schema.source_id;
  rec.dataset = entry.dataset;

  SchemaIR ir;
  std::shared_ptr<const ConstraintAutomaton> automaton;
  double gct = 0.0;
  try {
    ir = normalize(entry.schema);
    CompileOptions copts;
    copts.compile_timeout_seconds = config.compile_timeout_seconds;
    CompileOutcome co = compile(ir, manifest, copts);
    gct = co.seconds;
    if (co.status == CompileOutcome::Status::TimedOut) {
      rec.declared = false;
      rec.failure = RunFailure::CompileTimeout;
      return rec;
    }
    if (co.status == CompileOutcome::Status::Rejected) {
      rec.declared = false;
      rec.failure = RunFailure::CompileReject;
      return rec;
    }
    automaton = co.automaton;
  } catch (const SchemaError&) {
    rec.declared = false;
    rec.failure = RunFailure::CompileReject;
    return rec;
  }
  rec.declared = true;

  DecodeOptions dopts;
  dopts.max_tokens = config.max_tokens;
  dopts.generation_timeout_seconds = config.generation_timeout_seconds;
  dopts.fast_forward = fast_forward;
  dopts.gct_seconds = gct;
  dopts.pass_through_mask = !mask_on;

  try {
    std::unique_ptr<LogitsSource> source = make_source(entry, seed);
    DecodeResult d = constrained_decode(*automaton, *source, vocab, trie, dopts);
    rec.efficiency = to_efficiency(d);
    switch (d.terminated_by) {
      case DecodeResult::Termination::Eos: {
        rec.generated = d.bytes;
        bool valid = false;
        try {
          Validator validator(ir);
          valid = validator.validate(JsonValue::parse(d.bytes)).valid;
        } catch (const std::exception&) {
          valid = false;
        }
        rec.compliant = valid;
        if (!valid) rec.failure = RunFailure::Invalid;
        break;
      }
      case DecodeResult::Termination::Timeout:
      case DecodeResult::Termination::MaxTokens:
        // processing failure: counts against empirical, stays declared
        rec.failure = RunFailure::GenTimeout;
        break;
      case DecodeResult::Termination::DeadEnd:
        // engine-side runtime failure: demoted from declared coverage
        rec.declared = false;
        rec.failure = RunFailure::DeadEnd;
        rec.efficiency.reset();
        break;
    }
  } catch (const std::exception&) {
    // crashes demote the schema from declared coverage
    rec.declared = false;
    rec.failure = RunFailure::DeadEnd;
    rec.efficiency.reset();
  }
  if (!rec.declared) rec.efficiency.reset();
  return rec;
}

template <typename Fn>
void parallel_for(size_t n, unsigned jobs, Fn&& fn) {
  if (n == 0) return;
  unsigned workers = jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

CoverageRun run_coverage(const std::vector<DatasetRecord>& corpus, const RunConfig& config,
                         const KeywordManifest& manifest, const Vocabulary& vocab,
                         const TokenTrie& trie, const SourceFactory& make_source) {
  CoverageRun run;
  run.records.resize(corpus.size());
  parallel_for(corpus.size(), config.jobs, [&](size_t i) {
    uint64_t seed = config.seed * 0x9e3779b97f4a7c15ULL + i;
    run.records[i] = run_one(corpus[i], config, manifest, vocab, trie, make_source, seed,
                             /*mask_on=*/true, config.fast_forward);
  });

  std::map<std::string, DatasetCoverage> by_dataset;
  for (const auto& rec : run.records) {
    DatasetCoverage& c = by_dataset[rec.dataset];
    c.dataset = rec.dataset;
    ++c.schemas;
    if (rec.declared) ++c.declared_count;
    if (rec.compliant.value_or(false)) ++c.empirical_count;
    if (rec.failure != RunFailure::None)
      ++c.failure_histogram[std::string(run_failure_name(rec.failure))];
  }
  run.report.engine = config.engine_name;
  for (auto& [name, c] : by_dataset) {
    if (c.schemas > 0) {
      c.declared = static_cast<double>(c.declared_count) / static_cast<double>(c.schemas);
      c.empirical = static_cast<double>(c.empirical_count) / static_cast<double>(c.schemas);
    }
    if (c.declared_count > 0)
      c.compliance = static_cast<double>(c.empirical_count) / static_cast<double>(c.declared_count);
    run.report.rows.push_back(c);
  }
  return run;
}

// ---------------------------------------------------------------------------
// Efficiency
// ---------------------------------------------------------------------------

EfficiencyReport run_efficiency(const std::vector<DatasetRecord>& corpus, const RunConfig& config,
                                const std::vector<EngineVariant>& variants,
                                const KeywordManifest& manifest, const Vocabulary& vocab,
                                const TokenTrie& trie, const SourceFactory& make_source) {
  EfficiencyReport report;
  // variant -> source_id -> record
  std::map<std::string, std::map<std::string, SchemaRunRecord>> runs;
  for (const auto& variant : variants) {
    std::vector<SchemaRunRecord> recs(corpus.size());
    parallel_for(corpus.size(), config.jobs, [&](size_t i) {
      uint64_t seed = config.seed * 0x9e3779b97f4a7c15ULL + i;
      recs[i] = run_one(corpus[i], config, manifest, vocab, trie, make_source, seed, variant.mask,
                        variant.fast_forward);
    });
    auto& slot = runs[variant.name];
    for (auto& r : recs) slot.emplace(r.source_id, std::move(r));
  }

  // intersection of declared coverage
  for (const auto& entry : corpus) {
    const std::string& id = entry.schema.source_id;
    bool everywhere = true;
    for (const auto& variant : variants) {
      const auto& slot = runs[variant.name];
      auto it = slot.find(id);
      // a pass-through variant never rejects: declared unless it crashed
      if (it == slot.end() || (variant.mask && !it->second.declared) ||
          (!variant.mask && it->second.failure == RunFailure::DeadEnd)) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) report.intersection.push_back(id);
  }
  if (report.intersection.empty())
    throw BenchError(BenchError::Code::EmptyIntersection,
                     "no schema is declared covered by every variant");

  for (const auto& variant : variants) {
    VariantMedians m;
    m.variant = variant.name;
    std::vector<double> gct, ttft, tpot, tgt, out_tokens, ff;
    for (const std::string& id : report.intersection) {
      const SchemaRunRecord& rec = runs[variant.name][id];
      if (!rec.efficiency) continue;
      const EfficiencyRecord& e = *rec.efficiency;
      gct.push_back(e.gct_seconds);
      ttft.push_back(e.ttft_seconds);
      if (e.output_tokens > 1) tpot.push_back(e.tpot_ms);
      tgt.push_back(e.tgt_seconds);
      out_tokens.push_back(static_cast<double>(e.output_tokens));
      ff.push_back(static_cast<double>(e.ff_tokens));
      report.records[variant.name].emplace_back(id, e);
    }
    m.runs = gct.size();
    m.gct_seconds = median_lower(gct);
    m.ttft_seconds = median_lower(ttft);
    m.tpot_ms = median_lower(tpot);
    m.tgt_seconds = median_lower(tgt);
    m.output_tokens = median_lower(out_tokens);
    m.ff_tokens = median_lower(ff);
    report.medians.push_back(std::move(m));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Prompt
// ---------------------------------------------------------------------------

std::string build_prompt(const std::string& schema_text, const std::vector<PromptShot>& shots) {
  std::string out = "You need to generate a JSON object that matches the schema below.\n\n";
  for (const auto& shot : shots) {
    out += "## Input Schema:\n";
    out += shot.schema_text;
    out += "\n## Expected Output:\n";
    out += shot.output_text;
    out += "\n\n";
  }
  out += "## Input Schema:\n";
  out += schema_text;
  out += "\n## Expected Output:\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

JsonValue CoverageReport::to_json(bool include_records,
                                  const std::vector<SchemaRunRecord>* records) const {
  JsonValue doc = JsonValue::object();
  doc.set("engine", JsonValue::string(engine));
  JsonValue rows_json = JsonValue::array();
  for (const auto& r : rows) {
    JsonValue row = JsonValue::object();
    row.set("dataset", JsonValue::string(r.dataset));
    row.set("schemas", JsonValue::number(static_cast<int64_t>(r.schemas)));
    row.set("declared_count", JsonValue::number(static_cast<int64_t>(r.declared_count)));
    row.set("empirical_count", JsonValue::number(static_cast<int64_t>(r.empirical_count)));
    row.set("declared", JsonValue::number(r.declared));
    row.set("empirical", JsonValue::number(r.empirical));
    if (r.compliance)
      row.set("compliance", JsonValue::number(round2_half_up(*r.compliance)));
    else
      row.set("compliance", JsonValue::string("NA"));
    JsonValue hist = JsonValue::object();
    for (const auto& [kind, count] : r.failure_histogram)
      hist.set(kind, JsonValue::number(static_cast<int64_t>(count)));
    row.set("failures", std::move(hist));
    rows_json.push_back(std::move(row));
  }
  doc.set("datasets", std::move(rows_json));
  if (include_records && records) {
    JsonValue recs = JsonValue::array();
    for (const auto& rec : *records) {
      JsonValue row = JsonValue::object();
      row.set("source_id", JsonValue::string(rec.source_id));
      row.set("dataset", JsonValue::string(rec.dataset));
      row.set("declared", JsonValue::boolean(rec.declared));
      if (rec.compliant) row.set("compliant", JsonValue::boolean(*rec.compliant));
      if (rec.failure != RunFailure::None)
        row.set("failure", JsonValue::string(std::string(run_failure_name(rec.failure))));
      if (rec.generated) row.set("generated", JsonValue::string(*rec.generated));
      if (rec.efficiency) {
        JsonValue eff = JsonValue::object();
        eff.set("gct_s", JsonValue::number(rec.efficiency->gct_seconds));
        eff.set("ttft_s", JsonValue::number(rec.efficiency->ttft_seconds));
        eff.set("tpot_ms", JsonValue::number(rec.efficiency->tpot_ms));
        eff.set("tgt_s", JsonValue::number(rec.efficiency->tgt_seconds));
        eff.set("output_tokens", JsonValue::number(static_cast<int64_t>(rec.efficiency->output_tokens)));
        eff.set("ff_tokens", JsonValue::number(static_cast<int64_t>(rec.efficiency->ff_tokens)));
        row.set("efficiency", std::move(eff));
      }
      recs.push_back(std::move(row));
    }
    doc.set("records", std::move(recs));
  }
  return doc;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "table" || name == "text-table") return ReportFormat::TextTable;
  throw BenchError(BenchError::Code::UnknownFormat, "unknown report format \"" + name + "\"");
}

namespace {

std::string format2(double v) {
  char buf[32];
  snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string emit_report(const CoverageReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return report.to_json().serialize_pretty() + "\n";
    case ReportFormat::Csv: {
      std::string out = "dataset,framework,declared,empirical,compliance\n";
      for (const auto& r : report.rows) {
        out += r.dataset + "," + report.engine + "," + format2(r.declared) + "," +
               format2(r.empirical) + ",";
        out += r.compliance ? format2(round2_half_up(*r.compliance)) : std::string("NA");
        out += "\n";
      }
      return out;
    }
    case ReportFormat::TextTable: {
      std::ostringstream out;
      auto cell = [](const std::string& s, size_t w) {
        std::string c = s;
        if (c.size() < w) c.append(w - c.size(), ' ');
        return c;
      };
      out << cell("Dataset", 20) << cell("Framework", 14) << cell("Declared", 10)
          << cell("Empirical", 11) << "Compliance\n";
      for (const auto& r : report.rows) {
        out << cell(r.dataset, 20) << cell(report.engine, 14) << cell(format2(r.declared), 10)
            << cell(format2(r.empirical), 11)
            << (r.compliance ? format2(round2_half_up(*r.compliance)) : std::string("NA")) << "\n";
      }
      return out.str();
    }
  }
  throw BenchError(BenchError::Code::UnknownFormat, "unhandled report format");
}

JsonValue EfficiencyReport::to_json() const {
  JsonValue doc = JsonValue::object();
  JsonValue inter = JsonValue::array();
  for (const auto& id : intersection) inter.push_back(JsonValue::string(id));
  doc.set("intersection", std::move(inter));
  JsonValue meds = JsonValue::array();
  for (const auto& m : medians) {
    JsonValue row = JsonValue::object();
    row.set("variant", JsonValue::string(m.variant));
    row.set("runs", JsonValue::number(static_cast<int64_t>(m.runs)));
    row.set("gct_s", JsonValue::number(m.gct_seconds));
    row.set("ttft_s", JsonValue::number(m.ttft_seconds));
    row.set("tpot_ms", JsonValue::number(m.tpot_ms));
    row.set("tgt_s", JsonValue::number(m.tgt_seconds));
    row.set("output_tokens", JsonValue::number(m.output_tokens));
    row.set("ff_tokens", JsonValue::number(m.ff_tokens));
    meds.push_back(std::move(row));
  }
  doc.set("medians", std::move(meds));
  return doc;
}

std::string EfficiencyReport::to_text() const {
  std::ostringstream out;
  auto cell = [](const std::string& s, size_t w) {
    std::string c = s;
    if (c.size() < w) c.append(w - c.size(), ' ');
    return c;
  };
  out << cell("Variant", 16) << cell("GCT(s)", 10) << cell("TTFT(s)", 10) << cell("TPOT(ms)", 10)
      << cell("TGT(s)", 10) << "Output Tokens (FF)\n";
  for (const auto& m : medians) {
    char tail[64];
    snprintf(tail, sizeof(tail), "%.2f (%.2f)", m.output_tokens, m.ff_tokens);
    out << cell(m.variant, 16) << cell(format2(m.gct_seconds), 10)
        << cell(format2(m.ttft_seconds), 10) << cell(format2(m.tpot_ms), 10)
        << cell(format2(m.tgt_seconds), 10) << tail << "\n";
  }
  return out.str();
}

}  // namespace tokengate
