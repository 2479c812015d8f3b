/*!
 * Copyright (c) 2026 by Contributors
 * \file tools/tokengate_cli.cpp
 * \brief Command-line entry point.
 */
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tokengate/bench.hpp"
#include "tokengate/compiler.hpp"
#include "tokengate/conformance.hpp"
#include "tokengate/dataset.hpp"
#include "tokengate/decode.hpp"
#include "tokengate/validator.hpp"

namespace fs = std::filesystem;
using namespace tokengate;

namespace {

// Exit codes: 0 success, 1 data failures present, 2 usage error, 3 internal.
constexpr int kOk = 0;
constexpr int kDataFailure = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

KeywordManifest load_manifest(const std::string& path) {
  if (path.empty()) return KeywordManifest::default_v1();
  return KeywordManifest::from_json(JsonValue::parse(slurp(path)));
}

struct CommonFlags {
  std::string manifest_path;
  std::string vocab_path;
  std::string out_dir;
  unsigned jobs = 0;
  uint64_t seed = 0;
  double timeout_compile = 40.0;
  double timeout_generate = 40.0;
  uint32_t max_tokens = 512;
  bool fast_forward = false;
  bool quiet = false;
  std::string format = "table";
};

SourceFactory make_source_factory(const std::string& kind, uint64_t seed_base,
                                  const Vocabulary& vocab) {
  if (kind == "uniform") {
    return [](const DatasetRecord&, uint64_t) { return std::make_unique<UniformSource>(); };
  }
  if (kind == "random") {
    (void)seed_base;
    return [](const DatasetRecord&, uint64_t seed) {
      return std::make_unique<RandomSource>(seed);
    };
  }
  if (kind == "adapter-stdio") {
    size_t vocab_size = vocab.size();
    return [vocab_size](const DatasetRecord&, uint64_t) {
      return std::make_unique<AdapterSource>(std::cin, std::cout, vocab_size);
    };
  }
  throw std::runtime_error("unknown logits source \"" + kind + "\" (uniform|random|adapter-stdio)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tokengate: JSON Schema constrained decoding engine and evaluation harness"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--manifest", flags.manifest_path, "keyword manifest JSON (default: built-in v1)");
  app.add_option("--jobs", flags.jobs, "worker pool width (default: available parallelism)");
  app.add_option("--seed", flags.seed, "base seed for scripted logits sources");
  app.add_option("--timeout-compile", flags.timeout_compile, "grammar compile timeout, seconds");
  app.add_option("--timeout-generate", flags.timeout_generate, "generation timeout, seconds");
  app.add_option("--max-tokens", flags.max_tokens, "generation token budget");
  app.add_flag("--fast-forward", flags.fast_forward, "fast-forward singleton masks");
  app.add_flag("--quiet", flags.quiet, "suppress human-readable tables on stdout");
  app.add_option("--format", flags.format, "report format: json, csv, table");

  // --- ingest ---------------------------------------------------------------
  auto* cmd_ingest = app.add_subcommand("ingest", "ingest a schema corpus, report drops");
  std::string corpus_path, metadata_path, dataset_name = "default";
  cmd_ingest->add_option("--corpus", corpus_path, "directory of .json files or an NDJSON file")
      ->required();
  cmd_ingest->add_option("--metadata", metadata_path, "sidecar source_id -> dataset map");
  cmd_ingest->add_option("--dataset", dataset_name, "default dataset name");
  cmd_ingest->add_option("--out", flags.out_dir, "output directory");

  // --- stats ----------------------------------------------------------------
  auto* cmd_stats = app.add_subcommand("stats", "dataset statistics table");
  cmd_stats->add_option("--corpus", corpus_path, "corpus path")->required();
  cmd_stats->add_option("--metadata", metadata_path, "sidecar source_id -> dataset map");
  cmd_stats->add_option("--dataset", dataset_name, "default dataset name");
  cmd_stats->add_option("--out", flags.out_dir, "output directory");

  // --- compile --------------------------------------------------------------
  auto* cmd_compile = app.add_subcommand("compile", "compile a schema, report support");
  std::string schema_path;
  bool dump_automaton = false;
  cmd_compile->add_option("--schema", schema_path, "schema file")->required();
  cmd_compile->add_flag("--dump", dump_automaton, "print the automaton node listing");

  // --- validate ---------------------------------------------------------------
  auto* cmd_validate = app.add_subcommand("validate", "validate an instance against a schema");
  std::string instance_path;
  cmd_validate->add_option("--schema", schema_path, "schema file")->required();
  cmd_validate->add_option("--instance", instance_path, "instance file")->required();

  // --- mask -------------------------------------------------------------------
  auto* cmd_mask = app.add_subcommand("mask", "allowed tokens after a byte prefix");
  std::string prefix;
  cmd_mask->add_option("--schema", schema_path, "schema file")->required();
  cmd_mask->add_option("--vocab", flags.vocab_path, "vocabulary file")->required();
  cmd_mask->add_option("--prefix", prefix, "byte prefix already emitted");

  // --- generate -----------------------------------------------------------------
  auto* cmd_generate = app.add_subcommand("generate", "constrained decode with a logits source");
  std::string source_kind = "uniform";
  cmd_generate->add_option("--schema", schema_path, "schema file")->required();
  cmd_generate->add_option("--vocab", flags.vocab_path, "vocabulary file")->required();
  cmd_generate->add_option("--source", source_kind, "uniform | random | adapter-stdio");

  // --- walk ---------------------------------------------------------------------
  auto* cmd_walk = app.add_subcommand("walk", "token-walk an instance through the constraint");
  cmd_walk->add_option("--schema", schema_path, "schema file")->required();
  cmd_walk->add_option("--vocab", flags.vocab_path, "vocabulary file")->required();
  cmd_walk->add_option("--instance", instance_path, "instance file")->required();

  // --- conformance ----------------------------------------------------------------
  auto* cmd_conf = app.add_subcommand("conformance", "run the vendored test suite");
  std::string suite_dir;
  cmd_conf->add_option("--suite", suite_dir, "suite directory (official layout)")->required();
  cmd_conf->add_option("--vocab", flags.vocab_path, "vocabulary file")->required();
  cmd_conf->add_option("--out", flags.out_dir, "output directory");

  // --- bench-coverage ----------------------------------------------------------
  auto* cmd_cov = app.add_subcommand("bench-coverage", "declared/empirical coverage run");
  cmd_cov->add_option("--corpus", corpus_path, "corpus path")->required();
  cmd_cov->add_option("--metadata", metadata_path, "sidecar source_id -> dataset map");
  cmd_cov->add_option("--dataset", dataset_name, "default dataset name");
  cmd_cov->add_option("--vocab", flags.vocab_path, "vocabulary file")->required();
  cmd_cov->add_option("--source", source_kind, "uniform | random | adapter-stdio");
  cmd_cov->add_option("--out", flags.out_dir, "output directory");

  // --- bench-efficiency ----------------------------------------------------------
  auto* cmd_eff = app.add_subcommand("bench-efficiency", "efficiency metrics across variants");
  cmd_eff->add_option("--corpus", corpus_path, "corpus path")->required();
  cmd_eff->add_option("--metadata", metadata_path, "sidecar source_id -> dataset map");
  cmd_eff->add_option("--dataset", dataset_name, "default dataset name");
  cmd_eff->add_option("--vocab", flags.vocab_path, "vocabulary file")->required();
  cmd_eff->add_option("--source", source_kind, "uniform | random | adapter-stdio");
  cmd_eff->add_option("--out", flags.out_dir, "output directory");

  // --- report -----------------------------------------------------------------
  auto* cmd_report = app.add_subcommand("report", "re-render a coverage.json report");
  std::string report_path;
  cmd_report->add_option("--coverage", report_path, "coverage.json produced by bench-coverage")
      ->required();
  cmd_report->add_option("--out", flags.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    IngestOptions ingest_opts;
    if (!metadata_path.empty()) ingest_opts.metadata_path = metadata_path;
    ingest_opts.default_dataset = dataset_name;
    ingest_opts.jobs = flags.jobs;

    if (*cmd_ingest || *cmd_stats) {
      IngestResult result = ingest_dataset(corpus_path, ingest_opts);
      if (*cmd_ingest) {
        if (!flags.quiet) std::cout << result.report.to_text();
        if (!flags.out_dir.empty())
          write_file(fs::path(flags.out_dir) / "ingest.json",
                     result.report.to_json().serialize_pretty() + "\n");
      } else {
        StatsTable table = schema_stats(result.records);
        if (!flags.quiet) std::cout << table.to_text();
        if (!flags.out_dir.empty())
          write_file(fs::path(flags.out_dir) / "stats.json",
                     table.to_json().serialize_pretty() + "\n");
      }
      return kOk;
    }

    KeywordManifest manifest = load_manifest(flags.manifest_path);

    if (*cmd_compile) {
      SchemaDocument doc = parse_schema(slurp(schema_path), schema_path);
      SchemaIR ir = normalize(doc);
      CompileOptions copts;
      copts.compile_timeout_seconds = flags.timeout_compile;
      CompileOutcome outcome = compile(ir, manifest, copts);
      switch (outcome.status) {
        case CompileOutcome::Status::Ok:
          std::cout << "compiled: " << outcome.automaton->nodes.size() << " nodes in "
                    << outcome.seconds << " s\n";
          if (dump_automaton) std::cout << outcome.automaton->debug_dump();
          return kOk;
        case CompileOutcome::Status::Rejected:
          std::cout << "rejected\n";
          for (const auto& u : outcome.rejected)
            std::cout << "  " << u.path << ": " << u.detail << "\n";
          return kDataFailure;
        case CompileOutcome::Status::TimedOut:
          std::cout << "compile timeout\n";
          return kDataFailure;
      }
    }

    if (*cmd_validate) {
      SchemaDocument doc = parse_schema(slurp(schema_path), schema_path);
      SchemaIR ir = normalize(doc);
      JsonValue instance = JsonValue::parse(slurp(instance_path));
      ValidationOutcome outcome = validate_instance(ir, instance);
      if (outcome.valid) {
        std::cout << "valid\n";
        return kOk;
      }
      std::cout << "invalid\n";
      for (const auto& v : outcome.violations)
        std::cout << "  " << (v.instance_path.empty() ? "/" : v.instance_path) << " " << v.keyword
                  << ": " << v.message << "\n";
      return kDataFailure;
    }

    if (*cmd_mask || *cmd_generate || *cmd_walk || *cmd_conf || *cmd_cov || *cmd_eff) {
      Vocabulary vocab = load_vocabulary(flags.vocab_path);
      TokenTrie trie(vocab);

      if (*cmd_conf) {
        SuiteLoadReport load_report;
        std::vector<TestCase> cases = load_suite(suite_dir, &load_report);
        ConformanceRunOptions opts;
        opts.jobs = flags.jobs;
        opts.case_options.compile_timeout_seconds = flags.timeout_compile;
        std::vector<CaseOutcome> outcomes = run_suite(cases, manifest, vocab, trie, opts);
        AggregateReport agg = aggregate(outcomes);
        FailureBreakdown breakdown = failure_breakdown(outcomes);
        if (!flags.quiet) {
          std::cout << "categories kept: " << load_report.categories_kept << "\n";
          std::cout << agg.to_text() << breakdown.to_text();
        }
        if (!flags.out_dir.empty()) {
          write_file(fs::path(flags.out_dir) / "conformance.json",
                     conformance_report(outcomes).serialize_pretty() + "\n");
        }
        bool any_failure = false;
        for (const auto& o : outcomes)
          if (!o.pass) any_failure = true;
        return any_failure ? kDataFailure : kOk;
      }

      if (*cmd_mask) {
        SchemaDocument doc = parse_schema(slurp(schema_path), schema_path);
        SchemaIR ir = normalize(doc);
        CompileOutcome outcome = compile(ir, manifest);
        if (!outcome.ok()) {
          std::cerr << "schema rejected by the compiler\n";
          return kDataFailure;
        }
        MatcherState state = start_state(*outcome.automaton, /*walk_mode=*/false);
        for (char c : prefix) {
          if (advance_byte(*outcome.automaton, state, static_cast<uint8_t>(c)) !=
              StepResult::Advanced) {
            std::cerr << "prefix rejected\n";
            return kDataFailure;
          }
        }
        TokenMask mask = compute_mask(*outcome.automaton, state, trie, vocab);
        for (TokenId id = 0; id < vocab.size(); ++id) {
          if (!mask.test(id)) continue;
          if (id == vocab.eos_id) {
            std::cout << id << "\t<eos>\n";
          } else {
            std::cout << id << "\t";
            for (unsigned char b : vocab.bytes(id)) {
              if (b >= 0x20 && b < 0x7F)
                std::cout << static_cast<char>(b);
              else {
                char buf[8];
                snprintf(buf, sizeof(buf), "\\x%02x", b);
                std::cout << buf;
              }
            }
            std::cout << "\n";
          }
        }
        return kOk;
      }

      if (*cmd_generate) {
        SchemaDocument doc = parse_schema(slurp(schema_path), schema_path);
        SchemaIR ir = normalize(doc);
        CompileOptions copts;
        copts.compile_timeout_seconds = flags.timeout_compile;
        CompileOutcome outcome = compile(ir, manifest, copts);
        if (!outcome.ok()) {
          std::cerr << "schema rejected by the compiler\n";
          return kDataFailure;
        }
        DatasetRecord rec = make_record(doc, dataset_name);
        SourceFactory factory = make_source_factory(source_kind, flags.seed, vocab);
        auto source = factory(rec, flags.seed);
        DecodeOptions dopts;
        dopts.max_tokens = flags.max_tokens;
        dopts.generation_timeout_seconds = flags.timeout_generate;
        dopts.fast_forward = flags.fast_forward;
        dopts.gct_seconds = outcome.seconds;
        DecodeResult result = constrained_decode(*outcome.automaton, *source, vocab, trie, dopts);
        JsonValue summary = JsonValue::object();
        summary.set("bytes", JsonValue::string(result.bytes));
        const char* term = "eos";
        switch (result.terminated_by) {
          case DecodeResult::Termination::Eos: term = "eos"; break;
          case DecodeResult::Termination::MaxTokens: term = "max_tokens"; break;
          case DecodeResult::Termination::Timeout: term = "timeout"; break;
          case DecodeResult::Termination::DeadEnd: term = "dead_end"; break;
        }
        summary.set("terminated_by", JsonValue::string(term));
        summary.set("output_tokens", JsonValue::number(static_cast<int64_t>(result.tokens.size())));
        summary.set("ff_tokens", JsonValue::number(static_cast<int64_t>(result.ff_token_count)));
        summary.set("gct_s", JsonValue::number(result.gct_seconds));
        summary.set("ttft_s", JsonValue::number(result.ttft_seconds));
        summary.set("tgt_s", JsonValue::number(result.tgt_seconds));
        std::cout << summary.serialize_pretty() << "\n";
        return result.terminated_by == DecodeResult::Termination::Eos ? kOk : kDataFailure;
      }

      if (*cmd_walk) {
        SchemaDocument doc = parse_schema(slurp(schema_path), schema_path);
        SchemaIR ir = normalize(doc);
        CompileOutcome outcome = compile(ir, manifest);
        if (!outcome.ok()) {
          std::cerr << "schema rejected by the compiler\n";
          return kDataFailure;
        }
        std::string bytes = slurp(instance_path);
        // trim a trailing newline so files created by editors walk cleanly
        while (!bytes.empty() && (bytes.back() == '\n' || bytes.back() == '\r')) bytes.pop_back();
        WalkResult walk = walk_instance(*outcome.automaton, vocab, trie, bytes);
        switch (walk.status) {
          case WalkResult::Status::Accepted: std::cout << "accepted\n"; return kOk;
          case WalkResult::Status::RejectedAt:
            std::cout << "rejected at byte " << walk.byte_pos << "\n";
            return kDataFailure;
          case WalkResult::Status::PrematureEnd:
            std::cout << "premature end\n";
            return kDataFailure;
          case WalkResult::Status::Untokenizable:
            std::cout << "untokenizable at byte " << walk.byte_pos << "\n";
            return kDataFailure;
        }
      }

      IngestResult corpus = ingest_dataset(corpus_path, ingest_opts);
      SourceFactory factory = make_source_factory(source_kind, flags.seed, vocab);
      RunConfig config;
      config.compile_timeout_seconds = flags.timeout_compile;
      config.generation_timeout_seconds = flags.timeout_generate;
      config.max_tokens = flags.max_tokens;
      config.fast_forward = flags.fast_forward;
      config.seed = flags.seed;
      config.jobs = flags.jobs;

      if (*cmd_cov) {
        CoverageRun run = run_coverage(corpus.records, config, manifest, vocab, trie, factory);
        if (!flags.quiet) std::cout << emit_report(run.report, ReportFormat::TextTable);
        if (!flags.out_dir.empty()) {
          write_file(fs::path(flags.out_dir) / "coverage.json",
                     run.report.to_json(true, &run.records).serialize_pretty() + "\n");
          write_file(fs::path(flags.out_dir) / "coverage.csv",
                     emit_report(run.report, ReportFormat::Csv));
        }
        bool all_compliant = true;
        for (const auto& rec : run.records)
          if (rec.declared && !rec.compliant.value_or(false)) all_compliant = false;
        return all_compliant ? kOk : kDataFailure;
      }

      if (*cmd_eff) {
        std::vector<EngineVariant> variants = {
            {"lm-only", false, false}, {"masked", true, false}, {"fast-forward", true, true}};
        EfficiencyReport report =
            run_efficiency(corpus.records, config, variants, manifest, vocab, trie, factory);
        if (!flags.quiet) std::cout << report.to_text();
        if (!flags.out_dir.empty())
          write_file(fs::path(flags.out_dir) / "efficiency.json",
                     report.to_json().serialize_pretty() + "\n");
        return kOk;
      }
    }

    if (*cmd_report) {
      JsonValue doc = JsonValue::parse(slurp(report_path));
      CoverageReport report;
      if (const JsonValue* e = doc.find("engine"); e && e->is_string())
        report.engine = e->as_string();
      if (const JsonValue* rows = doc.find("datasets"); rows && rows->is_array()) {
        for (const auto& row : rows->as_array()) {
          DatasetCoverage c;
          if (const JsonValue* v = row.find("dataset"); v && v->is_string())
            c.dataset = v->as_string();
          if (const JsonValue* v = row.find("schemas"); v && v->is_number())
            c.schemas = static_cast<uint64_t>(v->as_number().to_int64().value_or(0));
          if (const JsonValue* v = row.find("declared_count"); v && v->is_number())
            c.declared_count = static_cast<uint64_t>(v->as_number().to_int64().value_or(0));
          if (const JsonValue* v = row.find("empirical_count"); v && v->is_number())
            c.empirical_count = static_cast<uint64_t>(v->as_number().to_int64().value_or(0));
          if (c.schemas > 0) {
            c.declared = static_cast<double>(c.declared_count) / c.schemas;
            c.empirical = static_cast<double>(c.empirical_count) / c.schemas;
          }
          if (c.declared_count > 0)
            c.compliance = static_cast<double>(c.empirical_count) / c.declared_count;
          report.rows.push_back(std::move(c));
        }
      }
      std::string rendered = emit_report(report, parse_report_format(flags.format));
      if (!flags.quiet) std::cout << rendered;
      if (!flags.out_dir.empty())
        write_file(fs::path(flags.out_dir) / ("coverage." + flags.format), rendered);
      return kOk;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const VocabError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const BenchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
