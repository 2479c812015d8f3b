/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/dataset.hpp
 * \brief Corpus ingestion, complexity tiers, and dataset statistics.
 */
#ifndef TOKENGATE_DATASET_HPP_
#define TOKENGATE_DATASET_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tokengate/schema.hpp"

namespace tokengate {

enum class ComplexityTier { Trivial, Easy, Medium, Hard, Ultra };

std::string_view tier_name(ComplexityTier t);

// Field-count thresholds: <10 Trivial, 10-30 Easy, 31-100 Medium,
// 101-500 Hard, >500 Ultra. A shared boundary belongs to the lower tier.
ComplexityTier assign_tier(uint64_t field_count);

struct DatasetRecord {
  SchemaDocument schema;
  std::string dataset;  // group name from the sidecar, or the default
  ComplexityTier tier = ComplexityTier::Trivial;
  uint64_t field_count = 0;
  uint64_t size_bytes = 0;   // canonical compact serialization length
  uint64_t max_fan_out = 0;  // largest member count of any object
  uint64_t depth = 0;        // schema-node nesting levels, root = 0
};

struct IngestionReport {
  uint64_t files_seen = 0;
  uint64_t accepted = 0;
  uint64_t malformed = 0;       // JSON parse failures
  uint64_t not_schema = 0;      // top-level not an object/boolean
  uint64_t unresolvable = 0;    // normalize failures (bad refs)
  uint64_t empty = 0;           // no meaningful constraints
  uint64_t duplicates = 0;      // key-order-insensitive structural dupes
  std::vector<std::pair<std::string, std::string>> drops;  // (source_id, reason)

  JsonValue to_json() const;
  std::string to_text() const;
};

struct IngestOptions {
  // sidecar JSON file: source_id -> dataset name
  std::optional<std::string> metadata_path;
  std::string default_dataset = "default";
  unsigned jobs = 0;  // 0 = available parallelism
};

struct IngestResult {
  std::vector<DatasetRecord> records;
  IngestionReport report;
};

// Ingests a directory of .json files or a newline-delimited JSON file.
// Invalid schemas are dropped with a reason; duplicates are detected under
// key-order-insensitive structural equality; empty schemas are dropped.
IngestResult ingest_dataset(const std::string& path, const IngestOptions& options = {});

// Statistics computed deterministically from the schema document.
uint64_t schema_depth(const SchemaDocument& doc);
uint64_t schema_max_fan_out(const SchemaDocument& doc);
DatasetRecord make_record(SchemaDocument doc, std::string dataset);

struct StatsRow {
  std::string dataset;
  uint64_t count = 0;
  double size_kb_med = 0, size_kb_max = 0;
  uint64_t field_med = 0, field_max = 0;
  uint64_t fan_out_med = 0, fan_out_max = 0;
  uint64_t depth_med = 0, depth_max = 0;
};

struct StatsTable {
  std::vector<StatsRow> rows;  // sorted by dataset name

  JsonValue to_json() const;
  std::string to_text() const;
};

// Median/max per dataset group. Even-length medians take the lower of the
// two central values. Throws SchemaError(EmptyInput) on an empty list.
StatsTable schema_stats(const std::vector<DatasetRecord>& records);

}  // namespace tokengate

#endif  // TOKENGATE_DATASET_HPP_
