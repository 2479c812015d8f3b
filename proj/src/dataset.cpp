/*!
 * Copyright (c) 2026 by Contributors
 * \file src/dataset.cpp
 * \brief Ingestion pipeline and dataset statistics.
 */
#include "tokengate/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace tokengate {

namespace fs = std::filesystem;

std::string_view tier_name(ComplexityTier t) {
  switch (t) {
    case ComplexityTier::Trivial: return "trivial";
    case ComplexityTier::Easy: return "easy";
    case ComplexityTier::Medium: return "medium";
    case ComplexityTier::Hard: return "hard";
    case ComplexityTier::Ultra: return "ultra";
  }
  return "trivial";
}

ComplexityTier assign_tier(uint64_t field_count) {
  if (field_count < 10) return ComplexityTier::Trivial;
  if (field_count <= 30) return ComplexityTier::Easy;
  if (field_count <= 100) return ComplexityTier::Medium;
  if (field_count <= 500) return ComplexityTier::Hard;
  return ComplexityTier::Ultra;
}

// ---------------------------------------------------------------------------
// Depth and fan-out
// ---------------------------------------------------------------------------

namespace {

// Keywords whose values are subschemas (one, a list, or a name map).
bool is_schema_child_keyword(std::string_view k) {
  return k == "items" || k == "additionalProperties" || k == "not" || k == "if" || k == "then" ||
         k == "else" || k == "contains" || k == "propertyNames" || k == "unevaluatedItems" ||
         k == "unevaluatedProperties" || k == "contentSchema" || k == "additionalItems";
}
bool is_schema_list_keyword(std::string_view k) {
  return k == "allOf" || k == "anyOf" || k == "oneOf" || k == "prefixItems";
}
bool is_schema_map_keyword(std::string_view k) {
  return k == "properties" || k == "patternProperties" || k == "$defs" || k == "definitions" ||
         k == "dependentSchemas";
}

uint64_t depth_of(const JsonValue& schema) {
  if (!schema.is_object()) return 0;
  uint64_t deepest = 0;
  for (const auto& m : schema.as_object()) {
    if (is_schema_child_keyword(m.key) && (m.value.is_object() || m.value.is_boolean())) {
      deepest = std::max(deepest, 1 + depth_of(m.value));
    } else if (is_schema_list_keyword(m.key) && m.value.is_array()) {
      for (const auto& item : m.value.as_array())
        deepest = std::max(deepest, 1 + depth_of(item));
    } else if (m.key == "items" && m.value.is_array()) {
      for (const auto& item : m.value.as_array())
        deepest = std::max(deepest, 1 + depth_of(item));
    } else if (is_schema_map_keyword(m.key) && m.value.is_object()) {
      for (const auto& sub : m.value.as_object())
        deepest = std::max(deepest, 1 + depth_of(sub.value));
    }
  }
  return deepest;
}

uint64_t fan_out_of(const JsonValue& v) {
  uint64_t best = 0;
  if (v.is_object()) {
    best = v.as_object().size();
    for (const auto& m : v.as_object()) best = std::max(best, fan_out_of(m.value));
  } else if (v.is_array()) {
    for (const auto& item : v.as_array()) best = std::max(best, fan_out_of(item));
  }
  return best;
}

// Empty schemas carry no constraint: {}, true, or annotation-only objects.
bool is_empty_schema(const JsonValue& raw) {
  if (raw.is_boolean()) return raw.as_boolean();
  if (!raw.is_object()) return false;
  for (const auto& m : raw.as_object()) {
    if (m.key != "$schema" && m.key != "$id" && m.key != "title" && m.key != "description" &&
        m.key != "$comment" && m.key != "examples" && m.key != "default")
      return false;
  }
  return true;
}

}  // namespace

uint64_t schema_depth(const SchemaDocument& doc) { return depth_of(doc.raw); }
uint64_t schema_max_fan_out(const SchemaDocument& doc) { return fan_out_of(doc.raw); }

DatasetRecord make_record(SchemaDocument doc, std::string dataset) {
  DatasetRecord rec;
  rec.dataset = std::move(dataset);
  rec.field_count = count_fields(doc);
  rec.tier = assign_tier(rec.field_count);
  rec.size_bytes = doc.raw.serialize().size();
  rec.max_fan_out = schema_max_fan_out(doc);
  rec.depth = schema_depth(doc);
  rec.schema = std::move(doc);
  return rec;
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

IngestResult ingest_dataset(const std::string& path, const IngestOptions& options) {
  IngestResult result;
  IngestionReport& report = result.report;

  std::map<std::string, std::string> dataset_names;
  if (options.metadata_path) {
    std::ifstream meta(*options.metadata_path, std::ios::binary);
    if (!meta) throw SchemaError(SchemaError::Code::IoError,
                                 "cannot open metadata file " + *options.metadata_path);
    std::ostringstream ss;
    ss << meta.rdbuf();
    JsonValue doc = JsonValue::parse(ss.str());
    if (doc.is_object()) {
      for (const auto& m : doc.as_object())
        if (m.value.is_string()) dataset_names[m.key] = m.value.as_string();
    }
  }

  // gather (source_id, text) in deterministic order
  std::vector<std::pair<std::string, std::string>> inputs;
  fs::path root(path);
  std::error_code ec;
  if (fs::is_directory(root, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw SchemaError(SchemaError::Code::IoError, "cannot open " + f.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      inputs.emplace_back(fs::relative(f, root).string(), ss.str());
    }
  } else if (fs::is_regular_file(root, ec)) {
    std::ifstream in(root, std::ios::binary);
    if (!in) throw SchemaError(SchemaError::Code::IoError, "cannot open " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      inputs.emplace_back(root.filename().string() + ":" + std::to_string(lineno), line);
    }
  } else {
    throw SchemaError(SchemaError::Code::IoError, "no such corpus path: " + path);
  }

  std::unordered_map<size_t, std::vector<size_t>> dedup;  // structural hash -> record indexes
  for (auto& [source_id, text] : inputs) {
    ++report.files_seen;
    SchemaDocument doc;
    try {
      doc = parse_schema(text, source_id);
    } catch (const SchemaError& e) {
      if (e.code() == SchemaError::Code::NotASchema) {
        ++report.not_schema;
        report.drops.emplace_back(source_id, "not a schema");
      } else {
        ++report.malformed;
        report.drops.emplace_back(source_id, "malformed JSON");
      }
      continue;
    }
    try {
      normalize(doc);
    } catch (const SchemaError& e) {
      ++report.unresolvable;
      report.drops.emplace_back(source_id, std::string("normalize: ") + e.what());
      continue;
    }
    if (is_empty_schema(doc.raw)) {
      ++report.empty;
      report.drops.emplace_back(source_id, "empty schema");
      continue;
    }
    size_t h = doc.raw.structural_hash();
    bool duplicate = false;
    for (size_t idx : dedup[h]) {
      if (result.records[idx].schema.raw == doc.raw) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      ++report.duplicates;
      report.drops.emplace_back(source_id, "duplicate");
      continue;
    }
    std::string dataset = options.default_dataset;
    if (auto it = dataset_names.find(source_id); it != dataset_names.end()) dataset = it->second;
    dedup[h].push_back(result.records.size());
    result.records.push_back(make_record(std::move(doc), std::move(dataset)));
    ++report.accepted;
  }
  return result;
}

JsonValue IngestionReport::to_json() const {
  JsonValue doc = JsonValue::object();
  doc.set("files_seen", JsonValue::number(static_cast<int64_t>(files_seen)));
  doc.set("accepted", JsonValue::number(static_cast<int64_t>(accepted)));
  JsonValue dropped = JsonValue::object();
  dropped.set("malformed", JsonValue::number(static_cast<int64_t>(malformed)));
  dropped.set("not_schema", JsonValue::number(static_cast<int64_t>(not_schema)));
  dropped.set("unresolvable", JsonValue::number(static_cast<int64_t>(unresolvable)));
  dropped.set("empty", JsonValue::number(static_cast<int64_t>(empty)));
  dropped.set("duplicates", JsonValue::number(static_cast<int64_t>(duplicates)));
  doc.set("dropped", std::move(dropped));
  JsonValue drop_list = JsonValue::array();
  for (const auto& [source, reason] : drops) {
    JsonValue entry = JsonValue::object();
    entry.set("source_id", JsonValue::string(source));
    entry.set("reason", JsonValue::string(reason));
    drop_list.push_back(std::move(entry));
  }
  doc.set("drops", std::move(drop_list));
  return doc;
}

std::string IngestionReport::to_text() const {
  std::ostringstream out;
  out << "files seen    " << files_seen << "\n"
      << "accepted      " << accepted << "\n"
      << "malformed     " << malformed << "\n"
      << "not a schema  " << not_schema << "\n"
      << "unresolvable  " << unresolvable << "\n"
      << "empty         " << empty << "\n"
      << "duplicates    " << duplicates << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

namespace {

// Lower-median convention for even-length inputs.
template <typename T>
T lower_median(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace

StatsTable schema_stats(const std::vector<DatasetRecord>& records) {
  if (records.empty())
    throw SchemaError(SchemaError::Code::EmptyInput, "no records to aggregate");
  std::map<std::string, std::vector<const DatasetRecord*>> groups;
  for (const auto& r : records) groups[r.dataset].push_back(&r);

  StatsTable table;
  for (const auto& [name, group] : groups) {
    StatsRow row;
    row.dataset = name;
    row.count = group.size();
    std::vector<uint64_t> sizes, fields, fans, depths;
    for (const auto* r : group) {
      sizes.push_back(r->size_bytes);
      fields.push_back(r->field_count);
      fans.push_back(r->max_fan_out);
      depths.push_back(r->depth);
    }
    row.size_kb_med = static_cast<double>(lower_median(sizes)) / 1024.0;
    row.size_kb_max = static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) / 1024.0;
    row.field_med = lower_median(fields);
    row.field_max = *std::max_element(fields.begin(), fields.end());
    row.fan_out_med = lower_median(fans);
    row.fan_out_max = *std::max_element(fans.begin(), fans.end());
    row.depth_med = lower_median(depths);
    row.depth_max = *std::max_element(depths.begin(), depths.end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

JsonValue StatsTable::to_json() const {
  JsonValue arr = JsonValue::array();
  for (const auto& r : rows) {
    JsonValue row = JsonValue::object();
    row.set("dataset", JsonValue::string(r.dataset));
    row.set("count", JsonValue::number(static_cast<int64_t>(r.count)));
    row.set("size_kb_med", JsonValue::number(r.size_kb_med));
    row.set("size_kb_max", JsonValue::number(r.size_kb_max));
    row.set("field_count_med", JsonValue::number(static_cast<int64_t>(r.field_med)));
    row.set("field_count_max", JsonValue::number(static_cast<int64_t>(r.field_max)));
    row.set("max_fan_out_med", JsonValue::number(static_cast<int64_t>(r.fan_out_med)));
    row.set("max_fan_out_max", JsonValue::number(static_cast<int64_t>(r.fan_out_max)));
    row.set("depth_med", JsonValue::number(static_cast<int64_t>(r.depth_med)));
    row.set("depth_max", JsonValue::number(static_cast<int64_t>(r.depth_max)));
    arr.push_back(std::move(row));
  }
  return arr;
}

std::string StatsTable::to_text() const {
  std::ostringstream out;
  auto cell = [](const std::string& s, size_t w) {
    std::string c = s;
    if (c.size() < w) c.append(w - c.size(), ' ');
    return c;
  };
  out << cell("Dataset", 18) << cell("Count", 8) << cell("Size(KB)", 16) << cell("Fields", 14)
      << cell("MaxFanOut", 14) << cell("Depth", 12) << "\n";
  for (const auto& r : rows) {
    char size_buf[48];
    snprintf(size_buf, sizeof(size_buf), "%.1f / %.1f", r.size_kb_med, r.size_kb_max);
    out << cell(r.dataset, 18) << cell(std::to_string(r.count), 8) << cell(size_buf, 16)
        << cell(std::to_string(r.field_med) + " / " + std::to_string(r.field_max), 14)
        << cell(std::to_string(r.fan_out_med) + " / " + std::to_string(r.fan_out_max), 14)
        << cell(std::to_string(r.depth_med) + " / " + std::to_string(r.depth_max), 12) << "\n";
  }
  return out.str();
}

}  // namespace tokengate
