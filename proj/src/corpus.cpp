#include "phishbench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/rng.hpp"
#include "phishbench/util.hpp"

namespace phishbench {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kZeroShotSuffix = "::rz";
constexpr std::string_view kFewShotSuffix = "::rf";

}  // namespace

Label parse_label(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  if (lowered == "phishing" || lowered == "1") return Label::Phishing;
  if (lowered == "legitimate" || lowered == "0") return Label::Legitimate;
  throw DataError("unknown label string: \"" + std::string(text) + "\"");
}

std::string_view label_name(Label label) {
  return label == Label::Phishing ? "phishing" : "legitimate";
}

Provenance parse_provenance(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  if (lowered == "original") return Provenance::Original;
  if (lowered == "zero_shot_rephrased") return Provenance::ZeroShotRephrased;
  if (lowered == "few_shot_rephrased") return Provenance::FewShotRephrased;
  if (lowered == "generated") return Provenance::Generated;
  throw DataError("unknown provenance string: \"" + std::string(text) + "\"");
}

std::string_view provenance_name(Provenance provenance) {
  switch (provenance) {
    case Provenance::Original: return "original";
    case Provenance::ZeroShotRephrased: return "zero_shot_rephrased";
    case Provenance::FewShotRephrased: return "few_shot_rephrased";
    case Provenance::Generated: return "generated";
  }
  throw DataError("invalid provenance value");
}

std::string rephrased_id(const std::string& source_id, Provenance provenance) {
  switch (provenance) {
    case Provenance::ZeroShotRephrased:
      return source_id + std::string(kZeroShotSuffix);
    case Provenance::FewShotRephrased:
      return source_id + std::string(kFewShotSuffix);
    default:
      throw DataError("rephrased_id requires a rephrased provenance");
  }
}

std::string lineage_root(const std::string& id) {
  const std::size_t pos = id.find("::");
  return pos == std::string::npos ? id : id.substr(0, pos);
}

void Corpus::add(EmailRecord record) {
  if (!ids_.insert(record.id).second) {
    throw DataError("duplicate record id in corpus \"" + name_ + "\": " + record.id);
  }
  records_.push_back(std::move(record));
}

const EmailRecord* Corpus::find(const std::string& id) const {
  if (ids_.count(id) == 0) return nullptr;
  for (const auto& record : records_) {
    if (record.id == id) return &record;
  }
  return nullptr;
}

std::map<Label, std::size_t> Corpus::class_counts() const {
  std::map<Label, std::size_t> counts;
  for (const auto& record : records_) ++counts[record.label];
  return counts;
}

namespace {

/// CSV state machine: comma separator, double-quote escaping ("" inside a
/// quoted field), CR/LF and CRLF row endings. Throws on quoting violations.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw DataError("malformed CSV quoting at line " + std::to_string(line) +
                          ": quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        if (field_was_quoted) {
          throw DataError("malformed CSV quoting at line " + std::to_string(line) +
                          ": content after closing quote");
        }
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw DataError("malformed CSV quoting: unterminated quote at end of file");
  }
  if (!field.empty() || field_was_quoted || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct RawRow {
  std::optional<std::string> id;
  std::string sender;
  std::string receiver;
  std::string subject;
  std::string body;
  std::optional<std::string> label;
  std::optional<std::string> provenance;
};

// Shared tail of both ingest paths: validate one raw row, either adding a
// record or bumping a rejection counter.
void finish_row(RawRow raw, std::size_t row_number, IngestResult& result) {
  ++result.total_rows;
  if (!raw.label || trim(*raw.label).empty()) {
    ++result.rejected_missing_label;
    return;
  }
  if (trim(raw.body).empty()) {
    ++result.rejected_empty_body;
    return;
  }
  EmailRecord record;
  record.id = raw.id && !raw.id->empty() ? *raw.id : std::to_string(row_number);
  record.sender = std::move(raw.sender);
  record.receiver = std::move(raw.receiver);
  record.subject = std::move(raw.subject);
  record.body = std::move(raw.body);
  record.label = parse_label(*raw.label);
  record.provenance =
      raw.provenance ? parse_provenance(*raw.provenance) : Provenance::Original;
  result.corpus.add(std::move(record));
}

IngestResult ingest_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(read_text_file(path));
  if (rows.empty()) throw DataError("CSV file has no header row: " + path.string());

  const auto& header = rows.front();
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.size(); ++i) {
    columns[to_lower(trim(header[i]))] = i;
  }
  for (const char* required : {"sender", "receiver", "subject", "body", "label"}) {
    if (columns.find(required) == columns.end()) {
      throw DataError("CSV missing required column \"" + std::string(required) +
                      "\": " + path.string());
    }
  }
  auto cell = [&](const std::vector<std::string>& row, const char* name)
      -> std::optional<std::string> {
    auto it = columns.find(name);
    if (it == columns.end() || it->second >= row.size()) return std::nullopt;
    return row[it->second];
  };

  IngestResult result;
  result.corpus.set_name(path.stem().string());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    RawRow raw;
    raw.id = cell(rows[r], "id");
    raw.sender = cell(rows[r], "sender").value_or("");
    raw.receiver = cell(rows[r], "receiver").value_or("");
    raw.subject = cell(rows[r], "subject").value_or("");
    raw.body = cell(rows[r], "body").value_or("");
    raw.label = cell(rows[r], "label");
    raw.provenance = cell(rows[r], "provenance");
    if (raw.provenance && trim(*raw.provenance).empty()) raw.provenance.reset();
    finish_row(std::move(raw), r, result);
  }
  return result;
}

IngestResult ingest_jsonl(const std::filesystem::path& path) {
  IngestResult result;
  result.corpus.set_name(path.stem().string());
  const auto lines = split_lines(read_text_file(path));
  std::size_t row_number = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    ++row_number;
    ordered_json parsed;
    try {
      parsed = ordered_json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed JSON at " + path.string() + " line " +
                      std::to_string(i + 1) + ": " + e.what());
    }
    if (!parsed.is_object()) {
      throw DataError("JSONL line " + std::to_string(i + 1) + " is not an object: " +
                      path.string());
    }
    auto text_or = [&](const char* key) -> std::optional<std::string> {
      if (!parsed.contains(key)) return std::nullopt;
      const auto& v = parsed.at(key);
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      throw DataError("JSONL line " + std::to_string(i + 1) + ": key \"" +
                      key + "\" is not a string");
    };
    RawRow raw;
    raw.id = text_or("id");
    raw.sender = text_or("sender").value_or("");
    raw.receiver = text_or("receiver").value_or("");
    raw.subject = text_or("subject").value_or("");
    raw.body = text_or("body").value_or("");
    raw.label = text_or("label");
    raw.provenance = text_or("provenance");
    finish_row(std::move(raw), row_number, result);
  }
  return result;
}

}  // namespace

IngestResult ingest(const std::filesystem::path& path, CorpusFormat format) {
  return format == CorpusFormat::Csv ? ingest_csv(path) : ingest_jsonl(path);
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& record : corpus.records()) {
    ordered_json line;
    line["id"] = record.id;
    line["sender"] = record.sender;
    line["receiver"] = record.receiver;
    line["subject"] = record.subject;
    line["body"] = record.body;
    line["label"] = label_name(record.label);
    line["provenance"] = provenance_name(record.provenance);
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

void export_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  write_text_file(path, to_jsonl(corpus));
}

void export_csv(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out = "id,sender,receiver,subject,body,label,provenance\n";
  for (const auto& record : corpus.records()) {
    out += csv_escape(record.id);
    out.push_back(',');
    out += csv_escape(record.sender);
    out.push_back(',');
    out += csv_escape(record.receiver);
    out.push_back(',');
    out += csv_escape(record.subject);
    out.push_back(',');
    out += csv_escape(record.body);
    out.push_back(',');
    out += std::string(label_name(record.label));
    out.push_back(',');
    out += std::string(provenance_name(record.provenance));
    out.push_back('\n');
  }
  write_text_file(path, out);
}

namespace {

std::vector<std::size_t> indices_of_class(const Corpus& corpus, Label label) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < corpus.records().size(); ++i) {
    if (corpus.records()[i].label == label) indices.push_back(i);
  }
  return indices;
}

}  // namespace

Corpus sample_balanced(const Corpus& corpus, const SampleSpec& spec) {
  if (spec.per_class < 1) throw DataError("per_class must be at least 1");
  Xoshiro256StarStar rng(derive_seed(spec.seed, "sample_balanced"));

  std::vector<bool> keep(corpus.size(), false);
  for (Label label : {Label::Phishing, Label::Legitimate}) {
    const auto pool = indices_of_class(corpus, label);
    if (pool.size() < spec.per_class) {
      throw DataError("insufficient " + std::string(label_name(label)) +
                      " records: need " + std::to_string(spec.per_class) +
                      ", have " + std::to_string(pool.size()));
    }
    for (std::size_t pick : sample_indices(pool.size(), spec.per_class, rng)) {
      keep[pool[pick]] = true;
    }
  }

  Corpus sampled(corpus.name());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) sampled.add(corpus.records()[i]);
  }
  return sampled;
}

SplitResult split(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train_fraction must be in (0,1)");
  }
  for (const auto& [label, count] : corpus.class_counts()) {
    if (count < 2) {
      throw DataError("split needs at least 2 records per class; class " +
                      std::string(label_name(label)) + " has " +
                      std::to_string(count));
    }
  }

  Xoshiro256StarStar rng(derive_seed(seed, "split"));
  std::vector<bool> to_train(corpus.size(), false);
  for (Label label : {Label::Phishing, Label::Legitimate}) {
    const auto pool = indices_of_class(corpus, label);
    if (pool.empty()) continue;
    const auto take = static_cast<std::size_t>(
        std::llround(static_cast<double>(pool.size()) * train_fraction));
    for (std::size_t pick : sample_indices(pool.size(), take, rng)) {
      to_train[pool[pick]] = true;
    }
  }

  SplitResult result;
  result.train.set_name(corpus.name() + "-train");
  result.test.set_name(corpus.name() + "-test");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (to_train[i] ? result.train : result.test).add(corpus.records()[i]);
  }
  if (result.train.empty() || result.test.empty()) {
    throw DataError("degenerate train_fraction " + std::to_string(train_fraction) +
                    " produced an empty split side");
  }
  return result;
}

LengthStats length_stats(const Corpus& corpus) {
  LengthStats stats;
  if (corpus.empty()) return stats;
  stats.min_chars = corpus.records().front().body.size();
  double total = 0.0;
  for (const auto& record : corpus.records()) {
    const std::size_t n = record.body.size();
    stats.min_chars = std::min(stats.min_chars, n);
    stats.max_chars = std::max(stats.max_chars, n);
    total += static_cast<double>(n);
  }
  stats.mean_chars = total / static_cast<double>(corpus.size());
  return stats;
}

}  // namespace phishbench
