#include "phishbench/textenc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/hash.hpp"
#include "phishbench/util.hpp"

namespace phishbench {

namespace {
using ordered_json = nlohmann::ordered_json;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= config.min_token_length) tokens.push_back(current);
    current.clear();
  };
  for (char c : text) {
    if (is_ascii_alnum(c)) {
      current.push_back(config.lowercase
                            ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                            : c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string encoding_text(const EmailRecord& record) {
  return record.subject + " " + record.body;
}

std::optional<std::uint32_t> Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::uint32_t index) const {
  const double n = static_cast<double>(num_documents_);
  const double df = static_cast<double>(df_.at(index));
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

std::string Vocabulary::content_hash() const {
  std::string blob = "vocabulary\n";
  blob += "num_documents=" + std::to_string(num_documents_) + "\n";
  blob += "lowercase=" + std::to_string(config_.lowercase ? 1 : 0) + "\n";
  blob += "min_token_length=" + std::to_string(config_.min_token_length) + "\n";
  blob += "min_document_frequency=" + std::to_string(config_.min_document_frequency) + "\n";
  blob += "max_vocab=" +
          (config_.max_vocab ? std::to_string(*config_.max_vocab) : std::string("none")) +
          "\n";
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    blob += tokens_[i] + "\t" + std::to_string(df_[i]) + "\n";
  }
  return content_hash128(blob);
}

Vocabulary Vocabulary::fit(const Corpus& corpus, const TokenizerConfig& config) {
  if (corpus.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");

  std::map<std::string, std::uint32_t> df;
  for (const auto& record : corpus.records()) {
    auto tokens = tokenize(encoding_text(record), config);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const auto& token : tokens) ++df[token];
  }
  if (df.empty()) {
    throw DataError("all documents are empty after tokenization");
  }

  std::vector<std::pair<std::string, std::uint32_t>> entries;
  entries.reserve(df.size());
  for (auto& [token, count] : df) {
    if (count >= config.min_document_frequency) entries.emplace_back(token, count);
  }
  if (entries.empty()) {
    throw DataError("min_document_frequency pruned the entire vocabulary");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (config.max_vocab && entries.size() > *config.max_vocab) {
    entries.resize(*config.max_vocab);
  }

  Vocabulary vocab;
  vocab.config_ = config;
  vocab.num_documents_ = corpus.size();
  vocab.tokens_.reserve(entries.size());
  vocab.df_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    vocab.index_[entries[i].first] = static_cast<std::uint32_t>(i);
    vocab.tokens_.push_back(entries[i].first);
    vocab.df_.push_back(entries[i].second);
  }
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::string out;
  ordered_json header;
  header["type"] = "vocabulary";
  header["num_documents"] = num_documents_;
  header["lowercase"] = config_.lowercase;
  header["min_token_length"] = config_.min_token_length;
  header["min_document_frequency"] = config_.min_document_frequency;
  if (config_.max_vocab) {
    header["max_vocab"] = *config_.max_vocab;
  } else {
    header["max_vocab"] = nullptr;
  }
  out += header.dump();
  out.push_back('\n');
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    ordered_json row;
    row["token"] = tokens_[i];
    row["index"] = i;
    row["df"] = df_[i];
    out += row.dump();
    out.push_back('\n');
  }
  write_text_file(path, out);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  const auto lines = split_lines(read_text_file(path));
  if (lines.empty()) throw DataError("empty vocabulary file: " + path.string());

  ordered_json header;
  try {
    header = ordered_json::parse(lines.front());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed vocabulary header in " + path.string() + ": " + e.what());
  }
  if (!header.is_object() || header.value("type", "") != "vocabulary") {
    throw DataError("not a vocabulary file: " + path.string());
  }

  Vocabulary vocab;
  vocab.num_documents_ = header.at("num_documents").get<std::size_t>();
  vocab.config_.lowercase = header.at("lowercase").get<bool>();
  vocab.config_.min_token_length = header.at("min_token_length").get<std::size_t>();
  vocab.config_.min_document_frequency =
      header.at("min_document_frequency").get<std::size_t>();
  if (!header.at("max_vocab").is_null()) {
    vocab.config_.max_vocab = header.at("max_vocab").get<std::size_t>();
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    ordered_json row;
    try {
      row = ordered_json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed vocabulary row at " + path.string() + " line " +
                      std::to_string(i + 1) + ": " + e.what());
    }
    const auto index = row.at("index").get<std::uint32_t>();
    if (index != vocab.tokens_.size()) {
      throw DataError("vocabulary rows out of order at line " + std::to_string(i + 1));
    }
    vocab.tokens_.push_back(row.at("token").get<std::string>());
    vocab.df_.push_back(row.at("df").get<std::uint32_t>());
    vocab.index_[vocab.tokens_.back()] = index;
  }
  if (vocab.tokens_.empty()) {
    throw DataError("vocabulary file has no token rows: " + path.string());
  }
  return vocab;
}

double FeatureVector::l2_norm() const {
  double sum = 0.0;
  for (const auto& [index, value] : entries) sum += value * value;
  return std::sqrt(sum);
}

double FeatureVector::dot(const std::vector<double>& dense) const {
  double sum = 0.0;
  for (const auto& [index, value] : entries) sum += value * dense[index];
  return sum;
}

namespace {

// Token counts restricted to the vocabulary, keyed by index (ordered for a
// stable sparse layout).
std::map<std::uint32_t, double> vocab_counts(const EmailRecord& record,
                                             const Vocabulary& vocab) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokenize(encoding_text(record), vocab.config())) {
    if (auto index = vocab.index_of(token)) counts[*index] += 1.0;
  }
  return counts;
}

}  // namespace

FeatureVector encode_bow(const EmailRecord& record, const Vocabulary& vocab) {
  FeatureVector vec;
  vec.dimension = vocab.size();
  for (const auto& [index, count] : vocab_counts(record, vocab)) {
    vec.entries.emplace_back(index, count);
  }
  return vec;
}

FeatureVector encode_tfidf(const EmailRecord& record, const Vocabulary& vocab) {
  FeatureVector vec;
  vec.dimension = vocab.size();
  for (const auto& [index, count] : vocab_counts(record, vocab)) {
    vec.entries.emplace_back(index, count * vocab.idf(index));
  }
  const double norm = vec.l2_norm();
  if (norm > 0.0) {
    for (auto& [index, value] : vec.entries) value /= norm;
  }
  return vec;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);

  EmbeddingTable table;
  table.content_hash_ = content_hash128(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::istringstream stream{lines[i]};
    std::string token;
    stream >> token;
    std::vector<double> values;
    double v = 0.0;
    while (stream >> v) values.push_back(v);
    if (!stream.eof()) {
      throw DataError("unparsable number in embedding file at line " +
                      std::to_string(i + 1));
    }
    if (values.empty()) {
      throw DataError("embedding line " + std::to_string(i + 1) + " has no values");
    }
    if (table.dimension_ == 0) {
      table.dimension_ = values.size();
    } else if (values.size() != table.dimension_) {
      throw DataError("inconsistent embedding dimension at line " +
                      std::to_string(i + 1) + ": expected " +
                      std::to_string(table.dimension_) + ", got " +
                      std::to_string(values.size()));
    }
    auto it = table.vectors_.find(token);
    if (it != table.vectors_.end()) {
      it->second = std::move(values);
      ++table.duplicate_count_;
    } else {
      table.vectors_.emplace(token, std::move(values));
    }
  }
  if (table.vectors_.empty()) throw DataError("empty embedding table: " + path.string());
  return table;
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

FeatureVector encode_embedding_avg(const EmailRecord& record,
                                   const EmbeddingTable& table,
                                   const TokenizerConfig& config) {
  std::vector<double> sum(table.dimension(), 0.0);
  std::size_t hits = 0;
  for (const auto& token : tokenize(encoding_text(record), config)) {
    if (const auto* vec = table.find(token)) {
      for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += (*vec)[d];
      ++hits;
    }
  }
  FeatureVector out;
  out.dimension = table.dimension();
  if (hits == 0) return out;
  for (std::size_t d = 0; d < sum.size(); ++d) {
    const double mean = sum[d] / static_cast<double>(hits);
    if (mean != 0.0) out.entries.emplace_back(static_cast<std::uint32_t>(d), mean);
  }
  return out;
}

EncoderKind parse_encoder_kind(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  if (lowered == "bow") return EncoderKind::Bow;
  if (lowered == "tfidf") return EncoderKind::Tfidf;
  if (lowered == "embedding") return EncoderKind::EmbeddingAvg;
  throw ConfigError("unknown encoder kind: \"" + std::string(text) + "\"");
}

std::string_view encoder_kind_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::Bow: return "bow";
    case EncoderKind::Tfidf: return "tfidf";
    case EncoderKind::EmbeddingAvg: return "embedding";
  }
  throw ConfigError("invalid encoder kind value");
}

EncoderBinding EncoderBinding::bow(std::shared_ptr<const Vocabulary> vocab) {
  EncoderBinding binding;
  binding.kind_ = EncoderKind::Bow;
  binding.vocab_ = std::move(vocab);
  return binding;
}

EncoderBinding EncoderBinding::tfidf(std::shared_ptr<const Vocabulary> vocab) {
  EncoderBinding binding;
  binding.kind_ = EncoderKind::Tfidf;
  binding.vocab_ = std::move(vocab);
  return binding;
}

EncoderBinding EncoderBinding::embedding(std::shared_ptr<const EmbeddingTable> table,
                                         TokenizerConfig config) {
  EncoderBinding binding;
  binding.kind_ = EncoderKind::EmbeddingAvg;
  binding.table_ = std::move(table);
  binding.tokenizer_ = config;
  return binding;
}

std::size_t EncoderBinding::dimension() const {
  return kind_ == EncoderKind::EmbeddingAvg ? table_->dimension() : vocab_->size();
}

FeatureVector EncoderBinding::encode(const EmailRecord& record) const {
  switch (kind_) {
    case EncoderKind::Bow: return encode_bow(record, *vocab_);
    case EncoderKind::Tfidf: return encode_tfidf(record, *vocab_);
    case EncoderKind::EmbeddingAvg:
      return encode_embedding_avg(record, *table_, tokenizer_);
  }
  throw DataError("invalid encoder kind value");
}

std::string EncoderBinding::fingerprint() const {
  std::string state_hash;
  if (kind_ == EncoderKind::EmbeddingAvg) {
    // The table alone does not pin the encoding; the tokenizer settings
    // that feed it are part of the identity.
    state_hash = table_->content_hash();
    state_hash += tokenizer_.lowercase ? "|lowercase" : "|case-sensitive";
    state_hash += "|min_len=" + std::to_string(tokenizer_.min_token_length);
  } else {
    state_hash = vocab_->content_hash();
  }
  return content_hash128(std::string(encoder_kind_name(kind_)) + ":" + state_hash);
}

FeatureMatrix encode_corpus(const Corpus& corpus, const EncoderBinding& binding) {
  FeatureMatrix matrix;
  matrix.dimension = binding.dimension();
  matrix.rows.reserve(corpus.size());
  matrix.labels.reserve(corpus.size());
  for (const auto& record : corpus.records()) {
    matrix.rows.push_back(binding.encode(record));
    matrix.labels.push_back(record.label == Label::Phishing ? 1 : 0);
  }
  return matrix;
}

}  // namespace phishbench
