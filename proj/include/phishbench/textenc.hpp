#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phishbench/corpus.hpp"

namespace phishbench {

struct TokenizerConfig {
  bool lowercase = true;
  std::size_t min_token_length = 2;
  std::optional<std::size_t> max_vocab;
  std::size_t min_document_frequency = 1;
};

/// Maximal runs of ASCII alphanumeric characters, lowercased when
/// configured, dropping tokens shorter than min_token_length, in order of
/// appearance. "3.0.1" therefore yields nothing at the default minimum
/// length: the digit runs "3","0","1" are all too short.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config);

/// The text a record contributes to the feature space: subject and body
/// joined by one space. Sender/receiver never enter the encoding.
std::string encoding_text(const EmailRecord& record);

/// Token→index map with document frequencies. Indices are dense 0..V-1,
/// assigned in (document frequency desc, token asc) order — the same
/// ordering used for max_vocab truncation.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return tokens_.size(); }
  std::size_t num_documents() const { return num_documents_; }
  const TokenizerConfig& config() const { return config_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::optional<std::uint32_t> index_of(const std::string& token) const;
  const std::string& token_at(std::uint32_t index) const { return tokens_.at(index); }
  std::uint32_t document_frequency(std::uint32_t index) const { return df_.at(index); }

  /// Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1.
  double idf(std::uint32_t index) const;

  /// Stable fingerprint over the full vocabulary contents and tokenizer
  /// config; used to bind models to the vocabulary they were fitted on.
  std::string content_hash() const;

  static Vocabulary fit(const Corpus& corpus, const TokenizerConfig& config);

  /// First line is a metadata header object; each following line is
  /// {"token":..., "index":..., "df":...} in index order.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> tokens_;
  std::vector<std::uint32_t> df_;
  std::size_t num_documents_ = 0;
  TokenizerConfig config_;
};

/// Sparse vector: (index, value) pairs sorted by index, zero values never
/// stored, all indices < dimension.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::size_t dimension = 0;

  double l2_norm() const;
  /// Dot product against a dense weight vector of matching dimension.
  double dot(const std::vector<double>& dense) const;
};

/// Raw token counts over subject+body; out-of-vocabulary tokens ignored.
FeatureVector encode_bow(const EmailRecord& record, const Vocabulary& vocab);

/// tf(token) * idf(token), then L2-normalized (a zero vector stays zero).
FeatureVector encode_tfidf(const EmailRecord& record, const Vocabulary& vocab);

/// Pretrained word vectors in plain text: one token per line followed by d
/// whitespace-separated decimals. Duplicate tokens: last wins, counted.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::filesystem::path& path);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t duplicate_count() const { return duplicate_count_; }
  const std::vector<double>* find(const std::string& token) const;

  std::string content_hash() const { return content_hash_; }

 private:
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::size_t dimension_ = 0;
  std::size_t duplicate_count_ = 0;
  std::string content_hash_;
};

/// Unweighted mean of the vectors of in-table tokens; all-OOV documents map
/// to the zero vector of dimension d.
FeatureVector encode_embedding_avg(const EmailRecord& record,
                                   const EmbeddingTable& table,
                                   const TokenizerConfig& config);

enum class EncoderKind { Bow, Tfidf, EmbeddingAvg };

EncoderKind parse_encoder_kind(std::string_view text);
std::string_view encoder_kind_name(EncoderKind kind);

/// One fitted encoder: kind plus the fitted state it needs. Encoding is a
/// pure function of (record, binding); fitting happened elsewhere, on
/// training data only.
class EncoderBinding {
 public:
  static EncoderBinding bow(std::shared_ptr<const Vocabulary> vocab);
  static EncoderBinding tfidf(std::shared_ptr<const Vocabulary> vocab);
  static EncoderBinding embedding(std::shared_ptr<const EmbeddingTable> table,
                                  TokenizerConfig config);

  EncoderKind kind() const { return kind_; }
  std::size_t dimension() const;
  const Vocabulary* vocabulary() const { return vocab_.get(); }

  FeatureVector encode(const EmailRecord& record) const;

  /// Hash of (kind, fitted-state hash); models store this to detect being
  /// paired with the wrong encoder.
  std::string fingerprint() const;

 private:
  EncoderKind kind_ = EncoderKind::Bow;
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const EmbeddingTable> table_;
  TokenizerConfig tokenizer_;
};

/// Encoded corpus with aligned labels (Phishing=1, Legitimate=0).
struct FeatureMatrix {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  std::size_t dimension = 0;

  std::size_t size() const { return rows.size(); }
};

FeatureMatrix encode_corpus(const Corpus& corpus, const EncoderBinding& binding);

}  // namespace phishbench
