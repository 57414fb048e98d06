// Copyright 2026 The progres Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sparse n-gram vectors for the join workflows.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "progres/datamodel.hpp"

namespace progres {

struct TokenizerCfg {
  enum class Kind : std::uint8_t { CharNgram, TokenNgram };
  Kind kind = Kind::CharNgram;
  int n = 3;

  static TokenizerCfg chars(int n) { return make(Kind::CharNgram, n); }
  static TokenizerCfg tokens(int n) { return make(Kind::TokenNgram, n); }

  static TokenizerCfg make(Kind kind, int n) {
    const bool ok = kind == Kind::CharNgram ? (n >= 3 && n <= 5) : (n >= 1 && n <= 2);
    if (!ok) throw ConfigError("tokenizer n=" + std::to_string(n) + " out of range");
    return TokenizerCfg{kind, n};
  }

  std::string name() const {
    return (kind == Kind::CharNgram ? "char" : "token") + std::to_string(n);
  }
  friend bool operator==(const TokenizerCfg&, const TokenizerCfg&) = default;
};

enum class FeatureScoring : std::uint8_t { BS, TF, TFIDF };

inline std::string_view to_string(FeatureScoring s) {
  switch (s) {
    case FeatureScoring::BS: return "bs";
    case FeatureScoring::TF: return "tf";
    case FeatureScoring::TFIDF: return "tfidf";
  }
  return "?";
}

using FeatureId = std::uint32_t;

// Feature ids strictly increasing, scores > 0.
struct SparseVector {
  std::vector<std::pair<FeatureId, double>> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

inline std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

// Multiset of features in occurrence order. Character n-grams slide over the
// raw text (spaces included, no boundary padding); token n-grams join
// consecutive whitespace tokens with a single space.
inline std::vector<std::string> tokenize(std::string_view text, const TokenizerCfg& cfg) {
  std::vector<std::string> out;
  const auto n = static_cast<std::size_t>(cfg.n);
  if (cfg.kind == TokenizerCfg::Kind::CharNgram) {
    if (text.size() < n) return out;
    out.reserve(text.size() - n + 1);
    for (std::size_t i = 0; i + n <= text.size(); ++i) out.emplace_back(text.substr(i, n));
    return out;
  }
  const auto toks = whitespace_tokens(text);
  if (toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string gram(toks[i]);
    for (std::size_t k = 1; k < n; ++k) {
      gram.push_back(' ');
      gram += toks[i + k];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

// Vocabulary and document frequencies fitted on one corpus (the indexed
// source). Queries are projected onto it; unknown features are dropped.
class SparseModel {
 public:
  SparseModel(TokenizerCfg tokenizer, FeatureScoring scoring)
      : tokenizer_(tokenizer), scoring_(scoring) {}

  // Fits vocabulary/df on `texts` and returns their vectors.
  std::vector<SparseVector> fit_transform(const std::vector<std::string_view>& texts) {
    vocab_.clear();
    df_.clear();
    corpus_size_ = texts.size();
    std::vector<std::vector<std::pair<FeatureId, std::uint32_t>>> counts;
    counts.reserve(texts.size());
    for (auto text : texts) {
      auto c = count_features(text);
      df_.resize(vocab_.size(), 0);
      for (const auto& [f, n] : c) ++df_[f];
      counts.push_back(std::move(c));
    }
    std::vector<SparseVector> out;
    out.reserve(texts.size());
    for (const auto& c : counts) out.push_back(score(c, max_count(c)));
    return out;
  }

  SparseVector transform(std::string_view text) const {
    // TF normalizes by the most frequent feature of the whole text, known or not.
    std::unordered_map<std::string, std::uint32_t> raw;
    for (auto& g : tokenize(text, tokenizer_)) ++raw[std::move(g)];
    std::uint32_t max_all = 0;
    std::vector<std::pair<FeatureId, std::uint32_t>> known;
    for (const auto& [gram, n] : raw) {
      max_all = std::max(max_all, n);
      if (auto it = vocab_.find(gram); it != vocab_.end()) known.emplace_back(it->second, n);
    }
    std::sort(known.begin(), known.end());
    return score(known, max_all);
  }

  const TokenizerCfg& tokenizer() const { return tokenizer_; }
  FeatureScoring scoring() const { return scoring_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  std::size_t corpus_size() const { return corpus_size_; }
  std::uint32_t document_frequency(FeatureId f) const { return df_.at(f); }

  double idf(FeatureId f) const {
    return std::log(static_cast<double>(corpus_size_) / static_cast<double>(df_.at(f)));
  }

 private:
  std::vector<std::pair<FeatureId, std::uint32_t>> count_features(std::string_view text) {
    std::unordered_map<FeatureId, std::uint32_t> local;
    for (auto& g : tokenize(text, tokenizer_)) {
      const auto next = static_cast<FeatureId>(vocab_.size());
      ++local[vocab_.try_emplace(std::move(g), next).first->second];
    }
    std::vector<std::pair<FeatureId, std::uint32_t>> out(local.begin(), local.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  static std::uint32_t max_count(const std::vector<std::pair<FeatureId, std::uint32_t>>& c) {
    std::uint32_t m = 0;
    for (const auto& e : c) m = std::max(m, e.second);
    return m;
  }

  SparseVector score(const std::vector<std::pair<FeatureId, std::uint32_t>>& counts,
                     std::uint32_t max_freq) const {
    SparseVector v;
    v.entries.reserve(counts.size());
    for (const auto& [f, n] : counts) {
      double s = 1.0;
      if (scoring_ != FeatureScoring::BS) s = static_cast<double>(n) / max_freq;
      if (scoring_ == FeatureScoring::TFIDF) s *= idf(f);
      if (s > 0.0) v.entries.emplace_back(f, s);
    }
    return v;
  }

  TokenizerCfg tokenizer_;
  FeatureScoring scoring_;
  std::unordered_map<std::string, FeatureId> vocab_;
  std::vector<std::uint32_t> df_;
  std::size_t corpus_size_ = 0;
};

struct ScoredCorpus {
  SparseModel model;
  std::vector<SparseVector> vectors;
};

inline ScoredCorpus score_corpus(const std::vector<EntityProfile>& profiles,
                                 const TokenizerCfg& cfg, FeatureScoring scoring) {
  std::vector<std::string_view> texts;
  texts.reserve(profiles.size());
  for (const auto& p : profiles) texts.push_back(p.agnostic_text);
  SparseModel model(cfg, scoring);
  auto vectors = model.fit_transform(texts);
  return {std::move(model), std::move(vectors)};
}

}  // namespace progres
