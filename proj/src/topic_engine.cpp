#include "kmodel/topic_engine.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "kmodel/error.hpp"
#include "kmodel/knowledge_tree.hpp"
#include "kmodel/text.hpp"

namespace kmodel {
namespace {

bool is_joiner(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '-' ||
         c == '\'';
}

struct WordSpan {
  std::size_t begin;
  std::size_t end;
  std::string lower;
};

}  // namespace

std::string merge_multiword_terms(std::string_view text,
                                  std::span<const std::string> lexicon) {
  std::vector<std::vector<std::string>> phrases;
  for (const auto& entry : lexicon) {
    auto words = name_words(entry);
    if (words.size() >= 2) phrases.push_back(std::move(words));
  }
  if (phrases.empty()) return std::string(text);
  // Longest first so the first hit at a position is the longest match.
  std::stable_sort(phrases.begin(), phrases.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<WordSpan> words;
  for (std::size_t i = 0; i < text.size();) {
    if (!is_word_byte(text[i])) {
      ++i;
      continue;
    }
    const auto start = i;
    while (i < text.size() && is_word_byte(text[i])) ++i;
    words.push_back({start, i, to_lower_ascii(text.substr(start, i - start))});
  }

  auto joined_by_separator = [&](std::size_t w) {
    // Words w and w+1 are separated only by whitespace, hyphens or quotes.
    for (auto p = words[w].end; p < words[w + 1].begin; ++p) {
      if (!is_joiner(text[p])) return false;
    }
    return true;
  };

  std::string out;
  std::size_t copied = 0;
  for (std::size_t w = 0; w < words.size();) {
    const std::vector<std::string>* hit = nullptr;
    for (const auto& phrase : phrases) {
      if (w + phrase.size() > words.size()) continue;
      bool ok = true;
      for (std::size_t j = 0; j < phrase.size() && ok; ++j) {
        ok = words[w + j].lower == phrase[j] &&
             (j == 0 || joined_by_separator(w + j - 1));
      }
      if (ok) {
        hit = &phrase;
        break;
      }
    }
    if (!hit) {
      ++w;
      continue;
    }
    out.append(text.substr(copied, words[w].begin - copied));
    for (std::size_t j = 0; j < hit->size(); ++j) {
      if (j) out += '-';
      out += (*hit)[j];
    }
    copied = words[w + hit->size() - 1].end;
    w += hit->size();
  }
  out.append(text.substr(copied));
  return out;
}

TokenizedContent tokenize(std::string_view text, const StopwordSet& stopwords) {
  TokenizedContent content;
  std::string token;
  auto flush = [&] {
    // Hyphens survive only between word characters.
    while (!token.empty() && token.back() == '-') token.pop_back();
    std::size_t lead = 0;
    while (lead < token.size() && token[lead] == '-') ++lead;
    token.erase(0, lead);
    if (!token.empty() && !stopwords.contains(token)) {
      content.tokens.push_back(token);
    }
    token.clear();
  };
  for (char c : text) {
    if (is_word_byte(c)) {
      token += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    } else if (c == '-') {
      if (!token.empty() && token.back() != '-') token += '-';
    } else if (c != '\'') {
      flush();
    }
  }
  flush();
  content.vocabulary = content.tokens;
  std::sort(content.vocabulary.begin(), content.vocabulary.end());
  content.vocabulary.erase(
      std::unique(content.vocabulary.begin(), content.vocabulary.end()),
      content.vocabulary.end());
  return content;
}

namespace {

/// Uniform double in [0, 1) from the top 53 bits; identical across standard
/// libraries, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TopicModelResult fit_lda(std::span<const TokenizedContent> docs,
                         const LdaOptions& options) {
  if (options.k < 1) throw ConfigError("LDA needs k >= 1");
  if (options.iterations < 1) throw ConfigError("LDA needs iterations >= 1");
  if (!(options.alpha > 0.0) || !(options.beta > 0.0)) {
    throw ConfigError("LDA priors must be positive");
  }
  if (docs.empty()) throw DomainError("LDA corpus is empty");

  std::vector<std::string> vocabulary;
  std::size_t total_tokens = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].tokens.empty()) {
      throw DomainError(fmt::format("document {} has no tokens", d));
    }
    total_tokens += docs[d].tokens.size();
    vocabulary.insert(vocabulary.end(), docs[d].tokens.begin(),
                      docs[d].tokens.end());
  }
  if (static_cast<std::size_t>(options.k) > total_tokens) {
    throw DomainError(fmt::format("k = {} exceeds the {} corpus tokens",
                                  options.k, total_tokens));
  }
  std::sort(vocabulary.begin(), vocabulary.end());
  vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()),
                   vocabulary.end());
  std::unordered_map<std::string_view, int> term_id;
  for (std::size_t v = 0; v < vocabulary.size(); ++v) {
    term_id.emplace(vocabulary[v], static_cast<int>(v));
  }

  const auto k = static_cast<std::size_t>(options.k);
  const auto num_terms = vocabulary.size();
  const double beta_sum = options.beta * static_cast<double>(num_terms);

  std::vector<std::vector<int>> words(docs.size());
  std::vector<std::vector<int>> assignment(docs.size());
  std::vector<std::vector<int>> doc_topic(docs.size(), std::vector<int>(k, 0));
  std::vector<std::vector<int>> topic_term(k, std::vector<int>(num_terms, 0));
  std::vector<int> topic_total(k, 0);

  std::mt19937_64 rng(options.seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d].tokens) {
      const int w = term_id.at(token);
      const auto z = std::min(
          k - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(k)));
      words[d].push_back(w);
      assignment[d].push_back(static_cast<int>(z));
      ++doc_topic[d][z];
      ++topic_term[z][w];
      ++topic_total[z];
    }
  }

  std::vector<double> cumulative(k);
  for (int iter = 0; iter < options.iterations; ++iter) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const int w = words[d][i];
        const auto old = static_cast<std::size_t>(assignment[d][i]);
        --doc_topic[d][old];
        --topic_term[old][w];
        --topic_total[old];

        double total = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          total += (doc_topic[d][t] + options.alpha) *
                   (topic_term[t][w] + options.beta) /
                   (topic_total[t] + beta_sum);
          cumulative[t] = total;
        }
        const double u = uniform01(rng) * total;
        std::size_t z = 0;
        while (z + 1 < k && cumulative[z] <= u) ++z;

        assignment[d][i] = static_cast<int>(z);
        ++doc_topic[d][z];
        ++topic_term[z][w];
        ++topic_total[z];
      }
    }
  }

  TopicModelResult result;
  result.k = options.k;
  result.vocabulary = std::move(vocabulary);
  result.seed = options.seed;
  result.alpha = options.alpha;
  result.beta = options.beta;
  result.iterations = options.iterations;
  result.topics.assign(k, std::vector<double>(num_terms));
  for (std::size_t t = 0; t < k; ++t) {
    const double denom = topic_total[t] + beta_sum;
    for (std::size_t v = 0; v < num_terms; ++v) {
      result.topics[t][v] = (topic_term[t][v] + options.beta) / denom;
    }
  }
  const double alpha_sum = options.alpha * static_cast<double>(k);
  result.coverage.assign(docs.size(), std::vector<double>(k));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const double denom = static_cast<double>(words[d].size()) + alpha_sum;
    for (std::size_t t = 0; t < k; ++t) {
      result.coverage[d][t] = (doc_topic[d][t] + options.alpha) / denom;
    }
  }
  return result;
}

namespace {

/// Indices of the top-m positive entries of one topic row, by probability
/// descending then term ascending.
std::vector<std::size_t> top_terms(const TopicModelResult& result, int topic,
                                   int m) {
  const auto& row = result.topics[topic];
  std::vector<std::size_t> order;
  for (std::size_t v = 0; v < row.size(); ++v) {
    if (row[v] > 0.0) order.push_back(v);
  }
  const auto take = std::min(order.size(), static_cast<std::size_t>(m));
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return result.vocabulary[a] < result.vocabulary[b];
                    });
  order.resize(take);
  return order;
}

}  // namespace

double ShareAllocation::knowledge_mass() const {
  double total = 0.0;
  for (const auto& [_, s] : shares) total += s;
  return total;
}

double ShareAllocation::non_knowledge_mass() const {
  double total = 0.0;
  for (const auto& [_, s] : non_knowledge) total += s;
  return total;
}

ShareAllocation knowledge_point_shares(
    const TopicModelResult& result, std::size_t doc_index,
    const std::function<bool(std::string_view)>& is_knowledge_point, int m) {
  if (m < 1) throw ConfigError("top-m cutoff must be >= 1");
  if (doc_index >= result.coverage.size()) {
    throw NotFoundError(fmt::format("document index {} out of range (have {})",
                                    doc_index, result.coverage.size()));
  }
  const auto& coverage = result.coverage[doc_index];

  ShareAllocation allocation;
  allocation.m = m;
  double normalizer = 0.0;
  for (int j = 0; j < result.k; ++j) {
    const auto top = top_terms(result, j, m);
    if (top.size() < static_cast<std::size_t>(m)) {
      allocation.short_topics.push_back(j);
    }
    for (auto v : top) {
      TermShare slot;
      slot.topic = j;
      slot.term = result.vocabulary[v];
      slot.probability = result.topics[j][v];
      slot.share = coverage[j] * slot.probability;
      slot.knowledge_point = is_knowledge_point(slot.term);
      normalizer += slot.share;
      allocation.slots.push_back(std::move(slot));
    }
  }
  if (!(normalizer > 0.0)) {
    throw DomainError("top-m terms carry no probability mass");
  }
  for (auto& slot : allocation.slots) {
    slot.share /= normalizer;
    auto& bucket =
        slot.knowledge_point ? allocation.shares : allocation.non_knowledge;
    bucket[slot.term] += slot.share;
  }
  return allocation;
}

ShareAllocation knowledge_point_shares(const TopicModelResult& result,
                                       std::size_t doc_index,
                                       const KnowledgeTree& tree, int m) {
  return knowledge_point_shares(
      result, doc_index,
      [&tree](std::string_view term) { return tree.is_leaf(term); }, m);
}

std::string topic_report(const TopicModelResult& result, int top_terms_count) {
  std::string out;
  for (int j = 0; j < result.k; ++j) {
    out += fmt::format("topic {}\n", j);
    for (auto v : top_terms(result, j, top_terms_count)) {
      out += fmt::format("  {}\t{:.6f}\n", result.vocabulary[v],
                         result.topics[j][v]);
    }
  }
  for (std::size_t d = 0; d < result.coverage.size(); ++d) {
    out += fmt::format("coverage {}", d);
    for (double p : result.coverage[d]) out += fmt::format("\t{:.6f}", p);
    out += '\n';
  }
  out += fmt::format("seed {}\n", result.seed);
  return out;
}

}  // namespace kmodel
