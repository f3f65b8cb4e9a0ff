#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kmodel {

class KnowledgeTree;

using StopwordSet = std::set<std::string, std::less<>>;

struct TokenizedContent {
  std::vector<std::string> tokens;
  /// Distinct tokens, sorted.
  std::vector<std::string> vocabulary;
};

/// Replaces every case-insensitive occurrence of a lexicon phrase with its
/// hyphen-joined lowercase form ("Inverse document frequency" ->
/// "inverse-document-frequency"). Words of a match may be separated by
/// whitespace, hyphens or apostrophes. The longest phrase wins where entries
/// overlap; all other text is copied through unchanged.
std::string merge_multiword_terms(std::string_view text,
                                  std::span<const std::string> lexicon);

/// Lowercased unigrams with punctuation stripped and stopwords removed.
/// Internal hyphens are kept, so merged multi-word terms stay whole.
TokenizedContent tokenize(std::string_view text,
                          const StopwordSet& stopwords = {});

struct LdaOptions {
  int k = 2;
  /// Document-topic Dirichlet prior.
  double alpha = 0.1;
  /// Topic-word Dirichlet prior.
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 42;
};

struct TopicModelResult {
  int k = 0;
  /// Sorted corpus vocabulary; column order of `topics`.
  std::vector<std::string> vocabulary;
  /// k rows of p(term | topic).
  std::vector<std::vector<double>> topics;
  /// One row of topic proportions per document.
  std::vector<std::vector<double>> coverage;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;

  friend bool operator==(const TopicModelResult&,
                         const TopicModelResult&) = default;
};

/// LDA by collapsed Gibbs sampling, single-threaded and deterministic for a
/// given seed. Estimates from the final sweep's counts:
///   topics[j][v]   = (n_jv + beta)  / (n_j + |V| beta)
///   coverage[i][j] = (n_ij + alpha) / (n_i + k alpha)
TopicModelResult fit_lda(std::span<const TokenizedContent> docs,
                         const LdaOptions& options = {});

/// One top-m slot of one topic.
struct TermShare {
  int topic = 0;
  std::string term;
  double probability = 0.0;
  double share = 0.0;
  bool knowledge_point = false;
};

struct ShareAllocation {
  /// Knowledge point -> summed share over all its top-m slots.
  std::map<std::string, double> shares;
  /// Top-m terms that are not knowledge points.
  std::map<std::string, double> non_knowledge;
  std::vector<TermShare> slots;
  int m = 0;
  /// Topics with fewer than m positive-probability terms.
  std::vector<int> short_topics;

  double knowledge_mass() const;
  double non_knowledge_mass() const;
};

/// Splits a document's content among the top-m terms of every topic:
///   share(term i of topic j) = pi_j p(t_i|theta_j) / sum_j sum_i pi_j p(t_i|theta_j)
/// and credits each slot to its term. Top-m ties break by term order.
ShareAllocation knowledge_point_shares(
    const TopicModelResult& result, std::size_t doc_index,
    const std::function<bool(std::string_view)>& is_knowledge_point, int m);

ShareAllocation knowledge_point_shares(const TopicModelResult& result,
                                       std::size_t doc_index,
                                       const KnowledgeTree& tree, int m);

/// Human-readable topic summary: per topic the top terms with probabilities,
/// then each document's coverage, then the seed.
std::string topic_report(const TopicModelResult& result, int top_terms = 10);

}  // namespace kmodel
