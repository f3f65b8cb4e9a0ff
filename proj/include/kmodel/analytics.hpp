#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kmodel/familiarity.hpp"
#include "kmodel/history_store.hpp"
#include "kmodel/time.hpp"
#include "kmodel/topic_engine.hpp"

namespace kmodel {

class KnowledgeTree;

enum class PoolType { TF, IDF, PersonFamiliarity, GroupFamiliarity };

std::string_view to_string(PoolType type);

struct ConceptsPool {
  PoolType type = PoolType::TF;
  std::set<std::string> members;
  /// Thresholds used, for reproducing the pool.
  std::string criteria;
};

/// Terms whose total corpus frequency is strictly greater than `min_tf`.
ConceptsPool pool_tf(std::span<const TokenizedContent> corpus,
                     std::int64_t min_tf);

/// Terms with log10(N / df) <= max_idf, i.e. terms shared widely across the
/// corpus.
ConceptsPool pool_idf(std::span<const TokenizedContent> corpus, double max_idf);

/// Concepts a person scores strictly above `min_f` on.
ConceptsPool pool_person(const ScoreMap& scores, double min_f);

/// Concepts on which at least `quorum_fraction` of the group score above
/// `min_f`.
ConceptsPool pool_group(std::span<const ScoreMap> group, double min_f,
                        double quorum_fraction);

struct RankedPoint {
  std::string point;
  double value = 0.0;

  friend bool operator==(const RankedPoint&, const RankedPoint&) = default;
};

enum class CommonTopicKey { Min, Product };

/// Points both people score above `min_f` on, ranked by the key (descending,
/// ties by name).
std::vector<RankedPoint> common_topics(const ScoreMap& a, const ScoreMap& b,
                                       double min_f,
                                       CommonTopicKey key = CommonTopicKey::Min);
/// Same, restricted to the leaves under `branch`.
std::vector<RankedPoint> common_topics(const ScoreMap& a, const ScoreMap& b,
                                       const KnowledgeTree& tree,
                                       std::string_view branch, double min_f,
                                       CommonTopicKey key = CommonTopicKey::Min);

/// Without weights: mean relative familiarity over the poster's points, 0 for
/// points the person has no score on. With weights: the logistic
/// understanding probability over the weights' points (or the poster points,
/// in order, when the weights name none).
double lecture_comprehension(const ScoreMap& scores,
                             std::span<const std::string> poster_points,
                             const std::optional<LogisticParams>& weights = {});

struct ConcentrationReport {
  std::string person;
  TimePoint window_start{};
  TimePoint window_end{};
  TimePoint evaluated_at{};
  /// Familiarity from in-window records only, descending, ties by name.
  std::vector<RankedPoint> ranked;
};

ConcentrationReport research_concentrations(const HistoryStore& store,
                                            const std::string& person,
                                            TimePoint window_start,
                                            TimePoint window_end, TimePoint at,
                                            std::size_t top_n,
                                            const RetentionParams& params = {});

struct RefereeMatch {
  ScoreMap paper_shares;
  /// (referee, cosine similarity in [0, 1]), descending, ties by id.
  std::vector<std::pair<std::string, double>> ranked_referees;
};

RefereeMatch match_referees(
    const ScoreMap& paper_shares,
    const std::map<std::string, ConcentrationReport>& candidates);

/// Cosine similarity of two sparse non-negative vectors; 0 if either is zero.
double cosine_similarity(const ScoreMap& a, const ScoreMap& b);

struct Expertise {
  std::size_t mastered = 0;
  double average = 0.0;
  std::size_t points = 0;
};

/// Over the leaves of `branch`: how many score above `min_f`, and their mean
/// score with unscored leaves counted as 0.
Expertise discipline_expertise(const ScoreMap& scores, const KnowledgeTree& tree,
                               std::string_view branch, double min_f);

}  // namespace kmodel
