#include "kmodel/analytics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "kmodel/error.hpp"
#include "kmodel/knowledge_tree.hpp"

namespace kmodel {

std::string_view to_string(PoolType type) {
  switch (type) {
    case PoolType::TF: return "tf";
    case PoolType::IDF: return "idf";
    case PoolType::PersonFamiliarity: return "person";
    case PoolType::GroupFamiliarity: return "group";
  }
  return "?";
}

ConceptsPool pool_tf(std::span<const TokenizedContent> corpus,
                     std::int64_t min_tf) {
  if (min_tf < 1) throw ConfigError("min_tf must be >= 1");
  std::map<std::string, std::int64_t> tf;
  for (const auto& doc : corpus) {
    for (const auto& token : doc.tokens) ++tf[token];
  }
  ConceptsPool pool{PoolType::TF, {}, fmt::format("tf > {}", min_tf)};
  for (const auto& [term, count] : tf) {
    if (count > min_tf) pool.members.insert(term);
  }
  return pool;
}

ConceptsPool pool_idf(std::span<const TokenizedContent> corpus, double max_idf) {
  if (corpus.empty()) throw DomainError("IDF pool needs a non-empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (auto term : seen) ++df[std::string(term)];
  }
  const double n = static_cast<double>(corpus.size());
  ConceptsPool pool{PoolType::IDF, {}, fmt::format("idf <= {}", max_idf)};
  for (const auto& [term, count] : df) {
    if (std::log10(n / static_cast<double>(count)) <= max_idf) {
      pool.members.insert(term);
    }
  }
  return pool;
}

ConceptsPool pool_person(const ScoreMap& scores, double min_f) {
  ConceptsPool pool{PoolType::PersonFamiliarity, {},
                    fmt::format("familiarity > {}", min_f)};
  for (const auto& [point, f] : scores) {
    if (f > min_f) pool.members.insert(point);
  }
  return pool;
}

ConceptsPool pool_group(std::span<const ScoreMap> group, double min_f,
                        double quorum_fraction) {
  if (group.empty()) throw DomainError("group pool needs at least one person");
  if (!(quorum_fraction > 0.0 && quorum_fraction <= 1.0)) {
    throw ConfigError("quorum fraction must be in (0, 1]");
  }
  std::map<std::string, std::size_t> known_by;
  for (const auto& scores : group) {
    for (const auto& [point, f] : scores) {
      if (f > min_f) ++known_by[point];
    }
  }
  const double size = static_cast<double>(group.size());
  ConceptsPool pool{
      PoolType::GroupFamiliarity, {},
      fmt::format("familiarity > {} for >= {} of {} people", min_f,
                  quorum_fraction, group.size())};
  for (const auto& [point, count] : known_by) {
    if (static_cast<double>(count) >= quorum_fraction * size) {
      pool.members.insert(point);
    }
  }
  return pool;
}

namespace {

void sort_ranked(std::vector<RankedPoint>& ranked) {
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedPoint& a, const RankedPoint& b) {
              if (a.value != b.value) return a.value > b.value;
              return a.point < b.point;
            });
}

std::vector<RankedPoint> common_over(const ScoreMap& a, const ScoreMap& b,
                                     const std::set<std::string>* allowed,
                                     double min_f, CommonTopicKey key) {
  std::vector<RankedPoint> out;
  for (const auto& [point, fa] : a) {
    if (allowed && !allowed->contains(point)) continue;
    const auto it = b.find(point);
    if (it == b.end()) continue;
    const double fb = it->second;
    if (fa > min_f && fb > min_f) {
      out.push_back(
          {point, key == CommonTopicKey::Min ? std::min(fa, fb) : fa * fb});
    }
  }
  sort_ranked(out);
  return out;
}

}  // namespace

std::vector<RankedPoint> common_topics(const ScoreMap& a, const ScoreMap& b,
                                       double min_f, CommonTopicKey key) {
  return common_over(a, b, nullptr, min_f, key);
}

std::vector<RankedPoint> common_topics(const ScoreMap& a, const ScoreMap& b,
                                       const KnowledgeTree& tree,
                                       std::string_view branch, double min_f,
                                       CommonTopicKey key) {
  const auto points = tree.subtree_points(branch);
  const std::set<std::string> allowed(points.begin(), points.end());
  return common_over(a, b, &allowed, min_f, key);
}

double lecture_comprehension(const ScoreMap& scores,
                             std::span<const std::string> poster_points,
                             const std::optional<LogisticParams>& weights) {
  if (poster_points.empty()) throw DomainError("lecture lists no points");
  auto score_of = [&](const std::string& point) {
    const auto it = scores.find(point);
    return it == scores.end() ? 0.0 : it->second;
  };
  if (weights) {
    const auto& names = weights->points.empty()
                            ? std::vector<std::string>(poster_points.begin(),
                                                       poster_points.end())
                            : weights->points;
    std::vector<double> f;
    f.reserve(names.size());
    for (const auto& name : names) f.push_back(score_of(name));
    return understanding_probability(understanding_logit(f, *weights));
  }
  double sum = 0.0;
  for (const auto& [_, v] : scores) sum += v;
  if (!(sum > 0.0)) return 0.0;
  const auto relative = relative_familiarity(scores);
  double total = 0.0;
  for (const auto& point : poster_points) {
    const auto it = relative.find(point);
    if (it != relative.end()) total += it->second;
  }
  return total / static_cast<double>(poster_points.size());
}

ConcentrationReport research_concentrations(const HistoryStore& store,
                                            const std::string& person,
                                            TimePoint window_start,
                                            TimePoint window_end, TimePoint at,
                                            std::size_t top_n,
                                            const RetentionParams& params) {
  if (window_end < window_start) {
    throw DomainError("concentration window ends before it starts");
  }
  if (at < window_end) {
    throw DomainError("concentrations evaluated before the window ends");
  }
  ConcentrationReport report{person, window_start, window_end, at, {}};
  const EbbinghausCurve curve(params);
  for (const auto& [point, history] : store.histories(person)) {
    const auto window = history_window(history, window_start, window_end);
    if (window.empty()) continue;
    report.ranked.push_back({point, familiarity(window, at, curve).value});
  }
  sort_ranked(report.ranked);
  if (report.ranked.size() > top_n) report.ranked.resize(top_n);
  return report;
}

double cosine_similarity(const ScoreMap& a, const ScoreMap& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [point, va] : a) {
    na += va * va;
    if (const auto it = b.find(point); it != b.end()) dot += va * it->second;
  }
  for (const auto& [_, vb] : b) nb += vb * vb;
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

RefereeMatch match_referees(
    const ScoreMap& paper_shares,
    const std::map<std::string, ConcentrationReport>& candidates) {
  if (paper_shares.empty()) throw DomainError("paper has no knowledge shares");
  RefereeMatch match{paper_shares, {}};
  for (const auto& [referee, report] : candidates) {
    ScoreMap vec;
    for (const auto& r : report.ranked) vec[r.point] += r.value;
    match.ranked_referees.emplace_back(referee,
                                       cosine_similarity(paper_shares, vec));
  }
  std::sort(match.ranked_referees.begin(), match.ranked_referees.end(),
            [](const auto& x, const auto& y) {
              if (x.second != y.second) return x.second > y.second;
              return x.first < y.first;
            });
  return match;
}

Expertise discipline_expertise(const ScoreMap& scores, const KnowledgeTree& tree,
                               std::string_view branch, double min_f) {
  const auto points = tree.subtree_points(branch);
  Expertise out;
  out.points = points.size();
  double sum = 0.0;
  for (const auto& point : points) {
    const auto it = scores.find(point);
    const double f = it == scores.end() ? 0.0 : it->second;
    if (f > min_f) ++out.mastered;
    sum += f;
  }
  out.average = points.empty() ? 0.0 : sum / static_cast<double>(points.size());
  return out;
}

}  // namespace kmodel
