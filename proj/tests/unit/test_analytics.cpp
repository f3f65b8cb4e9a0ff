#include "kmodel/analytics.hpp"

#include <gtest/gtest.h>

#include <random>

#include "kmodel/error.hpp"
#include "kmodel/knowledge_tree.hpp"

namespace kmodel {
namespace {

TokenizedContent doc(std::vector<std::string> tokens) {
  TokenizedContent c;
  c.tokens = tokens;
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  c.vocabulary = tokens;
  return c;
}

const ScoreMap kFivePoints{{"bayes-rule", 15.14},
                       {"conditional-entropy", 25.75},
                       {"posterior-distribution", 35.05},
                       {"lagrange-multiplier", 3.97},
                       {"expectation-maximization-algorithm", 122.54}};

// ---------------------------------------------------------------------------
// pools

TEST(PoolTf, StrictThreshold) {
  const std::vector<TokenizedContent> corpus{
      doc({"x", "x", "x", "y", "y", "y"}), doc({"x", "x", "z"})};
  const auto pool = pool_tf(corpus, 3);
  EXPECT_EQ(pool.members, std::set<std::string>{"x"});
  EXPECT_EQ(pool.type, PoolType::TF);
  EXPECT_FALSE(pool.criteria.empty());
  EXPECT_TRUE(pool_tf({}, 3).members.empty());
  EXPECT_THROW(pool_tf(corpus, 0), ConfigError);
}

TEST(PoolIdf, CommonTermsHaveLowIdf) {
  std::vector<TokenizedContent> corpus;
  for (int i = 0; i < 10; ++i) {
    corpus.push_back(i == 0 ? doc({"common", "rare"}) : doc({"common"}));
  }
  EXPECT_EQ(pool_idf(corpus, 0.0).members, std::set<std::string>{"common"});
  EXPECT_EQ(pool_idf(corpus, 0.999).members, std::set<std::string>{"common"});
  EXPECT_EQ(pool_idf(corpus, 1.0).members,
            (std::set<std::string>{"common", "rare"}));
  EXPECT_TRUE(pool_idf(corpus, -0.5).members.empty());
  EXPECT_THROW(pool_idf({}, 1.0), DomainError);
}

TEST(PoolPerson, Examples) {
  EXPECT_EQ(pool_person(kFivePoints, 20.0).members,
            (std::set<std::string>{"conditional-entropy",
                                   "posterior-distribution",
                                   "expectation-maximization-algorithm"}));
  EXPECT_EQ(pool_person(kFivePoints, 0.0).members.size(), 5u);
  EXPECT_TRUE(pool_person(kFivePoints, 1000.0).members.empty());
  EXPECT_TRUE(pool_person({{"a", 0.0}}, 0.0).members.empty());
}

TEST(PoolGroup, QuorumRules) {
  const std::vector<ScoreMap> group{{{"x", 10.0}, {"y", 10.0}},
                                    {{"x", 10.0}, {"z", 10.0}}};
  EXPECT_EQ(pool_group(group, 5.0, 1.0).members, std::set<std::string>{"x"});
  EXPECT_EQ(pool_group(group, 5.0, 0.5).members,
            (std::set<std::string>{"x", "y", "z"}));
  EXPECT_THROW(pool_group({}, 5.0, 0.5), DomainError);
  EXPECT_THROW(pool_group(group, 5.0, 0.0), ConfigError);
  EXPECT_THROW(pool_group(group, 5.0, 1.5), ConfigError);
}

ScoreMap random_scores(std::mt19937& rng) {
  std::uniform_real_distribution<double> val(0.0, 100.0);
  ScoreMap scores;
  for (int i = 0; i < 10; ++i) {
    if (rng() % 3 != 0) scores["p" + std::to_string(i)] = val(rng);
  }
  return scores;
}

TEST(Pools, MonotoneInThresholds) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenizedContent> corpus;
    for (int d = 0; d < 1 + static_cast<int>(rng() % 5); ++d) {
      std::vector<std::string> tokens;
      for (int i = 0; i < 20; ++i) tokens.push_back("t" + std::to_string(rng() % 8));
      corpus.push_back(doc(tokens));
    }
    for (std::int64_t tf = 1; tf < 10; ++tf) {
      const auto lo = pool_tf(corpus, tf).members;
      const auto hi = pool_tf(corpus, tf + 1).members;
      EXPECT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
    }
    for (double idf = 0.0; idf < 1.0; idf += 0.1) {
      const auto lo = pool_idf(corpus, idf).members;
      const auto hi = pool_idf(corpus, idf + 0.1).members;
      EXPECT_TRUE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
    }
    const auto scores = random_scores(rng);
    for (double f = 0.0; f < 100.0; f += 10.0) {
      const auto lo = pool_person(scores, f).members;
      const auto hi = pool_person(scores, f + 10.0).members;
      EXPECT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
    }
  }
}

TEST(PoolGroup, IntersectionAndUnionLimits) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoreMap> group;
    for (int p = 0; p < 1 + static_cast<int>(rng() % 4); ++p) {
      group.push_back(random_scores(rng));
    }
    std::set<std::string> inter = pool_person(group[0], 30.0).members;
    std::set<std::string> uni;
    for (const auto& s : group) {
      const auto m = pool_person(s, 30.0).members;
      std::set<std::string> next;
      std::set_intersection(inter.begin(), inter.end(), m.begin(), m.end(),
                            std::inserter(next, next.begin()));
      inter = next;
      uni.insert(m.begin(), m.end());
    }
    EXPECT_EQ(pool_group(group, 30.0, 1.0).members, inter);
    EXPECT_EQ(pool_group(group, 30.0, 1e-9).members, uni);
  }
}

// ---------------------------------------------------------------------------
// common topics

TEST(CommonTopics, Examples) {
  EXPECT_TRUE(common_topics({{"x", 50.0}}, {{"y", 50.0}}, 0.0).empty());
  const ScoreMap a{{"x", 50.0}, {"y", 10.0}};
  const ScoreMap b{{"x", 30.0}, {"y", 40.0}};
  EXPECT_EQ(common_topics(a, b, 20.0),
            (std::vector<RankedPoint>{{"x", 30.0}}));
  EXPECT_EQ(common_topics(a, b, 20.0, CommonTopicKey::Product),
            (std::vector<RankedPoint>{{"x", 1500.0}}));
  const auto self = common_topics(kFivePoints, kFivePoints, 20.0);
  ASSERT_EQ(self.size(), 3u);
  EXPECT_EQ(self[0].point, "expectation-maximization-algorithm");
  EXPECT_DOUBLE_EQ(self[0].value, 122.54);
}

TEST(CommonTopics, Symmetric) {
  std::mt19937 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_scores(rng);
    const auto b = random_scores(rng);
    EXPECT_EQ(common_topics(a, b, 25.0), common_topics(b, a, 25.0));
    EXPECT_EQ(common_topics(a, b, 25.0, CommonTopicKey::Product),
              common_topics(b, a, 25.0, CommonTopicKey::Product));
  }
}

TEST(CommonTopics, RestrictedToBranch) {
  const auto tree = parse_tree("root:\n  left:\n    x\n  right:\n    y\n");
  const ScoreMap a{{"x", 50.0}, {"y", 50.0}};
  EXPECT_EQ(common_topics(a, a, tree, "left", 0.0),
            (std::vector<RankedPoint>{{"x", 50.0}}));
  EXPECT_THROW(common_topics(a, a, tree, "nowhere", 0.0), NotFoundError);
}

// ---------------------------------------------------------------------------
// lecture comprehension

TEST(LectureComprehension, DefaultMode) {
  const std::vector<std::string> poster{"x", "y"};
  EXPECT_DOUBLE_EQ(lecture_comprehension({{"x", 30.0}, {"y", 10.0}}, poster),
                   1.0);
  EXPECT_EQ(lecture_comprehension({{"z", 30.0}}, poster), 0.0);
  EXPECT_EQ(lecture_comprehension({}, poster), 0.0);
  EXPECT_THROW(lecture_comprehension({{"x", 1.0}}, {}), DomainError);
}

TEST(LectureComprehension, LogisticMode) {
  const std::vector<std::string> poster{"x", "y"};
  const LogisticParams zero{0.0, {0.0, 0.0}, {}};
  EXPECT_DOUBLE_EQ(lecture_comprehension({{"x", 30.0}}, poster, zero), 0.5);
  const LogisticParams named{1.0, {0.5}, {"x"}};
  EXPECT_NEAR(lecture_comprehension({{"x", 2.0}}, poster, named), 0.8808, 1e-4);
}

// ---------------------------------------------------------------------------
// concentrations and referees

HistoryStore two_point_store() {
  HistoryStore store;
  store.append_record("ann", "a", {1, parse_time("2016-01-10"), 1000, 0.5});
  store.append_record("ann", "b", {1, parse_time("2016-01-05"), 3000, 0.5});
  store.append_record("ann", "b", {2, parse_time("2016-02-05"), 3000, 0.5});
  return store;
}

TEST(ResearchConcentrations, WindowsAndRanking) {
  const auto store = two_point_store();
  const auto at = parse_time("2016-03-01");
  auto report = research_concentrations(store, "ann", parse_time("2016-01-01"),
                                        parse_time("2016-01-31"), at, 10);
  ASSERT_EQ(report.ranked.size(), 2u);
  EXPECT_EQ(report.ranked[0].point, "b");
  EXPECT_EQ(report.person, "ann");
  report = research_concentrations(store, "ann", parse_time("2015-01-01"),
                                   parse_time("2015-12-31"), at, 10);
  EXPECT_TRUE(report.ranked.empty());
  report = research_concentrations(store, "ann", parse_time("2016-01-01"),
                                   parse_time("2016-03-01"), at, 1);
  EXPECT_EQ(report.ranked.size(), 1u);
  EXPECT_THROW(research_concentrations(store, "bob", parse_time("2016-01-01"),
                                       parse_time("2016-03-01"), at, 1),
               NotFoundError);
  EXPECT_THROW(research_concentrations(store, "ann", parse_time("2016-01-01"),
                                       parse_time("2016-04-01"), at, 1),
               DomainError);
}

TEST(ResearchConcentrations, BundledFixtureRanksEmFirst) {
  const auto store =
      HistoryStore::load(KMODEL_DATA_DIR "/fixtures/five_points_history.tsv");
  const auto at = parse_time("2016-03-29 19:24");
  const auto report = research_concentrations(
      store, "subject", parse_time("2016-02-20"), at, at, 1);
  ASSERT_EQ(report.ranked.size(), 1u);
  EXPECT_EQ(report.ranked[0].point, "expectation-maximization-algorithm");
  EXPECT_NEAR(report.ranked[0].value, 122.54, 1.2254);
}

ConcentrationReport report_of(ScoreMap scores) {
  ConcentrationReport r;
  for (const auto& [k, v] : scores) r.ranked.push_back({k, v});
  return r;
}

TEST(MatchReferees, CosineExamples) {
  const ScoreMap paper{{"x", 1.0}};
  const auto match = match_referees(
      paper, {{"A", report_of({{"x", 1.0}, {"y", 1.0}})},
              {"B", report_of({{"y", 1.0}})},
              {"C", report_of({{"x", 5.0}})}});
  ASSERT_EQ(match.ranked_referees.size(), 3u);
  EXPECT_EQ(match.ranked_referees[0].first, "C");
  EXPECT_NEAR(match.ranked_referees[0].second, 1.0, 1e-12);
  EXPECT_EQ(match.ranked_referees[1].first, "A");
  EXPECT_NEAR(match.ranked_referees[1].second, 0.7071, 1e-4);
  EXPECT_EQ(match.ranked_referees[2].first, "B");
  EXPECT_EQ(match.ranked_referees[2].second, 0.0);
  EXPECT_EQ(cosine_similarity({}, paper), 0.0);
}

TEST(MatchReferees, ScaleInvariant) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto paper = random_scores(rng);
    if (paper.empty()) continue;
    std::map<std::string, ConcentrationReport> candidates, scaled;
    for (int r = 0; r < 4; ++r) {
      const auto s = random_scores(rng);
      ScoreMap t;
      const double c = scale(rng);
      for (const auto& [k, v] : s) t[k] = v * c;
      candidates["r" + std::to_string(r)] = report_of(s);
      scaled["r" + std::to_string(r)] = report_of(t);
    }
    const auto a = match_referees(paper, candidates).ranked_referees;
    const auto b = match_referees(paper, scaled).ranked_referees;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i].second, b[i].second, 1e-12);
      if (i + 1 < a.size()) EXPECT_GE(a[i].second, a[i + 1].second);
    }
  }
}

// ---------------------------------------------------------------------------
// expertise

TEST(DisciplineExpertise, Examples) {
  const auto tree = parse_tree("root:\n  field:\n    a\n    b\n    c\n    d\n  e\n");
  auto e = discipline_expertise({{"a", 10.0}, {"b", 0.0}}, tree, "field", 5.0);
  EXPECT_EQ(e.mastered, 1u);
  EXPECT_DOUBLE_EQ(e.average, 2.5);
  EXPECT_EQ(e.points, 4u);
  e = discipline_expertise({}, tree, "field", 5.0);
  EXPECT_EQ(e.mastered, 0u);
  EXPECT_EQ(e.average, 0.0);
  e = discipline_expertise({{"a", 10.0}}, tree, "field", 1e300);
  EXPECT_EQ(e.mastered, 0u);
  EXPECT_DOUBLE_EQ(e.average, 2.5);
  EXPECT_THROW(discipline_expertise({}, tree, "nowhere", 5.0), NotFoundError);
}

}  // namespace
}  // namespace kmodel
