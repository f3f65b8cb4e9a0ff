#include "kmodel/activity_log.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "kmodel/error.hpp"

namespace kmodel {
namespace {

TimePoint at(const char* text) { return parse_time(text); }

ActivityEvent ev(const char* ts, EventKind kind,
                 std::optional<std::string> doc = std::nullopt,
                 std::optional<int> page = std::nullopt) {
  return {at(ts), kind, std::move(doc), page};
}

LearningSession session(const std::string& doc, const char* start,
                        const char* stop, std::vector<PageView> views = {}) {
  LearningSession s;
  s.doc_id = doc;
  s.start_time = at(start);
  s.stop_time = at(stop);
  s.page_views = views.empty()
                     ? std::vector<PageView>{{1, s.duration_seconds(), ""}}
                     : std::move(views);
  return s;
}

// ---------------------------------------------------------------------------
// parse_event_log

TEST(ParseEventLog, EmptyStreamYieldsNoEvents) {
  EXPECT_TRUE(parse_event_log(std::string_view{}).empty());
  EXPECT_TRUE(parse_event_log("# only a comment\n\n").empty());
}

TEST(ParseEventLog, SingleDocOpen) {
  const auto events = parse_event_log("2016-03-13 09:30:00\tDocOpen\td1\n");
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, EventKind::DocOpen);
  EXPECT_EQ(events[0].doc_id, "d1");
  EXPECT_EQ(events[0].timestamp, at("2016-03-13 09:30:00"));
  EXPECT_FALSE(events[0].page.has_value());
}

TEST(ParseEventLog, ThreeActivityFixtureHasSixEvents) {
  std::ifstream in(KMODEL_DATA_DIR "/fixtures/three_activities_events.tsv");
  ASSERT_TRUE(in);
  const auto events = parse_event_log(in);
  EXPECT_EQ(events.size(), 6u);
}

TEST(ParseEventLog, MalformedLineNamesLineNumber) {
  const std::string log =
      "2016-03-13T09:30:00\tDocOpen\td1\n"
      "\n"
      "2016-03-13T09:31:00\tBogusKind\td1\n";
  try {
    parse_event_log(log);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParseEventLog, RejectsMissingRequiredFields) {
  EXPECT_THROW(parse_event_log("2016-03-13T09:30:00\tDocOpen\n"), ParseError);
  EXPECT_THROW(parse_event_log("2016-03-13T09:30:00\tPageSwitch\td1\n"),
               ParseError);
  EXPECT_THROW(parse_event_log("2016-03-13T09:30:00\tPageSwitch\td1\t0\n"),
               ParseError);
  EXPECT_THROW(parse_event_log("2016-13-13T09:30:00\tDocOpen\td1\n"),
               ParseError);
  EXPECT_THROW(parse_event_log("2016-03-13T09:30:00\tIdleTimeout\t\t3\n"),
               ParseError);
}

TEST(ParseEventLog, DecreasingTimestampIsOrderingError) {
  const std::string log =
      "2016-03-13T09:30:00\tDocOpen\td1\n"
      "2016-03-13T09:29:59\tDocClose\td1\n";
  EXPECT_THROW(parse_event_log(log), OrderingError);
}

TEST(ParseEventLog, FormatRoundTrips) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:30:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 09:31:00", EventKind::PageSwitch, std::nullopt, 4),
      ev("2016-03-13 09:32:00", EventKind::PageSwitch, "d1", 5),
      ev("2016-03-13 09:33:00", EventKind::FocusToOtherApp),
  };
  std::string text;
  for (const auto& e : events) text += format_event(e) + "\n";
  EXPECT_EQ(parse_event_log(text), events);
}

// ---------------------------------------------------------------------------
// discriminate_sessions

TEST(DiscriminateSessions, OpenCloseGivesOneSession) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:30:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 10:30:10", EventKind::DocClose, "d1"),
  };
  const auto sessions = discriminate_sessions(events);
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].duration_seconds(), 3610);
  EXPECT_EQ(sessions[0].session_id, 1);
  EXPECT_FALSE(sessions[0].truncated);
  ASSERT_EQ(sessions[0].page_views.size(), 1u);
  EXPECT_EQ(sessions[0].page_views[0].page, 1);
  EXPECT_EQ(sessions[0].page_views[0].dwell_seconds, 3610);
}

TEST(DiscriminateSessions, IdleTimeoutAndReturnSplitSession) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 09:03:20", EventKind::IdleTimeout),
      ev("2016-03-13 09:18:20", EventKind::InputAfterIdle),
      ev("2016-03-13 09:20:00", EventKind::DocClose, "d1"),
  };
  const auto sessions = discriminate_sessions(events);
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].duration_seconds(), 200);
  EXPECT_EQ(sessions[1].duration_seconds(), 100);
  EXPECT_EQ(sessions[1].doc_id, "d1");
}

TEST(DiscriminateSessions, FocusAwayWithoutDocumentIsIgnored) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::FocusToOtherApp),
  };
  Diagnostics diag;
  EXPECT_TRUE(discriminate_sessions(events, {}, &diag).empty());
  EXPECT_EQ(diag.warnings.size(), 1u);
}

TEST(DiscriminateSessions, PageSwitchesAccrueDwellToPreviousPage) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 09:01:00", EventKind::PageSwitch, "d1", 2),
      ev("2016-03-13 09:01:20", EventKind::PageSwitch, std::nullopt, 3),
      ev("2016-03-13 09:05:00", EventKind::PageSwitch, std::nullopt, 3),
      ev("2016-03-13 09:06:00", EventKind::FocusToOtherApp),
      ev("2016-03-13 09:10:00", EventKind::FocusToDoc, "d1"),
      ev("2016-03-13 09:12:00", EventKind::DocClose, "d1"),
  };
  const auto sessions = discriminate_sessions(events);
  ASSERT_EQ(sessions.size(), 2u);
  const std::vector<PageView> first{{1, 60, ""}, {2, 20, ""}, {3, 280, ""}};
  EXPECT_EQ(sessions[0].page_views, first);
  // Focus returns to the page the reader left.
  const std::vector<PageView> second{{3, 120, ""}};
  EXPECT_EQ(sessions[1].page_views, second);
  for (const auto& s : sessions) {
    EXPECT_EQ(s.total_dwell_seconds(), s.duration_seconds());
  }
}

TEST(DiscriminateSessions, SwitchingDocumentsClosesPreviousSession) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 09:10:00", EventKind::DocOpen, "d2"),
      ev("2016-03-13 09:15:00", EventKind::FocusToDoc, "d1"),
      ev("2016-03-13 09:20:00", EventKind::DocClose, "d2"),
      ev("2016-03-13 09:30:00", EventKind::DocClose, "d1"),
  };
  const auto sessions = discriminate_sessions(events);
  ASSERT_EQ(sessions.size(), 3u);
  EXPECT_EQ(sessions[0].doc_id, "d1");
  EXPECT_EQ(sessions[0].duration_seconds(), 600);
  EXPECT_EQ(sessions[1].doc_id, "d2");
  EXPECT_EQ(sessions[1].duration_seconds(), 300);
  EXPECT_EQ(sessions[2].doc_id, "d1");
  EXPECT_EQ(sessions[2].duration_seconds(), 900);
}

TEST(DiscriminateSessions, UnflaggedIdleGapEndsSessionAtThreshold) {
  SessionOptions options;
  options.idle_threshold_s = 300;
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 09:02:00", EventKind::PageSwitch, "d1", 2),
      ev("2016-03-13 09:30:00", EventKind::InputAfterIdle),
      ev("2016-03-13 09:40:00", EventKind::DocClose, "d1"),
  };
  const auto sessions = discriminate_sessions(events, options);
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].stop_time, at("2016-03-13 09:07:00"));
  EXPECT_EQ(sessions[1].start_time, at("2016-03-13 09:30:00"));
  EXPECT_EQ(sessions[1].page_views.front().page, 2);
}

TEST(DiscriminateSessions, TruncatedTailIsFlaggedAndOptional) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::DocOpen, "d1"),
      ev("2016-03-13 09:05:00", EventKind::PageSwitch, "d1", 2),
  };
  Diagnostics diag;
  auto sessions = discriminate_sessions(events, {}, &diag);
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_TRUE(sessions[0].truncated);
  EXPECT_EQ(sessions[0].duration_seconds(), 300);
  EXPECT_FALSE(diag.warnings.empty());

  SessionOptions exclude;
  exclude.include_truncated = false;
  EXPECT_TRUE(discriminate_sessions(events, exclude).empty());
}

TEST(DiscriminateSessions, StopWithoutOpenSessionWarns) {
  const std::vector<ActivityEvent> events{
      ev("2016-03-13 09:00:00", EventKind::IdleTimeout),
      ev("2016-03-13 09:01:00", EventKind::DocClose, "d9"),
  };
  Diagnostics diag;
  EXPECT_TRUE(discriminate_sessions(events, {}, &diag).empty());
  EXPECT_EQ(diag.warnings.size(), 2u);
}

TEST(DiscriminateSessions, RejectsNonPositiveIdleThreshold) {
  SessionOptions options;
  options.idle_threshold_s = 0;
  EXPECT_THROW(discriminate_sessions({}, options), ConfigError);
}

// Random well-formed logs: every session satisfies stop >= start, dwell sums
// to duration, ids are 1..n, and sessions never overlap.
TEST(DiscriminateSessions, RandomLogsKeepSessionInvariants) {
  std::mt19937 rng(7);
  const std::vector<EventKind> kinds{
      EventKind::DocOpen,        EventKind::DocClose,    EventKind::FocusToDoc,
      EventKind::FocusToOtherApp, EventKind::InputAfterIdle,
      EventKind::IdleTimeout,    EventKind::PageSwitch};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ActivityEvent> events;
    TimePoint t = at("2016-03-01 08:00:00");
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      t += std::chrono::seconds(rng() % 900);
      const auto kind = kinds[rng() % kinds.size()];
      ActivityEvent e{t, kind, std::nullopt, std::nullopt};
      const std::string doc = "d" + std::to_string(rng() % 3);
      if (kind == EventKind::DocOpen || kind == EventKind::DocClose ||
          kind == EventKind::FocusToDoc) {
        e.doc_id = doc;
      }
      if (kind == EventKind::PageSwitch) e.page = 1 + static_cast<int>(rng() % 6);
      events.push_back(e);
    }
    const auto sessions = discriminate_sessions(events);
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const auto& s = sessions[i];
      EXPECT_EQ(s.session_id, static_cast<int>(i) + 1);
      EXPECT_GE(s.stop_time, s.start_time);
      EXPECT_EQ(s.total_dwell_seconds(), s.duration_seconds());
      if (i) EXPECT_GE(s.start_time, sessions[i - 1].stop_time);
      EXPECT_TRUE(!s.truncated || i + 1 == sessions.size());
    }
  }
}

// ---------------------------------------------------------------------------
// merge_sessions

TEST(MergeSessions, SameDocumentWithinGapMerges) {
  const std::vector<LearningSession> in{
      session("d1", "2016-03-13 09:40:00", "2016-03-13 10:00:00"),
      session("d1", "2016-03-13 10:20:00", "2016-03-13 10:30:00"),
  };
  const auto out = merge_sessions(in, 1800);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].start_time, at("2016-03-13 09:40:00"));
  EXPECT_EQ(out[0].stop_time, at("2016-03-13 10:30:00"));
  EXPECT_EQ(out[0].page_views.size(), 2u);
  EXPECT_LE(out[0].total_dwell_seconds(), out[0].duration_seconds());
}

TEST(MergeSessions, GapAtOrAboveThresholdDoesNotMerge) {
  const std::vector<LearningSession> in{
      session("d1", "2016-03-13 09:40:00", "2016-03-13 10:00:00"),
      session("d1", "2016-03-13 10:31:00", "2016-03-13 10:40:00"),
  };
  EXPECT_EQ(merge_sessions(in, 1800).size(), 2u);
  const std::vector<LearningSession> exact{
      session("d1", "2016-03-13 09:40:00", "2016-03-13 10:00:00"),
      session("d1", "2016-03-13 10:30:00", "2016-03-13 10:40:00"),
  };
  EXPECT_EQ(merge_sessions(exact, 1800).size(), 2u);
}

TEST(MergeSessions, DifferentDocumentsNeverMerge) {
  const std::vector<LearningSession> in{
      session("d1", "2016-03-13 09:40:00", "2016-03-13 10:00:00"),
      session("d2", "2016-03-13 10:01:00", "2016-03-13 10:10:00"),
  };
  EXPECT_EQ(merge_sessions(in, 1800).size(), 2u);
}

TEST(MergeSessions, ChainsTransitivelyAndConcatenatesText) {
  auto a = session("d1", "2016-03-13 09:00:00", "2016-03-13 09:10:00",
                   {{1, 600, "alpha"}});
  auto b = session("d1", "2016-03-13 09:20:00", "2016-03-13 09:30:00",
                   {{2, 600, "beta"}});
  auto c = session("d1", "2016-03-13 09:40:00", "2016-03-13 09:50:00",
                   {{1, 600, "alpha"}});
  const std::vector<LearningSession> in{a, b, c};
  const auto out = merge_sessions(in, 1800);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].duration_seconds(), 3000);
  EXPECT_EQ(out[0].text, "alpha\nbeta");
}

TEST(MergeSessions, IdempotentAndDurationBounded) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LearningSession> in;
    TimePoint t = at("2016-03-01 08:00:00");
    const int n = static_cast<int>(rng() % 12);
    std::int64_t max_single = 0;
    for (int i = 0; i < n; ++i) {
      t += std::chrono::seconds(rng() % 3000);
      LearningSession s;
      s.doc_id = "d" + std::to_string(rng() % 2);
      s.start_time = t;
      t += std::chrono::seconds(rng() % 2000);
      s.stop_time = t;
      s.page_views = {{1, s.duration_seconds(), ""}};
      max_single = std::max(max_single, s.duration_seconds());
      in.push_back(s);
    }
    const auto once = merge_sessions(in, 1800);
    EXPECT_EQ(merge_sessions(once, 1800), once);
    std::int64_t in_dwell = 0, out_dwell = 0;
    for (const auto& s : in) in_dwell += s.total_dwell_seconds();
    for (const auto& s : once) {
      out_dwell += s.total_dwell_seconds();
      EXPECT_LE(s.total_dwell_seconds(), s.duration_seconds());
    }
    EXPECT_EQ(in_dwell, out_dwell);
    for (const auto& s : once) {
      if (n) EXPECT_GE(s.duration_seconds(), 0);
    }
    if (!once.empty()) {
      std::int64_t longest = 0;
      for (const auto& s : once) longest = std::max(longest, s.duration_seconds());
      EXPECT_GE(longest, max_single);
    }
  }
}

// ---------------------------------------------------------------------------
// filter_sessions

TEST(FilterSessions, ShortSessionRemoved) {
  const std::vector<LearningSession> in{
      session("d1", "2016-03-13 09:00:00", "2016-03-13 09:02:29"),
      session("d1", "2016-03-13 10:00:00", "2016-03-13 10:02:30"),
  };
  const auto out = filter_sessions(in, 30, 150);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].duration_seconds(), 150);
}

TEST(FilterSessions, ShortPageDroppedWithItsText) {
  const std::vector<LearningSession> in{session(
      "d1", "2016-03-13 09:00:00", "2016-03-13 09:05:00",
      {{1, 29, "glanced"}, {2, 271, "read"}})};
  const auto out = filter_sessions(in, 30, 150);
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(out[0].page_views.size(), 1u);
  EXPECT_EQ(out[0].page_views[0].page, 2);
  EXPECT_EQ(out[0].text, "read");
  EXPECT_EQ(out[0].duration_seconds(), 300);
}

TEST(FilterSessions, PageDwellIsSummedAcrossVisits) {
  const std::vector<LearningSession> in{session(
      "d1", "2016-03-13 09:00:00", "2016-03-13 09:05:00",
      {{1, 20, "one"}, {2, 260, "two"}, {1, 20, "one"}})};
  const auto out = filter_sessions(in, 30, 150);
  EXPECT_EQ(out[0].page_views.size(), 3u);
}

TEST(FilterSessions, ZeroThresholdsAreIdentity) {
  const std::vector<LearningSession> in{
      session("d1", "2016-03-13 09:00:00", "2016-03-13 09:00:10",
              {{1, 5, "a"}, {2, 5, "b"}}),
      session("d2", "2016-03-13 10:00:00", "2016-03-13 10:00:00",
              {{1, 0, ""}}),
  };
  EXPECT_EQ(filter_sessions(in, 0, 0), in);
}

TEST(FilterSessions, RaisingThresholdsNeverAddsSessions) {
  std::mt19937 rng(3);
  std::vector<LearningSession> in;
  TimePoint t = at("2016-03-01 08:00:00");
  for (int i = 0; i < 50; ++i) {
    LearningSession s;
    s.doc_id = "d";
    s.start_time = t;
    t += std::chrono::seconds(rng() % 600);
    s.stop_time = t;
    s.page_views = {{1, s.duration_seconds(), "x"}};
    in.push_back(s);
  }
  std::size_t previous = in.size();
  for (std::int64_t threshold = 0; threshold <= 600; threshold += 25) {
    const auto n = filter_sessions(in, threshold, threshold).size();
    EXPECT_LE(n, previous);
    previous = n;
  }
  EXPECT_THROW(filter_sessions(in, -1, 0), ConfigError);
}

}  // namespace
}  // namespace kmodel
