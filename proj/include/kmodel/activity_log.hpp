#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kmodel/time.hpp"

namespace kmodel {

enum class EventKind {
  DocOpen,
  DocClose,
  FocusToDoc,
  FocusToOtherApp,
  InputAfterIdle,
  IdleTimeout,
  PageSwitch,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct ActivityEvent {
  TimePoint timestamp;
  EventKind kind;
  std::optional<std::string> doc_id;
  std::optional<int> page;

  friend bool operator==(const ActivityEvent&, const ActivityEvent&) = default;
};

/// One contiguous visit to a page inside a session.
struct PageView {
  int page = 1;
  std::int64_t dwell_seconds = 0;
  std::string text;

  friend bool operator==(const PageView&, const PageView&) = default;
};

struct LearningSession {
  int session_id = 0;
  std::string doc_id;
  TimePoint start_time{};
  TimePoint stop_time{};
  std::vector<PageView> page_views;
  std::string text;
  /// The log ended while this session was still open.
  bool truncated = false;

  std::int64_t duration_seconds() const {
    return seconds_between(start_time, stop_time);
  }
  std::int64_t total_dwell_seconds() const;

  friend bool operator==(const LearningSession&,
                         const LearningSession&) = default;
};

/// Event log: one tab-separated record per line,
///
///   timestamp <TAB> kind [<TAB> doc_id [<TAB> page]]
///
/// Blank lines and lines starting with `#` are skipped. See
/// docs/event-log.md for the full schema.
std::vector<ActivityEvent> parse_event_log(std::istream& in);
std::vector<ActivityEvent> parse_event_log(std::string_view text);
std::vector<ActivityEvent> read_event_log_file(const std::string& path);

/// Inverse of the line parser.
std::string format_event(const ActivityEvent& event);

struct SessionOptions {
  std::int64_t idle_threshold_s = 300;
  bool include_truncated = true;
};

/// Non-fatal oddities found while reconstructing sessions.
struct Diagnostics {
  std::vector<std::string> warnings;
};

/// Event-driven reconstruction of reading sessions. A session opens on
/// DocOpen, FocusToDoc, or InputAfterIdle while a document is in the
/// foreground; it closes on DocClose, FocusToOtherApp or IdleTimeout.
/// Sessions carry no text; see attach_page_text in the pipeline.
std::vector<LearningSession> discriminate_sessions(
    std::span<const ActivityEvent> events, const SessionOptions& options = {},
    Diagnostics* diagnostics = nullptr);

/// Joins consecutive sessions on the same document whose gap is strictly
/// below `merge_gap_s`. Input must be sorted by start time.
std::vector<LearningSession> merge_sessions(
    std::span<const LearningSession> sessions, std::int64_t merge_gap_s = 1800);

/// Drops pages whose total dwell in a session is below `min_page_dwell_s`,
/// then sessions shorter than `min_session_s`.
std::vector<LearningSession> filter_sessions(
    std::span<const LearningSession> sessions,
    std::int64_t min_page_dwell_s = 30, std::int64_t min_session_s = 150);

/// Text of each distinct viewed page once, in first-visit order.
std::string join_page_text(std::span<const PageView> views);

}  // namespace kmodel
