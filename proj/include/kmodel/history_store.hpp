#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kmodel/time.hpp"

namespace kmodel {

class KnowledgeTree;

struct LearningRecord {
  std::int64_t sequence_id = 0;
  TimePoint stop_time{};
  std::int64_t duration_seconds = 0;
  /// Share of the session attributed to the knowledge point, in [0, 1].
  double proportion = 0.0;

  friend bool operator==(const LearningRecord&, const LearningRecord&) = default;
};

/// Append-only list of learning records for one knowledge point. Sequence ids
/// strictly increase and stop times never decrease.
class LearningHistory {
 public:
  LearningHistory() = default;
  explicit LearningHistory(std::string knowledge_point)
      : knowledge_point_(std::move(knowledge_point)) {}

  const std::string& knowledge_point() const { return knowledge_point_; }
  std::span<const LearningRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Throws OrderingError or DomainError; the history is unchanged on failure.
  void append(const LearningRecord& record);

  std::int64_t next_sequence_id() const {
    return records_.empty() ? 1 : records_.back().sequence_id + 1;
  }
  std::int64_t cumulative_duration() const;
  std::optional<TimePoint> latest_stop() const;

  friend bool operator==(const LearningHistory&, const LearningHistory&) = default;

 private:
  std::string knowledge_point_;
  std::vector<LearningRecord> records_;
};

/// Records with t0 <= stop_time <= t1, order preserved.
LearningHistory history_window(const LearningHistory& history, TimePoint t0,
                               TimePoint t1);

/// Identity of an ingested session, used to skip re-ingestion.
struct SessionKey {
  std::string doc_id;
  TimePoint start_time{};
  TimePoint stop_time{};

  auto operator<=>(const SessionKey&) const = default;
};

using PersonHistories = std::map<std::string, LearningHistory, std::less<>>;

/// Learning histories for any number of people, keyed by person then by
/// knowledge point.
///
/// On disk (docs/history-store.md):
///
///   person <TAB> point <TAB> sequence_id <TAB> stop_time <TAB> duration_s <TAB> proportion
///   #session <TAB> person <TAB> doc_id <TAB> start_time <TAB> stop_time
///
/// Other lines starting with `#` and blank lines are ignored.
class HistoryStore {
 public:
  /// Validates the point against the tree, then appends.
  const LearningHistory& append_record(const std::string& person,
                                       const KnowledgeTree& tree,
                                       std::string_view knowledge_point,
                                       const LearningRecord& record);
  /// Appends without a tree (used when loading).
  const LearningHistory& append_record(const std::string& person,
                                       std::string_view knowledge_point,
                                       const LearningRecord& record);

  bool has_person(std::string_view person) const;
  std::vector<std::string> persons() const;
  bool empty() const { return people_.empty(); }

  /// Throws NotFoundError for an unknown person.
  const PersonHistories& histories(std::string_view person) const;
  const LearningHistory* history(std::string_view person,
                                 std::string_view knowledge_point) const;

  bool has_session(std::string_view person, const SessionKey& key) const;
  void mark_session(const std::string& person, const SessionKey& key);

  static HistoryStore read(std::istream& in);
  /// A missing file is an empty store.
  static HistoryStore load(const std::filesystem::path& path);

  friend bool operator==(const HistoryStore&, const HistoryStore&) = default;

 private:
  std::map<std::string, PersonHistories, std::less<>> people_;
  std::map<std::string, std::set<SessionKey>, std::less<>> sessions_;
};

std::string format_record_line(std::string_view person,
                               std::string_view knowledge_point,
                               const LearningRecord& record);
std::string format_session_line(std::string_view person, const SessionKey& key);

/// Rewrites `path` as its current bytes followed by `lines` (each terminated
/// by '\n') via a temporary file and rename, so readers see either the old
/// or the new file. Existing bytes are never modified.
void append_lines_atomic(const std::filesystem::path& path,
                         std::span<const std::string> lines);

/// Exclusive or shared advisory lock on `<store>.lock`, held for the
/// object's lifetime. Exclusive locks create the lock file; a shared lock
/// on a store that has never been written is a no-op.
class StoreLock {
 public:
  enum class Mode { Shared, Exclusive };
  StoreLock(const std::filesystem::path& store, Mode mode);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace kmodel
