#include "kmodel/history_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "kmodel/error.hpp"
#include "kmodel/knowledge_tree.hpp"
#include "kmodel/text.hpp"

namespace kmodel {

void LearningHistory::append(const LearningRecord& record) {
  if (record.sequence_id < 1) {
    throw OrderingError(fmt::format("sequence id {} for '{}' must be >= 1",
                                    record.sequence_id, knowledge_point_));
  }
  if (!(record.proportion >= 0.0 && record.proportion <= 1.0)) {
    throw DomainError(fmt::format("proportion {} for '{}' outside [0, 1]",
                                  record.proportion, knowledge_point_));
  }
  if (record.duration_seconds < 0) {
    throw DomainError(fmt::format("negative duration for '{}'",
                                  knowledge_point_));
  }
  if (!records_.empty()) {
    const auto& last = records_.back();
    if (record.sequence_id <= last.sequence_id) {
      throw OrderingError(fmt::format(
          "sequence id {} for '{}' does not follow {}", record.sequence_id,
          knowledge_point_, last.sequence_id));
    }
    if (record.stop_time < last.stop_time) {
      throw OrderingError(fmt::format(
          "stop time {} for '{}' is earlier than {}",
          format_time(record.stop_time), knowledge_point_,
          format_time(last.stop_time)));
    }
  }
  records_.push_back(record);
}

std::int64_t LearningHistory::cumulative_duration() const {
  std::int64_t total = 0;
  for (const auto& r : records_) total += r.duration_seconds;
  return total;
}

std::optional<TimePoint> LearningHistory::latest_stop() const {
  if (records_.empty()) return std::nullopt;
  return records_.back().stop_time;
}

LearningHistory history_window(const LearningHistory& history, TimePoint t0,
                               TimePoint t1) {
  if (t1 < t0) throw DomainError("history window ends before it starts");
  LearningHistory out(history.knowledge_point());
  for (const auto& r : history.records()) {
    if (r.stop_time >= t0 && r.stop_time <= t1) out.append(r);
  }
  return out;
}

const LearningHistory& HistoryStore::append_record(
    const std::string& person, const KnowledgeTree& tree,
    std::string_view knowledge_point, const LearningRecord& record) {
  if (!tree.is_leaf(knowledge_point)) {
    throw NotFoundError(
        fmt::format("'{}' is not a knowledge point of the tree",
                    knowledge_point));
  }
  return append_record(person, tree.at(knowledge_point).name, record);
}

const LearningHistory& HistoryStore::append_record(
    const std::string& person, std::string_view knowledge_point,
    const LearningRecord& record) {
  auto& person_histories = people_[person];
  auto it = person_histories.find(knowledge_point);
  if (it == person_histories.end()) {
    LearningHistory fresh{std::string(knowledge_point)};
    fresh.append(record);
    return person_histories.emplace(std::string(knowledge_point), std::move(fresh))
        .first->second;
  }
  it->second.append(record);
  return it->second;
}

bool HistoryStore::has_person(std::string_view person) const {
  return people_.find(person) != people_.end() ||
         sessions_.find(person) != sessions_.end();
}

std::vector<std::string> HistoryStore::persons() const {
  std::set<std::string> all;
  for (const auto& [p, _] : people_) all.insert(p);
  for (const auto& [p, _] : sessions_) all.insert(p);
  return {all.begin(), all.end()};
}

const PersonHistories& HistoryStore::histories(std::string_view person) const {
  static const PersonHistories kEmpty;
  if (const auto it = people_.find(person); it != people_.end()) {
    return it->second;
  }
  if (sessions_.find(person) != sessions_.end()) return kEmpty;
  throw NotFoundError(fmt::format("unknown person '{}'", person));
}

const LearningHistory* HistoryStore::history(
    std::string_view person, std::string_view knowledge_point) const {
  const auto p = people_.find(person);
  if (p == people_.end()) return nullptr;
  const auto h = p->second.find(knowledge_point);
  return h == p->second.end() ? nullptr : &h->second;
}

bool HistoryStore::has_session(std::string_view person,
                               const SessionKey& key) const {
  const auto it = sessions_.find(person);
  return it != sessions_.end() && it->second.contains(key);
}

void HistoryStore::mark_session(const std::string& person,
                                const SessionKey& key) {
  sessions_[person].insert(key);
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::size_t line_no,
               std::string_view field) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(fmt::format("invalid {} '{}'", field, text), line_no);
  }
  return value;
}

double parse_double(std::string_view text, std::size_t line_no) {
  const std::string owned(text);
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size() || errno != 0 ||
      !std::isfinite(value)) {
    throw ParseError(fmt::format("invalid proportion '{}'", text), line_no);
  }
  return value;
}

TimePoint parse_field_time(std::string_view text, std::size_t line_no) {
  if (auto t = try_parse_time(text)) return *t;
  throw ParseError(fmt::format("invalid timestamp '{}'", text), line_no);
}

}  // namespace

HistoryStore HistoryStore::read(std::istream& in) {
  HistoryStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields[0] == "#session") {
      if (fields.size() != 5) {
        throw ParseError("session line needs 5 fields", line_no);
      }
      store.mark_session(std::string(fields[1]),
                         SessionKey{std::string(fields[2]),
                                    parse_field_time(fields[3], line_no),
                                    parse_field_time(fields[4], line_no)});
      continue;
    }
    if (line.front() == '#') continue;
    if (fields.size() != 6) {
      throw ParseError(
          fmt::format("record line needs 6 fields, found {}", fields.size()),
          line_no);
    }
    LearningRecord record;
    record.sequence_id =
        parse_number<std::int64_t>(fields[2], line_no, "sequence id");
    record.stop_time = parse_field_time(fields[3], line_no);
    record.duration_seconds =
        parse_number<std::int64_t>(fields[4], line_no, "duration");
    record.proportion = parse_double(fields[5], line_no);
    try {
      store.append_record(std::string(fields[0]), fields[1], record);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return store;
}

HistoryStore HistoryStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) return {};
    throw StoreError("cannot read history store '" + path.string() + "'");
  }
  return read(in);
}

std::string format_record_line(std::string_view person,
                               std::string_view knowledge_point,
                               const LearningRecord& record) {
  // {} on a double is the shortest representation that round-trips.
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}", person, knowledge_point,
                     record.sequence_id, format_time_iso(record.stop_time),
                     record.duration_seconds, record.proportion);
}

std::string format_session_line(std::string_view person,
                                 const SessionKey& key) {
  return fmt::format("#session\t{}\t{}\t{}\t{}", person, key.doc_id,
                     format_time_iso(key.start_time),
                     format_time_iso(key.stop_time));
}

void append_lines_atomic(const std::filesystem::path& path,
                         std::span<const std::string> lines) {
  namespace fs = std::filesystem;
  std::string content;
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    content = buffer.str();
    if (!content.empty() && content.back() != '\n') content += '\n';
  }
  if (lines.empty()) return;
  for (const auto& line : lines) {
    content += line;
    content += '\n';
  }

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw StoreError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError("cannot replace '" + path.string() + "': " + ec.message());
  }
}

StoreLock::StoreLock(const std::filesystem::path& store, Mode mode) {
  auto lock_path = store;
  lock_path += ".lock";
  if (mode == Mode::Shared) {
    fd_ = ::open(lock_path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0 && errno == ENOENT) return;
  } else {
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
  }
  if (fd_ < 0) {
    throw StoreError(fmt::format("cannot open lock file '{}': {}",
                                 lock_path.string(), std::strerror(errno)));
  }
  if (::flock(fd_, mode == Mode::Exclusive ? LOCK_EX : LOCK_SH) != 0) {
    ::close(fd_);
    throw StoreError("cannot lock '" + lock_path.string() + "'");
  }
}

StoreLock::~StoreLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace kmodel
