#include "kmodel/activity_log.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "kmodel/error.hpp"
#include "kmodel/text.hpp"

namespace kmodel {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::DocOpen, "DocOpen"},
    {EventKind::DocClose, "DocClose"},
    {EventKind::FocusToDoc, "FocusToDoc"},
    {EventKind::FocusToOtherApp, "FocusToOtherApp"},
    {EventKind::InputAfterIdle, "InputAfterIdle"},
    {EventKind::IdleTimeout, "IdleTimeout"},
    {EventKind::PageSwitch, "PageSwitch"},
}};

bool requires_doc(EventKind kind) {
  return kind == EventKind::DocOpen || kind == EventKind::DocClose ||
         kind == EventKind::FocusToDoc;
}

ActivityEvent parse_line(std::string_view line, std::size_t line_no) {
  const auto fields = split(line, '\t');
  if (fields.size() < 2 || fields.size() > 4) {
    throw ParseError(
        fmt::format("expected 2 to 4 tab-separated fields, found {}",
                    fields.size()),
        line_no);
  }
  ActivityEvent event{};
  const auto ts = try_parse_time(trim(fields[0]));
  if (!ts) {
    throw ParseError(fmt::format("invalid timestamp '{}'", fields[0]), line_no);
  }
  event.timestamp = *ts;
  const auto kind = parse_event_kind(trim(fields[1]));
  if (!kind) {
    throw ParseError(fmt::format("unknown event kind '{}'", fields[1]),
                     line_no);
  }
  event.kind = *kind;
  if (fields.size() >= 3 && !trim(fields[2]).empty()) {
    event.doc_id = std::string(trim(fields[2]));
  }
  if (fields.size() == 4 && !trim(fields[3]).empty()) {
    const auto text = trim(fields[3]);
    int page = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), page);
    if (ec != std::errc{} || ptr != text.data() + text.size() || page < 1) {
      throw ParseError(fmt::format("invalid page number '{}'", text), line_no);
    }
    event.page = page;
  }
  if (requires_doc(event.kind) && !event.doc_id) {
    throw ParseError(
        fmt::format("{} requires a document id", to_string(event.kind)),
        line_no);
  }
  if (event.kind == EventKind::PageSwitch && !event.page) {
    throw ParseError("PageSwitch requires a page number", line_no);
  }
  if (event.kind != EventKind::PageSwitch && event.kind != EventKind::DocOpen &&
      event.kind != EventKind::FocusToDoc && event.page) {
    throw ParseError(
        fmt::format("{} does not take a page number", to_string(event.kind)),
        line_no);
  }
  return event;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::int64_t LearningSession::total_dwell_seconds() const {
  std::int64_t total = 0;
  for (const auto& view : page_views) total += view.dwell_seconds;
  return total;
}

std::vector<ActivityEvent> parse_event_log(std::istream& in) {
  std::vector<ActivityEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto event = parse_line(line, line_no);
    if (!events.empty() && event.timestamp < events.back().timestamp) {
      throw OrderingError(fmt::format(
          "line {}: timestamp {} is earlier than the previous event ({})",
          line_no, format_time(event.timestamp),
          format_time(events.back().timestamp)));
    }
    events.push_back(std::move(event));
  }
  return events;
}

std::vector<ActivityEvent> parse_event_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_event_log(in);
}

std::vector<ActivityEvent> read_event_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open event log '" + path + "'");
  return parse_event_log(in);
}

std::string format_event(const ActivityEvent& event) {
  std::string line = format_time_iso(event.timestamp);
  line += '\t';
  line += to_string(event.kind);
  if (event.doc_id || event.page) {
    line += '\t';
    line += event.doc_id.value_or("");
  }
  if (event.page) line += fmt::format("\t{}", *event.page);
  return line;
}

namespace {

/// State machine over the event stream. One session at most is open; the
/// foreground document and per-document last page persist across sessions.
class SessionBuilder {
 public:
  SessionBuilder(const SessionOptions& options, Diagnostics* diagnostics)
      : options_(options), diagnostics_(diagnostics) {}

  void feed(const ActivityEvent& e) {
    switch (e.kind) {
      case EventKind::DocOpen:
        open_docs_.insert(*e.doc_id);
        if (e.page) last_page_[*e.doc_id] = *e.page;
        focus(*e.doc_id, e.timestamp);
        break;
      case EventKind::FocusToDoc:
        open_docs_.insert(*e.doc_id);
        if (e.page) last_page_[*e.doc_id] = *e.page;
        focus(*e.doc_id, e.timestamp);
        break;
      case EventKind::DocClose:
        if (open_ && open_->doc_id == *e.doc_id) {
          close(e.timestamp, false);
        } else if (!open_) {
          warn(e, "close with no open session ignored");
        }
        open_docs_.erase(*e.doc_id);
        last_page_.erase(*e.doc_id);
        if (foreground_ == e.doc_id) foreground_.reset();
        break;
      case EventKind::FocusToOtherApp:
        if (open_) {
          close(e.timestamp, false);
        } else {
          warn(e, "focus change with no open session ignored");
        }
        foreground_.reset();
        break;
      case EventKind::IdleTimeout:
        if (open_) {
          close(e.timestamp, false);
        } else {
          warn(e, "idle timeout with no open session ignored");
        }
        break;
      case EventKind::InputAfterIdle:
        input_after_idle(e);
        break;
      case EventKind::PageSwitch:
        page_switch(e);
        break;
    }
    last_event_ = e.timestamp;
  }

  std::vector<LearningSession> finish() {
    if (open_) {
      const auto id = open_->session_id;
      close(last_event_, true);
      if (diagnostics_) {
        diagnostics_->warnings.push_back(fmt::format(
            "session {} on '{}' still open at end of log; closed at {}", id,
            sessions_.back().doc_id, format_time(last_event_)));
      }
      if (!options_.include_truncated) sessions_.pop_back();
    }
    return std::move(sessions_);
  }

 private:
  void focus(const std::string& doc, TimePoint at) {
    if (open_ && open_->doc_id != doc) close(at, false);
    foreground_ = doc;
    if (!open_) start(doc, at);
  }

  void input_after_idle(const ActivityEvent& e) {
    const auto doc = e.doc_id ? e.doc_id : foreground_;
    if (open_) {
      // Input after a silent stretch the recorder did not flag: the session
      // ended one idle threshold after the last activity.
      const auto gap = seconds_between(last_event_, e.timestamp);
      if (gap >= options_.idle_threshold_s) {
        close(last_event_ + std::chrono::seconds(options_.idle_threshold_s),
              false);
      } else if (doc && *doc != open_->doc_id) {
        close(e.timestamp, false);
      } else {
        return;
      }
    }
    if (!doc) {
      warn(e, "input after idle with no document in the foreground ignored");
      return;
    }
    open_docs_.insert(*doc);
    foreground_ = doc;
    start(*doc, e.timestamp);
  }

  void page_switch(const ActivityEvent& e) {
    const int page = *e.page;
    if (open_ && (!e.doc_id || *e.doc_id == open_->doc_id)) {
      if (page != current_page_) {
        accrue(e.timestamp);
        current_page_ = page;
      }
      last_page_[open_->doc_id] = page;
      return;
    }
    if (const auto doc = e.doc_id ? e.doc_id : foreground_) {
      last_page_[*doc] = page;
    }
  }

  void start(const std::string& doc, TimePoint at) {
    LearningSession session;
    session.session_id = next_id_++;
    session.doc_id = doc;
    session.start_time = at;
    open_ = std::move(session);
    const auto it = last_page_.find(doc);
    current_page_ = it == last_page_.end() ? 1 : it->second;
    page_mark_ = at;
  }

  void accrue(TimePoint at) {
    open_->page_views.push_back(
        PageView{current_page_, seconds_between(page_mark_, at), {}});
    page_mark_ = at;
  }

  void close(TimePoint at, bool truncated) {
    accrue(at);
    open_->stop_time = at;
    open_->truncated = truncated;
    last_page_[open_->doc_id] = current_page_;
    sessions_.push_back(std::move(*open_));
    open_.reset();
  }

  void warn(const ActivityEvent& e, std::string_view what) {
    if (!diagnostics_) return;
    diagnostics_->warnings.push_back(fmt::format(
        "{} {}: {}", format_time(e.timestamp), to_string(e.kind), what));
  }

  const SessionOptions& options_;
  Diagnostics* diagnostics_;
  std::vector<LearningSession> sessions_;
  std::optional<LearningSession> open_;
  std::optional<std::string> foreground_;
  std::set<std::string> open_docs_;
  std::map<std::string, int> last_page_;
  int current_page_ = 1;
  TimePoint page_mark_{};
  TimePoint last_event_{};
  int next_id_ = 1;
};

}  // namespace

std::vector<LearningSession> discriminate_sessions(
    std::span<const ActivityEvent> events, const SessionOptions& options,
    Diagnostics* diagnostics) {
  if (options.idle_threshold_s <= 0) {
    throw ConfigError("idle threshold must be positive");
  }
  SessionBuilder builder(options, diagnostics);
  for (const auto& event : events) builder.feed(event);
  return builder.finish();
}

std::string join_page_text(std::span<const PageView> views) {
  std::set<int> seen;
  std::string out;
  for (const auto& view : views) {
    if (!seen.insert(view.page).second || view.text.empty()) continue;
    if (!out.empty()) out += '\n';
    out += view.text;
  }
  return out;
}

std::vector<LearningSession> merge_sessions(
    std::span<const LearningSession> sessions, std::int64_t merge_gap_s) {
  std::vector<LearningSession> out;
  for (const auto& session : sessions) {
    if (!out.empty()) {
      auto& prev = out.back();
      const auto gap = seconds_between(prev.stop_time, session.start_time);
      if (prev.doc_id == session.doc_id && gap < merge_gap_s) {
        prev.stop_time = std::max(prev.stop_time, session.stop_time);
        prev.page_views.insert(prev.page_views.end(),
                               session.page_views.begin(),
                               session.page_views.end());
        prev.text = join_page_text(prev.page_views);
        prev.truncated = prev.truncated || session.truncated;
        continue;
      }
    }
    out.push_back(session);
  }
  return out;
}

std::vector<LearningSession> filter_sessions(
    std::span<const LearningSession> sessions, std::int64_t min_page_dwell_s,
    std::int64_t min_session_s) {
  if (min_page_dwell_s < 0 || min_session_s < 0) {
    throw ConfigError("filter thresholds must be non-negative");
  }
  std::vector<LearningSession> out;
  for (const auto& session : sessions) {
    if (session.duration_seconds() < min_session_s) continue;
    std::map<int, std::int64_t> dwell_by_page;
    for (const auto& view : session.page_views) {
      dwell_by_page[view.page] += view.dwell_seconds;
    }
    LearningSession kept = session;
    std::erase_if(kept.page_views, [&](const PageView& view) {
      return dwell_by_page[view.page] < min_page_dwell_s;
    });
    if (kept.page_views.size() != session.page_views.size()) {
      kept.text = join_page_text(kept.page_views);
    }
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace kmodel
