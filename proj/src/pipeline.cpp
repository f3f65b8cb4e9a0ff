#include "kmodel/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "kmodel/error.hpp"
#include "kmodel/text.hpp"

namespace kmodel {

void PipelineConfig::validate() const {
  if (sessions.idle_threshold_s <= 0) {
    throw ConfigError("idle threshold must be positive");
  }
  if (merge_gap_s < 0 || min_page_dwell_s < 0 || min_session_s < 0) {
    throw ConfigError("session thresholds must be non-negative");
  }
  if (lda.k < 1) throw ConfigError("topic count must be >= 1");
  if (lda.iterations < 1) throw ConfigError("LDA iterations must be >= 1");
  if (!(lda.alpha > 0.0) || !(lda.beta > 0.0)) {
    throw ConfigError("LDA priors must be positive");
  }
  if (top_m < 1) throw ConfigError("top-m must be >= 1");
  retention.validate();
  normalization.validate();
}

DocumentBundle DocumentBundle::open(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  DocumentBundle bundle;
  if (fs::is_directory(path)) {
    bundle.root_ = path;
    bundle.in_memory_ = false;
    return bundle;
  }
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open document text '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto first = line.find('\t');
    const auto second =
        first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw ParseError("expected doc_id, page and text fields", line_no);
    }
    const std::string_view page_field(line.data() + first + 1,
                                      second - first - 1);
    int page = 0;
    const auto [ptr, ec] = std::from_chars(
        page_field.data(), page_field.data() + page_field.size(), page);
    if (ec != std::errc{} || ptr != page_field.data() + page_field.size() ||
        page < 1) {
      throw ParseError(fmt::format("invalid page '{}'", page_field), line_no);
    }
    auto& text = bundle.pages_[{line.substr(0, first), page}];
    if (!text.empty()) text += '\n';
    text += line.substr(second + 1);
  }
  return bundle;
}

DocumentBundle DocumentBundle::from_pages(
    std::map<std::pair<std::string, int>, std::string> pages) {
  DocumentBundle bundle;
  bundle.pages_ = std::move(pages);
  return bundle;
}

std::optional<std::string> DocumentBundle::page_text(std::string_view doc_id,
                                                     int page) const {
  if (in_memory_) {
    const auto it = pages_.find({std::string(doc_id), page});
    if (it == pages_.end()) return std::nullopt;
    return it->second;
  }
  const auto file = root_ / std::string(doc_id) / fmt::format("{}.txt", page);
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<int> attach_page_text(LearningSession& session,
                                  const DocumentBundle& bundle) {
  std::vector<int> missing;
  for (auto& view : session.page_views) {
    if (auto text = bundle.page_text(session.doc_id, view.page)) {
      view.text = std::move(*text);
    } else if (std::find(missing.begin(), missing.end(), view.page) ==
               missing.end()) {
      missing.push_back(view.page);
    }
  }
  session.text = join_page_text(session.page_views);
  return missing;
}

TextResources load_text_resources(const PipelineConfig& config,
                                  const KnowledgeTree& tree) {
  TextResources resources;
  resources.lexicon = tree.multiword_phrases();
  if (!config.lexicon_path.empty()) {
    for (auto& entry : read_word_list_file(config.lexicon_path.string())) {
      resources.lexicon.push_back(std::move(entry));
    }
  }
  if (!config.stopwords_path.empty()) {
    for (auto& word : read_word_list_file(config.stopwords_path.string())) {
      resources.stopwords.insert(to_lower_ascii(word));
    }
  }
  return resources;
}

SessionAnalysis analyze_text(std::string_view text, const KnowledgeTree& tree,
                             const TextResources& resources,
                             const PipelineConfig& config) {
  SessionAnalysis analysis;
  analysis.content =
      tokenize(merge_multiword_terms(text, resources.lexicon), resources.stopwords);
  analysis.model = fit_lda(std::span(&analysis.content, 1), config.lda);
  analysis.shares = knowledge_point_shares(analysis.model, 0, tree, config.top_m);
  return analysis;
}

IngestReport ingest_events(const std::string& person,
                           std::span<const ActivityEvent> events,
                           const DocumentBundle& documents,
                           const KnowledgeTree& tree,
                           const TextResources& resources,
                           const PipelineConfig& config, HistoryStore& store) {
  config.validate();
  IngestReport report;
  report.raw_events = events.size();

  Diagnostics diagnostics;
  const auto raw = discriminate_sessions(events, config.sessions, &diagnostics);
  report.raw_sessions = raw.size();
  const auto merged = merge_sessions(raw, config.merge_gap_s);
  report.merged_sessions = merged.size();
  auto sessions =
      filter_sessions(merged, config.min_page_dwell_s, config.min_session_s);
  report.filtered_sessions = sessions.size();
  report.warnings = std::move(diagnostics.warnings);

  HistoryStore working = store;
  for (auto& session : sessions) {
    const SessionKey key{session.doc_id, session.start_time, session.stop_time};
    if (working.has_session(person, key)) {
      ++report.duplicate_sessions;
      continue;
    }
    const auto missing = attach_page_text(session, documents);
    if (!missing.empty()) {
      report.warnings.push_back(fmt::format(
          "session on '{}' at {} skipped: no text for page {}", session.doc_id,
          format_time(session.start_time), missing.front()));
      ++report.skipped_sessions;
      continue;
    }
    SessionAnalysis analysis;
    try {
      analysis = analyze_text(session.text, tree, resources, config);
    } catch (const DomainError& e) {
      report.warnings.push_back(fmt::format(
          "session on '{}' at {} skipped: {}", session.doc_id,
          format_time(session.start_time), e.what()));
      ++report.skipped_sessions;
      continue;
    }
    for (const auto& [term, share] : analysis.shares.shares) {
      if (!(share > 0.0)) continue;
      const auto& point = tree.at(term).name;
      const auto* existing = working.history(person, point);
      LearningRecord record;
      record.sequence_id = existing ? existing->next_sequence_id() : 1;
      record.stop_time = session.stop_time;
      record.duration_seconds = session.duration_seconds();
      record.proportion = share;
      working.append_record(person, tree, point, record);
      report.new_lines.push_back(format_record_line(person, point, record));
      ++report.records_appended;
    }
    working.mark_session(person, key);
    report.new_lines.push_back(format_session_line(person, key));
    ++report.ingested_sessions;
  }
  store = std::move(working);
  return report;
}

IngestReport ingest_files(const std::string& person,
                          const std::filesystem::path& event_log,
                          const std::filesystem::path& documents,
                          const PipelineConfig& config,
                          const IngestHooks& hooks) {
  config.validate();
  if (config.tree_path.empty()) throw ConfigError("no knowledge tree given");
  if (config.store_path.empty()) throw ConfigError("no history store given");
  const auto tree = load_tree_file(config.tree_path.string());
  const auto resources = load_text_resources(config, tree);
  const auto events = read_event_log_file(event_log.string());
  const auto bundle = DocumentBundle::open(documents);

  StoreLock lock(config.store_path, StoreLock::Mode::Exclusive);
  auto store = HistoryStore::load(config.store_path);
  auto report =
      ingest_events(person, events, bundle, tree, resources, config, store);
  if (hooks.before_commit) hooks.before_commit();
  append_lines_atomic(config.store_path, report.new_lines);
  return report;
}

}  // namespace kmodel
