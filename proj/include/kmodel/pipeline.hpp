#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kmodel/activity_log.hpp"
#include "kmodel/familiarity.hpp"
#include "kmodel/history_store.hpp"
#include "kmodel/knowledge_tree.hpp"
#include "kmodel/topic_engine.hpp"

namespace kmodel {

struct PipelineConfig {
  SessionOptions sessions;
  std::int64_t merge_gap_s = 1800;
  std::int64_t min_page_dwell_s = 30;
  std::int64_t min_session_s = 150;
  LdaOptions lda;
  int top_m = 10;
  RetentionParams retention;
  NormalizationConfig normalization;

  std::filesystem::path tree_path;
  std::filesystem::path lexicon_path;
  std::filesystem::path stopwords_path;
  std::filesystem::path store_path;

  /// Throws ConfigError.
  void validate() const;
};

/// Page text per (document, page). Backed either by a directory laid out as
/// `<root>/<doc_id>/<page>.txt` or by a tab-separated file of
/// `doc_id <TAB> page <TAB> text` lines.
class DocumentBundle {
 public:
  static DocumentBundle open(const std::filesystem::path& path);
  static DocumentBundle from_pages(
      std::map<std::pair<std::string, int>, std::string> pages);

  std::optional<std::string> page_text(std::string_view doc_id, int page) const;

 private:
  std::filesystem::path root_;
  std::map<std::pair<std::string, int>, std::string> pages_;
  bool in_memory_ = true;
};

/// Fills each page view's text and the session text. Returns the pages that
/// have no text in the bundle.
std::vector<int> attach_page_text(LearningSession& session,
                                  const DocumentBundle& bundle);

struct TextResources {
  std::vector<std::string> lexicon;
  StopwordSet stopwords;
};

/// Lexicon = multi-word leaves of the tree plus the optional lexicon file;
/// stopwords from the optional stopword file.
TextResources load_text_resources(const PipelineConfig& config,
                                  const KnowledgeTree& tree);

struct SessionAnalysis {
  TokenizedContent content;
  TopicModelResult model;
  ShareAllocation shares;
};

/// Merge multi-word terms, tokenize, fit LDA on the single document and
/// allocate knowledge-point shares.
SessionAnalysis analyze_text(std::string_view text, const KnowledgeTree& tree,
                             const TextResources& resources,
                             const PipelineConfig& config);

struct IngestReport {
  std::size_t raw_events = 0;
  std::size_t raw_sessions = 0;
  std::size_t merged_sessions = 0;
  std::size_t filtered_sessions = 0;
  std::size_t ingested_sessions = 0;
  std::size_t duplicate_sessions = 0;
  std::size_t skipped_sessions = 0;
  std::size_t records_appended = 0;
  std::vector<std::string> warnings;
  /// Store lines produced, in append order.
  std::vector<std::string> new_lines;
};

/// Sessions are discriminated, merged and filtered; each surviving session
/// not already in the store adds one record per knowledge point it touches.
/// `store` is only modified if the whole batch succeeds.
IngestReport ingest_events(const std::string& person,
                           std::span<const ActivityEvent> events,
                           const DocumentBundle& documents,
                           const KnowledgeTree& tree,
                           const TextResources& resources,
                           const PipelineConfig& config, HistoryStore& store);

struct IngestHooks {
  /// Runs after analysis and before the store file is replaced; throwing
  /// aborts the ingest with the store untouched.
  std::function<void()> before_commit;
};

/// File-level ingest under an exclusive store lock. The store file is either
/// unchanged or extended by exactly the new lines.
IngestReport ingest_files(const std::string& person,
                          const std::filesystem::path& event_log,
                          const std::filesystem::path& documents,
                          const PipelineConfig& config,
                          const IngestHooks& hooks = {});

}  // namespace kmodel
