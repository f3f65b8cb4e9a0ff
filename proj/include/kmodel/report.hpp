#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kmodel/analytics.hpp"
#include "kmodel/familiarity.hpp"
#include "kmodel/history_store.hpp"

namespace kmodel {

class KnowledgeTree;

enum class OutputFormat { Table, Records };

struct Column {
  std::string title;
  /// Key used in record output.
  std::string key;
  /// Decimal places for floating-point cells in table output.
  int precision = 2;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

/// Table: space-aligned columns under a header row. Records: one JSON object
/// per row keyed by column key, full precision.
std::string render(const Table& table, OutputFormat format);

/// One row per knowledge point: name, learning frequency, cumulative learning
/// seconds, latest stop, familiarity at `at`. Names come from the tree when
/// given.
Table familiarity_table(const PersonHistories& histories, TimePoint at,
                        const RetentionParams& params,
                        const KnowledgeTree* tree = nullptr);

Table score_table(const ScoreMap& scores, const std::string& value_title,
                  const std::string& value_key, int precision,
                  const KnowledgeTree* tree = nullptr);

Table ranked_table(const std::vector<RankedPoint>& ranked,
                   const std::string& value_title, const std::string& value_key,
                   const KnowledgeTree* tree = nullptr);

Table pool_table(const ConceptsPool& pool);
Table referee_table(const RefereeMatch& match);

}  // namespace kmodel
