#include "kmodel/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "kmodel/knowledge_tree.hpp"

namespace kmodel {
namespace {

std::string cell_text(const nlohmann::json& cell, int precision) {
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_number_float()) {
    return fmt::format("{:.{}f}", cell.get<double>(), precision);
  }
  if (cell.is_null()) return "-";
  return cell.dump();
}

std::string name_of(const std::string& point, const KnowledgeTree* tree) {
  return tree ? tree->display_name(point) : point;
}

}  // namespace

std::string render(const Table& table, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::Records) {
    for (const auto& row : table.rows) {
      nlohmann::ordered_json record;
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        record[table.columns[c].key] = row[c];
      }
      out += record.dump();
      out += '\n';
    }
    return out;
  }
  const auto ncols = table.columns.size();
  std::vector<std::vector<std::string>> text;
  std::vector<std::size_t> width(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    width[c] = table.columns[c].title.size();
  }
  for (const auto& row : table.rows) {
    auto& line = text.emplace_back();
    for (std::size_t c = 0; c < ncols; ++c) {
      line.push_back(cell_text(row[c], table.columns[c].precision));
      width[c] = std::max(width[c], line.back().size());
    }
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c) line += "  ";
      line += fmt::format("{:<{}}", cells[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  };
  std::vector<std::string> header;
  for (const auto& col : table.columns) header.push_back(col.title);
  emit(header);
  for (const auto& line : text) emit(line);
  return out;
}

Table familiarity_table(const PersonHistories& histories, TimePoint at,
                        const RetentionParams& params,
                        const KnowledgeTree* tree) {
  Table table;
  table.columns = {{"Knowledge point", "point"},
                   {"Learning frequency", "frequency"},
                   {"Cumulative learning time(S)", "cumulative_seconds"},
                   {"Latest learning date", "latest"},
                   {"Familiarity measure", "familiarity"}};
  const EbbinghausCurve curve(params);
  for (const auto& [point, history] : histories) {
    const auto latest = history.latest_stop();
    table.rows.push_back({name_of(point, tree),
                          static_cast<std::int64_t>(history.size()),
                          history.cumulative_duration(),
                          latest ? nlohmann::json(format_time(*latest))
                                 : nlohmann::json(nullptr),
                          familiarity(history, at, curve).value});
  }
  return table;
}

Table score_table(const ScoreMap& scores, const std::string& value_title,
                  const std::string& value_key, int precision,
                  const KnowledgeTree* tree) {
  Table table;
  table.columns = {{"Knowledge point", "point"},
                   {value_title, value_key, precision}};
  for (const auto& [point, value] : scores) {
    table.rows.push_back({name_of(point, tree), value});
  }
  return table;
}

Table ranked_table(const std::vector<RankedPoint>& ranked,
                   const std::string& value_title, const std::string& value_key,
                   const KnowledgeTree* tree) {
  Table table;
  table.columns = {{"Rank", "rank"},
                   {"Knowledge point", "point"},
                   {value_title, value_key}};
  std::int64_t rank = 0;
  for (const auto& r : ranked) {
    table.rows.push_back({++rank, name_of(r.point, tree), r.value});
  }
  return table;
}

Table pool_table(const ConceptsPool& pool) {
  Table table;
  table.columns = {{"Concept", "concept"}, {"Pool", "pool"},
                   {"Criteria", "criteria"}};
  for (const auto& member : pool.members) {
    table.rows.push_back(
        {member, std::string(to_string(pool.type)), pool.criteria});
  }
  return table;
}

Table referee_table(const RefereeMatch& match) {
  Table table;
  table.columns = {{"Rank", "rank"},
                   {"Referee", "referee"},
                   {"Similarity", "similarity", 4}};
  std::int64_t rank = 0;
  for (const auto& [referee, similarity] : match.ranked_referees) {
    table.rows.push_back({++rank, referee, similarity});
  }
  return table;
}

}  // namespace kmodel
