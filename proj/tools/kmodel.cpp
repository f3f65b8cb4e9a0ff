// kmodel: reading-session ingestion and familiarity reports.
//
// Exit codes: 0 success, 1 usage or input error, 2 unknown person / point /
// branch / file, 3 mathematically undefined result.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "kmodel/analytics.hpp"
#include "kmodel/error.hpp"
#include "kmodel/familiarity.hpp"
#include "kmodel/history_store.hpp"
#include "kmodel/knowledge_tree.hpp"
#include "kmodel/pipeline.hpp"
#include "kmodel/report.hpp"
#include "kmodel/text.hpp"

namespace {

using namespace kmodel;

constexpr int kExitUsage = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitMath = 3;

struct Options {
  PipelineConfig config;
  std::string tree, lexicon, stopwords, store;
  std::vector<std::string> complexity;  // point=factor
  std::string format = "table";

  std::string person;
  std::string events;
  std::string docs;

  std::string at;
  std::string from, to;
  std::size_t top = 10;
  double min_f = 0.0;
  std::string other;
  std::string branch;
  std::string key = "min";
  std::string mode = "relative";
  std::string pool_kind = "person";
  std::vector<std::string> corpus;
  std::int64_t min_tf = 1;
  double max_idf = 0.0;
  std::vector<std::string> group;
  double quorum = 1.0;
  std::vector<std::string> points;
  std::string weights;
  std::vector<std::string> paper_shares;
  std::string paper_text;
  std::vector<std::string> candidates;
  std::string tree_file;
};

PipelineConfig resolved_config(const Options& o) {
  PipelineConfig c = o.config;
  c.tree_path = o.tree;
  c.lexicon_path = o.lexicon;
  c.stopwords_path = o.stopwords;
  c.store_path = o.store;
  for (const auto& entry : o.complexity) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("complexity factor must be point=factor: " + entry);
    }
    c.normalization.complexity_factors[normalize_name(entry.substr(0, eq))] =
        std::stod(entry.substr(eq + 1));
  }
  c.validate();
  return c;
}

OutputFormat output_format(const Options& o) {
  return o.format == "records" ? OutputFormat::Records : OutputFormat::Table;
}

std::optional<KnowledgeTree> optional_tree(const Options& o) {
  if (o.tree.empty()) return std::nullopt;
  return load_tree_file(o.tree);
}

const KnowledgeTree& require_tree(const std::optional<KnowledgeTree>& tree) {
  if (!tree) throw ConfigError("this report needs --tree");
  return *tree;
}

HistoryStore load_store(const Options& o) {
  if (o.store.empty()) throw ConfigError("no history store given (--store)");
  StoreLock lock(o.store, StoreLock::Mode::Shared);
  return HistoryStore::load(o.store);
}

/// Histories of `person`; an entirely empty store reads as an empty history.
const PersonHistories& person_histories(const HistoryStore& store,
                                        const std::string& person) {
  static const PersonHistories kEmpty;
  if (store.empty()) return kEmpty;
  return store.histories(person);
}

TimePoint require_time(const std::string& text, const char* flag) {
  if (text.empty()) throw ConfigError(fmt::format("{} is required", flag));
  return parse_time(text);
}

ScoreMap parse_share_list(const std::vector<std::string>& entries) {
  ScoreMap out;
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("paper share must be point=share: " + entry);
    }
    out[normalize_name(entry.substr(0, eq))] += std::stod(entry.substr(eq + 1));
  }
  return out;
}

LogisticParams read_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open weights file '" + path + "'");
  const auto doc = nlohmann::json::parse(in);
  LogisticParams params;
  params.alpha0 = doc.value("alpha0", 0.0);
  params.alphas = doc.value("alphas", std::vector<double>{});
  for (const auto& p : doc.value("points", std::vector<std::string>{})) {
    params.points.push_back(normalize_name(p));
  }
  params.validate();
  return params;
}

std::vector<TokenizedContent> read_corpus(const std::vector<std::string>& files,
                                          const TextResources& resources) {
  std::vector<TokenizedContent> corpus;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw NotFoundError("cannot open corpus file '" + file + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    corpus.push_back(tokenize(
        merge_multiword_terms(buffer.str(), resources.lexicon),
        resources.stopwords));
  }
  return corpus;
}

int run_ingest(const Options& o) {
  const auto config = resolved_config(o);
  const auto report = ingest_files(o.person, o.events, o.docs, config);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << fmt::format(
      "events {}\nraw sessions {}\nmerged sessions {}\nfiltered sessions {}\n"
      "ingested sessions {}\nalready ingested {}\nskipped {}\nrecords appended {}\n",
      report.raw_events, report.raw_sessions, report.merged_sessions,
      report.filtered_sessions, report.ingested_sessions,
      report.duplicate_sessions, report.skipped_sessions,
      report.records_appended);
  return 0;
}

int run_report(const std::string& sub, const Options& o) {
  const auto config = resolved_config(o);
  const auto tree = optional_tree(o);
  const KnowledgeTree* tree_ptr = tree ? &*tree : nullptr;
  const auto format = output_format(o);
  const auto store = load_store(o);

  if (sub == "familiarity") {
    const auto at = require_time(o.at, "--at");
    std::cout << render(familiarity_table(person_histories(store, o.person), at,
                                          config.retention, tree_ptr),
                        format);
    return 0;
  }

  if (sub == "relative") {
    const auto at = require_time(o.at, "--at");
    const auto scores = familiarity_scores(person_histories(store, o.person), at,
                                           config.retention);
    if (scores.empty()) {
      std::cout << render(score_table(scores, "Relative", "relative", 4, tree_ptr),
                          format);
      return 0;
    }
    if (o.mode == "standardized") {
      std::cout << render(score_table(standardize(scores), "Standardized",
                                      "standardized", 4, tree_ptr),
                          format);
    } else if (o.mode == "normalized") {
      std::cout << render(score_table(normalize(scores, config.normalization),
                                      "Normalized", "normalized", 2, tree_ptr),
                          format);
    } else {
      std::cout << render(score_table(relative_familiarity(scores), "Relative",
                                      "relative", 4, tree_ptr),
                          format);
    }
    return 0;
  }

  if (sub == "concentrations") {
    const auto at = require_time(o.at, "--at");
    const auto from = require_time(o.from, "--from");
    const auto to = o.to.empty() ? at : parse_time(o.to);
    if (store.empty()) {
      std::cout << render(ranked_table({}, "Familiarity measure", "familiarity"),
                          format);
      return 0;
    }
    const auto report = research_concentrations(store, o.person, from, to, at,
                                                o.top, config.retention);
    std::cout << render(ranked_table(report.ranked, "Familiarity measure",
                                     "familiarity", tree_ptr),
                        format);
    return 0;
  }

  if (sub == "common-topics") {
    const auto at = require_time(o.at, "--at");
    const auto a = familiarity_scores(person_histories(store, o.person), at,
                                      config.retention);
    const auto b = familiarity_scores(person_histories(store, o.other), at,
                                      config.retention);
    const auto key = o.key == "product" ? CommonTopicKey::Product
                                        : CommonTopicKey::Min;
    const auto ranked =
        o.branch.empty()
            ? common_topics(a, b, o.min_f, key)
            : common_topics(a, b, require_tree(tree), o.branch, o.min_f, key);
    std::cout << render(ranked_table(ranked, "Rank key", "key", tree_ptr), format);
    return 0;
  }

  if (sub == "pool") {
    ConceptsPool pool;
    if (o.pool_kind == "tf" || o.pool_kind == "idf") {
      TextResources resources;
      if (tree) resources = load_text_resources(config, *tree);
      const auto corpus = read_corpus(o.corpus, resources);
      pool = o.pool_kind == "tf" ? pool_tf(corpus, o.min_tf)
                                 : pool_idf(corpus, o.max_idf);
    } else {
      const auto at = require_time(o.at, "--at");
      if (o.pool_kind == "group") {
        std::vector<ScoreMap> group;
        for (const auto& p : o.group) {
          group.push_back(familiarity_scores(person_histories(store, p), at,
                                             config.retention));
        }
        pool = pool_group(group, o.min_f, o.quorum);
      } else {
        pool = pool_person(familiarity_scores(person_histories(store, o.person),
                                              at, config.retention),
                           o.min_f);
      }
    }
    std::cout << render(pool_table(pool), format);
    return 0;
  }

  if (sub == "lecture") {
    const auto at = require_time(o.at, "--at");
    const auto scores = familiarity_scores(person_histories(store, o.person), at,
                                           config.retention);
    std::vector<std::string> points;
    for (const auto& p : o.points) points.push_back(normalize_name(p));
    std::optional<LogisticParams> weights;
    if (!o.weights.empty()) weights = read_weights(o.weights);
    const double score = lecture_comprehension(scores, points, weights);
    Table table;
    table.columns = {{"Person", "person"},
                     {weights ? "Understanding probability" : "Comprehension",
                      "score", 4}};
    table.rows.push_back({o.person, score});
    std::cout << render(table, format);
    return 0;
  }

  if (sub == "referees") {
    const auto at = require_time(o.at, "--at");
    const auto from = require_time(o.from, "--from");
    const auto to = o.to.empty() ? at : parse_time(o.to);
    ScoreMap shares = parse_share_list(o.paper_shares);
    if (!o.paper_text.empty()) {
      const auto& t = require_tree(tree);
      std::ifstream in(o.paper_text);
      if (!in) throw NotFoundError("cannot open paper text '" + o.paper_text + "'");
      std::ostringstream buffer;
      buffer << in.rdbuf();
      const auto analysis =
          analyze_text(buffer.str(), t, load_text_resources(config, t), config);
      for (const auto& [point, share] : analysis.shares.shares) {
        shares[point] += share;
      }
    }
    std::map<std::string, ConcentrationReport> reports;
    for (const auto& referee : o.candidates) {
      reports.emplace(referee, research_concentrations(store, referee, from, to,
                                                       at, o.top,
                                                       config.retention));
    }
    std::cout << render(referee_table(match_referees(shares, reports)), format);
    return 0;
  }

  if (sub == "expertise") {
    const auto at = require_time(o.at, "--at");
    const auto& t = require_tree(tree);
    const auto scores = familiarity_scores(person_histories(store, o.person), at,
                                           config.retention);
    const auto e = discipline_expertise(scores, t, o.branch, o.min_f);
    Table table;
    table.columns = {{"Branch", "branch"},
                     {"Points", "points"},
                     {"Mastered", "mastered"},
                     {"Mean familiarity", "mean", 2}};
    table.rows.push_back({t.at(o.branch).display_name,
                          static_cast<std::int64_t>(e.points),
                          static_cast<std::int64_t>(e.mastered), e.average});
    std::cout << render(table, format);
    return 0;
  }
  throw ConfigError("unknown report " + sub);
}

int run_tree_validate(const Options& o) {
  const auto tree = load_tree_file(o.tree_file);
  std::cout << fmt::format("ok: {} nodes, {} knowledge points, root '{}'\n",
                           tree.size(), tree.leaves().size(), tree.root().name);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Reading-session ingestion and knowledge familiarity reports",
               "kmodel"};
  app.set_config("--config", "", "INI/TOML file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  auto& c = o.config;
  app.add_option("--tree", o.tree, "Knowledge tree file");
  app.add_option("--lexicon", o.lexicon, "Extra multi-word terms, one per line");
  app.add_option("--stopwords", o.stopwords, "Stopword list, one per line");
  app.add_option("--store", o.store, "History store file");
  app.add_option("--idle-threshold", c.sessions.idle_threshold_s,
                 "Seconds of silence that end a session")
      ->capture_default_str();
  app.add_flag("!--exclude-truncated", c.sessions.include_truncated,
               "Drop a session still open when the log ends");
  app.add_option("--merge-gap", c.merge_gap_s,
                 "Merge same-document sessions closer than this many seconds")
      ->capture_default_str();
  app.add_option("--min-page-dwell", c.min_page_dwell_s,
                 "Ignore pages read for fewer seconds")
      ->capture_default_str();
  app.add_option("--min-session", c.min_session_s,
                 "Ignore sessions shorter than this many seconds")
      ->capture_default_str();
  app.add_option("--topics", c.lda.k, "LDA topic count")->capture_default_str();
  app.add_option("--alpha", c.lda.alpha, "LDA document-topic prior")
      ->capture_default_str();
  app.add_option("--beta", c.lda.beta, "LDA topic-word prior")
      ->capture_default_str();
  app.add_option("--iterations", c.lda.iterations, "Gibbs sweeps")
      ->capture_default_str();
  app.add_option("--seed", c.lda.seed, "LDA random seed")->capture_default_str();
  app.add_option("--top-m", c.top_m, "Top terms per topic for share allocation")
      ->capture_default_str();
  app.add_option("--retention-k", c.retention.k, "Forgetting curve k")
      ->capture_default_str();
  app.add_option("--retention-c", c.retention.c, "Forgetting curve c")
      ->capture_default_str();
  app.add_option("--worker-factor", c.normalization.worker_factor,
                 "Per-person normalization factor")
      ->capture_default_str();
  app.add_option("--complexity", o.complexity,
                 "Complexity factor as point=factor (repeatable)");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "records"}))
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Add reading sessions to a store");
  ingest->add_option("--person", o.person, "Person identifier")->required();
  ingest->add_option("--events", o.events, "Event log")->required();
  ingest->add_option("--docs", o.docs,
                     "Page text: directory <doc>/<page>.txt or TSV file")
      ->required();

  auto* report = app.add_subcommand("report", "Familiarity reports");
  report->require_subcommand(1);
  report->fallthrough();
  report->add_option("--person", o.person, "Person identifier");
  report->add_option("--at", o.at, "Evaluation time, YYYY-MM-DD HH:MM:SS");

  std::map<std::string, CLI::App*> reports;
  for (const char* name :
       {"familiarity", "relative", "concentrations", "common-topics", "pool",
        "lecture", "referees", "expertise"}) {
    reports[name] = report->add_subcommand(name);
    reports[name]->fallthrough();
  }
  reports["familiarity"]->description("Familiarity measure per knowledge point");
  reports["relative"]->description("Relative, standardized or normalized scores");
  reports["relative"]
      ->add_option("--mode", o.mode)
      ->check(CLI::IsMember({"relative", "standardized", "normalized"}))
      ->capture_default_str();
  reports["concentrations"]->description("Research concentrations in a window");
  for (const char* name : {"concentrations", "referees"}) {
    reports[name]->add_option("--from", o.from, "Window start");
    reports[name]->add_option("--to", o.to, "Window end (default --at)");
    reports[name]->add_option("--top", o.top, "Points kept per person")
        ->capture_default_str();
  }
  reports["common-topics"]->description("Points two people both know");
  reports["common-topics"]->add_option("--other", o.other, "Second person")
      ->required();
  reports["common-topics"]->add_option("--branch", o.branch, "Restrict to branch");
  reports["common-topics"]
      ->add_option("--key", o.key, "Ranking key")
      ->check(CLI::IsMember({"min", "product"}))
      ->capture_default_str();
  for (const char* name : {"common-topics", "pool", "expertise"}) {
    reports[name]->add_option("--min-f", o.min_f, "Familiarity threshold")
        ->capture_default_str();
  }
  reports["pool"]->description("Concepts pools");
  reports["pool"]
      ->add_option("--kind", o.pool_kind)
      ->check(CLI::IsMember({"tf", "idf", "person", "group"}))
      ->capture_default_str();
  reports["pool"]->add_option("--corpus", o.corpus, "Text files (tf/idf)");
  reports["pool"]->add_option("--min-tf", o.min_tf)->capture_default_str();
  reports["pool"]->add_option("--max-idf", o.max_idf)->capture_default_str();
  reports["pool"]->add_option("--group", o.group, "People (group pool)");
  reports["pool"]->add_option("--quorum", o.quorum)->capture_default_str();
  reports["lecture"]->description("Predicted comprehension of a lecture");
  reports["lecture"]
      ->add_option("--points", o.points, "Poster knowledge points")
      ->delimiter(',')
      ->required();
  reports["lecture"]->add_option("--weights", o.weights,
                                 "JSON logistic weights {alpha0, alphas, points}");
  reports["referees"]->description("Rank candidate referees for a paper");
  reports["referees"]
      ->add_option("--paper-shares", o.paper_shares, "point=share entries")
      ->delimiter(',');
  reports["referees"]->add_option("--paper-text", o.paper_text,
                                  "Paper text to analyze for shares");
  reports["referees"]
      ->add_option("--candidates", o.candidates, "Candidate referees")
      ->delimiter(',')
      ->required();
  reports["expertise"]->description("Mastery of a discipline subtree");
  reports["expertise"]->add_option("--branch", o.branch, "Branch name")
      ->required();

  auto* tree_cmd = app.add_subcommand("tree", "Knowledge tree utilities");
  tree_cmd->require_subcommand(1);
  auto* validate = tree_cmd->add_subcommand("validate", "Check a tree file");
  validate->add_option("file", o.tree_file, "Tree file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (ingest->parsed()) return run_ingest(o);
    if (validate->parsed()) return run_tree_validate(o);
    for (const auto& [name, sub] : reports) {
      if (sub->parsed()) {
        if (o.person.empty() && name != "referees" &&
            !(name == "pool" && o.pool_kind != "person")) {
          throw ConfigError("--person is required");
        }
        return run_report(name, o);
      }
    }
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotFound;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMath;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
