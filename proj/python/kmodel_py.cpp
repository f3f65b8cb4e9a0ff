#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <optional>
#include <string>
#include <vector>

#include "kmodel/activity_log.hpp"
#include "kmodel/analytics.hpp"
#include "kmodel/error.hpp"
#include "kmodel/familiarity.hpp"
#include "kmodel/history_store.hpp"
#include "kmodel/knowledge_tree.hpp"
#include "kmodel/pipeline.hpp"
#include "kmodel/topic_engine.hpp"

namespace py = pybind11;
using namespace kmodel;

namespace {

// Timestamps cross the boundary as "YYYY-MM-DD HH:MM:SS" strings.
TimePoint to_time(const std::string& text) { return parse_time(text); }

LearningHistory history_from(const std::string& point,
                             const std::vector<LearningRecord>& records) {
  LearningHistory h(point);
  for (const auto& r : records) h.append(r);
  return h;
}

void bind_errors(py::module_& m) {
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<OrderingError>(m, "OrderingError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<NotFoundError>(m, "NotFoundError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<StoreError>(m, "StoreError", base);
}

void bind_sessions(py::module_& m) {
  py::class_<PageView>(m, "PageView")
      .def_readonly("page", &PageView::page)
      .def_readonly("dwell_seconds", &PageView::dwell_seconds)
      .def_readonly("text", &PageView::text);

  py::class_<LearningSession>(m, "LearningSession")
      .def_readonly("doc_id", &LearningSession::doc_id)
      .def_property_readonly("start_time",
                             [](const LearningSession& s) { return format_time(s.start_time); })
      .def_property_readonly("stop_time",
                             [](const LearningSession& s) { return format_time(s.stop_time); })
      .def_property_readonly("duration_seconds", &LearningSession::duration_seconds)
      .def_readonly("page_views", &LearningSession::page_views)
      .def_readonly("truncated", &LearningSession::truncated)
      .def("__repr__", [](const LearningSession& s) {
        return "<LearningSession " + s.doc_id + " " + format_time(s.start_time) +
               " " + std::to_string(s.duration_seconds()) + "s>";
      });

  m.def(
      "sessions_from_log",
      [](const std::string& text, std::int64_t idle_threshold_s,
         std::int64_t merge_gap_s, std::int64_t min_page_dwell_s,
         std::int64_t min_session_s, bool merge, bool filter) {
        const auto events = parse_event_log(std::string_view(text));
        auto sessions = discriminate_sessions(events, {idle_threshold_s, true});
        if (merge) sessions = merge_sessions(sessions, merge_gap_s);
        if (filter) sessions = filter_sessions(sessions, min_page_dwell_s, min_session_s);
        return sessions;
      },
      py::arg("text"), py::arg("idle_threshold_s") = 300,
      py::arg("merge_gap_s") = 1800, py::arg("min_page_dwell_s") = 30,
      py::arg("min_session_s") = 150, py::arg("merge") = true,
      py::arg("filter") = true,
      "Reconstruct reading sessions from the text of a tab-separated event log.");
}

void bind_tree(py::module_& m) {
  py::class_<KnowledgeTree>(m, "KnowledgeTree")
      .def_static("parse", &parse_tree, py::arg("text"))
      .def_static("load", &load_tree_file, py::arg("path"))
      .def("__len__", &KnowledgeTree::size)
      .def("__contains__", &KnowledgeTree::contains)
      .def("is_leaf", &KnowledgeTree::is_leaf)
      .def("leaves", &KnowledgeTree::leaves)
      .def("subtree_points", &KnowledgeTree::subtree_points)
      .def("display_name", &KnowledgeTree::display_name)
      .def_property_readonly("root", [](const KnowledgeTree& t) { return t.root().name; });
}

void bind_store(py::module_& m) {
  py::class_<LearningRecord>(m, "LearningRecord")
      .def(py::init([](std::int64_t seq, const std::string& stop,
                       std::int64_t duration, double proportion) {
             return LearningRecord{seq, to_time(stop), duration, proportion};
           }),
           py::arg("sequence_id"), py::arg("stop_time"),
           py::arg("duration_seconds"), py::arg("proportion"))
      .def_readonly("sequence_id", &LearningRecord::sequence_id)
      .def_property_readonly("stop_time",
                             [](const LearningRecord& r) { return format_time(r.stop_time); })
      .def_readonly("duration_seconds", &LearningRecord::duration_seconds)
      .def_readonly("proportion", &LearningRecord::proportion);

  py::class_<HistoryStore>(m, "HistoryStore")
      .def_static("load", &HistoryStore::load, py::arg("path"))
      .def("persons", &HistoryStore::persons)
      .def("points",
           [](const HistoryStore& s, const std::string& person) {
             std::vector<std::string> out;
             for (const auto& [p, _] : s.histories(person)) out.push_back(p);
             return out;
           })
      .def("records",
           [](const HistoryStore& s, const std::string& person,
              const std::string& point) {
             const auto* h = s.history(person, point);
             if (!h) throw NotFoundError("no history for '" + point + "'");
             return std::vector<LearningRecord>(h->records().begin(),
                                                h->records().end());
           })
      .def("familiarity_scores",
           [](const HistoryStore& s, const std::string& person,
              const std::string& at, double k, double c) {
             return familiarity_scores(s.histories(person), to_time(at), {k, c});
           },
           py::arg("person"), py::arg("at"), py::arg("k") = 1.84,
           py::arg("c") = 1.25);
}

void bind_familiarity(py::module_& m) {
  m.def("retention",
        [](double minutes, double k, double c) { return retention(minutes, {k, c}); },
        py::arg("minutes_elapsed"), py::arg("k") = 1.84, py::arg("c") = 1.25);
  m.def(
      "familiarity",
      [](const std::vector<LearningRecord>& records, const std::string& at,
         double k, double c) {
        return familiarity(history_from("", records), to_time(at), {k, c}).value;
      },
      py::arg("records"), py::arg("at"), py::arg("k") = 1.84, py::arg("c") = 1.25);
  m.def(
      "topic_familiarity",
      [](const std::vector<std::tuple<std::int64_t, double, std::string>>& sessions,
         const std::string& at) {
        std::vector<TopicSession> s;
        for (const auto& [d, share, stop] : sessions) s.push_back({d, share, to_time(stop)});
        return topic_familiarity("", s, to_time(at)).value;
      },
      py::arg("sessions"), py::arg("at"),
      "sessions: (duration_seconds, share, stop_time) tuples");
  m.def("relative_familiarity", &relative_familiarity);
  m.def("standardize", &standardize);
  m.def(
      "normalize",
      [](const ScoreMap& scores, const std::map<std::string, double>& complexity,
         double worker_factor) {
        NormalizationConfig config;
        config.complexity_factors.insert(complexity.begin(), complexity.end());
        config.worker_factor = worker_factor;
        return normalize(scores, config);
      },
      py::arg("scores"), py::arg("complexity") = std::map<std::string, double>{},
      py::arg("worker_factor") = 1.0);
  m.def("understanding_probability", &understanding_probability, py::arg("theta"));
  m.def(
      "understanding_logit",
      [](const std::vector<double>& f, double alpha0, const std::vector<double>& alphas) {
        return understanding_logit(f, {alpha0, alphas, {}});
      },
      py::arg("familiarities"), py::arg("alpha0"), py::arg("alphas"));
  m.def(
      "fit_logistic",
      [](const std::vector<std::vector<double>>& x, const std::vector<bool>& y) {
        if (x.size() != y.size()) throw DomainError("x and y lengths differ");
        std::vector<LabeledSample> samples;
        for (std::size_t i = 0; i < x.size(); ++i) samples.push_back({x[i], y[i]});
        const auto fit = fit_logistic(samples);
        return py::make_tuple(fit.params.alpha0, fit.params.alphas, fit.converged);
      },
      py::arg("x"), py::arg("y"),
      "Returns (alpha0, alphas, converged).");
}

void bind_topics(py::module_& m) {
  m.def("merge_multiword_terms",
        [](const std::string& text, const std::vector<std::string>& lexicon) {
          return merge_multiword_terms(text, lexicon);
        });
  m.def(
      "tokenize",
      [](const std::string& text, const std::vector<std::string>& stopwords) {
        return tokenize(text, StopwordSet(stopwords.begin(), stopwords.end())).tokens;
      },
      py::arg("text"), py::arg("stopwords") = std::vector<std::string>{});

  py::class_<TopicModelResult>(m, "TopicModel")
      .def_readonly("k", &TopicModelResult::k)
      .def_readonly("vocabulary", &TopicModelResult::vocabulary)
      .def_readonly("topics", &TopicModelResult::topics)
      .def_readonly("coverage", &TopicModelResult::coverage)
      .def_readonly("seed", &TopicModelResult::seed)
      .def(
          "shares",
          [](const TopicModelResult& r, std::size_t doc,
             const std::vector<std::string>& points, int m) {
            const std::set<std::string, std::less<>> known(points.begin(), points.end());
            return knowledge_point_shares(
                       r, doc, [&](std::string_view t) { return known.contains(t); }, m)
                .shares;
          },
          py::arg("doc"), py::arg("points"), py::arg("m") = 10)
      .def("report", &topic_report, py::arg("top_terms") = 10);

  m.def(
      "fit_lda",
      [](const std::vector<std::vector<std::string>>& docs, int k, double alpha,
         double beta, int iterations, std::uint64_t seed) {
        std::vector<TokenizedContent> corpus;
        for (const auto& tokens : docs) {
          TokenizedContent c;
          c.tokens = tokens;
          c.vocabulary = tokens;
          std::sort(c.vocabulary.begin(), c.vocabulary.end());
          c.vocabulary.erase(std::unique(c.vocabulary.begin(), c.vocabulary.end()),
                             c.vocabulary.end());
          corpus.push_back(std::move(c));
        }
        py::gil_scoped_release release;
        return fit_lda(corpus, {k, alpha, beta, iterations, seed});
      },
      py::arg("docs"), py::arg("k") = 2, py::arg("alpha") = 0.1,
      py::arg("beta") = 0.01, py::arg("iterations") = 1000, py::arg("seed") = 42);
}

void bind_analytics(py::module_& m) {
  m.def(
      "common_topics",
      [](const ScoreMap& a, const ScoreMap& b, double min_f, const std::string& key) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& r : common_topics(
                 a, b, min_f, key == "product" ? CommonTopicKey::Product : CommonTopicKey::Min)) {
          out.emplace_back(r.point, r.value);
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("min_f"), py::arg("key") = "min");
  m.def("pool_person", [](const ScoreMap& s, double min_f) {
    return pool_person(s, min_f).members;
  });
  m.def("pool_group", [](const std::vector<ScoreMap>& group, double min_f, double quorum) {
    return pool_group(group, min_f, quorum).members;
  });
  m.def("cosine_similarity", &cosine_similarity);
  m.def(
      "match_referees",
      [](const ScoreMap& paper, const std::map<std::string, ScoreMap>& candidates) {
        std::map<std::string, ConcentrationReport> reports;
        for (const auto& [id, scores] : candidates) {
          auto& r = reports[id];
          r.person = id;
          for (const auto& [p, v] : scores) r.ranked.push_back({p, v});
        }
        return match_referees(paper, reports).ranked_referees;
      },
      py::arg("paper_shares"), py::arg("candidates"));
  m.def(
      "lecture_comprehension",
      [](const ScoreMap& scores, const std::vector<std::string>& poster) {
        return lecture_comprehension(scores, poster);
      },
      py::arg("scores"), py::arg("poster_points"));
  m.def(
      "research_concentrations",
      [](const HistoryStore& store, const std::string& person,
         const std::string& t0, const std::string& t1, const std::string& at,
         std::size_t top_n) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& r : research_concentrations(store, person, to_time(t0),
                                                     to_time(t1), to_time(at), top_n)
                                 .ranked) {
          out.emplace_back(r.point, r.value);
        }
        return out;
      },
      py::arg("store"), py::arg("person"), py::arg("start"), py::arg("end"),
      py::arg("at"), py::arg("top_n") = 10);
  m.def(
      "discipline_expertise",
      [](const ScoreMap& scores, const KnowledgeTree& tree, const std::string& branch,
         double min_f) {
        const auto e = discipline_expertise(scores, tree, branch, min_f);
        return py::make_tuple(e.mastered, e.average);
      },
      py::arg("scores"), py::arg("tree"), py::arg("branch"), py::arg("min_f"),
      "Returns (mastered_count, mean_familiarity).");
}

void bind_pipeline(py::module_& m) {
  m.def(
      "ingest",
      [](const std::string& person, const std::filesystem::path& events,
         const std::filesystem::path& docs, const std::filesystem::path& tree,
         const std::filesystem::path& store, const std::filesystem::path& stopwords,
         int iterations, std::uint64_t seed) {
        PipelineConfig config;
        config.tree_path = tree;
        config.store_path = store;
        config.stopwords_path = stopwords;
        config.lda.iterations = iterations;
        config.lda.seed = seed;
        const auto report = ingest_files(person, events, docs, config);
        py::dict out;
        out["ingested_sessions"] = report.ingested_sessions;
        out["duplicate_sessions"] = report.duplicate_sessions;
        out["skipped_sessions"] = report.skipped_sessions;
        out["records_appended"] = report.records_appended;
        out["warnings"] = report.warnings;
        return out;
      },
      py::arg("person"), py::arg("events"), py::arg("docs"), py::arg("tree"),
      py::arg("store"), py::arg("stopwords") = std::filesystem::path{},
      py::arg("iterations") = 1000, py::arg("seed") = 42);
}

}  // namespace

PYBIND11_MODULE(_kmodel, m) {
  m.doc() = "Knowledge familiarity modelling from reading activity";
  bind_errors(m);
  bind_sessions(m);
  bind_tree(m);
  bind_store(m);
  bind_familiarity(m);
  bind_topics(m);
  bind_analytics(m);
  bind_pipeline(m);
}
