#include "kmodel/familiarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "kmodel/error.hpp"

namespace kmodel {

void RetentionParams::validate() const {
  if (!(k > 0.0) || !(c > 0.0)) {
    throw ConfigError(fmt::format(
        "retention constants must be positive (k = {}, c = {})", k, c));
  }
}

EbbinghausCurve::EbbinghausCurve(RetentionParams params) : params_(params) {
  params_.validate();
}

double EbbinghausCurve::retention(double minutes_elapsed) const {
  if (!(minutes_elapsed >= 0.0)) {
    throw DomainError(fmt::format(
        "retention evaluated {} minutes before learning stopped",
        -minutes_elapsed));
  }
  const double t = std::max(1.0, minutes_elapsed + 1.0);
  const double log_t = std::log10(t);
  return params_.k / (std::pow(log_t, params_.c) + params_.k);
}

double retention(double minutes_elapsed, const RetentionParams& params) {
  return EbbinghausCurve(params).retention(minutes_elapsed);
}

double minutes_between(TimePoint from, TimePoint to) {
  return static_cast<double>(seconds_between(from, to)) / 60.0;
}

FamiliarityScore familiarity(const LearningHistory& history, TimePoint at,
                             const ForgettingCurve& curve) {
  double total = 0.0;
  for (const auto& r : history.records()) {
    if (at < r.stop_time) {
      throw DomainError(fmt::format(
          "'{}' evaluated at {} before record {} stopped at {}",
          history.knowledge_point(), format_time(at), r.sequence_id,
          format_time(r.stop_time)));
    }
    total += static_cast<double>(r.duration_seconds) * r.proportion *
             curve.retention(minutes_between(r.stop_time, at));
  }
  return {history.knowledge_point(), total, at};
}

FamiliarityScore familiarity(const LearningHistory& history, TimePoint at,
                             const RetentionParams& params) {
  return familiarity(history, at, EbbinghausCurve(params));
}

FamiliarityScore topic_familiarity(std::string topic,
                                   std::span<const TopicSession> sessions,
                                   TimePoint at, const RetentionParams& params) {
  const EbbinghausCurve curve(params);
  double total = 0.0;
  for (const auto& s : sessions) {
    if (at < s.stop_time) {
      throw DomainError(fmt::format("topic '{}' evaluated before a session stop",
                                    topic));
    }
    if (!(s.share >= 0.0 && s.share <= 1.0) || s.duration_seconds < 0) {
      throw DomainError(fmt::format("invalid session for topic '{}'", topic));
    }
    total += static_cast<double>(s.duration_seconds) * s.share *
             curve.retention(minutes_between(s.stop_time, at));
  }
  return {std::move(topic), total, at};
}

double weighted_learning_time(const LearningHistory& history) {
  double total = 0.0;
  for (const auto& r : history.records()) {
    total += static_cast<double>(r.duration_seconds) * r.proportion;
  }
  return total;
}

ScoreMap familiarity_scores(const PersonHistories& histories, TimePoint at,
                            const RetentionParams& params) {
  const EbbinghausCurve curve(params);
  ScoreMap out;
  for (const auto& [point, history] : histories) {
    out.emplace(point, familiarity(history, at, curve).value);
  }
  return out;
}

ScoreMap relative_familiarity(const ScoreMap& scores) {
  if (scores.empty()) throw DomainError("relative familiarity of no scores");
  double sum = 0.0;
  for (const auto& [_, v] : scores) sum += v;
  const double mean = sum / static_cast<double>(scores.size());
  if (!(mean > 0.0)) {
    throw DomainError("relative familiarity undefined: mean score is zero");
  }
  ScoreMap out;
  for (const auto& [point, v] : scores) out.emplace(point, v / mean);
  return out;
}

void NormalizationConfig::validate() const {
  if (!(worker_factor > 0.0)) {
    throw ConfigError(fmt::format("worker factor {} must be positive",
                                  worker_factor));
  }
  for (const auto& [point, f] : complexity_factors) {
    if (!(f > 0.0)) {
      throw ConfigError(fmt::format(
          "complexity factor {} for '{}' must be positive", f, point));
    }
  }
}

ScoreMap normalize(const ScoreMap& scores, const NormalizationConfig& config) {
  config.validate();
  ScoreMap out;
  for (const auto& [point, v] : scores) {
    const auto it = config.complexity_factors.find(point);
    const double complexity =
        it == config.complexity_factors.end() ? 1.0 : it->second;
    out.emplace(point, v * complexity * config.worker_factor);
  }
  return out;
}

ScoreMap standardize(const ScoreMap& scores) {
  if (scores.size() < 2) {
    throw DomainError("standardizing needs at least two scores");
  }
  const double n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (const auto& [_, v] : scores) mean += v;
  mean /= n;
  double var = 0.0;
  for (const auto& [_, v] : scores) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0)) {
    throw DomainError("standardizing undefined: all scores are equal");
  }
  ScoreMap out;
  for (const auto& [point, v] : scores) out.emplace(point, (v - mean) / sd);
  return out;
}

void LogisticParams::validate() const {
  if (!points.empty() && points.size() != alphas.size()) {
    throw ConfigError(fmt::format("{} coefficients for {} points",
                                  alphas.size(), points.size()));
  }
}

double understanding_logit(std::span<const double> familiarities,
                           const LogisticParams& params) {
  params.validate();
  if (familiarities.size() != params.alphas.size()) {
    throw DomainError(fmt::format("{} familiarity values for {} coefficients",
                                  familiarities.size(), params.alphas.size()));
  }
  double theta = params.alpha0;
  for (std::size_t j = 0; j < familiarities.size(); ++j) {
    theta += params.alphas[j] * familiarities[j];
  }
  return theta;
}

double understanding_probability(double theta) {
  if (theta >= 0.0) return 1.0 / (1.0 + std::exp(-theta));
  const double e = std::exp(theta);
  return e / (1.0 + e);
}

LogisticFit fit_logistic(std::span<const LabeledSample> samples,
                         const LogisticFitOptions& options,
                         std::vector<std::string> points) {
  if (samples.empty()) throw DomainError("no samples to fit");
  const auto dims = samples.front().familiarities.size();
  for (const auto& s : samples) {
    if (s.familiarities.size() != dims) {
      throw DomainError("samples have differing numbers of features");
    }
  }
  if (!points.empty() && points.size() != dims) {
    throw ConfigError("point names do not match the feature count");
  }

  // weights[0] is the intercept.
  std::vector<double> weights(dims + 1, 0.0);
  std::vector<double> gradient(dims + 1);
  const double n = static_cast<double>(samples.size());

  LogisticFit fit;
  for (fit.iterations = 0; fit.iterations < options.max_iterations;
       ++fit.iterations) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (const auto& s : samples) {
      double theta = weights[0];
      for (std::size_t j = 0; j < dims; ++j) {
        theta += weights[j + 1] * s.familiarities[j];
      }
      const double residual =
          (s.understood ? 1.0 : 0.0) - understanding_probability(theta);
      gradient[0] += residual;
      for (std::size_t j = 0; j < dims; ++j) {
        gradient[j + 1] += residual * s.familiarities[j];
      }
    }
    double largest = 0.0;
    for (auto& g : gradient) {
      g /= n;
      largest = std::max(largest, std::abs(g));
    }
    if (largest < options.tolerance) {
      fit.converged = true;
      break;
    }
    for (std::size_t j = 0; j <= dims; ++j) {
      weights[j] += options.learning_rate * gradient[j];
    }
  }

  double ll = 0.0;
  for (const auto& s : samples) {
    double theta = weights[0];
    for (std::size_t j = 0; j < dims; ++j) {
      theta += weights[j + 1] * s.familiarities[j];
    }
    // log P(y) computed stably: -log(1 + exp(-+theta)).
    const double signed_theta = s.understood ? theta : -theta;
    ll -= signed_theta > 0 ? std::log1p(std::exp(-signed_theta))
                           : -signed_theta + std::log1p(std::exp(signed_theta));
  }
  fit.log_likelihood = ll;
  fit.params.alpha0 = weights[0];
  fit.params.alphas.assign(weights.begin() + 1, weights.end());
  fit.params.points = std::move(points);
  return fit;
}

}  // namespace kmodel
