#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kmodel/history_store.hpp"
#include "kmodel/time.hpp"

namespace kmodel {

/// Constants of the Ebbinghaus savings curve b = k / ((log10 t)^c + k).
struct RetentionParams {
  double k = 1.84;
  double c = 1.25;

  void validate() const;
};

/// Fraction of memory retained after a delay. Implementations must return
/// 1 at zero delay and be strictly decreasing.
class ForgettingCurve {
 public:
  virtual ~ForgettingCurve() = default;
  virtual double retention(double minutes_elapsed) const = 0;
};

class EbbinghausCurve final : public ForgettingCurve {
 public:
  explicit EbbinghausCurve(RetentionParams params = {});
  /// t = minutes_elapsed + 1, so the value at the end of learning is exactly 1.
  double retention(double minutes_elapsed) const override;
  const RetentionParams& params() const { return params_; }

 private:
  RetentionParams params_;
};

/// Ebbinghaus retention; throws DomainError for a negative delay.
double retention(double minutes_elapsed, const RetentionParams& params = {});

/// Calendar minutes from `from` to `to`, fractional when seconds differ.
double minutes_between(TimePoint from, TimePoint to);

struct FamiliarityScore {
  /// Knowledge point or topic id.
  std::string subject;
  double value = 0.0;
  TimePoint evaluated_at{};
};

/// F = sum over records of duration * proportion * retention(at - stop).
FamiliarityScore familiarity(const LearningHistory& history, TimePoint at,
                             const ForgettingCurve& curve);
FamiliarityScore familiarity(const LearningHistory& history, TimePoint at,
                             const RetentionParams& params = {});

/// One learning session's contribution to a topic.
struct TopicSession {
  std::int64_t duration_seconds = 0;
  /// Topic share of the session content.
  double share = 0.0;
  TimePoint stop_time{};
};

FamiliarityScore topic_familiarity(std::string topic,
                                   std::span<const TopicSession> sessions,
                                   TimePoint at,
                                   const RetentionParams& params = {});

/// Sum of duration * proportion with no forgetting; with retention held
/// constant this is what familiarity is proportional to.
double weighted_learning_time(const LearningHistory& history);

using ScoreMap = std::map<std::string, double, std::less<>>;

/// Familiarity of every history at `at`.
ScoreMap familiarity_scores(const PersonHistories& histories, TimePoint at,
                            const RetentionParams& params = {});

/// Each score divided by the mean score.
ScoreMap relative_familiarity(const ScoreMap& scores);

/// Scales for comparison across knowledge points (complexity) and across
/// people (worker factor).
struct NormalizationConfig {
  std::map<std::string, double, std::less<>> complexity_factors;
  double worker_factor = 1.0;

  void validate() const;
};

/// value * complexity_factor(point) * worker_factor; unlisted points use 1.
ScoreMap normalize(const ScoreMap& scores, const NormalizationConfig& config);

/// (value - mean) / population standard deviation.
ScoreMap standardize(const ScoreMap& scores);

/// Coefficients of the understanding model
///   theta = alpha0 + sum_j alphas[j] * F_j,   P = 1 / (1 + exp(-theta)).
/// `points` optionally names the concept behind each coefficient.
struct LogisticParams {
  double alpha0 = 0.0;
  std::vector<double> alphas;
  std::vector<std::string> points;

  void validate() const;
};

double understanding_logit(std::span<const double> familiarities,
                           const LogisticParams& params);

double understanding_probability(double theta);

struct LabeledSample {
  std::vector<double> familiarities;
  bool understood = false;
};

struct LogisticFitOptions {
  double learning_rate = 0.5;
  /// Stop when the largest gradient component falls below this.
  double tolerance = 1e-8;
  int max_iterations = 10000;
};

struct LogisticFit {
  LogisticParams params;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
};

/// Maximum-likelihood coefficients by batch gradient ascent on the mean
/// log-likelihood. Not part of the scoring model itself: a calibration aid
/// for turning labelled comprehension tests into LogisticParams.
LogisticFit fit_logistic(std::span<const LabeledSample> samples,
                         const LogisticFitOptions& options = {},
                         std::vector<std::string> points = {});

}  // namespace kmodel
