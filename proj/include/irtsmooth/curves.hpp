#pragma once

#include "irtsmooth/ability.hpp"
#include "irtsmooth/data_model.hpp"
#include "irtsmooth/kernel.hpp"

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

namespace irtsmooth {

struct ItemCurve
{
  //! q x M_j option probabilities, one row per evaluation point.
  Eigen::MatrixXd occ;
  //! q x M_j pointwise standard errors of `occ`.
  Eigen::MatrixXd std_errors;
  std::vector<double> weights;
  double bandwidth = 0.0;
};

struct CurveSet
{
  std::vector<double> points;
  Kernel kernel = Kernel::gaussian;
  std::vector<ItemCurve> items;

  std::size_t n_points() const noexcept { return points.size(); }
  std::size_t n_items() const noexcept { return items.size(); }
};

enum class Estimator
{
  binned,
  exact
};

//! OCCs and their standard errors for every item. `bandwidths` has one entry
//! per item. The binned estimator needs the grid's grouped selections.
CurveSet estimate_curves(const ResponseMatrix& data,
                         const ScoringScheme& scheme,
                         std::span<const double> thetas,
                         const EvaluationGrid& grid,
                         std::span<const double> bandwidths,
                         Kernel kernel,
                         Estimator estimator = Estimator::binned);

//! Linear interpolation of a grid curve (rows = points) at x; clamps to the
//! end points outside the grid.
std::vector<double> interpolate_row(const Eigen::MatrixXd& curve,
                                    std::span<const double> points,
                                    double x);
double interpolate(std::span<const double> values,
                   std::span<const double> points,
                   double x);

//! sqrt(sum_i w_i(t)^2 p(t_i)(1 - p(t_i))) for every grid point and option,
//! with p(t_i) interpolated from `occ`.
Eigen::MatrixXd occ_stderr(std::span<const double> thetas,
                           const Eigen::MatrixXd& occ,
                           std::span<const double> points,
                           double h,
                           Kernel kernel);

std::vector<double> expected_item_score(const Eigen::MatrixXd& occ,
                                        std::span<const double> weights);

//! Variance of the item score X_j given option probabilities `p`:
//! sum_l x_l^2 p_l (1 - p_l) - sum_l sum_{t != l} x_l x_t p_l p_t.
double item_score_variance(std::span<const double> p,
                           std::span<const double> weights);

std::vector<double> eis_stderr(std::span<const double> thetas,
                               const Eigen::MatrixXd& occ,
                               std::span<const double> weights,
                               std::span<const double> points,
                               double h,
                               Kernel kernel);

std::vector<double> expected_test_score(const CurveSet& curves);

//! Same, restricted to a subset of items.
std::vector<double> expected_test_score(const CurveSet& curves,
                                        std::span<const std::size_t> items);

//! sqrt(sum_j Var(X_j | t)) at every grid point.
std::vector<double> conditional_score_sd(const CurveSet& curves);

struct ConfidenceConfig
{
  double alpha = 0.05;
  double z = 0.0;

  static ConfidenceConfig from_alpha(double alpha);
};

struct Band
{
  std::vector<double> lower;
  std::vector<double> upper;
};

Band confidence_band(std::span<const double> estimate,
                     std::span<const double> stderr_values,
                     double z);

struct RelativeCredibility
{
  std::vector<double> curve;
  std::size_t ml_index = 0;
  double theta_ml = 0.0;
  double score_ml = 0.0;
  //! Some selected option had probability below the 1e-12 floor somewhere.
  bool floored = false;
};

//! Probability floor applied inside the log-likelihood.
inline constexpr double kLikelihoodFloor = 1e-12;

//! exp(loglik - max loglik); returns the curve and the first argmax.
std::pair<std::vector<double>, std::size_t> normalize_log_likelihood(
  std::span<const double> loglik);

//! `selections` holds one 1-based code per item; `ets` is the expected test
//! score over the same grid.
RelativeCredibility relative_credibility(const CurveSet& curves,
                                         std::span<const double> ets,
                                         std::span<const int> selections);

enum class SubjectScale
{
  observed_score,
  theta_ml,
  theta
};

//! Position of every subject on the theta axis for the chosen scale.
//! Observed scores are mapped through the inverse of the expected test score.
std::vector<double> subject_positions(const CurveSet& curves,
                                      const AbilityEstimates& ability,
                                      std::span<const double> ets,
                                      std::span<const double> theta_ml,
                                      SubjectScale scale);

//! Per item, an M_j x n matrix of option probabilities at each subject's
//! position.
std::vector<Eigen::MatrixXd> subject_occ(const CurveSet& curves,
                                         std::span<const double> positions);

struct ScoreDensity
{
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

inline constexpr std::size_t kDensityPoints = 512;

//! Gaussian KDE of the scores over kDensityPoints points spanning
//! [min - 3h, max + 3h]; h defaults to 1.06 s n^(-1/5).
ScoreDensity score_density(std::span<const double> scores,
                           std::optional<double> bandwidth = std::nullopt);

//! Product-moment correlation of each item score with the total score;
//! nullopt when either variance is zero.
std::vector<std::optional<double>> item_total_correlation(
  const ResponseMatrix& data,
  const ScoringScheme& scheme);

//! Continuous sample quantile (linear interpolation between order
//! statistics).
double sample_quantile(std::span<const double> values, double p);
std::vector<double> sample_quantiles(std::span<const double> values,
                                     std::span<const double> probs);

//! Observed mean item score of the subjects grouped in each bin; NaN for
//! empty bins.
std::vector<double> grouped_item_scores(const EvaluationGrid& grid,
                                        const ResponseMatrix& data,
                                        const ScoringScheme& scheme,
                                        std::size_t item);

} // namespace irtsmooth
