#pragma once

#include "irtsmooth/data_model.hpp"

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace irtsmooth {

enum class Kernel
{
  gaussian,
  uniform,
  quadratic
};

std::optional<Kernel> parse_kernel(std::string_view text);
const char* to_string(Kernel kernel) noexcept;

//! Gaussian exp(-u^2/2), uniform 1{|u|<=1}, quadratic (1-u^2) 1{|u|<=1}.
double kernel_eval(Kernel kernel, double u) noexcept;

//! Default number of evaluation points.
inline constexpr std::size_t kDefaultGridSize = 51;

//! Evaluation points plus the grouped data of every item. Subject i lives in
//! bin `subject_bin[i]`; bins are the half-open intervals between midpoints
//! of consecutive points, with the topmost one closed.
struct EvaluationGrid
{
  std::vector<double> points;
  double spacing = 0.0;
  //! Whether `points` are equally spaced (relative deviation < 1e-9).
  bool uniform = true;
  std::vector<std::size_t> subject_bin;
  std::vector<double> bin_counts;
  //! Per item, a q x M_j matrix of grouped one-hot selections.
  std::vector<Eigen::MatrixXd> binned_selections;

  std::size_t size() const noexcept { return points.size(); }
};

//! q equally spaced points from min(thetas) to max(thetas). With `data`, the
//! grouped selections of every item are accumulated as well.
EvaluationGrid build_grid(std::span<const double> thetas,
                          std::size_t q,
                          const ResponseMatrix* data = nullptr);

//! Grid over user-supplied, strictly increasing evaluation points.
EvaluationGrid build_grid_from_points(std::vector<double> points,
                                      std::span<const double> thetas,
                                      const ResponseMatrix* data = nullptr);

//! Bin grouping of a subset of subjects on an existing grid (the grid points
//! and per-subject bins are reused, counts are recomputed).
EvaluationGrid regroup(const EvaluationGrid& grid,
                       std::span<const std::size_t> subjects,
                       const ResponseMatrix& subset_data);

//! 1.06 * sigma * n^(-1/5).
double rule_of_thumb_bandwidth(std::size_t n, double sigma_theta);

//! Nadaraya-Watson weights of every subject at `eval_point`; they are
//! nonnegative and sum to one. Throws on an empty kernel neighborhood.
std::vector<double> nw_weights(std::span<const double> thetas,
                               double eval_point,
                               double h,
                               Kernel kernel);

//! Exact (unbinned) estimate of the option probabilities of one item.
//! `selections` holds 1-based codes in 1..n_options.
std::vector<double> nw_estimate(std::span<const double> thetas,
                                std::span<const int> selections,
                                int n_options,
                                double eval_point,
                                double h,
                                Kernel kernel);

//! Binned estimate at grid point `point_index` from the grouped data.
std::vector<double> nw_estimate_binned(const EvaluationGrid& grid,
                                       std::size_t item,
                                       std::size_t point_index,
                                       double h,
                                       Kernel kernel);

//! Full q x M_j binned curve of one item.
Eigen::MatrixXd nw_curve_binned(const EvaluationGrid& grid,
                                std::size_t item,
                                double h,
                                Kernel kernel);

//! Full q x M_j exact curve of one item over the grid points.
Eigen::MatrixXd nw_curve_exact(std::span<const double> thetas,
                               std::span<const int> selections,
                               int n_options,
                               std::span<const double> points,
                               double h,
                               Kernel kernel);

struct CvResult
{
  double best_h = 0.0;
  //! CV statistic per candidate, in input order; +inf marks a candidate
  //! with an empty leave-one-out neighborhood.
  std::vector<double> cv_values;
};

//! Leave-one-out cross-validation over `candidates`. The minimizer is
//! returned, with the smallest h winning ties. Cost O(C n^2).
CvResult cv_bandwidth(std::span<const double> thetas,
                      std::span<const int> selections,
                      int n_options,
                      std::span<const double> candidates,
                      Kernel kernel);

//! Same statistic for every item of `data`, reusing the pairwise kernel
//! matrix of each candidate across items.
std::vector<CvResult> cv_bandwidths(std::span<const double> thetas,
                                    const ResponseMatrix& data,
                                    std::span<const double> candidates,
                                    Kernel kernel);

//! 30 log-spaced values in [0.2 h, 3 h].
std::vector<double> default_cv_candidates(double h_rot);

enum class BandwidthMode
{
  rule_of_thumb,
  cross_validation,
  fixed
};

struct BandwidthPolicy
{
  BandwidthMode mode = BandwidthMode::rule_of_thumb;
  //! For `fixed`: one value broadcast to every item, or one per item.
  std::vector<double> values;
  //! For `cross_validation`: candidate list; empty means the default set.
  std::vector<double> candidates;
};

//! Parses "rot", "cv" or a comma-separated list of positive values.
BandwidthPolicy parse_bandwidth_policy(std::string_view text);

//! One bandwidth per item of `data`.
std::vector<double> resolve_bandwidths(const BandwidthPolicy& policy,
                                       std::span<const double> thetas,
                                       const ResponseMatrix& data,
                                       double sigma_theta,
                                       Kernel kernel);

} // namespace irtsmooth
