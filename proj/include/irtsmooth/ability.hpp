#pragma once

#include "irtsmooth/data_model.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace irtsmooth {

//! Standard normal quantile. Rational approximation refined by one Halley
//! step; absolute error well below 1e-9 on (0, 1).
double normal_quantile(double p);
double normal_cdf(double x);

enum class DistributionFamily
{
  normal,
  uniform,
  logistic
};

//! Latent distribution F fixing the ability metric.
class LatentDistribution
{
public:
  //! Normal(mean, sd), Uniform(low, high), Logistic(location, scale).
  LatentDistribution(DistributionFamily family, double a, double b);

  static LatentDistribution standard_normal()
  {
    return { DistributionFamily::normal, 0.0, 1.0 };
  }
  //! Parses "normal:0,1", "uniform:0,1", "logistic:0,1" (parameters
  //! optional, defaulting to the standard form).
  static LatentDistribution parse(std::string_view text);

  DistributionFamily family() const noexcept { return family_; }
  double param_a() const noexcept { return a_; }
  double param_b() const noexcept { return b_; }
  double quantile(double p) const;
  double sigma() const;
  std::string describe() const;

private:
  DistributionFamily family_;
  double a_;
  double b_;
};

//! Per-subject summary used for ranking.
enum class RankStatistic
{
  total,
  mean,
  median
};

std::optional<RankStatistic> parse_rank_statistic(std::string_view text);

//! t_i = sum_j sum_l y_ijl x_jl. Requires a matrix without MISSING entries.
std::vector<double> total_score(const ResponseMatrix& data,
                                const ScoringScheme& scheme);

//! Ranking statistic over scored (non-nominal) items.
std::vector<double> subject_statistic(const ResponseMatrix& data,
                                      const ScoringScheme& scheme,
                                      RankStatistic stat);

//! Midranks of `values` (1-based, ties averaged).
std::vector<double> midranks(std::span<const double> values);

//! r_i = rank(S_i) / (n + 1) with midranks. When `rank_override` is given
//! its midranks replace the score-based ones.
std::vector<double> rank_subjects(
  std::span<const double> scores,
  std::optional<std::span<const double>> rank_override = std::nullopt);

std::vector<double> ranks_to_theta(std::span<const double> ranks,
                                   const LatentDistribution& dist);

struct AbilityEstimates
{
  std::vector<double> total_scores;
  std::vector<double> ranks;
  std::vector<double> thetas;
  LatentDistribution distribution = LatentDistribution::standard_normal();
};

AbilityEstimates estimate_ability(
  const ResponseMatrix& data,
  const ScoringScheme& scheme,
  const LatentDistribution& dist,
  RankStatistic stat = RankStatistic::total,
  std::optional<std::span<const double>> rank_override = std::nullopt);

} // namespace irtsmooth
