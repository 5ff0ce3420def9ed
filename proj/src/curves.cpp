#include "irtsmooth/curves.hpp"

#include "irtsmooth/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "curves";

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r)
{
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

// Segment index s and fraction f with x = (1 - f) points[s] + f points[s+1].
std::pair<std::size_t, double> locate(std::span<const double> points, double x)
{
  const std::size_t q = points.size();
  if (x <= points.front())
    return { 0, 0.0 };
  if (x >= points.back())
    return { q - 2, 1.0 };
  const auto it = std::upper_bound(points.begin(), points.end(), x);
  const auto s = static_cast<std::size_t>(it - points.begin()) - 1;
  const double f = (x - points[s]) / (points[s + 1] - points[s]);
  return { s, f };
}

} // namespace

std::vector<double> interpolate_row(const Eigen::MatrixXd& curve,
                                    std::span<const double> points,
                                    double x)
{
  const auto [s, f] = locate(points, x);
  const auto r = static_cast<Eigen::Index>(s);
  std::vector<double> out(static_cast<std::size_t>(curve.cols()));
  for (Eigen::Index c = 0; c < curve.cols(); ++c) {
    const double a = curve(r, c);
    const double b = curve(r + 1, c);
    out[static_cast<std::size_t>(c)] = f == 0.0 ? a : f == 1.0 ? b : a + f * (b - a);
  }
  return out;
}

double interpolate(std::span<const double> values,
                   std::span<const double> points,
                   double x)
{
  const auto [s, f] = locate(points, x);
  if (f == 0.0)
    return values[s];
  if (f == 1.0)
    return values[s + 1];
  return values[s] + f * (values[s + 1] - values[s]);
}

Eigen::MatrixXd occ_stderr(std::span<const double> thetas,
                           const Eigen::MatrixXd& occ,
                           std::span<const double> points,
                           double h,
                           Kernel kernel)
{
  const std::size_t n = thetas.size();
  const auto m = occ.cols();
  // Bernoulli variance of every option at every subject.
  Eigen::MatrixXd var(static_cast<Eigen::Index>(n), m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = interpolate_row(occ, points, thetas[i]);
    for (Eigen::Index l = 0; l < m; ++l) {
      const double pl = p[static_cast<std::size_t>(l)];
      var(static_cast<Eigen::Index>(i), l) = pl * (1.0 - pl);
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), m);
  for (std::size_t s = 0; s < points.size(); ++s) {
    const auto w = nw_weights(thetas, points[s], h, kernel);
    for (Eigen::Index l = 0; l < m; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * w[i] * var(static_cast<Eigen::Index>(i), l);
      out(static_cast<Eigen::Index>(s), l) = std::sqrt(std::max(acc, 0.0));
    }
  }
  return out;
}

std::vector<double> expected_item_score(const Eigen::MatrixXd& occ,
                                        std::span<const double> weights)
{
  std::vector<double> out(static_cast<std::size_t>(occ.rows()), 0.0);
  for (Eigen::Index s = 0; s < occ.rows(); ++s) {
    double acc = 0.0;
    for (Eigen::Index l = 0; l < occ.cols(); ++l)
      acc += weights[static_cast<std::size_t>(l)] * occ(s, l);
    out[static_cast<std::size_t>(s)] = acc;
  }
  return out;
}

double item_score_variance(std::span<const double> p,
                           std::span<const double> weights)
{
  // Indicators of one item are mutually exclusive, so the cross terms are
  // -x_l x_t p_l p_t and the expression collapses to E[X^2] - E[X]^2.
  double second = 0.0;
  double first = 0.0;
  for (std::size_t l = 0; l < p.size(); ++l) {
    second += weights[l] * weights[l] * p[l];
    first += weights[l] * p[l];
  }
  return std::max(second - first * first, 0.0);
}

std::vector<double> eis_stderr(std::span<const double> thetas,
                               const Eigen::MatrixXd& occ,
                               std::span<const double> weights,
                               std::span<const double> points,
                               double h,
                               Kernel kernel)
{
  const std::size_t n = thetas.size();
  std::vector<double> var(n);
  for (std::size_t i = 0; i < n; ++i)
    var[i] =
      item_score_variance(interpolate_row(occ, points, thetas[i]), weights);
  std::vector<double> out(points.size());
  for (std::size_t s = 0; s < points.size(); ++s) {
    const auto w = nw_weights(thetas, points[s], h, kernel);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += w[i] * w[i] * var[i];
    out[s] = std::sqrt(acc);
  }
  return out;
}

CurveSet estimate_curves(const ResponseMatrix& data,
                         const ScoringScheme& scheme,
                         std::span<const double> thetas,
                         const EvaluationGrid& grid,
                         std::span<const double> bandwidths,
                         Kernel kernel,
                         Estimator estimator)
{
  const char* op = "estimate_curves";
  const std::size_t k = data.n_items();
  if (bandwidths.size() != k)
    throw Error(ErrorKind::input, kModule, op,
                "expected one bandwidth per item");
  if (scheme.n_items() != k)
    throw Error(ErrorKind::input, kModule, op,
                "scoring scheme and data disagree on the item count");
  if (thetas.size() != data.n_subjects())
    throw Error(ErrorKind::input, kModule, op,
                "abilities and data disagree on the subject count");
  CurveSet out;
  out.points = grid.points;
  out.kernel = kernel;
  out.items.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& item = out.items[j];
    item.bandwidth = bandwidths[j];
    item.weights = scheme.weights[j];
    if (static_cast<int>(item.weights.size()) != data.total_options(j))
      throw Error(ErrorKind::input, kModule, op,
                  "weight count differs from option count",
                  "item '" + data.item_labels()[j] + "'");
    item.occ = estimator == Estimator::binned
                 ? nw_curve_binned(grid, j, bandwidths[j], kernel)
                 : nw_curve_exact(thetas, data.column(j),
                                  data.total_options(j), grid.points,
                                  bandwidths[j], kernel);
    item.std_errors =
      occ_stderr(thetas, item.occ, grid.points, bandwidths[j], kernel);
  }
  return out;
}

std::vector<double> expected_test_score(const CurveSet& curves)
{
  std::vector<std::size_t> all(curves.n_items());
  std::iota(all.begin(), all.end(), std::size_t{ 0 });
  return expected_test_score(curves, all);
}

std::vector<double> expected_test_score(const CurveSet& curves,
                                        std::span<const std::size_t> items)
{
  std::vector<double> out(curves.n_points(), 0.0);
  for (auto j : items) {
    const auto eis =
      expected_item_score(curves.items[j].occ, curves.items[j].weights);
    for (std::size_t s = 0; s < out.size(); ++s)
      out[s] += eis[s];
  }
  return out;
}

std::vector<double> conditional_score_sd(const CurveSet& curves)
{
  std::vector<double> out(curves.n_points(), 0.0);
  for (const auto& item : curves.items)
    for (std::size_t s = 0; s < out.size(); ++s)
      out[s] += item_score_variance(
        row_of(item.occ, static_cast<Eigen::Index>(s)), item.weights);
  for (double& v : out)
    v = std::sqrt(v);
  return out;
}

ConfidenceConfig ConfidenceConfig::from_alpha(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::domain, kModule, "confidence",
                "alpha must lie in (0, 1)");
  return { alpha, normal_quantile(1.0 - alpha / 2.0) };
}

Band confidence_band(std::span<const double> estimate,
                     std::span<const double> stderr_values,
                     double z)
{
  Band out;
  out.lower.resize(estimate.size());
  out.upper.resize(estimate.size());
  for (std::size_t s = 0; s < estimate.size(); ++s) {
    const double arm = z * stderr_values[s];
    out.lower[s] = estimate[s] - arm;
    out.upper[s] = estimate[s] + arm;
  }
  return out;
}

std::pair<std::vector<double>, std::size_t> normalize_log_likelihood(
  std::span<const double> loglik)
{
  const auto it = std::max_element(loglik.begin(), loglik.end());
  const double top = *it;
  std::vector<double> curve(loglik.size());
  for (std::size_t s = 0; s < loglik.size(); ++s)
    curve[s] = std::exp(loglik[s] - top);
  return { std::move(curve),
           static_cast<std::size_t>(it - loglik.begin()) };
}

RelativeCredibility relative_credibility(const CurveSet& curves,
                                         std::span<const double> ets,
                                         std::span<const int> selections)
{
  const char* op = "relative_credibility";
  if (selections.size() != curves.n_items())
    throw Error(ErrorKind::input, kModule, op,
                "expected one selection per item");
  const std::size_t q = curves.n_points();
  const double log_floor = std::log(kLikelihoodFloor);
  std::vector<double> loglik(q, 0.0);
  RelativeCredibility out;
  for (std::size_t j = 0; j < selections.size(); ++j) {
    const auto& occ = curves.items[j].occ;
    const int code = selections[j];
    if (code < 1 || code > occ.cols())
      throw Error(ErrorKind::domain, kModule, op,
                  "selection " + std::to_string(code) + " outside the item",
                  "item " + std::to_string(j + 1));
    const auto col = static_cast<Eigen::Index>(code - 1);
    if (occ.col(col).maxCoeff() <= 0.0)
      throw Error(ErrorKind::degenerate, kModule, op,
                  "selected option has zero probability on the whole grid",
                  "item " + std::to_string(j + 1));
    for (std::size_t s = 0; s < q; ++s) {
      const double p = occ(static_cast<Eigen::Index>(s), col);
      if (p < kLikelihoodFloor) {
        out.floored = true;
        loglik[s] += log_floor;
      } else {
        loglik[s] += std::log(p);
      }
    }
  }
  auto [curve, idx] = normalize_log_likelihood(loglik);
  out.curve = std::move(curve);
  out.ml_index = idx;
  out.theta_ml = curves.points[idx];
  out.score_ml = ets[idx];
  return out;
}

std::vector<double> subject_positions(const CurveSet& curves,
                                      const AbilityEstimates& ability,
                                      std::span<const double> ets,
                                      std::span<const double> theta_ml,
                                      SubjectScale scale)
{
  const auto& pts = curves.points;
  switch (scale) {
    case SubjectScale::theta:
      return ability.thetas;
    case SubjectScale::theta_ml:
      return { theta_ml.begin(), theta_ml.end() };
    case SubjectScale::observed_score:
      break;
  }
  std::vector<double> out(ability.total_scores.size());
  const auto [lo, hi] = std::minmax_element(ets.begin(), ets.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = ability.total_scores[i];
    if (t <= *lo) {
      out[i] = pts[static_cast<std::size_t>(lo - ets.begin())];
      continue;
    }
    if (t >= *hi) {
      out[i] = pts[static_cast<std::size_t>(hi - ets.begin())];
      continue;
    }
    // First crossing of the (usually increasing) expected test score.
    out[i] = pts.back();
    for (std::size_t s = 0; s + 1 < ets.size(); ++s) {
      const double a = ets[s];
      const double b = ets[s + 1];
      if ((t >= a && t <= b) || (t <= a && t >= b)) {
        const double f = b == a ? 0.0 : (t - a) / (b - a);
        out[i] = pts[s] + f * (pts[s + 1] - pts[s]);
        break;
      }
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> subject_occ(const CurveSet& curves,
                                         std::span<const double> positions)
{
  std::vector<Eigen::MatrixXd> out;
  out.reserve(curves.n_items());
  for (const auto& item : curves.items) {
    Eigen::MatrixXd m(item.occ.cols(),
                      static_cast<Eigen::Index>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const auto p = interpolate_row(item.occ, curves.points, positions[i]);
      for (Eigen::Index l = 0; l < m.rows(); ++l)
        m(l, static_cast<Eigen::Index>(i)) = p[static_cast<std::size_t>(l)];
    }
    out.push_back(std::move(m));
  }
  return out;
}

ScoreDensity score_density(std::span<const double> scores,
                           std::optional<double> bandwidth)
{
  const char* op = "score_density";
  const std::size_t n = scores.size();
  if (n < 2)
    throw Error(ErrorKind::input, kModule, op,
                "at least two scores are required");
  const double mean =
    std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : scores)
    ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0))
    throw Error(ErrorKind::degenerate, kModule, op,
                "scores have zero variance");
  ScoreDensity out;
  out.bandwidth =
    bandwidth ? *bandwidth : 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  if (!(out.bandwidth > 0.0))
    throw Error(ErrorKind::domain, kModule, op, "bandwidth must be > 0");
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double from = *lo - 3.0 * out.bandwidth;
  const double to = *hi + 3.0 * out.bandwidth;
  const double step = (to - from) / static_cast<double>(kDensityPoints - 1);
  const double norm =
    1.0 / (static_cast<double>(n) * out.bandwidth *
           std::sqrt(2.0 * std::numbers::pi));
  out.x.resize(kDensityPoints);
  out.density.resize(kDensityPoints);
  for (std::size_t g = 0; g < kDensityPoints; ++g) {
    const double x = from + static_cast<double>(g) * step;
    double acc = 0.0;
    for (double t : scores) {
      const double u = (x - t) / out.bandwidth;
      acc += std::exp(-0.5 * u * u);
    }
    out.x[g] = x;
    out.density[g] = acc * norm;
  }
  return out;
}

std::vector<std::optional<double>> item_total_correlation(
  const ResponseMatrix& data,
  const ScoringScheme& scheme)
{
  const auto total = total_score(data, scheme);
  const std::size_t n = data.n_subjects();
  const double tmean =
    std::accumulate(total.begin(), total.end(), 0.0) / static_cast<double>(n);
  double tss = 0.0;
  for (double t : total)
    tss += (t - tmean) * (t - tmean);
  std::vector<std::optional<double>> out(data.n_items());
  std::vector<double> x(n);
  for (std::size_t j = 0; j < data.n_items(); ++j) {
    const auto col = data.column(j);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = scheme.weight(j, col[i]);
    const double xmean =
      std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double xss = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xss += (x[i] - xmean) * (x[i] - xmean);
      cross += (x[i] - xmean) * (total[i] - tmean);
    }
    if (xss > 0.0 && tss > 0.0)
      out[j] = cross / std::sqrt(xss * tss);
  }
  return out;
}

double sample_quantile(std::span<const double> values, double p)
{
  if (values.empty())
    throw Error(ErrorKind::input, kModule, "sample_quantile", "no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return f == 0.0 ? v[lo] : v[lo] + f * (v[hi] - v[lo]);
}

std::vector<double> sample_quantiles(std::span<const double> values,
                                     std::span<const double> probs)
{
  if (values.empty())
    throw Error(ErrorKind::input, kModule, "sample_quantile", "no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double f = pos - static_cast<double>(lo);
    out.push_back(f == 0.0 ? v[lo] : v[lo] + f * (v[hi] - v[lo]));
  }
  return out;
}

std::vector<double> grouped_item_scores(const EvaluationGrid& grid,
                                        const ResponseMatrix& data,
                                        const ScoringScheme& scheme,
                                        std::size_t item)
{
  const std::size_t q = grid.size();
  std::vector<double> sum(q, 0.0);
  const auto col = data.column(item);
  for (std::size_t i = 0; i < col.size(); ++i)
    sum[grid.subject_bin[i]] += scheme.weight(item, col[i]);
  for (std::size_t s = 0; s < q; ++s)
    sum[s] = grid.bin_counts[s] > 0.0
               ? sum[s] / grid.bin_counts[s]
               : std::numeric_limits<double>::quiet_NaN();
  return sum;
}

} // namespace irtsmooth
