#include "irtsmooth/kernel.hpp"

#include "irtsmooth/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "kernel-core";

std::string point_label(double x)
{
  return "evaluation point " + std::to_string(x);
}

// Kernel values K(u_r) for the given squared arguments u_r^2. The Gaussian
// is rescaled by exp(min u^2 / 2), which cancels in every NW ratio and keeps
// the weights from underflowing when h is small.
void kernel_values(Kernel kernel,
                   std::span<const double> u2,
                   std::span<const char> active,
                   std::span<double> out)
{
  if (kernel == Kernel::gaussian) {
    double shift = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < u2.size(); ++r)
      if (active.empty() || active[r])
        shift = std::min(shift, u2[r]);
    if (!std::isfinite(shift))
      shift = 0.0;
    for (std::size_t r = 0; r < u2.size(); ++r)
      out[r] = std::exp(-0.5 * (u2[r] - shift));
    return;
  }
  for (std::size_t r = 0; r < u2.size(); ++r) {
    if (u2[r] > 1.0)
      out[r] = 0.0;
    else
      out[r] = kernel == Kernel::uniform ? 1.0 : 1.0 - u2[r];
  }
}

void check_bandwidth(double h, const char* op)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::domain, kModule, op,
                "bandwidth must be finite and > 0");
}

void assign_bins(EvaluationGrid& grid,
                 std::span<const double> thetas,
                 const ResponseMatrix* data)
{
  const std::size_t q = grid.points.size();
  std::vector<double> bounds(q - 1);
  for (std::size_t s = 0; s + 1 < q; ++s)
    bounds[s] = 0.5 * (grid.points[s] + grid.points[s + 1]);
  grid.subject_bin.resize(thetas.size());
  grid.bin_counts.assign(q, 0.0);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const auto s = static_cast<std::size_t>(
      std::upper_bound(bounds.begin(), bounds.end(), thetas[i]) -
      bounds.begin());
    grid.subject_bin[i] = s;
    grid.bin_counts[s] += 1.0;
  }
  grid.binned_selections.clear();
  if (!data)
    return;
  if (data->n_subjects() != thetas.size())
    throw Error(ErrorKind::input, kModule, "build_grid",
                "data and abilities disagree on the subject count");
  grid.binned_selections.reserve(data->n_items());
  for (std::size_t j = 0; j < data->n_items(); ++j) {
    Eigen::MatrixXd binned =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q),
                            data->total_options(j));
    const auto col = data->column(j);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (col[i] == kMissing)
        throw Error(ErrorKind::input, kModule, "build_grid",
                    "missing selection; apply a missing policy first");
      binned(static_cast<Eigen::Index>(grid.subject_bin[i]), col[i] - 1) +=
        1.0;
    }
    grid.binned_selections.push_back(std::move(binned));
  }
}

} // namespace

std::optional<Kernel> parse_kernel(std::string_view text)
{
  if (text == "gaussian" || text == "normal")
    return Kernel::gaussian;
  if (text == "uniform")
    return Kernel::uniform;
  if (text == "quadratic")
    return Kernel::quadratic;
  return std::nullopt;
}

const char* to_string(Kernel kernel) noexcept
{
  switch (kernel) {
    case Kernel::gaussian:
      return "gaussian";
    case Kernel::uniform:
      return "uniform";
    case Kernel::quadratic:
      return "quadratic";
  }
  return "?";
}

double kernel_eval(Kernel kernel, double u) noexcept
{
  switch (kernel) {
    case Kernel::gaussian:
      return std::exp(-0.5 * u * u);
    case Kernel::uniform:
      return std::abs(u) <= 1.0 ? 1.0 : 0.0;
    case Kernel::quadratic:
      return std::abs(u) <= 1.0 ? 1.0 - u * u : 0.0;
  }
  return 0.0;
}

EvaluationGrid build_grid(std::span<const double> thetas,
                          std::size_t q,
                          const ResponseMatrix* data)
{
  const char* op = "build_grid";
  if (q < 2)
    throw Error(ErrorKind::input, kModule, op,
                "at least two evaluation points are required");
  if (thetas.empty())
    throw Error(ErrorKind::input, kModule, op, "no abilities");
  const auto [lo_it, hi_it] = std::minmax_element(thetas.begin(), thetas.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo))
    throw Error(ErrorKind::degenerate, kModule, op,
                "all abilities are equal; the grid has zero width");
  EvaluationGrid grid;
  grid.spacing = (hi - lo) / static_cast<double>(q - 1);
  grid.points.resize(q);
  for (std::size_t s = 0; s < q; ++s)
    grid.points[s] = lo + static_cast<double>(s) * grid.spacing;
  grid.points.back() = hi;
  grid.uniform = true;
  assign_bins(grid, thetas, data);
  return grid;
}

EvaluationGrid build_grid_from_points(std::vector<double> points,
                                      std::span<const double> thetas,
                                      const ResponseMatrix* data)
{
  const char* op = "build_grid";
  if (points.size() < 2)
    throw Error(ErrorKind::input, kModule, op,
                "at least two evaluation points are required");
  for (std::size_t s = 1; s < points.size(); ++s)
    if (!(points[s] > points[s - 1]))
      throw Error(ErrorKind::input, kModule, op,
                  "evaluation points must be strictly increasing",
                  "point " + std::to_string(s + 1));
  EvaluationGrid grid;
  grid.points = std::move(points);
  const std::size_t q = grid.points.size();
  grid.spacing =
    (grid.points.back() - grid.points.front()) / static_cast<double>(q - 1);
  grid.uniform = true;
  for (std::size_t s = 1; s < q; ++s) {
    const double d = grid.points[s] - grid.points[s - 1];
    if (std::abs(d - grid.spacing) > 1e-9 * grid.spacing)
      grid.uniform = false;
  }
  assign_bins(grid, thetas, data);
  return grid;
}

EvaluationGrid regroup(const EvaluationGrid& grid,
                       std::span<const std::size_t> subjects,
                       const ResponseMatrix& subset_data)
{
  if (subset_data.n_subjects() != subjects.size())
    throw Error(ErrorKind::input, kModule, "regroup",
                "subset data and subject list disagree");
  EvaluationGrid out;
  out.points = grid.points;
  out.spacing = grid.spacing;
  out.uniform = grid.uniform;
  const std::size_t q = grid.points.size();
  out.subject_bin.resize(subjects.size());
  out.bin_counts.assign(q, 0.0);
  for (std::size_t u = 0; u < subjects.size(); ++u) {
    out.subject_bin[u] = grid.subject_bin.at(subjects[u]);
    out.bin_counts[out.subject_bin[u]] += 1.0;
  }
  for (std::size_t j = 0; j < subset_data.n_items(); ++j) {
    Eigen::MatrixXd binned = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(q), subset_data.total_options(j));
    const auto col = subset_data.column(j);
    for (std::size_t u = 0; u < subjects.size(); ++u)
      binned(static_cast<Eigen::Index>(out.subject_bin[u]), col[u] - 1) += 1.0;
    out.binned_selections.push_back(std::move(binned));
  }
  return out;
}

double rule_of_thumb_bandwidth(std::size_t n, double sigma_theta)
{
  if (n < 2)
    throw Error(ErrorKind::input, kModule, "rule_of_thumb_bandwidth",
                "at least two subjects are required");
  if (!(sigma_theta > 0.0))
    throw Error(ErrorKind::domain, kModule, "rule_of_thumb_bandwidth",
                "sigma must be > 0");
  return 1.06 * sigma_theta * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> nw_weights(std::span<const double> thetas,
                               double eval_point,
                               double h,
                               Kernel kernel)
{
  check_bandwidth(h, "nw_weights");
  const std::size_t n = thetas.size();
  std::vector<double> u2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (eval_point - thetas[i]) / h;
    u2[i] = u * u;
  }
  std::vector<double> w(n);
  kernel_values(kernel, u2, {}, w);
  double total = 0.0;
  for (double x : w)
    total += x;
  if (!(total > 0.0))
    throw Error(ErrorKind::empty_neighborhood, kModule, "nw_estimate",
                "no subject has positive kernel weight",
                point_label(eval_point));
  for (double& x : w)
    x /= total;
  return w;
}

std::vector<double> nw_estimate(std::span<const double> thetas,
                                std::span<const int> selections,
                                int n_options,
                                double eval_point,
                                double h,
                                Kernel kernel)
{
  if (thetas.size() != selections.size())
    throw Error(ErrorKind::input, kModule, "nw_estimate",
                "abilities and selections differ in length");
  const auto w = nw_weights(thetas, eval_point, h, kernel);
  std::vector<double> p(static_cast<std::size_t>(n_options), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    p[static_cast<std::size_t>(selections[i] - 1)] += w[i];
  for (double& v : p)
    v = std::min(v, 1.0);
  return p;
}

std::vector<double> nw_estimate_binned(const EvaluationGrid& grid,
                                       std::size_t item,
                                       std::size_t point_index,
                                       double h,
                                       Kernel kernel)
{
  const char* op = "nw_estimate_binned";
  check_bandwidth(h, op);
  if (item >= grid.binned_selections.size())
    throw Error(ErrorKind::input, kModule, op,
                "grid holds no grouped data for item " +
                  std::to_string(item + 1));
  if (point_index >= grid.size())
    throw Error(ErrorKind::input, kModule, op, "grid index out of range");
  const std::size_t q = grid.size();
  const double x = grid.points[point_index];
  std::vector<double> u2(q);
  std::vector<char> occupied(q);
  for (std::size_t s = 0; s < q; ++s) {
    const double u = (x - grid.points[s]) / h;
    u2[s] = u * u;
    occupied[s] = grid.bin_counts[s] > 0.0;
  }
  std::vector<double> k(q);
  kernel_values(kernel, u2, occupied, k);
  const auto& binned = grid.binned_selections[item];
  const auto m = static_cast<std::size_t>(binned.cols());
  std::vector<double> num(m, 0.0);
  double den = 0.0;
  for (std::size_t s = 0; s < q; ++s) {
    if (k[s] == 0.0 || !occupied[s])
      continue;
    den += k[s] * grid.bin_counts[s];
    for (std::size_t l = 0; l < m; ++l)
      num[l] += k[s] * binned(static_cast<Eigen::Index>(s),
                              static_cast<Eigen::Index>(l));
  }
  if (!(den > 0.0))
    throw Error(ErrorKind::empty_neighborhood, kModule, op,
                "no grouped subject has positive kernel weight",
                point_label(x));
  for (double& v : num)
    v = std::min(v / den, 1.0);
  return num;
}

Eigen::MatrixXd nw_curve_binned(const EvaluationGrid& grid,
                                std::size_t item,
                                double h,
                                Kernel kernel)
{
  if (item >= grid.binned_selections.size())
    throw Error(ErrorKind::input, kModule, "nw_estimate_binned",
                "grid holds no grouped data for item " +
                  std::to_string(item + 1));
  const auto m = grid.binned_selections[item].cols();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(grid.size()), m);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const auto p = nw_estimate_binned(grid, item, s, h, kernel);
    for (Eigen::Index l = 0; l < m; ++l)
      out(static_cast<Eigen::Index>(s), l) = p[static_cast<std::size_t>(l)];
  }
  return out;
}

Eigen::MatrixXd nw_curve_exact(std::span<const double> thetas,
                               std::span<const int> selections,
                               int n_options,
                               std::span<const double> points,
                               double h,
                               Kernel kernel)
{
  Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), n_options);
  for (std::size_t s = 0; s < points.size(); ++s) {
    const auto p =
      nw_estimate(thetas, selections, n_options, points[s], h, kernel);
    for (int l = 0; l < n_options; ++l)
      out(static_cast<Eigen::Index>(s), l) = p[static_cast<std::size_t>(l)];
  }
  return out;
}

namespace {

// Leave-one-out kernel matrix for one bandwidth: row i holds K((t_i-t_r)/h)
// for r != i (zero on the diagonal), rescaled per row for the Gaussian.
Eigen::MatrixXd loo_kernel_matrix(std::span<const double> thetas,
                                  double h,
                                  Kernel kernel)
{
  const std::size_t n = thetas.size();
  Eigen::MatrixXd km(static_cast<Eigen::Index>(n),
                     static_cast<Eigen::Index>(n));
  std::vector<double> u2(n), row(n);
  std::vector<char> active(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      const double u = (thetas[i] - thetas[r]) / h;
      u2[r] = u * u;
      active[r] = r != i;
    }
    kernel_values(kernel, u2, active, row);
    row[i] = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      km(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = row[r];
  }
  return km;
}

double cv_statistic(const Eigen::MatrixXd& km,
                    std::span<const int> selections,
                    int n_options)
{
  const std::size_t n = selections.size();
  std::vector<double> num(static_cast<std::size_t>(n_options));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(num.begin(), num.end(), 0.0);
    double den = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double k = km(static_cast<Eigen::Index>(i),
                          static_cast<Eigen::Index>(r));
      den += k;
      num[static_cast<std::size_t>(selections[r] - 1)] += k;
    }
    if (!(den > 0.0))
      return std::numeric_limits<double>::infinity();
    const auto own = static_cast<std::size_t>(selections[i] - 1);
    double sq = 0.0;
    for (std::size_t l = 0; l < num.size(); ++l) {
      const double diff = (l == own ? 1.0 : 0.0) - num[l] / den;
      sq += diff * diff;
    }
    total += sq;
  }
  return total / static_cast<double>(n);
}

void check_cv_inputs(std::size_t n, std::span<const double> candidates)
{
  const char* op = "cv_bandwidth";
  if (candidates.empty())
    throw Error(ErrorKind::input, kModule, op, "no candidate bandwidths");
  for (double h : candidates)
    check_bandwidth(h, op);
  if (n < 3)
    throw Error(ErrorKind::input, kModule, op,
                "cross-validation needs at least three subjects");
}

double pick_best(std::span<const double> candidates,
                 std::span<const double> cv,
                 const std::string& where)
{
  std::size_t best = candidates.size();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!std::isfinite(cv[c]))
      continue;
    if (best == candidates.size() || cv[c] < cv[best] ||
        (cv[c] == cv[best] && candidates[c] < candidates[best]))
      best = c;
  }
  if (best == candidates.size())
    throw Error(ErrorKind::empty_neighborhood, kModule, "cv_bandwidth",
                "every candidate bandwidth leaves an empty neighborhood",
                where);
  return candidates[best];
}

} // namespace

CvResult cv_bandwidth(std::span<const double> thetas,
                      std::span<const int> selections,
                      int n_options,
                      std::span<const double> candidates,
                      Kernel kernel)
{
  check_cv_inputs(thetas.size(), candidates);
  if (thetas.size() != selections.size())
    throw Error(ErrorKind::input, kModule, "cv_bandwidth",
                "abilities and selections differ in length");
  CvResult out;
  out.cv_values.reserve(candidates.size());
  for (double h : candidates)
    out.cv_values.push_back(
      cv_statistic(loo_kernel_matrix(thetas, h, kernel), selections,
                   n_options));
  out.best_h = pick_best(candidates, out.cv_values, "");
  return out;
}

std::vector<CvResult> cv_bandwidths(std::span<const double> thetas,
                                    const ResponseMatrix& data,
                                    std::span<const double> candidates,
                                    Kernel kernel)
{
  check_cv_inputs(thetas.size(), candidates);
  const std::size_t k = data.n_items();
  std::vector<CvResult> out(k);
  for (auto& r : out)
    r.cv_values.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto km = loo_kernel_matrix(thetas, candidates[c], kernel);
    for (std::size_t j = 0; j < k; ++j)
      out[j].cv_values[c] =
        cv_statistic(km, data.column(j), data.total_options(j));
  }
  for (std::size_t j = 0; j < k; ++j)
    out[j].best_h = pick_best(candidates, out[j].cv_values,
                              "item '" + data.item_labels()[j] + "'");
  return out;
}

std::vector<double> default_cv_candidates(double h_rot)
{
  constexpr int count = 30;
  const double lo = std::log(0.2 * h_rot);
  const double hi = std::log(3.0 * h_rot);
  std::vector<double> out(count);
  for (int c = 0; c < count; ++c)
    out[static_cast<std::size_t>(c)] =
      std::exp(lo + (hi - lo) * c / (count - 1));
  return out;
}

BandwidthPolicy parse_bandwidth_policy(std::string_view text)
{
  BandwidthPolicy out;
  if (text == "rot" || text == "ruleofthumb")
    return out;
  if (text == "cv" || text == "CV") {
    out.mode = BandwidthMode::cross_validation;
    return out;
  }
  out.mode = BandwidthMode::fixed;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos)
      end = text.size();
    const auto token = text.substr(start, end - start);
    double v = 0.0;
    auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} ||
        ptr != token.data() + token.size())
      throw Error(ErrorKind::input, kModule, "parse_bandwidth_policy",
                  "expected 'rot', 'cv' or a list of numbers, got '" +
                    std::string(token) + "'");
    check_bandwidth(v, "parse_bandwidth_policy");
    out.values.push_back(v);
    start = end + 1;
  }
  return out;
}

std::vector<double> resolve_bandwidths(const BandwidthPolicy& policy,
                                       std::span<const double> thetas,
                                       const ResponseMatrix& data,
                                       double sigma_theta,
                                       Kernel kernel)
{
  const std::size_t k = data.n_items();
  switch (policy.mode) {
    case BandwidthMode::rule_of_thumb:
      return std::vector<double>(
        k, rule_of_thumb_bandwidth(thetas.size(), sigma_theta));
    case BandwidthMode::fixed: {
      if (policy.values.size() == 1)
        return std::vector<double>(k, policy.values.front());
      if (policy.values.size() != k)
        throw Error(ErrorKind::input, kModule, "resolve_bandwidths",
                    "got " + std::to_string(policy.values.size()) +
                      " bandwidths for " + std::to_string(k) + " items");
      for (double h : policy.values)
        check_bandwidth(h, "resolve_bandwidths");
      return policy.values;
    }
    case BandwidthMode::cross_validation: {
      const auto candidates =
        policy.candidates.empty()
          ? default_cv_candidates(
              rule_of_thumb_bandwidth(thetas.size(), sigma_theta))
          : policy.candidates;
      const auto results = cv_bandwidths(thetas, data, candidates, kernel);
      std::vector<double> out;
      out.reserve(k);
      for (const auto& r : results)
        out.push_back(r.best_h);
      return out;
    }
  }
  return {};
}

} // namespace irtsmooth
