#include "irtsmooth/geometry.hpp"

#include "irtsmooth/ability.hpp"
#include "irtsmooth/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "geometry";

void check_dims(int dims, const char* op)
{
  if (dims != 3 && dims != 4)
    throw Error(ErrorKind::domain, kModule, op, "dims must be 3 or 4");
}

double correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double den = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
  return den > 0.0 ? xc.dot(yc) / den : 0.0;
}

// Flips `v` so it correlates positively with `ref`; on a zero correlation the
// largest-magnitude entry is made positive.
void orient(Eigen::Ref<Eigen::VectorXd> v, const Eigen::VectorXd& ref)
{
  const double r = correlation(v, ref);
  bool flip = r < 0.0;
  if (std::abs(r) < 1e-12) {
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    flip = v(at) < 0.0;
  }
  if (flip)
    v = -v;
}

} // namespace

const char* to_string(TraitBand band) noexcept
{
  switch (band) {
    case TraitBand::low:
      return "low";
    case TraitBand::medium:
      return "medium";
    case TraitBand::high:
      return "high";
  }
  return "?";
}

TraitBand trait_band(std::size_t s, std::size_t q)
{
  return static_cast<TraitBand>(std::min<std::size_t>(3 * s / q, 2));
}

Eigen::MatrixXd simplex_vertices(int dims)
{
  check_dims(dims, "simplex_vertices");
  if (dims == 3) {
    const double side = 2.0 / std::sqrt(3.0);
    Eigen::MatrixXd v(3, 2);
    v << 0.0, 0.0, side, 0.0, side / 2.0, 1.0;
    return v;
  }
  // Base circumradius R with R^2 = 1/2 gives edge sqrt(3/2) and height 1.
  const double r = std::sqrt(0.5);
  const double s3 = std::sqrt(3.0);
  Eigen::MatrixXd v(4, 3);
  v << r, 0.0, 0.0, -r / 2.0, r * s3 / 2.0, 0.0, -r / 2.0, -r * s3 / 2.0, 0.0,
    0.0, 0.0, 1.0;
  return v;
}

Eigen::VectorXd barycentric_to_cartesian(const Eigen::VectorXd& bary)
{
  const int dims = static_cast<int>(bary.size());
  check_dims(dims, "barycentric_to_cartesian");
  return simplex_vertices(dims).transpose() * bary;
}

Eigen::VectorXd face_distances(const Eigen::VectorXd& point, int dims)
{
  check_dims(dims, "face_distances");
  const Eigen::MatrixXd v = simplex_vertices(dims);
  Eigen::VectorXd out(dims);
  for (int i = 0; i < dims; ++i) {
    // Inward unit normal of the face opposite vertex i, through vertex j.
    const int j = (i + 1) % dims;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dims - 1);
    for (int t = 0; t < dims; ++t)
      if (t != i)
        centroid += v.row(t).transpose();
    centroid /= dims - 1;
    Eigen::VectorXd normal = v.row(i).transpose() - centroid;
    normal.normalize();
    out(i) = (point - v.row(j).transpose()).dot(normal);
  }
  return out;
}

SimplexTrajectory simplex_coords(const Eigen::MatrixXd& occ,
                                 std::size_t item,
                                 int dims)
{
  const char* op = "simplex_coords";
  check_dims(dims, op);
  const auto m = static_cast<int>(occ.cols());
  if (dims > m)
    throw Error(ErrorKind::domain, kModule, op,
                "item has " + std::to_string(m) + " options, " +
                  std::to_string(dims) + " are needed",
                "item " + std::to_string(item + 1));
  SimplexTrajectory out;
  out.item = item;
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd means = occ.colwise().mean().transpose();
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return means(x) > means(y); });
  order.resize(static_cast<std::size_t>(dims));
  std::sort(order.begin(), order.end());
  out.options = order;

  const auto q = occ.rows();
  out.barycentric.resize(q, dims);
  out.cartesian.resize(q, dims - 1);
  const Eigen::MatrixXd v = simplex_vertices(dims);
  for (Eigen::Index s = 0; s < q; ++s) {
    Eigen::VectorXd b(dims);
    for (int d = 0; d < dims; ++d)
      b(d) = std::max(occ(s, order[static_cast<std::size_t>(d)]), 0.0);
    const double total = b.sum();
    if (total > 0.0)
      b /= total;
    else
      b.setConstant(1.0 / dims);
    out.barycentric.row(s) = b.transpose();
    out.cartesian.row(s) = (v.transpose() * b).transpose();
    out.bands.push_back(
      trait_band(static_cast<std::size_t>(s), static_cast<std::size_t>(q)));
  }
  return out;
}

PcaSummary pca_summary(const std::vector<std::vector<double>>& eis,
                       std::span<const double> lower,
                       std::span<const double> upper)
{
  const char* op = "pca_summary";
  const std::size_t k = eis.size();
  if (k < 3)
    throw Error(ErrorKind::input, kModule, op, "at least three items needed");
  if (lower.size() != k || upper.size() != k)
    throw Error(ErrorKind::input, kModule, op,
                "score bounds must be given for every item");
  const std::size_t q = eis.front().size();
  if (q < 2)
    throw Error(ErrorKind::input, kModule, op,
                "at least two grid points needed");

  Eigen::MatrixXd normalized(static_cast<Eigen::Index>(k),
                             static_cast<Eigen::Index>(q));
  for (std::size_t j = 0; j < k; ++j) {
    if (eis[j].size() != q)
      throw Error(ErrorKind::input, kModule, op,
                  "curves have different lengths",
                  "item " + std::to_string(j + 1));
    const double range = upper[j] - lower[j];
    if (!(range > 0.0))
      throw Error(ErrorKind::domain, kModule, op,
                  "item has a constant score", "item " + std::to_string(j + 1));
    for (std::size_t s = 0; s < q; ++s)
      normalized(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) =
        (eis[j][s] - lower[j]) / range;
  }

  // Items are the observations; grid points are the variables.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q));
  const double centre = (static_cast<double>(k) + 1.0) / 2.0;
  std::vector<double> column(k);
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    for (std::size_t j = 0; j < k; ++j)
      column[j] = normalized(static_cast<Eigen::Index>(j), s);
    const auto r = midranks(column);
    for (std::size_t j = 0; j < k; ++j)
      x(static_cast<Eigen::Index>(j), s) = r[j] - centre;
  }

  const Eigen::MatrixXd gram = x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::degenerate, kModule, op,
                "eigen-decomposition failed");
  // Eigen sorts ascending.
  const Eigen::VectorXd lambda = solver.eigenvalues();
  const Eigen::MatrixXd vectors = solver.eigenvectors();
  const auto last = static_cast<Eigen::Index>(k) - 1;

  PcaSummary out;
  out.scores.resize(static_cast<Eigen::Index>(k), 2);
  for (int c = 0; c < 2; ++c) {
    const double l = std::max(lambda(last - c), 0.0);
    out.scores.col(c) = vectors.col(last - c) * std::sqrt(l);
    out.explained_variance[static_cast<std::size_t>(c)] =
      l / static_cast<double>(k - 1);
  }

  Eigen::VectorXd difficulty(static_cast<Eigen::Index>(k));
  Eigen::VectorXd slope(static_cast<Eigen::Index>(k));
  const double smean = (static_cast<double>(q) - 1.0) / 2.0;
  double sxx = 0.0;
  for (std::size_t s = 0; s < q; ++s)
    sxx += (static_cast<double>(s) - smean) * (static_cast<double>(s) - smean);
  for (Eigen::Index j = 0; j < difficulty.size(); ++j) {
    const double mean = normalized.row(j).mean();
    difficulty(j) = 1.0 - mean;
    double sxy = 0.0;
    for (Eigen::Index s = 0; s < normalized.cols(); ++s)
      sxy += (static_cast<double>(s) - smean) * (normalized(j, s) - mean);
    slope(j) = sxy / sxx;
  }
  orient(out.scores.col(0), difficulty);
  orient(out.scores.col(1), slope);

  for (int c = 0; c < 2; ++c) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    out.scores.col(c).minCoeff(&lo);
    out.scores.col(c).maxCoeff(&hi);
    out.extreme_items[static_cast<std::size_t>(2 * c)] =
      static_cast<std::size_t>(lo);
    out.extreme_items[static_cast<std::size_t>(2 * c + 1)] =
      static_cast<std::size_t>(hi);
  }
  return out;
}

} // namespace irtsmooth
