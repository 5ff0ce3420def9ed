#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace irtsmooth {

enum class TraitBand
{
  low,
  medium,
  high
};

const char* to_string(TraitBand band) noexcept;

//! Band of grid point s out of q: floor(3 s / q).
TraitBand trait_band(std::size_t s, std::size_t q);

struct SimplexTrajectory
{
  std::size_t item = 0;
  //! 0-based option indices shown at the vertices, in vertex order.
  std::vector<int> options;
  //! q x dims barycentric coordinates.
  Eigen::MatrixXd barycentric;
  //! q x (dims - 1) Cartesian coordinates.
  Eigen::MatrixXd cartesian;
  std::vector<TraitBand> bands;
};

//! Vertices of the unit-altitude triangle (dims = 3, in the plane) or regular
//! tetrahedron (dims = 4, in space), one per row.
Eigen::MatrixXd simplex_vertices(int dims);

//! Cartesian image of one barycentric point.
Eigen::VectorXd barycentric_to_cartesian(const Eigen::VectorXd& bary);

//! Distances from a Cartesian point to the faces opposite each vertex.
//! Inside the simplex they equal the barycentric coordinates.
Eigen::VectorXd face_distances(const Eigen::VectorXd& point, int dims);

//! Trajectory of one q x m_j curve. With m_j > dims the dims options of highest
//! mean probability are kept and each point is renormalized over them.
SimplexTrajectory simplex_coords(const Eigen::MatrixXd& occ,
                                 std::size_t item,
                                 int dims);

struct PcaSummary
{
  //! k x 2 item scores on the first two components.
  Eigen::MatrixXd scores;
  std::array<double, 2> explained_variance{};
  //! Items with minimum and maximum score on component 1, then component 2.
  std::array<std::size_t, 4> extreme_items{};
};

//! `eis` holds k curves over a common grid; `lower` / `upper` are the minimum
//! and maximum attainable score of each item.
PcaSummary pca_summary(const std::vector<std::vector<double>>& eis,
                       std::span<const double> lower,
                       std::span<const double> upper);

} // namespace irtsmooth
