#pragma once

#include "irtsmooth/ability.hpp"
#include "irtsmooth/curves.hpp"
#include "irtsmooth/data_model.hpp"
#include "irtsmooth/kernel.hpp"

#include <span>
#include <string>
#include <vector>

namespace irtsmooth {

inline constexpr std::size_t kDefaultMinGroupSize = 30;

struct DifConfig
{
  Kernel kernel = Kernel::gaussian;
  //! Applied to each group with that group's subjects.
  BandwidthPolicy bandwidth;
  Estimator estimator = Estimator::binned;
  std::size_t min_group_size = kDefaultMinGroupSize;
  //! Probability levels of the QQ pairs; empty means 0.01, ..., 0.99.
  std::vector<double> qq_probs;
};

struct GroupCurves
{
  std::string label;
  //! Indices into the pooled sample.
  std::vector<std::size_t> subjects;
  std::vector<double> bandwidths;
  CurveSet curves;
  std::vector<std::vector<double>> eis;
  std::vector<double> ets;
  //! Group ETS at each member's pooled ability.
  std::vector<double> subject_ets;
  ScoreDensity density;
};

struct QqPairs
{
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<double> probs;
  std::vector<double> first_quantiles;
  std::vector<double> second_quantiles;
};

struct DroppedGroup
{
  std::string label;
  std::size_t size = 0;
};

struct GroupedAnalysis
{
  CurveSet pooled;
  std::vector<GroupCurves> groups;
  std::vector<QqPairs> qq;
  std::vector<DroppedGroup> dropped;
};

//! Group-wise curves on the pooled grid and abilities. `grid` must carry the
//! pooled grouped data; `pooled_bandwidths` has one entry per item. Groups are
//! ordered by label.
GroupedAnalysis dif_estimate(const ResponseMatrix& data,
                             const ScoringScheme& scheme,
                             const AbilityEstimates& ability,
                             const EvaluationGrid& grid,
                             std::span<const double> pooled_bandwidths,
                             std::span<const std::string> labels,
                             const DifConfig& config);

std::vector<double> default_qq_probs();

//! Matched linear-interpolation quantiles of the two samples.
QqPairs qq_expected_scores(std::span<const double> first,
                           std::span<const double> second,
                           std::span<const double> probs);

} // namespace irtsmooth
