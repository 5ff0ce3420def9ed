#pragma once

#include "irtsmooth/ability.hpp"
#include "irtsmooth/curves.hpp"
#include "irtsmooth/data_model.hpp"
#include "irtsmooth/dif.hpp"
#include "irtsmooth/geometry.hpp"
#include "irtsmooth/kernel.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace irtsmooth {

enum class AxisType
{
  scores,
  distribution
};

//! Plot kinds accepted by the `plots` selection.
const std::vector<std::string>& known_plots();

struct AnalysisConfig
{
  std::string data_path;
  IngestOptions ingest;

  std::vector<int> key;
  std::vector<ItemFormat> formats;
  std::optional<std::vector<std::vector<double>>> weights;
  MissingMode missing = MissingMode::treat_as_option;
  double na_weight = 0.0;
  std::uint64_t seed = 1;

  Kernel kernel = Kernel::gaussian;
  BandwidthPolicy bandwidth;
  std::size_t n_points = kDefaultGridSize;
  std::optional<std::vector<double>> eval_points;
  Estimator estimator = Estimator::binned;
  LatentDistribution distribution = LatentDistribution::standard_normal();
  RankStatistic rank_statistic = RankStatistic::total;
  std::optional<std::vector<double>> subject_ranks;

  double alpha = 0.05;
  AxisType axis = AxisType::scores;
  std::set<std::string> plots;
  //! Item labels or 1-based indices; empty means every item.
  std::vector<std::string> items;
  //! 1-based subject indices (after the missing policy) for RCC output.
  std::vector<std::size_t> subjects;

  //! Column name in the data, or a file with one label per subject.
  std::string groups;
  std::size_t min_group_size = kDefaultMinGroupSize;

  //! Parametric item specification and sample size for `simulate`.
  std::string items_spec;
  std::size_t simulate_n = 1000;

  std::string out_dir = "irtsmooth-out";
};

//! Sets one option from its textual form, e.g. ("kernel", "uniform") or
//! ("key", "1,3,2"). List-valued options also accept a path to a file.
//! Throws Error on an unknown key or a bad value.
void set_option(AnalysisConfig& config, std::string_view key,
                std::string_view value);

//! Option names accepted by set_option.
const std::vector<std::string>& option_names();

//! Checks cross-field constraints (alpha, q, known plots).
void validate(const AnalysisConfig& config);

struct SubjectResult
{
  double theta_ml = 0.0;
  double score_ml = 0.0;
  bool floored = false;
  //! Nonempty when the credibility curve could not be formed.
  std::string error;
};

struct Model
{
  AnalysisConfig config;
  Dataset dataset;
  MissingResult prepared;
  AbilityEstimates ability;
  EvaluationGrid grid;
  std::vector<double> bandwidths;
  CurveSet curves;
  ConfidenceConfig confidence;
  std::vector<std::vector<double>> eis;
  std::vector<std::vector<double>> eis_se;
  std::vector<double> ets;
  std::vector<double> score_sd;
  std::vector<SubjectResult> subjects;
  std::vector<std::optional<double>> itemcor;
  std::optional<ScoreDensity> density;
  std::vector<std::size_t> selected_items;
  std::optional<PcaSummary> pca;
  //! Items entering the PCA (those with a nonconstant score).
  std::vector<std::size_t> pca_items;
  std::vector<SimplexTrajectory> triangles;
  std::vector<SimplexTrajectory> tetrahedra;
  std::optional<GroupedAnalysis> dif;
  std::vector<std::string> warnings;

  //! x coordinate of each grid point under the configured axis.
  std::vector<double> axis_values() const;
};

//! Ingest, missing policy, scoring, ability, bandwidths, grid, curves and
//! analytics. With `with_dif`, group-wise curves as well.
Model run_analysis(const AnalysisConfig& config, bool with_dif = false);

//! Same pipeline on an already-loaded dataset.
Model run_analysis(const AnalysisConfig& config, Dataset dataset,
                   bool with_dif = false);

struct CvProfile
{
  std::vector<std::string> labels;
  std::vector<double> candidates;
  std::vector<CvResult> results;
};

//! Cross-validation statistic of the selected items over the candidate set
//! (explicit bandwidth list, or the default candidates).
CvProfile cv_profile(const AnalysisConfig& config);

} // namespace irtsmooth
