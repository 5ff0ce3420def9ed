#include "irtsmooth/dif.hpp"

#include "irtsmooth/error.hpp"

#include <map>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "dif";

} // namespace

std::vector<double> default_qq_probs()
{
  std::vector<double> out;
  for (int i = 1; i <= 99; ++i)
    out.push_back(i / 100.0);
  return out;
}

QqPairs qq_expected_scores(std::span<const double> first,
                           std::span<const double> second,
                           std::span<const double> probs)
{
  if (first.empty() || second.empty())
    throw Error(ErrorKind::input, kModule, "qq_expected_scores",
                "both groups must be nonempty");
  QqPairs out;
  out.probs.assign(probs.begin(), probs.end());
  out.first_quantiles = sample_quantiles(first, probs);
  out.second_quantiles = sample_quantiles(second, probs);
  return out;
}

GroupedAnalysis dif_estimate(const ResponseMatrix& data,
                             const ScoringScheme& scheme,
                             const AbilityEstimates& ability,
                             const EvaluationGrid& grid,
                             std::span<const double> pooled_bandwidths,
                             std::span<const std::string> labels,
                             const DifConfig& config)
{
  const char* op = "dif_estimate";
  const std::size_t n = data.n_subjects();
  if (labels.size() != n)
    throw Error(ErrorKind::input, kModule, op,
                "got " + std::to_string(labels.size()) + " group labels for " +
                  std::to_string(n) + " subjects");
  if (ability.thetas.size() != n)
    throw Error(ErrorKind::input, kModule, op,
                "abilities and data disagree on the subject count");

  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i)
    members[labels[i]].push_back(i);

  GroupedAnalysis out;
  out.pooled = estimate_curves(data, scheme, ability.thetas, grid,
                               pooled_bandwidths, config.kernel,
                               config.estimator);

  const double sigma = ability.distribution.sigma();
  for (auto& [label, subjects] : members) {
    if (subjects.size() < config.min_group_size || subjects.size() < 2) {
      out.dropped.push_back({ label, subjects.size() });
      continue;
    }
    GroupCurves g;
    g.label = label;
    g.subjects = subjects;
    const auto subset = data.select_subjects(subjects);
    std::vector<double> thetas;
    std::vector<double> totals;
    thetas.reserve(subjects.size());
    for (auto i : subjects) {
      thetas.push_back(ability.thetas[i]);
      totals.push_back(ability.total_scores[i]);
    }
    const auto group_grid = regroup(grid, subjects, subset);
    g.bandwidths =
      resolve_bandwidths(config.bandwidth, thetas, subset, sigma, config.kernel);
    g.curves = estimate_curves(subset, scheme, thetas, group_grid,
                               g.bandwidths, config.kernel, config.estimator);
    for (const auto& item : g.curves.items)
      g.eis.push_back(expected_item_score(item.occ, item.weights));
    g.ets = expected_test_score(g.curves);
    for (double t : thetas)
      g.subject_ets.push_back(interpolate(g.ets, g.curves.points, t));
    g.density = score_density(totals);
    out.groups.push_back(std::move(g));
  }
  if (out.groups.size() < 2)
    throw Error(ErrorKind::input, kModule, op,
                "fewer than two groups reach the minimum size of " +
                  std::to_string(config.min_group_size));

  const auto probs =
    config.qq_probs.empty() ? default_qq_probs() : config.qq_probs;
  for (std::size_t a = 0; a < out.groups.size(); ++a)
    for (std::size_t b = a + 1; b < out.groups.size(); ++b) {
      auto pair = qq_expected_scores(out.groups[a].subject_ets,
                                     out.groups[b].subject_ets, probs);
      pair.first = a;
      pair.second = b;
      out.qq.push_back(std::move(pair));
    }
  return out;
}

} // namespace irtsmooth
