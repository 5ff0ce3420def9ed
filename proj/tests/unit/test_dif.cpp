#include <irtsmooth/dif.hpp>
#include <irtsmooth/error.hpp>
#include <irtsmooth/simulation.hpp>

#include <doctest.h>

#include <random>

using namespace irtsmooth;

namespace {

struct Setup
{
  ResponseMatrix data;
  ScoringScheme scheme;
  AbilityEstimates ability;
  EvaluationGrid grid;
  std::vector<double> h;
};

Setup prepare(ResponseMatrix data, ScoringScheme scheme, double h)
{
  Setup s{ std::move(data), std::move(scheme), {}, {}, {} };
  s.ability = estimate_ability(s.data, s.scheme,
                               LatentDistribution::standard_normal());
  s.grid = build_grid(s.ability.thetas, 51, &s.data);
  s.h.assign(s.data.n_items(), h);
  return s;
}

std::vector<ParametricItem> test_items()
{
  std::vector<ParametricItem> items;
  for (int j = 0; j < 12; ++j)
    items.push_back(ParametricItem::two_pl(0.8 + 0.1 * j, -1.5 + 0.25 * j));
  return items;
}

} // namespace

TEST_CASE("qq pairs")
{
  const std::vector<double> a = { 3, 1, 4, 1, 5, 9, 2, 6 };
  const auto probs = default_qq_probs();
  CHECK(probs.size() == 99);
  CHECK(probs.front() == 0.01);
  CHECK(probs.back() == 0.99);
  const auto same = qq_expected_scores(a, a, probs);
  CHECK(same.first_quantiles == same.second_quantiles);
  std::vector<double> b = a;
  for (auto& v : b)
    v += 5.0;
  const auto shifted = qq_expected_scores(a, b, probs);
  for (std::size_t i = 0; i < probs.size(); ++i)
    CHECK(shifted.second_quantiles[i] - shifted.first_quantiles[i] ==
          doctest::Approx(5.0));
  CHECK_THROWS_AS(qq_expected_scores(a, std::vector<double>{}, probs), Error);
}

TEST_CASE("duplicate groups reproduce the pooled curves")
{
  const auto items = test_items();
  const auto sim = simulate_responses(items, 400, 3);
  std::vector<std::size_t> twice;
  for (int copy = 0; copy < 2; ++copy)
    for (std::size_t i = 0; i < 400; ++i)
      twice.push_back(i);
  auto s = prepare(sim.responses.select_subjects(twice),
                   simulated_scoring(items), 0.35);
  std::vector<std::string> labels(800, "A");
  std::fill(labels.begin() + 400, labels.end(), "B");
  DifConfig cfg;
  cfg.bandwidth = parse_bandwidth_policy("0.35");
  const auto r = dif_estimate(s.data, s.scheme, s.ability, s.grid, s.h, labels,
                              cfg);
  REQUIRE(r.groups.size() == 2);
  for (const auto& g : r.groups)
    for (std::size_t j = 0; j < items.size(); ++j)
      CHECK((g.curves.items[j].occ - r.pooled.items[j].occ)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  REQUIRE(r.qq.size() == 1);
  for (std::size_t i = 0; i < r.qq[0].probs.size(); ++i)
    CHECK(std::abs(r.qq[0].first_quantiles[i] - r.qq[0].second_quantiles[i]) <
          1e-10);
}

TEST_CASE("random split of a homogeneous population")
{
  const auto items = test_items();
  const auto sim = simulate_responses(items, 4000, 21);
  auto s = prepare(sim.responses, simulated_scoring(items),
                   rule_of_thumb_bandwidth(4000, 1.0));
  std::mt19937_64 rng(99);
  std::vector<std::string> labels(4000);
  for (auto& l : labels)
    l = rng() % 2 ? "x" : "y";
  DifConfig cfg;
  const auto r =
    dif_estimate(s.data, s.scheme, s.ability, s.grid, s.h, labels, cfg);
  REQUIRE(r.groups.size() == 2);
  CHECK(r.groups[0].label == "x");
  // Central 90% of the abilities.
  const double lo = sample_quantile(s.ability.thetas, 0.05);
  const double hi = sample_quantile(s.ability.thetas, 0.95);
  for (std::size_t j = 0; j < items.size(); ++j) {
    double gap = 0.0;
    for (std::size_t p = 0; p < s.grid.size(); ++p)
      if (s.grid.points[p] >= lo && s.grid.points[p] <= hi)
        gap = std::max(
          gap, std::abs(r.groups[0].eis[j][p] - r.groups[1].eis[j][p]));
    CHECK(gap < 0.1);
  }
}

TEST_CASE("small groups are dropped")
{
  const auto items = test_items();
  const auto sim = simulate_responses(items, 200, 4);
  auto s = prepare(sim.responses, simulated_scoring(items), 0.4);
  std::vector<std::string> labels(200, "big");
  for (std::size_t i = 0; i < 100; ++i)
    labels[i] = "other";
  for (std::size_t i = 0; i < 10; ++i)
    labels[i] = "tiny";
  DifConfig cfg;
  const auto r =
    dif_estimate(s.data, s.scheme, s.ability, s.grid, s.h, labels, cfg);
  CHECK(r.groups.size() == 2);
  REQUIRE(r.dropped.size() == 1);
  CHECK(r.dropped[0].label == "tiny");
  CHECK(r.dropped[0].size == 10);
  for (const auto& g : r.groups) {
    CHECK(g.density.x.size() == kDensityPoints);
    CHECK(g.subject_ets.size() == g.subjects.size());
  }

  cfg.min_group_size = 150;
  try {
    dif_estimate(s.data, s.scheme, s.ability, s.grid, s.h, labels, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::input);
  }
  std::vector<std::string> short_labels(5, "a");
  CHECK_THROWS_AS(dif_estimate(s.data, s.scheme, s.ability, s.grid, s.h,
                               short_labels, DifConfig{}),
                  Error);
}
