#include "oracles.hpp"

#include <irtsmooth/ability.hpp>
#include <irtsmooth/error.hpp>
#include <irtsmooth/kernel.hpp>
#include <irtsmooth/simulation.hpp>

#include <doctest.h>

#include <numeric>
#include <random>

using namespace irtsmooth;

namespace {

struct Toy
{
  std::vector<double> thetas;
  std::vector<int> sel;
  int m;
};

Toy random_toy(std::mt19937_64& rng, std::size_t n, int m)
{
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> c(1, m);
  Toy t{ {}, {}, m };
  for (std::size_t i = 0; i < n; ++i) {
    t.thetas.push_back(z(rng));
    t.sel.push_back(c(rng));
  }
  return t;
}

constexpr Kernel kAll[] = { Kernel::gaussian, Kernel::uniform,
                            Kernel::quadratic };

} // namespace

TEST_CASE("kernel values")
{
  CHECK(kernel_eval(Kernel::gaussian, 0.0) == 1.0);
  CHECK(kernel_eval(Kernel::gaussian, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(kernel_eval(Kernel::uniform, 1.0) == 1.0);
  CHECK(kernel_eval(Kernel::uniform, 1.0001) == 0.0);
  CHECK(kernel_eval(Kernel::quadratic, 0.5) == 0.75);
  CHECK(kernel_eval(Kernel::quadratic, -1.5) == 0.0);
  CHECK(parse_kernel("gaussian") == Kernel::gaussian);
  CHECK(parse_kernel("quadratic") == Kernel::quadratic);
  CHECK_FALSE(parse_kernel("cosine").has_value());
}

TEST_CASE("exact estimate matches the direct double loop")
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> hs(0.05, 2.0), xs(-2.5, 2.5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = random_toy(rng, 5 + rep % 40, 2 + rep % 4);
    const Kernel k = kAll[rep % 3];
    const double h = hs(rng), x = xs(rng);
    const auto want = oracle::nw(t.thetas, t.sel, t.m, x, h, k);
    if (!want) {
      CHECK_THROWS_AS(nw_estimate(t.thetas, t.sel, t.m, x, h, k), Error);
      continue;
    }
    const auto got = nw_estimate(t.thetas, t.sel, t.m, x, h, k);
    for (int l = 0; l < t.m; ++l)
      CHECK(std::abs(got[l] - (*want)[l]) < 1e-12);
  }
}

TEST_CASE("weights are nonnegative and sum to one")
{
  std::mt19937_64 rng(5);
  const auto t = random_toy(rng, 80, 3);
  for (Kernel k : kAll)
    for (double x : { -1.0, 0.0, 0.7 }) {
      const auto w = nw_weights(t.thetas, x, 0.6, k);
      CHECK(std::accumulate(w.begin(), w.end(), 0.0) ==
            doctest::Approx(1.0).epsilon(1e-14));
      CHECK(*std::min_element(w.begin(), w.end()) >= 0.0);
    }
}

TEST_CASE("probabilities sum to one with a synthetic missing option")
{
  const ResponseMatrix r({ "a" }, { 2 }, { 1, 2, 3, 3, 1 }, { true });
  std::vector<double> th = { -1, -0.5, 0, 0.5, 1 };
  const auto g = build_grid(th, 11, &r);
  for (Kernel k : kAll) {
    const auto c = nw_curve_binned(g, 0, 1.5, k);
    CHECK(c.cols() == 3);
    for (Eigen::Index s = 0; s < c.rows(); ++s)
      CHECK(c.row(s).sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("a huge bandwidth returns the global frequencies")
{
  std::mt19937_64 rng(8);
  const auto t = random_toy(rng, 300, 4);
  std::vector<double> freq(4, 0.0);
  for (int c : t.sel)
    freq[c - 1] += 1.0 / t.sel.size();
  for (Kernel k : kAll)
    for (double x : { -1.0, 0.3 }) {
      const auto p = nw_estimate(t.thetas, t.sel, t.m, x, 1e6, k);
      for (int l = 0; l < 4; ++l)
        CHECK(std::abs(p[l] - freq[l]) < 1e-6);
    }
}

TEST_CASE("a tiny Gaussian bandwidth picks the nearest subject")
{
  const std::vector<double> th = { 0.0, 1.0, 2.0 };
  const std::vector<int> sel = { 1, 2, 3 };
  const auto p = nw_estimate(th, sel, 3, 1.9, 1e-3, Kernel::gaussian);
  CHECK(p[2] == doctest::Approx(1.0));
}

TEST_CASE("invariance under translation and scaling")
{
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = random_toy(rng, 60, 3);
    const Kernel k = kAll[rep % 3];
    const double c = 3.7, a = 2.5, h = 0.8, x = 0.2;
    std::vector<double> shifted, scaled;
    for (double v : t.thetas) {
      shifted.push_back(v + c);
      scaled.push_back(a * v);
    }
    const auto base = nw_estimate(t.thetas, t.sel, 3, x, h, k);
    const auto ps = nw_estimate(shifted, t.sel, 3, x + c, h, k);
    const auto pa = nw_estimate(scaled, t.sel, 3, a * x, a * h, k);
    for (int l = 0; l < 3; ++l) {
      CHECK(std::abs(base[l] - ps[l]) < 1e-12);
      CHECK(std::abs(base[l] - pa[l]) < 1e-12);
    }
  }
}

TEST_CASE("grid and grouped data")
{
  const std::vector<double> th = { 0.0, 0.4, 1.0 };
  const auto g = build_grid(th, 2);
  CHECK(g.points == std::vector<double>{ 0.0, 1.0 });
  CHECK(g.bin_counts == std::vector<double>{ 2.0, 1.0 });
  CHECK(g.uniform);

  const ResponseMatrix r({ "a" }, { 2 }, { 1, 2, 2 });
  const auto g2 = build_grid(th, 2, &r);
  CHECK(g2.binned_selections[0](0, 0) == 1.0);
  CHECK(g2.binned_selections[0](0, 1) == 1.0);
  CHECK(g2.binned_selections[0](1, 1) == 1.0);

  const std::vector<double> same = { 1.0, 1.0 };
  CHECK_THROWS_AS(build_grid(same, 5), Error);
  CHECK_THROWS_AS(build_grid(th, 1), Error);
  CHECK_THROWS_AS(build_grid_from_points({ 0.0, 0.0 }, th), Error);
}

namespace {

double binned_deviation(std::uint64_t seed)
{
  const std::vector<ParametricItem> items = { ParametricItem::two_pl(1.2, 0.3),
                                              ParametricItem::two_pl(0.8, -1.0),
                                              ParametricItem::two_pl(1.5, 1.0) };
  const double h = rule_of_thumb_bandwidth(500, 1.0);
  const auto sim = simulate_responses(items, 500, seed);
  const auto th = ranks_to_theta(rank_subjects(sim.thetas),
                                 LatentDistribution::standard_normal());
  const auto g = build_grid(th, 51, &sim.responses);
  double worst = 0.0;
  for (std::size_t j = 0; j < items.size(); ++j) {
    const auto binned = nw_curve_binned(g, j, h, Kernel::gaussian);
    const auto exact = nw_curve_exact(th, sim.responses.column(j), 2,
                                      g.points, h, Kernel::gaussian);
    worst = std::max(worst, (binned - exact).cwiseAbs().maxCoeff());
  }
  return worst;
}

} // namespace

TEST_CASE("binned estimate agrees with the exact one")
{
  CHECK(binned_deviation(1) < 0.02);
  // The gap lives in the sparse tails; a few samples exceed 0.02.
  for (std::uint64_t seed = 2; seed <= 20; ++seed)
    CHECK(binned_deviation(seed) < 0.03);
}

TEST_CASE("binned estimate matches the oracle on bin centers")
{
  // Subjects placed exactly on grid points make binning lossless.
  std::vector<double> th;
  std::vector<int> sel;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pt(0, 10), c(1, 3);
  for (int i = 0; i < 120; ++i) {
    th.push_back(-1.0 + 0.2 * pt(rng));
    sel.push_back(c(rng));
  }
  th.push_back(-1.0);
  sel.push_back(1);
  th.push_back(1.0);
  sel.push_back(2);
  const ResponseMatrix r({ "a" }, { 3 }, sel);
  const auto g = build_grid(th, 11, &r);
  for (Kernel k : kAll) {
    const auto curve = nw_curve_binned(g, 0, 0.5, k);
    for (std::size_t s = 0; s < g.size(); ++s) {
      const auto want = oracle::nw(th, sel, 3, g.points[s], 0.5, k);
      for (int l = 0; l < 3; ++l)
        CHECK(std::abs(curve(static_cast<Eigen::Index>(s), l) - (*want)[l]) <
              1e-12);
    }
  }
}

TEST_CASE("empty neighborhood is reported")
{
  const std::vector<double> th = { 0.0, 0.1 };
  const std::vector<int> sel = { 1, 2 };
  CHECK_THROWS_AS(nw_weights(th, 5.0, 0.5, Kernel::uniform), Error);
  try {
    nw_estimate(th, sel, 2, 5.0, 0.5, Kernel::quadratic);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_neighborhood);
  }
  CHECK_NOTHROW(nw_weights(th, 50.0, 0.01, Kernel::gaussian));
}

TEST_CASE("rule of thumb")
{
  CHECK(rule_of_thumb_bandwidth(1000, 1.0) ==
        doctest::Approx(1.06 * std::pow(1000.0, -0.2)));
  CHECK(rule_of_thumb_bandwidth(32, 2.0) == doctest::Approx(2.0 * 1.06 / 2.0));
  CHECK_THROWS_AS(rule_of_thumb_bandwidth(0, 1.0), Error);
}

TEST_CASE("default candidates are log spaced in [0.2 h, 3 h]")
{
  const auto c = default_cv_candidates(0.5);
  REQUIRE(c.size() == 30);
  CHECK(c.front() == doctest::Approx(0.1));
  CHECK(c.back() == doctest::Approx(1.5));
  for (std::size_t i = 2; i < c.size(); ++i)
    CHECK(c[i] / c[i - 1] == doctest::Approx(c[1] / c[0]));
}

TEST_CASE("cross-validation statistic matches the triple loop")
{
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const auto t = random_toy(rng, 10 + rep, 2 + rep % 3);
    const Kernel k = kAll[rep % 3];
    const std::vector<double> cand = { 0.1, 0.3, 0.7, 1.5, 4.0 };
    const auto got = cv_bandwidth(t.thetas, t.sel, t.m, cand, k);
    for (std::size_t c = 0; c < cand.size(); ++c) {
      const double want = oracle::cv(t.thetas, t.sel, t.m, cand[c], k);
      if (std::isinf(want))
        CHECK(std::isinf(got.cv_values[c]));
      else
        CHECK(std::abs(got.cv_values[c] - want) < 1e-12);
    }
  }
}

TEST_CASE("cross-validation ties go to the smallest bandwidth")
{
  // Everyone picks option 1: every candidate scores zero.
  const std::vector<double> th = { 0.0, 0.5, 1.0, 1.5 };
  const std::vector<int> sel = { 1, 1, 1, 1 };
  const std::vector<double> cand = { 2.0, 1.0, 3.0 };
  const auto r = cv_bandwidth(th, sel, 2, cand, Kernel::gaussian);
  CHECK(r.best_h == 1.0);
}

TEST_CASE("per-item cross-validation agrees with the single-item path")
{
  std::mt19937_64 rng(2);
  const auto a = random_toy(rng, 40, 3);
  const auto b = random_toy(rng, 40, 2);
  std::vector<int> sel = a.sel;
  sel.insert(sel.end(), b.sel.begin(), b.sel.end());
  const ResponseMatrix r({ "a", "b" }, { 3, 2 }, sel);
  const auto cand = default_cv_candidates(0.5);
  const auto all = cv_bandwidths(a.thetas, r, cand, Kernel::quadratic);
  const auto one = cv_bandwidth(a.thetas, b.sel, 2, cand, Kernel::quadratic);
  CHECK(all[1].best_h == one.best_h);
  for (std::size_t c = 0; c < cand.size(); ++c)
    if (std::isfinite(one.cv_values[c]))
      CHECK(all[1].cv_values[c] == doctest::Approx(one.cv_values[c]));
}

TEST_CASE("bandwidth policies")
{
  CHECK(parse_bandwidth_policy("rot").mode == BandwidthMode::rule_of_thumb);
  CHECK(parse_bandwidth_policy("cv").mode == BandwidthMode::cross_validation);
  const auto f = parse_bandwidth_policy("0.3,0.4");
  CHECK(f.mode == BandwidthMode::fixed);
  CHECK(f.values == std::vector<double>{ 0.3, 0.4 });
  CHECK_THROWS_AS(parse_bandwidth_policy("0,1"), Error);
  CHECK_THROWS_AS(parse_bandwidth_policy("wide"), Error);

  const ResponseMatrix r({ "a", "b", "c" }, { 2, 2, 2 },
                         { 1, 2, 1, 2, 2, 1, 1, 1, 2 });
  const std::vector<double> th = { -1, 0, 1 };
  const auto rot = resolve_bandwidths({}, th, r, 1.0, Kernel::gaussian);
  CHECK(rot.size() == 3);
  CHECK(rot[2] == doctest::Approx(1.06 * std::pow(3.0, -0.2)));
  CHECK(resolve_bandwidths(parse_bandwidth_policy("0.5"), th, r, 1.0,
                           Kernel::gaussian) ==
        std::vector<double>{ 0.5, 0.5, 0.5 });
  CHECK_THROWS_AS(resolve_bandwidths(f, th, r, 1.0, Kernel::gaussian), Error);
}
