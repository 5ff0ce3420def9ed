#include "irtsmooth/ability.hpp"

#include "irtsmooth/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "ability";

// Acklam's rational approximation coefficients.
constexpr double a[] = { -3.969683028665376e+01, 2.209460984245205e+02,
                         -2.759285104469687e+02, 1.383577518672690e+02,
                         -3.066479806614716e+01, 2.506628277459239e+00 };
constexpr double b[] = { -5.447609879822406e+01, 1.615858368580409e+02,
                         -1.556989798598866e+02, 6.680131188771972e+01,
                         -1.328068155288572e+01 };
constexpr double c[] = { -7.784894002430293e-03, -3.223964580411365e-01,
                         -2.400758277161838e+00, -2.549732539343734e+00,
                         4.374664141464968e+00,  2.938163982698783e+00 };
constexpr double d[] = { 7.784695709041462e-03, 3.224671290700398e-01,
                         2.445134137142996e+00, 3.754408661907416e+00 };

} // namespace

double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorKind::domain, kModule, "normal_quantile",
                "probability must lie in (0, 1)");
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  // Halley refinement. The upper tail is refined through the complement to
  // avoid cancellation in 1 - p.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  const double xs = upper ? -x : x;
  const double e = 0.5 * std::erfc(-xs / std::numbers::sqrt2) - target;
  const double u =
    e * std::sqrt(2 * std::numbers::pi) * std::exp(xs * xs / 2);
  const double refined = xs - u / (1 + xs * u / 2);
  return upper ? -refined : refined;
}

LatentDistribution::LatentDistribution(DistributionFamily family,
                                       double a,
                                       double b)
  : family_(family)
  , a_(a)
  , b_(b)
{
  const bool ok = family == DistributionFamily::uniform ? b > a : b > 0;
  if (!ok || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::domain, kModule, "LatentDistribution",
                "scale parameter must be strictly positive");
}

LatentDistribution LatentDistribution::parse(std::string_view text)
{
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  DistributionFamily family;
  if (name == "normal" || name == "norm")
    family = DistributionFamily::normal;
  else if (name == "uniform" || name == "unif")
    family = DistributionFamily::uniform;
  else if (name == "logistic" || name == "logis")
    family = DistributionFamily::logistic;
  else
    throw Error(ErrorKind::input, kModule, "parse_distribution",
                "unknown distribution '" + std::string(name) + "'");
  double p[2] = { 0.0, 1.0 };
  if (colon != std::string_view::npos) {
    auto rest = text.substr(colon + 1);
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos)
      throw Error(ErrorKind::input, kModule, "parse_distribution",
                  "expected two comma-separated parameters");
    std::string_view parts[2] = { rest.substr(0, comma),
                                  rest.substr(comma + 1) };
    for (int i = 0; i < 2; ++i) {
      auto [ptr, ec] = std::from_chars(
        parts[i].data(), parts[i].data() + parts[i].size(), p[i]);
      if (ec != std::errc{} || ptr != parts[i].data() + parts[i].size())
        throw Error(ErrorKind::input, kModule, "parse_distribution",
                    "bad parameter '" + std::string(parts[i]) + "'");
    }
  }
  return { family, p[0], p[1] };
}

double LatentDistribution::quantile(double p) const
{
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorKind::domain, kModule, "ranks_to_theta",
                "rank " + std::to_string(p) + " outside (0, 1)");
  switch (family_) {
    case DistributionFamily::normal:
      return a_ + b_ * normal_quantile(p);
    case DistributionFamily::uniform:
      return a_ + p * (b_ - a_);
    case DistributionFamily::logistic:
      return a_ + b_ * std::log(p / (1 - p));
  }
  return 0.0;
}

double LatentDistribution::sigma() const
{
  switch (family_) {
    case DistributionFamily::normal:
      return b_;
    case DistributionFamily::uniform:
      return (b_ - a_) / std::sqrt(12.0);
    case DistributionFamily::logistic:
      return b_ * std::numbers::pi / std::sqrt(3.0);
  }
  return 1.0;
}

std::string LatentDistribution::describe() const
{
  const char* name = family_ == DistributionFamily::normal    ? "normal"
                     : family_ == DistributionFamily::uniform ? "uniform"
                                                              : "logistic";
  return std::string(name) + ":" + std::to_string(a_) + "," +
         std::to_string(b_);
}

std::optional<RankStatistic> parse_rank_statistic(std::string_view text)
{
  if (text == "total" || text == "sum")
    return RankStatistic::total;
  if (text == "mean")
    return RankStatistic::mean;
  if (text == "median")
    return RankStatistic::median;
  return std::nullopt;
}

std::vector<double> total_score(const ResponseMatrix& data,
                                const ScoringScheme& scheme)
{
  std::vector<double> t(data.n_subjects(), 0.0);
  for (std::size_t j = 0; j < data.n_items(); ++j) {
    const auto col = data.column(j);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (col[i] == kMissing)
        throw Error(ErrorKind::input, kModule, "total_score",
                    "missing selection; apply a missing policy first",
                    "subject " + std::to_string(i + 1) + ", item " +
                      std::to_string(j + 1));
      t[i] += scheme.weight(j, col[i]);
    }
  }
  return t;
}

std::vector<double> subject_statistic(const ResponseMatrix& data,
                                      const ScoringScheme& scheme,
                                      RankStatistic stat)
{
  if (stat == RankStatistic::total)
    return total_score(data, scheme);
  std::vector<std::size_t> items;
  for (std::size_t j = 0; j < data.n_items(); ++j)
    if (scheme.scored(j))
      items.push_back(j);
  if (items.empty())
    throw Error(ErrorKind::input, kModule, "subject_statistic",
                "no scored items to rank subjects by");
  std::vector<double> out(data.n_subjects());
  std::vector<double> scores(items.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t u = 0; u < items.size(); ++u)
      scores[u] = scheme.weight(items[u], data.at(i, items[u]));
    if (stat == RankStatistic::mean) {
      out[i] = std::accumulate(scores.begin(), scores.end(), 0.0) /
               static_cast<double>(scores.size());
    } else {
      std::sort(scores.begin(), scores.end());
      const std::size_t h = scores.size() / 2;
      out[i] = scores.size() % 2 ? scores[h] : 0.5 * (scores[h - 1] + scores[h]);
    }
  }
  return out;
}

std::vector<double> midranks(std::span<const double> values)
{
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return values[x] < values[y];
                   });
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]])
      ++end;
    // positions start..end-1 hold 1-based ranks start+1..end
    const double mid = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t u = start; u < end; ++u)
      ranks[order[u]] = mid;
    start = end;
  }
  return ranks;
}

std::vector<double> rank_subjects(
  std::span<const double> scores,
  std::optional<std::span<const double>> rank_override)
{
  const char* op = "rank_subjects";
  const std::size_t n = scores.size();
  if (n < 2)
    throw Error(ErrorKind::input, kModule, op,
                "at least two subjects are required");
  if (rank_override && rank_override->size() != n)
    throw Error(ErrorKind::input, kModule, op,
                "rank override has " + std::to_string(rank_override->size()) +
                  " entries for " + std::to_string(n) + " subjects");
  auto r = midranks(rank_override ? *rank_override : scores);
  const double denom = static_cast<double>(n) + 1.0;
  for (auto& x : r)
    x /= denom;
  return r;
}

std::vector<double> ranks_to_theta(std::span<const double> ranks,
                                   const LatentDistribution& dist)
{
  std::vector<double> out(ranks.size());
  std::transform(ranks.begin(), ranks.end(), out.begin(),
                 [&](double r) { return dist.quantile(r); });
  return out;
}

AbilityEstimates estimate_ability(
  const ResponseMatrix& data,
  const ScoringScheme& scheme,
  const LatentDistribution& dist,
  RankStatistic stat,
  std::optional<std::span<const double>> rank_override)
{
  AbilityEstimates out;
  out.distribution = dist;
  out.total_scores = total_score(data, scheme);
  if (!rank_override && scheme.all_nominal())
    throw Error(ErrorKind::input, kModule, "estimate_ability",
                "all items are nominal; supply subject ranks");
  if (rank_override) {
    out.ranks = rank_subjects(out.total_scores, rank_override);
  } else if (stat == RankStatistic::total) {
    out.ranks = rank_subjects(out.total_scores);
  } else {
    const auto s = subject_statistic(data, scheme, stat);
    out.ranks = rank_subjects(s);
  }
  out.thetas = ranks_to_theta(out.ranks, dist);
  return out;
}

} // namespace irtsmooth
