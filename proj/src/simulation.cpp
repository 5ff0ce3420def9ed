#include "irtsmooth/simulation.hpp"

#include "irtsmooth/error.hpp"

#include <cmath>
#include <istream>
#include <random>
#include <sstream>
#include <string>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "simulation";

double logistic(double x)
{
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

void validate(const ParametricItem& item)
{
  if (!(item.a > 0.0) || !std::isfinite(item.a))
    throw Error(ErrorKind::domain, kModule, "ParametricItem",
                "discrimination must be > 0");
  if (item.b.empty())
    throw Error(ErrorKind::domain, kModule, "ParametricItem",
                "at least one difficulty is required");
  if (item.kind == ParametricItem::Kind::two_pl && item.b.size() != 1)
    throw Error(ErrorKind::domain, kModule, "ParametricItem",
                "a 2PL item takes exactly one difficulty");
  for (std::size_t t = 1; t < item.b.size(); ++t)
    if (!(item.b[t] > item.b[t - 1]))
      throw Error(ErrorKind::domain, kModule, "ParametricItem",
                  "thresholds must be strictly increasing");
}

} // namespace

ParametricItem ParametricItem::two_pl(double a, double b)
{
  ParametricItem item{ Kind::two_pl, a, { b } };
  validate(item);
  return item;
}

ParametricItem ParametricItem::graded(double a, std::vector<double> thresholds)
{
  ParametricItem item{ Kind::graded_response, a, std::move(thresholds) };
  validate(item);
  return item;
}

int ParametricItem::n_options() const
{
  return static_cast<int>(b.size()) + 1;
}

std::vector<double> ParametricItem::probabilities(double theta) const
{
  const std::size_t m = b.size() + 1;
  // Cumulative probabilities of reaching category c + 1, padded with 1 and 0.
  std::vector<double> cum(m + 1);
  cum[0] = 1.0;
  cum[m] = 0.0;
  for (std::size_t c = 0; c + 1 < m; ++c)
    cum[c + 1] = logistic(a * (theta - b[c]));
  std::vector<double> p(m);
  for (std::size_t c = 0; c < m; ++c)
    p[c] = cum[c] - cum[c + 1];
  return p;
}

Simulation simulate_responses(const std::vector<ParametricItem>& items,
                              std::size_t n,
                              std::uint64_t seed)
{
  if (n < 2)
    throw Error(ErrorKind::input, kModule, "simulate_responses",
                "at least two subjects are required");
  if (items.empty())
    throw Error(ErrorKind::input, kModule, "simulate_responses",
                "no items given");
  for (const auto& item : items)
    validate(item);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Simulation out{ ResponseMatrix{}, std::vector<double>(n), {} };
  for (auto& t : out.thetas)
    t = normal(rng);

  const std::size_t k = items.size();
  std::vector<int> selections(n * k);
  std::vector<int> counts;
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < k; ++j) {
    counts.push_back(items[j].n_options());
    labels.push_back("item" + std::to_string(j + 1));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const auto p = items[j].probabilities(out.thetas[i]);
      const double u = unit(rng);
      double acc = 0.0;
      int chosen = static_cast<int>(p.size());
      for (std::size_t c = 0; c < p.size(); ++c) {
        acc += p[c];
        if (u < acc) {
          chosen = static_cast<int>(c) + 1;
          break;
        }
      }
      selections[j * n + i] = chosen;
    }
  out.responses =
    ResponseMatrix(std::move(labels), std::move(counts), std::move(selections));
  out.truth = [items](std::size_t item, int option, double theta) {
    return items.at(item).probabilities(theta).at(
      static_cast<std::size_t>(option));
  };
  return out;
}

ScoringScheme simulated_scoring(const std::vector<ParametricItem>& items)
{
  std::vector<ItemFormat> formats;
  std::vector<int> key;
  std::vector<int> counts;
  for (const auto& item : items) {
    const bool binary = item.kind == ParametricItem::Kind::two_pl;
    formats.push_back(binary ? ItemFormat::multiple_choice
                             : ItemFormat::rating_scale);
    key.push_back(binary ? 2 : item.n_options());
    counts.push_back(item.n_options());
  }
  return build_scoring(formats, key, counts);
}

std::vector<ParametricItem> parse_item_specs(std::istream& in)
{
  std::vector<ParametricItem> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size())
          throw std::invalid_argument(token);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::parse, kModule, "parse_item_specs",
                    "bad number '" + token + "'",
                    "line " + std::to_string(line_no));
      }
    }
    try {
      if ((kind == "2pl" || kind == "2PL") && values.size() == 2)
        out.push_back(ParametricItem::two_pl(values[0], values[1]));
      else if ((kind == "grm" || kind == "GRM") && values.size() >= 2)
        out.push_back(ParametricItem::graded(
          values[0], std::vector<double>(values.begin() + 1, values.end())));
      else
        throw Error(ErrorKind::parse, kModule, "parse_item_specs",
                    "expected '2pl a b' or 'grm a b1 b2 ...'");
    } catch (const Error& e) {
      throw Error(e.kind(), kModule, "parse_item_specs", e.message(),
                  "line " + std::to_string(line_no));
    }
  }
  if (out.empty())
    throw Error(ErrorKind::input, kModule, "parse_item_specs",
                "no items in specification");
  return out;
}

} // namespace irtsmooth
