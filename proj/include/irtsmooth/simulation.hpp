#pragma once

#include "irtsmooth/data_model.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace irtsmooth {

struct ParametricItem
{
  enum class Kind
  {
    two_pl,
    graded_response
  };

  Kind kind = Kind::two_pl;
  double a = 1.0;
  //! One difficulty for 2PL; ordered thresholds for graded response.
  std::vector<double> b;

  static ParametricItem two_pl(double a, double b);
  static ParametricItem graded(double a, std::vector<double> thresholds);

  int n_options() const;
  //! Option probabilities at theta. For 2PL, option 2 is the correct one.
  std::vector<double> probabilities(double theta) const;
};

//! Probabilities of option `option` (0-based) of item `item` at theta.
using TrueCurve =
  std::function<double(std::size_t item, int option, double theta)>;

struct Simulation
{
  ResponseMatrix responses;
  std::vector<double> thetas;
  TrueCurve truth;
};

//! Standard Normal thetas and one draw per item from the model probabilities.
Simulation simulate_responses(const std::vector<ParametricItem>& items,
                              std::size_t n,
                              std::uint64_t seed);

//! Multiple-choice scoring keyed on option 2 for 2PL items; rating-scale
//! scoring for graded items.
ScoringScheme simulated_scoring(const std::vector<ParametricItem>& items);

//! One item per line: "2pl a b" or "grm a b1 b2 ...". Blank lines and lines
//! starting with '#' are skipped.
std::vector<ParametricItem> parse_item_specs(std::istream& in);

} // namespace irtsmooth
