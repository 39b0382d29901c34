#pragma once

#include <cstddef>
#include <vector>

#include "setrisk/rational.hpp"

namespace setrisk {

enum class RowSense { GreaterEqual, LessEqual, Equal };

struct LpRow {
  Vec coeffs;
  RowSense sense = RowSense::GreaterEqual;
  Rational rhs;
};

/// minimize objective·x subject to rows; variables are free unless marked
/// nonnegative.
struct LinearProgram {
  std::size_t num_vars = 0;
  Vec objective;
  std::vector<LpRow> rows;
  std::vector<bool> nonnegative;

  explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(n, Rational(0)), nonnegative(n, false) {}

  void add_row(Vec coeffs, RowSense sense, Rational rhs) {
    rows.push_back(LpRow{std::move(coeffs), sense, std::move(rhs)});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;  // valid when Optimal
  Vec x;           // a feasible point (Optimal, and Unbounded)
  Vec ray;         // improving recession direction when Unbounded
  Vec duals;       // one multiplier per row when Optimal; objective = duals·rhs
};

/// Exact two-phase primal simplex with Bland's anti-cycling rule.
LpResult solve(const LinearProgram& lp);

/// Convenience: is the row system feasible?
bool feasible(const LinearProgram& lp);

}  // namespace setrisk
