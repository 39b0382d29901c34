#include "setrisk/lp.hpp"

#include <cassert>
#include <optional>

namespace setrisk {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows + 1, Vec(cols + 1, Rational(0))) {}

  Rational& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  const Rational& at(std::size_t i, std::size_t j) const { return t_[i][j]; }
  Rational& rhs(std::size_t i) { return t_[i][n_]; }
  Rational& cost(std::size_t j) { return t_[m_][j]; }
  Rational& objective_cell() { return t_[m_][n_]; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational inv = 1 / t_[r][c];
    for (auto& x : t_[r]) {
      if (sgn(x) != 0) x *= inv;
    }
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r || sgn(t_[i][c]) == 0) continue;
      const Rational f = t_[i][c];
      for (std::size_t j = 0; j <= n_; ++j) {
        if (sgn(t_[r][j]) != 0) t_[i][j] -= f * t_[r][j];
      }
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<Vec> t_;
};

enum class PhaseOutcome { Optimal, Unbounded };

struct Runner {
  Tableau& tab;
  std::vector<std::size_t>& basis;
  const std::vector<bool>& allowed;
  std::size_t unbounded_col = 0;

  PhaseOutcome run() {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < tab.cols(); ++j) {
        if (allowed[j] && sgn(tab.cost(j)) < 0) {
          enter = j;
          break;
        }
      }
      if (!enter) return PhaseOutcome::Optimal;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < tab.rows(); ++i) {
        if (sgn(tab.at(i, *enter)) <= 0) continue;
        Rational ratio = tab.rhs(i) / tab.at(i, *enter);
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (!leave) {
        unbounded_col = *enter;
        return PhaseOutcome::Unbounded;
      }
      tab.pivot(*leave, *enter);
      basis[*leave] = *enter;
    }
  }
};

}  // namespace

LpResult solve(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();

  // Column layout: structural columns, then one slack per inequality row,
  // then artificials.
  struct VarMap {
    std::size_t pos;
    std::optional<std::size_t> neg;
  };
  std::vector<VarMap> vars(n);
  std::size_t col = 0;
  for (std::size_t j = 0; j < n; ++j) {
    vars[j].pos = col++;
    if (!lp.nonnegative[j]) vars[j].neg = col++;
  }
  const std::size_t structural = col;
  std::vector<std::optional<std::size_t>> slack(m);
  std::vector<int> slack_sign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.rows[i].sense == RowSense::Equal) continue;
    slack[i] = col++;
    slack_sign[i] = lp.rows[i].sense == RowSense::LessEqual ? 1 : -1;
  }
  std::vector<int> row_sign(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (sgn(lp.rows[i].rhs) < 0) row_sign[i] = -1;
  }
  std::vector<std::optional<std::size_t>> artificial(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(slack[i] && slack_sign[i] * row_sign[i] == 1)) artificial[i] = col++;
  }
  const std::size_t total = col;

  Tableau tab(m, total);
  std::vector<std::size_t> basis(m);
  std::vector<std::size_t> unit_col(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const int s = row_sign[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(row.coeffs[j]) == 0) continue;
      tab.at(i, vars[j].pos) = s * row.coeffs[j];
      if (vars[j].neg) tab.at(i, *vars[j].neg) = -s * row.coeffs[j];
    }
    if (slack[i]) tab.at(i, *slack[i]) = s * slack_sign[i];
    if (artificial[i]) tab.at(i, *artificial[i]) = 1;
    tab.rhs(i) = s * row.rhs;
    unit_col[i] = artificial[i] ? *artificial[i] : *slack[i];
    basis[i] = unit_col[i];
  }

  std::vector<bool> is_artificial(total, false);
  for (const auto& a : artificial) {
    if (a) is_artificial[*a] = true;
  }

  // Phase I: minimise the sum of artificials.
  for (std::size_t j = 0; j <= total; ++j) tab.at(m, j) = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!artificial[i]) continue;
    tab.cost(*artificial[i]) += 1;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!artificial[i]) continue;
    for (std::size_t j = 0; j <= total; ++j) {
      if (sgn(tab.at(i, j)) != 0) tab.at(m, j) -= tab.at(i, j);
    }
  }
  std::vector<bool> all_allowed(total, true);
  Runner phase1{tab, basis, all_allowed};
  phase1.run();
  LpResult result;
  if (sgn(tab.objective_cell()) != 0) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!is_artificial[basis[i]]) continue;
    for (std::size_t j = 0; j < total; ++j) {
      if (!is_artificial[j] && sgn(tab.at(i, j)) != 0) {
        tab.pivot(i, j);
        basis[i] = j;
        break;
      }
    }
  }

  // Phase II.
  Vec cost(total, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    cost[vars[j].pos] = lp.objective[j];
    if (vars[j].neg) cost[*vars[j].neg] = -lp.objective[j];
  }
  for (std::size_t j = 0; j < total; ++j) tab.cost(j) = cost[j];
  tab.objective_cell() = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Rational cb = cost[basis[i]];
    if (sgn(cb) == 0) continue;
    for (std::size_t j = 0; j <= total; ++j) {
      if (sgn(tab.at(i, j)) != 0) tab.at(m, j) -= cb * tab.at(i, j);
    }
  }
  std::vector<bool> allowed(total, true);
  for (std::size_t j = 0; j < total; ++j) allowed[j] = !is_artificial[j];
  Runner phase2{tab, basis, allowed};
  const PhaseOutcome outcome = phase2.run();

  Vec values(total, Rational(0));
  for (std::size_t i = 0; i < m; ++i) values[basis[i]] = tab.rhs(i);
  auto to_original = [&](const Vec& v) {
    Vec x(n, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = v[vars[j].pos];
      if (vars[j].neg) x[j] -= v[*vars[j].neg];
    }
    return x;
  };
  result.x = to_original(values);
  if (outcome == PhaseOutcome::Unbounded) {
    Vec dir(total, Rational(0));
    dir[phase2.unbounded_col] = 1;
    for (std::size_t i = 0; i < m; ++i) dir[basis[i]] = -tab.at(i, phase2.unbounded_col);
    result.status = LpStatus::Unbounded;
    result.ray = to_original(dir);
    return result;
  }
  result.status = LpStatus::Optimal;
  result.value = -tab.objective_cell();
  result.duals.assign(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    result.duals[i] = -row_sign[i] * tab.cost(unit_col[i]);
  }
  (void)structural;
  return result;
}

bool feasible(const LinearProgram& lp) {
  LinearProgram copy = lp;
  copy.objective.assign(lp.num_vars, Rational(0));
  return solve(copy).status != LpStatus::Infeasible;
}

}  // namespace setrisk
