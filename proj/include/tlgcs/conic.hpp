#pragma once

// Conic program builder: named vector variables, a linear objective, linear
// equalities, nonnegativity rows and second-order-cone rows ||u|| <= t over
// affine expressions. Lowered to the interior-point standard form on solve.
//
// The textual dump (see dump()) is the documented exchange format for
// cross-checking against external solvers: one line per objective term,
// equality row, nonnegativity row and cone block.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tlgcs/errors.hpp"
#include "tlgcs/ipm.hpp"

namespace tlgcs {

struct VarRef {
  int offset = 0;
  int dim = 0;
  int index(int i) const {
    if (i < 0 || i >= dim) throw DimensionMismatch("variable index out of range");
    return offset + i;
  }
};

// Sparse affine expression sum_i coeff_i * x_i + constant.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr& add(int var_index, double coeff) {
    if (coeff != 0.0) terms.emplace_back(var_index, coeff);
    return *this;
  }
  LinExpr& add(const VarRef& v, int i, double coeff) { return add(v.index(i), coeff); }
  LinExpr& add_const(double c) {
    constant += c;
    return *this;
  }
};

enum class ConicStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* conic_status_name(ConicStatus s) {
  switch (s) {
    case ConicStatus::Optimal: return "optimal";
    case ConicStatus::Infeasible: return "infeasible";
    case ConicStatus::Unbounded: return "unbounded";
    case ConicStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

struct ConicSolution {
  ConicStatus status = ConicStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool accurate = true;
  std::string message;

  bool ok() const { return status == ConicStatus::Optimal; }
  Eigen::VectorXd value(const VarRef& v) const { return x.segment(v.offset, v.dim); }
};

class ConicProgram {
 public:
  VarRef add_var(const std::string& name, int dim) {
    if (dim <= 0) throw DimensionMismatch("variable dimension must be positive");
    VarRef v{n_vars_, dim};
    names_.emplace_back(name, v);
    n_vars_ += dim;
    return v;
  }

  int num_vars() const { return n_vars_; }

  void add_objective(const LinExpr& e) {
    for (auto [i, c] : e.terms) obj_.emplace_back(i, c);
    obj_const_ += e.constant;
  }

  // expr == 0
  void add_eq(const LinExpr& e) {
    eq_rows_.push_back(e);
  }

  // expr >= 0
  void add_nonneg(const LinExpr& e) { lp_rows_.push_back(e); }

  // ||u|| <= t
  void add_soc(const LinExpr& t, const std::vector<LinExpr>& u) {
    if (u.empty()) {
      add_nonneg(t);
      return;
    }
    SocBlock b;
    b.rows.push_back(t);
    for (const auto& e : u) b.rows.push_back(e);
    soc_blocks_.push_back(std::move(b));
  }

  ConicSolution solve(const IpmSettings& settings = {}) const {
    IpmProblem prob;
    prob.c = Eigen::VectorXd::Zero(n_vars_);
    for (auto [i, c] : obj_) prob.c(i) += c;

    const int p = static_cast<int>(eq_rows_.size());
    int m = static_cast<int>(lp_rows_.size());
    for (const auto& b : soc_blocks_) m += static_cast<int>(b.rows.size());

    std::vector<Eigen::Triplet<double>> ta, tg;
    prob.b = Eigen::VectorXd::Zero(p);
    prob.h = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < p; ++r) {
      for (auto [i, c] : eq_rows_[r].terms) ta.emplace_back(r, i, c);
      prob.b(r) = -eq_rows_[r].constant;
    }
    int row = 0;
    auto emit_cone_row = [&](const LinExpr& e) {
      for (auto [i, c] : e.terms) tg.emplace_back(row, i, -c);
      prob.h(row) = e.constant;
      ++row;
    };
    for (const auto& e : lp_rows_) emit_cone_row(e);
    prob.n_nonneg = row;
    for (const auto& b : soc_blocks_) {
      for (const auto& e : b.rows) emit_cone_row(e);
      prob.soc_dims.push_back(static_cast<int>(b.rows.size()));
    }

    prob.A.resize(p, n_vars_);
    prob.A.setFromTriplets(ta.begin(), ta.end());
    prob.G.resize(m, n_vars_);
    prob.G.setFromTriplets(tg.begin(), tg.end());

    IpmResult r = solve_ipm(prob, settings);
    ConicSolution sol;
    sol.x = r.x;
    sol.iterations = r.iterations;
    sol.message = r.message.empty() ? ipm_status_name(r.status) : r.message;
    switch (r.status) {
      case IpmStatus::Optimal:
        sol.status = ConicStatus::Optimal;
        break;
      case IpmStatus::OptimalInaccurate:
        sol.status = ConicStatus::Optimal;
        sol.accurate = false;
        break;
      case IpmStatus::PrimalInfeasible:
        sol.status = ConicStatus::Infeasible;
        break;
      case IpmStatus::DualInfeasible:
        sol.status = ConicStatus::Unbounded;
        break;
      default:
        sol.status = ConicStatus::NumericalFailure;
        break;
    }
    if (sol.ok()) sol.objective = prob.c.dot(sol.x) + obj_const_;
    return sol;
  }

  void dump(std::ostream& os) const {
    os << "# conic program dump v1\n";
    os << "vars " << n_vars_ << "\n";
    for (const auto& [name, v] : names_)
      os << "var " << name << " offset " << v.offset << " dim " << v.dim << "\n";
    os << std::setprecision(17);
    os << "minimize";
    for (auto [i, c] : obj_) os << " " << c << "*x" << i;
    if (obj_const_ != 0.0) os << " + " << obj_const_;
    os << "\n";
    auto put_expr = [&](const LinExpr& e) {
      for (auto [i, c] : e.terms) os << " " << c << "*x" << i;
      os << " + " << e.constant;
    };
    os << "equalities " << eq_rows_.size() << "\n";
    for (const auto& e : eq_rows_) {
      os << "eq";
      put_expr(e);
      os << " == 0\n";
    }
    os << "nonneg " << lp_rows_.size() << "\n";
    for (const auto& e : lp_rows_) {
      os << "ge";
      put_expr(e);
      os << " >= 0\n";
    }
    os << "soc " << soc_blocks_.size() << "\n";
    for (const auto& b : soc_blocks_) {
      os << "cone dim " << b.rows.size() << "\n";
      for (const auto& e : b.rows) {
        os << "  row";
        put_expr(e);
        os << "\n";
      }
    }
  }

 private:
  struct SocBlock {
    std::vector<LinExpr> rows;
  };

  int n_vars_ = 0;
  std::vector<std::pair<std::string, VarRef>> names_;
  std::vector<std::pair<int, double>> obj_;
  double obj_const_ = 0.0;
  std::vector<LinExpr> eq_rows_;
  std::vector<LinExpr> lp_rows_;
  std::vector<SocBlock> soc_blocks_;
};

}  // namespace tlgcs
