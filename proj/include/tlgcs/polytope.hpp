#pragma once

// H-polytopes {x : Ax <= b} with labeled-region wrappers and the
// feasibility queries the abstraction needs (intersection test and
// Chebyshev center, both via the conic backend).

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlgcs/conic.hpp"
#include "tlgcs/errors.hpp"
#include "tlgcs/word.hpp"

namespace tlgcs {

// Solver-level feasibility tolerance; user-facing containment tolerance.
constexpr double kFeasTol = 1e-8;
constexpr double kContainTol = 1e-6;

class HPolytope {
 public:
  HPolytope() = default;
  HPolytope(Eigen::MatrixXd A, Eigen::VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() != b_.size()) throw DimensionMismatch("polytope: A rows != b size");
    if (A_.rows() < 1) throw DimensionMismatch("polytope: need at least one inequality");
    if (!A_.allFinite() || !b_.allFinite()) throw Error("polytope: non-finite data");
  }

  static HPolytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() != hi.size()) throw DimensionMismatch("box: lo/hi size mismatch");
    const int n = static_cast<int>(lo.size());
    Eigen::MatrixXd A(2 * n, n);
    Eigen::VectorXd b(2 * n);
    A.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    A.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    b.head(n) = hi;
    b.tail(n) = -lo;
    return HPolytope(std::move(A), std::move(b));
  }

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  int dim() const { return static_cast<int>(A_.cols()); }
  int rows() const { return static_cast<int>(A_.rows()); }

  bool contains(const Eigen::VectorXd& x, double tol = kContainTol) const {
    if (x.size() != A_.cols()) throw DimensionMismatch("contains: point dimension mismatch");
    return ((A_ * x - b_).array() <= tol).all();
  }

  // Block-diagonal Cartesian power: copies points stacked, one block per copy.
  HPolytope power(int copies) const {
    if (copies < 1) throw DimensionMismatch("power: need at least one copy");
    const int n = dim(), m = rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * copies, n * copies);
    Eigen::VectorXd b(m * copies);
    for (int i = 0; i < copies; ++i) {
      A.block(i * m, i * n, m, n) = A_;
      b.segment(i * m, m) = b_;
    }
    return HPolytope(std::move(A), std::move(b));
  }

  // Singleton {x0} as a polytope (x <= x0, -x <= -x0).
  static HPolytope point(const Eigen::VectorXd& x0) {
    const int n = static_cast<int>(x0.size());
    Eigen::MatrixXd A(2 * n, n);
    A.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    A.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(2 * n);
    b.head(n) = x0;
    b.tail(n) = -x0;
    return HPolytope(std::move(A), std::move(b));
  }

  // Bounded iff the recession cone {d : Ad <= 0} is trivial. Decided by 2n
  // LPs maximizing +-d_i over the recession directions in the unit cube.
  bool is_bounded() const {
    if (bounded_.has_value()) return *bounded_;
    bool bounded = true;
    for (int i = 0; i < dim() && bounded; ++i) {
      for (int sgn : {+1, -1}) {
        ConicProgram cp;
        VarRef d = cp.add_var("d", dim());
        LinExpr obj;
        obj.add(d, i, -sgn);  // maximize sgn * d_i
        cp.add_objective(obj);
        for (int r = 0; r < rows(); ++r) {
          LinExpr row;  // -A_r d >= 0
          for (int j = 0; j < dim(); ++j) row.add(d, j, -A_(r, j));
          cp.add_nonneg(row);
        }
        for (int j = 0; j < dim(); ++j) {
          LinExpr up, lo;
          up.add(d, j, -1.0).add_const(1.0);
          lo.add(d, j, 1.0).add_const(1.0);
          cp.add_nonneg(up);
          cp.add_nonneg(lo);
        }
        ConicSolution sol = cp.solve();
        if (!sol.ok()) throw SolverFailure("is_bounded: backend failure: " + sol.message);
        if (-sol.objective > 1e-6) {
          bounded = false;
          break;
        }
      }
    }
    bounded_ = bounded;
    return bounded;
  }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  mutable std::optional<bool> bounded_;
};

struct LabeledRegion {
  HPolytope poly;
  Label label;
  std::string name;
};

inline bool contains(const HPolytope& P, const Eigen::VectorXd& x, double tol = kContainTol) {
  return P.contains(x, tol);
}

// Nonempty intersection of two polytopes (closed sets: boundary contact
// counts), decided by a phase-1 LP on the stacked system:
//   min t  s.t.  A_P x - t <= b_P,  A_Q x - t <= b_Q,  t >= -1.
inline bool intersects(const HPolytope& P, const HPolytope& Q) {
  if (P.dim() != Q.dim()) throw DimensionMismatch("intersects: ambient dimension mismatch");
  ConicProgram cp;
  VarRef x = cp.add_var("x", P.dim());
  VarRef t = cp.add_var("t", 1);
  LinExpr obj;
  obj.add(t, 0, 1.0);
  cp.add_objective(obj);
  auto add_rows = [&](const HPolytope& R) {
    for (int r = 0; r < R.rows(); ++r) {
      LinExpr row;  // b_r - A_r x + t >= 0
      for (int j = 0; j < R.dim(); ++j) row.add(x, j, -R.A()(r, j));
      row.add(t, 0, 1.0).add_const(R.b()(r));
      cp.add_nonneg(row);
    }
  };
  add_rows(P);
  add_rows(Q);
  LinExpr tlow;
  tlow.add(t, 0, 1.0).add_const(1.0);
  cp.add_nonneg(tlow);
  ConicSolution sol = cp.solve();
  if (!sol.ok())
    throw SolverFailure("intersects: feasibility LP failed: " + sol.message);
  return sol.objective <= kFeasTol;
}

// Center and radius of the largest inscribed ball. Radius zero means empty
// interior; an infeasible polytope is reported as an error.
inline std::pair<Eigen::VectorXd, double> chebyshev_center(const HPolytope& P) {
  ConicProgram cp;
  VarRef x = cp.add_var("x", P.dim());
  VarRef r = cp.add_var("r", 1);
  LinExpr obj;
  obj.add(r, 0, -1.0);  // maximize r
  cp.add_objective(obj);
  for (int i = 0; i < P.rows(); ++i) {
    const double an = P.A().row(i).norm();
    LinExpr row;  // b_i - A_i x - ||A_i|| r >= 0
    for (int j = 0; j < P.dim(); ++j) row.add(x, j, -P.A()(i, j));
    row.add(r, 0, -an).add_const(P.b()(i));
    cp.add_nonneg(row);
  }
  LinExpr rpos;
  rpos.add(r, 0, 1.0);
  cp.add_nonneg(rpos);
  ConicSolution sol = cp.solve();
  if (sol.status == ConicStatus::Infeasible)
    throw SolverFailure("chebyshev_center: polytope is infeasible");
  if (sol.status == ConicStatus::Unbounded)
    throw SolverFailure("chebyshev_center: inscribed radius is unbounded");
  if (!sol.ok()) throw SolverFailure("chebyshev_center: backend failure: " + sol.message);
  return {sol.value(x), sol.value(r)(0)};
}

}  // namespace tlgcs
