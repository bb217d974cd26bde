#pragma once

// Primal-dual interior-point method for conic programs in the standard form
//
//     min c'x   s.t.  A x = b,   G x + s = h,   s in K,
//
// where K is a product of a nonnegative orthant and second-order cones.
// Homogeneous self-dual embedding with Nesterov-Todd scaling and Mehrotra
// predictor-corrector steps; the KKT system is factored with a sparse LDL'
// using the expanded (sparsity-preserving) representation of the SOC
// scaling blocks. Static regularization plus iterative refinement keeps the
// quasidefinite factorization stable.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tlgcs/errors.hpp"

namespace tlgcs {

enum class IpmStatus {
  Optimal,
  OptimalInaccurate,
  PrimalInfeasible,
  DualInfeasible,
  MaxIterations,
  NumericalFailure,
};

inline const char* ipm_status_name(IpmStatus s) {
  switch (s) {
    case IpmStatus::Optimal: return "optimal";
    case IpmStatus::OptimalInaccurate: return "optimal_inaccurate";
    case IpmStatus::PrimalInfeasible: return "primal_infeasible";
    case IpmStatus::DualInfeasible: return "dual_infeasible";
    case IpmStatus::MaxIterations: return "max_iterations";
    case IpmStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

struct IpmSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol_inacc = 1e-4;
  double abstol_inacc = 5e-5;
  double reltol_inacc = 5e-5;
  int maxit = 100;
  int nitref = 9;
  double deltastat = 7e-8;
  double stepmin = 1e-6;
  double stepmax = 0.999;
  double sigmamin = 1e-4;
  double sigmamax = 0.8;
  double step_scale = 0.99;
  double linsysacc = 1e-14;
  double safeguard = 500.0;
  int equil_iters = 3;
};

struct IpmProblem {
  Eigen::SparseMatrix<double> A;  // p x n
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> G;  // m x n, nonneg rows first
  Eigen::VectorXd h;
  Eigen::VectorXd c;
  int n_nonneg = 0;
  std::vector<int> soc_dims;
};

struct IpmResult {
  IpmStatus status = IpmStatus::NumericalFailure;
  Eigen::VectorXd x, y, z, s;
  double pobj = 0.0;
  double dobj = 0.0;
  double gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  int iterations = 0;
  std::string message;

  bool ok() const { return status == IpmStatus::Optimal || status == IpmStatus::OptimalInaccurate; }
};

namespace ipm_detail {

struct SocScaling {
  int dim = 0;
  double eta = 1.0, eta2 = 1.0;
  double a = 1.0;       // first component of the scaling point
  Eigen::VectorXd q;    // remaining components (dim-1)
  double d1 = 1.0, u0 = 0.0, u1 = 0.0, v1 = 0.0;

  void reset(int d) {
    dim = d;
    eta = eta2 = 1.0;
    a = 1.0;
    q = Eigen::VectorXd::Zero(d - 1);
    d1 = 1.0;
    u0 = u1 = v1 = 0.0;
  }
};

class Solver {
 public:
  Solver(const IpmProblem& prob, const IpmSettings& settings)
      : st_(settings),
        n_(static_cast<int>(prob.c.size())),
        p_(static_cast<int>(prob.b.size())),
        l_(prob.n_nonneg),
        soc_dims_(prob.soc_dims),
        A_(prob.A),
        G_(prob.G),
        b_(prob.b),
        h_(prob.h),
        c_(prob.c) {
    m_ = l_;
    for (int q : soc_dims_) {
      if (q < 2) throw SolverFailure("ipm: SOC dimension must be at least 2");
      m_ += q;
    }
    if (G_.rows() != m_ || static_cast<int>(h_.size()) != m_)
      throw SolverFailure("ipm: cone row count mismatch");
    if (p_ == 0) {
      A_.resize(0, n_);
    } else if (A_.rows() != p_ || A_.cols() != n_) {
      throw SolverFailure("ipm: equality matrix shape mismatch");
    }
    if (G_.cols() != n_) throw SolverFailure("ipm: cone matrix shape mismatch");
    if (m_ == 0) throw SolverFailure("ipm: program has no conic constraints");
    degree_ = l_ + static_cast<int>(soc_dims_.size());
    mtilde_ = m_ + 2 * static_cast<int>(soc_dims_.size());
    dim_K_ = n_ + p_ + mtilde_;
    scal_.resize(soc_dims_.size());
    for (std::size_t i = 0; i < soc_dims_.size(); ++i) scal_[i].reset(soc_dims_[i]);
    equilibrate();
    setup_kkt();
  }

  IpmResult solve() {
    IpmResult res;
    if (!initialize(res)) {
      restore_scaling(res);
      return res;
    }

    double pres_prev = std::numeric_limits<double>::max();
    bool have_best = false;
    Iterate best;
    IpmStatus code = IpmStatus::MaxIterations;
    std::string message;

    for (iter_ = 0; iter_ <= st_.maxit; ++iter_) {
      compute_residuals();
      update_statistics();

      if (iter_ > 0 && (it_.pres > st_.safeguard * pres_prev || it_.gap < 0)) {
        if (have_best) it_ = best;
        code = check_exit(true);
        if (code == IpmStatus::MaxIterations) {
          code = IpmStatus::NumericalFailure;
          message = "unreliable search direction";
        }
        break;
      }
      pres_prev = it_.pres;

      code = check_exit(false);
      if (code != IpmStatus::MaxIterations) break;

      if (iter_ == st_.maxit) {
        if (have_best && !current_better_than(best)) it_ = best;
        code = check_exit(true);
        if (code == IpmStatus::MaxIterations) {
          code = IpmStatus::MaxIterations;
          message = "maximum iterations reached";
        }
        break;
      }
      if (!std::isfinite(it_.pcost)) {
        if (have_best) it_ = best;
        code = check_exit(true);
        if (code == IpmStatus::MaxIterations) {
          code = IpmStatus::NumericalFailure;
          message = "iterate diverged to non-finite values";
        }
        break;
      }
      if (iter_ > 0 && last_step_ <= st_.stepmin * st_.step_scale * 1.0000001) {
        if (have_best) it_ = best;
        code = check_exit(true);
        if (code == IpmStatus::MaxIterations) {
          code = IpmStatus::NumericalFailure;
          message = "line search stalled";
        }
        break;
      }

      if (!have_best || current_better_than(best)) {
        best = it_;
        have_best = true;
      }

      if (!update_scalings()) {
        if (have_best) it_ = best;
        code = check_exit(true);
        if (code == IpmStatus::MaxIterations) {
          code = IpmStatus::NumericalFailure;
          message = "iterate left the cone interior";
        }
        break;
      }
      update_kkt_values(false);
      if (!factorize()) {
        code = IpmStatus::NumericalFailure;
        message = "KKT factorization failed";
        break;
      }

      // Direction 1: K d1 = (-c, b, h)
      Eigen::VectorXd rhs1 = Eigen::VectorXd::Zero(dim_K_);
      rhs1.head(n_) = -c_;
      rhs1.segment(n_, p_) = b_;
      set_zpart(rhs1, h_);
      Eigen::VectorXd dx1(n_), dy1(p_), dz1(m_);
      solve_kkt(rhs1, dx1, dy1, dz1, false);

      // Affine direction: K d2 = (rx, -ry, s - rz)
      Eigen::VectorXd rhs2 = Eigen::VectorXd::Zero(dim_K_);
      rhs2.head(n_) = rx_;
      rhs2.segment(n_, p_) = -ry_;
      set_zpart(rhs2, it_.s - rz_);
      Eigen::VectorXd dx2(n_), dy2(p_), dz2(m_);
      solve_kkt(rhs2, dx2, dy2, dz2, false);

      const double dtau_denom = it_.kap / it_.tau - c_.dot(dx1) - b_.dot(dy1) - h_.dot(dz1);
      const double dtauaff = (rt_ - it_.kap + c_.dot(dx2) + b_.dot(dy2) + h_.dot(dz2)) / dtau_denom;

      Eigen::VectorXd dzaff = dz2 + dtauaff * dz1;
      Eigen::VectorXd W_dzaff(m_), dsaff_byW(m_);
      scale(dzaff, W_dzaff);
      dsaff_byW = -W_dzaff - lambda_;
      const double dkapaff = -it_.kap - it_.kap / it_.tau * dtauaff;

      const double step_aff =
          line_search(dsaff_byW, W_dzaff, it_.tau, dtauaff, it_.kap, dkapaff);
      const double sigma =
          std::clamp(std::pow(1.0 - step_aff, 3.0), st_.sigmamin, st_.sigmamax);

      // Combined direction.
      Eigen::VectorXd ds_comb(m_), tmp(m_);
      conic_product(lambda_, lambda_, ds_comb);
      conic_product(dsaff_byW, W_dzaff, tmp);
      ds_comb += tmp;
      add_neg_sigma_mu(ds_comb, sigma * it_.mu);

      Eigen::VectorXd lam_div(m_), W_lam_div(m_);
      conic_division(lambda_, ds_comb, lam_div);
      scale(lam_div, W_lam_div);

      const double one_minus_sigma = 1.0 - sigma;
      rhs2.head(n_) = one_minus_sigma * rx_;
      rhs2.segment(n_, p_) = -one_minus_sigma * ry_;
      set_zpart(rhs2, -one_minus_sigma * rz_ + W_lam_div);
      solve_kkt(rhs2, dx2, dy2, dz2, false);

      const double bkap = it_.kap * it_.tau + dkapaff * dtauaff - sigma * it_.mu;
      const double dtau =
          (one_minus_sigma * rt_ - bkap / it_.tau + c_.dot(dx2) + b_.dot(dy2) + h_.dot(dz2)) /
          dtau_denom;
      dx2 += dtau * dx1;
      dy2 += dtau * dy1;
      dz2 += dtau * dz1;

      Eigen::VectorXd W_dz(m_);
      scale(dz2, W_dz);
      Eigen::VectorXd ds_byW = -(lam_div + W_dz);
      const double dkap = -(bkap + it_.kap * dtau) / it_.tau;

      const double step =
          st_.step_scale * line_search(ds_byW, W_dz, it_.tau, dtau, it_.kap, dkap);
      last_step_ = step;

      Eigen::VectorXd ds(m_);
      scale(ds_byW, ds);

      it_.x += step * dx2;
      it_.y += step * dy2;
      it_.z += step * dz2;
      it_.s += step * ds;
      it_.kap += step * dkap;
      it_.tau += step * dtau;
    }

    res.status = code;
    res.message = message;
    res.iterations = iter_;
    restore_scaling(res);
    return res;
  }

 private:
  struct Iterate {
    Eigen::VectorXd x, y, z, s;
    double tau = 1.0, kap = 1.0;
    // statistics of this iterate
    double gap = 0, mu = 0, pcost = 0, dcost = 0, pres = 0, dres = 0, kapovert = 0;
    double cx = 0, by = 0, hz = 0;
    std::optional<double> relgap, pinfres, dinfres;
  };

  // ---- equilibration (Ruiz, cone-uniform row scales) ----
  void equilibrate() {
    e_A_ = Eigen::VectorXd::Ones(p_);
    e_G_ = Eigen::VectorXd::Ones(m_);
    d_ = Eigen::VectorXd::Ones(n_);
    for (int pass = 0; pass < st_.equil_iters; ++pass) {
      Eigen::VectorXd col(n_), rowA(p_), rowG(m_);
      col.setZero();
      rowA.setZero();
      rowG.setZero();
      for (int k = 0; k < A_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator itv(A_, k); itv; ++itv) {
          const double v = std::abs(itv.value());
          col(itv.col()) = std::max(col(itv.col()), v);
          rowA(itv.row()) = std::max(rowA(itv.row()), v);
        }
      for (int k = 0; k < G_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator itv(G_, k); itv; ++itv) {
          const double v = std::abs(itv.value());
          col(itv.col()) = std::max(col(itv.col()), v);
          rowG(itv.row()) = std::max(rowG(itv.row()), v);
        }
      // SOC rows share one scale.
      int base = l_;
      for (int q : soc_dims_) {
        const double mx = rowG.segment(base, q).maxCoeff();
        rowG.segment(base, q).setConstant(mx);
        base += q;
      }
      auto factor = [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; };
      Eigen::VectorXd fc = col.unaryExpr(factor), fa = rowA.unaryExpr(factor),
                      fg = rowG.unaryExpr(factor);
      A_ = fa.asDiagonal() * A_ * fc.asDiagonal();
      G_ = fg.asDiagonal() * G_ * fc.asDiagonal();
      d_ = d_.cwiseProduct(fc);
      e_A_ = e_A_.cwiseProduct(fa);
      e_G_ = e_G_.cwiseProduct(fg);
    }
    b_ = e_A_.cwiseProduct(b_);
    h_ = e_G_.cwiseProduct(h_);
    c_ = d_.cwiseProduct(c_);
    At_ = A_.transpose();
    Gt_ = G_.transpose();
    resx0_ = std::max(1.0, c_.norm());
    resy0_ = std::max(1.0, b_.norm());
    resz0_ = std::max(1.0, h_.norm());
  }

  void restore_scaling(IpmResult& res) {
    const double tau = (it_.tau > 0 && std::isfinite(it_.tau)) ? it_.tau : 1.0;
    res.x = d_.cwiseProduct(it_.x) / tau;
    res.y = e_A_.cwiseProduct(it_.y) / tau;
    res.z = e_G_.cwiseProduct(it_.z) / tau;
    res.s = it_.s.cwiseQuotient(e_G_) / tau;
    res.pobj = it_.pcost;
    res.dobj = it_.dcost;
    res.gap = it_.gap;
    res.pres = it_.pres;
    res.dres = it_.dres;
    res.iterations = iter_;
  }

  // ---- expanded z-block index helpers ----
  int expanded_row(int plain_row) const {
    if (plain_row < l_) return n_ + p_ + plain_row;
    int base = l_, xbase = l_;
    for (int q : soc_dims_) {
      if (plain_row < base + q) return n_ + p_ + xbase + (plain_row - base);
      base += q;
      xbase += q + 2;
    }
    throw SolverFailure("ipm: bad cone row");
  }

  void set_zpart(Eigen::VectorXd& rhs, const Eigen::VectorXd& plain) const {
    rhs.segment(n_ + p_, l_) = plain.head(l_);
    int base = l_, xbase = n_ + p_ + l_;
    for (int q : soc_dims_) {
      rhs.segment(xbase, q) = plain.segment(base, q);
      rhs(xbase + q) = 0.0;
      rhs(xbase + q + 1) = 0.0;
      base += q;
      xbase += q + 2;
    }
  }

  void get_zpart(const Eigen::VectorXd& full, Eigen::VectorXd& plain) const {
    plain.head(l_) = full.segment(n_ + p_, l_);
    int base = l_, xbase = n_ + p_ + l_;
    for (int q : soc_dims_) {
      plain.segment(base, q) = full.segment(xbase, q);
      base += q;
      xbase += q + 2;
    }
  }

  // ---- KKT assembly ----
  void setup_kkt() {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A_.nonZeros() + G_.nonZeros() + dim_K_ + 4 * m_));
    for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, st_.deltastat);
    for (int k = 0; k < A_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator itv(A_, k); itv; ++itv)
        trip.emplace_back(n_ + static_cast<int>(itv.row()), static_cast<int>(itv.col()),
                          itv.value());
    for (int i = 0; i < p_; ++i) trip.emplace_back(n_ + i, n_ + i, -st_.deltastat);
    for (int k = 0; k < G_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator itv(G_, k); itv; ++itv)
        trip.emplace_back(expanded_row(static_cast<int>(itv.row())), static_cast<int>(itv.col()),
                          itv.value());
    // Scaling block placeholders (values rewritten every iteration).
    for (int i = 0; i < l_; ++i) {
      const int r = n_ + p_ + i;
      trip.emplace_back(r, r, -1.0 - st_.deltastat);
    }
    int xbase = n_ + p_ + l_;
    for (int q : soc_dims_) {
      for (int i = 0; i < q; ++i) trip.emplace_back(xbase + i, xbase + i, -1.0 - st_.deltastat);
      trip.emplace_back(xbase + q, xbase + q, -1.0);
      for (int i = 1; i < q; ++i) trip.emplace_back(xbase + q, xbase + i, 0.0);
      trip.emplace_back(xbase + q + 1, xbase + q + 1, 1.0 + st_.deltastat);
      trip.emplace_back(xbase + q + 1, xbase + 0, 0.0);
      for (int i = 1; i < q; ++i) trip.emplace_back(xbase + q + 1, xbase + i, 0.0);
      xbase += q + 2;
    }
    K_.resize(dim_K_, dim_K_);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();
    ldlt_.analyzePattern(K_);

    // Record writable slots for the scaling entries.
    auto slot = [this](int row, int col) -> double* {
      for (int idx = K_.outerIndexPtr()[col]; idx < K_.outerIndexPtr()[col + 1]; ++idx)
        if (K_.innerIndexPtr()[idx] == row) return &K_.valuePtr()[idx];
      throw SolverFailure("ipm: missing KKT slot");
    };
    lp_slots_.clear();
    for (int i = 0; i < l_; ++i) lp_slots_.push_back(slot(n_ + p_ + i, n_ + p_ + i));
    soc_slots_.clear();
    xbase = n_ + p_ + l_;
    for (int q : soc_dims_) {
      SocSlots s;
      for (int i = 0; i < q; ++i) s.diag.push_back(slot(xbase + i, xbase + i));
      s.extra1 = slot(xbase + q, xbase + q);
      for (int i = 1; i < q; ++i) s.v.push_back(slot(xbase + q, xbase + i));
      s.extra2 = slot(xbase + q + 1, xbase + q + 1);
      s.u.push_back(slot(xbase + q + 1, xbase + 0));
      for (int i = 1; i < q; ++i) s.u.push_back(slot(xbase + q + 1, xbase + i));
      soc_slots_.push_back(std::move(s));
      xbase += q + 2;
    }
  }

  void update_kkt_values(bool identity) {
    for (int i = 0; i < l_; ++i)
      *lp_slots_[i] = -(identity ? 1.0 : lp_w2_(i)) - st_.deltastat;
    for (std::size_t ci = 0; ci < soc_dims_.size(); ++ci) {
      const SocSlots& sl = soc_slots_[ci];
      const SocScaling& sc = scal_[ci];
      const int q = soc_dims_[ci];
      if (identity) {
        for (int i = 0; i < q; ++i) *sl.diag[i] = -1.0 - st_.deltastat;
        *sl.extra1 = -1.0;
        for (double* pv : sl.v) *pv = 0.0;
        *sl.extra2 = 1.0 + st_.deltastat;
        for (double* pu : sl.u) *pu = 0.0;
      } else {
        *sl.diag[0] = -sc.eta2 * sc.d1 - st_.deltastat;
        for (int i = 1; i < q; ++i) *sl.diag[i] = -sc.eta2 - st_.deltastat;
        *sl.extra1 = -sc.eta2;
        for (int i = 1; i < q; ++i) *sl.v[i - 1] = -sc.eta2 * sc.v1 * sc.q(i - 1);
        *sl.extra2 = sc.eta2 + st_.deltastat;
        *sl.u[0] = -sc.eta2 * sc.u0;
        for (int i = 1; i < q; ++i) *sl.u[i] = -sc.eta2 * sc.u1 * sc.q(i - 1);
      }
    }
  }

  bool factorize() {
    ldlt_.factorize(K_);
    return ldlt_.info() == Eigen::Success;
  }

  // y = M x for the current (3,3) scaling block (including static reg),
  // operating on expanded coordinates. `identity` selects the init block.
  void zblock_mult(const Eigen::VectorXd& x, Eigen::VectorXd& y, bool identity) const {
    for (int i = 0; i < l_; ++i)
      y(i) = (-(identity ? 1.0 : lp_w2_(i)) - st_.deltastat) * x(i);
    int xb = l_;
    for (std::size_t ci = 0; ci < soc_dims_.size(); ++ci) {
      const int q = soc_dims_[ci];
      const SocScaling& sc = scal_[ci];
      const double eta2 = identity ? 1.0 : sc.eta2;
      const double d1 = identity ? 1.0 : sc.d1;
      const double u0 = identity ? 0.0 : sc.u0;
      const double u1 = identity ? 0.0 : sc.u1;
      const double v1 = identity ? 0.0 : sc.v1;
      const auto xq = x.segment(xb, q);
      const double x3 = x(xb + q), x4 = x(xb + q + 1);
      double qtx2 = 0.0;
      if (q > 1 && !identity) qtx2 = sc.q.dot(xq.tail(q - 1));
      y(xb) = (-eta2 * d1 - st_.deltastat) * xq(0) - eta2 * u0 * x4;
      for (int i = 1; i < q; ++i)
        y(xb + i) = (-eta2 - st_.deltastat) * xq(i) -
                    (identity ? 0.0 : eta2 * (v1 * x3 + u1 * x4) * sc.q(i - 1));
      y(xb + q) = -eta2 * x3 - (identity ? 0.0 : eta2 * v1 * qtx2);
      y(xb + q + 1) = (eta2 + st_.deltastat) * x4 - eta2 * u0 * xq(0) -
                      (identity ? 0.0 : eta2 * u1 * qtx2);
      xb += q + 2;
    }
  }

  int solve_kkt(const Eigen::VectorXd& rhs, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                Eigen::VectorXd& dz, bool identity) {
    Eigen::VectorXd sol = ldlt_.solve(rhs);
    const double thresh = (1.0 + rhs.lpNorm<Eigen::Infinity>()) * st_.linsysacc;
    double prev_err = std::numeric_limits<double>::max();
    Eigen::VectorXd ref(dim_K_);
    int k = 0;
    for (; k <= st_.nitref; ++k) {
      // Residual of the true (regularized) KKT system.
      Eigen::VectorXd err(dim_K_);
      Eigen::VectorXd zexp = sol.tail(mtilde_);
      Eigen::VectorXd dz_plain(m_);
      get_zpart(sol, dz_plain);
      const auto dxc = sol.head(n_);
      const auto dyc = sol.segment(n_, p_);
      err.head(n_) = rhs.head(n_) - st_.deltastat * dxc - Gt_ * dz_plain;
      if (p_ > 0) err.head(n_) -= At_ * dyc;
      err.segment(n_, p_) = rhs.segment(n_, p_) - A_ * dxc + st_.deltastat * dyc;
      Eigen::VectorXd Gdx = G_ * dxc;
      Eigen::VectorXd Gdx_exp = Eigen::VectorXd::Zero(mtilde_);
      set_zpart_from_plain(Gdx, Gdx_exp);
      Eigen::VectorXd Mz(mtilde_);
      zblock_mult(zexp, Mz, identity);
      err.tail(mtilde_) = rhs.tail(mtilde_) - Gdx_exp - Mz;

      const double nerr = err.lpNorm<Eigen::Infinity>();
      if (k > 0 && nerr > prev_err) {
        sol -= ref;
        --k;
        break;
      }
      if (nerr < thresh || k == st_.nitref || (k > 0 && prev_err < 4.0 * nerr)) break;
      prev_err = nerr;
      ref = ldlt_.solve(err);
      sol += ref;
    }
    dx = sol.head(n_);
    dy = sol.segment(n_, p_);
    get_zpart(sol, dz);
    return k;
  }

  void set_zpart_from_plain(const Eigen::VectorXd& plain, Eigen::VectorXd& exp) const {
    exp.head(l_) = plain.head(l_);
    int base = l_, xb = l_;
    for (int q : soc_dims_) {
      exp.segment(xb, q) = plain.segment(base, q);
      exp(xb + q) = 0.0;
      exp(xb + q + 1) = 0.0;
      base += q;
      xb += q + 2;
    }
  }

  // ---- cone algebra (plain m-dimensional vectors) ----
  void bring_to_cone(const Eigen::VectorXd& r, Eigen::VectorXd& out) const {
    double alpha = -0.99;
    for (int i = 0; i < l_; ++i) alpha = std::max(alpha, -r(i));
    int base = l_;
    for (int q : soc_dims_) {
      alpha = std::max(alpha, r.segment(base + 1, q - 1).norm() - r(base));
      base += q;
    }
    out = r;
    if (alpha >= 0) {
      const double shift = 1.0 + alpha;
      out.head(l_).array() += shift;
      base = l_;
      for (int q : soc_dims_) {
        out(base) += shift;
        base += q;
      }
    }
  }

  bool update_scalings() {
    lp_w2_ = it_.s.head(l_).cwiseQuotient(it_.z.head(l_));
    lp_w_ = lp_w2_.cwiseSqrt();
    if (l_ > 0 && !(lp_w2_.allFinite() && lp_w2_.minCoeff() > 0)) return false;
    int base = l_;
    for (std::size_t ci = 0; ci < soc_dims_.size(); ++ci) {
      const int q = soc_dims_[ci];
      SocScaling& sc = scal_[ci];
      const auto s = it_.s.segment(base, q);
      const auto z = it_.z.segment(base, q);
      const double sres = s(0) * s(0) - s.tail(q - 1).squaredNorm();
      const double zres = z(0) * z(0) - z.tail(q - 1).squaredNorm();
      if (sres <= 0 || zres <= 0) return false;
      const double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
      Eigen::VectorXd sbar = s / snorm, zbar = z / znorm;
      sc.eta2 = snorm / znorm;
      sc.eta = std::sqrt(sc.eta2);
      double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
      sc.a = (0.5 / gamma) * (sbar(0) + zbar(0));
      sc.q = (0.5 / gamma) * (sbar.tail(q - 1) - zbar.tail(q - 1));
      const double w = sc.q.squaredNorm();
      const double cc = (1.0 + sc.a) + w / (1.0 + sc.a);
      const double dd = 1.0 + 2.0 / (1.0 + sc.a) + w / ((1.0 + sc.a) * (1.0 + sc.a));
      const double d1 = std::max(0.0, 0.5 * (sc.a * sc.a + w * (1.0 - (cc * cc) / (1.0 + w * dd))));
      const double u0sq = sc.a * sc.a + w - d1;
      const double c2byu02 = (cc * cc) / u0sq;
      if (c2byu02 - dd <= 0) return false;
      sc.d1 = d1;
      sc.u0 = std::sqrt(u0sq);
      sc.u1 = std::sqrt(c2byu02);
      sc.v1 = std::sqrt(c2byu02 - dd);
      base += q;
    }
    scale(it_.z, lambda_);
    return true;
  }

  // lambda = W z
  void scale(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
    out.head(l_) = lp_w_.cwiseProduct(z.head(l_));
    int base = l_;
    for (std::size_t ci = 0; ci < soc_dims_.size(); ++ci) {
      const int q = soc_dims_[ci];
      const SocScaling& sc = scal_[ci];
      const auto z1 = z.segment(base + 1, q - 1);
      const double zeta = sc.q.dot(z1);
      const double factor = z(base) + zeta / (1.0 + sc.a);
      out(base) = sc.eta * (sc.a * z(base) + zeta);
      out.segment(base + 1, q - 1) = sc.eta * (z1 + factor * sc.q);
      base += q;
    }
  }

  // w = u o v (Jordan product), per cone
  void conic_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                     Eigen::VectorXd& w) const {
    w.head(l_) = u.head(l_).cwiseProduct(v.head(l_));
    int base = l_;
    for (int q : soc_dims_) {
      w(base) = u.segment(base, q).dot(v.segment(base, q));
      w.segment(base + 1, q - 1) =
          u(base) * v.segment(base + 1, q - 1) + v(base) * u.segment(base + 1, q - 1);
      base += q;
    }
  }

  // v = u \ w (inverse Jordan product)
  void conic_division(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                      Eigen::VectorXd& v) const {
    v.head(l_) = w.head(l_).cwiseQuotient(u.head(l_));
    int base = l_;
    for (int q : soc_dims_) {
      const double u0 = u(base), w0 = w(base);
      const auto u1 = u.segment(base + 1, q - 1);
      const auto w1 = w.segment(base + 1, q - 1);
      const double rho = u0 * u0 - u1.squaredNorm();
      const double zeta = u1.dot(w1);
      const double factor = (zeta / u0 - w0) / rho;
      v(base) = (u0 * w0 - zeta) / rho;
      v.segment(base + 1, q - 1) = factor * u1 + w1 / u0;
      base += q;
    }
  }

  void add_neg_sigma_mu(Eigen::VectorXd& v, double sigmamu) const {
    v.head(l_).array() -= sigmamu;
    int base = l_;
    for (int q : soc_dims_) {
      v(base) -= sigmamu;
      base += q;
    }
  }

  // Largest step with lambda + alpha * d staying in the cone (scaled space).
  double line_search(const Eigen::VectorXd& ds, const Eigen::VectorXd& dz, double tau,
                     double dtau, double kap, double dkap) const {
    double alpha = 2.0;
    if (l_ > 0) {
      const double rhomin = (ds.head(l_).cwiseQuotient(lambda_.head(l_))).minCoeff();
      const double sigmin = (dz.head(l_).cwiseQuotient(lambda_.head(l_))).minCoeff();
      const double worst = std::min(rhomin, sigmin);
      if (worst < 0) alpha = std::min(alpha, 1.0 / (-worst));
    }
    if (dtau < 0) alpha = std::min(alpha, -tau / dtau);
    if (dkap < 0) alpha = std::min(alpha, -kap / dkap);
    int base = l_;
    for (int q : soc_dims_) {
      const double lk2 =
          lambda_(base) * lambda_(base) - lambda_.segment(base + 1, q - 1).squaredNorm();
      if (lk2 <= 0) {
        base += q;
        continue;
      }
      const double lknorm = std::sqrt(lk2);
      Eigen::VectorXd lkbar = lambda_.segment(base, q) / lknorm;
      const double inv = 1.0 / lknorm;
      auto cone_rate = [&](const Eigen::VectorXd& dvec) {
        const double lk_dot = lkbar(0) * dvec(base) -
                              lkbar.tail(q - 1).dot(dvec.segment(base + 1, q - 1));
        const double f = (lk_dot + dvec(base)) / (lkbar(0) + 1.0);
        Eigen::VectorXd r(q);
        r(0) = inv * lk_dot;
        r.tail(q - 1) = inv * (dvec.segment(base + 1, q - 1) - f * lkbar.tail(q - 1));
        return r.tail(q - 1).norm() - r(0);
      };
      const double worst = std::max({0.0, cone_rate(ds), cone_rate(dz)});
      if (worst > 0) alpha = std::min(alpha, 1.0 / worst);
      base += q;
    }
    return std::clamp(alpha, st_.stepmin, st_.stepmax);
  }

  // ---- residuals, statistics, exit tests ----
  void compute_residuals() {
    rx_ = -(Gt_ * it_.z);
    if (p_ > 0) rx_ -= At_ * it_.y;
    hresx_ = rx_.norm();
    rx_ -= it_.tau * c_;

    if (p_ > 0) {
      ry_ = A_ * it_.x;
      hresy_ = ry_.norm();
      ry_ -= it_.tau * b_;
    } else {
      ry_.resize(0);
      hresy_ = 0.0;
    }

    rz_ = it_.s + G_ * it_.x;
    hresz_ = rz_.norm();
    rz_ -= it_.tau * h_;

    it_.cx = c_.dot(it_.x);
    it_.by = p_ > 0 ? b_.dot(it_.y) : 0.0;
    it_.hz = h_.dot(it_.z);
    rt_ = it_.kap + it_.cx + it_.by + it_.hz;
  }

  void update_statistics() {
    it_.gap = it_.s.dot(it_.z);
    it_.mu = (it_.gap + it_.kap * it_.tau) / (degree_ + 1);
    it_.kapovert = it_.kap / it_.tau;
    it_.pcost = it_.cx / it_.tau;
    it_.dcost = -(it_.hz + it_.by) / it_.tau;
    if (it_.pcost < 0)
      it_.relgap = it_.gap / (-it_.pcost);
    else if (it_.dcost > 0)
      it_.relgap = it_.gap / it_.dcost;
    else
      it_.relgap.reset();

    const double nx = it_.x.norm(), ny = it_.y.norm(), nz = it_.z.norm(), ns = it_.s.norm();
    const double nry = p_ > 0 ? ry_.norm() / std::max(resy0_ + nx, 1.0) : 0.0;
    const double nrz = rz_.norm() / std::max(resz0_ + nx + ns, 1.0);
    it_.pres = std::max(nry, nrz) / it_.tau;
    it_.dres = rx_.norm() / std::max(resx0_ + ny + nz, 1.0) / it_.tau;

    it_.pinfres.reset();
    it_.dinfres.reset();
    if ((it_.hz + it_.by) / std::max(ny + nz, 1.0) < -st_.reltol)
      it_.pinfres = hresx_ / std::max(ny + nz, 1.0);
    if (it_.cx / std::max(nx, 1.0) < -st_.reltol)
      it_.dinfres = std::max(hresy_ / std::max(nx, 1.0), hresz_ / std::max(nx + ns, 1.0));
  }

  IpmStatus check_exit(bool reduced) const {
    const double feastol = reduced ? st_.feastol_inacc : st_.feastol;
    const double abstol = reduced ? st_.abstol_inacc : st_.abstol;
    const double reltol = reduced ? st_.reltol_inacc : st_.reltol;

    if ((-it_.cx > 0 || -it_.by - it_.hz >= -abstol) && it_.pres < feastol && it_.dres < feastol &&
        (it_.gap < abstol || (it_.relgap && *it_.relgap < reltol)))
      return reduced ? IpmStatus::OptimalInaccurate : IpmStatus::Optimal;
    if (it_.dinfres && *it_.dinfres < feastol && it_.tau < it_.kap)
      return IpmStatus::DualInfeasible;
    if ((it_.pinfres && *it_.pinfres < feastol && it_.tau < it_.kap) ||
        (it_.tau < feastol && it_.kap < feastol && it_.pinfres && *it_.pinfres < feastol))
      return IpmStatus::PrimalInfeasible;
    return IpmStatus::MaxIterations;  // i.e. keep going
  }

  bool current_better_than(const Iterate& other) const {
    if (it_.pinfres && it_.kapovert > 1.0)
      return it_.gap > 0 && other.gap > 0 && it_.gap < other.gap &&
             (!other.pinfres || (*it_.pinfres > 0 && *it_.pinfres < other.pres)) &&
             it_.mu > 0 && it_.mu < other.mu;
    return it_.gap > 0 && other.gap > 0 && it_.gap < other.gap && it_.pres > 0 &&
           it_.pres < other.pres && it_.dres > 0 && it_.dres < other.dres &&
           it_.kapovert > 0 && it_.kapovert < other.kapovert && it_.mu > 0 && it_.mu < other.mu;
  }

  bool initialize(IpmResult& res) {
    update_kkt_values(true);
    if (!factorize()) {
      res.status = IpmStatus::NumericalFailure;
      res.message = "initial KKT factorization failed";
      it_.x = Eigen::VectorXd::Zero(n_);
      it_.y = Eigen::VectorXd::Zero(p_);
      it_.z = Eigen::VectorXd::Zero(m_);
      it_.s = Eigen::VectorXd::Zero(m_);
      return false;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim_K_);
    rhs.segment(n_, p_) = b_;
    set_zpart(rhs, h_);
    Eigen::VectorXd dx(n_), dy(p_), dz(m_);
    solve_kkt(rhs, dx, dy, dz, true);
    it_.x = dx;
    it_.s.resize(m_);
    bring_to_cone(-dz, it_.s);

    rhs.setZero();
    rhs.head(n_) = -c_;
    solve_kkt(rhs, dx, dy, dz, true);
    it_.y = dy;
    it_.z.resize(m_);
    bring_to_cone(dz, it_.z);

    it_.tau = 1.0;
    it_.kap = 1.0;
    lambda_.resize(m_);
    return true;
  }

  struct SocSlots {
    std::vector<double*> diag;
    double* extra1 = nullptr;
    std::vector<double*> v;
    double* extra2 = nullptr;
    std::vector<double*> u;
  };

  IpmSettings st_;
  int n_, p_, l_, m_ = 0, degree_ = 0, mtilde_ = 0, dim_K_ = 0;
  std::vector<int> soc_dims_;
  Eigen::SparseMatrix<double> A_, G_, At_, Gt_;
  Eigen::VectorXd b_, h_, c_;
  Eigen::VectorXd e_A_, e_G_, d_;
  double resx0_ = 1, resy0_ = 1, resz0_ = 1;

  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                        Eigen::AMDOrdering<int>>
      ldlt_;
  std::vector<double*> lp_slots_;
  std::vector<SocSlots> soc_slots_;

  Eigen::VectorXd lp_w2_, lp_w_;
  std::vector<SocScaling> scal_;
  Eigen::VectorXd lambda_;

  Iterate it_;
  Eigen::VectorXd rx_, ry_, rz_;
  double hresx_ = 0, hresy_ = 0, hresz_ = 0;
  double rt_ = 0;
  int iter_ = 0;
  double last_step_ = 1.0;
};

}  // namespace ipm_detail

inline IpmResult solve_ipm(const IpmProblem& prob, const IpmSettings& settings = {}) {
  ipm_detail::Solver solver(prob, settings);
  return solver.solve();
}

}  // namespace tlgcs
