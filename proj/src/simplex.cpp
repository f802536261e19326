#include "dlpd/simplex.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dlpd {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    const Index n = lp.num_variables();
    m_ = lp.num_constraints();

    // Standard-form structural columns.
    for (Index j = 0; j < n; ++j) {
      pos_col_.push_back(ns_++);
      neg_col_.push_back(lp.free_variable[static_cast<std::size_t>(j)] ? ns_++ : -1);
    }
    slack0_ = ns_;
    art0_ = slack0_ + m_;
    Index na = 0;
    for (Index i = 0; i < m_; ++i) na += lp.bounds[i] < 0.0 ? 1 : 0;
    cols_ = art0_ + na;
    rhs_ = cols_;

    t_ = RowMatrix::Zero(m_, cols_ + 1);
    cost_ = RowVector::Zero(cols_);
    for (Index j = 0; j < n; ++j) {
      cost_[pos_col_[static_cast<std::size_t>(j)]] = lp.cost[j];
      if (neg_col_[static_cast<std::size_t>(j)] >= 0) {
        cost_[neg_col_[static_cast<std::size_t>(j)]] = -lp.cost[j];
      }
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    Index next_art = art0_;
    for (Index i = 0; i < m_; ++i) {
      const double sign = lp.bounds[i] < 0.0 ? -1.0 : 1.0;
      for (Index j = 0; j < n; ++j) {
        const double a = sign * lp.constraints(i, j);
        t_(i, pos_col_[static_cast<std::size_t>(j)]) = a;
        if (neg_col_[static_cast<std::size_t>(j)] >= 0) t_(i, neg_col_[static_cast<std::size_t>(j)]) = -a;
      }
      t_(i, slack0_ + i) = sign;
      t_(i, rhs_) = sign * lp.bounds[i];
      if (sign < 0.0) {
        t_(i, next_art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = next_art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = slack0_ + i;
      }
    }
    original_ = t_;
  }

  LpResult run(const LinearProgram& lp) {
    LpResult res;
    if (cols_ > art0_) {
      // Phase 1: minimise the sum of artificials.
      obj_ = RowVector::Zero(cols_ + 1);
      obj_.segment(art0_, cols_ - art0_).setOnes();
      for (Index i = 0; i < m_; ++i) {
        if (is_artificial(basis_[static_cast<std::size_t>(i)])) obj_ -= t_.row(i);
      }
      const LpStatus s = iterate(/*allow_artificial=*/true);
      if (s == LpStatus::IterationLimit) return finish(res, s, "iteration cap hit in phase 1");
      const double infeas = -obj_[rhs_];
      const double scale = std::max(1.0, lp.bounds.cwiseAbs().maxCoeff());
      if (infeas > opt_.feas_tol * scale) {
        std::ostringstream os;
        os << "phase 1 ended with artificial sum " << infeas;
        return finish(res, LpStatus::Infeasible, os.str());
      }
      drive_out_artificials();
    }

    // Phase 2.
    obj_ = RowVector::Zero(cols_ + 1);
    obj_.head(cols_) = cost_;
    for (Index i = 0; i < m_; ++i) {
      const Index b = basis_[static_cast<std::size_t>(i)];
      if (cost_[b] != 0.0) obj_ -= cost_[b] * t_.row(i);
    }
    const LpStatus s = iterate(/*allow_artificial=*/false);
    if (s != LpStatus::Optimal) {
      return finish(res, s, s == LpStatus::Unbounded ? "objective unbounded below"
                                                     : "iteration cap hit in phase 2");
    }

    Vector xs = refined_basic_solution();
    res.x.resize(lp.num_variables());
    for (Index j = 0; j < lp.num_variables(); ++j) {
      double v = xs[pos_col_[static_cast<std::size_t>(j)]];
      if (neg_col_[static_cast<std::size_t>(j)] >= 0) v -= xs[neg_col_[static_cast<std::size_t>(j)]];
      res.x[j] = v;
    }
    res.objective = lp.cost.dot(res.x);
    return finish(res, LpStatus::Optimal, "");
  }

 private:
  bool is_artificial(Index col) const { return col >= art0_; }

  LpResult& finish(LpResult& r, LpStatus s, std::string diag) {
    r.status = s;
    r.iterations = pivots_;
    r.degenerate_pivots = degenerate_;
    r.used_bland = bland_;
    r.diagnostic = std::move(diag);
    return r;
  }

  LpStatus iterate(bool allow_artificial) {
    const Index limit = allow_artificial ? cols_ : art0_;
    for (;;) {
      Index enter = -1;
      if (bland_) {
        for (Index j = 0; j < limit; ++j) {
          if (obj_[j] < -opt_.opt_tol) {
            enter = j;
            break;
          }
        }
      } else {
        double best = -opt_.opt_tol;
        for (Index j = 0; j < limit; ++j) {
          if (obj_[j] < best) {
            best = obj_[j];
            enter = j;
          }
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(t_(i, rhs_), 0.0) / a;
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-12) {
          const bool better =
              bland_ ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                     : a > t_(leave, enter);
          if (better) {
            leave = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      if (pivots_ >= opt_.max_pivots) return LpStatus::IterationLimit;

      if (best_ratio <= opt_.feas_tol) {
        if (++degenerate_ >= opt_.bland_after_degenerate) bland_ = true;
      }
      pivot(leave, enter);
    }
  }

  void pivot(Index r, Index s) {
    ++pivots_;
    t_.row(r) /= t_(r, s);
    const RowVector prow = t_.row(r);
    Vector col = t_.col(s);
    col[r] = 0.0;
    t_.noalias() -= col * prow;
    t_.col(s).setZero();
    t_(r, s) = 1.0;
    obj_ -= obj_[s] * prow;
    obj_[s] = 0.0;
    basis_[static_cast<std::size_t>(r)] = s;
  }

  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      Index best = -1;
      double best_abs = opt_.pivot_tol;
      for (Index j = 0; j < art0_; ++j) {
        if (std::abs(t_(i, j)) > best_abs) {
          best_abs = std::abs(t_(i, j));
          best = j;
        }
      }
      // No candidate: the row is redundant and its artificial stays at zero.
      if (best >= 0) pivot(i, best);
    }
  }

  Vector refined_basic_solution() const {
    Vector xs = Vector::Zero(cols_);
    Matrix b(m_, m_);
    for (Index i = 0; i < m_; ++i) b.col(i) = original_.col(basis_[static_cast<std::size_t>(i)]);
    const Eigen::PartialPivLU<Matrix> lu(b);
    Vector xb = lu.solve(original_.col(rhs_));
    const bool sane = xb.allFinite() &&
                      (xb - t_.col(rhs_)).cwiseAbs().maxCoeff() <=
                          1e-6 * std::max(1.0, t_.col(rhs_).cwiseAbs().maxCoeff());
    if (!sane) xb = t_.col(rhs_);
    for (Index i = 0; i < m_; ++i) {
      xs[basis_[static_cast<std::size_t>(i)]] = std::max(xb[i], 0.0);
    }
    return xs;
  }

  SimplexOptions opt_;
  Index m_ = 0;
  Index ns_ = 0;
  Index slack0_ = 0;
  Index art0_ = 0;
  Index cols_ = 0;
  Index rhs_ = 0;
  std::vector<Index> pos_col_;
  std::vector<Index> neg_col_;
  std::vector<Index> basis_;
  RowMatrix t_;
  RowMatrix original_;
  RowVector cost_;
  RowVector obj_;
  Index pivots_ = 0;
  Index degenerate_ = 0;
  bool bland_ = false;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  const Index n = lp.num_variables();
  if (lp.constraints.cols() != n || lp.bounds.size() != lp.num_constraints() ||
      static_cast<Index>(lp.free_variable.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, "solve_lp: inconsistent problem dimensions");
  }
  if (!lp.constraints.allFinite() || !lp.bounds.allFinite() || !lp.cost.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "solve_lp: non-finite problem data");
  }
  Tableau t(lp, options);
  return t.run(lp);
}

}  // namespace dlpd
