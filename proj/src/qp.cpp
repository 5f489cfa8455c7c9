#include "wmr/detail/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wmr/errors.hpp"

namespace wmr::detail {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * t[i];
  return s;
}

class ActiveSet {
 public:
  ActiveSet(const QpProblem& qp) : qp_(qp), n_(qp.target.size()) {}

  const LinearConstraint& row(std::size_t id) const {
    const std::size_t e = qp_.equalities.size();
    return id < e ? qp_.equalities[id] : qp_.inequalities[id - e];
  }
  bool is_equality(std::size_t id) const { return id < qp_.equalities.size(); }

  std::vector<std::size_t> ids;

  // Minimiser of the objective on the affine set of the working constraints.
  void solve(std::vector<double>& t_hat, std::vector<double>& lambda) {
    const std::size_t k = ids.size();
    t_hat = qp_.target;
    lambda.assign(k, 0.0);
    if (k == 0) return;
    refactor();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < k; ++r) {
      const LinearConstraint& c = row(ids[r]);
      rhs[static_cast<Eigen::Index>(r)] = c.b - dot(c.a, qp_.target);
    }
    const Eigen::VectorXd lam = ldlt_.solve(rhs);
    for (std::size_t r = 0; r < k; ++r) {
      lambda[r] = lam[static_cast<Eigen::Index>(r)];
      const LinearConstraint& c = row(ids[r]);
      for (std::size_t i = 0; i < n_; ++i) t_hat[i] += c.a[i] * lambda[r] / qp_.weights[i];
    }
  }

  // Schur complement test of `id` against the current working rows.
  bool independent(std::size_t id) {
    const LinearConstraint& c = row(id);
    double self = 0.0;
    for (std::size_t i = 0; i < n_; ++i) self += c.a[i] * c.a[i] / qp_.weights[i];
    if (!(self > 0.0)) return false;
    if (ids.empty()) return true;
    refactor();
    Eigen::VectorXd v(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const LinearConstraint& o = row(ids[r]);
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += o.a[i] * c.a[i] / qp_.weights[i];
      v[static_cast<Eigen::Index>(r)] = s;
    }
    const double schur = self - v.dot(ldlt_.solve(v));
    return schur > 1e-10 * self;
  }

  void add(std::size_t id) {
    ids.push_back(id);
    dirty_ = true;
  }
  void remove_at(std::size_t r) {
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(r));
    dirty_ = true;
  }
  bool contains(std::size_t id) const {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  }

 private:
  void refactor() {
    if (!dirty_) return;
    const std::size_t k = ids.size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t s = 0; s <= r; ++s) {
        const LinearConstraint& a = row(ids[r]);
        const LinearConstraint& b = row(ids[s]);
        double v = 0.0;
        for (std::size_t i = 0; i < n_; ++i) v += a.a[i] * b.a[i] / qp_.weights[i];
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = v;
        m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)) = v;
      }
    }
    ldlt_.compute(m);
    dirty_ = false;
  }

  const QpProblem& qp_;
  std::size_t n_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  bool dirty_ = true;
};

double kkt_residual(const QpProblem& qp, const std::vector<double>& t,
                    const std::vector<double>& eq, const std::vector<double>& ineq) {
  const std::size_t n = t.size();
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) grad[i] = qp.weights[i] * (t[i] - qp.target[i]);
  double res = 0.0;
  for (std::size_t c = 0; c < qp.equalities.size(); ++c) {
    const LinearConstraint& r = qp.equalities[c];
    for (std::size_t i = 0; i < n; ++i) grad[i] -= eq[c] * r.a[i];
    res = std::max(res, std::abs(dot(r.a, t) - r.b));
  }
  for (std::size_t c = 0; c < qp.inequalities.size(); ++c) {
    const LinearConstraint& r = qp.inequalities[c];
    for (std::size_t i = 0; i < n; ++i) grad[i] -= ineq[c] * r.a[i];
    const double slack = dot(r.a, t) - r.b;
    res = std::max({res, -slack, -ineq[c], std::abs(ineq[c] * slack)});
  }
  for (double g : grad) res = std::max(res, std::abs(g));
  return res;
}

}  // namespace

double primal_violation(const QpProblem& qp, const std::vector<double>& t) {
  double v = 0.0;
  for (const LinearConstraint& r : qp.equalities) v = std::max(v, std::abs(dot(r.a, t) - r.b));
  for (const LinearConstraint& r : qp.inequalities) v = std::max(v, r.b - dot(r.a, t));
  return v;
}

QpResult solve_projection_qp(const QpProblem& qp, std::vector<double> start, double scale,
                             std::size_t max_iter) {
  const std::size_t n = qp.target.size();
  const std::size_t ne = qp.equalities.size();
  const double active_tol = 1e-12 * scale;
  ActiveSet ws(qp);
  for (std::size_t c = 0; c < ne; ++c) {
    if (ws.independent(c)) ws.add(c);
  }
  for (std::size_t c = 0; c < qp.inequalities.size(); ++c) {
    const LinearConstraint& r = qp.inequalities[c];
    if (dot(r.a, start) - r.b <= active_tol && ws.independent(ne + c)) ws.add(ne + c);
  }

  QpResult out;
  std::vector<double>& t = start;
  std::vector<double> t_hat;
  std::vector<double> lambda;
  std::vector<char> excluded(qp.inequalities.size(), 0);
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    ws.solve(t_hat, lambda);
    double pn = 0.0;
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = t_hat[i] - t[i];
      pn = std::max(pn, std::abs(p[i]));
    }
    if (pn <= 1e-13 * scale) {
      t = t_hat;
      double lmax = 1.0;
      for (double l : lambda) lmax = std::max(lmax, std::abs(l));
      std::size_t drop = ws.ids.size();
      double worst = -1e-12 * lmax;
      for (std::size_t r = 0; r < ws.ids.size(); ++r) {
        if (!ws.is_equality(ws.ids[r]) && lambda[r] < worst) {
          worst = lambda[r];
          drop = r;
        }
      }
      if (drop == ws.ids.size()) break;
      ws.remove_at(drop);
      std::fill(excluded.begin(), excluded.end(), 0);
      continue;
    }
    // Ratio test; a blocker that turns out dependent on the working rows is
    // not really blocking and is skipped.
    double alpha = 1.0;
    std::size_t block = 0;
    bool blocked = false;
    for (bool again = true; again;) {
      again = false;
      alpha = 1.0;
      blocked = false;
      for (std::size_t c = 0; c < qp.inequalities.size(); ++c) {
        if (excluded[c] || ws.contains(ne + c)) continue;
        const LinearConstraint& r = qp.inequalities[c];
        double an = 0.0;
        for (double v : r.a) an = std::max(an, std::abs(v));
        const double ap = dot(r.a, p);
        if (ap >= -1e-14 * an * pn) continue;
        const double slack = std::max(0.0, dot(r.a, t) - r.b);
        const double ac = slack / -ap;
        if (ac < alpha) {
          alpha = ac;
          block = c;
          blocked = true;
        }
      }
      if (blocked && !ws.independent(ne + block)) {
        excluded[block] = 1;
        again = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i) t[i] += alpha * p[i];
    if (blocked) ws.add(ne + block);
  }
  out.iterations = it;

  out.eq_multipliers.assign(ne, 0.0);
  out.ineq_multipliers.assign(qp.inequalities.size(), 0.0);
  for (std::size_t r = 0; r < ws.ids.size(); ++r) {
    const std::size_t id = ws.ids[r];
    if (id < ne) {
      out.eq_multipliers[id] = lambda[r];
    } else {
      out.ineq_multipliers[id - ne] = lambda[r];
    }
  }
  out.kkt_residual = kkt_residual(qp, t, out.eq_multipliers, out.ineq_multipliers);
  if (it == max_iter) {
    std::ostringstream os;
    os << "active-set iteration cap (" << max_iter << ") reached; KKT residual "
       << out.kkt_residual;
    throw SolverError(os.str(), out.kkt_residual);
  }
  out.t = std::move(t);
  return out;
}

std::vector<double> project(const QpProblem& qp, const std::vector<double>& y,
                            const std::vector<double>& start, double scale) {
  QpProblem shifted = qp;
  shifted.target = y;
  if (primal_violation(shifted, y) <= 1e-12 * scale) return y;
  return solve_projection_qp(shifted, start, scale).t;
}

}  // namespace wmr::detail
