#include "pinngen/optimizers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace pinngen {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::adam_budget: return "adam_budget";
    case StopReason::lbfgs_tol: return "lbfgs_tol";
    case StopReason::lbfgs_budget: return "lbfgs_budget";
    case StopReason::line_search_failed: return "line_search_failed";
    case StopReason::aborted: return "aborted";
  }
  return "unknown";
}

StopReason stop_reason_from_string(const std::string& s) {
  for (StopReason r : {StopReason::adam_budget, StopReason::lbfgs_tol, StopReason::lbfgs_budget,
                       StopReason::line_search_failed, StopReason::aborted}) {
    if (to_string(r) == s) return r;
  }
  throw ContractViolation("unknown stop reason '" + s + "'");
}

namespace {

using Vec = Eigen::VectorXd;
using VecMap = Eigen::Map<Vec>;
using ConstVecMap = Eigen::Map<const Vec>;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void adam_minimize(ParamVector& params, const LossGradFn& grad_fn, std::int64_t iters, double lr,
                   const AdamOptions& options, const StepHook& before_step) {
  if (iters < 0) throw ContractViolation("adam_run: iters must be >= 0");
  const std::size_t n = params.size();
  std::vector<double> grad(n), m(n, 0.0), v(n, 0.0);
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;
  for (std::int64_t step = 0; step < iters; ++step) {
    if (before_step) before_step(step);
    const double loss = grad_fn(params.span(), grad);
    if (!std::isfinite(loss) || !all_finite(grad)) {
      throw TrainingAbort("adam", step, "non-finite loss or gradient");
    }
    beta1_pow *= options.beta1;
    beta2_pow *= options.beta2;
    const double c1 = 1.0 - beta1_pow;
    const double c2 = 1.0 - beta2_pow;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * grad[i];
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      params[i] -= lr * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

ParamVector adam_run(ParamVector params, const LossGradFn& grad_fn, std::int64_t iters, double lr,
                     const AdamOptions& options, const StepHook& before_step) {
  adam_minimize(params, grad_fn, iters, lr, options, before_step);
  return params;
}

namespace {

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); bisection when
// the cubic has no real minimizer.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  return b - (b - a) * (db + d2 - d1) / denom;
}

struct Trial {
  double alpha = 0.0;
  double f = 0.0;
  double dphi = 0.0;
  Vec x;
  Vec g;
};

class LineSearch {
 public:
  LineSearch(const LossGradFn& fn, const LbfgsOptions& opt, std::int64_t& evals)
      : fn_(fn), opt_(opt), evals_(evals) {}

  // Strong-Wolfe search along d from (x0, f0, g0). On success `best` holds
  // the accepted point. A point that only satisfies sufficient decrease is
  // accepted when the bracket collapses.
  bool search(const Vec& x0, double f0, const Vec& g0, const Vec& d, double alpha0, Trial& best) {
    x0_ = &x0;
    d_ = &d;
    f0_ = f0;
    dphi0_ = g0.dot(d);
    if (!(dphi0_ < 0.0)) return false;

    Trial prev;
    prev.alpha = 0.0;
    prev.f = f0;
    prev.dphi = dphi0_;
    prev.x = x0;
    prev.g = g0;

    Trial cur;
    double alpha = alpha0;
    for (int i = 0; i < opt_.max_line_search_evals; ++i) {
      if (!evaluate(alpha, cur)) {
        // Non-finite: back off towards the last good point.
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (cur.f > f0_ + opt_.c1 * alpha * dphi0_ || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur, best);
      }
      if (std::abs(cur.dphi) <= -opt_.c2 * dphi0_) {
        best = std::move(cur);
        return true;
      }
      if (cur.dphi >= 0.0) return zoom(cur, prev, best);
      const double lo = alpha + 0.01 * (alpha - prev.alpha);
      const double hi = alpha * 10.0;
      double next = cubic_minimizer(prev.alpha, prev.f, prev.dphi, alpha, cur.f, cur.dphi);
      if (!(next >= lo && next <= hi)) next = std::clamp(next, lo, hi);
      if (!std::isfinite(next)) next = hi;
      prev = std::move(cur);
      alpha = next;
    }
    return false;
  }

 private:
  bool evaluate(double alpha, Trial& t) {
    t.alpha = alpha;
    t.x = *x0_ + alpha * *d_;
    t.g.resize(t.x.size());
    t.f = fn_(std::span<const double>(t.x.data(), static_cast<std::size_t>(t.x.size())),
              std::span<double>(t.g.data(), static_cast<std::size_t>(t.g.size())));
    ++evals_;
    if (!std::isfinite(t.f) || !t.g.allFinite()) return false;
    t.dphi = t.g.dot(*d_);
    return true;
  }

  // lo: lowest point so far satisfying sufficient decrease; hi: other end.
  bool zoom(Trial lo, Trial hi, Trial& best) {
    Trial cur;
    for (int i = 0; i < opt_.max_line_search_evals; ++i) {
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      const double width = b - a;
      if (width <= 1e-12 * std::max(1.0, b)) break;
      double alpha = cubic_minimizer(lo.alpha, lo.f, lo.dphi, hi.alpha, hi.f, hi.dphi);
      alpha = std::clamp(alpha, a + 0.1 * width, b - 0.1 * width);
      if (!evaluate(alpha, cur)) {
        hi = std::move(cur);
        hi.f = std::numeric_limits<double>::infinity();
        hi.dphi = 0.0;
        continue;
      }
      if (cur.f > f0_ + opt_.c1 * alpha * dphi0_ || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.dphi) <= -opt_.c2 * dphi0_) {
          best = std::move(cur);
          return true;
        }
        if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    if (lo.alpha > 0.0 && lo.f < f0_) {
      best = std::move(lo);
      return true;
    }
    return false;
  }

  const LossGradFn& fn_;
  const LbfgsOptions& opt_;
  std::int64_t& evals_;
  const Vec* x0_ = nullptr;
  const Vec* d_ = nullptr;
  double f0_ = 0.0;
  double dphi0_ = 0.0;
};

struct CurvaturePair {
  Vec s;
  Vec y;
  double rho;
};

Vec two_loop_direction(const Vec& g, const std::deque<CurvaturePair>& pairs) {
  Vec q = -g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  if (!pairs.empty()) {
    const CurvaturePair& last = pairs.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return q;
}

}  // namespace

LbfgsResult lbfgs_run(ParamVector params, const LossGradFn& loss_grad_fn, std::int64_t max_iters,
                      double tol, int history, const LbfgsOptions& options) {
  if (history < 1) throw ContractViolation("lbfgs_run: history must be >= 1");
  if (max_iters < 0) throw ContractViolation("lbfgs_run: max_iters must be >= 0");

  LbfgsResult result;
  const auto n = static_cast<Eigen::Index>(params.size());
  Vec x = ConstVecMap(params.values().data(), n);
  Vec g(n);
  double f = loss_grad_fn(params.span(), std::span<double>(g.data(), params.size()));
  result.evaluations = 1;
  result.loss = f;
  result.loss_history.push_back(f);
  if (!std::isfinite(f) || !g.allFinite()) {
    result.params = std::move(params);
    result.stop = StopReason::aborted;
    return result;
  }
  if (max_iters == 0) {
    result.params = std::move(params);
    result.stop = StopReason::lbfgs_budget;
    return result;
  }
  if (g.lpNorm<Eigen::Infinity>() <= tol) {
    result.params = std::move(params);
    result.stop = StopReason::lbfgs_tol;
    return result;
  }

  std::deque<CurvaturePair> pairs;
  LineSearch line_search(loss_grad_fn, options, result.evaluations);
  result.stop = StopReason::lbfgs_budget;

  for (std::int64_t iter = 0; iter < max_iters; ++iter) {
    Vec d = two_loop_direction(g, pairs);
    if (!(g.dot(d) < 0.0)) {
      pairs.clear();
      d = -g;
    }
    double alpha0 = pairs.empty() ? std::min(1.0, 1.0 / g.lpNorm<1>()) : 1.0;
    Trial accepted;
    bool ok = line_search.search(x, f, g, d, alpha0, accepted);
    if (!ok && !pairs.empty()) {
      pairs.clear();
      d = -g;
      alpha0 = std::min(1.0, 1.0 / g.lpNorm<1>());
      ok = line_search.search(x, f, g, d, alpha0, accepted);
    }
    if (!ok) {
      result.stop = StopReason::line_search_failed;
      break;
    }

    Vec s = accepted.x - x;
    Vec y = accepted.g - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * y.squaredNorm()) {
      if (static_cast<int>(pairs.size()) == history) pairs.pop_front();
      pairs.push_back(CurvaturePair{std::move(s), std::move(y), 1.0 / sy});
    }

    const double f_prev = f;
    x = std::move(accepted.x);
    g = std::move(accepted.g);
    f = accepted.f;
    result.iterations = iter + 1;
    result.loss_history.push_back(f);

    if (g.lpNorm<Eigen::Infinity>() <= tol) {
      result.stop = StopReason::lbfgs_tol;
      break;
    }
    // Loss decrease, relative to the current loss.
    if (f_prev - f <= tol * std::max(std::abs(f_prev), std::abs(f))) {
      result.stop = StopReason::lbfgs_tol;
      break;
    }
  }

  VecMap(params.values().data(), n) = x;
  result.params = std::move(params);
  result.loss = f;
  return result;
}

}  // namespace pinngen
