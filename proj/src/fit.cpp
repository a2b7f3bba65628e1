// SPDX-License-Identifier: MIT
#include "nv0/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nv0/constants.hpp"

namespace nv0 {

namespace {

constexpr double kUnbounded = 1e300;
constexpr double kTimeLo = 1e-10;  // 0.1 ns
constexpr double kTimeHi = 1.0;    // 1 s
constexpr double kFwhmOfSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

double min_spacing(const std::vector<double>& x) {
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.size(); ++i) {
    double d = s[i] - s[i - 1];
    if (d > 0) best = std::min(best, d);
  }
  return best;
}

double span(const std::vector<double>& x) {
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Mean of the trailing quarter (at least one point).
double tail_mean(const std::vector<double>& y) {
  std::size_t k = std::max<std::size_t>(1, y.size() / 4);
  return std::accumulate(y.end() - static_cast<std::ptrdiff_t>(k), y.end(), 0.0) /
         static_cast<double>(k);
}

// Least-squares slope of ln|y - base| against x over the points where the
// deviation is still resolvable. Returns 0 when degenerate.
double log_envelope_slope(const std::vector<double>& x,
                          const std::vector<double>& y, double base,
                          double floor_amp) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = std::abs(y[i] - base);
    if (e <= floor_amp) continue;
    double ly = std::log(e);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    ++n;
  }
  if (n < 2) return 0;
  double denom = n * sxx - sx * sx;
  if (denom == 0) return 0;
  return (n * sxy - sx * sy) / denom;
}

// Brute-force power spectrum over a dense angular-frequency grid; returns
// the peak frequency (never the DC bin). O(N^2), fine for trace-sized data.
struct SpectrumPeak {
  double omega = 0;
  std::complex<double> amplitude;
};

SpectrumPeak spectrum_peak(const std::vector<double>& x,
                           const std::vector<double>& y, double base) {
  double dx = min_spacing(x);
  if (!std::isfinite(dx)) return {};
  const double w_max = 3.14159265358979323846 / dx;
  const std::size_t k_count = std::max<std::size_t>(16, 4 * x.size());
  auto transform_at = [&](double w) {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      s += (y[j] - base) * std::exp(std::complex<double>(0, -w * x[j]));
    return s;
  };
  std::vector<double> power(k_count + 1, -1);
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= k_count; ++k) {
    double w = w_max * static_cast<double>(k) / static_cast<double>(k_count);
    power[k] = std::norm(transform_at(w));
    if (power[k] > power[best_k]) best_k = k;
  }
  // A raw grid peak can sit half a bin off, far enough to strand the
  // optimiser in a local minimum; refine with a parabola through the
  // winning bin and its neighbours.
  double k_refined = static_cast<double>(best_k);
  if (best_k > 1 && best_k < k_count) {
    double pm = power[best_k - 1], p0 = power[best_k], pp = power[best_k + 1];
    double denom = pm - 2 * p0 + pp;
    if (denom < 0) {
      double dk = 0.5 * (pm - pp) / denom;
      k_refined += std::clamp(dk, -0.5, 0.5);
    }
  }
  SpectrumPeak best;
  best.omega = w_max * k_refined / static_cast<double>(k_count);
  best.amplitude = transform_at(best.omega);
  return best;
}

void check_param_sizes(const FitModel& model, const std::vector<double>& p) {
  if (p.size() != param_count(model))
    throw std::invalid_argument("parameter vector has the wrong length");
}

// Typical magnitude of each parameter, used to floor finite-difference
// steps when a parameter sits at zero.
std::vector<double> param_typical(const FitModel& model, const FitData& data) {
  double ys = std::max(
      {std::abs(*std::max_element(data.y.begin(), data.y.end())),
       std::abs(*std::min_element(data.y.begin(), data.y.end())), 1e-30});
  double xs = std::max(span(data.x), min_spacing(data.x));
  if (!std::isfinite(xs) || xs <= 0) xs = 1.0;
  double ws = 3.14159265358979323846 / std::max(min_spacing(data.x), 1e-30);
  switch (model.kind) {
    case FitModelKind::ExpRecovery:
      return {ys, ys, xs};
    case FitModelKind::DampedCosine:
      return {ys, 0.5 * ws, xs, ys};
    case FitModelKind::DetunedDampedCosine:
      return {ys, 0.5 * ws, 1.0, xs, ys};
    case FitModelKind::GaussianPeak:
      return {ys, xs, 0.25 * xs, ys};
    case FitModelKind::EchoDecay:
      if (model.fixed_t1 > 0) return {ys, xs, ys};
      return {ys, xs, xs, ys};
  }
  throw std::logic_error("unknown model kind");
}

} // namespace

std::size_t param_count(const FitModel& model) {
  switch (model.kind) {
    case FitModelKind::ExpRecovery: return 3;
    case FitModelKind::DampedCosine: return 4;
    case FitModelKind::DetunedDampedCosine: return 5;
    case FitModelKind::GaussianPeak: return 4;
    case FitModelKind::EchoDecay: return model.fixed_t1 > 0 ? 3 : 4;
  }
  throw std::logic_error("unknown model kind");
}

std::vector<std::string> param_names(const FitModel& model) {
  switch (model.kind) {
    case FitModelKind::ExpRecovery:
      return {"y_inf", "y_0", "t1"};
    case FitModelKind::DampedCosine:
      return {"amplitude", "omega", "t2", "offset"};
    case FitModelKind::DetunedDampedCosine:
      return {"amplitude", "delta", "phase", "t2_star", "offset"};
    case FitModelKind::GaussianPeak:
      return {"amplitude", "center", "width", "offset"};
    case FitModelKind::EchoDecay:
      if (model.fixed_t1 > 0) return {"amplitude", "t2", "offset"};
      return {"amplitude", "t2", "t1", "offset"};
  }
  throw std::logic_error("unknown model kind");
}

double eval(const FitModel& model, const std::vector<double>& p, double t) {
  check_param_sizes(model, p);
  switch (model.kind) {
    case FitModelKind::ExpRecovery:
      if (!(p[2] > 0)) throw std::invalid_argument("t1 must be positive");
      return p[0] - (p[0] - p[1]) * std::exp(-t / p[2]);
    case FitModelKind::DampedCosine:
      if (!(p[2] > 0)) throw std::invalid_argument("t2 must be positive");
      return p[0] * std::cos(p[1] * t) * std::exp(-t / p[2]) + p[3];
    case FitModelKind::DetunedDampedCosine:
      if (!(p[3] > 0)) throw std::invalid_argument("t2_star must be positive");
      return p[0] * std::cos(p[1] * t + p[2]) * std::exp(-t / p[3]) + p[4];
    case FitModelKind::GaussianPeak: {
      if (!(p[2] > 0)) throw std::invalid_argument("width must be positive");
      double z = (t - p[1]) / p[2];
      return p[0] * std::exp(-0.5 * z * z) + p[3];
    }
    case FitModelKind::EchoDecay: {
      double t2 = p[1];
      double t1 = model.fixed_t1 > 0 ? model.fixed_t1 : p[2];
      double f = model.fixed_t1 > 0 ? p[2] : p[3];
      if (!(t2 > 0) || !(t1 > 0))
        throw std::invalid_argument("decay times must be positive");
      double z = t / t2;
      return p[0] * std::exp(-z * z - t / t1) + f;
    }
  }
  throw std::logic_error("unknown model kind");
}

Bounds default_bounds(const FitModel& model, const FitData& data) {
  double dx = min_spacing(data.x);
  double w_hi = std::isfinite(dx) ? 3.14159265358979323846 / dx : 1e12;
  double xlo = *std::min_element(data.x.begin(), data.x.end());
  double xhi = *std::max_element(data.x.begin(), data.x.end());
  double r = std::max(xhi - xlo, 1e-30);
  Bounds b;
  auto free_param = [&] {
    b.lo.push_back(-kUnbounded);
    b.hi.push_back(kUnbounded);
  };
  auto time_param = [&] {
    b.lo.push_back(kTimeLo);
    b.hi.push_back(kTimeHi);
  };
  switch (model.kind) {
    case FitModelKind::ExpRecovery:
      free_param();
      free_param();
      time_param();
      return b;
    case FitModelKind::DampedCosine:
      free_param();
      b.lo.push_back(0);
      b.hi.push_back(w_hi);
      time_param();
      free_param();
      return b;
    case FitModelKind::DetunedDampedCosine:
      free_param();
      b.lo.push_back(0);
      b.hi.push_back(w_hi);
      free_param();  // phase
      time_param();
      free_param();
      return b;
    case FitModelKind::GaussianPeak:
      free_param();
      b.lo.push_back(xlo - r);
      b.hi.push_back(xhi + r);
      b.lo.push_back(1e-6 * r);
      b.hi.push_back(10 * r);
      free_param();
      return b;
    case FitModelKind::EchoDecay:
      free_param();
      time_param();
      if (model.fixed_t1 <= 0) time_param();
      free_param();
      return b;
  }
  throw std::logic_error("unknown model kind");
}

std::vector<double> initial_guess(const FitModel& model, const FitData& data) {
  if (data.x.empty()) throw std::invalid_argument("empty data");
  const std::vector<double>& x = data.x;
  const std::vector<double>& y = data.y;
  double ymin = *std::min_element(y.begin(), y.end());
  double ymax = *std::max_element(y.begin(), y.end());
  double xspan = std::max(span(x), 1e-30);

  std::vector<double> p;
  switch (model.kind) {
    case FitModelKind::ExpRecovery: {
      double yinf = tail_mean(y);
      double y0 = y.front();
      double slope =
          log_envelope_slope(x, y, yinf, 0.1 * std::abs(y0 - yinf));
      double t1 = slope < 0 ? -1.0 / slope : xspan / 3.0;
      p = {yinf, y0, t1};
      break;
    }
    case FitModelKind::DampedCosine: {
      double b = mean(y);
      double a = 0.5 * (ymax - ymin);
      SpectrumPeak pk = spectrum_peak(x, y, b);
      double slope = log_envelope_slope(x, y, b, 0.2 * a);
      double t2 = slope < 0 ? -1.0 / slope : xspan;
      p = {a, pk.omega, t2, b};
      break;
    }
    case FitModelKind::DetunedDampedCosine: {
      double d0 = mean(y);
      double c = 0.5 * (ymax - ymin);
      SpectrumPeak pk = spectrum_peak(x, y, d0);
      double phase = std::arg(pk.amplitude);
      double slope = log_envelope_slope(x, y, d0, 0.2 * c);
      double t2 = slope < 0 ? -1.0 / slope : xspan;
      p = {c, pk.omega, phase, t2, d0};
      break;
    }
    case FitModelKind::GaussianPeak: {
      // Baseline from the outer edges, so a broad peak does not drag it up.
      std::size_t edge = std::max<std::size_t>(1, x.size() / 10);
      double b = 0.5 * (std::accumulate(y.begin(), y.begin() + edge, 0.0) /
                            static_cast<double>(edge) +
                        std::accumulate(y.end() - static_cast<std::ptrdiff_t>(edge),
                                        y.end(), 0.0) /
                            static_cast<double>(edge));
      std::size_t imax = static_cast<std::size_t>(
          std::max_element(y.begin(), y.end()) - y.begin());
      double a = y[imax] - b;
      double half = b + 0.5 * a;
      double xl = x[imax], xr = x[imax];
      for (std::size_t i = imax; i-- > 0;) {
        if (y[i] < half) break;
        xl = x[i];
      }
      for (std::size_t i = imax + 1; i < x.size(); ++i) {
        if (y[i] < half) break;
        xr = x[i];
      }
      double w = (xr - xl) > 0 ? (xr - xl) / kFwhmOfSigma : xspan / 6.0;
      p = {a, x[imax], w, b};
      break;
    }
    case FitModelKind::EchoDecay: {
      double f = tail_mean(y);
      double e = y.front() - f;
      double t2 = xspan / 2.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (e != 0 && (y[i] - f) / e <= std::exp(-1.0)) {
          if (x[i] > 0) t2 = x[i];
          break;
        }
      }
      if (model.fixed_t1 > 0)
        p = {e, t2, f};
      else
        p = {e, t2, xspan, f};
      break;
    }
  }

  Bounds b = default_bounds(model, data);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!std::isfinite(p[j])) {
      p[j] = (b.lo[j] > 0 && b.hi[j] < kUnbounded)
                 ? std::sqrt(b.lo[j] * b.hi[j])
                 : 0.5 * (std::max(b.lo[j], -1.0) + std::min(b.hi[j], 1.0));
    }
    p[j] = std::clamp(p[j], b.lo[j], b.hi[j]);
  }
  return p;
}

namespace {

// scale_covariance distinguishes the two error conventions: an unweighted
// fit estimates the data variance from the residuals (covariance scaled by
// the reduced chi^2), while caller-supplied sigmas already fix the scale
// and the covariance is (J^T W J)^-1 as is.
FitResult fit_weighted(const FitModel& model, const FitData& data,
                       std::vector<double> p, const Bounds& bounds,
                       bool scale_covariance) {
  const std::size_t n = data.x.size();
  const std::size_t k = param_count(model);
  if (data.y.size() != n || data.sigma.size() != n)
    throw std::invalid_argument("data arrays differ in length");
  if (n < k + 1)
    throw std::invalid_argument("need at least one more point than parameters");
  for (double s : data.sigma)
    if (!(s > 0)) throw std::invalid_argument("sigma values must be positive");
  check_param_sizes(model, p);
  if (bounds.lo.size() != k || bounds.hi.size() != k)
    throw std::invalid_argument("bounds have the wrong length");
  for (std::size_t j = 0; j < k; ++j) p[j] = std::clamp(p[j], bounds.lo[j], bounds.hi[j]);

  const std::vector<double> typical = param_typical(model, data);

  auto residuals = [&](const std::vector<double>& q, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i)
      r(static_cast<Eigen::Index>(i)) =
          (data.y[i] - eval(model, q, data.x[i])) / data.sigma[i];
  };
  auto cost = [&](const std::vector<double>& q) {
    double c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = (data.y[i] - eval(model, q, data.x[i])) / data.sigma[i];
      c += r * r;
    }
    return c;
  };
  // d(model)/d(param) by central differences, weighted like the residuals.
  auto jacobian = [&](const std::vector<double>& q, Eigen::MatrixXd& J) {
    std::vector<double> qp = q, qm = q;
    for (std::size_t j = 0; j < k; ++j) {
      double h = 1e-6 * std::max(std::abs(q[j]), 1e-3 * typical[j]);
      double hi = std::min(q[j] + h, bounds.hi[j]);
      double lo = std::max(q[j] - h, bounds.lo[j]);
      if (hi == lo) {
        J.col(static_cast<Eigen::Index>(j)).setZero();
        continue;
      }
      qp[j] = hi;
      qm[j] = lo;
      for (std::size_t i = 0; i < n; ++i)
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (eval(model, qp, data.x[i]) - eval(model, qm, data.x[i])) /
            ((hi - lo) * data.sigma[i]);
      qp[j] = q[j];
      qm[j] = q[j];
    }
  };

  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::VectorXd colscale(static_cast<Eigen::Index>(k));
  double chi2 = cost(p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (iter = 1; iter <= 200; ++iter) {
    residuals(p, r);
    jacobian(p, J);
    if (!J.allFinite())
      throw std::runtime_error("Jacobian has non-finite entries");
    // Equilibrate before forming the normal equations: a rad/s frequency
    // next to an order-one amplitude otherwise pushes cond(J^T J) past
    // double precision and the solved step loses the soft directions.
    for (std::size_t j = 0; j < k; ++j) {
      Eigen::Index jj = static_cast<Eigen::Index>(j);
      double nrm = J.col(jj).norm();
      colscale(jj) = nrm > 0 ? 1.0 / nrm : 1.0;
      J.col(jj) *= colscale(jj);
    }
    Eigen::VectorXd g = J.transpose() * r;
    Eigen::MatrixXd A = J.transpose() * J;
    double max_diag = A.diagonal().maxCoeff();
    if (!(max_diag > 0))
      throw std::runtime_error("Jacobian is singular: no parameter affects the model");
    if (g.norm() < 1e-12) {
      converged = true;
      break;
    }

    bool accepted = false;
    while (lambda < 1e15) {
      Eigen::MatrixXd M = A;
      for (std::size_t j = 0; j < k; ++j) {
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        M(jj, jj) += lambda * std::max(A(jj, jj), 1e-12 * max_diag);
      }
      Eigen::VectorXd delta = M.ldlt().solve(g);
      if (delta.allFinite()) {
        std::vector<double> q = p;
        for (std::size_t j = 0; j < k; ++j) {
          Eigen::Index jj = static_cast<Eigen::Index>(j);
          q[j] = std::clamp(q[j] + colscale(jj) * delta(jj), bounds.lo[j],
                            bounds.hi[j]);
        }
        double c = cost(q);
        if (std::isfinite(c) && c < chi2) {
          double drop = chi2 - c;
          p = std::move(q);
          chi2 = c;
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
          // A vanishing improvement only signals a minimum once the damping
          // is low, i.e. the step was a near-Gauss-Newton one. Under heavy
          // damping the step is strangled, not finished, as happens part way
          // down a curved frequency/phase valley.
          if (drop / std::max(chi2, 1e-300) < 1e-10 && lambda <= 1e-3)
            converged = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!accepted || converged) break;
  }

  FitResult out;
  out.params = p;
  out.iterations = std::min(iter, 200);
  out.converged = converged;
  out.chi2_reduced = chi2 / static_cast<double>(n - k);

  // Covariance (J^T W J)^-1, formed in the equilibrated basis (unit-norm
  // Jacobian columns) so the eigenvalue spread reflects parameter
  // correlations, not units, then mapped back. Flat directions surface as
  // huge variances instead of poisoning the whole matrix.
  jacobian(p, J);
  for (std::size_t j = 0; j < k; ++j) {
    Eigen::Index jj = static_cast<Eigen::Index>(j);
    double nrm = J.col(jj).norm();
    colscale(jj) = nrm > 0 ? 1.0 / nrm : 1.0;
    J.col(jj) *= colscale(jj);
  }
  Eigen::MatrixXd A = J.transpose() * J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  Eigen::VectorXd ev = es.eigenvalues();
  double ev_max = ev.maxCoeff();
  double tol = std::max(ev_max, 0.0) * 1e-14;
  Eigen::VectorXd inv(ev.size());
  for (Eigen::Index j = 0; j < ev.size(); ++j)
    inv(j) = 1.0 / std::max(ev(j), std::max(tol, 1e-300));
  const double cov_scale = scale_covariance ? out.chi2_reduced : 1.0;
  out.covariance = cov_scale * colscale.asDiagonal() *
                   (es.eigenvectors() * inv.asDiagonal() *
                    es.eigenvectors().transpose()) *
                   colscale.asDiagonal();
  out.std_errors.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    out.std_errors[j] = std::sqrt(
        std::max(out.covariance(static_cast<Eigen::Index>(j),
                                static_cast<Eigen::Index>(j)),
                 0.0));
  return out;
}

} // namespace

FitResult fit(const FitModel& model, const FitData& data,
              std::vector<double> p, const Bounds& bounds) {
  if (data.sigma.empty() && !data.x.empty()) {
    FitData unweighted = data;
    unweighted.sigma.assign(data.x.size(), 1.0);
    return fit_weighted(model, unweighted, std::move(p), bounds,
                        /*scale_covariance=*/true);
  }
  return fit_weighted(model, data, std::move(p), bounds,
                      /*scale_covariance=*/false);
}

FitResult fit(const FitModel& model, const FitData& data) {
  std::vector<double> guess = initial_guess(model, data);
  Bounds bounds = default_bounds(model, data);
  if (model.kind != FitModelKind::DampedCosine &&
      model.kind != FitModelKind::DetunedDampedCosine)
    return fit(model, data, guess, bounds);

  // Records holding only a couple of oscillation cycles make the spectral
  // frequency estimate fragile, and a start one bin off can strand the
  // optimiser in a local minimum. Start from the neighbouring bins as well
  // and keep the best outcome.
  double dx = min_spacing(data.x);
  double dw = std::isfinite(dx)
                  ? 3.14159265358979323846 /
                        (dx * static_cast<double>(
                                  std::max<std::size_t>(16, 4 * data.x.size())))
                  : 0.0;
  FitResult best;
  bool have_result = false;
  std::exception_ptr last_error;
  for (double shift : {0.0, -dw, dw}) {
    std::vector<double> p = guess;
    p[1] = std::clamp(p[1] + shift, 0.5 * dw, bounds.hi[1]);
    try {
      FitResult r = fit(model, data, p, bounds);
      bool better = !have_result ||
                    (r.converged && !best.converged) ||
                    (r.converged == best.converged &&
                     r.chi2_reduced < best.chi2_reduced);
      if (better) best = std::move(r);
      have_result = true;
    } catch (const std::runtime_error&) {
      last_error = std::current_exception();
    }
    if (dw <= 0.0) break;
  }
  if (!have_result) std::rethrow_exception(last_error);
  return best;
}

std::string fit_report(const FitModel& model, const FitResult& result) {
  static const char* kind_names[] = {"ExpRecovery", "DampedCosine",
                                     "DetunedDampedCosine", "GaussianPeak",
                                     "EchoDecay"};
  std::ostringstream os;
  os << "model: " << kind_names[static_cast<int>(model.kind)] << "\n";
  std::vector<std::string> names = param_names(model);
  char buf[96];
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::snprintf(buf, sizeof buf, "  %-10s = %.8g +/- %.8g\n",
                  names[j].c_str(), result.params[j], result.std_errors[j]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "  chi2_reduced = %.6g, converged = %s, iterations = %d\n",
                result.chi2_reduced, result.converged ? "yes" : "no",
                result.iterations);
  os << buf;
  return os.str();
}

T1Extraction extract_t1(const std::vector<double>& delays,
                        const std::vector<double>& ratios,
                        const std::vector<double>& sigmas) {
  if (delays.size() < 4)
    throw std::invalid_argument("recovery fit needs at least 4 points");
  FitModel model{FitModelKind::ExpRecovery, 0};
  FitData data{delays, ratios, sigmas};
  T1Extraction out;
  out.result = fit(model, data);
  out.yinf = out.result.params[0];
  out.y0 = out.result.params[1];
  out.t1 = out.result.params[2];
  out.t1_err = out.result.std_errors[2];
  return out;
}

RabiExtraction extract_rabi(const FitData& data) {
  FitModel model{FitModelKind::DampedCosine, 0};
  RabiExtraction out;
  out.result = fit(model, data);
  out.rabi_hz = out.result.params[1] / two_pi;
  out.rabi_err_hz = out.result.std_errors[1] / two_pi;
  out.t2_rabi = out.result.params[2];
  out.t2_rabi_err = out.result.std_errors[2];
  return out;
}

RamseyExtraction extract_ramsey(const FitData& data) {
  FitModel model{FitModelKind::DetunedDampedCosine, 0};
  RamseyExtraction out;
  out.result = fit(model, data);
  out.detuning_hz = out.result.params[1] / two_pi;
  out.detuning_err_hz = out.result.std_errors[1] / two_pi;
  out.phase = std::remainder(out.result.params[2], two_pi);
  out.t2_star = out.result.params[3];
  out.t2_star_err = out.result.std_errors[3];
  return out;
}

CpmgExtraction extract_cpmg(const FitData& data, double fixed_t1) {
  FitModel model{FitModelKind::EchoDecay, fixed_t1};
  CpmgExtraction out;
  out.result = fit(model, data);
  out.t2 = out.result.params[1];
  out.t2_err = out.result.std_errors[1];
  out.t1_used = fixed_t1 > 0 ? fixed_t1 : out.result.params[2];
  return out;
}

OderExtraction extract_oder(const FitData& data) {
  FitModel model{FitModelKind::GaussianPeak, 0};
  OderExtraction out;
  out.result = fit(model, data);
  out.center_hz = out.result.params[1];
  out.center_err_hz = out.result.std_errors[1];
  out.fwhm_hz = kFwhmOfSigma * out.result.params[2];
  out.fwhm_err_hz = kFwhmOfSigma * out.result.std_errors[2];
  return out;
}

} // namespace nv0
