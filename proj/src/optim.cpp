#include "nphkit/optim.hpp"

#include <cmath>
#include <limits>

namespace nphkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const std::function<double(const std::vector<double>&)>& f,
               const std::vector<double>& x) {
  double v = f(x);
  return std::isfinite(v) ? v : kInf;
}
}  // namespace

std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step) {
  std::size_t n = x.size();
  std::vector<double> g(n);
  std::vector<double> xt = x;
  for (std::size_t i = 0; i < n; ++i) {
    double h = rel_step * (1.0 + std::fabs(x[i]));
    xt[i] = x[i] + h;
    double fp = f(xt);
    xt[i] = x[i] - h;
    double fm = f(xt);
    xt[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::vector<double> numeric_hessian(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step) {
  std::size_t n = x.size();
  std::vector<double> hess(n * n, 0.0);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = rel_step * (1.0 + std::fabs(x[i]));
  double f0 = f(x);
  std::vector<double> xt = x;
  for (std::size_t i = 0; i < n; ++i) {
    xt[i] = x[i] + h[i];
    double fp = f(xt);
    xt[i] = x[i] - h[i];
    double fm = f(xt);
    xt[i] = x[i];
    hess[i * n + i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      xt[i] = x[i] + h[i]; xt[j] = x[j] + h[j];
      double fpp = f(xt);
      xt[j] = x[j] - h[j];
      double fpm = f(xt);
      xt[i] = x[i] - h[i]; xt[j] = x[j] + h[j];
      double fmp = f(xt);
      xt[j] = x[j] - h[j];
      double fmm = f(xt);
      xt[i] = x[i]; xt[j] = x[j];
      double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess[i * n + j] = v;
      hess[j * n + i] = v;
    }
  }
  return hess;
}

bool invert_spd(std::vector<double>& a, int n) {
  // Cholesky in place, then invert.
  std::vector<double> l(a);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = l[i * n + j];
      for (int k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        l[i * n + i] = std::sqrt(sum);
      } else {
        l[i * n + j] = sum / l[j * n + j];
      }
    }
  }
  // Solve L L^T X = I column by column.
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> y(n);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      double sum = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) sum -= l[i * n + k] * y[k];
      y[i] = sum / l[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double sum = y[i];
      for (int k = i + 1; k < n; ++k) sum -= l[k * n + i] * inv[k * n + c];
      inv[i * n + c] = sum / l[i * n + i];
    }
  }
  a = std::move(inv);
  return true;
}

MinimizeResult minimize_bfgs(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const MinimizeOptions& opts) {
  std::size_t n = x0.size();
  MinimizeResult res;
  res.x = std::move(x0);
  res.f = guarded(f, res.x);
  std::vector<double> g = numeric_gradient(f, res.x, opts.fd_step);
  std::vector<double> hinv(n * n, 0.0);  // inverse Hessian approximation
  for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;

  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  };

  for (int it = 0; it < opts.max_iter; ++it) {
    res.n_iter = it;
    res.grad_norm = inf_norm(g);
    if (res.grad_norm < opts.grad_tol) {
      res.converged = true;
      return res;
    }
    // direction d = -Hinv g
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i] -= hinv[i * n + j] * g[j];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += d[i] * g[i];
    if (!(slope < 0.0)) {
      // reset to steepest descent
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hinv[i * n + j] = (i == j) ? 1.0 : 0.0;
        d[i] = -g[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += d[i] * g[i];
      if (!(slope < 0.0)) break;
    }
    // backtracking Armijo
    double step = 1.0;
    std::vector<double> xn(n);
    double fn = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + step * d[i];
      fn = guarded(f, xn);
      if (fn <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> gn = numeric_gradient(f, xn, opts.fd_step);
    // BFGS update of Hinv
    std::vector<double> s(n), yv(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - res.x[i];
      yv[i] = gn[i] - g[i];
      sy += s[i] * yv[i];
    }
    if (sy > 1e-12) {
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += hinv[i * n + j] * yv[j];
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += yv[i] * hy[i];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          hinv[i * n + j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) -
                             (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
      }
    }
    double f_prev = res.f;
    res.x = xn;
    res.f = fn;
    g = std::move(gn);
    if (std::fabs(f_prev - fn) < 1e-13 * (1.0 + std::fabs(fn)) &&
        inf_norm(g) < 1e-4) {
      break;
    }
  }
  res.grad_norm = inf_norm(g);
  res.converged = res.grad_norm < std::max(opts.grad_tol, 1e-4);
  return res;
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  struct Impl {
    const std::function<double(double)>& f;
    double run(double a, double fa, double b, double fb, double m, double fm,
               double whole, double tol, int depth) {
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      double right = (b - m) / 6.0 * (fb + 4.0 * frm + fm);
      if (depth > 40 || std::fabs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
      }
      return run(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
             run(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
    }
  } impl{f};
  if (b <= a) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.run(a, fa, b, fb, m, fm, whole, tol, 0);
}

}  // namespace nphkit
