#include "nphkit/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nphkit::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;

double phi(double x) { return std::exp(-0.5 * x * x) * 0.3989422804014327; }

// Lower incomplete gamma by its series representation, valid for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Wilson-Hilferty cube-root normal approximation for very large shape.
double gamma_p_large_a(double a, double x) {
  double c = std::cbrt(x / a);
  double zv = (c - 1.0 + 1.0 / (9.0 * a)) * 3.0 * std::sqrt(a);
  return norm_cdf(zv);
}

// Continued fraction for the regularized incomplete beta.
double betacf(double a, double b, double x) {
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 10000; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Gauss-Legendre nodes/weights on [-1,1], computed once per order.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p1 / pp;
        if (std::fabs(z - z1) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

// P(a <= W <= b) for standard normal, stable in both tails.
double norm_interval(double a, double b) {
  if (b <= a) return 0.0;
  double v = (a > 0.0) ? norm_sf(a) - norm_sf(b) : norm_cdf(b) - norm_cdf(a);
  return std::max(v, 0.0);
}

// Rectangle probability of a standard bivariate normal.
double bvn_rect(double a1, double b1, double a2, double b2, double r) {
  if (b1 <= a1 || b2 <= a2) return 0.0;
  if (r >= 1.0 - 1e-12) {
    return norm_interval(std::max(a1, a2), std::min(b1, b2));
  }
  if (r <= -1.0 + 1e-12) {
    return norm_interval(std::max(a1, -b2), std::min(b1, -a2));
  }
  double v = bvn_cdf(b1, b2, r) - bvn_cdf(a1, b2, r) - bvn_cdf(b1, a2, r) +
             bvn_cdf(a1, a2, r);
  return std::max(v, 0.0);
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_sf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
  }
  // Acklam's rational approximation, then one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = norm_cdf(x) - p;
  double u = e / phi(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("gamma_p: require a > 0, x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (a > 1e6) return gamma_p_large_a(a, x);
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("gamma_q: require a > 0, x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (a > 1e6) return 1.0 - gamma_p_large_a(a, x);
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double gamma_p_inv(double a, double p) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p_inv: a must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("gamma_p_inv: p must lie in [0,1]");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  double gln = std::lgamma(a);
  double a1 = a - 1.0;
  double x;
  if (a > 1.0) {
    double pp = (p < 0.5) ? p : 1.0 - p;
    double t = std::sqrt(-2.0 * std::log(pp));
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) x = -x;
    double v = 1.0 - 1.0 / (9.0 * a) + x / (3.0 * std::sqrt(a));
    x = std::max(1e-300, a * v * v * v);
  } else {
    double t = 1.0 - a * (0.253 + a * 0.12);
    if (p < t) {
      x = std::pow(p / t, 1.0 / a);
    } else {
      x = 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }
  }
  for (int j = 0; j < 24; ++j) {
    if (x <= 0.0) return 0.0;
    double err = gamma_p(a, x) - p;
    double t;
    if (a > 1.0) {
      double lna1 = std::log(a1);
      double afac = std::exp(a1 * (lna1 - 1.0) - gln);
      t = afac * std::exp(-(x - a1) + a1 * (std::log(x) - lna1));
    } else {
      t = std::exp(-x + a1 * std::log(x) - gln);
    }
    if (t == 0.0) break;
    double u = err / t;
    double step = u / (1.0 - 0.5 * std::min(1.0, u * ((a - 1.0) / x - 1.0)));
    x -= step;
    if (x <= 0.0) x = 0.5 * (x + step);
    if (std::fabs(step) < 1e-12 * x) break;
  }
  return x;
}

double beta_inc(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta_inc: require a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double beta_inc_inv(double a, double b, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("beta_inc_inv: p must lie in [0,1]");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double x;
  if (a >= 1.0 && b >= 1.0) {
    double pp = (p < 0.5) ? p : 1.0 - p;
    double t = std::sqrt(-2.0 * std::log(pp));
    x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) x = -x;
    double al = (x * x - 3.0) / 6.0;
    double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    double w = x * std::sqrt(al + h) / h -
               (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                   (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    double lna = std::log(a / (a + b));
    double lnb = std::log(b / (a + b));
    double t = std::exp(a * lna) / a;
    double u = std::exp(b * lnb) / b;
    double w = t + u;
    if (p < t / w) {
      x = std::pow(a * w * p, 1.0 / a);
    } else {
      x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
  }
  double afac = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  for (int j = 0; j < 24; ++j) {
    if (x <= 0.0 || x >= 1.0) {
      x = std::min(std::max(x, 1e-300), 1.0 - 1e-16);
    }
    double err = beta_inc(a, b, x) - p;
    double t = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) +
                        afac);
    if (t == 0.0) break;
    double u = err / t;
    double step =
        u / (1.0 - 0.5 * std::min(1.0, u * ((a - 1.0) / x - (b - 1.0) / (1.0 - x))));
    x -= step;
    if (x <= 0.0) x = 0.5 * (x + step);
    if (x >= 1.0) x = 0.5 * (x + step + 1.0);
    if (std::fabs(step) < 1e-12 * x && j > 0) break;
  }
  return x;
}

double chisq_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

// Genz/Drezner-Wesolowsky algorithm for P(X > h, Y > k).
double bvn_upper(double h, double k, double r) {
  static const double wt[3][10] = {
      {0.1713244923791705, 0.3607615730481384, 0.4679139345726904, 0, 0, 0, 0,
       0, 0, 0},
      {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
       0.2031674267230659, 0.2334925365383547, 0.2491470458134029, 0, 0, 0, 0},
      {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
       0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
       0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
       0.1527533871307259}};
  static const double xt[3][10] = {
      {-0.9324695142031522, -0.6612093864662647, -0.238619186083197, 0, 0, 0,
       0, 0, 0, 0},
      {-0.9815606342467191, -0.904117256370475, -0.769902674194305,
       -0.5873179542866171, -0.3678314989981802, -0.1252334085114692, 0, 0, 0,
       0},
      {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
       -0.8391169718222188, -0.7463319064601508, -0.636053680726515,
       -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
       -0.07652652113349733}};
  int ng, lg;
  double ar = std::fabs(r);
  if (ar < 0.3) {
    ng = 0;
    lg = 3;
  } else if (ar < 0.75) {
    ng = 1;
    lg = 6;
  } else {
    ng = 2;
    lg = 10;
  }
  double hh = h, kk = k;
  double hk = hh * kk;
  double bvn = 0.0;
  if (ar < 0.925) {
    double hs = (hh * hh + kk * kk) / 2.0;
    double asr = std::asin(r);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (xt[ng][i] + 1.0) / 2.0);
      bvn += wt[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-xt[ng][i] + 1.0) / 2.0);
      bvn += wt[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    bvn = bvn * asr / 12.566370614359172 + norm_cdf(-hh) * norm_cdf(-kk);
  } else {
    if (r < 0.0) {
      kk = -kk;
      hk = -hk;
    }
    if (ar < 1.0) {
      double as = (1.0 - ar) * (1.0 + ar);
      double aa = std::sqrt(as);
      double bs = (hh - kk) * (hh - kk);
      double c = (4.0 - hk) / 8.0;
      double d = (12.0 - hk) / 16.0;
      bvn = aa * std::exp(-(bs / as + hk) / 2.0) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
             c * d * as * as / 5.0);
      if (hk > -160.0) {
        double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * 2.5066282746310002 * norm_cdf(-b / aa) *
               b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      aa /= 2.0;
      for (int i = 0; i < lg; ++i) {
        double xs = aa * (xt[ng][i] + 1.0);
        xs *= xs;
        double rs = std::sqrt(1.0 - xs);
        bvn += aa * wt[ng][i] *
               (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
        double x2 = (1.0 - xt[ng][i]);
        xs = as * x2 * x2 / 4.0;
        rs = std::sqrt(1.0 - xs);
        bvn += aa * wt[ng][i] * std::exp(-(bs / xs + hk) / 2.0) *
               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                (1.0 + c * xs * (1.0 + d * xs)));
      }
      bvn = -bvn / 6.283185307179586;
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(hh, kk));
    } else {
      bvn = -bvn + std::max(0.0, norm_cdf(-hh) - norm_cdf(-kk));
    }
  }
  return std::min(std::max(bvn, 0.0), 1.0);
}

double bvn_cdf(double h, double k, double r) { return bvn_upper(-h, -k, r); }

double mvn3_box(const std::array<double, 9>& c, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("mvn3_box: z must be > 0");
  auto at = [&](int i, int j) { return c[static_cast<std::size_t>(3 * i + j)]; };
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(at(i, i) - 1.0) > 1e-10) {
      throw std::invalid_argument("mvn3_box: diagonal must be 1");
    }
    for (int j = 0; j < i; ++j) {
      if (std::fabs(at(i, j) - at(j, i)) > 1e-10 || std::fabs(at(i, j)) > 1.0 + 1e-10) {
        throw std::invalid_argument("mvn3_box: matrix must be a symmetric correlation");
      }
    }
  }
  double r12 = at(0, 1), r13 = at(0, 2), r23 = at(1, 2);
  double det = 1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23;
  if (det < -1e-8 || 1.0 - r12 * r12 < -1e-10 || 1.0 - r13 * r13 < -1e-10 ||
      1.0 - r23 * r23 < -1e-10) {
    throw std::invalid_argument("mvn3_box: matrix is not positive semidefinite");
  }
  double s2 = std::sqrt(std::max(0.0, 1.0 - r12 * r12));
  double s3 = std::sqrt(std::max(0.0, 1.0 - r13 * r13));
  double rc = 0.0;
  bool deg2 = s2 < 1e-8, deg3 = s3 < 1e-8;
  if (!deg2 && !deg3) {
    rc = (r23 - r12 * r13) / (s2 * s3);
    rc = std::min(1.0, std::max(-1.0, rc));
  }
  static const GaussLegendre gl(64);
  double total = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    double x = z * gl.x[i];
    double val;
    if (deg2 && deg3) {
      // Z2 and Z3 are +-Z1 exactly; |x| <= z always holds here.
      val = 1.0;
    } else if (deg2 || deg3) {
      double m = deg2 ? r13 * x : r12 * x;
      double s = deg2 ? s3 : s2;
      val = norm_interval((-z - m) / s, (z - m) / s);
    } else {
      double a2 = (-z - r12 * x) / s2, b2 = (z - r12 * x) / s2;
      double a3 = (-z - r13 * x) / s3, b3 = (z - r13 * x) / s3;
      val = bvn_rect(a2, b2, a3, b3, rc);
    }
    total += gl.w[i] * phi(x) * val;
  }
  return std::min(1.0, total * z);
}

}  // namespace nphkit::special
