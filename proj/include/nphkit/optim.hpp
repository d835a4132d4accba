#pragma once

#include <functional>
#include <vector>

namespace nphkit {

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  double grad_norm = 0.0;
  int n_iter = 0;
  bool converged = false;
};

struct MinimizeOptions {
  double grad_tol = 1e-6;   // infinity norm of the numeric gradient
  int max_iter = 300;
  double fd_step = 1e-6;    // relative central-difference step
};

// BFGS with backtracking Armijo line search and central-difference
// gradients. f must be finite at x0; non-finite trial values are
// treated as +inf by the line search.
MinimizeResult minimize_bfgs(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0,
                             const MinimizeOptions& opts = {});

// Central-difference gradient with the same stepping as the optimizer.
std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step = 1e-6);

// Numeric Hessian by central differences of the function values.
std::vector<double> numeric_hessian(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step = 5e-5);

// In-place inversion of a symmetric positive-definite row-major matrix;
// returns false if the Cholesky factorization fails.
bool invert_spd(std::vector<double>& a, int n);

// Adaptive Simpson quadrature on [a, b] to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

}  // namespace nphkit
