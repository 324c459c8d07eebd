#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "fbmclt/errors.hpp"

namespace fbmclt {

enum class QuadMethod { adaptive_deterministic, simplex_mc };

std::string to_string(QuadMethod m);

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute; 1 sigma for MC, conservative bound otherwise
  std::int64_t n_evals = 0;
  QuadMethod method = QuadMethod::adaptive_deterministic;
};

/// Tolerance not reached within the evaluation budget. Carries the best
/// estimate found so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, QuadResult best) : Error(what), best_(best) {}
  std::string_view kind() const noexcept override { return "convergence"; }
  const QuadResult& best() const noexcept { return best_; }

 private:
  QuadResult best_;
};

struct AdaptiveOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  std::int64_t max_evals = 2'000'000;
};

/// Globally adaptive Gauss-Kronrod (7/15 point) integration of f on [a, b].
/// The interval with the largest error is bisected until
/// error <= max(abs_tol, rel_tol * |value|). Error estimates use the QUADPACK
/// qk15 scaling. Throws ConvergenceError when the budget runs out.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const AdaptiveOptions& opt = {});

}  // namespace fbmclt
