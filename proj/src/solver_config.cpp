#include "rbf/solver_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "rbf/errors.hpp"

namespace rbf {
namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::string> SolverConfig::validate() const {
  if (rank < 1) throw ArgumentError("rank must be at least 1");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ArgumentError("tol must be positive");
  if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda)))
    throw ArgumentError("lambda must be nonnegative");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ArgumentError("rho must be positive");
  if (alpha0 && !(*alpha0 > 0.0 && std::isfinite(*alpha0)))
    throw ArgumentError("alpha0 must be positive");
  if (!(alpha_max > 0.0)) throw ArgumentError("alpha_max must be positive");
  if (alpha0 && alpha_max < *alpha0) throw ArgumentError("alpha_max must be >= alpha0");
  if (max_iter && *max_iter < 1) throw ArgumentError("max_iter must be at least 1");

  std::vector<std::string> warnings;
  if (!(rho > 1.0 && rho <= 1.1))
    warnings.emplace_back("rho=" + shortest(rho) + " is outside (1.0,1.1], the range used in general; continuing");
  return warnings;
}

double SolverConfig::lambda_for(std::size_t rows, std::size_t cols) const {
  return lambda.value_or(std::sqrt(static_cast<double>(std::max(rows, cols))));
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::converged:
      return "converged";
    case Termination::max_iter_reached:
      return "max_iter_reached";
  }
  return "unknown";
}

}  // namespace rbf
