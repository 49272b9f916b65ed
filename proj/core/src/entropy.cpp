#include "darwinism/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace darwinism {

namespace {

constexpr double kClampSlack = 1e-12;

double clamp_unit(double x, const char* what) {
  if (!(x >= -kClampSlack && x <= 1.0 + kClampSlack)) {
    throw DomainError(std::string(what) + " must lie in [0, 1]");
  }
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace

Bits binary_entropy(double x) {
  x = clamp_unit(x, "binary_entropy argument");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

Bits holevo_from_overlap(double gamma2_fragment, double p0) {
  const double g = clamp_unit(gamma2_fragment, "squared overlap");
  p0 = clamp_unit(p0, "pointer probability");
  const double disc = std::max(0.0, 1.0 - 4.0 * p0 * (1.0 - p0) * (1.0 - g));
  const double lambda_max = 0.5 * (1.0 + std::sqrt(disc));
  return binary_entropy(lambda_max);
}

}  // namespace darwinism
