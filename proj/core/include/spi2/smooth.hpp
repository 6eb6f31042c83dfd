#pragma once

// Smooth surrogates for max/min/hinge used by the boundary, volume and
// soft-sum constraint terms. Each operator optionally writes its partial
// derivatives so callers can chain gradients without re-evaluation.

#include <cmath>
#include <span>
#include <vector>

#include "spi2/geometry.hpp"

namespace spi2 {

/// Added under the square root of every Euclidean norm that feeds a
/// gradient, so coincident points still produce finite derivatives.
inline constexpr double kNormGuard = 1e-16;

inline double guarded_norm(const Vec3& v) { return std::sqrt(v.squaredNorm() + kNormGuard); }

/// (1/alpha) log sum exp(alpha v_k). Throws std::invalid_argument on empty
/// input or non-positive alpha. `weights`, when given, receives dM/dv_k.
double soft_max(std::span<const double> values, double alpha, std::vector<double>* weights = nullptr);

/// -(1/alpha) log sum exp(-alpha v_k).
double soft_min(std::span<const double> values, double alpha, std::vector<double>* weights = nullptr);

/// (1/beta) log(1 + exp(beta v)), stable for large |beta v|.
double hinge(double v, double beta);

/// d hinge / dv = logistic(beta v).
double hinge_derivative(double v, double beta);

/// log(1 + exp(z)) without overflow.
double softplus(double z);

/// logistic(z) without overflow.
double logistic(double z);

/// Exponentially weighted average sum v e^{alpha v} / sum e^{alpha v}; a
/// lower bound on max(v). Negative alpha gives the matching upper bound on
/// min(v). `weights` receives dB/dv_k when given.
double boltzmann(std::span<const double> values, double alpha, std::vector<double>* weights = nullptr);

inline double boltzmann_max(std::span<const double> values, double alpha,
                            std::vector<double>* weights = nullptr) {
  return boltzmann(values, alpha, weights);
}
inline double boltzmann_min(std::span<const double> values, double alpha,
                            std::vector<double>* weights = nullptr) {
  return boltzmann(values, -alpha, weights);
}

}  // namespace spi2
