#include "spi2/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spi2 {

namespace {

void require(std::span<const double> values, double alpha, const char* op) {
  if (values.empty()) throw std::invalid_argument(std::string(op) + ": empty value list");
  if (!(alpha > 0.0)) throw std::invalid_argument(std::string(op) + ": sharpness must be positive");
}

// Max-shifted log-sum-exp of alpha*v; writes softmax weights when asked.
double log_sum_exp(std::span<const double> values, double alpha, std::vector<double>* weights) {
  double peak = alpha * values[0];
  for (double v : values) peak = std::max(peak, alpha * v);
  double sum = 0.0;
  for (double v : values) sum += std::exp(alpha * v - peak);
  if (weights) {
    weights->resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      (*weights)[k] = std::exp(alpha * values[k] - peak) / sum;
    }
  }
  return peak + std::log(sum);
}

}  // namespace

double soft_max(std::span<const double> values, double alpha, std::vector<double>* weights) {
  require(values, alpha, "soft_max");
  return log_sum_exp(values, alpha, weights) / alpha;
}

double soft_min(std::span<const double> values, double alpha, std::vector<double>* weights) {
  require(values, alpha, "soft_min");
  return -log_sum_exp(values, -alpha, weights) / alpha;
}

double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double hinge(double v, double beta) { return softplus(beta * v) / beta; }

double hinge_derivative(double v, double beta) { return logistic(beta * v); }

double boltzmann(std::span<const double> values, double alpha, std::vector<double>* weights) {
  if (values.empty()) throw std::invalid_argument("boltzmann: empty value list");
  double peak = alpha * values[0];
  for (double v : values) peak = std::max(peak, alpha * v);
  double num = 0.0, den = 0.0;
  for (double v : values) {
    const double w = std::exp(alpha * v - peak);
    num += v * w;
    den += w;
  }
  const double b = num / den;
  if (weights) {
    weights->resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double p = std::exp(alpha * values[k] - peak) / den;
      (*weights)[k] = p * (1.0 + alpha * (values[k] - b));
    }
  }
  return b;
}

}  // namespace spi2
