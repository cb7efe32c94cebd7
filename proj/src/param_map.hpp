#pragma once

// Optimizer coordinates for coefficient vectors: the multiplicative forms are
// searched over ln(beta0) so the prefactor stays positive.

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "geols/models.hpp"

namespace geols {

inline Eigen::VectorXd beta_from_theta(const ModelSpec& spec, const Eigen::VectorXd& theta) {
  Eigen::VectorXd beta = theta.head(static_cast<Eigen::Index>(spec.coefficient_count()));
  if (spec.multiplicative()) beta[0] = std::exp(beta[0]);
  return beta;
}

inline Eigen::VectorXd theta_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta) {
  Eigen::VectorXd theta = beta;
  if (spec.multiplicative()) {
    if (!(beta[0] > 0.0)) throw std::domain_error("prefactor must be positive for a multiplicative model");
    theta[0] = std::log(beta[0]);
  }
  return theta;
}

}  // namespace geols
