#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "momlasso/estimators.hpp"

namespace momlasso {

namespace {

double lipschitz(const Eigen::MatrixXd& x) {
  const Index n = x.rows();
  Eigen::MatrixXd gram = x.cols() <= n ? Eigen::MatrixXd(x.transpose() * x) : Eigen::MatrixXd(x * x.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0) / static_cast<double>(n);
}

// FISTA with gradient restart on |y - X b|^2 / (2 n) + lambda |b|_1, warm
// started at beta. Returns the number of iterations used.
std::int64_t fista(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda, double lip,
                   std::int64_t max_iters, double tol, Eigen::VectorXd& beta, bool& converged) {
  const double n = static_cast<double>(x.rows());
  converged = false;
  if (lip <= 0) {
    beta.setZero();
    converged = true;
    return 0;
  }
  const double step = 1.0 / lip;
  Eigen::VectorXd z = beta;
  double theta = 1.0;
  std::int64_t it = 0;
  while (it < max_iters) {
    ++it;
    const Eigen::VectorXd grad = x.transpose() * (x * z - y) / n;
    Eigen::VectorXd next = z - step * grad;
    soft_threshold_inplace(next, step * lambda);
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const Eigen::VectorXd delta = next - beta;
    if ((z - next).dot(delta) > 0) {
      theta = 1.0;
      z = next;
    } else {
      z = next + ((theta - 1.0) / theta_next) * delta;
      theta = theta_next;
    }
    beta = next;
    if (delta.norm() <= tol * std::max(1.0, beta.norm())) {
      converged = true;
      break;
    }
  }
  return it;
}

FitResult baseline_result(const Dataset& data, Eigen::VectorXd beta, std::int64_t iters, bool converged,
                          double mu) {
  FitResult out;
  const Eigen::VectorXd r = data.y - data.x * beta;
  out.sigma_hat = std::sqrt(r.squaredNorm() / static_cast<double>(data.n()));
  out.beta_hat = std::move(beta);
  out.k_used = 1;
  out.mu_used = mu;
  out.diagnostics.iterations = iters;
  out.diagnostics.converged = converged;
  if (!converged) out.diagnostics.flags.push_back("max_iters_reached");
  return out;
}

}  // namespace

FitResult lasso_baseline(const Dataset& data, double lambda, std::int64_t max_iters, double tol) {
  data.validate();
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be nonnegative");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.d());
  bool converged = false;
  const auto iters = fista(data.x, data.y, lambda, lipschitz(data.x), max_iters, tol, beta, converged);
  return baseline_result(data, std::move(beta), iters, converged, lambda);
}

FitResult sqrt_lasso_baseline(const Dataset& data, double mu, std::int64_t max_iters, double tol) {
  data.validate();
  if (!(mu >= 0) || !std::isfinite(mu)) throw InvalidInput("mu must be nonnegative");
  const double n = static_cast<double>(data.n());
  const double lip = lipschitz(data.x);
  const double floor = 1e-12 * std::max(1.0, std::sqrt(data.y.squaredNorm() / n));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.d());
  double sigma = std::max(std::sqrt(data.y.squaredNorm() / n), floor);
  std::int64_t used = 0;
  bool converged = false;
  const std::int64_t inner_cap = std::max<std::int64_t>(1, max_iters / 20);
  while (used < max_iters) {
    bool inner_ok = false;
    const Eigen::VectorXd old = beta;
    used += fista(data.x, data.y, mu * sigma, lip, std::min(inner_cap, max_iters - used), tol, beta, inner_ok);
    const double next_sigma = std::max(std::sqrt((data.y - data.x * beta).squaredNorm() / n), floor);
    const double move = (beta - old).norm() + std::abs(next_sigma - sigma);
    sigma = next_sigma;
    if (inner_ok && move <= tol * std::max(1.0, beta.norm() + sigma)) {
      converged = true;
      break;
    }
    if (sigma <= floor) {
      converged = inner_ok;
      break;
    }
  }
  return baseline_result(data, std::move(beta), used, converged, mu);
}

}  // namespace momlasso
