#include "sdbp/stats.hpp"

#include <stdexcept>

namespace sdbp {
namespace {

// lambda and event flag for one covariance block.
std::pair<double, bool> loading(const Eigen::MatrixXd& sigma,
                                const MetricOptions& opts) {
  const auto dim = sigma.rows();
  if (dim == 0) return {0.0, false};
  const double lambda = std::max(opts.loading_floor,
                                 opts.loading_scale * sigma.trace() / dim);
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma,
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  return {lambda, min_eig < lambda};
}

double logdet(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
  if (ldlt.rows() == 0) return 0.0;
  return ldlt.vectorD().array().log().sum();
}

}  // namespace

WindowStats estimate_moments(const SymbolCloud& cloud, std::size_t k, int L) {
  const std::size_t np = cloud.num_particles();
  if (np < 2)
    throw std::invalid_argument("estimate_moments: need at least 2 particles");
  if (L < 0) throw std::invalid_argument("estimate_moments: negative memory");
  const std::size_t kk = cloud.num_symbols();
  if (k >= kk || k < static_cast<std::size_t>(L))
    throw std::out_of_range("estimate_moments: window leaves the block");

  const int dim = 4 * (L + 1);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
  std::vector<Eigen::VectorXd> windows(np, Eigen::VectorXd(dim));
  for (std::size_t n = 0; n < np; ++n) {
    auto& w = windows[n];
    for (int j = 0; j <= L; ++j) {
      const Symbol4& s = cloud.particles[n][k - j];
      for (int c = 0; c < 4; ++c) w[4 * j + c] = s[c];
    }
    mu += w;
  }
  mu /= static_cast<double>(np);

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t n = 0; n < np; ++n) {
    const Eigen::VectorXd d = windows[n] - mu;
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(d, 1.0);
  }
  sigma = sigma.selfadjointView<Eigen::Lower>();
  sigma /= static_cast<double>(np - 1);

  WindowStats stats;
  stats.mu_y = mu;
  stats.sigma_y = sigma;
  stats.mu_x = mu.tail(4 * L);
  stats.sigma_x = sigma.bottomRightCorner(4 * L, 4 * L);
  stats.k = k;
  stats.memory = L;
  return stats;
}

SlotMetric::SlotMetric(const WindowStats& stats, const MetricOptions& opts)
    : mu_y_(stats.mu_y),
      mu_x_(stats.mu_x),
      memory_(stats.memory),
      include_logdet_(opts.include_logdet) {
  const auto [ly, ev_y] = loading(stats.sigma_y, opts);
  const auto [lx, ev_x] = loading(stats.sigma_x, opts);
  reg_events_ = (ev_y ? 1 : 0) + (ev_x ? 1 : 0);

  const auto dy = stats.sigma_y.rows();
  ldlt_y_.compute(stats.sigma_y +
                  ly * Eigen::MatrixXd::Identity(dy, dy));
  const auto dx = stats.sigma_x.rows();
  ldlt_x_.compute(stats.sigma_x + lx * Eigen::MatrixXd::Identity(dx, dx));
  if (include_logdet_) logdet_term_ = logdet(ldlt_y_) - logdet(ldlt_x_);
}

double SlotMetric::quad(const Eigen::VectorXd& centered, bool y_block) const {
  if (centered.size() == 0) return 0.0;
  const auto& ldlt = y_block ? ldlt_y_ : ldlt_x_;
  return centered.dot(ldlt.solve(centered));
}

double SlotMetric::psi(const Symbol4& s, std::span<const Symbol4> x) const {
  if (static_cast<int>(x.size()) != memory_)
    throw std::invalid_argument("SlotMetric::psi: state length != memory");
  Eigen::VectorXd y(4 * (memory_ + 1));
  for (int c = 0; c < 4; ++c) y[c] = s[c];
  for (int j = 0; j < memory_; ++j)
    for (int c = 0; c < 4; ++c) y[4 * (j + 1) + c] = x[j][c];

  const double qy = quad(y - mu_y_, true);
  const double qx = quad(y.tail(4 * memory_) - mu_x_, false);
  return qy - qx + logdet_term_;
}

double branch_metric(const Symbol4& s, std::span<const Symbol4> x,
                     const WindowStats& stats, const MetricOptions& opts) {
  return SlotMetric(stats, opts).psi(s, x);
}

}  // namespace sdbp
