#pragma once

#include <Eigen/Dense>
#include <span>

#include "sdbp/engine.hpp"
#include "sdbp/symbols.hpp"

namespace sdbp {

struct MetricOptions {
  // Diagonal loading Sigma + lambda I with
  // lambda = max(loading_floor, loading_scale * trace / dim).
  double loading_floor = 1e-12;
  double loading_scale = 1e-6;
  // Add (logdet Sigma_y - logdet Sigma_x) to the metric. Constant per slot,
  // so decisions are identical either way; kept for per-slot likelihood
  // reporting.
  bool include_logdet = true;
};

// Gaussian moments of the windowed particle vectors
// y_k = [s_k, s_{k-1}, ..., s_{k-L}] (stacked 4-vectors, newest first) and
// x_k = [s_{k-1}, ..., s_{k-L}]. mu_x / sigma_x are exactly the trailing
// block of mu_y / sigma_y since both are moments of the same particles.
struct WindowStats {
  Eigen::VectorXd mu_y;     // 4(L+1)
  Eigen::MatrixXd sigma_y;  // 4(L+1) x 4(L+1)
  Eigen::VectorXd mu_x;     // 4L
  Eigen::MatrixXd sigma_x;  // 4L x 4L
  std::size_t k = 0;
  int memory = 0;
};

// Sample mean and unbiased (1/(N_p - 1)) covariance over the cloud at slot k
// (0-based; valid for L <= k < K). Throws std::invalid_argument with fewer
// than two particles, std::out_of_range for a window leaving the block.
WindowStats estimate_moments(const SymbolCloud& cloud, std::size_t k, int L);

// Branch-metric evaluator for one slot, built once per slot: regularized
// covariance factorizations plus the optional log-determinant correction.
// psi(s, x) = (y - mu_y)' Sy^-1 (y - mu_y) - (x - mu_x)' Sx^-1 (x - mu_x).
class SlotMetric {
 public:
  SlotMetric(const WindowStats& stats, const MetricOptions& opts);

  // x must have exactly `memory` symbols, newest (s_{k-1}) first.
  double psi(const Symbol4& s, std::span<const Symbol4> x) const;

  int memory() const { return memory_; }
  // Count of covariance blocks (0..2) whose smallest eigenvalue fell below
  // the loading; surfaced instead of ever failing the factorization.
  int regularization_events() const { return reg_events_; }
  double logdet_correction() const { return logdet_term_; }

 private:
  double quad(const Eigen::VectorXd& centered, bool y_block) const;

  Eigen::VectorXd mu_y_, mu_x_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_y_, ldlt_x_;
  double logdet_term_ = 0.0;
  int memory_ = 0;
  int reg_events_ = 0;
  bool include_logdet_ = true;
};

// One-off evaluation of the branch metric (convenience over SlotMetric).
double branch_metric(const Symbol4& s, std::span<const Symbol4> x,
                     const WindowStats& stats, const MetricOptions& opts = {});

}  // namespace sdbp
