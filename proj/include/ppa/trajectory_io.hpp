#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppa/engine.hpp"

namespace ppa {

/// Render a double with 17 significant digits (bit-exact round trip).
std::string format_full(double v);

/// Column view of an emitted trajectory CSV.
struct TrajectoryTable {
  std::vector<long> n;
  std::vector<double> lambda;
  std::vector<double> f_x;
  std::vector<double> step_dist;
  std::vector<double> dist_to_ref;
  std::vector<double> fejer_margin;
  std::vector<double> tilde_residual;
  std::vector<double> sqc_residual;
  std::vector<double> rate_value;
  std::vector<long> inner_iters;
  std::vector<double> gap;

  std::size_t rows() const { return n.size(); }
};

/// CSV columns: n,lambda,f_x,step_dist,dist_to_ref,fejer_margin,
/// tilde_residual,sqc_residual,rate_value,inner_iters,gap. Row 0 holds x0
/// with zeros in the per-step fields; reference-dependent columns are NaN
/// when the objective has no known minimizer.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
TrajectoryTable read_trajectory_csv(std::istream& is);

/// Monitor aggregates recomputed from the primitive columns (lambda, f_x,
/// step_dist, dist_to_ref) alone; `derived_columns_match` reports whether
/// the emitted derived columns agree bit-for-bit with the recomputation at
/// the printed precision.
struct ReplayedMonitors {
  double worst_f_margin = 0.0;
  double worst_fejer_margin = 0.0;
  double worst_tilde_residual = 0.0;
  double worst_sqc_residual = 0.0;
  double rate_final_over_max = 0.0;
  double weighted_sum = 0.0;  // sum of lambda_n * d^2(x_n, ref)
  long rows = 0;
  bool has_reference = false;
  bool derived_columns_match = true;
};

ReplayedMonitors replay_monitors(const TrajectoryTable& table, std::optional<double> alpha);

}  // namespace ppa
