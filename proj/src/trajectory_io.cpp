#include "ppa/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ppa {

namespace {

constexpr char kHeader[] =
    "n,lambda,f_x,step_dist,dist_to_ref,fejer_margin,tilde_residual,sqc_residual,rate_value,"
    "inner_iters,gap";

bool same_printed(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return format_full(a) == format_full(b);
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << kHeader << "\n";
  const auto& m = traj.monitors;
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& r = traj.records[i];
    os << r.n << ',' << format_full(r.lambda) << ',' << format_full(r.f_value) << ','
       << format_full(r.step_distance) << ',' << format_full(m.dist_to_ref[i]) << ','
       << format_full(m.fejer_margin[i]) << ',' << format_full(m.tilde_residual[i]) << ','
       << format_full(m.sqc_residual[i]) << ',' << format_full(m.rate_value[i]) << ','
       << r.inner_iterations << ',' << format_full(r.certified_gap) << "\n";
  }
}

TrajectoryTable read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader) {
    throw ConfigError("trajectory csv: missing or unexpected header");
  }
  TrajectoryTable t;
  long expected_n = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 11) {
      throw ConfigError("trajectory csv: row with " + std::to_string(fields.size()) +
                        " fields (want 11): " + line);
    }
    auto num = [&](int i) { return std::strtod(fields[i].c_str(), nullptr); };
    t.n.push_back(std::strtol(fields[0].c_str(), nullptr, 10));
    if (t.n.back() != expected_n++) {
      throw ConfigError("trajectory csv: non-contiguous iteration index at row " + fields[0]);
    }
    t.lambda.push_back(num(1));
    t.f_x.push_back(num(2));
    t.step_dist.push_back(num(3));
    t.dist_to_ref.push_back(num(4));
    t.fejer_margin.push_back(num(5));
    t.tilde_residual.push_back(num(6));
    t.sqc_residual.push_back(num(7));
    t.rate_value.push_back(num(8));
    t.inner_iters.push_back(std::strtol(fields[9].c_str(), nullptr, 10));
    t.gap.push_back(num(10));
  }
  if (t.rows() == 0) throw ConfigError("trajectory csv: no rows");
  return t;
}

ReplayedMonitors replay_monitors(const TrajectoryTable& t, std::optional<double> alpha) {
  ReplayedMonitors out;
  out.rows = static_cast<long>(t.rows());
  out.has_reference = !std::isnan(t.dist_to_ref[0]);
  out.worst_f_margin = std::numeric_limits<double>::infinity();
  out.worst_fejer_margin = std::numeric_limits<double>::infinity();
  out.worst_tilde_residual = -std::numeric_limits<double>::infinity();
  out.worst_sqc_residual = -std::numeric_limits<double>::infinity();

  double lambda_sum = 0.0;
  double rate_max = 0.0;
  double rate_final = 0.0;
  for (std::size_t i = 1; i < t.rows(); ++i) {
    const double f_margin = t.f_x[i - 1] - t.f_x[i];
    out.worst_f_margin = std::min(out.worst_f_margin, f_margin);
    lambda_sum += t.lambda[i];

    if (out.has_reference) {
      const double d_prev = t.dist_to_ref[i - 1];
      const double d = t.dist_to_ref[i];
      const double step = t.step_dist[i];
      const double fejer = d_prev - d;
      const double tilde = step * step + d * d - d_prev * d_prev;
      const double rate = std::sqrt(lambda_sum) * d;
      out.worst_fejer_margin = std::min(out.worst_fejer_margin, fejer);
      out.worst_tilde_residual = std::max(out.worst_tilde_residual, tilde);
      out.weighted_sum += t.lambda[i] * d * d;
      rate_max = std::max(rate_max, rate);
      rate_final = rate;

      out.derived_columns_match = out.derived_columns_match &&
                                  same_printed(fejer, t.fejer_margin[i]) &&
                                  same_printed(tilde, t.tilde_residual[i]) &&
                                  same_printed(rate, t.rate_value[i]);
      if (alpha) {
        const double sqc = *alpha * t.lambda[i] * d * d - (d_prev * d_prev - d * d);
        out.worst_sqc_residual = std::max(out.worst_sqc_residual, sqc);
        out.derived_columns_match =
            out.derived_columns_match && same_printed(sqc, t.sqc_residual[i]);
      }
    }
  }
  if (t.rows() <= 1) {
    out.worst_f_margin = 0.0;
  }
  if (!out.has_reference || t.rows() <= 1) {
    out.worst_fejer_margin = 0.0;
    out.worst_tilde_residual = 0.0;
    out.worst_sqc_residual = 0.0;
  } else if (!alpha) {
    out.worst_sqc_residual = 0.0;
  }
  out.rate_final_over_max = rate_max > 0.0 ? rate_final / rate_max : 0.0;
  return out;
}

}  // namespace ppa
