#include "nzsg/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "nzsg/rng.h"

namespace nzsg {

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string HexHash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(bytes)));
  return std::string(buf);
}

namespace {

void WriteComments(std::ostream& os, const HeaderComments& comments) {
  for (const std::string& line : comments) os << "# " << line << '\n';
}

template <typename RowFn>
void ForStridedRows(const Trajectory& traj, std::int64_t stride, RowFn&& fn) {
  if (stride < 1) stride = 1;
  const std::size_t n = traj.rows.size();
  for (std::size_t k = 0; k < n; ++k) {
    const TrajectoryRow& row = traj.rows[k];
    if (row.t % stride == 0 || k + 1 == n || row.overflow) fn(row);
  }
}

}  // namespace

void WriteTrajectoryCsv(std::ostream& os, const Trajectory& traj,
                        const HeaderComments& comments, std::int64_t stride) {
  WriteComments(os, comments);
  const std::size_t players =
      traj.rows.empty() ? 0 : traj.rows.front().dist_sq_player.size();
  os << "t,dist_sq_total";
  for (std::size_t i = 0; i < players; ++i) os << ",dist_sq_player_" << i + 1;
  os << ",avg_iterate_dist_sq,eta_s,overflow_flag\n";
  ForStridedRows(traj, stride, [&](const TrajectoryRow& row) {
    os << row.t << ',' << FormatDouble(row.dist_sq_total);
    for (double v : row.dist_sq_player) os << ',' << FormatDouble(v);
    os << ',' << FormatDouble(row.avg_iterate_dist_sq) << ','
       << FormatDouble(row.eta) << ',' << (row.overflow ? 1 : 0) << '\n';
  });
}

void WritePlayerNormsCsv(std::ostream& os, const Trajectory& traj,
                         const HeaderComments& comments, std::int64_t stride) {
  WriteComments(os, comments);
  const std::size_t players =
      traj.rows.empty() ? 0 : traj.rows.front().dist_sq_player.size();
  os << "t";
  for (std::size_t i = 0; i < players; ++i) os << ",norm_player_" << i + 1;
  os << '\n';
  ForStridedRows(traj, stride, [&](const TrajectoryRow& row) {
    os << row.t;
    for (double v : row.dist_sq_player) os << ',' << FormatDouble(std::sqrt(v));
    os << '\n';
  });
}

void WriteLedgerCsv(std::ostream& os, const SelfplayResult& result,
                    const HeaderComments& comments) {
  WriteComments(os, comments);
  const std::size_t players = result.checkpoints.empty()
                                  ? 0
                                  : result.checkpoints.front().average_regret.size();
  os << "t";
  for (std::size_t i = 0; i < players; ++i) os << ",avg_regret_" << i + 1;
  os << ",exploitability\n";
  for (const SelfplayCheckpoint& cp : result.checkpoints) {
    os << cp.t;
    for (double v : cp.average_regret) os << ',' << FormatDouble(v);
    os << ',' << FormatDouble(cp.exploitability) << '\n';
  }
}

nlohmann::json ComplexArray(const std::vector<Complex>& values) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Complex& z : values) arr.push_back({z.real(), z.imag()});
  return arr;
}

nlohmann::json ToJson(const SpectralReport& report) {
  nlohmann::json j;
  j["eta"] = report.eta;
  j["eigenvalues"] = ComplexArray(report.eigenvalues);
  j["has_nonzero_eigenvalues"] = report.has_nonzero;
  j["omega"] = report.has_nonzero ? nlohmann::json(report.omega)
                                  : nlohmann::json(nullptr);
  j["rho"] = report.rho;
  j["max_abs_real_part"] = report.max_abs_real_part;
  j["ga_jacobian_spectrum"] = ComplexArray(report.ga_jacobian_spectrum);
  j["oga_jacobian_spectrum"] = ComplexArray(report.oga_jacobian_spectrum);
  j["eigenvector_condition"] = std::isfinite(report.eigenvector_condition)
                                   ? nlohmann::json(report.eigenvector_condition)
                                   : nlohmann::json("inf");
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

nlohmann::json ToJson(const RatePrediction& prediction) {
  nlohmann::json j;
  j["theorem"] = std::string(RateTheoremName(prediction.theorem));
  j["prescribed_eta"] = prediction.prescribed_eta
                            ? nlohmann::json(*prediction.prescribed_eta)
                            : nlohmann::json(nullptr);
  j["per_step_factor"] = prediction.per_step_factor
                             ? nlohmann::json(*prediction.per_step_factor)
                             : nlohmann::json(nullptr);
  j["is_lower_bound"] = prediction.is_lower_bound;
  j["bound"] = prediction.bound;
  return j;
}

nlohmann::json ToJson(const CertificateReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["samples"] = report.samples;
  j["worst"] = std::isfinite(report.worst) ? nlohmann::json(report.worst)
                                           : nlohmann::json(nullptr);
  j["applicable"] = report.applicable;
  j["passed"] = report.passed;
  if (!report.detail.empty()) j["detail"] = report.detail;
  return j;
}

}  // namespace nzsg
