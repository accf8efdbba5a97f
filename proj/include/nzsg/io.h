#ifndef NZSG_IO_H_
#define NZSG_IO_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nzsg/dynamics.h"
#include "nzsg/no_regret.h"
#include "nzsg/spectral.h"

namespace nzsg {

inline constexpr std::string_view kVersion = "0.1.0";

// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string FormatDouble(double value);

std::string HexHash(std::string_view bytes);

// Lines written as "# <line>" before the CSV header.
using HeaderComments = std::vector<std::string>;

// Columns: t, dist_sq_total, dist_sq_player_1..n, avg_iterate_dist_sq, eta_s,
// overflow_flag. Every `stride`-th row is written plus the last one.
void WriteTrajectoryCsv(std::ostream& os, const Trajectory& traj,
                        const HeaderComments& comments, std::int64_t stride = 1);

// Columns: t, norm_player_1..n (per-player distance to the Nash set).
void WritePlayerNormsCsv(std::ostream& os, const Trajectory& traj,
                         const HeaderComments& comments,
                         std::int64_t stride = 1);

// Columns: t, avg_regret_1..n, exploitability.
void WriteLedgerCsv(std::ostream& os, const SelfplayResult& result,
                    const HeaderComments& comments);

nlohmann::json ComplexArray(const std::vector<Complex>& values);
nlohmann::json ToJson(const SpectralReport& report);
nlohmann::json ToJson(const RatePrediction& prediction);
nlohmann::json ToJson(const CertificateReport& report);

}  // namespace nzsg

#endif  // NZSG_IO_H_
