#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tbh/ensemble.hpp"

namespace tbh {

// ============================================================
// On-disk formats: CSV moment series with enough digits for a
// lossless double round trip, and flat key = value reports.
// ============================================================

/// One double with 17 significant digits (round-trip exact).
std::string format_full(double value);

/// Writes `t,re_a1,im_a1,...,re_aM,im_aM,mean_E,mean_H` rows.
/// Throws std::runtime_error if the file cannot be written.
void write_moment_csv(const std::string& path, const MomentSeries& series);

/// Reads a file produced by write_moment_csv.  Throws std::runtime_error
/// on malformed content.
MomentSeries read_moment_csv(const std::string& path);

/// Ordered key = value lines (values preformatted by the caller).
using Report = std::vector<std::pair<std::string, std::string>>;

/// Writes one `key = value` line per entry.
void write_report(const std::string& path, const Report& report);

}  // namespace tbh
