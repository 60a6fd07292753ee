#pragma once

#include <string>
#include <vector>

#include "core/simulate.hpp"

namespace mucogarch {

// Returns CSV: one row per sampling interval. An optional header is detected
// by its non-numeric first line; a leading "t" column (by header name, as
// written by write_returns_csv) carries the time grid and fixes delta. Files
// without a time column need delta_override > 0. Malformed rows raise
// ParseError naming the 1-based line.
ReturnsSample read_returns_csv(const std::string& path, double delta_override = 0.0);

// Header t,g1,...,gd; t_i = i * delta; full-precision (%.17g) cells.
void write_returns_csv(const std::string& path, const ReturnsSample& sample);

// Header t,y11,y21,...,ydd (vec order, column-major); one row per collected
// window end. Requires the sample to carry a volatility path.
void write_vol_csv(const std::string& path, const ReturnsSample& sample);

}  // namespace mucogarch
