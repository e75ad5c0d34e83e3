#pragma once

// Subcommand bodies. Each returns the JSON document and its CSV rendering; the
// front end picks one and writes it out.

#include "config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace heatcoeff::cli {

struct CommandOutput {
  json doc;
  std::string csv;
};

//! I_{alpha,k}(rs); k must equal rs.size() - 1.
CommandOutput cmd_ifun(double alpha, int k, const std::vector<double>& rs, const Overrides& ov);

//! Density on a grid (explicit-grid, fourier-fields) or at a chart point (chart-analytic).
CommandOutput cmd_r2(const json& cfg, const Overrides& ov);

//! Oracle fit against the closed form (explicit-grid, fourier-fields, nct2).
CommandOutput cmd_a2_verify(const json& cfg, const Overrides& ov);

CommandOutput cmd_nct2(const json& cfg, const Overrides& ov);
CommandOutput cmd_nct4(const json& cfg, const Overrides& ov);

//! Modular curvature functions at (r0, y1[, y2]) and their spread over r0 in [0.1, 10].
CommandOutput cmd_modular(double r0, double y1, std::optional<double> y2);

//! Report of the invariant battery; doc["passed"] tells the outcome.
CommandOutput cmd_selftest(unsigned long long seed);

//! Shortest round-trip decimal form, as used in every CSV column.
std::string csv_number(double x);

}  // namespace heatcoeff::cli
