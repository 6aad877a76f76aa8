#pragma once

#include "nirb/config.hpp"

#include <string>
#include <vector>

namespace nirb {

/// A CSV table; text() prefixes '#' metadata lines.
struct CsvTable {
  std::string name;  // file name inside the output directory
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string text() const;
};

std::string format_value(double x);

/// Provenance common to every table: config hash, mesh, δ, σ_y, kernel, seeds.
std::vector<std::pair<std::string, std::string>> provenance(const Config& config, const std::string& command);

/// convergence.csv: h, H, fine, coarse, plain, rectified, gp at μ = heat.convergence_mu,
/// then a "slope" row; coarse_order.csv: L2 error at T of the coarse scheme and its slope.
std::vector<CsvTable> cmd_convergence(const Config& config, const Progress& progress = {});

/// direct_tables.csv: pair, plain, rectified, gp, true_projection, coarse (maxima over μ),
/// direct_per_parameter.csv: the same per held-out μ.
std::vector<CsvTable> cmd_direct_tables(const Config& config, const Progress& progress = {});

/// adjoint_tables.csv: variant (clean|noisy), pair, rectified, fine, true_projection, coarse;
/// adjoint_gradients.csv: dF/dμ from the fine adjoint and from NIRB per held-out μ.
std::vector<CsvTable> cmd_adjoint_tables(const Config& config, const Progress& progress = {});

/// brusselator_tables.csv, brusselator_gradients.csv, brusselator_timings.csv, brusselator_lambda.csv
std::vector<CsvTable> cmd_brusselator(const Config& config, const Progress& progress = {});

}  // namespace nirb
