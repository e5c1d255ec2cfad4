#pragma once

#include "epsrb/elliptic.hpp"
#include "epsrb/eps_solver.hpp"
#include "epsrb/greedy.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace epsrb::elliptic {

struct OfflineSettings {
  std::vector<std::size_t> nu_counts{4, 4};
  std::size_t eta_count = 16;
  EtaSpacing eta_spacing = EtaSpacing::Log;
  double delta = 1e-6;
  double safety_factor = 2.0;
  /// Parameters per axis used to estimate [eta_-, eta_+] (tensor grid).
  std::size_t interval_points = 5;
};

struct Tolerances {
  double online = 1e-3;  ///< online misfit may exceed eps by this fraction
  double psi_rtol = 1e-10;
  double bracket_rtol = 1e-12;
  double cg_rtol = 1e-12;
};

struct ValidationSettings {
  std::size_t samples = 50;
  std::uint64_t seed = 20240601;
};

/// Everything the command-line front end reads from a family file.
struct EllipticConfig {
  EllipticSpec spec;
  OfflineSettings offline;
  Tolerances tolerances;
  ValidationSettings validation;
  unsigned workers = 0;
};

/// Strict JSON reader: unknown keys, wrong types and invalid values raise
/// ConfigParse with the offending key in the message.
///
///   {
///     "n": 64, "eps": 0.05, "nu_box": [[0, 1], [0, 0.4]],
///     "coefficient": "affine_sine"
///       | {"base": P, "terms": [P, ...], "alpha": 0.6}
///           with P = {"poly": [c0, c1, ...], "sine": [s1, s2, ...]},
///     "forcing": "rough_smooth"
///       | {"base": C, "terms": [C, ...]}
///           with C = {"spectral": {"scale": s, "decay": d}} | {"nodal": P},
///     "grid": {"nu": [4, 4], "eta": 16, "eta_spacing": "log", "interval_points": 5},
///     "delta": 1e-6, "safety_factor": 2.0,
///     "tolerances": {"online": 1e-3, "psi_rtol": 1e-10, "bracket_rtol": 1e-12, "cg_rtol": 1e-12},
///     "validation": {"samples": 50, "seed": 20240601},
///     "workers": 0
///   }
///
/// Every key is optional and defaults to the values above.
EllipticConfig parse_elliptic_config(std::string_view json_text);
EllipticConfig load_elliptic_config(const std::filesystem::path& path);

EpsSolverOptions solver_options(const EllipticConfig& config);

}  // namespace epsrb::elliptic
