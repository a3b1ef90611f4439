#pragma once
// Serialization: CSV tables, compact little-endian binary dumps for field
// trajectories and SDE paths, JSON round-trips for marked point
// configurations, and the key=value config-file parser used by the CLI.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cbe/decoration.hpp"
#include "cbe/field.hpp"
#include "cbe/pointproc.hpp"

namespace cbe {

// ---------------------------------------------------------------------------
// Generic CSV
// ---------------------------------------------------------------------------

// Render a double with enough digits to round-trip (printf %.17g).
std::string format_double(double x);

// Header row plus string cells.  Cells containing commas, quotes or newlines
// are quoted per RFC 4180.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

// ---------------------------------------------------------------------------
// Field trajectory snapshots
// ---------------------------------------------------------------------------

// CSV columns: theta, psi, phi, re_logphistar, im_logphistar — one row per
// mesh point, values after traj.steps coefficient steps.
void write_field_csv(std::ostream& os, const FieldTrajectory& traj);
void write_field_csv_file(const std::string& path, const FieldTrajectory& traj);

// Compact binary dump.  Every multi-byte value is little-endian.
// Layout:
//   u64  n          ensemble dimension the run targets
//   u64  k          coefficient steps actually taken (traj.steps)
//   f64  beta
//   u8   sigma      0 = real weight, 1 = imaginary weight
//   u64  mesh_len
//   f64[mesh_len]   theta
//   f64[mesh_len]   psi
//   f64[mesh_len]   phi
//   f64[mesh_len]   re_logphistar
//   f64[mesh_len]   im_logphistar
struct FieldSnapshot {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double beta = 0.0;
  Sigma sigma = Sigma::kOne;
  std::vector<double> theta;
  std::vector<double> psi;
  std::vector<double> phi;
  std::vector<double> re_logphistar;
  std::vector<double> im_logphistar;
};

void write_field_binary(std::ostream& os, const FieldTrajectory& traj,
                        std::uint64_t n);
void write_field_binary_file(const std::string& path,
                             const FieldTrajectory& traj, std::uint64_t n);
FieldSnapshot read_field_binary(std::istream& is);
FieldSnapshot read_field_binary_file(const std::string& path);

// ---------------------------------------------------------------------------
// SDE path dumps
// ---------------------------------------------------------------------------

// Binary layout (little-endian), requires a path with stored matrices:
//   header: f64 beta, f64 k1, u8 sigma, u8 variant(0 matched / 1 flat),
//           f64 t_minus, f64 t_dagger, f64 t_plus, f64 dt,
//           u64 k4, u64 k5, f64 centering, f64 noise_scale,
//           u64 t_len, u64 theta_len,
//           f64[theta_len] theta, f64[t_len] times
//   arrays: f64[t_len*theta_len] re L, f64[t_len*theta_len] im L,
//           f64[t_len*theta_len] U      (row-major, time index outer)
void write_sde_binary(std::ostream& os, const SdeConfig& config,
                      const DecorationPath& path);
void write_sde_binary_file(const std::string& file,
                           const SdeConfig& config,
                           const DecorationPath& path);

// ---------------------------------------------------------------------------
// Marked point configurations (JSON)
// ---------------------------------------------------------------------------

// Schema: [{"theta": t, "v": v, "f": [[re, im], ...]}, ...]
std::string point_configuration_to_json(const PointConfiguration& config);
PointConfiguration point_configuration_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// key=value config files
// ---------------------------------------------------------------------------

// Lines of the form `key = value`; blank lines and lines starting with # are
// skipped; whitespace around keys and values is trimmed; on duplicate keys
// the last occurrence wins.  A non-comment line without '=' is an error.
std::map<std::string, std::string> parse_key_value_text(const std::string& text);
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

}  // namespace cbe
