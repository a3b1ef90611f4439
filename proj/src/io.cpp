#include "cbe/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cbe {

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double x) {
  std::uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  put_u64(out, bits);
}

void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

void read_exact(std::istream& is, char* dst, std::size_t n, const char* what) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw ConfigError(std::string("binary read: truncated ") + what);
}

std::uint64_t get_u64(std::istream& is, const char* what) {
  char buf[8];
  read_exact(is, buf, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

double get_f64(std::istream& is, const char* what) {
  const std::uint64_t bits = get_u64(is, what);
  double x = 0.0;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

std::uint8_t get_u8(std::istream& is, const char* what) {
  char c;
  read_exact(is, &c, 1, what);
  return static_cast<std::uint8_t>(c);
}

void put_f64_array(std::string& out, const std::vector<double>& xs) {
  for (double x : xs) put_f64(out, x);
}

std::vector<double> get_f64_array(std::istream& is, std::size_t n,
                                  const char* what) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = get_f64(is, what);
  return xs;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw ConfigError("cannot open for reading: " + path);
  return is;
}

std::uint8_t sigma_code(Sigma s) { return s == Sigma::kOne ? 0 : 1; }

Sigma sigma_from_code(std::uint8_t c) {
  if (c == 0) return Sigma::kOne;
  if (c == 1) return Sigma::kImag;
  throw ConfigError("binary read: invalid sigma code");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) os << ',';
    os << csv_escape(header[j]);
  }
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("write_csv: row width does not match header");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) os << ',';
      os << csv_escape(row[j]);
    }
    os << '\n';
  }
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  auto os = open_out(path, false);
  write_csv(os, header, rows);
}

void write_field_csv(std::ostream& os, const FieldTrajectory& traj) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(traj.mesh.size());
  for (std::size_t i = 0; i < traj.mesh.size(); ++i) {
    rows.push_back({format_double(traj.mesh.theta[i]),
                    format_double(traj.psi[i]), format_double(traj.phi[i]),
                    format_double(traj.log_phi_star[i].real()),
                    format_double(traj.log_phi_star[i].imag())});
  }
  write_csv(os, {"theta", "psi", "phi", "re_logphistar", "im_logphistar"},
            rows);
}

void write_field_csv_file(const std::string& path, const FieldTrajectory& traj) {
  auto os = open_out(path, false);
  write_field_csv(os, traj);
}

void write_field_binary(std::ostream& os, const FieldTrajectory& traj,
                        std::uint64_t n) {
  const std::size_t m = traj.mesh.size();
  std::string buf;
  buf.reserve(8 * 3 + 1 + 8 + 5 * 8 * m);
  put_u64(buf, n);
  put_u64(buf, traj.steps);
  put_f64(buf, traj.beta);
  put_u8(buf, sigma_code(traj.sigma));
  put_u64(buf, m);
  put_f64_array(buf, traj.mesh.theta);
  put_f64_array(buf, traj.psi);
  put_f64_array(buf, traj.phi);
  std::vector<double> re(m), im(m);
  for (std::size_t i = 0; i < m; ++i) {
    re[i] = traj.log_phi_star[i].real();
    im[i] = traj.log_phi_star[i].imag();
  }
  put_f64_array(buf, re);
  put_f64_array(buf, im);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw ConfigError("write_field_binary: stream write failed");
}

void write_field_binary_file(const std::string& path,
                             const FieldTrajectory& traj, std::uint64_t n) {
  auto os = open_out(path, true);
  write_field_binary(os, traj, n);
}

FieldSnapshot read_field_binary(std::istream& is) {
  FieldSnapshot s;
  s.n = get_u64(is, "n");
  s.k = get_u64(is, "k");
  s.beta = get_f64(is, "beta");
  s.sigma = sigma_from_code(get_u8(is, "sigma"));
  const std::uint64_t m = get_u64(is, "mesh_len");
  if (m > (1ull << 32)) throw ConfigError("read_field_binary: mesh_len implausible");
  s.theta = get_f64_array(is, m, "theta");
  s.psi = get_f64_array(is, m, "psi");
  s.phi = get_f64_array(is, m, "phi");
  s.re_logphistar = get_f64_array(is, m, "re_logphistar");
  s.im_logphistar = get_f64_array(is, m, "im_logphistar");
  return s;
}

FieldSnapshot read_field_binary_file(const std::string& path) {
  auto is = open_in(path, true);
  return read_field_binary(is);
}

void write_sde_binary(std::ostream& os, const SdeConfig& config,
                      const DecorationPath& path) {
  if (!path.has_stored_paths())
    throw ConfigError("write_sde_binary: path was integrated without stored matrices");
  const std::size_t t_len = path.time_count();
  const std::size_t theta_len = path.theta_count();
  std::string buf;
  put_f64(buf, config.beta);
  put_f64(buf, config.k1);
  put_u8(buf, sigma_code(config.sigma));
  put_u8(buf, path.variant == SdeVariant::kMatched ? 0 : 1);
  put_f64(buf, config.t_minus);
  put_f64(buf, config.t_dagger);
  put_f64(buf, config.t_plus);
  put_f64(buf, config.dt);
  put_u64(buf, config.k4);
  put_u64(buf, config.k5);
  put_f64(buf, config.centering);
  put_f64(buf, config.noise_scale);
  put_u64(buf, t_len);
  put_u64(buf, theta_len);
  put_f64_array(buf, path.theta);
  put_f64_array(buf, path.times);
  for (std::size_t r = 0; r < t_len; ++r)
    for (std::size_t c = 0; c < theta_len; ++c)
      put_f64(buf, path.l_at(r, c).real());
  for (std::size_t r = 0; r < t_len; ++r)
    for (std::size_t c = 0; c < theta_len; ++c)
      put_f64(buf, path.l_at(r, c).imag());
  for (std::size_t r = 0; r < t_len; ++r)
    for (std::size_t c = 0; c < theta_len; ++c)
      put_f64(buf, path.u_at(r, c));
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw ConfigError("write_sde_binary: stream write failed");
}

void write_sde_binary_file(const std::string& file, const SdeConfig& config,
                           const DecorationPath& path) {
  auto os = open_out(file, true);
  write_sde_binary(os, config, path);
}

std::string point_configuration_to_json(const PointConfiguration& config) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : config.points) {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& z : p.f) f.push_back({z.real(), z.imag()});
    arr.push_back({{"theta", p.theta}, {"v", p.v}, {"f", std::move(f)}});
  }
  return arr.dump();
}

PointConfiguration point_configuration_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("point configuration JSON: ") + e.what());
  }
  if (!arr.is_array())
    throw ConfigError("point configuration JSON: top level must be an array");
  PointConfiguration out;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("theta") || !item.contains("v") ||
        !item.contains("f"))
      throw ConfigError("point configuration JSON: need {theta, v, f}");
    MarkedPoint p;
    p.theta = item.at("theta").get<double>();
    p.v = item.at("v").get<double>();
    const auto& f = item.at("f");
    if (!f.is_array())
      throw ConfigError("point configuration JSON: f must be an array of pairs");
    for (const auto& z : f) {
      if (!z.is_array() || z.size() != 2)
        throw ConfigError("point configuration JSON: f entries must be [re, im]");
      p.f.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_value_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config file line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config file line " + std::to_string(lineno) +
                        ": empty key");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
  auto is = open_in(path, false);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_key_value_text(ss.str());
}

}  // namespace cbe
