#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "cpe/diagnostics.hpp"
#include "cpe/stepper.hpp"

namespace cpe {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int dim_h = 1;
  int nx = 64;
  int ny = 0;  // 0: follow nx in 2D, forced to 1 in 1D
  int nz = 32;
  double gamma = 2;
  double g = 1;
  double mu = 1;
  double lambda = 1;
  Variant variant = Variant::conservative;
  double eps = 1e-3;
  std::uint64_t seed = 1;
  bool zero_momentum = false;
  double dt = 1e-3;
  Scheme scheme = Scheme::imex_midpoint;
  double t_end = 1;
  int diag_every = 10;
  int snapshot_every = 0;
  std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& key, const std::string& val) {
  try {
    size_t pos = 0;
    const double x = std::stod(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for key: " + key);
  }
}

inline int parse_int(const std::string& key, const std::string& val) {
  try {
    size_t pos = 0;
    const long x = std::stol(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError("invalid value for key: " + key);
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& val) {
  try {
    size_t pos = 0;
    const std::uint64_t x = std::stoull(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for key: " + key);
  }
}

inline bool parse_bool(const std::string& key, const std::string& val) {
  if (val == "true" || val == "1") return true;
  if (val == "false" || val == "0") return false;
  throw ConfigError("invalid value for key: " + key);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed config line: " + stripped);
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string val = detail::trim(stripped.substr(eq + 1));
    if (key == "dim_h") cfg.dim_h = detail::parse_int(key, val);
    else if (key == "nx") cfg.nx = detail::parse_int(key, val);
    else if (key == "ny") cfg.ny = detail::parse_int(key, val);
    else if (key == "nz") cfg.nz = detail::parse_int(key, val);
    else if (key == "gamma") cfg.gamma = detail::parse_number(key, val);
    else if (key == "g") cfg.g = detail::parse_number(key, val);
    else if (key == "mu") cfg.mu = detail::parse_number(key, val);
    else if (key == "lambda") cfg.lambda = detail::parse_number(key, val);
    else if (key == "variant") {
      if (val == "conservative") cfg.variant = Variant::conservative;
      else if (val == "nonconservative") cfg.variant = Variant::nonconservative;
      else throw ConfigError("invalid value for key: variant");
    } else if (key == "eps") cfg.eps = detail::parse_number(key, val);
    else if (key == "seed") cfg.seed = detail::parse_u64(key, val);
    else if (key == "zero_momentum") cfg.zero_momentum = detail::parse_bool(key, val);
    else if (key == "dt") cfg.dt = detail::parse_number(key, val);
    else if (key == "scheme") {
      if (val == "imex_euler") cfg.scheme = Scheme::imex_euler;
      else if (val == "imex_midpoint") cfg.scheme = Scheme::imex_midpoint;
      else if (val == "explicit_rk2") cfg.scheme = Scheme::explicit_rk2;
      else throw ConfigError("invalid value for key: scheme");
    } else if (key == "t_end") cfg.t_end = detail::parse_number(key, val);
    else if (key == "diag_every") cfg.diag_every = detail::parse_int(key, val);
    else if (key == "snapshot_every") cfg.snapshot_every = detail::parse_int(key, val);
    else if (key == "out_dir") cfg.out_dir = val;
    else throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const char* diag_csv_header() {
  return "t,mass,mom_x,mom_y,E_basic,D_basic,E_total,E_rel,D_rel,delta_x,delta_y,Zmin,Zmax";
}

inline void write_diag_row(std::ostream& out, const DiagRecord<double>& r) {
  out << format_g17(r.t) << ',' << format_g17(r.mass) << ',' << format_g17(r.mom_x)
      << ',' << format_g17(r.mom_y) << ',' << format_g17(r.e_basic) << ','
      << format_g17(r.d_basic) << ',' << format_g17(r.e_total) << ','
      << format_g17(r.e_rel) << ',' << format_g17(r.d_rel) << ','
      << format_g17(r.delta_x) << ',' << format_g17(r.delta_y) << ','
      << format_g17(r.zmin) << ',' << format_g17(r.zmax) << '\n';
}

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= std::uint32_t(b[i]) << (8 * i);
  return x;
}

inline double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace detail

// Binary snapshot: magic "CPE1"; u32 dim_h, nx, ny, nz; f64 time; Z (nh
// values, ix + nx*iy order); each velocity component then W as nh*nz values,
// vertical level outermost.  Everything little-endian f64.
inline void write_snapshot(const std::string& path, const State<double>& state,
                           const ArrayXX<double>& W) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
  const Grid<double>& gr = *state.grid;
  out.write("CPE1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(state.params.dim_h));
  detail::put_u32(out, static_cast<std::uint32_t>(gr.nx));
  detail::put_u32(out, static_cast<std::uint32_t>(gr.ny));
  detail::put_u32(out, static_cast<std::uint32_t>(gr.nz));
  detail::put_f64(out, state.t);
  for (int x = 0; x < gr.nh; ++x) detail::put_f64(out, state.Z[x]);
  auto put_volume = [&](const ArrayXX<double>& f) {
    for (int k = 0; k < gr.nz; ++k)
      for (int x = 0; x < gr.nh; ++x) detail::put_f64(out, f(x, k));
  };
  for (const auto& comp : state.v) put_volume(comp);
  put_volume(W);
  if (!out) throw std::runtime_error("snapshot write failed: " + path);
}

struct SnapshotData {
  int dim_h = 0, nx = 0, ny = 0, nz = 0;
  double time = 0;
  ArrayX<double> Z;
  std::vector<ArrayXX<double>> v;
  ArrayXX<double> W;
};

inline SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CPE1", 4) != 0)
    throw std::runtime_error("bad snapshot magic: " + path);
  SnapshotData s;
  s.dim_h = static_cast<int>(detail::get_u32(in));
  s.nx = static_cast<int>(detail::get_u32(in));
  s.ny = static_cast<int>(detail::get_u32(in));
  s.nz = static_cast<int>(detail::get_u32(in));
  s.time = detail::get_f64(in);
  const int nh = s.nx * s.ny;
  s.Z.resize(nh);
  for (int x = 0; x < nh; ++x) s.Z[x] = detail::get_f64(in);
  auto get_volume = [&](ArrayXX<double>& f) {
    f.resize(nh, s.nz);
    for (int k = 0; k < s.nz; ++k)
      for (int x = 0; x < nh; ++x) f(x, k) = detail::get_f64(in);
  };
  s.v.resize(static_cast<size_t>(s.dim_h));
  for (auto& comp : s.v) get_volume(comp);
  get_volume(s.W);
  if (!in) throw std::runtime_error("snapshot truncated: " + path);
  return s;
}

}  // namespace cpe
