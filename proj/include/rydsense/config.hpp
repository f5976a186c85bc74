#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rydsense/dressed.hpp"
#include "rydsense/errors.hpp"
#include "rydsense/scan.hpp"

namespace rydsense {

// One structured run configuration. External units throughout: Hz, m, s, C m.
// The schema is strict: unknown keys are rejected by name.
struct DressingSection {
  double omega12_hz = 0.0;
  double omega23_hz = 0.0;
  double gamma1_hz = 0.0;
  double gamma2_hz = 0.0;
  double gamma3_hz = 0.0;
  bool fom_uses_fringe_period = false;  // alternative exponent convention

  DressingConfig to_config(double delta1_hz, double delta2_hz) const {
    return DressingConfig::from_linear_hz(omega12_hz, omega23_hz, delta1_hz, delta2_hz,
                                          gamma1_hz, gamma2_hz, gamma3_hz);
  }
  FomExponent fom_convention() const {
    return fom_uses_fringe_period ? FomExponent::decay_times_period
                                  : FomExponent::decay_over_shift;
  }
};

struct ScanSection {
  AxisSpec delta1;
  AxisSpec delta2;
  double delta_rm_hz = 0.0;
  double top_fraction = 0.05;
};

struct ChiralSection {
  double v_mps = 0.0;
  double d_cm = 0.0;  // dipole magnitude, C m
  double omega_nk_hz = 0.0;
  double z_a_m = 0.0;
  double r_mag = 1.0;
  double r_phase_rad = 0.0;
  std::optional<double> n_principal;  // for the helix slope; inferred when absent
};

struct RamseySection {
  double delta1_hz = 0.0;
  double delta2_hz = 0.0;
  double delta_rm_hz = 0.0;
  double delta_achiral_hz = 0.0;
  double t_max_s = 0.0;
  int n_points = 0;
  bool achiral_direct = false;
};

struct RunConfig {
  std::optional<DressingSection> dressing;
  std::optional<ScanSection> scan;
  std::optional<ChiralSection> chiral;
  std::optional<RamseySection> ramsey;

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  std::string serialize() const;
};

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline void check_keys(const json& obj, const std::string& section,
                       const std::set<std::string>& allowed,
                       const std::set<std::string>& required) {
  if (!obj.is_object()) throw ConfigError("config: section \"" + section + "\" must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError("config: unknown key \"" + section + "." + item.key() + "\"");
  }
  for (const auto& key : required) {
    if (!obj.contains(key))
      throw ConfigError("config: missing key \"" + section + "." + key + "\"");
  }
}

inline double get_finite(const json& obj, const std::string& section, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("config: \"" + section + "." + key + "\" must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ConfigError("config: \"" + section + "." + key + "\" must be finite");
  return x;
}

inline bool get_bool(const json& obj, const std::string& section, const std::string& key,
                     bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError("config: \"" + section + "." + key + "\" must be a boolean");
  return v.get<bool>();
}

inline AxisSpec get_axis(const json& obj, const std::string& section, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError("config: \"" + section + "." + key + "\" must be [min_hz, max_hz, count]");
  AxisSpec axis;
  for (int i = 0; i < 2; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number())
      throw ConfigError("config: \"" + section + "." + key + "\" bounds must be numbers");
  }
  axis.min_hz = v[0].get<double>();
  axis.max_hz = v[1].get<double>();
  if (!v[2].is_number_integer() || v[2].get<long long>() < 2)
    throw ConfigError("config: \"" + section + "." + key + "\" count must be an integer >= 2");
  axis.count = v[2].get<int>();
  if (!std::isfinite(axis.min_hz) || !std::isfinite(axis.max_hz) || !(axis.min_hz < axis.max_hz))
    throw ConfigError("config: \"" + section + "." + key + "\" requires finite min < max");
  return axis;
}

}  // namespace detail

inline RunConfig RunConfig::parse(std::string_view text) {
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i)
      if (text[i] == '\n') ++line;
    std::ostringstream msg;
    msg << "config: parse error at line " << line << ": " << e.what();
    throw ConfigError(msg.str());
  }
  detail::check_keys(root, "<root>", {"dressing", "scan", "chiral", "ramsey"}, {});

  RunConfig cfg;
  if (root.contains("dressing")) {
    const auto& s = root["dressing"];
    detail::check_keys(s, "dressing",
                       {"omega12_hz", "omega23_hz", "gamma1_hz", "gamma2_hz", "gamma3_hz",
                        "fom_uses_fringe_period"},
                       {"omega12_hz", "omega23_hz", "gamma1_hz", "gamma2_hz", "gamma3_hz"});
    DressingSection d;
    d.omega12_hz = detail::get_finite(s, "dressing", "omega12_hz");
    d.omega23_hz = detail::get_finite(s, "dressing", "omega23_hz");
    d.gamma1_hz = detail::get_finite(s, "dressing", "gamma1_hz");
    d.gamma2_hz = detail::get_finite(s, "dressing", "gamma2_hz");
    d.gamma3_hz = detail::get_finite(s, "dressing", "gamma3_hz");
    d.fom_uses_fringe_period = detail::get_bool(s, "dressing", "fom_uses_fringe_period", false);
    if (d.omega12_hz < 0 || d.omega23_hz < 0)
      throw ConfigError("config: dressing Rabi frequencies must be >= 0");
    if (d.gamma1_hz < 0 || d.gamma2_hz < 0 || d.gamma3_hz < 0)
      throw ConfigError("config: dressing decay rates must be >= 0");
    cfg.dressing = d;
  }
  if (root.contains("scan")) {
    const auto& s = root["scan"];
    detail::check_keys(s, "scan", {"delta1_hz", "delta2_hz", "delta_rm_hz", "top_fraction"},
                       {"delta1_hz", "delta2_hz", "delta_rm_hz"});
    ScanSection sc;
    sc.delta1 = detail::get_axis(s, "scan", "delta1_hz");
    sc.delta2 = detail::get_axis(s, "scan", "delta2_hz");
    sc.delta_rm_hz = detail::get_finite(s, "scan", "delta_rm_hz");
    if (s.contains("top_fraction")) {
      sc.top_fraction = detail::get_finite(s, "scan", "top_fraction");
      if (!(sc.top_fraction > 0.0 && sc.top_fraction <= 1.0))
        throw ConfigError("config: scan.top_fraction must lie in (0, 1]");
    }
    cfg.scan = sc;
  }
  if (root.contains("chiral")) {
    const auto& s = root["chiral"];
    detail::check_keys(
        s, "chiral",
        {"v_mps", "d_cm", "omega_nk_hz", "z_a_m", "r_mag", "r_phase_rad", "n_principal"},
        {"v_mps", "d_cm", "omega_nk_hz", "z_a_m", "r_mag", "r_phase_rad"});
    ChiralSection ch;
    ch.v_mps = detail::get_finite(s, "chiral", "v_mps");
    ch.d_cm = detail::get_finite(s, "chiral", "d_cm");
    ch.omega_nk_hz = detail::get_finite(s, "chiral", "omega_nk_hz");
    ch.z_a_m = detail::get_finite(s, "chiral", "z_a_m");
    ch.r_mag = detail::get_finite(s, "chiral", "r_mag");
    ch.r_phase_rad = detail::get_finite(s, "chiral", "r_phase_rad");
    if (s.contains("n_principal")) {
      const double n = detail::get_finite(s, "chiral", "n_principal");
      if (!(n >= 1.0)) throw ConfigError("config: chiral.n_principal must be >= 1");
      ch.n_principal = n;
    }
    if (!(ch.omega_nk_hz > 0.0)) throw ConfigError("config: chiral.omega_nk_hz must be > 0");
    if (!(ch.z_a_m > 0.0)) throw ConfigError("config: chiral.z_a_m must be > 0");
    if (!(ch.r_mag >= 0.0 && ch.r_mag <= 1.0))
      throw ConfigError("config: chiral.r_mag must lie in [0, 1]");
    cfg.chiral = ch;
  }
  if (root.contains("ramsey")) {
    const auto& s = root["ramsey"];
    detail::check_keys(s, "ramsey",
                       {"delta1_hz", "delta2_hz", "delta_rm_hz", "delta_achiral_hz", "t_max_s",
                        "n_points", "achiral_direct"},
                       {"delta1_hz", "delta2_hz", "delta_rm_hz", "delta_achiral_hz", "t_max_s",
                        "n_points"});
    RamseySection rm;
    rm.delta1_hz = detail::get_finite(s, "ramsey", "delta1_hz");
    rm.delta2_hz = detail::get_finite(s, "ramsey", "delta2_hz");
    rm.delta_rm_hz = detail::get_finite(s, "ramsey", "delta_rm_hz");
    rm.delta_achiral_hz = detail::get_finite(s, "ramsey", "delta_achiral_hz");
    rm.t_max_s = detail::get_finite(s, "ramsey", "t_max_s");
    if (!(rm.t_max_s > 0.0)) throw ConfigError("config: ramsey.t_max_s must be > 0");
    if (!s.at("n_points").is_number_integer() || s.at("n_points").get<long long>() < 2)
      throw ConfigError("config: ramsey.n_points must be an integer >= 2");
    rm.n_points = s.at("n_points").get<int>();
    rm.achiral_direct = detail::get_bool(s, "ramsey", "achiral_direct", false);
    cfg.ramsey = rm;
  }
  return cfg;
}

inline RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

inline std::string RunConfig::serialize() const {
  detail::ordered_json root = detail::ordered_json::object();
  if (dressing) {
    auto& s = root["dressing"] = detail::ordered_json::object();
    s["omega12_hz"] = dressing->omega12_hz;
    s["omega23_hz"] = dressing->omega23_hz;
    s["gamma1_hz"] = dressing->gamma1_hz;
    s["gamma2_hz"] = dressing->gamma2_hz;
    s["gamma3_hz"] = dressing->gamma3_hz;
    if (dressing->fom_uses_fringe_period) s["fom_uses_fringe_period"] = true;
  }
  if (scan) {
    auto& s = root["scan"] = detail::ordered_json::object();
    s["delta1_hz"] = {scan->delta1.min_hz, scan->delta1.max_hz, scan->delta1.count};
    s["delta2_hz"] = {scan->delta2.min_hz, scan->delta2.max_hz, scan->delta2.count};
    s["delta_rm_hz"] = scan->delta_rm_hz;
    s["top_fraction"] = scan->top_fraction;
  }
  if (chiral) {
    auto& s = root["chiral"] = detail::ordered_json::object();
    s["v_mps"] = chiral->v_mps;
    s["d_cm"] = chiral->d_cm;
    s["omega_nk_hz"] = chiral->omega_nk_hz;
    s["z_a_m"] = chiral->z_a_m;
    s["r_mag"] = chiral->r_mag;
    s["r_phase_rad"] = chiral->r_phase_rad;
    if (chiral->n_principal) s["n_principal"] = *chiral->n_principal;
  }
  if (ramsey) {
    auto& s = root["ramsey"] = detail::ordered_json::object();
    s["delta1_hz"] = ramsey->delta1_hz;
    s["delta2_hz"] = ramsey->delta2_hz;
    s["delta_rm_hz"] = ramsey->delta_rm_hz;
    s["delta_achiral_hz"] = ramsey->delta_achiral_hz;
    s["t_max_s"] = ramsey->t_max_s;
    s["n_points"] = ramsey->n_points;
    if (ramsey->achiral_direct) s["achiral_direct"] = true;
  }
  return root.dump(2) + "\n";
}

}  // namespace rydsense
