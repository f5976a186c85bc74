#pragma once

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <string>

#include <json.hpp>

#include "rydsense/chiral.hpp"
#include "rydsense/config.hpp"
#include "rydsense/csv.hpp"
#include "rydsense/errors.hpp"
#include "rydsense/ramsey.hpp"
#include "rydsense/scan.hpp"

namespace rydsense::cli {

// Exit codes: 0 success, 1 config/usage error, 2 numerical failure.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

namespace detail {

inline const DressingSection& require_dressing(const RunConfig& cfg) {
  if (!cfg.dressing) throw ConfigError("config: missing section \"dressing\"");
  return *cfg.dressing;
}
inline const ScanSection& require_scan(const RunConfig& cfg) {
  if (!cfg.scan) throw ConfigError("config: missing section \"scan\"");
  return *cfg.scan;
}
inline const ChiralSection& require_chiral(const RunConfig& cfg) {
  if (!cfg.chiral) throw ConfigError("config: missing section \"chiral\"");
  return *cfg.chiral;
}
inline const RamseySection& require_ramsey(const RunConfig& cfg) {
  if (!cfg.ramsey) throw ConfigError("config: missing section \"ramsey\"");
  return *cfg.ramsey;
}

inline ChiralSetup to_setup(const ChiralSection& ch) {
  ChiralSetup setup;
  setup.v = ch.v_mps;
  setup.d = ch.d_cm;
  setup.omega_nk = angular_from_hz(ch.omega_nk_hz);
  setup.z_a = ch.z_a_m;
  setup.r = ch.r_mag * std::exp(cplx(0.0, ch.r_phase_rad));
  setup.validate();
  return setup;
}

// Principal quantum number for the helix estimate: configured value, or
// inferred from omega_nk through omega = 2 E_R / (hbar n^3).
inline double principal_n(const ChiralSection& ch, double omega_nk) {
  if (ch.n_principal) return *ch.n_principal;
  return std::cbrt(2.0 * constants::rydberg_energy / (constants::hbar * omega_nk));
}

}  // namespace detail

inline int cmd_dressed_scan(const RunConfig& cfg, const std::filesystem::path& out_path,
                            bool json, unsigned threads, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const DressingSection& dressing = detail::require_dressing(cfg);
    const ScanSection& scan_cfg = detail::require_scan(cfg);

    ScanGrid grid;
    grid.delta1 = scan_cfg.delta1;
    grid.delta2 = scan_cfg.delta2;
    grid.base = dressing.to_config(0.0, 0.0);
    grid.delta_rm_hz = scan_cfg.delta_rm_hz;
    grid.fom_convention = dressing.fom_convention();

    const ScanResult result = run_scan(grid, threads);
    export_scan(result, out_path);

    const auto regions = find_optimal_regions(result, scan_cfg.top_fraction);
    const std::size_t top = std::min<std::size_t>(5, regions.size());
    if (json) {
      nlohmann::ordered_json j;
      j["out_path"] = out_path.string();
      j["points"] = result.points.size();
      j["top_regions"] = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < top; ++k)
        j["top_regions"].push_back({{"delta1_hz", regions[k].delta1_hz},
                                    {"delta2_hz", regions[k].delta2_hz},
                                    {"fom", regions[k].fom}});
      out << j.dump(2) << '\n';
    } else {
      out << "wrote " << result.points.size() << " points to " << out_path.string() << '\n';
      out << "top figure-of-merit regions (delta1_hz, delta2_hz, fom):\n";
      for (std::size_t k = 0; k < top; ++k)
        out << "  " << format_double(regions[k].delta1_hz) << "  "
            << format_double(regions[k].delta2_hz) << "  " << format_double(regions[k].fom)
            << '\n';
    }
    return 0;
  });
}

inline int cmd_chiral_shift(const RunConfig& cfg, bool json, std::ostream& out,
                            std::ostream& err) {
  return guarded(err, [&]() {
    const ChiralSection& ch = detail::require_chiral(cfg);
    const ChiralSetup setup = detail::to_setup(ch);
    const Vec3c d_nk = circular_dipole_nk(setup.d);

    const double closed = closed_form_shift(setup);
    const ResonantShiftResult analytic =
        resonant_chiral_shift(setup, d_nk, CurlSource::analytic);
    const ResonantShiftResult numeric = resonant_chiral_shift(setup, d_nk, CurlSource::numeric);
    const double ordinary = ordinary_electric_shift(setup.d, setup.z_a);
    const double ratio = ordinary != 0.0 ? closed / ordinary : 0.0;
    const double n = detail::principal_n(ch, setup.omega_nk);
    const double slope = helix_slope(n, std::abs(setup.v));
    const double rel_diff =
        analytic.delta_rm != 0.0
            ? std::abs(analytic.delta_rm - numeric.delta_rm) / std::abs(analytic.delta_rm)
            : std::abs(numeric.delta_rm);

    nlohmann::ordered_json j;
    j["closed_form_shift_hz"] = hz_from_angular(closed);
    j["resonant_shift_analytic_hz"] = hz_from_angular(analytic.delta_rm);
    j["resonant_shift_numeric_hz"] = hz_from_angular(numeric.delta_rm);
    j["resonant_analytic_numeric_rel_diff"] = rel_diff;
    j["ordinary_shift_hz"] = hz_from_angular(ordinary);
    j["chiral_to_ordinary_ratio"] = ratio;
    j["four_v_over_c"] = 4.0 * setup.v / constants::speed_of_light;
    j["helix_slope"] = slope;
    j["n_principal"] = n;
    j["nonretarded_parameter"] = numeric.nonretarded_parameter;
    j["nonretarded_valid"] = numeric.nonretarded_ok;
    j["quadrature_rel_error"] = numeric.quadrature_rel_error;

    if (json) {
      out << j.dump(2) << '\n';
    } else {
      for (const auto& item : j.items()) {
        out << std::left << std::setw(36) << (item.key() + ":");
        if (item.value().is_boolean())
          out << (item.value().get<bool>() ? "true" : "false");
        else
          out << format_double(item.value().get<double>());
        out << '\n';
      }
      if (!numeric.nonretarded_ok)
        err << "warning: z_a * omega_nk / c = " << format_double(numeric.nonretarded_parameter)
            << " violates the nonretarded regime; closed-form comparisons are unreliable\n";
    }
    return 0;
  });
}

inline int cmd_ramsey(const RunConfig& cfg, const std::filesystem::path& out_path, bool json,
                      std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const DressingSection& dressing = detail::require_dressing(cfg);
    const RamseySection& rm = detail::require_ramsey(cfg);

    SequenceSpec spec;
    spec.dressing = dressing.to_config(rm.delta1_hz, rm.delta2_hz);
    spec.delta_rm_chiral_hz = rm.delta_rm_hz;
    spec.delta_achiral_hz = rm.delta_achiral_hz;
    spec.achiral_direct = rm.achiral_direct;
    spec.times_s.resize(static_cast<std::size_t>(rm.n_points));
    for (int k = 0; k < rm.n_points; ++k)
      spec.times_s[k] =
          rm.t_max_s * static_cast<double>(k + 1) / static_cast<double>(rm.n_points);

    const RamseyTrace trace = simulate_sequence(spec);
    export_trace(trace, out_path);

    FringeMetrics metrics;
    try {
      metrics = fringe_metrics(trace);
    } catch (const InsufficientSpan& e) {
      // Estimate the expected period from the transduced shifts so the user
      // can size t_max_s.
      const double sp = ground_shift(spec.dressing, angular_from_hz(rm.delta_rm_hz)).shift;
      const double sm = ground_shift(spec.dressing, angular_from_hz(-rm.delta_rm_hz)).shift;
      std::ostringstream msg;
      msg << e.what() << "; raise ramsey.t_max_s to cover at least two fringe periods";
      if (sp != sm)
        msg << " (expected period about " << format_double(4.0 * std::numbers::pi / std::abs(sp - sm))
            << " s)";
      throw InsufficientSpan(msg.str());
    }

    const double p_loss_final = trace.p_loss.empty() ? 0.0 : trace.p_loss.back();
    if (json) {
      nlohmann::ordered_json j;
      j["out_path"] = out_path.string();
      j["fringe_period_s"] = std::isfinite(metrics.period_s)
                                 ? nlohmann::ordered_json(metrics.period_s)
                                 : nlohmann::ordered_json(nullptr);
      j["contrast_ratio"] = std::isfinite(metrics.contrast_ratio)
                                ? nlohmann::ordered_json(metrics.contrast_ratio)
                                : nlohmann::ordered_json(nullptr);
      j["peaks_found"] = metrics.peaks_found;
      j["p_loss_final"] = p_loss_final;
      out << j.dump(2) << '\n';
    } else {
      out << "wrote " << trace.t_s.size() << " samples to " << out_path.string() << '\n';
      out << "fringe_period_s:  " << format_double(metrics.period_s) << '\n';
      out << "contrast_ratio:   " << format_double(metrics.contrast_ratio) << '\n';
      out << "p_loss_final:     " << format_double(p_loss_final) << '\n';
      if (metrics.peaks_found == 0 && p_loss_final > 0.99)
        err << "note: the dressed-state decay exhausts the signal before any fringe develops\n";
    }
    return 0;
  });
}

// Quadrature-vs-closed-form cross check of the curl of the scattering Green
// tensor, run deep in the nonretarded regime. Nonzero exit on disagreement.
inline int cmd_verify_green(const RunConfig& cfg, bool json, std::ostream& out,
                            std::ostream& err) {
  return guarded(err, [&]() {
    const ChiralSection& ch = detail::require_chiral(cfg);
    const ChiralSetup setup = detail::to_setup(ch);

    const double z = setup.z_a;
    const double omega = 1e-3 * constants::speed_of_light / z;  // z w / c = 1e-3
    const cplx r = setup.r != cplx(0.0) ? setup.r : cplx(0.0, 1.0);

    const Mat3c exact = curl_green_analytic(z, omega, r);
    const CurlGreenNumeric numeric = curl_green_numeric(z, omega, r);

    double max_diag_rel = 0.0;
    for (int i = 0; i < 3; ++i)
      max_diag_rel = std::max(max_diag_rel, std::abs(numeric.value(i, i) - exact(i, i)) /
                                                std::abs(exact(i, i)));
    double max_diag_abs = 0.0, max_off = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j)
          max_diag_abs = std::max(max_diag_abs, std::abs(numeric.value(i, j)));
        else
          max_off = std::max(max_off, std::abs(numeric.value(i, j)));
      }
    const double zz_over_xx = std::abs(numeric.value(2, 2)) / std::abs(numeric.value(0, 0));
    const bool entry_ok = max_diag_rel <= 1e-4;
    const bool structure_ok = std::abs(zz_over_xx - 2.0) <= 1e-4;
    const bool offdiag_ok = max_off <= 1e-6 * max_diag_abs;
    const bool ok = entry_ok && structure_ok && offdiag_ok;

    if (json) {
      nlohmann::ordered_json j;
      j["max_diagonal_rel_diff"] = max_diag_rel;
      j["zz_over_xx"] = zz_over_xx;
      j["max_offdiagonal_fraction"] = max_off / max_diag_abs;
      j["quadrature_rel_error"] = numeric.rel_error_estimate;
      j["quadrature_tail_rel"] = numeric.tail_rel_estimate;
      j["agreement"] = ok;
      out << j.dump(2) << '\n';
    } else {
      out << (entry_ok ? "PASS" : "FAIL") << " diagonal entries match closed form (max rel diff "
          << format_double(max_diag_rel) << ", bound 1e-4)\n";
      out << (structure_ok ? "PASS" : "FAIL") << " zz/xx ratio " << format_double(zz_over_xx)
          << " within 1e-4 of 2\n";
      out << (offdiag_ok ? "PASS" : "FAIL") << " off-diagonal magnitude "
          << format_double(max_off / max_diag_abs) << " of largest diagonal (bound 1e-6)\n";
    }
    if (!ok) throw Error("green-tensor verification failed");
    return 0;
  });
}

}  // namespace rydsense::cli
