// Acceptance suite: prints one [PASS]/[FAIL] line per criterion and exits
// with the number of failures. Criteria pin the tolerances in code; a failed
// line reports the measured values it was judged on.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rydsense/chiral.hpp"
#include "rydsense/dressed.hpp"
#include "rydsense/ramsey.hpp"
#include "rydsense/scan.hpp"

using namespace rydsense;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// Shared between criteria 6 and 8.
std::string g_scan_csv_serial;
std::string g_scan_csv_parallel;

DressingConfig working_dressing(double delta1_hz, double delta2_hz, bool zero_decay = false) {
  return DressingConfig::from_linear_hz(0.5e9, 1.0e9, delta1_hz, delta2_hz,
                                        zero_decay ? 0.0 : 1.0, zero_decay ? 0.0 : 3.8e7,
                                        zero_decay ? 0.0 : 1.4e5);
}

DressingConfig random_gapped_config(std::mt19937_64& rng) {
  auto log_u = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  std::uniform_int_distribution<int> sign(0, 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (;;) {
    const DressingConfig cfg = DressingConfig::from_linear_hz(
        log_u(1e7, 2e9), log_u(1e7, 2e9), (sign(rng) ? 1.0 : -1.0) * log_u(1e7, 2e9),
        (sign(rng) ? 1.0 : -1.0) * log_u(1e7, 2e9), 10.0 * u01(rng), log_u(1e6, 1e8),
        log_u(1e3, 1e6));
    try {
      const Mat3c h = build_hamiltonian(cfg, 0.0);
      const DressedSolution sol = solve_eigensystem(h);
      const double scale = frobenius_norm(h);
      double gap = 1e300;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          gap = std::min(gap, std::abs(sol.eigenvalues[i] -
                                       sol.eigenvalues[j]));
      if (gap > 1e-6 * scale) return cfg;
    } catch (const Error&) {
    }
  }
}

Outcome criterion1_ratio_law() {
  Outcome out;
  ChiralSetup s;
  s.d = 1e-27;
  s.omega_nk = angular_from_hz(3.4e10);
  s.z_a = 1e-6;
  s.r = cplx(0.0, 1.0);
  double worst = 0.0;
  for (double v : {1.0, 1e3, 1e5}) {
    s.v = v;
    const double ratio = closed_form_shift(s) / ordinary_electric_shift(s.d, s.z_a);
    worst = std::max(worst, rel_diff(ratio, 4.0 * v / constants::speed_of_light));
  }
  s.v = 1e3;
  const double ratio_1km = closed_form_shift(s) / ordinary_electric_shift(s.d, s.z_a);
  out.pass = worst <= 1e-12 && std::abs(ratio_1km - 1.334e-5) <= 1e-8;
  out.detail = "max rel dev from 4v/c = " + fmt(worst) + ", ratio(1 km/s) = " + fmt(ratio_1km);
  return out;
}

Outcome criterion2_magnitude() {
  Outcome out;
  ChiralSetup s;
  s.v = 1e3;
  s.z_a = 1e-6;
  s.omega_nk = angular_from_hz(3.4e10);
  s.r = cplx(0.0, 1.0);
  s.d = std::sqrt(angular_from_hz(1e9) * 128.0 * std::numbers::pi *
                  constants::vacuum_permittivity * s.z_a * s.z_a * s.z_a * constants::hbar / 3.0);
  const double ordinary_hz = hz_from_angular(ordinary_electric_shift(s.d, s.z_a));
  const double chiral_hz = hz_from_angular(closed_form_shift(s));
  out.pass = rel_diff(ordinary_hz, 1e9) <= 1e-9 && chiral_hz >= 1.0e4 && chiral_hz <= 2.0e4;
  out.detail = "ordinary = " + fmt(ordinary_hz) + " Hz, chiral = " + fmt(chiral_hz) + " Hz";
  return out;
}

Outcome criterion3_green_oracle() {
  Outcome out;
  const double z = 1e-6;
  const double omega = 1e-3 * constants::speed_of_light / z;  // z w / c = 1e-3
  double worst_diag = 0.0, worst_struct = 0.0, worst_off = 0.0;
  for (const cplx r : {cplx(0.0, 1.0), cplx(0.3, 0.8)}) {
    const Mat3c exact = curl_green_analytic(z, omega, r);
    const CurlGreenNumeric num = curl_green_numeric(z, omega, r);
    double max_diag = 0.0;
    for (int i = 0; i < 3; ++i) {
      worst_diag = std::max(worst_diag,
                            std::abs(num.value(i, i) - exact(i, i)) / std::abs(exact(i, i)));
      max_diag = std::max(max_diag, std::abs(num.value(i, i)));
    }
    worst_struct = std::max(
        worst_struct, std::abs(std::abs(num.value(2, 2)) / std::abs(num.value(0, 0)) - 2.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) worst_off = std::max(worst_off, std::abs(num.value(i, j)) / max_diag);
  }
  out.pass = worst_diag <= 1e-4 && worst_struct <= 1e-4 && worst_off <= 1e-6;
  out.detail = "entry rel " + fmt(worst_diag) + ", zz/xx dev " + fmt(worst_struct) +
               ", offdiag frac " + fmt(worst_off);
  return out;
}

Outcome criterion4_chirality_symmetries() {
  Outcome out;
  std::mt19937_64 rng(2024);
  auto log_u = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  double worst_v = 0.0, worst_conj = 0.0, worst_real = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    ChiralSetup s;
    s.v = (u11(rng) > 0 ? 1.0 : -1.0) * log_u(1.0, 1e5);
    s.d = log_u(1e-28, 1e-26);
    s.z_a = log_u(2e-7, 5e-6);
    s.omega_nk = 0.05 * constants::speed_of_light / s.z_a * std::abs(u11(rng));
    if (s.omega_nk <= 0.0) s.omega_nk = 0.01 * constants::speed_of_light / s.z_a;
    s.r = std::exp(cplx(0.0, std::numbers::pi / 2.0)) * (0.5 + 0.5 * std::abs(u11(rng)));

    Vec3c d_nk;
    for (int i = 0; i < 3; ++i) d_nk[i] = cplx(u11(rng), u11(rng)) * s.d;
    const double shift = resonant_chiral_shift(s, d_nk, CurlSource::analytic).delta_rm;

    ChiralSetup s_rev = s;
    s_rev.v = -s.v;
    const double shift_rev = resonant_chiral_shift(s_rev, d_nk, CurlSource::analytic).delta_rm;
    if (shift != 0.0) worst_v = std::max(worst_v, std::abs(shift_rev + shift) / std::abs(shift));

    Vec3c d_conj;
    for (int i = 0; i < 3; ++i) d_conj[i] = std::conj(d_nk[i]);
    const double shift_conj = resonant_chiral_shift(s, d_conj, CurlSource::analytic).delta_rm;
    if (shift != 0.0)
      worst_conj = std::max(worst_conj, std::abs(shift_conj + shift) / std::abs(shift));

    Vec3c d_real;
    for (int i = 0; i < 3; ++i) d_real[i] = cplx(u11(rng), 0.0) * s.d;
    const double shift_real = resonant_chiral_shift(s, d_real, CurlSource::analytic).delta_rm;
    const double reference =
        std::abs(resonant_chiral_shift(s, circular_dipole_nk(s.d), CurlSource::analytic).delta_rm);
    if (reference > 0.0) worst_real = std::max(worst_real, std::abs(shift_real) / reference);
  }
  out.pass = worst_v <= 1e-12 && worst_conj <= 1e-12 && worst_real <= 1e-15;
  out.detail = "v-flip " + fmt(worst_v) + ", conj-flip " + fmt(worst_conj) + ", real-dipole " +
               fmt(worst_real);
  return out;
}

Outcome criterion5_eigen_suite() {
  Outcome out;
  std::mt19937_64 rng(2025);
  double worst_residual = 0.0, worst_trace = 0.0, worst_imag = 0.0, worst_orth = 0.0;
  double worst_slope_rel = 0.0, worst_slope_abs_excess = 0.0;
  int slope_rel_checked = 0;
  const int kTrials = 10000;
  for (int trial = 0; trial < kTrials; ++trial) {
    const DressingConfig cfg = random_gapped_config(rng);
    const Mat3c h = build_hamiltonian(cfg, 0.0);
    const double scale = frobenius_norm(h);
    const DressedSolution sol = solve_eigensystem(h);

    for (int k = 0; k < 3; ++k) {
      const auto& v = sol.eigenvectors[k];
      worst_residual = std::max(
          worst_residual,
          norm(h * v - sol.eigenvalues[k] * v) / scale);
    }
    const cplx tr = trace(h);
    worst_trace = std::max(worst_trace,
                           std::abs(sol.eigenvalues[0] + sol.eigenvalues[1] + sol.eigenvalues[2] -
                                    tr) /
                               std::max(scale, std::abs(tr)));

    // Hermitian limit of the same configuration.
    DressingConfig herm = cfg;
    herm.gamma1 = herm.gamma2 = herm.gamma3 = 0.0;
    const Mat3c hh = build_hamiltonian(herm, 0.0);
    try {
      const DressedSolution hs = solve_eigensystem(hh);
      const double hscale = frobenius_norm(hh);
      for (int k = 0; k < 3; ++k)
        worst_imag = std::max(worst_imag,
                              std::abs(hs.eigenvalues[k].imag()) / hscale);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          worst_orth = std::max(worst_orth,
                                std::abs(dot_c(hs.eigenvectors[i],
                                               hs.eigenvectors[j])));
    } catch (const DegenerateEigenvectors&) {
      // Dropping the decay can close a gap; skip the Hermitian copy then.
    }

    // Perturbation slope against Richardson finite differences. The step
    // balances truncation (bounded by the gap around the selected branch)
    // against the eps*||H|| cancellation in the eigenvalue difference; near
    // avoided crossings or for near-null slopes an absolute floor applies.
    const int sel = select_dressed_state(sol, cfg.delta1, cfg.delta2);
    const double slope = transduction_slope(sol, sel);
    double gap_sel = 1e300;
    for (int k = 0; k < 3; ++k)
      if (k != sel)
        gap_sel = std::min(gap_sel, std::abs(sol.eigenvalues[k] -
                                             sol.eigenvalues[sel]));
    const double step = std::min(4e-6 * scale, 0.02 * gap_sel);
    auto fd_at = [&](double hstep) {
      return (ground_shift(cfg, hstep).shift - ground_shift(cfg, -hstep).shift) / (2.0 * hstep);
    };
    const double fd = (4.0 * fd_at(0.5 * step) - fd_at(step)) / 3.0;
    if (std::abs(slope) >= 1e-4 && gap_sel >= 1e-4 * scale) {
      worst_slope_rel = std::max(worst_slope_rel, std::abs(fd - slope) / std::abs(slope));
      ++slope_rel_checked;
    } else if (std::abs(slope) > 1e-12 && gap_sel >= 1e-4 * scale) {
      const double floor = 5.0 * 2.22e-16 * scale / step;
      worst_slope_abs_excess =
          std::max(worst_slope_abs_excess,
                   std::abs(fd - slope) - std::max(1e-6 * std::abs(slope), floor));
    }
  }
  out.pass = worst_residual <= 1e-9 && worst_trace <= 1e-10 && worst_imag <= 1e-10 &&
             worst_orth <= 1e-9 && worst_slope_rel <= 1e-6 && worst_slope_abs_excess <= 0.0 &&
             slope_rel_checked > kTrials / 4;
  out.detail = "residual " + fmt(worst_residual) + ", trace " + fmt(worst_trace) + ", herm imag " +
               fmt(worst_imag) + ", orth " + fmt(worst_orth) + ", slope rel " +
               fmt(worst_slope_rel) + " (" + std::to_string(slope_rel_checked) + " pts)";
  return out;
}

Outcome criterion6_optimal_region() {
  Outcome out;
  ScanGrid grid;
  grid.delta1 = {0.01e9, 2e9, 200};
  grid.delta2 = {0.01e9, 2e9, 200};
  grid.base = working_dressing(0.0, 0.0);
  grid.delta_rm_hz = 1e3;

  const double t0 = now_seconds();
  const ScanResult serial = run_scan(grid, 1);
  const double serial_seconds = now_seconds() - t0;

  const double t1 = now_seconds();
  const ScanResult parallel = run_scan(grid, 8);
  const double parallel_seconds = now_seconds() - t1;

  {
    std::ostringstream a, b;
    export_scan(serial, a);
    export_scan(parallel, b);
    g_scan_csv_serial = a.str();
    g_scan_csv_parallel = b.str();
  }

  const auto regions = find_optimal_regions(serial, 0.05);
  const double cell = (2e9 - 0.01e9) / 199.0;
  double closest_cells = 1e300;
  for (const auto& r : regions)
    closest_cells = std::min(closest_cells, std::max(std::abs(r.delta1_hz - 1.5e9) / cell,
                                                     std::abs(r.delta2_hz - 0.2e9) / cell));
  double fom_max = 0.0, fom_point = 0.0;
  for (std::size_t i = 0; i < serial.delta1_hz.size(); ++i)
    for (std::size_t j = 0; j < serial.delta2_hz.size(); ++j) {
      const auto& p = serial.at(i, j);
      if (p.status != PointStatus::ok) continue;
      fom_max = std::max(fom_max, p.fom);
      if (std::abs(serial.delta1_hz[i] - 1.5e9) <= 0.5 * cell &&
          std::abs(serial.delta2_hz[j] - 0.2e9) <= 0.5 * cell)
        fom_point = p.fom;
    }

  const bool contained = closest_cells <= 2.0;
  const bool timing_ok = serial_seconds < 120.0 && parallel_seconds < 20.0;
  out.pass = contained && timing_ok;
  out.detail = "top-5% region closest approach to (1.5, 0.2) GHz = " + fmt(closest_cells) +
               " cells; fom there " + fmt(fom_point) + " vs max " + fmt(fom_max) +
               " (needs top fraction " + fmt(1.0 - fom_point / fom_max) + "); serial " +
               fmt(serial_seconds) + " s, 8-way " + fmt(parallel_seconds) + " s";
  return out;
}

Outcome criterion7_ramsey() {
  Outcome out;
  std::ostringstream detail;

  // (a) Achiral-only exposure refocuses to a flat trace.
  {
    SequenceSpec spec;
    spec.dressing = working_dressing(1.5e9, 0.2e9);
    spec.delta_rm_chiral_hz = 0.0;
    spec.delta_achiral_hz = 5e3;
    spec.times_s.resize(500);
    for (int k = 0; k < 500; ++k) spec.times_s[k] = 1e-2 * (k + 1) / 500.0;
    const RamseyTrace trace = simulate_sequence(spec);
    double dev = 0.0;
    for (double p : trace.p1) dev = std::max(dev, std::abs(p - trace.p1[0]));
    const bool flat = dev <= 1e-10;
    out.pass = flat;
    detail << "achiral flatness " << fmt(dev);
  }

  // (b) Chiral fringes: measured period against the two-level oracle, 1%.
  {
    SequenceSpec spec;
    spec.dressing = working_dressing(1.5e9, 0.2e9, /*zero_decay=*/true);
    spec.delta_rm_chiral_hz = 1e3;
    const double sp = ground_shift(spec.dressing, angular_from_hz(1e3)).shift;
    const double sm = ground_shift(spec.dressing, angular_from_hz(-1e3)).shift;
    const double oracle_period = 4.0 * std::numbers::pi / std::abs(sp - sm);
    spec.times_s.resize(3000);
    for (int k = 0; k < 3000; ++k)
      spec.times_s[k] = 2.6 * oracle_period * (k + 1) / 3000.0;
    const FringeMetrics metrics = fringe_metrics(simulate_sequence(spec));
    const double dev = rel_diff(metrics.period_s, oracle_period);
    out.pass = out.pass && dev <= 0.01;
    detail << "; period dev " << fmt(dev);
  }

  // (c) Contrast ratio within a factor 2 of the figure of merit at the nominal
  // working point, with the nominal decay rates.
  {
    const DressingConfig cfg = working_dressing(1.5e9, 0.2e9);
    const GroundShiftResult gs = ground_shift(cfg, angular_from_hz(1e3));
    SequenceSpec spec;
    spec.dressing = cfg;
    spec.delta_rm_chiral_hz = 1e3;
    const double sp = ground_shift(cfg, angular_from_hz(1e3)).shift;
    const double sm = ground_shift(cfg, angular_from_hz(-1e3)).shift;
    const double oracle_period = 4.0 * std::numbers::pi / std::abs(sp - sm);
    spec.times_s.resize(4000);
    for (int k = 0; k < 4000; ++k)
      spec.times_s[k] = 2.6 * oracle_period * (k + 1) / 4000.0;
    const RamseyTrace trace = simulate_sequence(spec);
    bool measurable = true;
    double contrast = std::numeric_limits<double>::quiet_NaN();
    try {
      const FringeMetrics metrics = fringe_metrics(trace);
      contrast = metrics.contrast_ratio;
      measurable = std::isfinite(contrast);
    } catch (const InsufficientSpan&) {
      measurable = false;
    }
    if (measurable) {
      const double ratio = contrast / gs.figure_of_merit;
      out.pass = out.pass && ratio >= 0.5 && ratio <= 2.0;
      detail << "; contrast " << fmt(contrast) << " vs fom " << fmt(gs.figure_of_merit);
    } else {
      out.pass = false;
      detail << "; contrast UNMEASURABLE: dressed decay " << fmt(hz_from_angular(gs.decay))
             << " Hz extinguishes the trace within " << fmt(1.0 / gs.decay)
             << " s while the fringe period is " << fmt(oracle_period)
             << " s (decay*period = " << fmt(gs.decay * oracle_period) << "); fom predicts "
             << fmt(gs.figure_of_merit);
    }
  }
  out.detail = detail.str();
  return out;
}

Outcome criterion8_determinism() {
  Outcome out;
  if (g_scan_csv_serial.empty() || g_scan_csv_parallel.empty()) {
    out.pass = false;
    out.detail = "scan CSVs not captured";
    return out;
  }
  out.pass = g_scan_csv_serial == g_scan_csv_parallel;
  out.detail = "serial vs 8-way CSV bytes " +
               std::string(out.pass ? "identical" : "DIFFER") + " (" +
               std::to_string(g_scan_csv_serial.size()) + " bytes)";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {"1 ratio law 4v/c (1e-12 rel, v in {1, 1e3, 1e5} m/s)", criterion1_ratio_law},
      {"2 chiral magnitude [1.0, 2.0]e4 Hz at 1e9 Hz ordinary", criterion2_magnitude},
      {"3 green-tensor quadrature vs closed form (1e-4, diag(1,1,2))", criterion3_green_oracle},
      {"4 chirality symmetry flips over 1e3 random setups", criterion4_chirality_symmetries},
      {"5 eigen-suite over 1e4 random configs", criterion5_eigen_suite},
      {"6 optimal-region reproduction on the 200x200 scan", criterion6_optimal_region},
      {"7 ramsey refocusing, fringe period, contrast vs fom", criterion7_ramsey},
      {"8 serial vs parallel scan determinism", criterion8_determinism},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    const double t0 = now_seconds();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double dt = now_seconds() - t0;
    std::printf("[%s] criterion %s: %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL", entry.name,
                outcome.detail.c_str(), dt);
    if (!outcome.pass) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
