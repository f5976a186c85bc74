#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rydsense/eigen3.hpp"
#include "rydsense/errors.hpp"
#include "rydsense/linalg.hpp"
#include "rydsense/units.hpp"

namespace rydsense {

// Two-photon dressing ladder |1> -- Omega12 -- |2> -- Omega23 -- |3>.
// All members are angular frequencies / rates (rad/s).
struct DressingConfig {
  double omega12 = 0.0;
  double omega23 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;

  static DressingConfig from_linear_hz(double omega12_hz, double omega23_hz,
                                       double delta1_hz, double delta2_hz,
                                       double gamma1_hz, double gamma2_hz,
                                       double gamma3_hz) {
    return {angular_from_hz(omega12_hz), angular_from_hz(omega23_hz),
            angular_from_hz(delta1_hz),  angular_from_hz(delta2_hz),
            angular_from_hz(gamma1_hz),  angular_from_hz(gamma2_hz),
            angular_from_hz(gamma3_hz)};
  }

  void validate() const {
    const double all[] = {omega12, omega23, delta1, delta2, gamma1, gamma2, gamma3};
    for (double x : all)
      if (!std::isfinite(x)) throw std::invalid_argument("DressingConfig: non-finite entry");
    if (omega12 < 0.0 || omega23 < 0.0)
      throw std::invalid_argument("DressingConfig: Rabi frequencies must be >= 0");
    if (gamma1 < 0.0 || gamma2 < 0.0 || gamma3 < 0.0)
      throw std::invalid_argument("DressingConfig: decay rates must be >= 0");
  }
};

struct DressedSolution {
  std::array<cplx, 3> eigenvalues;   // rad/s, ascending by (Re, Im)
  std::array<Vec3c, 3> eigenvectors; // unit norm, phase-fixed
  std::array<std::array<double, 3>, 3> admixtures;  // admixtures[k][i] = |v_k[i]|^2
  int selected = -1;
};

// Decay rates enter as amplitude rates: the evolution of an eigenstate is
// exp(-i lambda t) with Im(lambda) = -Gamma contributions taken literally.
// No factor-of-two population convention is applied anywhere.
inline Mat3c build_hamiltonian(const DressingConfig& cfg, double delta_rm) {
  cfg.validate();
  if (!std::isfinite(delta_rm))
    throw std::invalid_argument("build_hamiltonian: non-finite delta_rm");
  Mat3c m{};
  m(0, 0) = cplx(0.0, -cfg.gamma1);
  m(1, 1) = cplx(cfg.delta1, -cfg.gamma2);
  m(2, 2) = cplx(cfg.delta2 + delta_rm, -cfg.gamma3);
  const cplx h12 = 0.5 * cfg.omega12;
  const cplx h23 = 0.5 * cfg.omega23;
  m(0, 1) = h12;
  m(1, 0) = h12;
  m(1, 2) = h23;
  m(2, 1) = h23;
  return m;
}

inline DressedSolution solve_eigensystem(const Mat3c& m) {
  const Eigensystem es = eigensystem_3x3(m);
  DressedSolution sol{};
  sol.eigenvalues = es.values;
  sol.eigenvectors = es.vectors;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      sol.admixtures[k][i] =
          std::norm(sol.eigenvectors[k][i]);
  return sol;
}

// Quadrant rule for picking the dressed branch that connects to the bare
// upper ground state. Eigenvalues must be sorted ascending by real part.
// A detuning exactly on an axis uses the limit from the positive side.
inline int select_dressed_state(const DressedSolution&, double delta1, double delta2) {
  const bool pos1 = delta1 >= 0.0;
  const bool pos2 = delta2 >= 0.0;
  if (pos1 && pos2) return 0;   // lowest energy
  if (!pos1 && !pos2) return 2; // highest energy
  return 1;                     // intermediate
}

// Branch correspondence between two nearby solutions by greedy maximum
// eigenvector overlap |v_a^dag v_b|; near-ties are broken by eigenvalue
// proximity and reported as AmbiguousMatch when that also fails to decide.
// Returns perm with perm[i] = index in b matching branch i of a.
inline std::array<int, 3> match_branch(const DressedSolution& a, const DressedSolution& b) {
  double overlap[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      overlap[i][j] = std::abs(dot_c(a.eigenvectors[i], b.eigenvectors[j]));

  double lam_scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    lam_scale = std::max(lam_scale, std::abs(a.eigenvalues[i]));
    lam_scale = std::max(lam_scale, std::abs(b.eigenvalues[i]));
  }

  std::array<int, 3> perm = {-1, -1, -1};
  bool row_used[3] = {false, false, false};
  bool col_used[3] = {false, false, false};

  for (int step = 0; step < 3; ++step) {
    int bi = -1, bj = -1;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
      if (row_used[i]) continue;
      for (int j = 0; j < 3; ++j) {
        if (col_used[j]) continue;
        if (overlap[i][j] > best) {
          best = overlap[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    // Runner-up that would conflict with this assignment.
    int ri = -1, rj = -1;
    double second = -1.0;
    for (int i = 0; i < 3; ++i) {
      if (row_used[i]) continue;
      for (int j = 0; j < 3; ++j) {
        if (col_used[j]) continue;
        if (i != bi && j != bj) continue;
        if (i == bi && j == bj) continue;
        if (overlap[i][j] > second) {
          second = overlap[i][j];
          ri = i;
          rj = j;
        }
      }
    }
    if (second >= 0.0 && best - second < 1e-6) {
      const double d_best = std::abs(a.eigenvalues[bi] - b.eigenvalues[bj]);
      const double d_run = std::abs(a.eigenvalues[ri] - b.eigenvalues[rj]);
      if (std::abs(d_best - d_run) > 1e-9 * std::max(lam_scale, 1.0)) {
        if (d_run < d_best) {
          bi = ri;
          bj = rj;
        }
      } else {
        std::ostringstream msg;
        msg << "branch overlaps " << best << " and " << second
            << " are indistinguishable";
        throw AmbiguousMatch(msg.str());
      }
    }
    perm[bi] = bj;
    row_used[bi] = true;
    col_used[bj] = true;
  }
  return perm;
}

enum class FomExponent {
  decay_over_shift,   // exp(-Gamma_i / |shift|)
  decay_times_period, // exp(-Gamma_i * 2 pi / |shift|)
};

// Contrast proxy: expected second-to-first Ramsey peak amplitude ratio,
// sum_i P_i exp(-Gamma_i/|shift|). Returns 0 at zero shift (infinite fringe
// period loses all contrast for any nonzero decay).
inline double figure_of_merit(double shift, const std::array<double, 3>& admixtures,
                              const std::array<double, 3>& rates,
                              FomExponent convention = FomExponent::decay_over_shift) {
  double psum = 0.0;
  for (double p : admixtures) {
    if (!(p >= -1e-12)) throw std::invalid_argument("figure_of_merit: negative admixture");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("figure_of_merit: admixtures must sum to 1");
  for (double g : rates)
    if (!(g >= 0.0)) throw std::invalid_argument("figure_of_merit: negative rate");

  if (shift == 0.0) return 0.0;
  const double scale =
      convention == FomExponent::decay_over_shift ? std::abs(shift) : std::abs(shift) / two_pi;
  double fom = 0.0;
  for (int i = 0; i < 3; ++i)
    fom += admixtures[i] *
           std::exp(-rates[i] / scale);
  return fom;
}

struct GroundShiftResult {
  double shift = 0.0;  // rad/s, Re lambda(delta_rm) - Re lambda(0), matched branch
  double decay = 0.0;  // rad/s, -Im lambda(delta_rm)
  std::array<double, 3> admixtures{};  // at delta_rm
  double figure_of_merit = 0.0;
  cplx lambda{};       // selected dressed eigenvalue of H(delta_rm), rad/s
  int branch_unshifted = -1;
  int branch_shifted = -1;
};

// Transduction of a Rydberg-level shift delta_rm into the dressed upper
// ground state: solve H(delta_rm) and H(0), pair branches by eigenvector
// overlap, select by the quadrant rule on H(0), difference the real parts.
inline GroundShiftResult ground_shift(const DressingConfig& cfg, double delta_rm,
                                      FomExponent convention = FomExponent::decay_over_shift) {
  const Mat3c h0 = build_hamiltonian(cfg, 0.0);
  const Mat3c hd = build_hamiltonian(cfg, delta_rm);
  const DressedSolution sol0 = solve_eigensystem(h0);
  const DressedSolution sold = solve_eigensystem(hd);
  const std::array<int, 3> perm = match_branch(sol0, sold);

  const int sel0 = select_dressed_state(sol0, cfg.delta1, cfg.delta2);
  const int seld = perm[sel0];

  GroundShiftResult r{};
  r.shift = sold.eigenvalues[seld].real() -
            sol0.eigenvalues[sel0].real();
  r.decay = -sold.eigenvalues[seld].imag();
  r.admixtures = sold.admixtures[seld];
  r.lambda = sold.eigenvalues[seld];
  r.branch_unshifted = sel0;
  r.branch_shifted = seld;
  r.figure_of_merit =
      figure_of_merit(r.shift, r.admixtures, {cfg.gamma1, cfg.gamma2, cfg.gamma3}, convention);
  return r;
}

// First-order slope d(shift)/d(delta_rm) of a branch: Re[v3^2 / (v^T v)]
// from complex-symmetric perturbation theory on the (3,3) matrix element.
inline double transduction_slope(const DressedSolution& sol, int branch) {
  const Vec3c& v = sol.eigenvectors[branch];
  const cplx vtv = dot_u(v, v);
  if (std::abs(vtv) < 1e-12)
    throw Error("transduction_slope: quasi-null eigenvector (v^T v ~ 0)");
  return (v[2] * v[2] / vtv).real();
}

}  // namespace rydsense
