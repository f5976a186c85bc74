#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "rydsense/errors.hpp"
#include "rydsense/linalg.hpp"

namespace rydsense {

struct Eigensystem {
  std::array<cplx, 3> values;    // ascending by (Re, Im)
  std::array<Vec3c, 3> vectors;  // unit norm, first significant component real-positive
};

namespace detail {

inline bool value_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Roots of the monic cubic x^3 + a x^2 + b x + c with complex coefficients.
// Cardano's formula on the depressed cubic, branch chosen to avoid
// cancellation, then a Newton polish on the undepressed polynomial.
inline std::array<cplx, 3> monic_cubic_roots(const cplx& a, const cplx& b, const cplx& c) {
  const cplx third_a = a / 3.0;
  const cplx p = b - a * third_a;
  const cplx q = c + third_a * (2.0 * third_a * third_a - b);
  std::array<cplx, 3> roots{};
  const double coeff_scale = std::max(std::sqrt(std::abs(p)), std::cbrt(std::abs(q)));
  if (coeff_scale == 0.0) {
    roots = {-third_a, -third_a, -third_a};
  } else {
    const cplx root_disc = std::sqrt(0.25 * q * q + p * p * p / 27.0);
    cplx u3 = -0.5 * q - root_disc;
    if (std::abs(-0.5 * q + root_disc) > std::abs(u3)) u3 = -0.5 * q + root_disc;
    if (u3 == cplx(0.0)) {
      roots = {-third_a, -third_a, -third_a};
    } else {
      const cplx u = std::pow(u3, 1.0 / 3.0);
      const cplx w(-0.5, 0.8660254037844386467637231707529362);  // e^{2 pi i/3}
      const std::array<cplx, 3> units = {cplx(1.0), w, w * w};
      for (int k = 0; k < 3; ++k) {
        const cplx uk = u * units[k];
        roots[k] = uk - p / (3.0 * uk) - third_a;
      }
    }
  }
  for (auto& x : roots) {
    for (int it = 0; it < 2; ++it) {
      const cplx f = ((x + a) * x + b) * x + c;
      const cplx fp = (3.0 * x + 2.0 * a) * x + b;
      if (fp == cplx(0.0)) break;
      const cplx step = f / fp;
      if (!(std::abs(step) < 1.0 + std::abs(x))) break;
      x -= step;
    }
  }
  std::sort(roots.begin(), roots.end(), value_less);
  return roots;
}

inline double residual_norm(const Mat3c& m, const cplx& lambda, const Vec3c& v) {
  return norm(m * v - lambda * v);
}

// Kernel vector of A = M - lambda*I via cross products of rows. For eigenvalue
// clusters the vector is deflated against previously extracted cluster members
// so that a semisimple repeated eigenvalue yields an independent basis. Falls
// back to the kernel plane of the dominant row when rank(A) <= 1.
inline Vec3c kernel_vector(const Mat3c& A, double matrix_scale,
                           const Vec3c* prev, int n_prev, int slot) {
  const Vec3c r0 = A.row(0), r1 = A.row(1), r2 = A.row(2);
  struct Cand {
    Vec3c v;
    double n;
  };
  std::array<Cand, 3> cand = {Cand{cross(r0, r1), 0.0}, Cand{cross(r0, r2), 0.0},
                              Cand{cross(r1, r2), 0.0}};
  for (auto& cd : cand) cd.n = norm(cd.v);
  std::sort(cand.begin(), cand.end(), [](const Cand& x, const Cand& y) { return x.n > y.n; });

  const double fro = frobenius_norm(A);
  const double cross_floor = 1e-13 * fro * fro;

  auto try_use = [&](Vec3c w) -> std::optional<Vec3c> {
    double n = norm(w);
    if (n == 0.0) return std::nullopt;
    w = (1.0 / n) * w;
    for (int k = 0; k < n_prev; ++k) w = w - dot_c(prev[k], w) * prev[k];
    n = norm(w);
    if (n < 0.5) return std::nullopt;
    return (1.0 / n) * w;
  };

  for (const auto& cd : cand) {
    if (cd.n <= cross_floor) break;
    if (auto v = try_use(cd.v)) return *v;
  }

  // rank(A) <= 1 at working precision
  Vec3c rmax = r0;
  double rn = norm(r0);
  if (norm(r1) > rn) { rmax = r1; rn = norm(r1); }
  if (norm(r2) > rn) { rmax = r2; rn = norm(r2); }

  if (rn <= 1e-13 * matrix_scale) {
    // A vanishes: the kernel is the whole space
    for (int t = 0; t < 3; ++t) {
      if (auto v = try_use(basis_vector((slot + t) % 3))) return *v;
    }
  } else {
    int jmin = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(rmax[j]) < std::abs(rmax[jmin])) jmin = j;
    const Vec3c w1 = cross(rmax, basis_vector(jmin));
    if (auto v = try_use(w1)) return *v;
    if (auto v = try_use(cross(rmax, w1))) return *v;
  }
  throw DegenerateEigenvectors(
      "unable to resolve independent eigenvectors for a repeated eigenvalue");
}

}  // namespace detail

// Eigen decomposition of a 3x3 complex matrix: closed-form characteristic
// cubic (Cardano) with Newton polish, eigenvectors from row cross products.
// Intended for the complex symmetric matrices of this toolkit but makes no
// structural assumption. Throws DegenerateEigenvectors when a repeated
// eigenvalue has no resolvable second eigenvector (defective input).
inline Eigensystem eigensystem_3x3(const Mat3c& m) {
  if (!is_finite(m)) throw std::invalid_argument("eigensystem_3x3: non-finite entries");

  const double scale = frobenius_norm(m);
  Eigensystem out{};
  if (scale == 0.0) {
    for (int i = 0; i < 3; ++i) {
      out.values[i] = 0.0;
      out.vectors[i] = basis_vector(i);
    }
    return out;
  }

  const cplx tr = trace(m);
  const cplx minors = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) +
                      (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                      (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  const std::array<cplx, 3> roots = detail::monic_cubic_roots(-tr, minors, -det(m));

  double root_mag = 0.0;
  for (const auto& r : roots) root_mag = std::max(root_mag, std::abs(r));
  // Rounding splits a defective pair by ~sqrt(eps)*scale, far wider than the
  // exact-arithmetic coincidence; cluster on that footprint.
  const double cluster_tol = 1e-6 * std::max(scale, root_mag);

  std::array<cplx, 3> values = roots;
  std::array<Vec3c, 3> vectors{};
  for (int i = 0; i < 3; ++i) {
    std::array<Vec3c, 2> prev{};
    int n_prev = 0;
    for (int j = 0; j < i; ++j)
      if (std::abs(roots[j] - roots[i]) <= cluster_tol) prev[n_prev++] = vectors[j];

    Mat3c a = m;
    for (int d = 0; d < 3; ++d) a(d, d) -= roots[i];
    const Vec3c v = detail::kernel_vector(a, scale, prev.data(), n_prev, i);

    // The Euclidean Rayleigh quotient minimises ||Mv - lambda v|| for unit v;
    // adopt it when it beats the polynomial root (exact for invariant v of a
    // semisimple repeated eigenvalue).
    const cplx ray = dot_c(v, m * v);
    cplx lam = roots[i];
    if (detail::residual_norm(m, ray, v) < detail::residual_norm(m, lam, v)) lam = ray;

    values[i] = lam;
    vectors[i] = v;
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return detail::value_less(values[x], values[y]); });
  for (int i = 0; i < 3; ++i) {
    out.values[i] = values[order[i]];
    out.vectors[i] = vectors[order[i]];
  }

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const auto& li = out.values[i];
      const auto& lj = out.values[j];
      if (std::abs(li - lj) <= cluster_tol &&
          std::abs(dot_c(out.vectors[i], out.vectors[j])) > 1.0 - 1e-6) {
        std::ostringstream msg;
        msg << "degenerate eigenvalues " << li << " and " << lj
            << " with coincident eigenvectors";
        throw DegenerateEigenvectors(msg.str());
      }
    }
  }

  for (int i = 0; i < 3; ++i) {
    const double res = detail::residual_norm(m, out.values[i], out.vectors[i]);
    if (!(res <= 1e-9 * scale)) {
      std::ostringstream msg;
      msg << "eigenpair residual " << res << " exceeds bound " << 1e-9 * scale;
      throw DegenerateEigenvectors(msg.str());
    }
  }

  // Phase fixing: first component above threshold made real-positive.
  for (auto& v : out.vectors) {
    for (int k = 0; k < 3; ++k) {
      const double a = std::abs(v[k]);
      if (a > 1e-12) {
        v = (std::conj(v[k]) / a) * v;
        break;
      }
    }
  }
  return out;
}

}  // namespace rydsense
