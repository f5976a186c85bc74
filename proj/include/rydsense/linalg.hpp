#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace rydsense {

using cplx = std::complex<double>;

struct Vec3c {
  std::array<cplx, 3> e{};

  cplx& operator[](int i) { return e[static_cast<std::size_t>(i)]; }
  const cplx& operator[](int i) const { return e[static_cast<std::size_t>(i)]; }

  friend Vec3c operator+(const Vec3c& a, const Vec3c& b) {
    return {{{a[0] + b[0], a[1] + b[1], a[2] + b[2]}}};
  }
  friend Vec3c operator-(const Vec3c& a, const Vec3c& b) {
    return {{{a[0] - b[0], a[1] - b[1], a[2] - b[2]}}};
  }
  friend Vec3c operator*(const cplx& s, const Vec3c& a) {
    return {{{s * a[0], s * a[1], s * a[2]}}};
  }
  friend Vec3c operator*(double s, const Vec3c& a) {
    return {{{s * a[0], s * a[1], s * a[2]}}};
  }
};

inline Vec3c basis_vector(int i) {
  Vec3c v{};
  v[i] = 1.0;
  return v;
}

// Bilinear dot product, sum a_i b_i (no conjugation).
inline cplx dot_u(const Vec3c& a, const Vec3c& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Euclidean inner product, sum conj(a_i) b_i.
inline cplx dot_c(const Vec3c& a, const Vec3c& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

// Bilinear cross product (no conjugation).
inline Vec3c cross(const Vec3c& a, const Vec3c& b) {
  return {{{a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]}}};
}

inline double norm2(const Vec3c& a) {
  return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]);
}

inline double norm(const Vec3c& a) { return std::sqrt(norm2(a)); }

inline Vec3c normalized(const Vec3c& a) {
  const double n = norm(a);
  return (1.0 / n) * a;
}

inline bool is_finite(const Vec3c& a) {
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) return false;
  return true;
}

struct Mat3c {
  std::array<std::array<cplx, 3>, 3> e{};

  cplx& operator()(int i, int j) {
    return e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const cplx& operator()(int i, int j) const {
    return e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }

  Vec3c row(int i) const { return {{{(*this)(i, 0), (*this)(i, 1), (*this)(i, 2)}}}; }

  static Mat3c identity() {
    Mat3c m{};
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }

  friend Mat3c operator+(const Mat3c& a, const Mat3c& b) {
    Mat3c r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
  }
  friend Mat3c operator-(const Mat3c& a, const Mat3c& b) {
    Mat3c r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
  }
  friend Mat3c operator*(const cplx& s, const Mat3c& a) {
    Mat3c r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = s * a(i, j);
    return r;
  }
  friend Mat3c operator*(double s, const Mat3c& a) { return cplx(s) * a; }

  friend Vec3c operator*(const Mat3c& m, const Vec3c& v) {
    Vec3c r;
    for (int i = 0; i < 3; ++i)
      r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
    return r;
  }
};

inline Mat3c transpose(const Mat3c& m) {
  Mat3c r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(j, i);
  return r;
}

// Outer product a_i b_j (no conjugation).
inline Mat3c outer(const Vec3c& a, const Vec3c& b) {
  Mat3c r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

inline double frobenius_norm(const Mat3c& m) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

inline double max_abs(const Mat3c& m) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s = std::max(s, std::abs(m(i, j)));
  return s;
}

inline bool is_finite(const Mat3c& m) {
  for (int i = 0; i < 3; ++i)
    if (!is_finite(m.row(i))) return false;
  return true;
}

inline cplx det(const Mat3c& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline cplx trace(const Mat3c& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

}  // namespace rydsense
