#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "rydsense/csv.hpp"
#include "rydsense/dressed.hpp"
#include "rydsense/errors.hpp"
#include "rydsense/units.hpp"

namespace rydsense {

// pi/2 -- dressed evolution T/2 -- pi (circularity switch) -- dressed
// evolution T/2 -- pi/2, on the ground-state qubit {|0>, |1>}. |0> is the
// undressed reference clock state; |1> carries the dressed complex eigenvalue.
struct SequenceSpec {
  DressingConfig dressing;       // with detunings set
  double delta_rm_chiral_hz = 0.0;
  double delta_achiral_hz = 0.0;
  std::vector<double> times_s;   // exposure durations, strictly increasing, > 0
  // When false (default) the achiral environment shift rides through the same
  // dressed transduction as the chiral one; when true it is applied directly
  // as an additive phase rate on |1>.
  bool achiral_direct = false;

  void validate() const {
    dressing.validate();
    if (!std::isfinite(delta_rm_chiral_hz) || !std::isfinite(delta_achiral_hz))
      throw std::invalid_argument("SequenceSpec: non-finite shift");
    if (times_s.empty()) throw std::invalid_argument("SequenceSpec: empty time grid");
    double prev = 0.0;
    for (double t : times_s) {
      if (!(t > prev)) throw std::invalid_argument("SequenceSpec: times must be strictly increasing and > 0");
      prev = t;
    }
  }
};

struct QubitAmplitudes {
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};

  double population1() const { return std::norm(c1); }
  double norm_total() const { return std::norm(c0) + std::norm(c1); }
};

// Ideal instantaneous pulses about the x axis.
inline void apply_half_pi(QubitAmplitudes& q) {
  const cplx c0 = q.c0, c1 = q.c1;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  q.c0 = inv_sqrt2 * (c0 - cplx(0.0, 1.0) * c1);
  q.c1 = inv_sqrt2 * (c1 - cplx(0.0, 1.0) * c0);
}

inline void apply_pi(QubitAmplitudes& q) {
  const cplx c0 = q.c0, c1 = q.c1;
  q.c0 = cplx(0.0, -1.0) * c1;
  q.c1 = cplx(0.0, -1.0) * c0;
}

struct RamseyTrace {
  std::vector<double> t_s;
  std::vector<double> p1;
  std::vector<double> p_loss;  // shelved/lost norm, 1 - |c0|^2 - |c1|^2
};

// The central pi pulse plus circularity switch flips only the chiral part of
// the Rydberg shift; the dressed baseline is identical in both halves and
// refocuses. Population is not renormalised after decay.
inline RamseyTrace simulate_sequence(const SequenceSpec& spec) {
  spec.validate();
  const double dc = angular_from_hz(spec.delta_rm_chiral_hz);
  const double da = angular_from_hz(spec.delta_achiral_hz);

  const double delta_plus = spec.achiral_direct ? dc : dc + da;
  const double delta_minus = spec.achiral_direct ? -dc : -dc + da;
  const cplx lambda_plus = ground_shift(spec.dressing, delta_plus).lambda +
                           (spec.achiral_direct ? cplx(da) : cplx(0.0));
  const cplx lambda_minus = ground_shift(spec.dressing, delta_minus).lambda +
                            (spec.achiral_direct ? cplx(da) : cplx(0.0));

  RamseyTrace trace;
  trace.t_s.reserve(spec.times_s.size());
  trace.p1.reserve(spec.times_s.size());
  trace.p_loss.reserve(spec.times_s.size());
  const cplx mi(0.0, -1.0);
  for (double t : spec.times_s) {
    QubitAmplitudes q;
    apply_half_pi(q);
    q.c1 *= std::exp(mi * lambda_plus * (0.5 * t));
    apply_pi(q);
    q.c1 *= std::exp(mi * lambda_minus * (0.5 * t));
    apply_half_pi(q);
    trace.t_s.push_back(t);
    trace.p1.push_back(q.population1());
    trace.p_loss.push_back(1.0 - q.norm_total());
  }
  return trace;
}

struct FringeMetrics {
  double period_s = std::numeric_limits<double>::infinity();
  double contrast_ratio = std::numeric_limits<double>::quiet_NaN();
  int peaks_found = 0;
};

namespace detail {

struct Extremum {
  double t;
  double value;
};

// Parabolic refinement through three samples around an interior extremum,
// Newton form y = y0 + s10 (t - t0) + A (t - t0)(t - t1).
inline Extremum refine_extremum(const std::vector<double>& t, const std::vector<double>& y,
                                std::size_t k) {
  const double t0 = t[k - 1], t1 = t[k], t2 = t[k + 1];
  const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
  const double s10 = (y1 - y0) / (t1 - t0);
  const double s21 = (y2 - y1) / (t2 - t1);
  const double a = (s21 - s10) / (t2 - t0);
  if (a == 0.0) return {t1, y1};
  const double t_star = 0.5 * (t0 + t1) - s10 / (2.0 * a);
  const double y_star = y0 + s10 * (t_star - t0) + a * (t_star - t0) * (t_star - t1);
  return {t_star, y_star};
}

}  // namespace detail

// Fringe period from peak/trough spacing; contrast from the amplitudes of the
// first two peaks measured about the local trough level. A flat trace returns
// an infinite period; an oscillating trace shorter than two periods raises
// InsufficientSpan.
inline FringeMetrics fringe_metrics(const RamseyTrace& trace) {
  const auto& t = trace.t_s;
  const auto& p = trace.p1;
  if (t.size() < 3) throw InsufficientSpan("trace too short for fringe detection");

  double pmin = p[0], pmax = p[0];
  for (double x : p) {
    pmin = std::min(pmin, x);
    pmax = std::max(pmax, x);
  }
  if (pmax - pmin <= 1e-12 * std::max(1.0, std::abs(pmax))) return {};  // flat

  std::vector<detail::Extremum> peaks, troughs;
  const double wiggle = 1e-12 * (pmax - pmin);
  std::size_t last_peak = 0, last_trough = 0;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    if (p[k] >= p[k - 1] && p[k] >= p[k + 1] &&
        (p[k] > p[k - 1] + wiggle || p[k] > p[k + 1] + wiggle) &&
        (peaks.empty() || k > last_peak + 1)) {
      peaks.push_back(detail::refine_extremum(t, p, k));
      last_peak = k;
    }
    if (p[k] <= p[k - 1] && p[k] <= p[k + 1] &&
        (p[k] < p[k - 1] - wiggle || p[k] < p[k + 1] - wiggle) &&
        (troughs.empty() || k > last_trough + 1)) {
      troughs.push_back(detail::refine_extremum(t, p, k));
      last_trough = k;
    }
  }

  if (peaks.size() < 2)
    throw InsufficientSpan("fewer than two fringe peaks in the trace");

  // Period from interior extremum spacing only.
  double interval_sum = 0.0;
  int interval_count = 0;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    interval_sum += peaks[k].t - peaks[k - 1].t;
    ++interval_count;
  }
  for (std::size_t k = 1; k < troughs.size(); ++k) {
    const double dt = troughs[k].t - troughs[k - 1].t;
    if (dt > 0.0) {
      interval_sum += dt;
      ++interval_count;
    }
  }
  const double period = interval_sum / interval_count;

  // Trace boundaries act as trough levels (not period marks) when the signal
  // genuinely starts or ends near the bottom of its swing.
  const double low_bar = pmin + 0.25 * (pmax - pmin);
  if (p[0] < p[1] && p[0] <= low_bar) troughs.insert(troughs.begin(), {t[0], p[0]});
  if (p[p.size() - 1] < p[p.size() - 2] && p.back() <= low_bar) troughs.push_back({t.back(), p.back()});
  std::sort(troughs.begin(), troughs.end(),
            [](const detail::Extremum& a, const detail::Extremum& b) { return a.t < b.t; });
  if (t.back() - t.front() < 2.0 * period * 0.95)
    throw InsufficientSpan("trace spans fewer than two fringe periods");

  auto trough_level_at = [&](double when) {
    const detail::Extremum* before = nullptr;
    const detail::Extremum* after = nullptr;
    for (const auto& tr : troughs) {
      if (tr.t <= when) before = &tr;
      if (tr.t > when) {
        after = &tr;
        break;
      }
    }
    if (before && after) {
      const double w = (when - before->t) / (after->t - before->t);
      return (1.0 - w) * before->value + w * after->value;
    }
    if (before) return before->value;
    if (after) return after->value;
    return pmin;
  };

  FringeMetrics metrics;
  metrics.period_s = period;
  metrics.peaks_found = static_cast<int>(peaks.size());
  const double a1 = peaks[0].value - trough_level_at(peaks[0].t);
  const double a2 = peaks[1].value - trough_level_at(peaks[1].t);
  metrics.contrast_ratio = a1 != 0.0 ? a2 / a1 : std::numeric_limits<double>::quiet_NaN();
  return metrics;
}

inline void export_trace(const RamseyTrace& trace, std::ostream& os) {
  os << "t_s,p1,p_loss\n";
  for (std::size_t k = 0; k < trace.t_s.size(); ++k)
    os << format_double(trace.t_s[k]) << ',' << format_double(trace.p1[k]) << ','
       << format_double(trace.p_loss[k]) << '\n';
}

inline void export_trace(const RamseyTrace& trace, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  export_trace(trace, os);
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace rydsense
