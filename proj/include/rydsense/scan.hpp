#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rydsense/csv.hpp"
#include "rydsense/dressed.hpp"
#include "rydsense/errors.hpp"
#include "rydsense/units.hpp"

namespace rydsense {

struct AxisSpec {
  double min_hz = 0.0;
  double max_hz = 0.0;
  int count = 0;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      v[static_cast<std::size_t>(i)] =
          min_hz + static_cast<double>(i) * (max_hz - min_hz) / static_cast<double>(count - 1);
    return v;
  }

  void validate(const char* name) const {
    if (count < 2) throw std::invalid_argument(std::string(name) + ": count must be >= 2");
    if (!(min_hz < max_hz)) throw std::invalid_argument(std::string(name) + ": min must be < max");
    if (!std::isfinite(min_hz) || !std::isfinite(max_hz))
      throw std::invalid_argument(std::string(name) + ": non-finite bound");
  }
};

struct ScanGrid {
  AxisSpec delta1;
  AxisSpec delta2;
  DressingConfig base;  // detunings ignored; swept per point
  double delta_rm_hz = 0.0;
  FomExponent fom_convention = FomExponent::decay_over_shift;

  void validate() const {
    delta1.validate("delta1");
    delta2.validate("delta2");
    base.validate();
    if (!std::isfinite(delta_rm_hz)) throw std::invalid_argument("delta_rm_hz non-finite");
  }
};

enum class PointStatus { ok, degenerate, ambiguous };

inline const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::degenerate: return "degenerate";
    case PointStatus::ambiguous: return "ambiguous";
  }
  return "?";
}

struct ScanPoint {
  double shift_hz = 0.0;
  double decay_hz = 0.0;
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  double fom = 0.0;
  PointStatus status = PointStatus::ok;

  friend bool operator==(const ScanPoint& a, const ScanPoint& b) {
    auto eq = [](double x, double y) {
      return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    return eq(a.shift_hz, b.shift_hz) && eq(a.decay_hz, b.decay_hz) && eq(a.p1, b.p1) &&
           eq(a.p2, b.p2) && eq(a.p3, b.p3) && eq(a.fom, b.fom) && a.status == b.status;
  }
};

struct ScanResult {
  std::vector<double> delta1_hz;  // outer axis
  std::vector<double> delta2_hz;  // inner axis
  std::vector<ScanPoint> points;  // row-major over (delta1, delta2)

  const ScanPoint& at(std::size_t i, std::size_t j) const {
    return points[i * delta2_hz.size() + j];
  }

  friend bool operator==(const ScanResult& a, const ScanResult& b) {
    return a.delta1_hz == b.delta1_hz && a.delta2_hz == b.delta2_hz && a.points == b.points;
  }
};

namespace detail {

inline ScanPoint evaluate_point(const DressingConfig& base, double d1_hz, double d2_hz,
                                double delta_rm_hz, FomExponent convention) {
  DressingConfig cfg = base;
  cfg.delta1 = angular_from_hz(d1_hz);
  cfg.delta2 = angular_from_hz(d2_hz);
  ScanPoint pt{};
  try {
    const GroundShiftResult r = ground_shift(cfg, angular_from_hz(delta_rm_hz), convention);
    pt.shift_hz = hz_from_angular(r.shift);
    pt.decay_hz = hz_from_angular(r.decay);
    pt.p1 = r.admixtures[0];
    pt.p2 = r.admixtures[1];
    pt.p3 = r.admixtures[2];
    pt.fom = r.figure_of_merit;
    pt.status = PointStatus::ok;
  } catch (const DegenerateEigenvectors&) {
    pt = ScanPoint{std::nan(""), std::nan(""), std::nan(""), std::nan(""), std::nan(""),
                   std::nan(""), PointStatus::degenerate};
  } catch (const AmbiguousMatch&) {
    pt = ScanPoint{std::nan(""), std::nan(""), std::nan(""), std::nan(""), std::nan(""),
                   std::nan(""), PointStatus::ambiguous};
  }
  return pt;
}

}  // namespace detail

// Evaluates ground_shift over the grid. Every point is independent; workers
// write into preassigned slots, so the result is byte-identical for any
// thread count. n_threads == 0 selects the hardware concurrency.
inline ScanResult run_scan(const ScanGrid& grid, unsigned n_threads = 1) {
  grid.validate();
  ScanResult result;
  result.delta1_hz = grid.delta1.values();
  result.delta2_hz = grid.delta2.values();
  const std::size_t n1 = result.delta1_hz.size();
  const std::size_t n2 = result.delta2_hz.size();
  result.points.resize(n1 * n2);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t i = idx / n2;
      const std::size_t j = idx % n2;
      result.points[idx] = detail::evaluate_point(grid.base, result.delta1_hz[i],
                                                  result.delta2_hz[j], grid.delta_rm_hz,
                                                  grid.fom_convention);
    }
  };

  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t total = n1 * n2;
  if (n_threads <= 1 || total < 2 * n_threads) {
    work(0, total);
    return result;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  const std::size_t chunk = (total + n_threads - 1) / n_threads;
  for (unsigned t = 0; t < n_threads; ++t) {
    const std::size_t begin = std::min(total, static_cast<std::size_t>(t) * chunk);
    const std::size_t end = std::min(total, begin + chunk);
    if (begin < end) workers.emplace_back(work, begin, end);
  }
  for (auto& w : workers) w.join();
  return result;
}

struct OptimalPoint {
  double delta1_hz = 0.0;
  double delta2_hz = 0.0;
  double fom = 0.0;
};

// Grid points whose figure of merit lies within top_fraction of the maximum,
// sorted descending by fom (ties by detuning for a deterministic order).
inline std::vector<OptimalPoint> find_optimal_regions(const ScanResult& result,
                                                      double top_fraction = 0.05) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw std::invalid_argument("top_fraction must lie in (0, 1]");
  double fom_max = -std::numeric_limits<double>::infinity();
  bool any_ok = false;
  const std::size_t n2 = result.delta2_hz.size();
  for (const auto& p : result.points)
    if (p.status == PointStatus::ok) {
      any_ok = true;
      fom_max = std::max(fom_max, p.fom);
    }
  if (!any_ok) throw EmptyScan("scan contains no ok points");

  const double threshold = fom_max * (1.0 - top_fraction);
  std::vector<OptimalPoint> out;
  for (std::size_t idx = 0; idx < result.points.size(); ++idx) {
    const auto& p = result.points[idx];
    if (p.status != PointStatus::ok) continue;
    if (p.fom >= threshold)
      out.push_back({result.delta1_hz[idx / n2], result.delta2_hz[idx % n2], p.fom});
  }
  std::sort(out.begin(), out.end(), [](const OptimalPoint& a, const OptimalPoint& b) {
    if (a.fom != b.fom) return a.fom > b.fom;
    if (a.delta1_hz != b.delta1_hz) return a.delta1_hz < b.delta1_hz;
    return a.delta2_hz < b.delta2_hz;
  });
  return out;
}

inline void export_scan(const ScanResult& result, std::ostream& os) {
  os << "delta1_hz,delta2_hz,shift_hz,decay_hz,p1,p2,p3,fom,status\n";
  const std::size_t n2 = result.delta2_hz.size();
  for (std::size_t idx = 0; idx < result.points.size(); ++idx) {
    const auto& p = result.points[idx];
    os << format_double(result.delta1_hz[idx / n2]) << ','
       << format_double(result.delta2_hz[idx % n2]) << ',' << format_double(p.shift_hz) << ','
       << format_double(p.decay_hz) << ',' << format_double(p.p1) << ',' << format_double(p.p2)
       << ',' << format_double(p.p3) << ',' << format_double(p.fom) << ',' << to_string(p.status)
       << '\n';
  }
}

inline void export_scan(const ScanResult& result, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  export_scan(result, os);
  if (!os) throw IoError("write failed: " + path.string());
}

inline ScanResult import_scan(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw IoError("scan CSV: missing header");
  if (line != "delta1_hz,delta2_hz,shift_hz,decay_hz,p1,p2,p3,fom,status")
    throw IoError("scan CSV: unexpected header: " + line);

  ScanResult result;
  std::vector<double> d1_seq, d2_seq;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<std::string, 9> fields;
    std::size_t start = 0;
    for (int f = 0; f < 9; ++f) {
      const std::size_t comma = line.find(',', start);
      if (f < 8) {
        if (comma == std::string::npos) throw IoError("scan CSV: short row: " + line);
        fields[static_cast<std::size_t>(f)] = line.substr(start, comma - start);
        start = comma + 1;
      } else {
        fields[8] = line.substr(start);
      }
    }
    ScanPoint p{};
    p.shift_hz = parse_double(fields[2]);
    p.decay_hz = parse_double(fields[3]);
    p.p1 = parse_double(fields[4]);
    p.p2 = parse_double(fields[5]);
    p.p3 = parse_double(fields[6]);
    p.fom = parse_double(fields[7]);
    if (fields[8] == "ok")
      p.status = PointStatus::ok;
    else if (fields[8] == "degenerate")
      p.status = PointStatus::degenerate;
    else if (fields[8] == "ambiguous")
      p.status = PointStatus::ambiguous;
    else
      throw IoError("scan CSV: unknown status: " + fields[8]);
    d1_seq.push_back(parse_double(fields[0]));
    d2_seq.push_back(parse_double(fields[1]));
    result.points.push_back(p);
  }
  if (result.points.empty()) throw IoError("scan CSV: no data rows");

  // Row-major layout: the inner axis repeats with period n2.
  std::size_t n2 = 1;
  while (n2 < d2_seq.size() && !(d2_seq[n2] == d2_seq[0] && d1_seq[n2] != d1_seq[n2 - 1])) ++n2;
  if (d1_seq.size() % n2 != 0) throw IoError("scan CSV: ragged grid");
  const std::size_t n1 = d1_seq.size() / n2;
  result.delta2_hz.assign(d2_seq.begin(), d2_seq.begin() + static_cast<std::ptrdiff_t>(n2));
  result.delta1_hz.resize(n1);
  for (std::size_t i = 0; i < n1; ++i) result.delta1_hz[i] = d1_seq[i * n2];
  for (std::size_t idx = 0; idx < d1_seq.size(); ++idx) {
    if (d1_seq[idx] != result.delta1_hz[idx / n2] || d2_seq[idx] != result.delta2_hz[idx % n2])
      throw IoError("scan CSV: inconsistent grid coordinates");
  }
  return result;
}

inline ScanResult import_scan(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  return import_scan(is);
}

}  // namespace rydsense
