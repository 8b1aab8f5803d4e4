#pragma once

/**
 * @file ulam.hpp
 * @brief Floating-point Ulam discretization of piecewise-affine interval maps.
 *
 * The unit interval is cut into n equal bins and the transfer operator is
 * replaced by the row-stochastic matrix
 *
 *     M(i, j) = |bin_i cap phi^{-1}(bin_j)| / |bin_i|,
 *
 * acting on densities as row vectors (f -> f M). Results are numerical
 * verdicts, not exact statements.
 */

#include "pfkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace pfkit::ulam {

/// phi(x) = slope * x + offset on [x0, x1).
struct AffineBranch {
  double x0;
  double x1;
  double slope;
  double offset;
};

enum class MapKind { doubling, tent, rotation, custom };

struct IntervalMap {
  MapKind kind = MapKind::custom;
  double alpha = 0.0; // rotation angle, if kind == rotation
  std::vector<AffineBranch> branches;

  static IntervalMap doubling() { return {MapKind::doubling, 0.0, {{0.0, 0.5, 2.0, 0.0}, {0.5, 1.0, 2.0, -1.0}}}; }
  static IntervalMap tent() { return {MapKind::tent, 0.0, {{0.0, 0.5, 2.0, 0.0}, {0.5, 1.0, -2.0, 2.0}}}; }
  static IntervalMap rotation(double alpha) {
    alpha -= std::floor(alpha);
    if (alpha == 0.0) return {MapKind::rotation, 0.0, {{0.0, 1.0, 1.0, 0.0}}};
    return {MapKind::rotation, alpha, {{0.0, 1.0 - alpha, 1.0, alpha}, {1.0 - alpha, 1.0, 1.0, alpha - 1.0}}};
  }
  /// Branches must tile [0, 1), have nonzero slope and map into [0, 1].
  static IntervalMap custom(std::vector<AffineBranch> branches) {
    if (branches.empty()) throw ValidationError("custom map needs at least one branch");
    std::sort(branches.begin(), branches.end(), [](const auto& a, const auto& b) { return a.x0 < b.x0; });
    double cursor = 0.0;
    for (const auto& br : branches) {
      if (std::abs(br.x0 - cursor) > 1e-12 || !(br.x1 > br.x0) || br.slope == 0.0)
        throw ValidationError("custom branches must tile [0,1) with nonzero slopes");
      double y0 = br.slope * br.x0 + br.offset;
      double y1 = br.slope * br.x1 + br.offset;
      if (std::min(y0, y1) < -1e-12 || std::max(y0, y1) > 1.0 + 1e-12)
        throw ValidationError("custom branch leaves [0,1]");
      cursor = br.x1;
    }
    if (std::abs(cursor - 1.0) > 1e-12) throw ValidationError("custom branches must end at 1");
    return {MapKind::custom, 0.0, std::move(branches)};
  }

  [[nodiscard]] std::string name() const {
    switch (kind) {
    case MapKind::doubling: return "doubling";
    case MapKind::tent: return "tent";
    case MapKind::rotation: return "rotation:" + std::to_string(alpha);
    case MapKind::custom: return "custom";
    }
    return "custom";
  }
};

struct UlamModel {
  IntervalMap map;
  std::size_t bins = 0;
  std::vector<double> matrix; // row-major bins x bins

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return matrix[i * bins + j]; }
};

inline UlamModel ulam_assemble(const IntervalMap& map, std::size_t bins) {
  if (bins < 2) throw BadBinCount("Ulam discretization needs at least 2 bins, got " + std::to_string(bins));
  UlamModel model{map, bins, std::vector<double>(bins * bins, 0.0)};
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double l = static_cast<double>(i) * width;
    const double r = static_cast<double>(i + 1) * width;
    for (const auto& br : map.branches) {
      double u = std::max(l, br.x0);
      double v = std::min(r, br.x1);
      if (!(v > u)) continue;
      double p = std::clamp(br.slope * u + br.offset, 0.0, 1.0);
      double q = std::clamp(br.slope * v + br.offset, 0.0, 1.0);
      if (p > q) std::swap(p, q);
      auto first = static_cast<std::size_t>(std::floor(p * static_cast<double>(bins)));
      for (auto j = std::min(first, bins - 1); j < bins; ++j) {
        double jl = static_cast<double>(j) * width;
        if (jl >= q) break;
        double overlap = std::min(q, static_cast<double>(j + 1) * width) - std::max(p, jl);
        if (overlap > 0.0) model.matrix[i * bins + j] += overlap / std::abs(br.slope) / width;
      }
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < bins; ++j) {
      auto& e = model.matrix[i * bins + j];
      if (e < 0.0) {
        if (e < -1e-15) throw NonStochasticRow("negative Ulam entry in row " + std::to_string(i));
        e = 0.0;
      }
      sum += e;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw NonStochasticRow("Ulam row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  return model;
}

inline std::vector<double> apply(const UlamModel& model, const std::vector<double>& f) {
  const auto n = model.bins;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double m = model.matrix[i * n + j];
      if (m != 0.0) out[j] += f[i] * m;
    }
  }
  return out;
}

enum class Verdict { exact_like, non_mixing };

inline const char* to_string(Verdict v) { return v == Verdict::exact_like ? "exact-like" : "non-mixing"; }

struct UlamProfile {
  std::vector<double> defects; // ||P^n 1_B - mu(B) 1||_1, n = 0..n_max
  Verdict verdict = Verdict::non_mixing;
};

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::size_t kDefaultSteps = 64;

/// Profile of the indicator of the bins in `b`. The verdict is "exact-like"
/// when the defect has dropped below `tol` by step n_max, "non-mixing"
/// otherwise.
inline UlamProfile ulam_mixing_profile(const UlamModel& model, const std::vector<std::size_t>& b, std::size_t n_max,
                                       double tol = kDefaultTolerance) {
  const auto n = model.bins;
  std::vector<double> f(n, 0.0);
  for (auto j : b) {
    if (j >= n) throw StructuralError("bin index " + std::to_string(j) + " out of range");
    f[j] = 1.0;
  }
  const double mu = std::count(f.begin(), f.end(), 1.0) / static_cast<double>(n);
  UlamProfile p;
  for (std::size_t step = 0; step <= n_max; ++step) {
    double norm = 0.0;
    for (double v : f) norm += std::abs(v - mu);
    p.defects.push_back(norm / static_cast<double>(n));
    if (step < n_max) f = ulam::apply(model, f);
  }
  p.verdict = p.defects.back() < tol ? Verdict::exact_like : Verdict::non_mixing;
  return p;
}

/// Nonzero entries as CSV "i,j,p", row-major.
inline void write_matrix_csv(std::ostream& os, const UlamModel& model) {
  auto old = os.precision(17);
  os << "i,j,p\n";
  for (std::size_t i = 0; i < model.bins; ++i)
    for (std::size_t j = 0; j < model.bins; ++j)
      if (double e = model(i, j); e != 0.0) os << i << ',' << j << ',' << e << '\n';
  os.precision(old);
}

} // namespace pfkit::ulam
