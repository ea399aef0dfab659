#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "gdf/logstore.hpp"

namespace gdf {

/// Natural cubic spline through (x, y) knots; second derivatives are zero at
/// both ends. Coefficients come from the tridiagonal continuity/smoothness
/// system solved with the Thomas algorithm.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(std::vector<double> x, std::vector<double> y);

  /// Evaluates the spline; arguments outside the knot range clamp to the
  /// nearest knot value.
  double value(double x) const;

  /// Evaluates the cubic of interval `piece` (0 .. n-2) at x, extrapolating
  /// freely; order selects value / first / second derivative.
  double piece_eval(size_t piece, double x, int order = 0) const;

  size_t piece_count() const { return x_.size() - 1; }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& knot_values() const { return y_; }
  const std::vector<double>& second_derivatives() const { return m_; }

 private:
  std::vector<double> x_, y_, m_;
};

enum class SurfaceKind { Throughput, Energy };

using SliceKey = std::pair<int, int64_t>;  // (pp, bs)

/// Per-cluster interpolant mapping (cc, p) to predicted throughput or energy,
/// one tensor-product natural cubic spline per (pp, bs) slice. Evaluation
/// outside the knot hull clamps to the hull boundary.
class Surface {
 public:
  struct Slice {
    std::vector<double> knots_cc;
    std::vector<double> knots_p;
    std::vector<std::vector<double>> values;  // [cc index][p index]
  };

  static Surface from_grid(SurfaceKind kind, SliceKey key, Slice slice);

  /// Adds or replaces one (pp, bs) slice.
  Surface& add_slice(const SliceKey& key, Slice slice);

  /// Builds one slice per distinct (pp, bs) in the records, averaging
  /// replicate measurements at each (cc, p) knot. Throws InsufficientGrid
  /// when a slice lacks a full grid of at least 4x4 distinct values.
  static Surface fit(const std::vector<TransferLogRecord>& records, SurfaceKind kind);

  double eval(const SliceKey& key, double cc, double p) const;

  SurfaceKind kind() const { return kind_; }
  const std::map<SliceKey, Slice>& slices() const { return slices_; }
  double ref_bytes() const { return ref_bytes_; }
  void set_ref_bytes(double b) { ref_bytes_ = b; }

 private:
  SurfaceKind kind_ = SurfaceKind::Throughput;
  std::map<SliceKey, Slice> slices_;
  double ref_bytes_ = 0;  // mean dataset bytes of the fitted records
};

}  // namespace gdf
