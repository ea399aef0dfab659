#include "gdf/spline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gdf/errors.hpp"

namespace gdf {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw InsufficientGrid("spline needs >= 2 knots");
  for (size_t i = 1; i < n; ++i)
    if (x_[i] <= x_[i - 1]) throw InsufficientGrid("spline knots must be strictly increasing");

  m_.assign(n, 0.0);
  if (n == 2) return;

  // Tridiagonal system for interior second derivatives, natural ends.
  const size_t k = n - 2;
  std::vector<double> a(k), b(k), c(k), d(k);
  for (size_t i = 0; i < k; ++i) {
    const double h0 = x_[i + 1] - x_[i];
    const double h1 = x_[i + 2] - x_[i + 1];
    a[i] = h0;
    b[i] = 2.0 * (h0 + h1);
    c[i] = h1;
    d[i] = 6.0 * ((y_[i + 2] - y_[i + 1]) / h1 - (y_[i + 1] - y_[i]) / h0);
  }
  for (size_t i = 1; i < k; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m_[k] = d[k - 1] / b[k - 1];
  for (size_t i = k - 1; i-- > 0;) m_[i + 1] = (d[i] - c[i] * m_[i + 2]) / b[i];
}

double NaturalCubicSpline::piece_eval(size_t piece, double x, int order) const {
  const double h = x_[piece + 1] - x_[piece];
  const double A = (x_[piece + 1] - x) / h;
  const double B = (x - x_[piece]) / h;
  const double m0 = m_[piece];
  const double m1 = m_[piece + 1];
  switch (order) {
    case 0:
      return A * y_[piece] + B * y_[piece + 1] +
             ((A * A * A - A) * m0 + (B * B * B - B) * m1) * h * h / 6.0;
    case 1:
      return (y_[piece + 1] - y_[piece]) / h +
             (-(3.0 * A * A - 1.0) * m0 + (3.0 * B * B - 1.0) * m1) * h / 6.0;
    case 2:
      return A * m0 + B * m1;
    default:
      throw std::invalid_argument("spline derivative order must be 0..2");
  }
}

double NaturalCubicSpline::value(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const size_t piece =
      static_cast<size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  return piece_eval(std::min(piece, x_.size() - 2), x);
}

Surface Surface::from_grid(SurfaceKind kind, SliceKey key, Slice slice) {
  Surface s;
  s.kind_ = kind;
  if (slice.values.size() != slice.knots_cc.size())
    throw InsufficientGrid("value rows must match cc knots");
  for (const auto& row : slice.values)
    if (row.size() != slice.knots_p.size())
      throw InsufficientGrid("value columns must match p knots");
  s.slices_[key] = std::move(slice);
  return s;
}

Surface& Surface::add_slice(const SliceKey& key, Slice slice) {
  if (slice.values.size() != slice.knots_cc.size())
    throw InsufficientGrid("value rows must match cc knots");
  for (const auto& row : slice.values)
    if (row.size() != slice.knots_p.size())
      throw InsufficientGrid("value columns must match p knots");
  slices_[key] = std::move(slice);
  return *this;
}

Surface Surface::fit(const std::vector<TransferLogRecord>& records, SurfaceKind kind) {
  Surface s;
  s.kind_ = kind;
  if (records.empty()) throw InsufficientGrid("no records to fit");

  struct Cell {
    double sum = 0;
    size_t n = 0;
  };
  std::map<SliceKey, std::map<std::pair<int, int>, Cell>> cells;
  double bytes_sum = 0;
  for (const auto& r : records) {
    double v;
    if (kind == SurfaceKind::Throughput) {
      v = r.achieved_throughput;
    } else {
      if (r.achieved_throughput <= 0) continue;
      // Whole-transfer energy at this operating point: sustained power times
      // the predicted duration of the record's dataset.
      v = r.measured_power * (static_cast<double>(r.dataset.total_bytes) * 8.0 /
                              r.achieved_throughput);
    }
    auto& cell = cells[{r.params.pp, r.params.bs}][{r.params.cc, r.params.p}];
    cell.sum += v;
    cell.n += 1;
    bytes_sum += static_cast<double>(r.dataset.total_bytes);
  }
  s.ref_bytes_ = bytes_sum / static_cast<double>(records.size());

  for (auto& [key, grid] : cells) {
    std::set<int> ccs, ps;
    for (const auto& [cp, cell] : grid) {
      ccs.insert(cp.first);
      ps.insert(cp.second);
    }
    if (ccs.size() < 4 || ps.size() < 4)
      throw InsufficientGrid("slice (pp=" + std::to_string(key.first) +
                             ", bs=" + std::to_string(key.second) +
                             ") needs >= 4 distinct cc and p values");
    Slice slice;
    slice.knots_cc.assign(ccs.begin(), ccs.end());
    slice.knots_p.assign(ps.begin(), ps.end());
    slice.values.assign(ccs.size(), std::vector<double>(ps.size()));
    size_t i = 0;
    for (int cc : ccs) {
      size_t j = 0;
      for (int p : ps) {
        auto it = grid.find({cc, p});
        if (it == grid.end())
          throw InsufficientGrid("slice grid has a hole at cc=" + std::to_string(cc) +
                                 ", p=" + std::to_string(p));
        slice.values[i][j] = it->second.sum / static_cast<double>(it->second.n);
        ++j;
      }
      ++i;
    }
    s.slices_[key] = std::move(slice);
  }
  if (s.slices_.empty()) throw InsufficientGrid("no usable slices");
  return s;
}

double Surface::eval(const SliceKey& key, double cc, double p) const {
  auto it = slices_.find(key);
  if (it == slices_.end())
    throw UnknownKey("no slice for pp=" + std::to_string(key.first) +
                     ", bs=" + std::to_string(key.second));
  const Slice& sl = it->second;

  cc = std::clamp(cc, sl.knots_cc.front(), sl.knots_cc.back());
  p = std::clamp(p, sl.knots_p.front(), sl.knots_p.back());

  // Spline-of-splines: interpolate each p column along cc, then along p.
  std::vector<double> row(sl.knots_p.size());
  for (size_t j = 0; j < sl.knots_p.size(); ++j) {
    std::vector<double> col(sl.knots_cc.size());
    for (size_t i = 0; i < sl.knots_cc.size(); ++i) col[i] = sl.values[i][j];
    row[j] = NaturalCubicSpline(sl.knots_cc, std::move(col)).value(cc);
  }
  return NaturalCubicSpline(sl.knots_p, std::move(row)).value(p);
}

}  // namespace gdf
