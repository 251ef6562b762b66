#pragma once

// Sparse exact elimination. Produces the same reduced row-echelon form as the
// dense routines in exactlin.hpp (the RREF is unique); it exists because the
// cochain constraint systems have tens of thousands of very sparse rows.

#include "homlts/exactlin.hpp"

#include <cstdint>
#include <map>

namespace homlts {

struct SparseEntry {
  std::size_t col;
  Scalar value;
};

/// Entries sorted by strictly increasing column, no explicit zeros.
using SparseRow = std::vector<SparseEntry>;

inline SparseRow to_sparse(std::span<const Scalar> dense) {
  SparseRow r;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (sgn(dense[i]) != 0) r.push_back({i, dense[i]});
  return r;
}

/// Builds a sparse row from unsorted (col, value) pairs, merging duplicates.
class SparseRowBuilder {
 public:
  void add(std::size_t col, const Scalar& v) {
    if (sgn(v) == 0) return;
    auto [it, inserted] = acc_.try_emplace(col, v);
    if (!inserted) it->second += v;
  }
  SparseRow take() {
    SparseRow r;
    r.reserve(acc_.size());
    for (auto& [c, v] : acc_)
      if (sgn(v) != 0) r.push_back({c, std::move(v)});
    acc_.clear();
    return r;
  }
  bool empty() const { return acc_.empty(); }

 private:
  std::map<std::size_t, Scalar> acc_;
};

/// a - f*b
inline SparseRow axpy_sub(const SparseRow& a, const Scalar& f, const SparseRow& b) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].col < b[j].col)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].col < a[i].col) {
      out.push_back({b[j].col, -f * b[j].value});
      ++j;
    } else {
      Scalar v = a[i].value - f * b[j].value;
      if (sgn(v) != 0) out.push_back({a[i].col, std::move(v)});
      ++i;
      ++j;
    }
  }
  return out;
}

/// Incremental row echelon form over `width` columns.
class SparseEchelon {
 public:
  explicit SparseEchelon(std::size_t width) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t rank() const { return pivots_.size(); }

  /// Reduces `row` against the current pivots; returns true if it was
  /// independent (and is now stored as a new pivot row).
  bool insert(SparseRow row) {
    reduced_ = false;
    while (!row.empty()) {
      auto it = pivots_.find(row.front().col);
      if (it == pivots_.end()) break;
      const Scalar f = row.front().value;
      row = axpy_sub(row, f, it->second);
    }
    if (row.empty()) return false;
    const Scalar inv = 1 / row.front().value;
    for (auto& e : row) e.value *= inv;
    const std::size_t c = row.front().col;
    pivots_.emplace(c, std::move(row));
    return true;
  }

  bool insert_dense(std::span<const Scalar> v) { return insert(to_sparse(v)); }

  /// True if `row` lies in the span of the inserted rows.
  bool in_span(SparseRow row) const {
    while (!row.empty()) {
      auto it = pivots_.find(row.front().col);
      if (it == pivots_.end()) return false;
      const Scalar f = row.front().value;
      row = axpy_sub(row, f, it->second);
    }
    return true;
  }

  /// Back-substitutes to reduced row-echelon form.
  void reduce() {
    if (reduced_) return;
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      SparseRow& row = it->second;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t k = 1; k < row.size(); ++k) {
          auto p = pivots_.find(row[k].col);
          if (p == pivots_.end()) continue;
          const Scalar f = row[k].value;
          row = axpy_sub(row, f, p->second);
          changed = true;
          break;
        }
      }
    }
    reduced_ = true;
  }

  /// Pivot column -> reduced row. Call reduce() first for RREF rows.
  const std::map<std::size_t, SparseRow>& pivot_rows() const { return pivots_; }

  std::vector<std::size_t> pivot_cols() const {
    std::vector<std::size_t> out;
    out.reserve(pivots_.size());
    for (const auto& [c, r] : pivots_) out.push_back(c);
    return out;
  }

  std::vector<std::size_t> free_cols() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < width_; ++c)
      if (!pivots_.contains(c)) out.push_back(c);
    return out;
  }

  /// Dense RREF with rows ordered by pivot column.
  Matrix to_dense() {
    reduce();
    Matrix m(pivots_.size(), width_);
    std::size_t r = 0;
    for (const auto& [c, row] : pivots_) {
      for (const auto& e : row) m(r, e.col) = e.value;
      ++r;
    }
    return m;
  }

 private:
  std::size_t width_;
  std::map<std::size_t, SparseRow> pivots_;
  bool reduced_ = true;
};

/// Kernel of a constraint system in the canonical free-variable form.
/// Coordinates of a kernel vector are its entries at the free positions.
class SparseKernel {
 public:
  SparseKernel() = default;

  explicit SparseKernel(SparseEchelon echelon) : width_(echelon.width()) {
    echelon.reduce();
    free_ = echelon.free_cols();
    free_index_.assign(width_, npos);
    for (std::size_t k = 0; k < free_.size(); ++k) free_index_[free_[k]] = k;
    columns_.assign(free_.size(), SparseRow{});
    // basis column for free f: 1 at f, -row[f] at each pivot.
    std::vector<std::vector<SparseEntry>> cols(free_.size());
    for (const auto& [p, row] : echelon.pivot_rows())
      for (std::size_t k = 1; k < row.size(); ++k) cols[free_index_[row[k].col]].push_back({p, -row[k].value});
    for (std::size_t k = 0; k < free_.size(); ++k) {
      cols[k].push_back({free_[k], Scalar(1)});
      std::sort(cols[k].begin(), cols[k].end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
      columns_[k] = std::move(cols[k]);
    }
  }

  std::size_t width() const { return width_; }
  std::size_t dim() const { return free_.size(); }
  const std::vector<std::size_t>& free_positions() const { return free_; }
  const SparseRow& sparse_column(std::size_t k) const { return columns_[k]; }

  Vector column(std::size_t k) const {
    Vector v(width_, Scalar(0));
    for (const auto& e : columns_[k]) v[e.col] = e.value;
    return v;
  }

  Matrix matrix() const {
    Matrix m(width_, dim());
    for (std::size_t k = 0; k < dim(); ++k)
      for (const auto& e : columns_[k]) m(e.col, k) = e.value;
    return m;
  }

  Vector coordinates(std::span<const Scalar> v) const {
    require(v.size() == width_, "SparseKernel::coordinates: length mismatch");
    Vector c(dim());
    for (std::size_t k = 0; k < dim(); ++k) c[k] = v[free_[k]];
    return c;
  }

  Vector combine(std::span<const Scalar> coords) const {
    require(coords.size() == dim(), "SparseKernel::combine: length mismatch");
    Vector v(width_, Scalar(0));
    for (std::size_t k = 0; k < dim(); ++k) {
      if (sgn(coords[k]) == 0) continue;
      for (const auto& e : columns_[k]) v[e.col] += coords[k] * e.value;
    }
    return v;
  }

  /// Exact membership: v lies in the kernel iff it equals the combination of
  /// basis columns weighted by its own free-position entries.
  bool contains(std::span<const Scalar> v) const {
    if (v.size() != width_) return false;
    const Vector r = combine(coordinates(v));
    return std::equal(r.begin(), r.end(), v.begin());
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t width_ = 0;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> free_index_;
  std::vector<SparseRow> columns_;
};

/// Rank of a family of dense vectors.
inline std::size_t rank_of_vectors(const std::vector<Vector>& vs, std::size_t width) {
  SparseEchelon e(width);
  for (const auto& v : vs) e.insert_dense(v);
  return e.rank();
}

}  // namespace homlts
