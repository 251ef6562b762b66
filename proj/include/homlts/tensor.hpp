#pragma once

// Flattened multilinear maps T^{⊗k} -> V, row-major with the first argument
// most significant and the output component least significant.

#include "homlts/exactlin.hpp"

#include <limits>

namespace homlts {

using IndexTuple = std::vector<std::size_t>;

/// n^k, or nullopt on overflow.
inline std::optional<std::size_t> checked_pow(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (n != 0 && r > std::numeric_limits<std::size_t>::max() / n) return std::nullopt;
    r *= n;
  }
  return r;
}

inline std::size_t ipow(std::size_t n, std::size_t k) {
  auto r = checked_pow(n, k);
  require(r.has_value(), "tensor size overflow");
  return *r;
}

/// Index arithmetic for a k-linear map from an n-dimensional space into an
/// m-dimensional space.
struct TensorShape {
  std::size_t n = 0;  // argument space dimension
  std::size_t arity = 0;
  std::size_t m = 0;  // value space dimension

  std::size_t tuples() const { return ipow(n, arity); }
  std::size_t size() const { return tuples() * m; }

  std::size_t tuple_index(std::span<const std::size_t> t) const {
    std::size_t idx = 0;
    for (auto i : t) idx = idx * n + i;
    return idx;
  }
  std::size_t index(std::span<const std::size_t> t, std::size_t p) const { return tuple_index(t) * m + p; }

  IndexTuple tuple_of(std::size_t tuple_idx) const {
    IndexTuple t(arity);
    for (std::size_t s = arity; s-- > 0;) {
      t[s] = tuple_idx % n;
      tuple_idx /= n;
    }
    return t;
  }
};

/// Calls fn(tuple) for every tuple in {0..n-1}^k in lexicographic order.
template <class Fn>
void for_each_tuple(std::size_t n, std::size_t k, Fn&& fn) {
  IndexTuple t(k, 0);
  if (k > 0 && n == 0) return;
  while (true) {
    fn(static_cast<const IndexTuple&>(t));
    std::size_t s = k;
    while (s > 0) {
      --s;
      if (++t[s] < n) break;
      t[s] = 0;
      if (s == 0) return;
    }
    if (k == 0) return;
  }
}

/// Evaluates a k-linear map (flattened per TensorShape) on vector arguments.
/// Skips zero coordinates, so sparse arguments are cheap.
inline Vector eval_multilinear(std::span<const Scalar> coeffs, const TensorShape& shape,
                               const std::vector<Vector>& args) {
  require(args.size() == shape.arity, "eval_multilinear: wrong number of arguments");
  for (const auto& a : args) require(a.size() == shape.n, "eval_multilinear: argument length mismatch");
  Vector out(shape.m, Scalar(0));
  std::vector<std::vector<std::pair<std::size_t, const Scalar*>>> nz(args.size());
  for (std::size_t s = 0; s < args.size(); ++s) {
    for (std::size_t i = 0; i < shape.n; ++i)
      if (sgn(args[s][i]) != 0) nz[s].push_back({i, &args[s][i]});
    if (nz[s].empty()) return out;
  }
  std::vector<std::size_t> pos(args.size(), 0);
  while (true) {
    Scalar w = 1;
    std::size_t idx = 0;
    for (std::size_t s = 0; s < args.size(); ++s) {
      w *= *nz[s][pos[s]].second;
      idx = idx * shape.n + nz[s][pos[s]].first;
    }
    const std::size_t base = idx * shape.m;
    for (std::size_t p = 0; p < shape.m; ++p) {
      const Scalar& c = coeffs[base + p];
      if (sgn(c) != 0) out[p] += w * c;
    }
    std::size_t s = args.size();
    while (s > 0) {
      --s;
      if (++pos[s] < nz[s].size()) break;
      pos[s] = 0;
      if (s == 0) return out;
    }
    if (args.empty()) return out;
  }
}

inline Vector add(Vector a, std::span<const Scalar> b) {
  require(a.size() == b.size(), "vector add: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vector sub(Vector a, std::span<const Scalar> b) {
  require(a.size() == b.size(), "vector sub: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vector scale(Vector a, const Scalar& s) {
  for (auto& x : a) x *= s;
  return a;
}

inline void axpy(Vector& y, const Scalar& a, std::span<const Scalar> x) {
  require(y.size() == x.size(), "axpy: length mismatch");
  if (sgn(a) == 0) return;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (sgn(x[i]) != 0) y[i] += a * x[i];
}

}  // namespace homlts
