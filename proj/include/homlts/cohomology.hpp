#pragma once

// The (equivariant) cochain complex C^{2n+1}(T; V) of a Hom Lie triple system
// with coefficients in a representation: cochain spaces as nullspaces of
// explicit constraint systems, the coboundary as a sparse linear operator,
// and cohomology dimensions from exact ranks.

#include "homlts/structures.hpp"

#include <cstdint>
#include <iomanip>

namespace homlts {

struct SizeLimits {
  std::size_t max_tensor_entries = 200000;
};

namespace detail {

class Fnv1a {
 public:
  void bytes(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 1099511628211ull;
    }
    h_ ^= 0xff;
    h_ *= 1099511628211ull;
  }
  void scalar(const Scalar& s) { bytes(s.get_str()); }
  void vec(const Vector& v) {
    number(v.size());
    for (const auto& s : v) scalar(s);
  }
  void matrix(const Matrix& m) {
    number(m.rows());
    number(m.cols());
    for (const auto& s : m.entries()) scalar(s);
  }
  void number(std::uint64_t x) { bytes(std::to_string(x)); }
  std::string hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h_;
    return os.str();
  }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

}  // namespace detail

class ComplexContext {
 public:
  /// Coefficients in an arbitrary representation. Verifies the representation
  /// (and, when present, both actions and the G-module identity).
  static ComplexContext create(HomLts t, Representation rep, std::optional<GroupAction> act_t,
                               std::optional<GroupAction> act_v, bool equivariant) {
    require(act_t.has_value() == act_v.has_value(), "ComplexContext: supply both actions or neither");
    require(!equivariant || act_t.has_value(), "ComplexContext: equivariant complex needs group actions");
    const auto base = verify_hom_lts(t);
    require(base.passed(), "ComplexContext: T is not a Hom-Lts (" + base.summary() + ")");
    if (act_t) {
      const auto a = verify_group_action(*act_t, t);
      require(a.passed(), "ComplexContext: action on T does not verify (" + a.summary() + ")");
    }
    const auto r = verify_representation(t, rep, act_t, act_v);
    require(r.passed(), "ComplexContext: representation does not verify (" + r.summary() + ")");
    ComplexContext c;
    c.t_ = std::move(t);
    c.rep_ = std::move(rep);
    c.act_t_ = std::move(act_t);
    c.act_v_ = std::move(act_v);
    c.equivariant_ = equivariant;
    return c;
  }

  /// V = T, A = alpha, theta(a, b) x = [x a b].
  static ComplexContext adjoint(HomLts t, std::optional<GroupAction> act, bool equivariant) {
    Representation rep = adjoint_representation(t);
    std::optional<GroupAction> act_v = act;
    return create(std::move(t), std::move(rep), std::move(act), std::move(act_v), equivariant);
  }

  ComplexContext with_equivariant(bool eq) const {
    require(!eq || act_t_.has_value(), "ComplexContext: equivariant complex needs group actions");
    ComplexContext c = *this;
    c.equivariant_ = eq;
    return c;
  }

  const HomLts& lts() const { return t_; }
  const Representation& rep() const { return rep_; }
  const std::optional<GroupAction>& act_t() const { return act_t_; }
  const std::optional<GroupAction>& act_v() const { return act_v_; }
  bool equivariant() const { return equivariant_; }
  bool has_action() const { return act_t_.has_value(); }
  std::size_t n() const { return t_.dim(); }
  std::size_t m() const { return rep_.target_dim(); }

  std::string fingerprint() const {
    detail::Fnv1a h;
    h.number(n());
    h.number(m());
    h.vec(t_.structure_constants());
    h.matrix(t_.twist());
    h.vec(rep_.theta_tensor());
    h.matrix(rep_.a_twist());
    h.number(equivariant_ ? 1 : 0);
    if (act_t_) {
      for (auto c : act_t_->group().cayley()) h.number(c);
      for (const auto& g : act_t_->matrices()) h.matrix(g);
      for (const auto& g : act_v_->matrices()) h.matrix(g);
    }
    return h.hex();
  }

 private:
  ComplexContext() = default;
  HomLts t_;
  Representation rep_;
  std::optional<GroupAction> act_t_;
  std::optional<GroupAction> act_v_;
  bool equivariant_ = false;
};

/// A (2n+1)-linear map T^{⊗(2n+1)} -> V stored as a flattened coefficient
/// tensor (first argument most significant, output component last).
struct Cochain {
  std::size_t degree = 1;
  std::size_t n = 0;
  std::size_t m = 0;
  Vector coeffs;

  static Cochain zero(std::size_t degree, std::size_t n, std::size_t m) {
    return {degree, n, m, Vector(ipow(n, degree) * m, Scalar(0))};
  }
  static Cochain zero(const ComplexContext& ctx, std::size_t degree) { return zero(degree, ctx.n(), ctx.m()); }

  TensorShape shape() const { return {n, degree, m}; }
  std::size_t size() const { return coeffs.size(); }

  std::span<const Scalar> value(std::span<const std::size_t> tuple) const {
    return {coeffs.data() + shape().tuple_index(tuple) * m, m};
  }

  Vector eval(const std::vector<Vector>& args) const { return eval_multilinear(coeffs, shape(), args); }

  bool is_zero() const { return homlts::is_zero(coeffs); }

  friend bool operator==(const Cochain& a, const Cochain& b) {
    return a.degree == b.degree && a.n == b.n && a.m == b.m && a.coeffs == b.coeffs;
  }
  friend Cochain operator+(Cochain a, const Cochain& b) {
    require(a.shape().size() == b.shape().size() && a.degree == b.degree, "Cochain sum: shape mismatch");
    a.coeffs = add(std::move(a.coeffs), b.coeffs);
    return a;
  }
  friend Cochain operator-(Cochain a, const Cochain& b) {
    require(a.shape().size() == b.shape().size() && a.degree == b.degree, "Cochain difference: shape mismatch");
    a.coeffs = sub(std::move(a.coeffs), b.coeffs);
    return a;
  }
  friend Cochain operator*(const Scalar& s, Cochain a) {
    a.coeffs = scale(std::move(a.coeffs), s);
    return a;
  }
};

inline void check_size_cap(const ComplexContext& ctx, std::size_t degree, const SizeLimits& limits) {
  const auto p = checked_pow(ctx.n(), degree);
  const bool over = !p || *p > limits.max_tensor_entries / std::max<std::size_t>(ctx.m(), 1) ||
                    *p * ctx.m() > limits.max_tensor_entries;
  if (over) {
    std::ostringstream os;
    os << "size cap exceeded: n_T^degree * dim V = " << ctx.n() << "^" << degree << " * " << ctx.m();
    if (p) os << " = " << *p * ctx.m();
    os << " > " << limits.max_tensor_entries;
    throw SizeCapExceeded(os.str());
  }
}

namespace detail {

inline void check_shape(const ComplexContext& ctx, const Cochain& f) {
  require(f.degree % 2 == 1, "cochain degree must be odd");
  require(f.n == ctx.n() && f.m == ctx.m(), "cochain dimensions do not match the context");
  require(f.coeffs.size() == ipow(ctx.n(), f.degree) * ctx.m(), "cochain coefficient tensor has the wrong size");
}

/// Nonzero entries of each column of a square matrix.
inline std::vector<std::vector<std::pair<std::size_t, Scalar>>> column_support(const Matrix& a) {
  std::vector<std::vector<std::pair<std::size_t, Scalar>>> out(a.cols());
  for (std::size_t c = 0; c < a.cols(); ++c)
    for (std::size_t r = 0; r < a.rows(); ++r)
      if (sgn(a(r, c)) != 0) out[c].push_back({r, a(r, c)});
  return out;
}

/// Calls fn(J, w) for every tuple J with nonzero weight prod_s args[s][J_s].
template <class Fn>
void for_each_product(const std::vector<const std::vector<std::pair<std::size_t, Scalar>>*>& args, Fn&& fn) {
  const std::size_t k = args.size();
  for (const auto* a : args)
    if (a->empty()) return;
  std::vector<std::size_t> pos(k, 0);
  IndexTuple tuple(k);
  while (true) {
    Scalar w = 1;
    for (std::size_t s = 0; s < k; ++s) {
      const auto& e = (*args[s])[pos[s]];
      tuple[s] = e.first;
      w *= e.second;
    }
    fn(static_cast<const IndexTuple&>(tuple), w);
    std::size_t s = k;
    while (s > 0) {
      --s;
      if (++pos[s] < args[s]->size()) break;
      pos[s] = 0;
      if (s == 0) return;
    }
    if (k == 0) return;
  }
}

}  // namespace detail

/// Checks the cochain conditions on basis tuples: twist compatibility with
/// alpha on every argument, alternation and the cyclic identity in the last
/// three slots (degree >= 3), and g-invariance when the context is equivariant.
inline VerificationReport is_cochain(const ComplexContext& ctx, const Cochain& f) {
  detail::check_shape(ctx, f);
  VerificationReport rep;
  const std::size_t n = ctx.n(), m = ctx.m(), deg = f.degree;
  const Matrix& A = ctx.rep().a_twist();
  std::vector<Vector> al(n);
  for (std::size_t i = 0; i < n; ++i) al[i] = ctx.lts().alpha_basis(i);

  for_each_tuple(n, deg, [&](const IndexTuple& t) {
    Vector lhs = A.apply(f.value(t));
    std::vector<Vector> args(deg);
    for (std::size_t s = 0; s < deg; ++s) args[s] = al[t[s]];
    Vector rhs = f.eval(args);
    if (lhs != rhs) rep.add("twist", t, std::move(lhs), std::move(rhs));
  });

  if (deg >= 3) {
    for_each_tuple(n, deg, [&](const IndexTuple& t) {
      const std::size_t a = deg - 3, b = deg - 2, c = deg - 1;
      if (t[a] == t[b]) {
        if (!is_zero(f.value(t))) rep.add("alternating", t, Vector(f.value(t).begin(), f.value(t).end()), zero_vector(m));
      } else if (t[a] < t[b]) {
        IndexTuple s = t;
        std::swap(s[a], s[b]);
        Vector sum = add(Vector(f.value(t).begin(), f.value(t).end()), f.value(s));
        if (!is_zero(sum))
          rep.add("alternating", t, Vector(f.value(t).begin(), f.value(t).end()),
                  scale(Vector(f.value(s).begin(), f.value(s).end()), -1));
      }
      IndexTuple t2 = t, t3 = t;
      t2[a] = t[b], t2[b] = t[c], t2[c] = t[a];
      t3[a] = t[c], t3[b] = t[a], t3[c] = t[b];
      Vector cyc = add(add(Vector(f.value(t).begin(), f.value(t).end()), f.value(t2)), f.value(t3));
      if (!is_zero(cyc)) rep.add("cyclic", t, std::move(cyc), zero_vector(m));
    });
  }

  if (ctx.equivariant()) {
    const auto& gt = *ctx.act_t();
    const auto& gv = *ctx.act_v();
    for (std::size_t g = 0; g < gt.group().order(); ++g) {
      if (g == gt.group().identity()) continue;
      std::vector<Vector> ge(n);
      for (std::size_t i = 0; i < n; ++i) ge[i] = gt.matrix(g).column(i);
      for_each_tuple(n, deg, [&](const IndexTuple& t) {
        std::vector<Vector> args(deg);
        for (std::size_t s = 0; s < deg; ++s) args[s] = ge[t[s]];
        Vector lhs = f.eval(args);
        Vector rhs = gv.matrix(g).apply(f.value(t));
        if (lhs != rhs) {
          IndexTuple tag{g};
          tag.insert(tag.end(), t.begin(), t.end());
          rep.add("invariance", std::move(tag), std::move(lhs), std::move(rhs));
        }
      });
    }
  }
  return rep;
}

/// Canonical basis of C^{degree}: the nullspace of the stacked constraint
/// system, with coordinates read off at the free positions.
class CochainBasis {
 public:
  CochainBasis(std::size_t degree, std::size_t n, std::size_t m, SparseKernel kernel, std::string fingerprint)
      : degree_(degree), n_(n), m_(m), kernel_(std::move(kernel)), fingerprint_(std::move(fingerprint)) {}

  std::size_t degree() const { return degree_; }
  std::size_t dim() const { return kernel_.dim(); }
  std::size_t raw_size() const { return kernel_.width(); }
  const std::string& fingerprint() const { return fingerprint_; }
  const SparseKernel& kernel() const { return kernel_; }

  /// Columns are coefficient tensors of the basis cochains.
  Matrix matrix() const { return kernel_.matrix(); }

  Cochain column(std::size_t j) const { return {degree_, n_, m_, kernel_.column(j)}; }
  Vector coordinates(const Cochain& f) const { return kernel_.coordinates(f.coeffs); }
  Cochain combine(std::span<const Scalar> coords) const { return {degree_, n_, m_, kernel_.combine(coords)}; }
  bool contains(const Cochain& f) const {
    return f.degree == degree_ && f.n == n_ && f.m == m_ && kernel_.contains(f.coeffs);
  }

 private:
  std::size_t degree_;
  std::size_t n_, m_;
  SparseKernel kernel_;
  std::string fingerprint_;
};

/// Appends every cochain-condition constraint row for the given degree.
inline SparseEchelon cochain_constraints(const ComplexContext& ctx, std::size_t deg) {
  const std::size_t n = ctx.n(), m = ctx.m();
  const TensorShape sh{n, deg, m};
  SparseEchelon ech(sh.size());
  if (sh.size() == 0) return ech;
  SparseRowBuilder b;

  if (deg >= 3) {
    for_each_tuple(n, deg, [&](const IndexTuple& t) {
      const std::size_t a = deg - 3, bb = deg - 2, c = deg - 1;
      for (std::size_t p = 0; p < m; ++p) {
        if (t[a] == t[bb]) {
          ech.insert({{sh.index(t, p), Scalar(1)}});
        } else if (t[a] < t[bb]) {
          IndexTuple s = t;
          std::swap(s[a], s[bb]);
          b.add(sh.index(t, p), 1);
          b.add(sh.index(s, p), 1);
          ech.insert(b.take());
        }
        IndexTuple t2 = t, t3 = t;
        t2[a] = t[bb], t2[bb] = t[c], t2[c] = t[a];
        t3[a] = t[c], t3[bb] = t[a], t3[c] = t[bb];
        b.add(sh.index(t, p), 1);
        b.add(sh.index(t2, p), 1);
        b.add(sh.index(t3, p), 1);
        ech.insert(b.take());
      }
    });
  }

  // A f(e_I) - f(alpha e_I) = 0 ; f(g e_I) - g f(e_I) = 0
  auto twist_like = [&](const Matrix& on_v, const Matrix& on_t, bool v_side_positive) {
    const auto cols = detail::column_support(on_t);
    for_each_tuple(n, deg, [&](const IndexTuple& t) {
      std::vector<const std::vector<std::pair<std::size_t, Scalar>>*> args(deg);
      for (std::size_t s = 0; s < deg; ++s) args[s] = &cols[t[s]];
      for (std::size_t p = 0; p < m; ++p) {
        const Scalar sv = v_side_positive ? 1 : -1;
        for (std::size_t q = 0; q < m; ++q)
          if (sgn(on_v(p, q)) != 0) b.add(sh.index(t, q), sv * on_v(p, q));
        detail::for_each_product(args, [&](const IndexTuple& j, const Scalar& w) { b.add(sh.index(j, p), -sv * w); });
        ech.insert(b.take());
      }
    });
  };
  twist_like(ctx.rep().a_twist(), ctx.lts().twist(), true);
  if (ctx.equivariant()) {
    const auto& gt = *ctx.act_t();
    for (std::size_t g = 0; g < gt.group().order(); ++g) {
      if (g == gt.group().identity()) continue;
      twist_like(ctx.act_v()->matrix(g), gt.matrix(g), false);
    }
  }
  return ech;
}

inline CochainBasis cochain_basis(const ComplexContext& ctx, std::size_t degree, const SizeLimits& limits = {}) {
  require(degree % 2 == 1, "cochain_basis: degree must be odd and >= 1");
  check_size_cap(ctx, degree, limits);
  detail::Fnv1a h;
  h.bytes(ctx.fingerprint());
  h.number(degree);
  h.number(limits.max_tensor_entries);
  return CochainBasis(degree, ctx.n(), ctx.m(), SparseKernel(cochain_constraints(ctx, degree)), h.hex());
}

/// The coboundary delta: C^{d} -> C^{d+2} as a sparse matrix on raw
/// coefficient tensors, assembled term by term from the defining formula
///
///   delta f(x_1..x_{2n+1}) = theta(a^{n-1}x_{2n}, a^{n-1}x_{2n+1}) f(x_1..x_{2n-1})
///     - theta(a^{n-1}x_{2n-1}, a^{n-1}x_{2n+1}) f(x_1..x_{2n-2}, x_{2n})
///     + sum_k (-1)^{k+n} D(a^{n-1}x_{2k-1}, a^{n-1}x_{2k}) f(.. omit x_{2k-1}, x_{2k} ..)
///     + sum_k sum_{j>2k} (-1)^{n+k+1} f(a x_1, .., [x_{2k-1} x_{2k} x_j], .., a x_{2n+1})
///
/// where d = 2n-1, a = alpha, and D(x, y) = theta(y, x) - theta(x, y).
class CoboundaryOperator {
 public:
  CoboundaryOperator(const ComplexContext& ctx, std::size_t source_degree, const SizeLimits& limits = {})
      : source_degree_(source_degree), n_(ctx.n()), m_(ctx.m()) {
    require(source_degree % 2 == 1, "coboundary: source degree must be odd");
    check_size_cap(ctx, source_degree + 2, limits);
    const std::size_t nn = (source_degree + 1) / 2;  // delta^{2nn-1}
    const std::size_t deg_out = 2 * nn + 1;
    const std::size_t N = n_, M = m_;
    const HomLts& t = ctx.lts();
    const Representation& rep = ctx.rep();

    Matrix apow = Matrix::identity(N);
    for (std::size_t i = 0; i + 1 < nn; ++i) apow = t.twist() * apow;
    std::vector<Vector> ap(N);
    for (std::size_t i = 0; i < N; ++i) ap[i] = apow.column(i);
    std::vector<Matrix> th(N * N), dd(N * N);
    for (std::size_t x = 0; x < N; ++x)
      for (std::size_t y = 0; y < N; ++y) th[x * N + y] = rep.theta(ap[x], ap[y]);
    for (std::size_t x = 0; x < N; ++x)
      for (std::size_t y = 0; y < N; ++y) dd[x * N + y] = th[y * N + x] - th[x * N + y];

    const auto acols = detail::column_support(t.twist());
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> brs(N * N * N);
    for_each_tuple(N, 3, [&](const IndexTuple& q) {
      auto v = t.basis_bracket(q[0], q[1], q[2]);
      for (std::size_t l = 0; l < N; ++l)
        if (sgn(v[l]) != 0) brs[(q[0] * N + q[1]) * N + q[2]].push_back({l, v[l]});
    });

    const TensorShape in{N, source_degree, M};
    const TensorShape out{N, deg_out, M};
    rows_.resize(out.size());
    SparseRowBuilder b;
    IndexTuple sub(source_degree);
    auto sign = [](std::size_t e) { return e % 2 == 0 ? Scalar(1) : Scalar(-1); };

    for_each_tuple(N, deg_out, [&](const IndexTuple& x) {
      // 0-based: x_{2n} = x[2nn-1], x_{2n+1} = x[2nn], x_{2n-1} = x[2nn-2]
      for (std::size_t p = 0; p < M; ++p) {
        {
          const Matrix& T1 = th[x[2 * nn - 1] * N + x[2 * nn]];
          for (std::size_t s = 0; s < source_degree; ++s) sub[s] = x[s];
          for (std::size_t q = 0; q < M; ++q)
            if (sgn(T1(p, q)) != 0) b.add(in.index(sub, q), T1(p, q));
        }
        {
          const Matrix& T2 = th[x[2 * nn - 2] * N + x[2 * nn]];
          for (std::size_t s = 0; s + 1 < source_degree; ++s) sub[s] = x[s];
          sub[source_degree - 1] = x[2 * nn - 1];
          for (std::size_t q = 0; q < M; ++q)
            if (sgn(T2(p, q)) != 0) b.add(in.index(sub, q), -T2(p, q));
        }
        for (std::size_t k = 1; k <= nn; ++k) {
          const Matrix& Dk = dd[x[2 * k - 2] * N + x[2 * k - 1]];
          const Scalar sg = sign(k + nn);
          std::size_t w = 0;
          for (std::size_t s = 0; s < deg_out; ++s)
            if (s != 2 * k - 2 && s != 2 * k - 1) sub[w++] = x[s];
          for (std::size_t q = 0; q < M; ++q)
            if (sgn(Dk(p, q)) != 0) b.add(in.index(sub, q), sg * Dk(p, q));
        }
        for (std::size_t k = 1; k <= nn; ++k) {
          const Scalar sg = sign(nn + k + 1);
          for (std::size_t j0 = 2 * k; j0 <= 2 * nn; ++j0) {
            std::vector<const std::vector<std::pair<std::size_t, Scalar>>*> args;
            args.reserve(source_degree);
            for (std::size_t s = 0; s < deg_out; ++s) {
              if (s == 2 * k - 2 || s == 2 * k - 1) continue;
              if (s == j0)
                args.push_back(&brs[(x[2 * k - 2] * N + x[2 * k - 1]) * N + x[j0]]);
              else
                args.push_back(&acols[x[s]]);
            }
            detail::for_each_product(args, [&](const IndexTuple& jt, const Scalar& wgt) {
              b.add(in.index(jt, p), sg * wgt);
            });
          }
        }
        rows_[out.index(x, p)] = b.take();
      }
    });
  }

  std::size_t source_degree() const { return source_degree_; }
  std::size_t target_degree() const { return source_degree_ + 2; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<SparseRow>& sparse_rows() const { return rows_; }

  Vector apply_raw(std::span<const Scalar> f) const {
    require(f.size() == ipow(n_, source_degree_) * m_, "coboundary: input tensor has the wrong size");
    Vector out(rows_.size(), Scalar(0));
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const auto& e : rows_[r])
        if (sgn(f[e.col]) != 0) out[r] += e.value * f[e.col];
    return out;
  }

  Cochain apply(const Cochain& f) const {
    require(f.degree == source_degree_, "coboundary: cochain degree does not match the operator");
    return {target_degree(), n_, m_, apply_raw(f.coeffs)};
  }

 private:
  std::size_t source_degree_;
  std::size_t n_, m_;
  std::vector<SparseRow> rows_;
};

inline Cochain coboundary(const ComplexContext& ctx, const Cochain& f, const SizeLimits& limits = {}) {
  detail::check_shape(ctx, f);
  const auto r = is_cochain(ctx, f);
  require(r.passed(), "coboundary: input is not a cochain (" + r.summary() + ")");
  return CoboundaryOperator(ctx, f.degree, limits).apply(f);
}

/// Images of every basis column under the operator, as raw tensors.
inline std::vector<Vector> coboundary_images(const CochainBasis& basis, const CoboundaryOperator& op) {
  std::vector<Vector> out;
  out.reserve(basis.dim());
  for (std::size_t j = 0; j < basis.dim(); ++j) out.push_back(op.apply_raw(basis.kernel().column(j)));
  return out;
}

/// Matrix of delta^{2n-1} with respect to the canonical bases of C^{2n-1}
/// and C^{2n+1}: column j holds the target coordinates of delta(basis_j).
inline Matrix coboundary_matrix(const ComplexContext& ctx, std::size_t n, const SizeLimits& limits = {}) {
  require(n >= 1, "coboundary_matrix: n must be >= 1");
  const auto src = cochain_basis(ctx, 2 * n - 1, limits);
  const auto tgt = cochain_basis(ctx, 2 * n + 1, limits);
  const CoboundaryOperator op(ctx, 2 * n - 1, limits);
  Matrix out(tgt.dim(), src.dim());
  for (std::size_t j = 0; j < src.dim(); ++j) {
    const Cochain img = op.apply(src.column(j));
    if (!tgt.contains(img))
      throw ConsistencyError("coboundary_matrix: image of basis cochain " + std::to_string(j) +
                             " lies outside the target cochain space");
    const Vector c = tgt.coordinates(img);
    for (std::size_t i = 0; i < tgt.dim(); ++i) out(i, j) = c[i];
  }
  return out;
}

struct CohomologyDims {
  std::size_t degree = 0;
  std::size_t cochains = 0;  // dim C^degree
  std::size_t z = 0;         // dim ker delta
  std::size_t b = 0;         // dim im delta into this degree
  std::size_t h = 0;
};

/// z = dim ker(delta^{degree}), b = dim im(delta^{degree-2}), h = z - b.
/// Degree 1 has no incoming differential (b = 0).
inline CohomologyDims cohomology_dims(const ComplexContext& ctx, std::size_t degree, const SizeLimits& limits = {}) {
  require(degree % 2 == 1, "cohomology_dims: degree must be odd");
  check_size_cap(ctx, degree + 2, limits);
  CohomologyDims d;
  d.degree = degree;
  const auto basis = cochain_basis(ctx, degree, limits);
  d.cochains = basis.dim();
  {
    const CoboundaryOperator op(ctx, degree, limits);
    SparseEchelon e(op.rows());
    for (std::size_t j = 0; j < basis.dim(); ++j) e.insert_dense(op.apply_raw(basis.kernel().column(j)));
    d.z = basis.dim() - e.rank();
  }
  if (degree >= 3) {
    const auto prev = cochain_basis(ctx, degree - 2, limits);
    const CoboundaryOperator op(ctx, degree - 2, limits);
    SparseEchelon e(op.rows());
    for (std::size_t j = 0; j < prev.dim(); ++j) e.insert_dense(op.apply_raw(prev.kernel().column(j)));
    d.b = e.rank();
  }
  if (d.b > d.z) throw ConsistencyError("cohomology_dims: im delta is larger than ker delta");
  d.h = d.z - d.b;
  return d;
}

/// Solves delta(w) = f over C^{degree-2}; returns the canonical witness or
/// nullopt when f is not a coboundary.
inline std::optional<Cochain> coboundary_membership(const ComplexContext& ctx, const Cochain& f,
                                                    const SizeLimits& limits = {}) {
  detail::check_shape(ctx, f);
  require(f.degree >= 3, "coboundary_membership: degree must be >= 3");
  const auto tgt = cochain_basis(ctx, f.degree, limits);
  require(tgt.contains(f), "coboundary_membership: input is not a cochain in this complex");
  const auto src = cochain_basis(ctx, f.degree - 2, limits);
  const CoboundaryOperator op(ctx, f.degree - 2, limits);
  const auto& freep = tgt.kernel().free_positions();
  Matrix a(freep.size(), src.dim());
  for (std::size_t j = 0; j < src.dim(); ++j) {
    const Vector img = op.apply_raw(src.kernel().column(j));
    for (std::size_t i = 0; i < freep.size(); ++i) a(i, j) = img[freep[i]];
  }
  const auto y = solve_linear(a, tgt.coordinates(f));
  if (!y) return std::nullopt;
  Cochain w = src.combine(*y);
  if (!(op.apply(w) == f)) throw ConsistencyError("coboundary_membership: witness does not reproduce the target");
  return w;
}

/// Coordinates of the class of a cocycle f in a fixed basis of
/// H^{degree} = ker delta / im delta. The basis is chosen greedily: the
/// canonical kernel basis vectors of delta that are independent modulo
/// im delta, in order.
struct CohomologyClass {
  std::size_t degree = 0;
  std::size_t dim = 0;  // dim H
  Vector coords;
  bool is_zero() const { return homlts::is_zero(coords); }
};

inline CohomologyClass cohomology_class(const ComplexContext& ctx, const Cochain& f, const SizeLimits& limits = {}) {
  detail::check_shape(ctx, f);
  require(f.degree >= 3, "cohomology_class: degree must be >= 3");
  const std::size_t nn = (f.degree + 1) / 2;  // f = 2nn-1: source of delta^{2nn-1}, target of delta^{2nn-3}
  const auto basis = cochain_basis(ctx, f.degree, limits);
  require(basis.contains(f), "cohomology_class: input is not a cochain in this complex");
  const Matrix out = coboundary_matrix(ctx, nn, limits);
  const Vector fc = basis.coordinates(f);
  if (!is_zero(out.apply(fc))) throw ContractViolation("cohomology_class: input is not a cocycle");
  const Matrix in = coboundary_matrix(ctx, nn - 1, limits);
  const Matrix z = nullspace_basis(out);

  std::vector<Vector> cols;
  SparseEchelon span(basis.dim());
  for (std::size_t j = 0; j < in.cols(); ++j)
    if (span.insert_dense(in.column(j))) cols.push_back(in.column(j));
  const std::size_t nb = cols.size();
  for (std::size_t j = 0; j < z.cols(); ++j)
    if (span.insert_dense(z.column(j))) cols.push_back(z.column(j));
  CohomologyClass c;
  c.degree = f.degree;
  c.dim = cols.size() - nb;
  const auto x = solve_linear(Matrix::from_columns(basis.dim(), cols), fc);
  if (!x) throw ConsistencyError("cohomology_class: cocycle outside ker delta basis span");
  c.coords.assign(x->begin() + static_cast<std::ptrdiff_t>(nb), x->end());
  return c;
}

/// (1/|G|) sum_g g^{-1} f(g x_1, ..., g x_k)
inline Cochain reynolds_project(const ComplexContext& ctx, const Cochain& f) {
  detail::check_shape(ctx, f);
  require(ctx.has_action(), "reynolds_project: context has no group action");
  const auto& gt = *ctx.act_t();
  const auto& gv = *ctx.act_v();
  const auto& grp = gt.group();
  const std::size_t n = ctx.n();
  Cochain out = Cochain::zero(f.degree, n, ctx.m());
  const TensorShape sh = f.shape();
  for (std::size_t g = 0; g < grp.order(); ++g) {
    const auto gi = grp.inverse(g);
    require(gi.has_value(), "reynolds_project: group element without inverse");
    const Matrix& ginv = gv.matrix(*gi);
    std::vector<Vector> ge(n);
    for (std::size_t i = 0; i < n; ++i) ge[i] = gt.matrix(g).column(i);
    for_each_tuple(n, f.degree, [&](const IndexTuple& t) {
      std::vector<Vector> args(f.degree);
      for (std::size_t s = 0; s < f.degree; ++s) args[s] = ge[t[s]];
      const Vector v = ginv.apply(f.eval(args));
      const std::size_t base = sh.index(t, 0);
      for (std::size_t p = 0; p < ctx.m(); ++p) out.coeffs[base + p] += v[p];
    });
  }
  const Scalar inv(1, grp.order());
  for (auto& c : out.coeffs) c *= inv;
  return out;
}

}  // namespace homlts
