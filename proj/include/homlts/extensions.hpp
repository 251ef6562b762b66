#pragma once

// Equivariant central extensions 0 -> V -> T_c -> T -> 0 with an explicit
// section, their 3-cocycles, and equivalence through cohomologous cocycles.

#include "homlts/cohomology.hpp"

namespace homlts {

/// The abelian fiber (V, 0, A) with its G-action.
struct Fiber {
  std::size_t dim = 0;
  Matrix twist;
  std::optional<GroupAction> action;
};

struct CentralExtension {
  HomLts base;
  std::optional<GroupAction> base_action;
  Fiber fiber;
  HomLts total;
  Matrix incl;     // (n+m) x m
  Matrix proj;     // n x (n+m)
  Matrix section;  // (n+m) x n
  std::optional<GroupAction> action_total;
};

/// Basis (as columns) of {x : [x e_j e_k] = 0 for all j, k}.
inline Matrix center(const HomLts& t) {
  const std::size_t n = t.dim();
  Matrix sys(n * n * n, n);
  for_each_tuple(n, 4, [&](const IndexTuple& q) {
    sys((q[1] * n + q[2]) * n + q[3], q[0]) = t.coeff(q[0], q[1], q[2], q[3]);
  });
  return nullspace_basis(sys);
}

/// Complex C*(T; V) with theta = 0 and twist A on V; equivariant when the
/// base carries an action.
inline ComplexContext extension_context(const HomLts& base, const std::optional<GroupAction>& base_action,
                                        const Fiber& fiber) {
  require(fiber.twist.rows() == fiber.dim && fiber.twist.cols() == fiber.dim, "fiber twist must be dim x dim");
  require(base_action.has_value() == fiber.action.has_value(), "base and fiber must both carry an action or neither");
  const bool eq = base_action.has_value();
  return ComplexContext::create(base, Representation::zero(base.dim(), fiber.twist), base_action, fiber.action, eq);
}

namespace detail {

inline Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
  return r;
}

inline void compare_maps(VerificationReport& rep, const std::string& id, IndexTuple tag, const Matrix& l,
                         const Matrix& r) {
  if (!(l == r)) rep.add(id, std::move(tag), l.entries(), r.entries());
}

}  // namespace detail

/// T + V with [(x,a)(y,b)(z,c)] = ([xyz], h(x,y,z)), twist alpha + A,
/// action g(x,a) = (gx, ga), i(a) = (0,a), pi(x,a) = x, s(x) = (x,0).
inline CentralExtension extension_from_cocycle(const HomLts& base, const std::optional<GroupAction>& base_action,
                                               const Fiber& fiber, const Cochain& h) {
  const ComplexContext ctx = extension_context(base, base_action, fiber);
  require(h.degree == 3 && h.n == base.dim() && h.m == fiber.dim, "extension_from_cocycle: h has the wrong shape");
  const auto cc = is_cochain(ctx, h);
  if (!cc.passed()) throw HypothesisError("cochain", "h is not an (equivariant) 3-cochain: " + cc.summary());
  const Cochain dh = CoboundaryOperator(ctx, 3).apply(h);
  if (!dh.is_zero()) {
    const TensorShape sh = dh.shape();
    for (std::size_t idx = 0; idx < dh.coeffs.size(); ++idx) {
      if (sgn(dh.coeffs[idx]) == 0) continue;
      const IndexTuple t = sh.tuple_of(idx / sh.m);
      std::ostringstream os;
      os << "delta h(e" << t[0] + 1 << ",e" << t[1] + 1 << ",e" << t[2] + 1 << ",e" << t[3] + 1 << ",e" << t[4] + 1
         << ") has component " << dh.coeffs[idx] << " on v" << idx % sh.m + 1;
      throw HypothesisError("cocycle", os.str());
    }
  }

  const std::size_t n = base.dim(), m = fiber.dim, N = n + m;
  Vector c(ipow(N, 4), Scalar(0));
  for_each_tuple(n, 3, [&](const IndexTuple& t) {
    const std::size_t row = ((t[0] * N + t[1]) * N + t[2]) * N;
    const auto b = base.basis_bracket(t[0], t[1], t[2]);
    for (std::size_t l = 0; l < n; ++l) c[row + l] = b[l];
    const auto v = h.value(t);
    for (std::size_t p = 0; p < m; ++p) c[row + n + p] = v[p];
  });

  CentralExtension e;
  e.base = base;
  e.base_action = base_action;
  e.fiber = fiber;
  e.total = HomLts(N, std::move(c), detail::block_diag(base.twist(), fiber.twist));
  e.incl = Matrix(N, m);
  for (std::size_t p = 0; p < m; ++p) e.incl(n + p, p) = 1;
  e.proj = Matrix(n, N);
  e.section = Matrix(N, n);
  for (std::size_t i = 0; i < n; ++i) e.proj(i, i) = 1, e.section(i, i) = 1;
  if (base_action) {
    std::vector<Matrix> ms;
    for (std::size_t g = 0; g < base_action->group().order(); ++g)
      ms.push_back(detail::block_diag(base_action->matrix(g), fiber.action->matrix(g)));
    e.action_total = GroupAction(base_action->group(), N, std::move(ms));
  }
  return e;
}

inline VerificationReport verify_central_extension(const CentralExtension& e) {
  VerificationReport rep;
  const std::size_t n = e.base.dim(), m = e.fiber.dim, N = e.total.dim();
  const bool shapes_ok = N == n + m && e.incl.rows() == N && e.incl.cols() == m && e.proj.rows() == n &&
                         e.proj.cols() == N && e.section.rows() == N && e.section.cols() == n &&
                         e.fiber.twist.rows() == m && e.fiber.twist.cols() == m;
  if (!shapes_ok) {
    rep.add("shape", {n, m, N}, {}, {});
    return rep;
  }
  rep.merge(verify_hom_lts(e.base), "base.");
  rep.merge(verify_hom_lts(e.total), "total.");

  if (rank(e.incl) != m) rep.add("exact.incl-injective", {}, {Scalar(rank(e.incl))}, {Scalar(m)});
  if (rank(e.proj) != n) rep.add("exact.proj-surjective", {}, {Scalar(rank(e.proj))}, {Scalar(n)});
  // ker pi = im i: pi i = 0 and dim ker pi = N - rank pi = m = rank i
  detail::compare_maps(rep, "exact.kernel", {}, e.proj * e.incl, Matrix(n, m));

  const HomLts fiber_lts = HomLts::zero(m, e.fiber.twist);
  rep.merge(verify_morphism(e.incl, fiber_lts, e.total, "incl"));
  rep.merge(verify_morphism(e.proj, e.total, e.base, "proj"));
  detail::compare_maps(rep, "section", {}, e.proj * e.section, Matrix::identity(n));

  for (std::size_t a = 0; a < m; ++a) {
    const Vector ia = e.incl.column(a);
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        Vector v = eval_bracket(e.total, ia, unit_vector(N, j), unit_vector(N, k));
        if (!is_zero(v)) rep.add("centrality", {a, j, k}, std::move(v), zero_vector(N));
      }
  }

  const Matrix& ac = e.total.twist();
  detail::compare_maps(rep, "twist.incl", {}, ac * e.incl, e.incl * e.fiber.twist);
  detail::compare_maps(rep, "twist.proj", {}, e.base.twist() * e.proj, e.proj * ac);
  detail::compare_maps(rep, "twist.section", {}, ac * e.section, e.section * e.base.twist());

  const bool any_action = e.base_action || e.fiber.action || e.action_total;
  if (any_action) {
    if (!(e.base_action && e.fiber.action && e.action_total)) {
      rep.add("g.actions-present", {}, {}, {});
      return rep;
    }
    rep.merge(verify_group_action(*e.base_action, e.base), "base.");
    rep.merge(verify_group_action(*e.action_total, e.total), "total.");
    rep.merge(verify_linear_action(*e.fiber.action), "fiber.");
    const auto& grp = e.base_action->group();
    for (std::size_t g = 0; g < grp.order(); ++g) {
      const Matrix& gt = e.base_action->matrix(g);
      const Matrix& gv = e.fiber.action->matrix(g);
      const Matrix& gc = e.action_total->matrix(g);
      detail::compare_maps(rep, "g.fiber-twist", {g}, gv * e.fiber.twist, e.fiber.twist * gv);
      detail::compare_maps(rep, "g.incl", {g}, gc * e.incl, e.incl * gv);
      detail::compare_maps(rep, "g.proj", {g}, gt * e.proj, e.proj * gc);
      detail::compare_maps(rep, "g.section", {g}, gc * e.section, e.section * gt);
    }
  }
  return rep;
}

/// i h(x,y,z) = [s(x) s(y) s(z)]_c - s([xyz]).
inline Cochain cocycle_from_extension(const CentralExtension& e) {
  const auto r = verify_central_extension(e);
  require(r.passed(), "cocycle_from_extension: extension does not verify (" + r.summary() + ")");
  const std::size_t n = e.base.dim(), m = e.fiber.dim;
  Cochain h = Cochain::zero(3, n, m);
  std::vector<Vector> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = e.section.column(i);
  for_each_tuple(n, 3, [&](const IndexTuple& t) {
    const Vector defect = sub(eval_bracket(e.total, s[t[0]], s[t[1]], s[t[2]]),
                              e.section.apply(e.base.basis_bracket(t[0], t[1], t[2])));
    const auto a = solve_linear(e.incl, defect);
    if (!a) throw ConsistencyError("cocycle_from_extension: section defect is not in the image of i");
    const std::size_t base = h.shape().index(t, 0);
    for (std::size_t p = 0; p < m; ++p) h.coeffs[base + p] = (*a)[p];
  });
  const ComplexContext ctx = extension_context(e.base, e.base_action, e.fiber);
  if (!is_cochain(ctx, h).passed()) throw ConsistencyError("cocycle_from_extension: extracted h is not a cochain");
  if (!coboundary(ctx, h).is_zero()) throw ConsistencyError("cocycle_from_extension: extracted h is not a cocycle");
  return h;
}

/// Returns phi: T_c -> T_c' with phi i = i', pi' phi = pi, phi a G-Hom-Lts
/// isomorphism, or nullopt when the cocycles lie in different classes.
inline std::optional<Matrix> extensions_equivalent(const CentralExtension& e1, const CentralExtension& e2,
                                                   const SizeLimits& limits = {}) {
  require(e1.base == e2.base, "extensions_equivalent: different base systems");
  require(e1.fiber.dim == e2.fiber.dim && e1.fiber.twist == e2.fiber.twist,
          "extensions_equivalent: different fiber data");
  require(e1.fiber.action.has_value() == e2.fiber.action.has_value() &&
              (!e1.fiber.action || e1.fiber.action->matrices() == e2.fiber.action->matrices()),
          "extensions_equivalent: different fiber actions");
  require(e1.base_action.has_value() == e2.base_action.has_value() &&
              (!e1.base_action || e1.base_action->matrices() == e2.base_action->matrices()),
          "extensions_equivalent: different base actions");

  const Cochain h1 = cocycle_from_extension(e1);
  const Cochain h2 = cocycle_from_extension(e2);
  const ComplexContext ctx = extension_context(e1.base, e1.base_action, e1.fiber);
  const auto f = coboundary_membership(ctx, h2 - h1, limits);
  if (!f) return std::nullopt;

  // z = s x + i a  |->  s' x + i' (a - f x)
  const std::size_t n = e1.base.dim(), m = e1.fiber.dim, N = n + m;
  Matrix fm(m, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < m; ++p) fm(p, i) = f->coeffs[i * m + p];
  Matrix phi(N, N);
  for (std::size_t col = 0; col < N; ++col) {
    const Vector z = unit_vector(N, col);
    const Vector x = e1.proj.apply(z);
    const auto a = solve_linear(e1.incl, sub(z, e1.section.apply(x)));
    if (!a) throw ConsistencyError("extensions_equivalent: z - s(pi z) is not in the image of i");
    const Vector img = add(e2.section.apply(x), e2.incl.apply(sub(*a, fm.apply(x))));
    for (std::size_t r = 0; r < N; ++r) phi(r, col) = img[r];
  }

  if (!(phi * e1.incl == e2.incl)) throw ConsistencyError("extensions_equivalent: phi i != i'");
  if (!(e2.proj * phi == e1.proj)) throw ConsistencyError("extensions_equivalent: pi' phi != pi");
  if (rank(phi) != N) throw ConsistencyError("extensions_equivalent: phi is not invertible");
  if (!verify_morphism(phi, e1.total, e2.total, "phi").passed())
    throw ConsistencyError("extensions_equivalent: phi is not a Hom-Lts morphism");
  if (e1.action_total) {
    for (std::size_t g = 0; g < e1.action_total->group().order(); ++g)
      if (!(phi * e1.action_total->matrix(g) == e2.action_total->matrix(g) * phi))
        throw ConsistencyError("extensions_equivalent: phi is not G-equivariant");
  }
  return phi;
}

}  // namespace homlts
