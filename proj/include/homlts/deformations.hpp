#pragma once

// Equivariant formal deformations mu_t = sum_i mu_i t^i of a Hom-Lts,
// truncated at a finite order, in the adjoint complex C*_G(alpha)(T).

#include "homlts/cohomology.hpp"

namespace homlts {

struct Deformation {
  HomLts base;
  std::optional<GroupAction> action;
  std::vector<Vector> terms;  // mu_1 .. mu_N, each a dim^4 tensor

  std::size_t order() const { return terms.size(); }
  /// mu_0 is the base bracket.
  const Vector& mu(std::size_t r) const {
    if (r == 0) return base.structure_constants();
    require(r <= terms.size(), "Deformation::mu: index beyond order");
    return terms[r - 1];
  }
  Cochain term_cochain(std::size_t r) const { return {3, base.dim(), base.dim(), mu(r)}; }

  static Deformation zero(HomLts base, std::optional<GroupAction> action, std::size_t order) {
    const std::size_t sz = ipow(base.dim(), 4);
    return {std::move(base), std::move(action), std::vector<Vector>(order, Vector(sz, Scalar(0)))};
  }
  Deformation truncated(std::size_t order) const {
    require(order <= terms.size(), "Deformation::truncated: order beyond current order");
    return {base, action, std::vector<Vector>(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(order))};
  }
};

/// Psi_t = sum_i psi_i t^i with psi_0 = identity.
struct FormalIsomorphism {
  HomLts base;
  std::optional<GroupAction> action;
  std::vector<Matrix> maps;  // psi_1 .. psi_M

  std::size_t order() const { return maps.size(); }
  Matrix psi(std::size_t r) const {
    if (r == 0) return Matrix::identity(base.dim());
    if (r > maps.size()) return Matrix(base.dim(), base.dim());
    return maps[r - 1];
  }
  static FormalIsomorphism identity(HomLts base, std::optional<GroupAction> action, std::size_t order) {
    const std::size_t n = base.dim();
    return {std::move(base), std::move(action), std::vector<Matrix>(order, Matrix(n, n))};
  }
};

inline ComplexContext deformation_context(const HomLts& base, const std::optional<GroupAction>& action) {
  return ComplexContext::adjoint(base, action, action.has_value());
}

inline Cochain map_to_cochain(const Matrix& f) {
  Cochain c = Cochain::zero(1, f.cols(), f.rows());
  for (std::size_t i = 0; i < f.cols(); ++i)
    for (std::size_t p = 0; p < f.rows(); ++p) c.coeffs[i * f.rows() + p] = f(p, i);
  return c;
}

inline Matrix cochain_to_map(const Cochain& c) {
  require(c.degree == 1, "cochain_to_map: degree-1 cochain expected");
  Matrix f(c.m, c.n);
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t p = 0; p < c.m; ++p) f(p, i) = c.coeffs[i * c.m + p];
  return f;
}

namespace detail {

/// (a,b,c) |-> mu(A e_a, B e_b, C e_c)
inline Vector precompose(const Vector& mu, std::size_t n, const Matrix& a, const Matrix& b, const Matrix& c) {
  const TensorShape sh{n, 3, n};
  Vector out(sh.size(), Scalar(0));
  if (homlts::is_zero(mu) || a.is_zero() || b.is_zero() || c.is_zero()) return out;
  std::vector<Vector> ac(n), bc(n), cc(n);
  for (std::size_t i = 0; i < n; ++i) ac[i] = a.column(i), bc[i] = b.column(i), cc[i] = c.column(i);
  for_each_tuple(n, 3, [&](const IndexTuple& t) {
    const Vector v = eval_multilinear(mu, sh, {ac[t[0]], bc[t[1]], cc[t[2]]});
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(sh.index(t, 0)));
  });
  return out;
}

/// (a,b,c) |-> P mu(a,b,c)
inline Vector postcompose(const Matrix& p, const Vector& mu, std::size_t n) {
  Vector out(mu.size(), Scalar(0));
  for (std::size_t t = 0; t < mu.size() / n; ++t) {
    const Vector v = p.apply(std::span<const Scalar>(mu.data() + t * n, n));
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(t * n));
  }
  return out;
}

/// mu_i(alpha a, alpha b, mu_j(c,d,e)) - mu_i(mu_j(a,b,c), alpha d, alpha e)
///   - mu_i(alpha c, mu_j(a,b,d), alpha e) - mu_i(alpha c, alpha d, mu_j(a,b,e))
/// on a basis quintuple.
inline Vector convolution_term(const Vector& mi, const Vector& mj, const std::vector<Vector>& al, std::size_t n,
                               const IndexTuple& q) {
  const TensorShape sh{n, 3, n};
  auto inner = [&](std::size_t x, std::size_t y, std::size_t z) {
    const std::size_t b = sh.index(IndexTuple{x, y, z}, 0);
    return Vector(mj.begin() + static_cast<std::ptrdiff_t>(b), mj.begin() + static_cast<std::ptrdiff_t>(b + n));
  };
  const auto [a, b, c, d, e] = std::tuple{q[0], q[1], q[2], q[3], q[4]};
  Vector v = eval_multilinear(mi, sh, {al[a], al[b], inner(c, d, e)});
  v = sub(std::move(v), eval_multilinear(mi, sh, {inner(a, b, c), al[d], al[e]}));
  v = sub(std::move(v), eval_multilinear(mi, sh, {al[c], inner(a, b, d), al[e]}));
  return sub(std::move(v), eval_multilinear(mi, sh, {al[c], al[d], inner(a, b, e)}));
}

/// sum over i + j = r (i, j >= lo) of the convolution term, as a degree-5 tensor.
inline Cochain convolution(const Deformation& d, std::size_t r, std::size_t lo) {
  const std::size_t n = d.base.dim();
  Cochain out = Cochain::zero(5, n, n);
  std::vector<Vector> al(n);
  for (std::size_t i = 0; i < n; ++i) al[i] = d.base.alpha_basis(i);
  for (std::size_t i = lo; i + lo <= r; ++i) {
    const std::size_t j = r - i;
    if (homlts::is_zero(d.mu(i)) || homlts::is_zero(d.mu(j))) continue;
    for_each_tuple(n, 5, [&](const IndexTuple& q) {
      const Vector v = convolution_term(d.mu(i), d.mu(j), al, n, q);
      const std::size_t base = out.shape().index(q, 0);
      for (std::size_t p = 0; p < n; ++p) out.coeffs[base + p] += v[p];
    });
  }
  return out;
}

}  // namespace detail

/// Per order r <= r_max: the twist, alternating, cyclic and invariance
/// conditions on mu_r, and the order-r deformation equation on all basis
/// quintuples. Order 0 re-verifies the base system and its action.
inline VerificationReport verify_deformation(const Deformation& d, std::size_t r_max) {
  require(r_max <= d.order(), "verify_deformation: r_max exceeds the deformation order");
  VerificationReport rep;
  const std::size_t n = d.base.dim();
  for (const auto& t : d.terms) require(t.size() == ipow(n, 4), "verify_deformation: term has the wrong size");
  const auto base_rep = verify_hom_lts(d.base);
  rep.merge(base_rep, "order-0/");
  if (d.action) rep.merge(verify_group_action(*d.action, d.base), "order-0/");
  if (!rep.passed()) return rep;
  const ComplexContext ctx = deformation_context(d.base, d.action);
  for (std::size_t r = 1; r <= r_max; ++r) {
    const std::string prefix = "order-" + std::to_string(r) + "/";
    rep.merge(is_cochain(ctx, d.term_cochain(r)), prefix);
    const Cochain eq = detail::convolution(d, r, 0);
    const TensorShape sh = eq.shape();
    for (std::size_t t = 0; t < sh.tuples(); ++t) {
      std::span<const Scalar> v(eq.coeffs.data() + t * n, n);
      if (!is_zero(v)) rep.add(prefix + "deformation-equation", sh.tuple_of(t), Vector(v.begin(), v.end()), zero_vector(n));
    }
  }
  return rep;
}

struct Infinitesimal {
  std::size_t index = 0;
  Cochain mu;
  bool is_cocycle = false;
};

inline Infinitesimal infinitesimal(const Deformation& d, const SizeLimits& limits = {}) {
  for (std::size_t r = 1; r <= d.order(); ++r) {
    if (is_zero(d.mu(r))) continue;
    const ComplexContext ctx = deformation_context(d.base, d.action);
    Infinitesimal out{r, d.term_cochain(r), false};
    if (is_cochain(ctx, out.mu).passed()) out.is_cocycle = CoboundaryOperator(ctx, 3, limits).apply(out.mu).is_zero();
    return out;
  }
  throw ContractViolation("infinitesimal: trivial deformation, no infinitesimal");
}

struct ObstructionResult {
  std::size_t order = 0;  // n + 1
  Cochain cochain;        // F_{n+1}
  bool is_cocycle = false;
  std::optional<Cochain> witness;  // mu_{n+1} with delta mu_{n+1} = F_{n+1}
};

/// F_{n+1} = sum_{i+j=n+1, i,j>0} of the convolution term, from mu_1..mu_n.
inline ObstructionResult obstruction(const Deformation& d, std::size_t target, const SizeLimits& limits = {}) {
  require(target >= 1 && target - 1 <= d.order(), "obstruction: target order must be in 1..order+1");
  const Deformation cur = d.truncated(target - 1);
  const auto v = verify_deformation(cur, target - 1);
  require(v.passed(), "obstruction: deformation does not verify up to order " + std::to_string(target - 1) + " (" +
                          v.summary() + ")");
  const ComplexContext ctx = deformation_context(d.base, d.action);
  ObstructionResult res;
  res.order = target;
  res.cochain = detail::convolution(cur, target, 1);
  const auto cc = is_cochain(ctx, res.cochain);
  if (!cc.passed()) throw ConsistencyError("obstruction: F is not an invariant 5-cochain (" + cc.summary() + ")");
  res.is_cocycle = CoboundaryOperator(ctx, 5, limits).apply(res.cochain).is_zero();
  if (!res.is_cocycle) throw ConsistencyError("obstruction: F is not a 5-cocycle");
  res.witness = coboundary_membership(ctx, res.cochain, limits);
  return res;
}

/// Extends by the canonical mu_{n+1} solving delta mu_{n+1} = F_{n+1}.
inline std::optional<Deformation> try_extend(const Deformation& d, const SizeLimits& limits = {}) {
  const auto ob = obstruction(d, d.order() + 1, limits);
  if (!ob.witness) return std::nullopt;
  Deformation out = d;
  out.terms.push_back(ob.witness->coeffs);
  const auto v = verify_deformation(out, out.order());
  if (!v.passed()) throw ConsistencyError("try_extend: extended deformation does not verify (" + v.summary() + ")");
  return out;
}

struct ExtensionRun {
  Deformation deformation;
  std::vector<ObstructionResult> obstructions;  // one per attempted order
  std::optional<std::size_t> first_blocked;
  std::optional<CohomologyClass> blocked_class;
};

inline ExtensionRun extend_to_order(const Deformation& d, std::size_t target, const SizeLimits& limits = {}) {
  const auto v = verify_deformation(d, d.order());
  require(v.passed(), "extend_to_order: deformation does not verify (" + v.summary() + ")");
  ExtensionRun run{d, {}, std::nullopt, std::nullopt};
  while (run.deformation.order() < target) {
    auto ob = obstruction(run.deformation, run.deformation.order() + 1, limits);
    if (!ob.witness) {
      run.first_blocked = ob.order;
      run.blocked_class = cohomology_class(deformation_context(d.base, d.action), ob.cochain, limits);
      run.obstructions.push_back(std::move(ob));
      break;
    }
    run.deformation.terms.push_back(ob.witness->coeffs);
    run.obstructions.push_back(std::move(ob));
    const auto vv = verify_deformation(run.deformation, run.deformation.order());
    if (!vv.passed()) throw ConsistencyError("extend_to_order: extension does not verify (" + vv.summary() + ")");
  }
  return run;
}

/// Each psi_r commutes with alpha and with every g.
inline VerificationReport verify_isomorphism(const FormalIsomorphism& psi) {
  VerificationReport rep;
  const ComplexContext ctx = deformation_context(psi.base, psi.action);
  for (std::size_t r = 1; r <= psi.order(); ++r) {
    const Matrix& m = psi.maps[r - 1];
    require(m.rows() == psi.base.dim() && m.cols() == psi.base.dim(), "verify_isomorphism: psi has the wrong shape");
    rep.merge(is_cochain(ctx, map_to_cochain(m)), "psi-" + std::to_string(r) + "/");
  }
  return rep;
}

/// phi_0 = I, phi_r = -sum_{i=1..r} psi_i phi_{r-i}
inline FormalIsomorphism formal_inverse(const FormalIsomorphism& psi) {
  const std::size_t n = psi.base.dim();
  FormalIsomorphism out = FormalIsomorphism::identity(psi.base, psi.action, psi.order());
  for (std::size_t r = 1; r <= psi.order(); ++r) {
    Matrix acc(n, n);
    for (std::size_t i = 1; i <= r; ++i) acc = acc - psi.psi(i) * out.psi(r - i);
    out.maps[r - 1] = acc;
  }
  return out;
}

/// Composition Psi2 o Psi1 truncated at the smaller order.
inline FormalIsomorphism compose(const FormalIsomorphism& psi2, const FormalIsomorphism& psi1) {
  require(psi1.base == psi2.base, "compose: different base systems");
  const std::size_t n = psi1.base.dim(), order = std::min(psi1.order(), psi2.order());
  FormalIsomorphism out = FormalIsomorphism::identity(psi1.base, psi1.action, order);
  for (std::size_t r = 1; r <= order; ++r) {
    Matrix acc(n, n);
    for (std::size_t i = 0; i <= r; ++i) acc = acc + psi2.psi(i) * psi1.psi(r - i);
    out.maps[r - 1] = acc;
  }
  return out;
}

namespace detail {

/// Coefficient of t^r in Psi_t mu_t(Phi_t a, Phi_t b, Phi_t c).
inline Vector transported_term(const Deformation& d, const FormalIsomorphism& psi, const FormalIsomorphism& phi,
                               std::size_t r) {
  const std::size_t n = d.base.dim();
  Vector out(ipow(n, 4), Scalar(0));
  for (std::size_t j = 0; j <= r; ++j) {
    if (is_zero(d.mu(j))) continue;
    for (std::size_t k = 0; j + k <= r; ++k)
      for (std::size_t l = 0; j + k + l <= r; ++l)
        for (std::size_t s = 0; j + k + l + s <= r; ++s) {
          const std::size_t i = r - j - k - l - s;
          const Matrix pi = psi.psi(i);
          if (pi.is_zero()) continue;
          const Vector inner = precompose(d.mu(j), n, phi.psi(k), phi.psi(l), phi.psi(s));
          out = add(std::move(out), postcompose(pi, inner, n));
        }
  }
  return out;
}

}  // namespace detail

/// mu~_t(Psi a, Psi b, Psi c) = Psi mu_t(a, b, c), expanded up to order N.
inline Deformation apply_isomorphism(const FormalIsomorphism& psi, const Deformation& d, std::size_t order) {
  require(psi.order() >= order && d.order() >= order, "apply_isomorphism: order exceeds the inputs");
  require(psi.base == d.base, "apply_isomorphism: different base systems");
  const auto vi = verify_isomorphism(psi);
  require(vi.passed(), "apply_isomorphism: psi is not an equivariant formal isomorphism (" + vi.summary() + ")");
  const FormalIsomorphism phi = formal_inverse(psi);
  Deformation out{d.base, d.action, {}};
  for (std::size_t r = 1; r <= order; ++r) out.terms.push_back(detail::transported_term(d, psi, phi, r));
  if (verify_deformation(d, order).passed() && !verify_deformation(out, order).passed())
    throw ConsistencyError("apply_isomorphism: image of a valid deformation does not verify");
  return out;
}

namespace detail {

/// Coefficient of t^r in mu2_t(Psi a, Psi b, Psi c) - Psi mu1_t(a, b, c).
inline Vector equivalence_residual(const Deformation& d1, const Deformation& d2, const std::vector<Matrix>& psis,
                                   std::size_t r) {
  const std::size_t n = d1.base.dim();
  const FormalIsomorphism psi{d1.base, d1.action, psis};
  Vector out(ipow(n, 4), Scalar(0));
  for (std::size_t i = 0; i <= r; ++i) {
    if (is_zero(d2.mu(i))) continue;
    for (std::size_t j = 0; i + j <= r; ++j)
      for (std::size_t k = 0; i + j + k <= r; ++k) {
        const std::size_t l = r - i - j - k;
        out = add(std::move(out), precompose(d2.mu(i), n, psi.psi(j), psi.psi(k), psi.psi(l)));
      }
  }
  for (std::size_t i = 0; i <= r; ++i) {
    const Matrix p = psi.psi(i);
    if (p.is_zero() || is_zero(d1.mu(r - i))) continue;
    out = sub(std::move(out), postcompose(p, d1.mu(r - i), n));
  }
  return out;
}

}  // namespace detail

/// Searches for Psi_t with d2 = Psi . d1 up to order N, solving for psi_r
/// order by order. At order r the kernel-of-delta^1 part of psi_{r-1} is
/// solved together with psi_r whenever the order-r equation is affine in it.
inline std::optional<FormalIsomorphism> deformations_equivalent(const Deformation& d1, const Deformation& d2,
                                                                std::size_t order, const SizeLimits& limits = {}) {
  require(d1.base == d2.base, "deformations_equivalent: different base systems");
  require(d1.action.has_value() == d2.action.has_value() &&
              (!d1.action || d1.action->matrices() == d2.action->matrices()),
          "deformations_equivalent: different group actions");
  require(d1.order() >= order && d2.order() >= order, "deformations_equivalent: order exceeds the inputs");
  const std::size_t n = d1.base.dim();
  const ComplexContext ctx = deformation_context(d1.base, d1.action);
  const CochainBasis c1 = cochain_basis(ctx, 1, limits);
  const CoboundaryOperator op(ctx, 1, limits);

  std::vector<Matrix> c1_maps;
  for (std::size_t j = 0; j < c1.dim(); ++j) c1_maps.push_back(cochain_to_map(c1.column(j)));
  std::vector<Matrix> ker_maps;
  {
    Matrix images(ipow(n, 3) * n, c1.dim());
    for (std::size_t j = 0; j < c1.dim(); ++j) {
      const Vector img = op.apply_raw(c1.kernel().column(j));
      for (std::size_t i = 0; i < img.size(); ++i) images(i, j) = img[i];
    }
    const Matrix k = nullspace_basis(images);
    for (std::size_t j = 0; j < k.cols(); ++j) ker_maps.push_back(cochain_to_map(c1.combine(k.column(j))));
  }

  std::vector<Matrix> psis;
  const std::size_t rows = ipow(n, 4);
  for (std::size_t r = 1; r <= order; ++r) {
    psis.push_back(Matrix(n, n));
    const Vector r0 = detail::equivalence_residual(d1, d2, psis, r);
    auto residual_with = [&](std::size_t slot, const Matrix& delta) {
      auto p = psis;
      p[slot] = p[slot] + delta;
      return detail::equivalence_residual(d1, d2, p, r);
    };

    std::vector<Vector> cols;
    bool use_kernel = r >= 2 && !ker_maps.empty();
    std::vector<Vector> kcols;
    if (use_kernel) {
      std::vector<Vector> single;
      for (const auto& k : ker_maps) single.push_back(residual_with(r - 2, k));
      for (std::size_t a = 0; a < ker_maps.size() && use_kernel; ++a)
        for (std::size_t b = a; b < ker_maps.size() && use_kernel; ++b) {
          const Vector both = residual_with(r - 2, ker_maps[a] + ker_maps[b]);
          if (!is_zero(add(sub(sub(both, single[a]), single[b]), r0))) use_kernel = false;
        }
      if (use_kernel)
        for (auto& s : single) kcols.push_back(sub(std::move(s), r0));
    }
    cols = kcols;
    for (const auto& b : c1_maps) cols.push_back(sub(residual_with(r - 1, b), r0));

    const auto x = solve_linear(Matrix::from_columns(rows, cols), scale(r0, -1));
    if (!x) return std::nullopt;
    for (std::size_t a = 0; a < kcols.size(); ++a) psis[r - 2] = psis[r - 2] + (*x)[a] * ker_maps[a];
    for (std::size_t b = 0; b < c1_maps.size(); ++b) psis[r - 1] = psis[r - 1] + (*x)[kcols.size() + b] * c1_maps[b];
  }

  FormalIsomorphism psi{d1.base, d1.action, psis};
  const Deformation image = apply_isomorphism(psi, d1, order);
  for (std::size_t r = 1; r <= order; ++r)
    if (image.mu(r) != d2.mu(r)) throw ConsistencyError("deformations_equivalent: witness does not transport d1 to d2");
  return psi;
}

/// Equivalent to the undeformed bracket up to order N.
inline std::optional<FormalIsomorphism> is_trivial(const Deformation& d, std::size_t order, const SizeLimits& limits = {}) {
  return deformations_equivalent(d, Deformation::zero(d.base, d.action, order), order, limits);
}

}  // namespace homlts
