#pragma once

// Constructors for the standard families of Hom Lie triple systems.

#include "homlts/structures.hpp"

#include <functional>
#include <variant>

namespace homlts {

struct ExampleData {
  HomLts lts;
  std::optional<GroupAction> action;
  std::vector<Vector> deformation_terms;  // mu_1, mu_2, ... as dim^4 tensors
  std::string note;
};

struct BilinearParams {
  Matrix form;   // symmetric bilinear form mu
  Matrix twist;  // alpha with mu(alpha x, alpha y) = mu(x, y)
  Scalar lambda;
};

struct MatrixPqParams {
  std::size_t p = 1;
  std::size_t q = 1;
};

/// Algebra given by structure constants: e_i e_j = sum_k mult[(i*n + j)*n + k] e_k.
struct AlgebraParams {
  std::size_t dim = 0;
  Vector mult;
  Matrix twist;
};

enum class ExampleId { bilinear, matrix_pq, associative, hom_associative, section5 };

using ExampleParams = std::variant<std::monostate, BilinearParams, MatrixPqParams, AlgebraParams>;

namespace detail {

inline Vector algebra_product(const AlgebraParams& a, const Vector& x, const Vector& y) {
  return eval_multilinear(a.mult, TensorShape{a.dim, 2, a.dim}, {x, y});
}

inline void check_algebra_shape(const AlgebraParams& a) {
  if (a.mult.size() != a.dim * a.dim * a.dim)
    throw HypothesisError("structure-constants-shape", "expected dim^3 multiplication constants");
  if (a.twist.rows() != a.dim || a.twist.cols() != a.dim)
    throw HypothesisError("twist-shape", "twist must be dim x dim");
}

inline void check_associative(const AlgebraParams& a) {
  const std::size_t n = a.dim;
  for_each_tuple(n, 3, [&](const IndexTuple& t) {
    const Vector x = unit_vector(n, t[0]), y = unit_vector(n, t[1]), z = unit_vector(n, t[2]);
    if (algebra_product(a, algebra_product(a, x, y), z) != algebra_product(a, x, algebra_product(a, y, z)))
      throw HypothesisError("associativity", "(xy)z != x(yz) on basis triple");
  });
}

inline void check_multiplicative_twist(const AlgebraParams& a, const std::string& hyp) {
  const std::size_t n = a.dim;
  for_each_tuple(n, 2, [&](const IndexTuple& t) {
    const Vector x = unit_vector(n, t[0]), y = unit_vector(n, t[1]);
    if (a.twist.apply(algebra_product(a, x, y)) != algebra_product(a, a.twist.apply(x), a.twist.apply(y)))
      throw HypothesisError(hyp, "alpha(xy) != alpha(x) alpha(y) on basis pair");
  });
}

inline HomLts from_basis_bracket(std::size_t n, const Matrix& twist,
                                 const std::function<Vector(std::size_t, std::size_t, std::size_t)>& br) {
  Vector c(ipow(n, 4), Scalar(0));
  for_each_tuple(n, 3, [&](const IndexTuple& t) {
    const Vector v = br(t[0], t[1], t[2]);
    for (std::size_t l = 0; l < n; ++l) c[((t[0] * n + t[1]) * n + t[2]) * n + l] = v[l];
  });
  return HomLts(n, std::move(c), twist);
}

}  // namespace detail

/// [xyz] = lambda (mu(y,z) alpha(x) - mu(z,x) alpha(y)).
inline ExampleData make_bilinear(const BilinearParams& p) {
  const std::size_t n = p.form.rows();
  if (!p.form.is_square()) throw HypothesisError("form-shape", "bilinear form must be square");
  if (p.twist.rows() != n || p.twist.cols() != n) throw HypothesisError("twist-shape", "twist must be dim x dim");
  if (!(p.form == p.form.transpose())) throw HypothesisError("symmetric-form", "mu(x,y) != mu(y,x)");
  if (!(p.twist.transpose() * p.form * p.twist == p.form))
    throw HypothesisError("twist-invariant-form", "mu(alpha x, alpha y) != mu(x, y)");
  HomLts t = detail::from_basis_bracket(n, p.twist, [&](std::size_t i, std::size_t j, std::size_t k) {
    Vector v = scale(p.twist.column(i), p.lambda * p.form(j, k));
    axpy(v, -p.lambda * p.form(k, i), p.twist.column(j));
    return v;
  });
  return {std::move(t), std::nullopt, {}, "bilinear-form system with twist alpha"};
}

/// [ABC] = (AB^t - BA^t)C + C(B^tA - A^tB) on p x q matrices, twist = identity.
inline ExampleData make_matrix_pq(const MatrixPqParams& prm) {
  if (prm.p == 0 || prm.q == 0) throw HypothesisError("matrix-shape", "p and q must be positive");
  const std::size_t p = prm.p, q = prm.q, n = p * q;
  auto basis = [&](std::size_t idx) {
    Matrix m(p, q);
    m(idx / q, idx % q) = 1;
    return m;
  };
  HomLts t = detail::from_basis_bracket(n, Matrix::identity(n), [&](std::size_t i, std::size_t j, std::size_t k) {
    const Matrix a = basis(i), b = basis(j), c = basis(k);
    const Matrix r = (a * b.transpose() - b * a.transpose()) * c + c * (b.transpose() * a - a.transpose() * b);
    return r.entries();
  });
  return {std::move(t), std::nullopt, {}, "matrix system with ground-field entries; alpha o [ ] read with alpha = identity"};
}

/// (A, alpha o [ ], alpha) with [xyz] = 2[[x,y],z] - [[z,x],y] - [[y,z],x].
inline ExampleData make_associative(const AlgebraParams& a) {
  detail::check_algebra_shape(a);
  detail::check_associative(a);
  detail::check_multiplicative_twist(a, "twist-algebra-morphism");
  const std::size_t n = a.dim;
  auto comm = [&](const Vector& x, const Vector& y) {
    return sub(detail::algebra_product(a, x, y), detail::algebra_product(a, y, x));
  };
  HomLts t = detail::from_basis_bracket(n, a.twist, [&](std::size_t i, std::size_t j, std::size_t k) {
    const Vector x = unit_vector(n, i), y = unit_vector(n, j), z = unit_vector(n, k);
    Vector v = scale(comm(comm(x, y), z), 2);
    v = sub(std::move(v), comm(comm(z, x), y));
    v = sub(std::move(v), comm(comm(y, z), x));
    return a.twist.apply(v);
  });
  return {std::move(t), std::nullopt, {}, "commutator system; twisted bracket alpha o [ ]"};
}

/// (A, [ ], alpha^2) with [xyz] = mu(x,y)a(z) - mu(y,x)a(z) - mu(z,x)a(y) + mu(z,y)a(x).
inline ExampleData make_hom_associative(const AlgebraParams& a) {
  detail::check_algebra_shape(a);
  detail::check_multiplicative_twist(a, "multiplicative-twist");
  const std::size_t n = a.dim;
  auto mu = [&](const Vector& x, const Vector& y) { return detail::algebra_product(a, x, y); };
  for_each_tuple(n, 3, [&](const IndexTuple& t) {
    const Vector x = unit_vector(n, t[0]), y = unit_vector(n, t[1]), z = unit_vector(n, t[2]);
    if (mu(a.twist.apply(x), mu(y, z)) != mu(mu(x, y), a.twist.apply(z)))
      throw HypothesisError("hom-associativity", "mu(alpha x, mu(y,z)) != mu(mu(x,y), alpha z) on basis triple");
  });
  HomLts t = detail::from_basis_bracket(n, a.twist * a.twist, [&](std::size_t i, std::size_t j, std::size_t k) {
    const Vector x = unit_vector(n, i), y = unit_vector(n, j), z = unit_vector(n, k);
    const Vector ax = a.twist.apply(x), ay = a.twist.apply(y), az = a.twist.apply(z);
    Vector v = mu(mu(x, y), az);
    v = sub(std::move(v), mu(mu(y, x), az));
    v = sub(std::move(v), mu(mu(z, x), ay));
    return add(std::move(v), mu(mu(z, y), ax));
  });
  return {std::move(t), std::nullopt, {}, "Hom-associative system; output twist alpha^2"};
}

/// Two-dimensional system with [e1 e2 e2] = e1, [e2 e1 e2] = -e1, alpha = diag(1,-1),
/// Z2 acting by +-I and the order-one deformation mu_1(e2,e1,e1) = e2,
/// mu_1(e1,e2,e1) = -e2.
inline ExampleData make_section5() {
  const std::size_t n = 2;
  HomLts t = HomLts::zero(n, Matrix::diagonal({Scalar(1), Scalar(-1)}));
  Vector c = t.structure_constants();
  auto at = [&](Vector& v, std::size_t i, std::size_t j, std::size_t k, std::size_t l) -> Scalar& {
    return v[((i * n + j) * n + k) * n + l];
  };
  at(c, 0, 1, 1, 0) = 1;
  at(c, 1, 0, 1, 0) = -1;
  t = HomLts(n, std::move(c), t.twist());
  GroupAction act = GroupAction::scalar(FiniteGroup::cyclic(2), n, {Scalar(1), Scalar(-1)});
  Vector mu1(ipow(n, 4), Scalar(0));
  at(mu1, 1, 0, 0, 1) = 1;
  at(mu1, 0, 1, 0, 1) = -1;
  return {std::move(t), std::move(act), {std::move(mu1)}, "two-dimensional Z2 example with order-one deformation"};
}

inline ExampleData make_example(ExampleId id, const ExampleParams& params = {}) {
  auto need = [&]<class P>(std::type_identity<P>) -> const P& {
    const P* p = std::get_if<P>(&params);
    if (!p) throw HypothesisError("parameters", "wrong parameter kind for this example");
    return *p;
  };
  switch (id) {
    case ExampleId::bilinear: return make_bilinear(need(std::type_identity<BilinearParams>{}));
    case ExampleId::matrix_pq: return make_matrix_pq(need(std::type_identity<MatrixPqParams>{}));
    case ExampleId::associative: return make_associative(need(std::type_identity<AlgebraParams>{}));
    case ExampleId::hom_associative: return make_hom_associative(need(std::type_identity<AlgebraParams>{}));
    case ExampleId::section5: return make_section5();
  }
  throw ContractViolation("make_example: unknown example id");
}

}  // namespace homlts
