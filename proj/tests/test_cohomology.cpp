#include "support/generators.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace homlts;

namespace {

ComplexContext s5(bool eq) {
  const auto in = fixtures::section5();
  return ComplexContext::adjoint(in.lts, in.action, eq);
}

Cochain s5_mu1() { return fixtures::section5_deformation().term_cochain(1); }

Vector e(std::size_t n, std::size_t i) { return unit_vector(n, i); }

Cochain random_in(const CochainBasis& b, fixtures::Generator& gen) {
  Vector c(b.dim());
  for (auto& x : c) x = gen.coin() ? gen.rational() : Scalar(0);
  return b.combine(c);
}

}  // namespace

TEST(IsCochain, Section5Mu1IsInvariant) { EXPECT_TRUE(is_cochain(s5(true), s5_mu1()).passed()); }

TEST(IsCochain, ZeroCochainsPass) {
  for (std::size_t d : {1, 3, 5}) EXPECT_TRUE(is_cochain(s5(true), Cochain::zero(s5(true), d)).passed());
}

TEST(IsCochain, ChangedValueBreaksSlotConditions) {
  Cochain f = s5_mu1();
  const IndexTuple t{0, 1, 0};
  f.coeffs[f.shape().index(t, 1)] = 1;  // mu_1(e1, e2, e1) = +e2
  const auto r = is_cochain(s5(true), f);
  EXPECT_TRUE(r.has("alternating") || r.has("cyclic"));
}

TEST(IsCochain, NonInvariantCochainFailsOnlyInEquivariantComplex) {
  // f(e1) = e1 commutes with alpha but not with the sign action on a one-dimensional fiber
  const auto in = fixtures::section5();
  const Fiber fb{1, Matrix::identity(1),
                 GroupAction::scalar(FiniteGroup::cyclic(2), 1, {Scalar(1), Scalar(1)})};
  const auto ctx = extension_context(in.lts, in.action, fb);
  Cochain f = Cochain::zero(ctx, 1);
  f.coeffs[0] = 1;
  EXPECT_TRUE(is_cochain(ctx, f).has("invariance"));
  EXPECT_TRUE(is_cochain(ctx.with_equivariant(false), f).passed());
}

TEST(CochainBasis, DegreeOneIdentityTwistIsAllLinearMaps) {
  const auto ctx =
      ComplexContext::create(HomLts::zero(2), Representation::zero(2, Matrix::identity(3)), std::nullopt, std::nullopt, false);
  EXPECT_EQ(cochain_basis(ctx, 1).dim(), 6u);
}

TEST(CochainBasis, Section5OracleDimensions) {
  // frozen from the brute-force oracle
  EXPECT_EQ(cochain_basis(s5(true), 1).dim(), 2u);
  EXPECT_EQ(cochain_basis(s5(true), 3).dim(), 2u);
  EXPECT_EQ(cochain_basis(s5(true), 5).dim(), 8u);
}

TEST(CochainBasis, ColumnsAreCochainsAndCoordinatesRoundTrip) {
  const auto ctx = s5(true);
  const auto b = cochain_basis(ctx, 5);
  fixtures::Generator gen(3);
  for (std::size_t j = 0; j < b.dim(); ++j) EXPECT_TRUE(is_cochain(ctx, b.column(j)).passed());
  const Cochain f = random_in(b, gen);
  EXPECT_EQ(b.combine(b.coordinates(f)), f);
}

TEST(CochainBasis, SizeCapIsEnforced) {
  EXPECT_THROW(cochain_basis(s5(true), 7, SizeLimits{100}), SizeCapExceeded);
  EXPECT_NO_THROW(cochain_basis(s5(true), 5, SizeLimits{64}));
}

TEST(CochainBasis, FingerprintIsStable) {
  EXPECT_EQ(cochain_basis(s5(true), 3).fingerprint(), cochain_basis(s5(true), 3).fingerprint());
  EXPECT_NE(cochain_basis(s5(true), 3).fingerprint(), cochain_basis(s5(true), 5).fingerprint());
}

TEST(Coboundary, TrivialRepresentationDegreeOne) {
  // theta = 0: delta f(x, y, z) = -f([xyz])
  const auto in = fixtures::section5();
  const Fiber fb{2, Matrix::diagonal({Scalar(1), Scalar(-1)}), std::nullopt};
  const auto ctx = ComplexContext::create(in.lts, Representation::zero(2, fb.twist), std::nullopt, std::nullopt, false);
  const auto b = cochain_basis(ctx, 1);
  fixtures::Generator gen(8);
  for (int trial = 0; trial < 4; ++trial) {
    const Cochain f = random_in(b, gen);
    const Cochain df = coboundary(ctx, f);
    for_each_tuple(2, 3, [&](const IndexTuple& t) {
      const Vector br = eval_bracket(in.lts, e(2, t[0]), e(2, t[1]), e(2, t[2]));
      EXPECT_EQ(df.eval({e(2, t[0]), e(2, t[1]), e(2, t[2])}), scale(f.eval({br}), -1));
    });
  }
}

TEST(Coboundary, AdjointDegreeOneIsDerivationDefect) {
  // delta psi(a,b,c) = [psi a b c] + [a psi b c] + [a b psi c] - psi [abc]
  for (bool eq : {false, true}) {
    const auto ctx = s5(eq);
    const auto& t = ctx.lts();
    const auto b = cochain_basis(ctx, 1);
    for (std::size_t j = 0; j < b.dim(); ++j) {
      const Cochain f = b.column(j);
      const Matrix psi = cochain_to_map(f);
      const Cochain df = coboundary(ctx, f);
      for_each_tuple(2, 3, [&](const IndexTuple& q) {
        const Vector x = e(2, q[0]), y = e(2, q[1]), z = e(2, q[2]);
        Vector rhs = eval_bracket(t, psi.apply(x), y, z);
        rhs = add(rhs, eval_bracket(t, x, psi.apply(y), z));
        rhs = add(rhs, eval_bracket(t, x, y, psi.apply(z)));
        rhs = sub(rhs, psi.apply(eval_bracket(t, x, y, z)));
        EXPECT_EQ(df.eval({x, y, z}), rhs);
      });
    }
  }
}

TEST(Coboundary, ZeroMapsToZero) {
  for (std::size_t d : {1, 3, 5}) EXPECT_TRUE(coboundary(s5(true), Cochain::zero(s5(true), d)).is_zero());
}

TEST(Coboundary, RejectsNonCochain) {
  Cochain f = s5_mu1();
  f.coeffs[0] = 1;
  EXPECT_THROW(coboundary(s5(true), f), ContractViolation);
}

TEST(Coboundary, MatchesPointwiseOracle) {
  fixtures::Generator gen(21);
  std::vector<ComplexContext> ctxs{s5(false), s5(true)};
  const auto b2 = fixtures::bilinear2();
  ctxs.push_back(ComplexContext::adjoint(b2.lts, b2.action, true));
  for (const auto& ctx : ctxs) {
    const auto data = oracle::from_context(ctx);
    for (std::size_t d : {1, 3, 5}) {
      const auto b = cochain_basis(ctx, d);
      const Cochain f = random_in(b, gen);
      EXPECT_EQ(coboundary(ctx, f).coeffs, oracle::coboundary(data, f.coeffs, d)) << "degree " << d;
    }
  }
}

TEST(CoboundaryMatrix, ZeroBracketTrivialThetaIsZero) {
  const auto ctx =
      ComplexContext::create(HomLts::zero(2), Representation::zero(2, Matrix::identity(1)), std::nullopt, std::nullopt, false);
  EXPECT_TRUE(coboundary_matrix(ctx, 1).is_zero());
  EXPECT_TRUE(coboundary_matrix(ctx, 2).is_zero());
}

TEST(CoboundaryMatrix, Section5ComplexProperty) {
  for (bool eq : {false, true}) {
    const auto ctx = s5(eq);
    EXPECT_TRUE((coboundary_matrix(ctx, 2) * coboundary_matrix(ctx, 1)).is_zero());
    EXPECT_TRUE((coboundary_matrix(ctx, 3) * coboundary_matrix(ctx, 2)).is_zero());
  }
}

TEST(CoboundaryMatrix, TrivialGroupEquivariantEqualsPlain) {
  const auto in = fixtures::section5();
  const auto eq = ComplexContext::adjoint(in.lts, GroupAction::trivial(2), true);
  const auto plain = ComplexContext::adjoint(in.lts, GroupAction::trivial(2), false);
  for (std::size_t n : {1, 2}) EXPECT_EQ(coboundary_matrix(eq, n), coboundary_matrix(plain, n));
}

TEST(CohomologyDims, Section5OracleValues) {
  // frozen from the brute-force oracle; identical with and without the Z2 action
  const std::size_t expect[3][4] = {{2, 1, 0, 1}, {2, 2, 1, 1}, {8, 3, 0, 3}};
  for (bool eq : {false, true})
    for (std::size_t k = 0; k < 3; ++k) {
      const auto d = cohomology_dims(s5(eq), 2 * k + 1);
      EXPECT_EQ(d.cochains, expect[k][0]);
      EXPECT_EQ(d.z, expect[k][1]);
      EXPECT_EQ(d.b, expect[k][2]);
      EXPECT_EQ(d.h, expect[k][3]);
    }
}

TEST(CohomologyDims, ZeroBracketTrivialThetaIsFullSpace) {
  const auto ctx =
      ComplexContext::create(HomLts::zero(2), Representation::zero(2, Matrix::identity(1)), std::nullopt, std::nullopt, false);
  for (std::size_t d : {1, 3, 5}) {
    const auto dims = cohomology_dims(ctx, d);
    EXPECT_EQ(dims.h, dims.cochains);
  }
}

TEST(CohomologyDims, SizeCapForZPart) {
  // degree 5 needs the degree-7 operator: 2^7 * 2 = 256 raw entries
  EXPECT_THROW(cohomology_dims(s5(true), 5, SizeLimits{255}), SizeCapExceeded);
  EXPECT_NO_THROW(cohomology_dims(s5(true), 5, SizeLimits{256}));
}

TEST(Membership, RoundTripOnRandomCoboundaries) {
  fixtures::Generator gen(4);
  for (bool eq : {false, true}) {
    const auto ctx = s5(eq);
    for (std::size_t d : {1, 3}) {
      const auto b = cochain_basis(ctx, d);
      for (int trial = 0; trial < 3; ++trial) {
        const Cochain f = coboundary(ctx, random_in(b, gen));
        const auto w = coboundary_membership(ctx, f);
        ASSERT_TRUE(w.has_value());
        EXPECT_EQ(coboundary(ctx, *w), f);
      }
    }
  }
}

TEST(Membership, ZeroHasZeroWitness) {
  const auto w = coboundary_membership(s5(true), Cochain::zero(s5(true), 3));
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(w->is_zero());
}

TEST(Membership, CocycleOutsideImageHasNoWitness) {
  // mu_1 is a 3-cocycle; H^3 is one-dimensional and mu_1 represents a nonzero class
  const auto ctx = s5(true);
  EXPECT_TRUE(coboundary(ctx, s5_mu1()).is_zero());
  EXPECT_FALSE(coboundary_membership(ctx, s5_mu1()).has_value());
  const auto cls = cohomology_class(ctx, s5_mu1());
  EXPECT_EQ(cls.dim, 1u);
  EXPECT_FALSE(cls.is_zero());
}

TEST(CohomologyClass, CoboundariesHaveZeroClass) {
  const auto ctx = s5(true);
  const auto b1 = cochain_basis(ctx, 1);
  for (std::size_t j = 0; j < b1.dim(); ++j) EXPECT_TRUE(cohomology_class(ctx, coboundary(ctx, b1.column(j))).is_zero());
  const Cochain shifted = s5_mu1() + coboundary(ctx, b1.column(0));
  EXPECT_EQ(cohomology_class(ctx, shifted).coords, cohomology_class(ctx, s5_mu1()).coords);
}

TEST(CohomologyClass, DegreeFiveClassesOfBasisCocycles) {
  const auto ctx = s5(true);
  const auto b = cochain_basis(ctx, 5);
  const Matrix out = coboundary_matrix(ctx, 3);
  const Matrix z = nullspace_basis(out);
  ASSERT_EQ(z.cols(), 3u);
  std::size_t rank_classes = 0;
  std::vector<Vector> classes;
  for (std::size_t j = 0; j < z.cols(); ++j) classes.push_back(cohomology_class(ctx, b.combine(z.column(j))).coords);
  rank_classes = rank_of_vectors(classes, 3);
  EXPECT_EQ(rank_classes, 3u);  // b = 0 in degree 5
}

TEST(Reynolds, FixesInvariantCochains) {
  const auto ctx = s5(true);
  EXPECT_EQ(reynolds_project(ctx, s5_mu1()), s5_mu1());
}

TEST(Reynolds, ProjectsOntoInvariantsAndIsIdempotent) {
  const auto ctx = s5(true);
  const auto plain = cochain_basis(ctx.with_equivariant(false), 3);
  const auto inv = cochain_basis(ctx, 3);
  fixtures::Generator gen(17);
  const Cochain f = random_in(plain, gen);
  const Cochain p = reynolds_project(ctx, f);
  EXPECT_TRUE(inv.contains(p));
  EXPECT_EQ(reynolds_project(ctx, p), p);
}

TEST(Reynolds, NonTrivialProjectionOnSignFiber) {
  const auto in = fixtures::section5();
  const Fiber fb{1, Matrix::identity(1), GroupAction::scalar(FiniteGroup::cyclic(2), 1, {Scalar(1), Scalar(1)})};
  const auto ctx = extension_context(in.lts, in.action, fb);
  Cochain f = Cochain::zero(ctx, 1);
  f.coeffs[0] = 1;  // odd under g, so the average vanishes
  EXPECT_TRUE(reynolds_project(ctx, f).is_zero());
}

TEST(Reynolds, TrivialGroupIsIdentity) {
  const auto in = fixtures::section5();
  const auto ctx = ComplexContext::adjoint(in.lts, GroupAction::trivial(2), true);
  const auto b = cochain_basis(ctx, 3);
  for (std::size_t j = 0; j < b.dim(); ++j) EXPECT_EQ(reynolds_project(ctx, b.column(j)), b.column(j));
}

TEST(Context, RejectsUnverifiedInputs) {
  HomLts bad = fixtures::section5().lts;
  bad.coeff(1, 0, 1, 0) = 0;
  EXPECT_THROW(ComplexContext::adjoint(bad, std::nullopt, false), ContractViolation);
  EXPECT_THROW(ComplexContext::adjoint(fixtures::section5().lts, std::nullopt, true), ContractViolation);
}

TEST(Context, FingerprintSeparatesComplexes) {
  EXPECT_EQ(s5(true).fingerprint(), s5(true).fingerprint());
  EXPECT_NE(s5(true).fingerprint(), s5(false).fingerprint());
}
