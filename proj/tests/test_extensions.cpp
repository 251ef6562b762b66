#include "support/generators.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace homlts;

namespace {

struct Setting {
  fixtures::ExtensionFixture fx;
  ComplexContext ctx;
  std::vector<Cochain> cocycles;  // basis of ker delta^3
  std::vector<Cochain> c1;        // basis of C^1
};

Setting prepare(const fixtures::ExtensionFixture& fx) {
  const auto ctx = extension_context(fx.base.lts, fx.base.action, fx.fiber);
  const auto b3 = cochain_basis(ctx, 3);
  const Matrix z = nullspace_basis(coboundary_matrix(ctx, 2));
  std::vector<Cochain> cocycles;
  for (std::size_t j = 0; j < z.cols(); ++j) cocycles.push_back(b3.combine(z.column(j)));
  const auto b1 = cochain_basis(ctx, 1);
  std::vector<Cochain> c1;
  for (std::size_t j = 0; j < b1.dim(); ++j) c1.push_back(b1.column(j));
  return {fx, ctx, cocycles, c1};
}

CentralExtension build(const Setting& s, const Cochain& h) {
  return extension_from_cocycle(s.fx.base.lts, s.fx.base.action, s.fx.fiber, h);
}

/// h in im delta^1, decided by a dense rank comparison on pointwise coboundaries.
bool oracle_is_coboundary(const Setting& s, const Cochain& h) {
  const auto data = oracle::from_context(s.ctx);
  const Matrix c1 = oracle::cochain_space(data, 1);
  std::vector<Vector> cols;
  for (std::size_t j = 0; j < c1.cols(); ++j) cols.push_back(oracle::coboundary(data, c1.column(j), 1));
  const std::size_t r0 = oracle::rank_of(cols, h.size());
  cols.push_back(h.coeffs);
  return oracle::rank_of(cols, h.size()) == r0;
}

}  // namespace

TEST(Center, ZeroBracketIsEverything) { EXPECT_EQ(center(HomLts::zero(3)), Matrix::identity(3)); }

TEST(Center, Section5HasTrivialCenter) { EXPECT_EQ(center(fixtures::section5().lts).cols(), 0u); }

TEST(Center, TrivialThetaSummandIsCentral) {
  const HomLts s = semidirect_sum(fixtures::section5().lts, Representation::zero(2, Matrix::identity(1)));
  const Matrix z = center(s);
  ASSERT_EQ(z.cols(), 1u);
  EXPECT_EQ(z.column(0), unit_vector(3, 2));
}

TEST(Center, AgreesWithOracle) {
  fixtures::Generator gen(77);
  for (const auto& in : gen.batch(15)) EXPECT_EQ(center(in.lts), oracle::center(in.lts)) << in.label;
}

TEST(Extensions, ZeroCocycleGivesDirectSum) {
  const auto s = prepare(fixtures::extension_fixtures()[0]);
  const auto e = build(s, Cochain::zero(s.ctx, 3));
  EXPECT_TRUE(verify_central_extension(e).passed());
  const std::size_t n = e.base.dim(), N = e.total.dim();
  for_each_tuple(N, 3, [&](const IndexTuple& q) {
    for (std::size_t p = n; p < N; ++p) EXPECT_EQ(e.total.coeff(q[0], q[1], q[2], p), 0);
  });
  EXPECT_TRUE(cocycle_from_extension(e).is_zero());
}

TEST(Extensions, FixtureDimensionsFromOracle) {
  // (z, b) of degree 3, frozen from the brute-force oracle
  const std::size_t expect[][2] = {{2, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 2}};
  const auto fxs = fixtures::extension_fixtures();
  for (std::size_t i = 0; i < fxs.size(); ++i) {
    const auto d = cohomology_dims(prepare(fxs[i]).ctx, 3);
    EXPECT_EQ(d.z, expect[i][0]) << fxs[i].label;
    EXPECT_EQ(d.b, expect[i][1]) << fxs[i].label;
  }
}

TEST(Extensions, RoundTripOverCocycleBasis) {
  for (const auto& fx : fixtures::extension_fixtures()) {
    const auto s = prepare(fx);
    for (const auto& h : s.cocycles) {
      const auto e = build(s, h);
      EXPECT_TRUE(verify_central_extension(e).passed()) << fx.label;
      EXPECT_EQ(cocycle_from_extension(e), h) << fx.label;
    }
  }
}

TEST(Extensions, ModifiedSectionShiftsCocycleByCoboundary) {
  for (const auto& fx : fixtures::extension_fixtures()) {
    const auto s = prepare(fx);
    for (const auto& f : s.c1) {
      for (const auto& h : s.cocycles) {
        CentralExtension e = build(s, h);
        const Matrix fm = cochain_to_map(f);
        e.section = e.section + e.incl * fm;
        ASSERT_TRUE(verify_central_extension(e).passed()) << fx.label;
        EXPECT_EQ(cocycle_from_extension(e), h + coboundary(s.ctx, f)) << fx.label;
      }
    }
  }
}

TEST(Extensions, CohomologousCocyclesGiveEquivalentExtensions) {
  for (const auto& fx : fixtures::extension_fixtures()) {
    const auto s = prepare(fx);
    for (const auto& h : s.cocycles)
      for (const auto& f : s.c1) {
        const auto e1 = build(s, h);
        const auto e2 = build(s, h + coboundary(s.ctx, f));
        const auto phi = extensions_equivalent(e1, e2);
        ASSERT_TRUE(phi.has_value()) << fx.label;
        EXPECT_EQ(*phi * e1.incl, e2.incl);
        EXPECT_EQ(e2.proj * *phi, e1.proj);
        EXPECT_EQ(rank(*phi), e1.total.dim());
        EXPECT_TRUE(verify_morphism(*phi, e1.total, e2.total, "phi").passed());
        for (std::size_t g = 0; g < 2; ++g)
          EXPECT_EQ(*phi * e1.action_total->matrix(g), e2.action_total->matrix(g) * *phi);
      }
  }
}

TEST(Extensions, SelfEquivalenceIsIdentity) {
  const auto s = prepare(fixtures::extension_fixtures()[0]);
  const auto e = build(s, s.cocycles.front());
  const auto phi = extensions_equivalent(e, e);
  ASSERT_TRUE(phi.has_value());
  EXPECT_EQ(*phi, Matrix::identity(e.total.dim()));
}

TEST(Extensions, EquivalentExactlyWhenDifferenceIsCoboundary) {
  std::size_t inequivalent_pairs = 0;
  for (const auto& fx : fixtures::extension_fixtures()) {
    const auto s = prepare(fx);
    for (const auto& h1 : s.cocycles)
      for (const auto& h2 : s.cocycles) {
        const bool expected = oracle_is_coboundary(s, h2 - h1);
        const auto phi = extensions_equivalent(build(s, h1), build(s, h2));
        EXPECT_EQ(phi.has_value(), expected) << fx.label;
        if (!expected) ++inequivalent_pairs;
      }
  }
  EXPECT_GT(inequivalent_pairs, 0u);
}

TEST(Extensions, NonCocycleIsRejectedWithComponent) {
  const HomLts t = make_matrix_pq({1, 3}).lts;
  const Fiber fb{1, fixtures::diag({1}), std::nullopt};
  const auto ctx = extension_context(t, std::nullopt, fb);
  const auto b3 = cochain_basis(ctx, 3);
  const Matrix d3 = coboundary_matrix(ctx, 2);
  std::optional<Cochain> bad;
  for (std::size_t j = 0; j < b3.dim() && !bad; ++j)
    if (!is_zero(d3.column(j))) bad = b3.column(j);
  ASSERT_TRUE(bad.has_value());
  try {
    extension_from_cocycle(t, std::nullopt, fb, *bad);
    FAIL() << "expected a hypothesis error";
  } catch (const HypothesisError& err) {
    EXPECT_EQ(err.hypothesis(), "cocycle");
    EXPECT_NE(std::string(err.what()).find("delta h("), std::string::npos);
  }
}

TEST(Extensions, NonCochainIsRejected) {
  const auto s = prepare(fixtures::extension_fixtures()[0]);
  Cochain h = Cochain::zero(s.ctx, 3);
  h.coeffs[0] = 1;
  EXPECT_THROW(build(s, h), HypothesisError);
}

TEST(Extensions, PerturbedTotalBracketFailsVerification) {
  const auto s = prepare(fixtures::extension_fixtures()[3]);
  CentralExtension e = build(s, s.cocycles.front());
  const std::size_t n = e.base.dim();
  e.total.coeff(n, 0, 1, n) += 1;  // [i(v), e1, e2] gains a V-component
  const auto r = verify_central_extension(e);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(r.has("centrality"));
}

TEST(Extensions, SemidirectSumWithCanonicalMapsVerifies) {
  const auto in = fixtures::section5();
  const Fiber fb{1, fixtures::diag({-1}), std::nullopt};
  CentralExtension e;
  e.base = in.lts;
  e.fiber = fb;
  e.total = semidirect_sum(in.lts, Representation::zero(2, fb.twist));
  e.incl = Matrix(3, 1);
  e.incl(2, 0) = 1;
  e.proj = Matrix{{1, 0, 0}, {0, 1, 0}};
  e.section = e.proj.transpose();
  EXPECT_TRUE(verify_central_extension(e).passed());
}
