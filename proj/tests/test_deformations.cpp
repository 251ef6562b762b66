#include "support/generators.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace homlts;

namespace {

Vector e(std::size_t n, std::size_t i) { return unit_vector(n, i); }

/// F_r from the displayed convolution, evaluated on explicit vectors.
Vector naive_obstruction(const Deformation& d, std::size_t r) {
  const std::size_t n = d.base.dim();
  const Matrix& al = d.base.twist();
  Vector out;
  for (std::size_t idx = 0; idx < oracle::power(n, 5); ++idx) {
    const auto t = oracle::digits(idx, n, 5);
    std::vector<Vector> x(5), ax(5);
    for (std::size_t s = 0; s < 5; ++s) x[s] = e(n, t[s]), ax[s] = al.apply(x[s]);
    Vector acc(n, Scalar(0));
    for (std::size_t i = 1; i < r; ++i) {
      const Vector& mi = d.mu(i);
      const Vector& mj = d.mu(r - i);
      auto m = [&](const Vector& mu, const Vector& a, const Vector& b, const Vector& c) {
        return oracle::eval(mu, n, n, {a, b, c});
      };
      acc = oracle::plus(acc, m(mi, ax[0], ax[1], m(mj, x[2], x[3], x[4])));
      acc = oracle::minus(acc, m(mi, m(mj, x[0], x[1], x[2]), ax[3], ax[4]));
      acc = oracle::minus(acc, m(mi, ax[2], m(mj, x[0], x[1], x[3]), ax[4]));
      acc = oracle::minus(acc, m(mi, ax[2], ax[3], m(mj, x[0], x[1], x[4])));
    }
    oracle::append(out, acc);
  }
  return out;
}

/// Whether F is in the span of pointwise coboundaries of the oracle's C^3 basis.
bool oracle_solvable(const Deformation& d, const Cochain& f) {
  const auto data = oracle::from_context(deformation_context(d.base, d.action));
  const Matrix c3 = oracle::cochain_space(data, 3);
  std::vector<Vector> cols;
  for (std::size_t j = 0; j < c3.cols(); ++j) cols.push_back(oracle::coboundary(data, c3.column(j), 3));
  const std::size_t r0 = oracle::rank_of(cols, f.size());
  cols.push_back(f.coeffs);
  return oracle::rank_of(cols, f.size()) == r0;
}

bool same_terms(const Deformation& a, const Deformation& b, std::size_t order) {
  for (std::size_t r = 1; r <= order; ++r)
    if (a.mu(r) != b.mu(r)) return false;
  return true;
}

}  // namespace

TEST(VerifyDeformation, Section5OrderOne) {
  EXPECT_TRUE(verify_deformation(fixtures::section5_deformation(), 1).passed());
}

TEST(VerifyDeformation, ZeroTermsPassAtEveryOrder) {
  const auto in = fixtures::section5();
  const auto d = Deformation::zero(in.lts, in.action, 4);
  for (std::size_t r = 0; r <= 4; ++r) EXPECT_TRUE(verify_deformation(d, r).passed());
}

TEST(VerifyDeformation, ChangedValueBreaksTwistCompatibility) {
  Deformation d = fixtures::section5_deformation();
  const std::size_t row = ((1 * 2 + 0) * 2 + 0) * 2;
  d.terms[0][row + 0] = 1;  // mu_1(e2, e1, e1) = e1
  d.terms[0][row + 1] = 0;
  const auto r = verify_deformation(d, 1);
  EXPECT_TRUE(r.has("order-1/twist"));
}

TEST(Infinitesimal, Section5) {
  const auto inf = infinitesimal(fixtures::section5_deformation());
  EXPECT_EQ(inf.index, 1u);
  EXPECT_TRUE(inf.is_cocycle);
  EXPECT_EQ(inf.mu, fixtures::section5_deformation().term_cochain(1));
}

TEST(Infinitesimal, LeadingZeroTerm) {
  Deformation d = fixtures::section5_deformation();
  d.terms.insert(d.terms.begin(), Vector(16, Scalar(0)));
  ASSERT_TRUE(verify_deformation(d, 2).passed());
  EXPECT_EQ(infinitesimal(d).index, 2u);
}

TEST(Infinitesimal, TrivialDeformationHasNone) {
  const auto in = fixtures::section5();
  try {
    infinitesimal(Deformation::zero(in.lts, in.action, 2));
    FAIL() << "expected a contract violation";
  } catch (const ContractViolation& err) {
    EXPECT_NE(std::string(err.what()).find("trivial deformation, no infinitesimal"), std::string::npos);
  }
}

TEST(Infinitesimal, NonCocycleAgreesWithVerifier) {
  const auto in = fixtures::bilinear2();
  const auto ctx = deformation_context(in.lts, in.action);
  const auto b3 = cochain_basis(ctx, 3);
  const Matrix d3 = coboundary_matrix(ctx, 2);
  std::size_t checked = 0;
  for (std::size_t j = 0; j < b3.dim(); ++j) {
    if (is_zero(d3.column(j))) continue;
    const Deformation d{in.lts, in.action, {b3.column(j).coeffs}};
    EXPECT_FALSE(infinitesimal(d).is_cocycle);
    EXPECT_TRUE(verify_deformation(d, 1).has("order-1/deformation-equation"));
    ++checked;
  }
  EXPECT_GT(checked, 0u);
}

TEST(Obstruction, Section5SpotValue) {
  const auto ob = obstruction(fixtures::section5_deformation(), 2);
  EXPECT_EQ(ob.order, 2u);
  EXPECT_EQ(ob.cochain.eval({e(2, 1), e(2, 0), e(2, 0), e(2, 0), e(2, 0)}), Vector(2, Scalar(0)));
  EXPECT_TRUE(ob.is_cocycle);
  ASSERT_TRUE(ob.witness.has_value());
}

TEST(Obstruction, ZeroDeformationHasZeroObstruction) {
  const auto in = fixtures::section5();
  const auto ob = obstruction(Deformation::zero(in.lts, in.action, 1), 2);
  EXPECT_TRUE(ob.cochain.is_zero());
  ASSERT_TRUE(ob.witness.has_value());
  EXPECT_TRUE(ob.witness->is_zero());
}

TEST(Obstruction, MatchesPointwiseConvolution) {
  const auto blocked = fixtures::blocked_deformation();
  EXPECT_EQ(obstruction(blocked, 2).cochain.coeffs, naive_obstruction(blocked, 2));
  const auto d = fixtures::scaled_section5_deformation(Scalar(2, 3), Scalar(-3), true);
  EXPECT_EQ(obstruction(d, 2).cochain.coeffs, naive_obstruction(d, 2));
  EXPECT_EQ(obstruction(d, 3).cochain.coeffs, naive_obstruction(d, 3));
}

TEST(Obstruction, ComputedObstructionsAreInvariantCocycles) {
  for (const auto& d : {fixtures::section5_deformation(), fixtures::blocked_deformation()}) {
    const auto ob = obstruction(d, 2);
    const auto ctx = deformation_context(d.base, d.action);
    EXPECT_TRUE(is_cochain(ctx, ob.cochain).passed());
    EXPECT_TRUE(coboundary(ctx, ob.cochain).is_zero());
  }
}

TEST(Obstruction, UnverifiedPreconditionIsRejected) {
  Deformation d = fixtures::section5_deformation();
  d.terms[0][0] = 1;
  EXPECT_THROW(obstruction(d, 2), ContractViolation);
}

TEST(TryExtend, Section5ExtendsToOrderTwo) {
  const auto ext = try_extend(fixtures::section5_deformation());
  ASSERT_TRUE(ext.has_value());
  EXPECT_EQ(ext->order(), 2u);
  EXPECT_TRUE(verify_deformation(*ext, 2).passed());
}

TEST(TryExtend, ZeroDeformationStaysZero) {
  const auto in = fixtures::section5();
  const auto run = extend_to_order(Deformation::zero(in.lts, in.action, 1), 5);
  EXPECT_FALSE(run.first_blocked.has_value());
  ASSERT_EQ(run.deformation.order(), 5u);
  for (std::size_t r = 1; r <= 5; ++r) EXPECT_TRUE(is_zero(run.deformation.mu(r)));
}

TEST(TryExtend, BlockedFixtureHasNoExtension) {
  const auto d = fixtures::blocked_deformation();
  ASSERT_TRUE(verify_deformation(d, 1).passed());
  const auto ob = obstruction(d, 2);
  EXPECT_FALSE(ob.cochain.is_zero());
  EXPECT_FALSE(ob.witness.has_value());
  EXPECT_FALSE(oracle_solvable(d, ob.cochain));
  EXPECT_FALSE(try_extend(d).has_value());
  const auto run = extend_to_order(d, 3);
  ASSERT_TRUE(run.first_blocked.has_value());
  EXPECT_EQ(*run.first_blocked, 2u);
  ASSERT_TRUE(run.blocked_class.has_value());
  EXPECT_FALSE(run.blocked_class->is_zero());
  EXPECT_EQ(run.deformation.order(), 1u);
}

TEST(TryExtend, SucceedsExactlyWhenObstructionIsCoboundary) {
  std::vector<Deformation> ds{fixtures::section5_deformation(), fixtures::blocked_deformation()};
  const auto in = fixtures::zero2();
  const auto b3 = cochain_basis(deformation_context(in.lts, in.action), 3);
  for (std::size_t j = 0; j < b3.dim(); ++j) ds.push_back({in.lts, in.action, {b3.column(j).coeffs}});
  for (const auto& d : ds) {
    const auto ob = obstruction(d, d.order() + 1);
    const bool solvable = oracle_solvable(d, ob.cochain);
    const auto ext = try_extend(d);
    EXPECT_EQ(ext.has_value(), solvable);
    EXPECT_EQ(ob.witness.has_value(), solvable);
    if (ext) {
      EXPECT_TRUE(verify_deformation(*ext, ext->order()).passed());
      EXPECT_EQ(coboundary(deformation_context(d.base, d.action), ext->term_cochain(ext->order())), ob.cochain);
    }
  }
}

TEST(ExtendToOrder, Section5ReachesOrderThree) {
  const auto run = extend_to_order(fixtures::section5_deformation(), 3);
  EXPECT_FALSE(run.first_blocked.has_value());
  ASSERT_EQ(run.deformation.order(), 3u);
  EXPECT_TRUE(verify_deformation(run.deformation, 3).passed());
  EXPECT_EQ(run.obstructions.size(), 2u);
}

TEST(Isomorphisms, VerifyRejectsNonEquivariantMaps) {
  const auto in = fixtures::section5();
  FormalIsomorphism psi = FormalIsomorphism::identity(in.lts, in.action, 1);
  psi.maps[0] = Matrix{{0, 1}, {0, 0}};  // does not commute with alpha = diag(1,-1)
  EXPECT_TRUE(verify_isomorphism(psi).has("psi-1/twist"));
}

TEST(Isomorphisms, IdentityLeavesDeformationUnchanged) {
  const auto d = extend_to_order(fixtures::section5_deformation(), 3).deformation;
  const auto out = apply_isomorphism(FormalIsomorphism::identity(d.base, d.action, 3), d, 3);
  EXPECT_TRUE(same_terms(out, d, 3));
}

TEST(Isomorphisms, FirstOrderDifferenceIsCoboundary) {
  for (const auto& p : fixtures::equivalence_pairs(99, 6)) {
    const auto out = apply_isomorphism(p.psi, p.d, 2);
    const auto ctx = deformation_context(p.d.base, p.d.action);
    EXPECT_EQ(p.d.term_cochain(1) - out.term_cochain(1), coboundary(ctx, map_to_cochain(p.psi.maps[0]))) << p.label;
    EXPECT_TRUE(verify_deformation(out, 2).passed()) << p.label;
  }
}

TEST(Isomorphisms, InverseRoundTrip) {
  for (const auto& p : fixtures::equivalence_pairs(5, 6)) {
    const auto there = apply_isomorphism(p.psi, p.d, 2);
    const auto back = apply_isomorphism(formal_inverse(p.psi), there, 2);
    EXPECT_TRUE(same_terms(back, p.d, 2)) << p.label;
    const auto id = compose(formal_inverse(p.psi), p.psi);
    for (const auto& m : id.maps) EXPECT_TRUE(m.is_zero());
  }
}

TEST(Isomorphisms, CompositionActsSequentially) {
  fixtures::Generator gen(12);
  const auto d = fixtures::scaled_section5_deformation(Scalar(1), Scalar(1), true);
  const fixtures::Instance in{"s5", d.base, d.action};
  const auto p1 = fixtures::random_isomorphism(in, gen, 2);
  const auto p2 = fixtures::random_isomorphism(in, gen, 2);
  const auto seq = apply_isomorphism(p2, apply_isomorphism(p1, d, 2), 2);
  EXPECT_TRUE(same_terms(apply_isomorphism(compose(p2, p1), d, 2), seq, 2));
}

TEST(Equivalence, SelfIsIdentity) {
  const auto d = extend_to_order(fixtures::section5_deformation(), 2).deformation;
  const auto w = deformations_equivalent(d, d, 2);
  ASSERT_TRUE(w.has_value());
  for (const auto& m : w->maps) EXPECT_TRUE(m.is_zero());
}

TEST(Equivalence, RecoversWitnessForTransportedDeformations) {
  for (const auto& p : fixtures::equivalence_pairs(314, 8)) {
    const auto d2 = apply_isomorphism(p.psi, p.d, 2);
    const auto w = deformations_equivalent(p.d, d2, 2);
    ASSERT_TRUE(w.has_value()) << p.label;
    EXPECT_TRUE(same_terms(apply_isomorphism(*w, p.d, 2), d2, 2)) << p.label;
  }
}

TEST(Equivalence, NonCohomologousInfinitesimalsAreInequivalent) {
  const auto d1 = fixtures::scaled_section5_deformation(Scalar(1), Scalar(1), true);
  const auto d2 = fixtures::scaled_section5_deformation(Scalar(1), Scalar(2), true);
  const auto ctx = deformation_context(d1.base, d1.action);
  EXPECT_FALSE(coboundary_membership(ctx, d2.term_cochain(1) - d1.term_cochain(1)).has_value());
  EXPECT_FALSE(deformations_equivalent(d1, d2, 2).has_value());
  EXPECT_FALSE(deformations_equivalent(d1, Deformation::zero(d1.base, d1.action, 2), 1).has_value());
}

TEST(Trivial, ZeroDeformationHasIdentityWitness) {
  const auto in = fixtures::section5();
  const auto w = is_trivial(Deformation::zero(in.lts, in.action, 3), 3);
  ASSERT_TRUE(w.has_value());
  for (const auto& m : w->maps) EXPECT_TRUE(m.is_zero());
}

TEST(Trivial, ConstructedTrivialDeformation) {
  fixtures::Generator gen(41);
  for (int i = 0; i < 4; ++i) {
    const auto in = gen.next();
    const auto psi = fixtures::random_isomorphism(in, gen, 2);
    const auto d = apply_isomorphism(psi, Deformation::zero(in.lts, in.action, 2), 2);
    EXPECT_TRUE(is_trivial(d, 2).has_value()) << in.label;
  }
}

TEST(Trivial, Section5IsNotTrivial) {
  const auto d = fixtures::section5_deformation();
  EXPECT_FALSE(coboundary_membership(deformation_context(d.base, d.action), d.term_cochain(1)).has_value());
  EXPECT_FALSE(is_trivial(d, 1).has_value());
}
