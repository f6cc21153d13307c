#include <random>

#include <gtest/gtest.h>

#include "tropmirror/models.hpp"

using namespace tropmirror;

namespace {

LaurentPolynomial random_poly(const ContextPtr &ctx, std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> nterms(0, 6), ex(-5, 5), num(-9, 9), den(1, 5);
    LaurentPolynomial p(ctx);
    const int n = nterms(rng);
    for (int k = 0; k < n; ++k) {
        Exponent e(ctx->size());
        for (auto &x : e)
            x = ex(rng);
        p.add_term(e, Rational(num(rng), den(rng)));
    }
    return p;
}

LaurentPolynomial mono(const ContextPtr &ctx, Exponent e, Rational c = 1)
{
    return LaurentPolynomial::monomial(ctx, std::move(e), c);
}

} // namespace

TEST(Rationals, ParseNormalizes)
{
    EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
    EXPECT_EQ(parse_rational(" +2/6 "), Rational(1, 3));
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("x"), std::invalid_argument);
    EXPECT_THROW(parse_rational(""), std::invalid_argument);
    const Rational q = parse_rational("10/4");
    EXPECT_EQ(numerator(q), 5);
    EXPECT_EQ(denominator(q), 2);
}

TEST(Laurent, InverseMonomialsMultiplyToOne)
{
    const auto ctx = make_context({"w1", "w2"});
    EXPECT_TRUE((mono(ctx, {1, 0}) * mono(ctx, {-1, 0})).is_one());
}

TEST(Laurent, CancellationLeavesNoZeroTerms)
{
    const auto ctx = make_context({"w1", "w2"});
    const auto p = LaurentPolynomial::constant(ctx, 1) + mono(ctx, {0, 1});
    const auto q = p + LaurentPolynomial::constant(ctx, -1);
    EXPECT_EQ(q, mono(ctx, {0, 1}));
    EXPECT_EQ(q.size(), 1u);
    EXPECT_TRUE((q - q).is_zero());
}

TEST(Laurent, ProductOfNaiveDefectEntry)
{
    // slots: w1 w2 a0 a1 a2
    const auto ctx = make_context({"w1", "w2", "a0", "a1", "a2"});
    const auto p = mono(ctx, {-2, 0, 1, 0, 0}) * mono(ctx, {2, -2, 0, 1, 0}) * mono(ctx, {0, 2, 0, 0, 1});
    EXPECT_EQ(p, mono(ctx, {0, 0, 1, 1, 1}));
}

TEST(Laurent, MismatchedContextsThrow)
{
    const auto a = make_context({"w1", "w2"});
    const auto b = make_context({"u", "v"});
    EXPECT_THROW(mono(a, {1, 0}) + mono(b, {1, 0}), ContextError);
    EXPECT_THROW(mono(a, {1, 0}) * mono(b, {1, 0}), ContextError);
    // equal names in distinct objects are the same context
    EXPECT_NO_THROW(mono(a, {1, 0}) + mono(make_context({"w1", "w2"}), {1, 0}));
}

TEST(Laurent, RingLawsRandomized)
{
    const auto ctx = make_context({"x", "y"});
    std::mt19937_64 rng(20240501);
    for (int t = 0; t < 500; ++t) {
        const auto p = random_poly(ctx, rng), q = random_poly(ctx, rng), r = random_poly(ctx, rng);
        ASSERT_EQ((p * q) * r, p * (q * r));
        ASSERT_EQ(p * (q + r), p * q + p * r);
        ASSERT_EQ(p * q, q * p);
        ASSERT_EQ(p + q, q + p);
        ASSERT_TRUE((p - p).is_zero());
        const auto pq = p * q;
        for (const auto &[e, c] : pq.terms())
            ASSERT_NE(c, 0);
    }
}

TEST(Laurent, ParseRoundTrip)
{
    const auto ctx = make_context({"w1", "w2"});
    const auto p = LaurentPolynomial::parse(ctx, "-3/2*w1^-2*w2 + 1");
    EXPECT_EQ(p.to_string(), "-3/2*w1^-2*w2^1 + 1");
    EXPECT_EQ(LaurentPolynomial::parse(ctx, p.to_string()), p);
    EXPECT_EQ(LaurentPolynomial::parse(ctx, "0").to_string(), "0");
    EXPECT_THROW(LaurentPolynomial::parse(ctx, "w3"), std::invalid_argument);
}

TEST(Laurent, MonomialInverseAndNonUnit)
{
    const auto ctx = make_context({"w1", "w2"});
    EXPECT_EQ(mono(ctx, {2, -1}, Rational(3, 4)).inverse(), mono(ctx, {-2, 1}, Rational(4, 3)));
    const auto p = LaurentPolynomial::constant(ctx, 1) + mono(ctx, {1, 0});
    EXPECT_THROW(p.inverse(), NotInvertibleError);
}

TEST(Substitute, ChartOneToTorus)
{
    const Atlas atlas;
    const auto p = mono(atlas.chart(1), {0, -1});
    EXPECT_EQ(p.substitute(atlas.to_torus(1)), mono(atlas.torus(), {1, -1}));
    // explicit relations w1_0 -> w^(-1,0), w1_2 -> w^(-1,1)
    EXPECT_EQ(atlas.to_torus(1).matrix()[0], (std::vector<int>{-1, 0}));
    EXPECT_EQ(atlas.to_torus(1).matrix()[1], (std::vector<int>{-1, 1}));
}

TEST(Substitute, IdentityAndInverseComposites)
{
    const Atlas atlas;
    std::mt19937_64 rng(3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto &to = atlas.to_torus(k);
        EXPECT_EQ(abs(to.determinant()), 1);
        const auto back = to.then(atlas.from_torus(k));
        for (int t = 0; t < 20; ++t) {
            const auto p = random_poly(atlas.chart(k), rng);
            EXPECT_EQ(p.substitute(MonomialMap::identity(atlas.chart(k), atlas.chart(k))), p);
            EXPECT_EQ(p.substitute(back), p);
        }
    }
}

TEST(Substitute, IsRingHomomorphism)
{
    const Atlas atlas;
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const auto k = static_cast<std::size_t>(t % 3);
        const auto p = random_poly(atlas.chart(k), rng), q = random_poly(atlas.chart(k), rng);
        const auto &m = atlas.to_torus(k);
        ASSERT_EQ((p * q).substitute(m), p.substitute(m) * q.substitute(m));
        ASSERT_EQ((p + q).substitute(m), p.substitute(m) + q.substitute(m));
    }
}

TEST(Substitute, CompositionIsMatrixProduct)
{
    const auto ctx = make_context({"x", "y"});
    const MonomialMap a(ctx, ctx, {{1, 1}, {0, 1}});
    const MonomialMap b(ctx, ctx, {{2, 1}, {1, 1}});
    const auto ab = a.then(b);
    EXPECT_EQ(ab.matrix(), (std::vector<std::vector<int>>{{3, 2}, {1, 1}}));
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_poly(ctx, rng);
        EXPECT_EQ(p.substitute(ab), p.substitute(a).substitute(b));
    }
    EXPECT_EQ(a.inverse().matrix(), (std::vector<std::vector<int>>{{1, -1}, {0, 1}}));
}

TEST(Matrix, JSquaredIsMinusIdentity)
{
    const auto ctx = make_context({"w1", "w2"});
    const auto J = rotation_j(ctx);
    EXPECT_EQ(J * J, -LaurentMatrix::identity(ctx, 2));
    EXPECT_EQ(J.inverse(), -J);
}

TEST(Matrix, DiagonalInverse)
{
    const auto ctx = make_context({"w1", "w2", "a0", "b0"});
    LaurentMatrix d(ctx, 2, 2);
    d(0, 0) = mono(ctx, {-2, 0, 1, 0});
    d(1, 1) = mono(ctx, {-1, 0, 0, 1});
    LaurentMatrix e(ctx, 2, 2);
    e(0, 0) = mono(ctx, {2, 0, -1, 0});
    e(1, 1) = mono(ctx, {1, 0, 0, -1});
    EXPECT_EQ(d.inverse(), e);
    EXPECT_TRUE((d * e).is_identity());
}

TEST(Matrix, TangentTransitionInverse)
{
    const auto tan = reference_tangent_cocycle();
    for (const auto &[i, j] : tan.overlaps()) {
        const auto &t = tan.transition(i, j);
        EXPECT_TRUE((t * t.inverse()).is_identity());
        EXPECT_TRUE((t.inverse() * t).is_identity());
    }
}

TEST(Matrix, NonUnitDeterminantCarriesWitness)
{
    const auto ctx = make_context({"w1", "w2"});
    auto m = LaurentMatrix::identity(ctx, 2);
    m(0, 0) = LaurentPolynomial::parse(ctx, "1 + w1");
    try {
        (void)m.inverse();
        FAIL() << "expected NotInvertibleError";
    } catch (const NotInvertibleError &e) {
        EXPECT_EQ(e.witness(), m.determinant().to_string());
    }
}

TEST(Matrix, EveryRepoTransitionInvertsExactly)
{
    const auto m = model_L(Constants::parametric());
    const auto corr = corrected_cocycle(m.semiflat, standard_wall_factors(m.constants, m.atlas), LocalSystem::standard());
    const auto mp = model_Lprime(sign_constants());
    for (const auto *c : {&m.semiflat, &corr, &mp.semiflat})
        for (const auto &[i, j] : c->overlaps()) {
            const auto &t = c->transition(i, j);
            EXPECT_TRUE((t * t.inverse()).is_identity()) << c->name() << " " << i << j;
        }
}

TEST(Matrix, JsonIsRowMajorStrings)
{
    const auto ctx = make_context({"w1", "w2"});
    const auto J = rotation_j(ctx);
    EXPECT_EQ(J.to_json(), nlohmann::json::array({nlohmann::json::array({"0", "-1"}), nlohmann::json::array({"1", "0"})}));
}

TEST(Regularity, PairingAgainstCone)
{
    const auto ctx = make_context({"w1", "w2"});
    const std::vector<LatticeVector> ray_v2{{0, -1}};
    EXPECT_TRUE(is_regular_on_cone(mono(ctx, {-2, 0}), ray_v2));
    EXPECT_FALSE(is_regular_on_cone(mono(ctx, {0, 1}), ray_v2));
    EXPECT_TRUE(is_regular_on_cone(LaurentPolynomial::constant(ctx, 1), ray_v2));
    EXPECT_TRUE(is_regular_on_cone(LaurentPolynomial::constant(ctx, 1), std::vector<LatticeVector>{{1, 1}, {-1, 0}}));
}

TEST(Parameters, ParametricAgreesWithInstantiated)
{
    const auto sym = model_L(Constants::parametric());
    const auto sym_corr =
        corrected_cocycle(sym.semiflat, standard_wall_factors(sym.constants, sym.atlas), LocalSystem::standard());
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> num(1, 7);
    for (int t = 0; t < 25; ++t) {
        std::vector<Rational> vals;
        for (int k = 0; k < 5; ++k)
            vals.emplace_back(t % 2 ? -num(rng) : num(rng), num(rng));
        const auto inst = model_L(sym.constants.instantiate(vals));
        const auto inst_corr =
            corrected_cocycle(inst.semiflat, standard_wall_factors(inst.constants, inst.atlas), LocalSystem::standard());
        for (const auto &[i, j] : sym.semiflat.overlaps()) {
            ASSERT_EQ(specialize(sym.semiflat.transition(i, j), vals, inst.atlas.chart(j)),
                      inst.semiflat.transition(i, j));
            ASSERT_EQ(specialize(sym_corr.transition(i, j), vals, inst.atlas.chart(j)), inst_corr.transition(i, j));
        }
        const auto d = cocycle_defect(sym.semiflat, standard_loop());
        ASSERT_EQ(specialize(d, vals, inst.atlas.torus()), cocycle_defect(inst.semiflat, standard_loop()));
    }
}

TEST(Parameters, ConstraintEliminatesB2)
{
    const auto k = Constants::parametric();
    EXPECT_TRUE(k.satisfies_constraint());
    const auto atlas = Atlas(build_p2_fan(), k.parameter_names());
    EXPECT_EQ(k.embed(k.b(2), atlas.torus(), 2).to_string(), "-a0^-1*b0^-1*a1^-1*b1^-1*a2^-1");
    EXPECT_FALSE(Constants::free_parametric().satisfies_constraint());
    EXPECT_THROW(Constants::instantiated({1, 1, 1, 0, 1, 1}), NotInvertibleError);
    EXPECT_EQ(parse_constants("a0=-1,b0=1,a1=1,b1=1,a2=1,b2=1")[0], Rational(-1));
    EXPECT_THROW(parse_constants("a0=1,b0=1"), std::invalid_argument);
}
