#include <random>

#include <gtest/gtest.h>

#include "tropmirror/models.hpp"

using namespace tropmirror;

namespace {

LaurentMatrix parse(const ContextPtr &ctx, const std::vector<std::vector<std::string>> &rows)
{
    return LaurentMatrix::parse(ctx, rows);
}

const CheckResult *find_check(const ValidationReport &rep, const std::string &name)
{
    for (const auto &c : rep.checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

Model instantiated_L() { return model_L(sign_constants()); }

TransitionCocycle corrected(const Model &m, const std::optional<LocalSystem> &ls = LocalSystem::standard())
{
    return corrected_cocycle(m.semiflat, standard_wall_factors(m.constants, m.atlas), ls);
}

} // namespace

// ---- reference tangent cocycle ----------------------------------------

TEST(Tangent, PrintedEntries)
{
    const Atlas atlas;
    const auto t = reference_tangent_cocycle(atlas);
    EXPECT_EQ(t.transition(1, 0)(1, 0), LaurentPolynomial::parse(atlas.chart(0), "-w0_2*w0_1^-2"));
    EXPECT_EQ(t.transition(1, 0)(0, 0), LaurentPolynomial::parse(atlas.chart(0), "-w0_1^-2"));
    EXPECT_EQ(t.transition(1, 0)(1, 1), LaurentPolynomial::parse(atlas.chart(0), "w0_1^-1"));
}

TEST(Tangent, DefectIsIdentity)
{
    const auto t = reference_tangent_cocycle();
    EXPECT_TRUE(cocycle_defect(t, standard_loop()).is_identity());
    EXPECT_TRUE(cocycle_defect(t, {0, 2, 1, 0}).is_identity());
}

TEST(Tangent, DeterminantOfTau21)
{
    const Atlas atlas;
    const auto t = reference_tangent_cocycle(atlas);
    EXPECT_EQ(t.transition(2, 1).determinant(), LaurentPolynomial::parse(atlas.chart(1), "-w1_2^-3"));
}

TEST(Tangent, MatchesJacobianOfChartRelations)
{
    const Atlas atlas;
    const auto t = reference_tangent_cocycle(atlas);
    const auto jac = jacobian_cocycle(atlas);
    for (const auto &[i, j] : t.overlaps())
        EXPECT_EQ(t.transition(i, j), jac.transition(i, j)) << i << j;
}

TEST(Tangent, RegularAndEquivariant)
{
    const auto t = reference_tangent_cocycle();
    EXPECT_TRUE(regularity_check(t).ok());
    const auto eq = equivariance_check(t);
    EXPECT_TRUE(eq.ok());
    // off-diagonal entry -w0_2/w0_1^2 is checked too
    const auto *c = find_check(eq, "equivariance 10 entry (2,1)");
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->detail, "expected exponent (-2,1)");
}

// ---- semi-flat cocycle ------------------------------------------------

TEST(SemiFlat, PrintedMatricesParametric)
{
    const auto m = model_L(Constants::parametric());
    const auto &a = m.atlas;
    const std::string b2 = "-a0^-1*b0^-1*a1^-1*b1^-1*a2^-1";
    EXPECT_EQ(m.semiflat.transition(1, 0), parse(a.chart(0), {{"a0*w0_1^-2", "0"}, {"0", "b0*w0_1^-1"}}));
    EXPECT_EQ(m.semiflat.transition(2, 1), parse(a.chart(1), {{"a1*w1_2^-2", "0"}, {"0", "b1*w1_2^-1"}}));
    EXPECT_EQ(m.semiflat.transition(0, 2), parse(a.chart(2), {{"0", b2 + "*w2_0^-1"}, {"a2*w2_0^-2", "0"}}));
}

TEST(SemiFlat, ExponentOfFirstEntry)
{
    const auto m = model_L(Constants::parametric());
    const auto t = m.semiflat.in_torus(1, 0)(0, 0);
    ASSERT_TRUE(t.is_monomial());
    const auto &e = t.terms().begin()->first;
    EXPECT_EQ(e[0], -2);
    EXPECT_EQ(e[1], 0);
}

TEST(SemiFlat, TrivialSectionGivesIdentities)
{
    const auto zero = pl_from_ray_values(build_p2_fan(), std::vector<std::int64_t>{0, 0, 0});
    auto ms = trivial_cover(zero, 2);
    auto frames = frames_by_label(ms, {{"0", "1"}, {"0", "1"}, {"0", "1"}});
    const auto m = make_model(std::move(ms), std::move(frames), Constants::instantiated({1, 1, 1, 1, 1, 1}));
    for (const auto &[i, j] : m.semiflat.overlaps())
        EXPECT_TRUE(m.semiflat.transition(i, j).is_identity());
}

TEST(SemiFlat, NonBijectivePairingRejected)
{
    const auto ms = build_L();
    const auto frames = L_frames(ms);
    auto p = pairings_from_gluings(ms, frames);
    p[{1, 0}] = {0, 0};
    const auto k = sign_constants();
    EXPECT_THROW(semiflat_cocycle(ms, frames, p, k, Atlas(ms.base, k.parameter_names())), StructuralError);
}

TEST(SemiFlat, RegularAndEquivariant)
{
    for (const auto &m : {model_L(Constants::parametric()), model_Lprime(sign_constants())}) {
        EXPECT_TRUE(regularity_check(m.semiflat).ok());
        EXPECT_TRUE(equivariance_check(m.semiflat).ok());
    }
}

// ---- defects ----------------------------------------------------------

TEST(Defect, NaiveIsAntidiagonal)
{
    const auto m = model_L(Constants::parametric());
    const auto d = cocycle_defect(m.semiflat, standard_loop());
    EXPECT_EQ(d, expected_naive_defect(m.constants, m.atlas));
    const auto f = model_L(Constants::free_parametric());
    EXPECT_EQ(cocycle_defect(f.semiflat, standard_loop()), expected_naive_defect(f.constants, f.atlas));
}

TEST(Defect, AllOnesGivesMonodromyPermutation)
{
    const auto m = model_L(Constants::instantiated({1, 1, 1, 1, 1, 1}));
    const auto d = cocycle_defect(m.semiflat, standard_loop());
    EXPECT_EQ(d, LaurentMatrix::from_integers(m.atlas.torus(), {{0, 1}, {1, 0}}));
    EXPECT_TRUE(monodromy(m.ms, 0).is_transposition());
}

TEST(Defect, SingleChartLoop)
{
    const auto m = instantiated_L();
    EXPECT_TRUE(cocycle_defect(m.semiflat, {0, 0}).is_identity());
    EXPECT_TRUE(cocycle_defect(m.semiflat, {1}).is_identity());
}

// ---- equivariance negative control -----------------------------------

TEST(Equivariance, ThetaWithTrivialWeightsFails)
{
    const auto k = sign_constants();
    const Atlas atlas(build_p2_fan(), k.parameter_names());
    std::vector<ChartFrame> frames;
    for (std::size_t c = 0; c < 3; ++c)
        frames.push_back({c, {"+", "-"}, {{0, 0}, {0, 0}}});
    TransitionCocycle c(atlas, frames);
    c.set(1, 0, standard_wall_factors(k, atlas).at({1, 0}));
    const auto rep = equivariance_check(c);
    EXPECT_FALSE(rep.ok());
    const auto fails = rep.failures();
    ASSERT_EQ(fails.size(), 1u);
    EXPECT_EQ(fails[0].name, "equivariance 10 entry (2,1)");
    EXPECT_EQ(fails[0].detail, "exponent (-1,1) != (0,0)");
}

// ---- wall factors and the twisted identity ---------------------------

TEST(WallFactors, CoefficientsAndDeterminants)
{
    const auto k = Constants::instantiated({-1, 1, 1, 1, 1, 1});
    const Atlas atlas(build_p2_fan(), k.parameter_names());
    const auto f = standard_wall_factors(k, atlas);
    EXPECT_EQ(f.at({1, 0})(1, 0), LaurentPolynomial::parse(atlas.chart(0), "w0_1^-1*w0_2"));
    for (const auto &[o, m] : f) {
        EXPECT_TRUE(m.determinant().is_one());
        EXPECT_TRUE(m(0, 1).is_zero());
    }
    const auto p = model_L(Constants::parametric());
    for (const auto &[o, m] : standard_wall_factors(p.constants, p.atlas))
        EXPECT_TRUE(m.determinant().is_one());
}

TEST(WallFactors, FourierModes)
{
    const auto m = model_L(Constants::parametric());
    const auto f = standard_wall_factors(m.constants, m.atlas);
    EXPECT_EQ(correction_exponent(f.at({1, 0}), m.atlas.to_torus(0)), Covector(-1, 1));
    EXPECT_EQ(correction_exponent(f.at({2, 1}), m.atlas.to_torus(1)), Covector(0, -1));
    EXPECT_EQ(correction_exponent(f.at({0, 2}), m.atlas.to_torus(2)), Covector(1, 0));
}

TEST(Twisted, ParametricIdentity)
{
    const auto m = model_L(Constants::parametric());
    const auto f = standard_wall_factors(m.constants, m.atlas);
    EXPECT_TRUE(twisted_corrected_defect(m.semiflat, f, LocalSystem::standard()).is_identity());
    EXPECT_TRUE(twisted_corrected_defect(m.semiflat, f, LocalSystem::sign_flipped()).is_identity());
}

TEST(Twisted, RandomInstantiations)
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto m = model_L(Constants::random_constrained(rng));
        ASSERT_TRUE(
            twisted_corrected_defect(m.semiflat, standard_wall_factors(m.constants, m.atlas), LocalSystem::standard())
                .is_identity());
    }
}

TEST(Twisted, UntwistedIsNotIdentity)
{
    const auto m = model_L(Constants::parametric());
    const auto f = standard_wall_factors(m.constants, m.atlas);
    EXPECT_FALSE(twisted_corrected_defect(m.semiflat, f, std::nullopt).is_identity());
    EXPECT_FALSE(twisted_corrected_defect(m.semiflat, f, LocalSystem::trivial()).is_identity());
    EXPECT_EQ(twisted_corrected_defect(m.semiflat, f, std::nullopt),
              twisted_corrected_defect(m.semiflat, f, LocalSystem::trivial()));
}

TEST(Twisted, CorrectedCocycleIsRegular)
{
    const auto m = model_L(Constants::parametric());
    EXPECT_TRUE(regularity_check(corrected(m)).ok());
}

// ---- local systems ----------------------------------------------------

TEST(LocalSystems, Holonomy)
{
    EXPECT_EQ(LocalSystem::standard().holonomy(), -1);
    EXPECT_EQ(LocalSystem::sign_flipped().holonomy(), -1);
    EXPECT_EQ(LocalSystem::trivial().holonomy(), 1);
    EXPECT_FALSE(LocalSystem::trivial().insertion(make_context({"w1", "w2"})));
    EXPECT_THROW((LocalSystem{1, 2, 1, 1}.holonomy()), std::invalid_argument);
}

TEST(LocalSystems, PushforwardMonodromySquaresToMinusIdentity)
{
    const auto ctx = make_context({"w1", "w2"});
    for (const auto &ls : {LocalSystem::standard(), LocalSystem::sign_flipped()}) {
        const auto m = ls.pushforward_monodromy(ctx);
        EXPECT_EQ(m * m, -LaurentMatrix::identity(ctx, 2));
    }
    EXPECT_EQ(*LocalSystem::standard().insertion(ctx), rotation_j(ctx));
    EXPECT_EQ(*LocalSystem::sign_flipped().insertion(ctx), -rotation_j(ctx));
}

TEST(LocalSystems, SymmetricSignTableHasTrivialHolonomy)
{
    // signs 1,-1,-1,1 on the four components multiply to +1 along the loop,
    // and the crossing matrix is not J
    const auto ctx = make_context({"w1", "w2"});
    const auto ls = LocalSystem::symmetric_table();
    EXPECT_EQ(ls.holonomy(), 1);
    EXPECT_NE(LaurentMatrix::from_integers(ctx, ls.cross_sector()), rotation_j(ctx));
}

// ---- correction search -----------------------------------------------

TEST(Corrections, TwistedSearchRecoversPrintedFactors)
{
    std::mt19937_64 rng(21);
    std::vector<Constants> ks{sign_constants(), Constants::random_constrained(rng),
                              Constants::random_constrained(rng)};
    for (const auto &k : ks) {
        const auto m = model_L(k);
        const auto s = solve_unipotent_corrections(m.semiflat, LocalSystem::standard(), 3);
        ASSERT_EQ(s.solutions.size(), 1u) << k.describe();
        EXPECT_EQ(s.undetermined, 0u);
        const auto found = solution_factors(s.solutions[0], m.atlas);
        EXPECT_EQ(found, standard_wall_factors(k, m.atlas)) << k.describe();
        EXPECT_EQ(s.solutions[0].torus_exponents[0], Covector(-1, 1));
        EXPECT_EQ(s.solutions[0].torus_exponents[1], Covector(0, -1));
        EXPECT_EQ(s.solutions[0].torus_exponents[2], Covector(1, 0));
    }
}

TEST(Corrections, SecondSectionNeedsNoTwist)
{
    const auto m = model_Lprime(sign_constants());
    const auto s = solve_unipotent_corrections(m.semiflat, std::nullopt, 3);
    ASSERT_FALSE(s.solutions.empty());
    const auto &sol = s.solutions[0];
    ASSERT_TRUE(sol.complete());
    EXPECT_TRUE(twisted_corrected_defect(m.semiflat, solution_factors(sol, m.atlas), std::nullopt).is_identity());
}

TEST(Corrections, FirstSectionWithoutTwistIsEmpty)
{
    const auto m = instantiated_L();
    const auto s = solve_unipotent_corrections(m.semiflat, std::nullopt, 3);
    EXPECT_TRUE(s.solutions.empty());
    EXPECT_EQ(s.undetermined, 0u);
    EXPECT_EQ(s.inconsistent, s.candidates);
    EXPECT_GT(s.candidates, 0u);
}

TEST(Corrections, BadBoundRejected)
{
    EXPECT_THROW(solve_unipotent_corrections(instantiated_L().semiflat, std::nullopt, 0), std::invalid_argument);
}

// ---- intertwiners -----------------------------------------------------

TEST(Intertwiner, CorrectedFormulaHoldsParametrically)
{
    const auto m = model_L(Constants::parametric());
    const auto tan = reference_tangent_cocycle(m.atlas);
    const auto rep = check_intertwining(tan, corrected(m), corrected_intertwiner(m.constants, m.atlas));
    for (const auto &c : rep.checks)
        EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
    EXPECT_EQ(rep.checks.size(), 6u);
}

TEST(Intertwiner, FirstPrintedRelationHolds)
{
    // (J tau'_10) f_0 = f_1 tau_10 holds with the printed f_0, f_1 once the
    // (2,1) entry of f_1 carries the opposite sign
    const auto m = model_L(Constants::parametric());
    const auto tan = reference_tangent_cocycle(m.atlas);
    const auto rep = check_intertwining(tan, corrected(m), printed_intertwiner(m.constants, m.atlas));
    const auto *c = find_check(rep, "relation f1*a10 = b10*f0");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->pass);
    const auto fixed = check_intertwining(tan, corrected(m), corrected_intertwiner(m.constants, m.atlas));
    EXPECT_TRUE(find_check(fixed, "relation f1*a10 = b10*f0")->pass);
    // f_0 itself is the printed one in both versions
    EXPECT_EQ(printed_intertwiner(m.constants, m.atlas)[0], corrected_intertwiner(m.constants, m.atlas)[0]);
}

TEST(Intertwiner, SolverFindsTangentIsomorphism)
{
    const auto m = instantiated_L();
    const auto tan = reference_tangent_cocycle(m.atlas);
    const auto s = solve_intertwiner(tan, corrected(m), 3);
    ASSERT_TRUE(s.found()) << s.detail;
    EXPECT_EQ(s.kernel.size(), 1u);
    EXPECT_TRUE(in_kernel_span(s, corrected_intertwiner(m.constants, m.atlas)));
    EXPECT_FALSE(in_kernel_span(s, printed_intertwiner(m.constants, m.atlas)));
    EXPECT_TRUE(check_intertwining(tan, corrected(m), s.solution).ok());
}

TEST(Intertwiner, SplitBundleIsNotIsomorphic)
{
    const auto m = instantiated_L();
    const auto fan = m.atlas.fan();
    const auto o1 = line_bundle_cocycle(pl_from_ray_values(fan, std::vector<std::int64_t>{1, 0, 0}), m.atlas);
    const auto o2 = line_bundle_cocycle(pl_from_ray_values(fan, std::vector<std::int64_t>{2, 0, 0}), m.atlas);
    const auto split = direct_sum(o1, o2);
    EXPECT_TRUE(cocycle_defect(split, standard_loop()).is_identity());
    const auto s = solve_intertwiner(split, corrected(m), 3);
    EXPECT_FALSE(s.found()) << s.detail;
    EXPECT_NE(s.status, IntertwinerSearch::Status::Undetermined) << s.detail;
}

TEST(Intertwiner, SecondSectionToTangent)
{
    const auto m = model_Lprime(sign_constants());
    const auto us = solve_unipotent_corrections(m.semiflat, std::nullopt, 3);
    ASSERT_FALSE(us.solutions.empty());
    const auto corr = corrected_cocycle(m.semiflat, solution_factors(us.solutions[0], m.atlas), std::nullopt);
    const auto s = solve_intertwiner(reference_tangent_cocycle(m.atlas), corr, 3);
    EXPECT_TRUE(s.found()) << s.detail;
}

TEST(Intertwiner, NeedsInstantiatedConstants)
{
    const auto m = model_L(Constants::parametric());
    EXPECT_THROW(solve_intertwiner(reference_tangent_cocycle(m.atlas), m.semiflat, 3), std::invalid_argument);
}

// ---- determinant and wall data ---------------------------------------

TEST(Determinant, CorrectedMatchesTraceLineBundle)
{
    const auto m = model_L(Constants::parametric());
    const auto line = line_bundle_cocycle(trace_pl(m.ms), m.atlas);
    const auto cmp = compare_determinant(corrected(m), line);
    EXPECT_TRUE(cmp.ratios_constant);
    EXPECT_TRUE(cmp.loop_product.is_one());
    // ratios on the overlaps 02, 10, 21 are -a2 b2, a0 b0, a1 b1 (the 02
    // transition swaps the frame); the constraint makes a0 b0 a1 b1 a2 b2 = -1
    const auto sf = compare_determinant(m.semiflat, line);
    ASSERT_EQ(sf.ratios.size(), 3u);
    EXPECT_TRUE(sf.ratios_constant);
    const auto ctx = m.atlas.torus();
    auto c = [&](const ParamMonomial &p) { return m.constants.embed(p, ctx, 2); };
    EXPECT_EQ(sf.ratios[0], -(c(m.constants.a(2)) * c(m.constants.b(2))));
    EXPECT_EQ(sf.ratios[1], c(m.constants.a(0)) * c(m.constants.b(0)));
    EXPECT_EQ(sf.ratios[2], c(m.constants.a(1)) * c(m.constants.b(1)));
    EXPECT_EQ(-(sf.ratios[0] * sf.ratios[1] * sf.ratios[2]), LaurentPolynomial::constant(ctx, -1));
    EXPECT_TRUE(sf.loop_product.is_one());
}

TEST(WallData, PrintedModesAndTangents)
{
    const auto w0 = wall_data({0, -1});
    EXPECT_EQ(w0.n, LatticeVector(1, 0));
    EXPECT_EQ(w0.orientation, 1);
    const auto w1 = wall_data({1, 0});
    EXPECT_EQ(w1.n, LatticeVector(0, 1));
    EXPECT_EQ(w1.orientation, 1);
    const auto w2 = wall_data({-1, 1});
    EXPECT_EQ(w2.n, LatticeVector(-1, -1));
    EXPECT_EQ(pairing(w2.m, w2.n), 0);
    // (-1,1) and (-1,-1) span an index-2 sublattice
    EXPECT_EQ(w2.orientation, 2);
    EXPECT_THROW(wall_data({0, 0}), std::invalid_argument);
}
