#include <gtest/gtest.h>

#include "tropmirror/multisection.hpp"

using namespace tropmirror;

namespace {

bool has_failure(const ValidationReport &rep, const std::string &name)
{
    for (const auto &f : rep.failures())
        if (f.name == name)
            return true;
    return false;
}

} // namespace

TEST(BuildL, SlopesAndGluings)
{
    const auto l = build_L();
    EXPECT_EQ(l.sheets[l.sheet(1, "+")].slope, Covector(2, 0));
    EXPECT_EQ(l.sheets[l.sheet(1, "-")].slope, Covector(1, 0));
    EXPECT_EQ(l.sheets[l.sheet(2, "+")].slope, Covector(0, 1));
    EXPECT_EQ(l.sheets[l.sheet(2, "-")].slope, Covector(0, 2));
    EXPECT_EQ(l.sheets[l.sheet(0, "+")].slope, Covector(0, 0));
    EXPECT_EQ(l.sheets[l.sheet(0, "-")].slope, Covector(0, 0));
    EXPECT_TRUE(l.glued(l.sheet(1, "+"), l.sheet(2, "-"), 0));
    EXPECT_TRUE(l.glued(l.sheet(1, "-"), l.sheet(2, "+"), 0));
    EXPECT_TRUE(l.glued(l.sheet(0, "+"), l.sheet(1, "-"), 2));
    EXPECT_TRUE(l.glued(l.sheet(0, "-"), l.sheet(1, "+"), 2));
    EXPECT_TRUE(l.glued(l.sheet(0, "+"), l.sheet(2, "-"), 1));
    EXPECT_TRUE(l.glued(l.sheet(0, "-"), l.sheet(2, "+"), 1));
    EXPECT_EQ(l.degree(), 2u);
}

TEST(BuildL, ContinuityAlongV0)
{
    const auto l = build_L();
    for (int t = 1; t <= 5; ++t) {
        const LatticeVector p{t, t};
        EXPECT_EQ(pairing(l.sheets[l.sheet(1, "+")].slope, p), 2 * t);
        EXPECT_EQ(pairing(l.sheets[l.sheet(2, "-")].slope, p), 2 * t);
    }
}

TEST(BuildLprime, SlopesAndGluings)
{
    const auto lp = build_Lprime();
    const std::vector<std::pair<std::string, Covector>> expect{
        {"01", {-1, 0}}, {"02", {0, -1}}, {"10", {1, 0}}, {"12", {1, -1}}, {"20", {0, 1}}, {"21", {-1, 1}}};
    for (const auto &[lab, m] : expect)
        EXPECT_EQ(lp.sheets[lp.sheet(lab[0] - '0', lab)].slope, m) << lab;
    EXPECT_TRUE(lp.glued(lp.sheet(1, "10"), lp.sheet(2, "20"), 0));
    EXPECT_TRUE(lp.glued(lp.sheet(1, "12"), lp.sheet(2, "21"), 0));
    EXPECT_TRUE(lp.glued(lp.sheet(0, "01"), lp.sheet(1, "10"), 2));
    EXPECT_TRUE(lp.glued(lp.sheet(0, "02"), lp.sheet(1, "12"), 2));
    EXPECT_EQ(lp.degree(), 2u);
    const LatticeVector v0{1, 1};
    EXPECT_EQ(pairing(lp.sheets[lp.sheet(1, "10")].slope, v0), pairing(lp.sheets[lp.sheet(2, "20")].slope, v0));
}

TEST(Validate, BothInstancesPass)
{
    for (const auto &ms : {build_L(), build_Lprime()}) {
        const auto rep = validate(ms);
        EXPECT_TRUE(rep.ok());
        EXPECT_GE(rep.checks.size(), 6u + 1u + 3u + 3u + 1u);
    }
}

TEST(Validate, PerturbedSlopeFailsOnV2)
{
    auto l = build_L();
    l.sheets[l.sheet(1, "+")].slope = {2, 1};
    const auto rep = validate(l);
    EXPECT_FALSE(rep.ok());
    EXPECT_TRUE(has_failure(rep, "continuity s0-~s1+ along ray 2"));
    for (const auto &f : rep.failures())
        if (f.name == "continuity s0-~s1+ along ray 2")
            EXPECT_EQ(f.detail, "values at (0,-1): 0 vs -1");
}

TEST(Validate, MissingGluingBreaksCovering)
{
    auto l = build_L();
    l.gluings.pop_back();
    const auto rep = validate(l);
    EXPECT_TRUE(has_failure(rep, "covering over ray 1"));
}

TEST(Validate, BranchPointAwayFromOriginFails)
{
    auto l = build_L();
    l.branch_points = {{1, 0}};
    EXPECT_TRUE(has_failure(validate(l), "branch locus codimension 2"));
}

TEST(Monodromy, Transpositions)
{
    for (const auto &ms : {build_L(), build_Lprime()}) {
        for (std::size_t c = 0; c < 3; ++c) {
            const auto p = monodromy(ms, c);
            EXPECT_TRUE(p.is_transposition());
            EXPECT_EQ(p.order(), 2u);
        }
    }
    const auto p = monodromy(build_L(), 0);
    EXPECT_EQ(p.mapping.at("+"), "-");
    EXPECT_EQ(p.mapping.at("-"), "+");
}

TEST(Monodromy, TrivialCoverIsIdentity)
{
    const auto f = pl_from_ray_values(build_p2_fan(), std::vector<std::int64_t>{0, 0, 0});
    const auto p = monodromy(trivial_cover(f, 2), 0);
    EXPECT_TRUE(p.is_identity());
    EXPECT_EQ(p.order(), 1u);
}

TEST(Monodromy, BrokenGluingIsStructuralError)
{
    auto l = build_L();
    l.gluings.erase(l.gluings.begin());
    EXPECT_THROW(monodromy(l, 0), StructuralError);
}

TEST(Trace, FirstSectionIsO3)
{
    const auto fan = build_p2_fan();
    const auto tr = trace_pl(build_L());
    EXPECT_EQ(tr, pl_from_ray_values(fan, std::vector<std::int64_t>{3, 0, 0}));
    EXPECT_EQ(tr.ray_values(), (std::vector<Rational>{3, 0, 0}));
}

TEST(Trace, SecondSectionIsLinearlyEquivalent)
{
    const auto a = trace_pl(build_L());
    const auto b = trace_pl(build_Lprime());
    EXPECT_EQ(b.ray_values(), (std::vector<Rational>{1, 1, 1}));
    // differ by one global linear function
    for (std::size_t c = 0; c < 3; ++c)
        EXPECT_EQ(b.slopes[c] - a.slopes[c], Covector(-1, -1));
}

TEST(Trace, TrivialDoubleOfZeroSection)
{
    const auto f = pl_from_ray_values(build_p2_fan(), std::vector<std::int64_t>{0, 0, 0});
    EXPECT_EQ(trace_pl(trivial_cover(f, 2)), f);
}

TEST(Compare, LAgainstLprime)
{
    const auto l = build_L();
    const auto lp = build_Lprime();
    const auto cmp = compare_multisections(l, lp, standard_L_Lprime_match(l, lp));
    EXPECT_TRUE(cmp.continuous);
    EXPECT_EQ(cmp.distinct_slopes, (std::vector<Covector>{{0, 1}, {1, 0}}));
    for (const auto &d : cmp.differences) {
        const auto name = l.sheet_name(d.sheet_a);
        const bool xi1 = name == "s0-" || name == "s1+" || name == "s2+";
        EXPECT_EQ(d.slope, xi1 ? Covector(1, 0) : Covector(0, 1)) << name;
        EXPECT_EQ(d.offset, 0);
    }
}

TEST(Compare, IdentityGivesZero)
{
    const auto l = build_L();
    std::vector<std::pair<std::size_t, std::size_t>> id;
    for (std::size_t s = 0; s < l.sheets.size(); ++s)
        id.emplace_back(s, s);
    const auto cmp = compare_multisections(l, l, id);
    EXPECT_TRUE(cmp.continuous);
    for (const auto &d : cmp.differences)
        EXPECT_TRUE(d.slope.is_zero());
}

TEST(Compare, BadPairingOrDegreeRejected)
{
    const auto l = build_L();
    const auto lp = build_Lprime();
    auto bad = standard_L_Lprime_match(l, lp);
    std::swap(bad[0].second, bad[1].second); // swaps the two sheets over cone 0
    EXPECT_THROW(compare_multisections(l, lp, bad), StructuralError);

    const auto f = pl_from_ray_values(build_p2_fan(), std::vector<std::int64_t>{0, 0, 0});
    EXPECT_THROW(compare_multisections(l, trivial_cover(f, 3), {}), StructuralError);
}

TEST(Serialization, JsonRoundTrip)
{
    for (const auto &ms : {build_L(), build_Lprime()}) {
        const auto back = TropicalMultiSection::from_json(ms.to_json());
        EXPECT_EQ(back.to_json(), ms.to_json());
        EXPECT_TRUE(validate(back).ok());
    }
}
