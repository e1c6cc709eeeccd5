#include <gtest/gtest.h>

#include <cmath>

#include "hs/classifier.hpp"
#include "hs/cli.hpp"
#include "hs/errors.hpp"

using namespace hs;

namespace {

ProblemSpec spec(double l, double k, const char* fam, std::vector<double> p = {}) {
    return {l, k, make_builtin(fam, p), {}};
}

}  // namespace

TEST(Classifier, WorkedExamples) {
    auto v1 = classify(example_spec(1));
    EXPECT_EQ(v1.regime, Regime::OneSidedBlowup);
    EXPECT_EQ(v1.theorem_tag, "Thm 4.3(1-2)");
    EXPECT_EQ(v1.rho_fate, RhoFate::BlowsUpPlus);
    ASSERT_EQ(v1.blowup_locations.size(), 1u);
    EXPECT_NEAR(v1.blowup_locations[0], 0.5, 1e-9);
    EXPECT_NEAR(v1.t_limit.value, 1.17, 0.01);

    auto v2 = classify(example_spec(2));
    EXPECT_EQ(v2.regime, Regime::OneSidedBlowup);
    EXPECT_EQ(v2.theorem_tag, "Thm 4.2(1)");
    EXPECT_EQ(v2.rho_fate, RhoFate::Bounded);
    EXPECT_NEAR(v2.t_limit.value, 0.86, 0.02);

    auto v3 = classify(example_spec(3));
    EXPECT_EQ(v3.regime, Regime::InvertedTwoSided);
    EXPECT_EQ(v3.theorem_tag, "Thm 4.4");
    EXPECT_EQ(v3.rho_fate_elsewhere, RhoFate::VanishesAtTstar);

    auto v4 = classify(example_spec(4));
    EXPECT_EQ(v4.regime, Regime::SteadyStateFiniteTime);
    EXPECT_EQ(v4.theorem_tag, "Thm 4.1");
    EXPECT_TRUE(v4.t_limit.finite);
    EXPECT_NEAR(v4.t_limit.value, 2.06, 0.01);
    EXPECT_NEAR(v4.curly_m.value(), 7.0 / 12, 1e-10);
}

TEST(Classifier, SpecialParameterBranches) {
    EXPECT_EQ(classify(spec(0, 1, "cos2pi")).regime, Regime::SpecialLambdaZero);
    EXPECT_EQ(classify(spec(0, 1, "cos2pi")).theorem_tag, "App A.4");
    EXPECT_EQ(classify(spec(1, 0, "cos2pi")).regime, Regime::GiPJReduction);
    EXPECT_EQ(classify(spec(1, 0, "const", {1.0})).regime, Regime::Trivial);
    EXPECT_EQ(classify(spec(1, -1, "const", {0.0})).regime, Regime::Trivial);
    EXPECT_EQ(classify(spec(1, 1, "const", {0.0})).regime, Regime::GiPJReduction);
    EXPECT_EQ(classify(spec(1, 1, "const", {0.0})).theorem_tag, "App A.3");
}

TEST(Classifier, PiecewiseDoubleRoot) {
    const auto v = classify(ProblemSpec{1, 1, make_builtin("piecewise_c2", {}), {}});
    EXPECT_EQ(v.multiplicity, Multiplicity::Double);
    EXPECT_NEAR(v.eta_star.value(), 1.0, 1e-12);
    EXPECT_EQ(v.regime, Regime::GlobalNontrivialSteady);
    EXPECT_EQ(v.theorem_tag, "Cor C.2(1)");
}

TEST(Classifier, MixedSignBranchesByLambda) {
    EXPECT_EQ(classify(spec(-1, 1, "sin2pi")).regime, Regime::OneSidedBlowup);
    EXPECT_EQ(classify(spec(-3, 1, "sin2pi")).regime, Regime::TwoSidedEverywhereBlowup);
    EXPECT_EQ(classify(spec(-2, 1, "sin2pi")).regime, Regime::TwoSidedEverywhereBlowup);
    EXPECT_EQ(classify(spec(0.5, -1, "sin2pi")).regime, Regime::GlobalDecay);
    EXPECT_EQ(classify(spec(1, -1, "sin2pi")).regime, Regime::GlobalNontrivialSteady);
    EXPECT_EQ(classify(spec(1.5, -1, "sin2pi")).regime, Regime::InvertedTwoSided);
}

TEST(Classifier, SameSignSingleBranches) {
    EXPECT_EQ(classify(spec(-0.5, -1, "cos2pi", {1.0})).regime, Regime::OneSidedBlowup);
    EXPECT_EQ(classify(spec(-1, -1, "cos2pi", {1.0})).regime, Regime::TwoSidedEverywhereBlowup);
    const auto v = classify(spec(1.5, 1, "cos2pi", {1.0}));
    EXPECT_EQ(v.regime, Regime::InvertedTwoSided);
    EXPECT_EQ(v.rho_fate_elsewhere, RhoFate::ConvergesNontrivial);
}

TEST(Classifier, ZeroRhoMatchesDoubleRootTables) {
    for (double lam : {-3.0, -1.0, 0.5, 1.0, 3.0}) {
        const auto a = classify(spec(lam, 1, "cos2pi", {0.0}));
        const auto b = classify(spec(lam, -1, "cos2pi", {0.0}));
        EXPECT_EQ(a.multiplicity, Multiplicity::Double);
        EXPECT_EQ(a.regime, b.regime);
        EXPECT_EQ(a.theorem_tag.substr(0, 5), "Cor C");
        const auto ra = predicted_rates(spec(lam, 1, "cos2pi", {0.0}), a);
        EXPECT_EQ(ra.pbar0_exp, predicted_rates(spec(lam, -1, "cos2pi", {0.0}), b).pbar0_exp);
    }
}

TEST(Classifier, PredictedTables) {
    const auto s3 = example_spec(3);
    const auto p3 = predicted_rates(s3, classify(s3));
    EXPECT_TRUE(p3.log_flag);
    EXPECT_DOUBLE_EQ(p3.i2_exp.value(), -1.0);

    const auto s = spec(0.5, 1, "cos2pi", {1.0});
    const auto p = predicted_rates(s, classify(s));
    EXPECT_DOUBLE_EQ(p.pbar0_exp.value(), -0.5);
    EXPECT_DOUBLE_EQ(p.i2_exp.value(), -1.5);

    const auto d = spec(3, -1, "sin2pi");
    const auto pd = predicted_rates(d, classify(d));
    EXPECT_DOUBLE_EQ(pd.pbar0_exp.value(), 0.0);
    EXPECT_NEAR(pd.i2_exp.value(), -(0.5 + 1.0 / 3), 1e-15);
}

TEST(Classifier, MeasuredRatesOnWorkedExamples) {
    const auto c1 = make_context(example_spec(1));
    const auto m1 = fit_rates(c1, classify(c1));
    EXPECT_NEAR(m1.ux_at_abar_exp, -1.0, 0.05);

    const auto c3 = make_context(example_spec(3));
    const auto m3 = fit_rates(c3, classify(c3));
    EXPECT_NEAR(m3.i2_exp.value(), -1.0, 0.05);
    EXPECT_TRUE(m3.log_flag);

    const auto c4 = make_context(example_spec(4));
    const auto m4 = fit_rates(c4, classify(c4));
    EXPECT_TRUE(m4.large_eta);
    EXPECT_NEAR(m4.pbar0_exp.value(), 2.0, 0.05);
}

TEST(Classifier, RateMatrixAgrees) {
    for (const char* fam : {"cos2pi", "const"})
        for (double lam : {-3.0, -1.0, -0.5, 0.25, 1.0, 3.0})
            for (double kap : {-1.0, 1.0}) {
                const auto s = spec(lam, kap, fam, {1.0});
                const auto ctx = make_context(s);
                const auto v = classify(ctx);
                EXPECT_NE(v.regime, Regime::Unclassified);
                EXPECT_TRUE(rates_agree(predicted_rates(s, v), fit_rates(ctx, v))) << fam << " " << lam << " " << kap;
            }
}

TEST(Classifier, LogarithmicDoubleRoot) {
    const auto s = spec(2, 1, "cos2pi", {0.0});
    const auto ctx = make_context(s);
    const auto v = classify(ctx);
    const auto p = predicted_rates(s, v);
    const auto m = fit_rates(ctx, v);
    EXPECT_TRUE(p.log_flag);
    EXPECT_TRUE(m.log_flag);
    EXPECT_TRUE(rates_agree(p, m));
}

TEST(Classifier, SteadyRegimeConsistency) {
    for (double lam : {-3.0, -0.5, 0.5, 3.0}) {
        const auto s = spec(lam, -lam, "cos2pi", {1.0});
        const auto v = classify(s);
        ASSERT_EQ(v.regime, Regime::SteadyStateFiniteTime);
        EXPECT_TRUE(v.t_limit.finite);
        EXPECT_NO_THROW(steady_constants(s));
    }
}

TEST(Classifier, RatesAgreeTolerance) {
    RateTable a, b;
    a.pbar0_exp = -0.5;
    b.pbar0_exp = -0.53;
    EXPECT_TRUE(rates_agree(a, b));
    b.pbar0_exp = -0.6;
    EXPECT_FALSE(rates_agree(a, b));
}
