#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hs/cli.hpp"
#include "hs/errors.hpp"
#include "hs/evaluator.hpp"

using namespace hs;

namespace {

std::vector<double> grid(int n) {
    std::vector<double> a(n + 1);
    for (int i = 0; i <= n; ++i) a[i] = double(i) / n;
    return a;
}

double top_eta(const Context& ctx) { return ctx.report.eta_star ? 0.9 * *ctx.report.eta_star : 10.0; }

}  // namespace

TEST(Evaluator, InitialSlice) {
    for (int id = 1; id <= 4; ++id) {
        const auto ctx = make_context(example_spec(id));
        for (double a : {0.0, 0.1, 0.5, 0.83}) {
            EXPECT_NEAR(jacobian(ctx, a, 0.0), 1.0, 1e-15);
            EXPECT_NEAR(eval_ux(ctx, a, 0.0), ctx.spec.data.u0_prime(a), 1e-12);
            EXPECT_NEAR(eval_rho(ctx, a, 0.0), ctx.spec.data.rho0(a), 1e-14);
            if (ctx.spec.data.bc_mode == BcMode::Periodic) EXPECT_NEAR(trajectory(ctx, a, 0.0), a, 1e-12);
        }
        const auto sl = eulerian_slice(ctx, 0.0, 33);
        for (const auto& r : sl) EXPECT_NEAR(r.x, r.alpha, 1e-12);
    }
}

TEST(Evaluator, ExampleOneClosedForms) {
    const auto ctx = make_context(example_spec(1));
    const double t = 1.0;
    EXPECT_NEAR(eval_ux(ctx, 0.0, t), 10.0 / 17, 1e-10);
    EXPECT_NEAR(eval_rho(ctx, 0.5, t), 4.0, 1e-10);
    EXPECT_NEAR(jacobian(ctx, 0.5, t), (8 - 8 * t + t * t) / 8, 1e-10);
}

TEST(Evaluator, DivergesTowardBlowup) {
    const auto ctx = make_context(example_spec(1));
    const double es = *ctx.report.eta_star;
    double prev = 0;
    for (int k = 2; k <= 12; ++k) {
        const double eta = es * (1 - std::ldexp(1.0, -k));
        const double ux = eval_ux(ctx, 0.5, eta);
        EXPECT_LT(ux, prev);
        prev = ux;
    }
    EXPECT_THROW(eval_ux(ctx, 0.5, es * (1 - 1e-8)), BlowupProximity);
}

TEST(Evaluator, RhoVanishesAwayFromBlowupForLambdaOne) {
    const auto ctx = make_context(example_spec(3));
    const double es = *ctx.report.eta_star;
    EXPECT_LT(std::abs(eval_rho(ctx, 0.25, es * (1 - 1e-5))), std::abs(eval_rho(ctx, 0.25, 0.5 * es)));
    EXPECT_LT(std::abs(eval_rho(ctx, 0.25, es * (1 - 1e-5))), 0.1);
}

TEST(Evaluator, PropertiesOnRandomEta) {
    std::mt19937_64 rng(17);
    std::vector<ProblemSpec> specs;
    for (int id = 1; id <= 4; ++id) specs.push_back(example_spec(id));
    specs.push_back({1, 1, make_builtin("piecewise_c2", {}), {}});
    for (const auto& s : specs) {
        const auto ctx = make_context(s);
        std::uniform_real_distribution<double> U(0, top_eta(ctx));
        for (int k = 0; k < 20; ++k) {
            const double eta = U(rng);
            const auto st = eta_state(ctx, eta);
            const auto mean = integrate([&](double a) { return sample_at(ctx, st, a).jac; }, ctx.breaks, 1e-12, 1e-11);
            EXPECT_NEAR(mean.value, 1.0, 10 * s.tol.quad_abs);
            const auto flux = integrate(
                [&](double a) {
                    const auto p = sample_at(ctx, st, a);
                    return p.ux * p.jac;
                },
                ctx.breaks, 1e-12, 1e-11);
            EXPECT_NEAR(flux.value, 0.0, 1e-7);
            for (double a : grid(40)) {
                const auto p = sample_at(ctx, st, a);
                const double r0 = s.data.rho0(a);
                EXPECT_GT(p.jac, 0.0);
                EXPECT_NEAR(p.rho, r0 * std::pow(p.jac, 2 * s.lambda), 1e-8 * std::max(1.0, std::abs(p.rho)));
                EXPECT_EQ(std::signbit(p.rho) && p.rho != 0, std::signbit(r0) && r0 != 0);
                if (r0 == 0.0) EXPECT_EQ(p.rho, 0.0);
            }
        }
    }
}

TEST(Evaluator, DirichletTrajectoryEndpoints) {
    const auto ctx = make_context(example_spec(4));
    for (double eta : {0.0, 0.5, 3.0, 20.0}) {
        EXPECT_NEAR(trajectory(ctx, 0.0, eta), 0.0, 1e-12);
        EXPECT_NEAR(trajectory(ctx, 1.0, eta), 1.0, 1e-10);
    }
}

TEST(Evaluator, CharacteristicVelocityConsistency) {
    // In Dirichlet mode d gamma / dt must equal u along the characteristic,
    // and u = int_0^gamma u_x dx = int_0^alpha (u_x o gamma) jac.
    const auto ctx = make_context(example_spec(4));
    for (double eta : {0.5, 2.0}) {
        const double h = 1e-4;
        const double dt = time_of_eta(ctx, eta + h) - time_of_eta(ctx, eta - h);
        for (double a : {0.2, 0.5, 0.7}) {
            const double vel = (trajectory(ctx, a, eta + h) - trajectory(ctx, a, eta - h)) / dt;
            const auto st = eta_state(ctx, eta);
            const auto u = integrate(
                [&](double y) {
                    const auto p = sample_at(ctx, st, y);
                    return p.ux * p.jac;
                },
                0.0, a, 1e-12, 1e-11);
            EXPECT_NEAR(vel, u.value, 1e-4);
        }
    }
}

TEST(Evaluator, PeriodicTrajectoryKeepsMeanZeroVelocity) {
    const auto ctx = make_context(example_spec(2));
    const double eta = 0.5 * *ctx.report.eta_star, h = 1e-4;
    const double dt = time_of_eta(ctx, eta + h) - time_of_eta(ctx, eta - h);
    const auto st = eta_state(ctx, eta);
    const auto mean_u = integrate(
        [&](double a) {
            const double vel = (trajectory(ctx, a, eta + h) - trajectory(ctx, a, eta - h)) / dt;
            return vel * sample_at(ctx, st, a).jac;
        },
        ctx.breaks, 1e-9, 1e-8);
    EXPECT_NEAR(mean_u.value, 0.0, 1e-5);
}

TEST(Evaluator, SliceIsSortedAndSerialMatchesOpenMP) {
    const auto ctx = make_context(example_spec(4));
    const auto sl = eulerian_slice(ctx, 5.0, 257);
    for (std::size_t i = 1; i < sl.size(); ++i) EXPECT_GT(sl[i].x, sl[i - 1].x);

    for (int id = 1; id <= 4; ++id) {
        const auto c = make_context(example_spec(id));
        const double eta = 0.5 * top_eta(c);
        const auto a = evaluate_grid(c, eta, grid(256), true, Exec::Serial);
        const auto b = evaluate_grid(c, eta, grid(256), true, Exec::OpenMP);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].ux, b[i].ux);
            EXPECT_EQ(a[i].rho, b[i].rho);
            EXPECT_EQ(a[i].jac, b[i].jac);
            EXPECT_EQ(a[i].gamma, b[i].gamma);
        }
    }
}

TEST(Evaluator, SteadyStateExampleFour) {
    const auto ss = steady_constants(example_spec(4));
    EXPECT_NEAR(ss.curly_m, 7.0 / 12, 1e-12);
    for (double a : grid(63)) EXPECT_NEAR(ss.p_inf(a), 7.0 / (3 * (4 * a * a - 4 * a + 3)), 1e-10);
    EXPECT_NEAR(ss.p_inf(0.0), 7.0 / 9, 1e-12);
}

TEST(Evaluator, SteadyStateSwapped) {
    const auto ss = steady_constants({0.5, -1, make_builtin("affine", {}, BcMode::Dirichlet), {}});
    const double acot = std::atan(1 / std::sqrt(2.0));
    for (double a : grid(16)) EXPECT_NEAR(ss.p_inf(a), std::sqrt(2.0) / ((4 * a * a - 4 * a + 3) * acot), 1e-8);
}

TEST(Evaluator, SteadyStateConvergence) {
    // The approach to the steady profile is exactly first order in 1/eta.
    const auto s = example_spec(4);
    const auto ctx = make_context(s);
    const auto ss = steady_constants(s);
    double prev = INFINITY, scaled = 0;
    for (double eta : {10.0, 100.0, 1000.0, 10000.0}) {
        double worst = 0;
        for (double a : grid(32)) worst = std::max(worst, std::abs(eval_ux(ctx, a, eta) - ss.u_inf(a)));
        EXPECT_LT(worst, prev);
        if (eta > 100) EXPECT_NEAR(worst * eta, scaled, 1e-2 * scaled);
        scaled = worst * eta;
        prev = worst;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Evaluator, SteadyStateHypotheses) {
    EXPECT_THROW(steady_constants(example_spec(3)), HypothesisViolated);
    EXPECT_THROW(steady_constants({-1, 1, make_builtin("sin2pi", {}), {}}), HypothesisViolated);
}

TEST(Evaluator, KappaZeroRefused) {
    const ProblemSpec s{1, 0, make_builtin("cos2pi", {}), {}};
    const auto ctx = make_context(s);
    EXPECT_THROW(eval_ux(ctx, 0.3, 0.1), SpecialCase);
}
