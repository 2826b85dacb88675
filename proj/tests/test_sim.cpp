#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sbc/sim.hpp"

using namespace sbc;

namespace {

SffModel benchmark_model() {
    std::vector<SubsystemSpec> subs(3);
    subs[0].theta = {1.0, 5.0};
    subs[0].regressors = {parse("x1^3")};
    subs[0].gain = parse("1");
    subs[1].theta = {1.0, 5.0};
    subs[1].regressors = {parse("x1^2 + x2^2")};
    subs[1].gain = parse("1");
    subs[2].theta = {1.0};
    subs[2].gain = parse("1");
    return SffModel(std::move(subs));
}

ControllerConfig adaptive_controller(double th12, double th22) {
    ProjectionConfig p12;
    p12.rho = 1000.0;
    p12.sigma = 1.0;
    p12.lower = 1.0;
    p12.upper = 9.0;
    p12.activation = 0.5;
    p12.smoothness_order = 2;
    ProjectionConfig p22 = p12;
    p22.rho = 2.0;
    p22.sigma = 500.0;
    p22.smoothness_order = 1;
    ControllerConfig cfg;
    cfg.mode = ControlMode::Adaptive;
    cfg.lambda = {10.0, 20.0, 40.0};
    cfg.delta = {10.0, 20.0};
    cfg.theta = {{ParameterLaw{1.0, false, std::nullopt}, ParameterLaw{th12, true, p12}},
                 {ParameterLaw{1.0, false, std::nullopt}, ParameterLaw{th22, true, p22}},
                 {ParameterLaw{1.0, false, std::nullopt}}};
    return cfg;
}

ControllerConfig fixed_controller(double th12, double th22) {
    ControllerConfig cfg = adaptive_controller(th12, th22);
    cfg.mode = ControlMode::Fixed;
    cfg.theta[0][1].adapt = false;
    cfg.theta[1][1].adapt = false;
    return cfg;
}

const char* kTrajectoryText =
    "piecewise(t < 5 : sin(2*pi*t)*tanh(t^3), sin(2*pi*t)*tanh(t^3)*(1 - tanh((t-5)^3)))";

bool rows_equal(const Trace& a, const Trace& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const TraceRow& ra = a.rows[i];
        const TraceRow& rb = b.rows[i];
        if (ra.t != rb.t || ra.u != rb.u || ra.nu_tot != rb.nu_tot) return false;
        if (ra.x != rb.x || ra.xd != rb.xd || ra.e != rb.e) return false;
        if (ra.theta_hat != rb.theta_hat || ra.s != rb.s) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("equilibrium stays identically zero") {
    const SffModel m = benchmark_model();
    SimConfig sim;
    sim.dt = 1e-3;
    sim.duration = 0.5;
    sim.record_stride = 10;
    const Trace tr = simulate(m, fixed_controller(5.0, 5.0), parse("0"), sim);
    for (const TraceRow& row : tr.rows) {
        for (double v : row.x) CHECK(v == 0.0);
        for (double v : row.e) CHECK(v == 0.0);
        CHECK(row.u == 0.0);
        CHECK(row.nu_tot == 0.0);
    }
}

TEST_CASE("identical configs give bit-identical traces") {
    const SffModel m = benchmark_model();
    SimConfig sim;
    sim.dt = 1e-4;
    sim.duration = 0.3;
    sim.record_stride = 7;
    const Expr traj = parse(kTrajectoryText);
    const Trace a = simulate(m, adaptive_controller(6.0, 4.0), traj, sim);
    const Trace b = simulate(m, adaptive_controller(6.0, 4.0), traj, sim);
    CHECK(rows_equal(a, b));
}

TEST_CASE("reference jet of the benchmark trajectory") {
    const Expr traj = parse(kTrajectoryText);

    const Jet at0 = reference_jet(traj, 0.0, 3);
    for (int i = 0; i <= 3; ++i) CHECK(at0[i] == 0.0);  // triple zero of tanh(t^3)

    const Jet at_quarter = reference_jet(traj, 0.25, 3);
    CHECK(at_quarter.value() == doctest::Approx(std::tanh(0.015625)).epsilon(1e-12));
    CHECK(at_quarter.value() == doctest::Approx(0.015624).epsilon(1e-4));

    // Beyond t = 5 the decay factor kills the signal.
    const Jet at8 = reference_jet(traj, 8.0, 3);
    CHECK(std::fabs(at8.value()) < 1e-10);

    // The two branches agree to jet order 3 at the seam.
    const Jet left = reference_jet(traj, 5.0 - 1e-9, 3);
    const Jet right = reference_jet(traj, 5.0 + 1e-9, 3);
    for (int i = 0; i <= 3; ++i) CHECK(left[i] == doctest::Approx(right[i]).epsilon(1e-6));
}

TEST_CASE("record stride and final row") {
    const SffModel m = benchmark_model();
    SimConfig sim;
    sim.dt = 1e-3;
    sim.duration = 0.0103;  // 10.3 steps rounds to 10; final row off the stride
    sim.record_stride = 4;
    const Trace tr = simulate(m, fixed_controller(5.0, 5.0), parse("0"), sim);
    REQUIRE(tr.rows.size() == 4);  // steps 0, 4, 8, final 10
    CHECK(tr.rows.back().t == doctest::Approx(0.010).epsilon(1e-12));
}

TEST_CASE("halving the step barely moves the windowed error maxima") {
    const SffModel m = benchmark_model();
    const Expr traj = parse(kTrajectoryText);
    SimConfig coarse;
    coarse.dt = 1e-4;
    coarse.duration = 1.5;
    coarse.record_stride = 1;
    SimConfig fine = coarse;
    fine.dt = 5e-5;

    const RunMetrics mc = metrics(simulate(m, adaptive_controller(6.0, 4.0), traj, coarse));
    const RunMetrics mf = metrics(simulate(m, adaptive_controller(6.0, 4.0), traj, fine));
    CHECK(std::fabs(mc.max_abs_e[0] - mf.max_abs_e[0]) / mf.max_abs_e[0] < 0.01);
}

TEST_CASE("rk4 and euler agree at the benchmark step size") {
    // All three error maxima live near t = 1, so a 1.5 s window measures the
    // genuine run maxima. Measured integrator sensitivity at dt = 1e-5:
    // 0.05% / 0.02% / 0.84% per channel; the bound pins 1%.
    const SffModel m = benchmark_model();
    const Expr traj = parse(kTrajectoryText);
    SimConfig rk;
    rk.dt = 1e-5;
    rk.duration = 1.5;
    rk.record_stride = 10;
    SimConfig eu = rk;
    eu.integrator = IntegratorKind::Euler;

    const RunMetrics mr = metrics(simulate(m, adaptive_controller(6.0, 4.0), traj, rk));
    const RunMetrics me = metrics(simulate(m, adaptive_controller(6.0, 4.0), traj, eu));
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::fabs(mr.max_abs_e[k] - me.max_abs_e[k]) / mr.max_abs_e[k] < 0.01);
}

TEST_CASE("numerical aborts carry time and channel") {
    // Gain that vanishes at the initial state.
    std::vector<SubsystemSpec> subs(2);
    subs[0].theta = {1.0};
    subs[0].gain = parse("x1");
    subs[1].theta = {1.0};
    subs[1].gain = parse("1");
    const SffModel degenerate(std::move(subs));
    ControllerConfig cfg;
    cfg.mode = ControlMode::Fixed;
    cfg.lambda = {1.0, 1.0};
    cfg.delta = {1.0};
    cfg.theta = {{ParameterLaw{1.0}}, {ParameterLaw{1.0}}};
    SimConfig sim;
    sim.dt = 1e-3;
    sim.duration = 0.1;
    CHECK_THROWS_AS(simulate(degenerate, cfg, parse("sin(t)"), sim), NumericError);

    // Reference that overflows to inf mid-run.
    std::vector<SubsystemSpec> chain(1);
    chain[0].theta = {1.0};
    chain[0].gain = parse("1");
    const SffModel one(std::move(chain));
    ControllerConfig c1;
    c1.mode = ControlMode::Fixed;
    c1.lambda = {1.0};
    c1.theta = {{ParameterLaw{1.0}}};
    SimConfig fast;
    fast.dt = 0.25;
    fast.duration = 12.0;
    fast.record_stride = 1;
    try {
        simulate(one, c1, parse("exp(t^3)"), fast);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.t > 0.0);
    }
}

TEST_CASE("config validation") {
    const SffModel m = benchmark_model();
    SimConfig sim;
    sim.dt = 0.0;
    CHECK_THROWS_AS(sim.validate(3), ValidationError);
    sim.dt = 1e-3;
    sim.duration = 1e-5;
    CHECK_THROWS_AS(sim.validate(3), ValidationError);
    sim.duration = 1.0;
    sim.x0 = {1.0};
    CHECK_THROWS_AS(sim.validate(3), ValidationError);
    sim.x0 = {0.0, 0.0, 0.0};
    CHECK_NOTHROW(sim.validate(3));
    CHECK_THROWS_AS(simulate(m, fixed_controller(5, 5), parse("x1"), sim), ValidationError);
}

}  // TEST_SUITE
