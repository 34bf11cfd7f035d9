#include "doctest.h"

#include <cmath>

#include "vortctl/sim.hpp"

using namespace vortctl;

namespace {

SimConfig quiet_config(double t_end, double dt) {
    SimConfig cfg = example1_config(0);
    cfg.forcing.f = [](double, Vec2) { return 0.0; };
    cfg.forcing.w0 = [](Vec2) { return 0.0; };
    cfg.t_end = t_end;
    cfg.dt = dt;
    return cfg;
}

}  // namespace

TEST_CASE("zero data stays zero") {
    SimConfig cfg = quiet_config(0.05, 1e-3);
    SimRun run = run_pair(cfg);
    REQUIRE_FALSE(run.aborted);
    for (const SimRecord& r : run.series) {
        CHECK(r.w_h == 0.0);
        CHECK(r.wt_h == 0.0);
    }
}

TEST_CASE("pure heat step matches the analytic decay factor") {
    // convection disabled; eigenfunction initial data
    SimConfig cfg = quiet_config(1.0, 1e-4);
    cfg.conv_scale = 0.0;
    cfg.nu = 1.0;
    Simulation sim(cfg);
    const VorticityOps& ops = sim.ops();
    const Mesh& mesh = sim.mesh();

    // discrete first eigenfunction by inverse iteration
    Vector w = interpolate(mesh, [](Vec2 p) { return p.x * p.y * 0.3 + 0.1; });
    for (int i = 0; i < 200; ++i) {
        for (int k = 0; k < mesh.node_count(); ++k)
            if (mesh.on_boundary[k]) w[k] = 0.0;
        w = ops.stream_function(w);
        w /= ops.norm_h(w);
    }
    const double lambda_h = ops.seminorm_v(w) * ops.seminorm_v(w);

    const Stepper stepper(ops, cfg.nu, cfg.dt, 0.0);
    const Vector zero = Vector::Zero(mesh.node_count());
    Vector w1 = stepper.step(w, zero, zero, zero);
    const double ratio = ops.norm_h(w1) / ops.norm_h(w);
    const double exact = std::exp(-cfg.nu * lambda_h * cfg.dt);
    // implicit Euler: both equal 1 - nu lam dt + O(dt^2)
    const double budget = 2.0 * (cfg.nu * lambda_h * cfg.dt) * (cfg.nu * lambda_h * cfg.dt);
    CHECK(std::abs(ratio - exact) < budget);
}

TEST_CASE("free run with identical initial data keeps z at zero") {
    SimConfig cfg = example1_config(0);
    cfg.t_end = 0.05;
    cfg.forcing.w0 = cfg.forcing.wt0;
    SimRun run = run_pair(cfg);
    REQUIRE_FALSE(run.aborted);
    for (const SimRecord& r : run.series) CHECK(r.z_h <= 1e-12);
}

TEST_CASE("lyapunov sanity: no forcing, no control, H-norm nonincreasing") {
    SimConfig cfg = quiet_config(0.2, 1e-3);
    cfg.forcing.w0 = [](Vec2 p) { return std::sin(3 * p.x) * p.y + 0.5 * p.x; };
    SimRun run = run_pair(cfg);
    REQUIRE_FALSE(run.aborted);
    for (std::size_t i = 1; i < run.series.size(); ++i)
        CHECK(run.series[i].w_h <= run.series[i - 1].w_h * (1 + 1e-12));
}

TEST_CASE("decay estimator") {
    SUBCASE("synthetic exponential") {
        std::vector<double> t, z;
        for (int i = 0; i <= 1000; ++i) {
            t.push_back(i * 0.01);
            z.push_back(std::exp(-2.0 * i * 0.01));
        }
        const DecayFit fit = estimate_decay(t, z);
        REQUIRE(fit.valid);
        CHECK(fit.mu_hat == doctest::Approx(2.0).epsilon(1e-6));
        CHECK_FALSE(fit.floor_flag);
    }
    SUBCASE("floor saturation excluded from the window") {
        std::vector<double> t, z;
        for (int i = 0; i <= 2000; ++i) {
            t.push_back(i * 0.02);
            const double v = std::exp(-3.0 * i * 0.02);
            z.push_back(std::max(v, 1e-16 * (1.0 + 0.5 * std::sin(10.0 * i))));
        }
        const DecayFit fit = estimate_decay(t, z);
        REQUIRE(fit.valid);
        CHECK(fit.floor_flag);
        CHECK(fit.mu_hat == doctest::Approx(3.0).epsilon(1e-3));
        CHECK(fit.t_hi < t.back());
    }
    SUBCASE("all samples at the floor") {
        const std::vector<double> t{0, 1, 2, 3}, z{0, 0, 0, 0};
        const DecayFit fit = estimate_decay(t, z);
        CHECK_FALSE(fit.valid);
        CHECK(fit.floor_flag);
    }
    SUBCASE("too few samples") {
        const std::vector<double> t{0, 1, 2}, z{1, 0.1, 0.01};
        CHECK_FALSE(estimate_decay(t, z).valid);
    }
}

TEST_CASE("example 1 data") {
    CHECK(example1_forcing(0.0, {1.0, 1.0}) == 2.0);
    // sign(0) = 0 on the discontinuity line x2 = 0.3 at t = 0 (exact zero)
    CHECK(example1_forcing(0.0, {1.0, 0.3}) == 0.0);
    const ForcingSpec s = forcing_example1();
    CHECK(s.w0({0.0, 0.7}) == 1.0);
    CHECK(s.g(3.0, {0.1, 0.1}) == 0.0);
}

TEST_CASE("example 2 data") {
    const ForcingSpec s = forcing_example2();
    CHECK(s.exact(0.0, {0.9, 0.2}) == 0.0);  // consistent with wt0 = 0
    CHECK(s.wt0({0.3, 0.3}) == 0.0);
    CHECK(s.exact_rate(0.7, {0.9, 0.2}) ==
          doctest::Approx(2.0 * std::cos(1.4) * 0.5).epsilon(1e-15));
    CHECK(s.g(0.7, {0.9, 0.2}) == s.exact(0.7, {0.9, 0.2}));
}

TEST_CASE("example 2 free target tracks the exact solution") {
    SimConfig cfg = example2_config(0);
    cfg.t_end = 0.5;
    SimRun coarse = run_pair(cfg);
    REQUIRE_FALSE(coarse.aborted);
    CHECK(coarse.error_vs_exact < 5e-3);

    cfg.dt *= 0.5;  // time error dominates; halving dt halves the error
    SimRun finer = run_pair(cfg);
    REQUIRE_FALSE(finer.aborted);
    CHECK(finer.error_vs_exact < coarse.error_vs_exact);
    CHECK(finer.error_vs_exact == doctest::Approx(0.5 * coarse.error_vs_exact).epsilon(0.2));
}

TEST_CASE("observer mode reproduces the controlled trajectory") {
    SimConfig cfg = example1_config(0);
    cfg.t_end = 0.2;
    cfg.mode = RunMode::controlled;
    cfg.lambda = 1.0;
    cfg.M = 2;
    SimRun controlled = run_pair(cfg);
    REQUIRE_FALSE(controlled.aborted);

    cfg.mode = RunMode::observer;
    SimRun observer = run_pair(cfg);
    REQUIRE_FALSE(observer.aborted);

    REQUIRE(controlled.series.size() == observer.series.size());
    for (std::size_t i = 0; i < controlled.series.size(); ++i) {
        CHECK(std::abs(controlled.series[i].z_h - observer.series[i].z_h) < 1e-10);
        CHECK(std::abs(controlled.series[i].w_h - observer.series[i].w_h) < 1e-10);
    }
}

TEST_CASE("overflow guard aborts unstable runs") {
    SimConfig cfg = example1_config(0);
    cfg.t_end = 2.0;
    cfg.mode = RunMode::controlled;
    cfg.lambda = 1e4;  // way past the explicit-feedback stability limit
    SimRun run = run_pair(cfg);
    CHECK(run.aborted);
    CHECK_FALSE(run.abort_reason.empty());
}

TEST_CASE("snapshots are captured at the requested times") {
    SimConfig cfg = quiet_config(0.1, 1e-3);
    cfg.forcing.w0 = [](Vec2 p) { return p.x; };
    cfg.snapshot_times = {0.05, 0.1};
    Simulation sim(cfg);
    SimRun run = sim.run();
    REQUIRE(run.snapshots.size() == 2);
    CHECK(run.snapshots[0].t == doctest::Approx(0.05));
    CHECK(run.snapshots[1].t == doctest::Approx(0.1));
    CHECK(run.snapshots[0].w.size() == sim.mesh().node_count());
    CHECK(run.snapshots[0].psi_ctrl.norm() == 0.0);
}

TEST_CASE("observer measurements") {
    SimConfig cfg = example1_config(0);
    cfg.t_end = 0.1;
    cfg.mode = RunMode::observer;
    Simulation sim(cfg);
    const int n = sim.mesh().node_count();
    const auto& fam = sim.family();
    const SpdMatrix mass = assemble_mass(sim.mesh());

    SUBCASE("zero target measures zero") {
        CHECK(sim.observer_step_inputs(Vector::Zero(n)).norm() == 0.0);
    }
    SUBCASE("an actuator field measures its own H-norm squared") {
        const Eigen::VectorXd s = sim.observer_step_inputs(fam.v_fields[0]);
        CHECK(s[0] == doctest::Approx(norm_h(mass, fam.v_fields[0]) *
                                      norm_h(mass, fam.v_fields[0])).epsilon(1e-12));
        for (int j = 1; j < s.size(); ++j) CHECK(s[j] == 0.0);  // disjoint supports
    }
}

TEST_CASE("controlled rate is nondecreasing in lambda while stable") {
    // Sample the pre-saturation range: the rate saturates near the
    // constrained-eigenvalue ceiling already around lambda = 5e-3, after
    // which the fitted value flattens (floor and fit-window effects), and
    // lambda = 10 exceeds the explicit-feedback stability bound at this
    // step size (covered by the overflow-guard test).
    double prev = -1.0;
    for (double lam : {0.0, 1e-4, 1e-3}) {
        SimConfig cfg = example1_config(0);
        cfg.t_end = 4.0;
        cfg.stride = 10;
        cfg.mode = RunMode::controlled;
        cfg.M = 2;
        cfg.lambda = lam;
        const SimRun run = run_pair(cfg);
        REQUIRE_FALSE(run.aborted);
        REQUIRE(run.decay.valid);
        CHECK(run.decay.mu_hat >= prev);
        prev = run.decay.mu_hat;
    }
}
