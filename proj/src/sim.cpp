#include "vortctl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vortctl {

namespace {

double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

bool finite_field(const Vector& w, double guard) {
    for (int i = 0; i < w.size(); ++i)
        if (!std::isfinite(w[i]) || std::abs(w[i]) > guard) return false;
    return true;
}

}  // namespace

double example1_forcing(double t, Vec2 x) {
    return 2.0 * std::cos(2.0 * t) * sign0(x.x - 0.3 + 0.1 * std::cos(4.0 * t)) *
           sign0(x.y - 0.3 + 0.1 * std::sin(4.0 * t));
}

ForcingSpec forcing_example1() {
    ForcingSpec s;
    s.f = example1_forcing;
    s.g = [](double, Vec2) { return 0.0; };
    s.w0 = [](Vec2 x) { return -2.0 * std::sin(3.0 * x.x) + 1.0; };
    s.wt0 = [](Vec2) { return 0.0; };
    return s;
}

ForcingSpec forcing_example2() {
    ForcingSpec s;
    s.manufactured = true;
    s.exact = [](double t, Vec2 x) { return std::sin(2.0 * t) * (x.x - 0.4); };
    s.exact_rate = [](double t, Vec2 x) { return 2.0 * std::cos(2.0 * t) * (x.x - 0.4); };
    s.g = s.exact;  // boundary trace of the exact target
    s.w0 = [](Vec2 x) { return -10.0 * std::sin(3.0 * x.x) * std::sin(4.0 * x.y) + 5.0; };
    s.wt0 = [](Vec2) { return 0.0; };
    return s;
}

SimConfig example1_config(int mesh_level) {
    SimConfig cfg;
    cfg.preset = Preset::example1;
    cfg.nu = 0.01;
    cfg.conv_scale = 1.0;
    cfg.mesh_level = mesh_level;
    cfg.dt = 4e-4 * std::pow(2.0, -mesh_level);
    cfg.t_end = 24.0;
    cfg.forcing = forcing_example1();
    return cfg;
}

SimConfig example2_config(int mesh_level) {
    SimConfig cfg;
    cfg.preset = Preset::example2;
    // the printed manufactured forcing solves the time-rescaled dynamics:
    // unit diffusion, 1/nu on the convection term
    cfg.nu = 1.0;
    cfg.conv_scale = 100.0;
    cfg.mesh_level = mesh_level;
    cfg.dt = 4e-4 * std::pow(2.0, -mesh_level);
    cfg.t_end = 4.0;
    cfg.forcing = forcing_example2();
    return cfg;
}

DecayFit estimate_decay(const std::vector<double>& t, const std::vector<double>& z_h) {
    if (t.size() != z_h.size()) throw std::invalid_argument("estimate_decay: size mismatch");
    DecayFit fit;
    if (t.empty()) {
        fit.note = "empty series";
        return fit;
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double floor = 100.0 * eps * z_h[0];
    std::size_t n = 0;
    while (n < z_h.size() && z_h[n] > floor) ++n;
    fit.floor_flag = n < z_h.size();
    fit.n_used = static_cast<int>(n);
    if (n < 10) {
        fit.note = n == 0 ? "all samples at the floor" : "fewer than 10 samples above the floor";
        return fit;
    }
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = std::log(z_h[i]);
        st += t[i];
        sl += l;
        stt += t[i] * t[i];
        stl += t[i] * l;
    }
    const double denom = n * stt - st * st;
    if (denom <= 0) {
        fit.note = "degenerate time axis";
        return fit;
    }
    fit.mu_hat = -(n * stl - st * sl) / denom;
    fit.t_lo = t[0];
    fit.t_hi = t[n - 1];
    fit.valid = true;
    return fit;
}

Stepper::Stepper(const VorticityOps& ops, double nu, double dt, double conv_scale)
    : ops_(&ops),
      nu_(nu),
      dt_(dt),
      conv_scale_(conv_scale),
      system_(SparseMat(ops.mass().matrix() + dt * nu * ops.stiffness().matrix()), ops.mesh()) {
    if (!(nu > 0) || !(dt > 0)) throw std::invalid_argument("Stepper: nu and dt must be positive");
}

Vector Stepper::step(const Vector& w, const Vector& load_next, const Vector& g_next,
                     const Vector& extra_explicit) const {
    Vector rhs = ops_->mass().matrix() * w;
    rhs += dt_ * (load_next - conv_scale_ * ops_->convection(w) + extra_explicit);
    return system_.solve(rhs, g_next);
}

Simulation::Simulation(const SimConfig& cfg) : cfg_(cfg) {
    if (!(cfg.nu > 0)) throw std::invalid_argument("SimConfig: nu must be positive");
    if (!(cfg.dt > 0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (cfg.t_end < cfg.dt) throw std::invalid_argument("SimConfig: t_end shorter than one step");
    if (cfg.mode != RunMode::free_run && cfg.lambda < 0)
        throw std::invalid_argument("SimConfig: lambda must be >= 0 for controlled/observer runs");
    if (cfg.M < 1) throw std::invalid_argument("SimConfig: M must be >= 1");
    if (!cfg.forcing.g || !cfg.forcing.w0 || !cfg.forcing.wt0)
        throw std::invalid_argument("SimConfig: forcing data incomplete");
    if (!cfg.forcing.manufactured && !cfg.forcing.f)
        throw std::invalid_argument("SimConfig: pointwise forcing missing");

    const BumpPair bumps = default_bumps();
    family_ = build_triangle_family(cfg.domain, cfg.M, bumps, cfg.support_scale, cfg.target_h0);
    for (int r = 0; r < cfg.mesh_level; ++r)
        family_ = refit_family(family_, refine(family_.mesh), bumps);
    ops_ = std::make_unique<VorticityOps>(family_.mesh);
    if (cfg.mode != RunMode::free_run)
        feedback_.emplace(cfg.lambda, family_, ops_->mass(), ops_->stiffness());
    stepper_ = std::make_unique<Stepper>(*ops_, cfg.nu, cfg.dt, cfg.conv_scale);
}

Eigen::VectorXd Simulation::observer_step_inputs(const Vector& w_t) const {
    if (!feedback_) throw std::logic_error("observer_step_inputs: no feedback operator built");
    return feedback_->measurements(w_t);
}

Vector Simulation::forcing_load(double t) const {
    const Mesh& m = ops_->mesh();
    if (cfg_.forcing.manufactured) {
        const Vector w_exa = interpolate(m, [&](Vec2 x) { return cfg_.forcing.exact(t, x); });
        const Vector w_dot = interpolate(m, [&](Vec2 x) { return cfg_.forcing.exact_rate(t, x); });
        return ops_->mass().matrix() * w_dot + ops_->stiffness().matrix() * w_exa +
               cfg_.conv_scale * ops_->convection(w_exa);
    }
    return assemble_load(m, [&](Vec2 x) { return cfg_.forcing.f(t, x); }, quad_deg5());
}

SimRun Simulation::run() {
    const Mesh& mesh = ops_->mesh();
    const int n_nodes = mesh.node_count();
    SimRun out;

    Vector w_t = interpolate(mesh, cfg_.forcing.wt0);
    Vector w = interpolate(mesh, cfg_.forcing.w0);
    const Vector zero = Vector::Zero(n_nodes);

    const long nsteps = std::lround(cfg_.t_end / cfg_.dt);

    std::vector<double> snap_times = cfg_.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t next_snap = 0;

    auto control_coords = [&]() -> Eigen::VectorXd {
        if (cfg_.mode == RunMode::controlled)
            return feedback_->coords(w - w_t);
        if (cfg_.mode == RunMode::observer) {
            // target enters only through the sensor outputs
            const Eigen::VectorXd s_tar = observer_step_inputs(w_t);
            return feedback_->coords_from_measurements(feedback_->measurements(w) - s_tar);
        }
        return Eigen::VectorXd::Zero(0);
    };

    auto record = [&](double t) {
        const Eigen::VectorXd u = control_coords();
        SimRecord r;
        r.t = t;
        r.z_h = ops_->norm_h(w - w_t);
        r.wt_h = ops_->norm_h(w_t);
        r.w_h = ops_->norm_h(w);
        r.u_norm = u.size() ? u.norm() : 0.0;
        r.wt_v = ops_->seminorm_v(w_t);
        out.series.push_back(r);
        out.control_log.push_back(u);
        if (cfg_.forcing.exact) {
            const Vector e =
                w_t - interpolate(mesh, [&](Vec2 x) { return cfg_.forcing.exact(t, x); });
            const double err = ops_->norm_h(e);
            out.error_series.push_back(err);
            out.error_vs_exact = std::max(out.error_vs_exact, err);
        }
    };

    auto snapshot = [&](double t) {
        Snapshot s;
        s.t = t;
        s.w = w;
        s.w_t = w_t;
        s.z = w - w_t;
        s.psi_z = ops_->stream_function(s.z);
        if (cfg_.mode != RunMode::free_run) {
            const Vector bu = feedback_->field_from_coords(control_coords());
            s.psi_ctrl = ops_->stream_function(bu);
        } else {
            s.psi_ctrl = Vector::Zero(n_nodes);
        }
        out.snapshots.push_back(std::move(s));
    };

    record(0.0);
    while (next_snap < snap_times.size() && snap_times[next_snap] <= 0.5 * cfg_.dt) {
        snapshot(0.0);
        ++next_snap;
    }

    for (long n = 0; n < nsteps; ++n) {
        const double t1 = (n + 1) * cfg_.dt;
        const Vector load = forcing_load(t1);
        const Vector g = interpolate(mesh, [&](Vec2 x) { return cfg_.forcing.g(t1, x); });

        Vector ctrl_load = zero;
        if (cfg_.mode != RunMode::free_run)
            ctrl_load = feedback_->load_from_coords(control_coords());

        w_t = stepper_->step(w_t, load, g, zero);
        w = stepper_->step(w, load, g, ctrl_load);

        if (!finite_field(w, cfg_.overflow_guard) || !finite_field(w_t, cfg_.overflow_guard)) {
            out.aborted = true;
            out.abort_reason = "overflow guard tripped at t = " + std::to_string(t1);
            break;
        }
        if ((n + 1) % cfg_.stride == 0 || n + 1 == nsteps) record(t1);
        while (next_snap < snap_times.size() &&
               std::abs(snap_times[next_snap] - t1) <= 0.5 * cfg_.dt) {
            snapshot(t1);
            ++next_snap;
        }
    }

    std::vector<double> ts, zs;
    ts.reserve(out.series.size());
    zs.reserve(out.series.size());
    for (const SimRecord& r : out.series) {
        ts.push_back(r.t);
        zs.push_back(r.z_h);
    }
    out.decay = estimate_decay(ts, zs);
    return out;
}

SimRun run_pair(const SimConfig& cfg) { return Simulation(cfg).run(); }

}  // namespace vortctl
