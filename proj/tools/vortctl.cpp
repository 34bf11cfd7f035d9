// Command-line driver: configuration-driven runs, xi tables, and the
// built-in verification suite.
//
//   vortctl run <config> [--out DIR] [--stride N] [--svg]
//   vortctl xi <config> [--out DIR]
//   vortctl verify
//
// Exit codes: 0 success, 1 runtime/numeric failure, 2 configuration error.
// VORTCTL_THREADS caps sweep parallelism.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "vortctl/config.hpp"
#include "vortctl/render.hpp"

namespace fs = std::filesystem;
using namespace vortctl;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string gshort(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::free_run: return "free";
        case RunMode::controlled: return "controlled";
        default: return "observer";
    }
}

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::example1: return "example1";
        case Preset::example2: return "example2";
        default: return "custom";
    }
}

void write_run_outputs(const fs::path& dir, const SimConfig& cfg, const Simulation& sim,
                       const SimRun& run, bool svg) {
    fs::create_directories(dir);

    {
        std::ofstream mesh_out(dir / "mesh.txt", std::ios::binary);
        write_mesh(mesh_out, sim.mesh());
        std::ofstream fam_out(dir / "family.csv", std::ios::binary);
        write_family(fam_out, sim.family().layout);
    }

    std::string csv = "t,norm_z_H,norm_wt_H,norm_w_H,norm_u,norm_wt_V\n";
    for (const SimRecord& r : run.series) {
        csv += g17(r.t) + "," + g17(r.z_h) + "," + g17(r.wt_h) + "," + g17(r.w_h) + "," +
               g17(r.u_norm) + "," + g17(r.wt_v) + "\n";
    }
    write_file(dir / "run.csv", csv);

    if (cfg.mode != RunMode::free_run && !run.control_log.empty()) {
        std::string ctl = "t";
        for (int j = 0; j < run.control_log[0].size(); ++j) ctl += ",u_" + std::to_string(j + 1);
        ctl += "\n";
        for (std::size_t i = 0; i < run.series.size(); ++i) {
            ctl += g17(run.series[i].t);
            for (int j = 0; j < run.control_log[i].size(); ++j)
                ctl += "," + g17(run.control_log[i][j]);
            ctl += "\n";
        }
        write_file(dir / "control.csv", ctl);
    }

    if (!run.error_series.empty()) {
        std::string err = "t,err_vs_exact_H\n";
        for (std::size_t i = 0; i < run.error_series.size(); ++i)
            err += g17(run.series[i].t) + "," + g17(run.error_series[i]) + "\n";
        write_file(dir / "error.csv", err);
    }

    for (const Snapshot& s : run.snapshots) {
        const std::pair<const char*, const Vector*> fields[] = {
            {"w", &s.w}, {"wt", &s.w_t}, {"z", &s.z}, {"psi_z", &s.psi_z}, {"psi_ctrl", &s.psi_ctrl}};
        for (const auto& [name, field] : fields) {
            std::string body = "x1,x2,value\n";
            for (int i = 0; i < sim.mesh().node_count(); ++i)
                body += g17(sim.mesh().nodes[i].x) + "," + g17(sim.mesh().nodes[i].y) + "," +
                        g17((*field)[i]) + "\n";
            const std::string stem = std::string("snapshot_") + name + "_t" + gshort(s.t);
            write_file(dir / (stem + ".csv"), body);
            if (svg) write_file(dir / (stem + ".svg"), field_svg({&sim.mesh(), *field}));
        }
    }

    std::string rep;
    rep += "vortctl run report\n";
    rep += "preset = " + preset_name(cfg.preset) + "\n";
    rep += "mode = " + mode_name(cfg.mode) + "\n";
    rep += "mesh level = " + std::to_string(cfg.mesh_level) +
           ", nodes = " + std::to_string(sim.mesh().node_count()) +
           ", triangles = " + std::to_string(sim.mesh().triangle_count()) + "\n";
    rep += "nu = " + g17(cfg.nu) + ", conv_scale = " + g17(cfg.conv_scale) +
           ", dt = " + g17(cfg.dt) + ", t_end = " + g17(cfg.t_end) + "\n";
    rep += "M = " + std::to_string(cfg.M) + " (M_sigma = " + std::to_string(sim.family().count()) +
           "), lambda = " + g17(cfg.lambda) + ", support_scale = " + g17(cfg.support_scale) + "\n";
    if (run.aborted) {
        rep += "status = ABORTED: " + run.abort_reason + "\n";
    } else {
        rep += "status = completed\n";
        if (run.decay.valid) {
            rep += "mu_hat = " + g17(run.decay.mu_hat) + "\n";
            rep += "fit window = [" + g17(run.decay.t_lo) + ", " + g17(run.decay.t_hi) +
                   "], samples = " + std::to_string(run.decay.n_used) + "\n";
        } else {
            rep += "mu_hat = n/a (" + run.decay.note + ")\n";
        }
        rep += std::string("floor saturation = ") + (run.decay.floor_flag ? "yes" : "no") + "\n";
        rep += "z(0) = " + g17(run.series.front().z_h) +
               ", z(end) = " + g17(run.series.back().z_h) + "\n";
        if (!run.error_series.empty())
            rep += "max error vs exact target = " + g17(run.error_vs_exact) + "\n";
    }
    write_file(dir / "report.txt", rep);
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int stride_override,
            bool svg) {
    RunSetup setup = run_setup_from_config(load_config_file(config_path));
    if (stride_override > 0) setup.sim.stride = stride_override;

    std::vector<int> Ms = setup.sweep_M.empty() ? std::vector<int>{setup.sim.M} : setup.sweep_M;
    std::vector<double> lambdas =
        setup.sweep_lambda.empty() ? std::vector<double>{setup.sim.lambda} : setup.sweep_lambda;
    const bool sweeping = Ms.size() * lambdas.size() > 1;

    struct Job {
        SimConfig cfg;
        fs::path dir;
        bool aborted = false;
        std::string message;
    };
    std::vector<Job> jobs;
    for (int M : Ms) {
        for (double lam : lambdas) {
            Job j;
            j.cfg = setup.sim;
            j.cfg.M = M;
            j.cfg.lambda = lam;
            j.dir = sweeping ? fs::path(out_dir) / ("run_M" + std::to_string(M) + "_lam" + gshort(lam))
                             : fs::path(out_dir);
            jobs.push_back(std::move(j));
        }
    }

    unsigned max_threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VORTCTL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) max_threads = std::min<unsigned>(max_threads, static_cast<unsigned>(v));
    }
    max_threads = std::min<unsigned>(max_threads, jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            Job& job = jobs[i];
            try {
                Simulation sim(job.cfg);
                const SimRun run = sim.run();
                write_run_outputs(job.dir, job.cfg, sim, run, svg);
                job.aborted = run.aborted;
                job.message = run.aborted ? run.abort_reason
                                          : (run.decay.valid ? "mu_hat = " + g17(run.decay.mu_hat)
                                                             : run.decay.note);
            } catch (const std::exception& e) {
                job.aborted = true;
                job.message = e.what();
            }
        }
    };
    if (max_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < max_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    int failures = 0;
    for (const Job& job : jobs) {
        std::cout << job.dir.string() << ": " << (job.aborted ? "FAILED: " : "") << job.message
                  << "\n";
        failures += job.aborted;
    }
    return failures ? 1 : 0;
}

int cmd_xi(const std::string& config_path, const std::string& out_dir) {
    const XiSetup s = xi_setup_from_config(load_config_file(config_path));
    const BumpPair bumps = default_bumps();

    std::string csv = "M,M_sigma,xi\n";
    std::string table;
    if (s.rectangle) {
        // one tensor mesh honoring the union of all supports: the xi values
        // for every M are comparable on the same mesh
        std::vector<Polygon> supports;
        std::vector<ActuatorLayout> layouts;
        for (int M : s.m_list) {
            if (M == 0) continue;
            layouts.push_back(rectangle_layout(s.L1, s.L2, s.r, M));
            for (const auto& a : layouts.back().actuators) supports.push_back(a.support);
        }
        double h = s.target_h0;
        for (int M : s.m_list)
            if (M > 0) h = std::min(h, 0.5 * s.r / M);
        Mesh mesh = build_mesh({RectangleDomain{s.L1, s.L2}}, supports, h);
        for (int r = 0; r < s.mesh_level; ++r) mesh = refine(mesh);
        const SpdMatrix mass = assemble_mass(mesh);
        const SpdMatrix stiffness = assemble_stiffness(mesh);
        std::size_t li = 0;
        for (int M : s.m_list) {
            std::vector<Vector> fields, dummy;
            int m_sigma = 0;
            if (M > 0) {
                evaluate_fields(layouts[li++], mesh, bumps, fields, dummy);
                m_sigma = static_cast<int>(fields.size());
            }
            const double xi = xi_estimate(fields, mesh, stiffness, mass);
            csv += std::to_string(M) + "," + std::to_string(m_sigma) + "," + g17(xi) + "\n";
            table += "M = " + std::to_string(M) + "  M_sigma = " + std::to_string(m_sigma) +
                     "  xi = " + gshort(xi) + "\n";
        }
    } else {
        for (int M : s.m_list) {
            ActuatorFamily fam =
                build_triangle_family(s.tri, std::max(M, 1), bumps, s.support_scale, s.target_h0);
            for (int r = 0; r < s.mesh_level; ++r)
                fam = refit_family(fam, refine(fam.mesh), bumps);
            const SpdMatrix mass = assemble_mass(fam.mesh);
            const SpdMatrix stiffness = assemble_stiffness(fam.mesh);
            const std::vector<Vector> fields = M == 0 ? std::vector<Vector>{} : fam.v_fields;
            const double xi = xi_estimate(fields, fam.mesh, stiffness, mass);
            const int m_sigma = M == 0 ? 0 : fam.count();
            csv += std::to_string(M) + "," + std::to_string(m_sigma) + "," + g17(xi) + "\n";
            table += "M = " + std::to_string(M) + "  M_sigma = " + std::to_string(m_sigma) +
                     "  xi = " + gshort(xi) + "\n";
        }
    }
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "xi.csv", csv);
    std::cout << table;
    return 0;
}

// ---------------------------------------------------------------------------
// verify: property checks on small built-in meshes
// ---------------------------------------------------------------------------

struct VerifyReport {
    int failures = 0;
    void check(const std::string& name, bool ok, double got, double tol) {
        std::printf("[%s] %-46s max err %.3e  tol %.0e\n", ok ? " ok " : "FAIL", name.c_str(), got,
                    tol);
        failures += !ok;
    }
};

int cmd_verify(bool inject_gram_fault) {
    VerifyReport rep;
    const BumpPair bumps = default_bumps();
    std::mt19937 rng(2026);
    std::normal_distribution<double> dist;

    const ActuatorFamily rect = build_rectangle_family(1, 1, 0.45, 2, bumps, 0.15);
    const TriangleDomain tri{{0, 0}, {1, 0}, {1.0 / 3, 2.0 / 3}};
    const ActuatorFamily trif = build_triangle_family(tri, 2, bumps, 0.8, 0.18);

    for (const ActuatorFamily* fam : {&rect, &trif}) {
        const std::string tag = fam == &rect ? "rectangle" : "triangle";
        const SpdMatrix mass = assemble_mass(fam->mesh);
        const SpdMatrix stiffness = assemble_stiffness(fam->mesh);
        const int n = fam->mesh.node_count();
        auto rnd_field = [&] {
            Vector v(n);
            for (int i = 0; i < n; ++i) v[i] = dist(rng);
            return v;
        };

        // gram structure
        bool gram_ok = true;
        try {
            gram_diag_check(*fam, mass);
        } catch (const std::exception&) {
            gram_ok = false;
        }
        rep.check("gram diagonality (" + tag + ")", gram_ok, gram_ok ? 0.0 : 1.0, 0);

        // projectors
        const ObliqueProjector Pv = make_projector(fam->v_fields, fam->vtilde_fields, mass);
        const ObliqueProjector Pvt = make_projector(fam->vtilde_fields, fam->v_fields, mass);
        double worst = 0;
        for (int k = 0; k < 5; ++k) {
            const Vector z = rnd_field();
            const Vector pz = Pv.apply(z);
            worst = std::max(worst, (Pv.apply(pz) - pz).norm() / z.norm());
            for (const Vector& g : fam->vtilde_fields)
                worst = std::max(worst, std::abs(g.dot(mass.matrix() * (z - pz))) / z.norm());
            const Vector y = rnd_field();
            worst = std::max(worst, std::abs(Pv.apply(z).dot(mass.matrix() * y) -
                                             z.dot(mass.matrix() * Pvt.apply(y))) /
                                        (z.norm() * y.norm()));
        }
        rep.check("projector idempotence/annihilation/adjoint (" + tag + ")", worst < 1e-10, worst,
                  1e-10);

        // skew-symmetric convection
        const VorticityOps ops(fam->mesh);
        double worst_skew = 0;
        for (int k = 0; k < 10; ++k) {
            const Vector w = rnd_field();
            const double s = std::abs(w.dot(ops.convection(w)));
            worst_skew = std::max(worst_skew, s / (ops.norm_h(w) * ops.seminorm_v(w)));
        }
        rep.check("convection skew-symmetry (" + tag + ")", worst_skew < 1e-12, worst_skew, 1e-12);

        // monotonicity equality, cross-validated against an external
        // projector composition (the injected fault corrupts that copy)
        ActuatorFamily cross = *fam;
        if (inject_gram_fault) {
            // perturb outside the span so the corrupted Gram is observable
            const Vector bias =
                interpolate(cross.mesh, [](Vec2 p) { return std::sin(p.x + 2 * p.y); });
            cross.vtilde_fields[0] += 1e-3 * bias;
        }
        const ObliqueProjector Pvt_ext = make_projector(cross.vtilde_fields, cross.v_fields, mass);
        const FeedbackOperator K(1.0, *fam, mass, stiffness);
        double worst_mono = 0;
        for (int k = 0; k < 10; ++k) {
            Vector p = Vector::Zero(n);
            for (const Vector& f : fam->v_fields) p += dist(rng) * f;
            const double lhs = K.monotonicity_certificate(p).first;
            const Vector q = Pvt_ext.apply(p);
            const double rhs = -stiffness.quadratic_form(q);
            worst_mono = std::max(worst_mono, std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs)));
        }
        rep.check("feedback monotonicity equality (" + tag + ")", worst_mono < 1e-9, worst_mono,
                  1e-9);

        // energy identity
        double worst_en = 0;
        for (int k = 0; k < 10; ++k) {
            const Vector w = rnd_field();
            const Vector psi = ops.stream_function(w);
            const double lhs = ops.velocity_energy(ops.velocity_of_stream(psi));
            const double rhs = w.dot(mass.matrix() * psi);
            worst_en = std::max(worst_en, std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs)));
        }
        rep.check("velocity energy identity (" + tag + ")", worst_en < 1e-10, worst_en, 1e-10);
    }

    // observer equivalence on a short controlled run
    {
        SimConfig cfg = example1_config(0);
        cfg.t_end = 0.1;
        cfg.mode = RunMode::controlled;
        cfg.M = 2;
        cfg.lambda = 1.0;
        const SimRun a = run_pair(cfg);
        cfg.mode = RunMode::observer;
        const SimRun b = run_pair(cfg);
        double worst = 0;
        for (std::size_t i = 0; i < a.series.size(); ++i)
            worst = std::max(worst, std::abs(a.series[i].z_h - b.series[i].z_h));
        rep.check("observer/controlled equivalence", !a.aborted && !b.aborted && worst < 1e-10,
                  worst, 1e-10);
    }

    std::printf("%d check group(s) failed\n", rep.failures);
    return rep.failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D vorticity-form Navier-Stokes with oblique-projection feedback"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int stride = 0;
    bool svg = false;
    bool inject_fault = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--stride", stride, "record every n-th step");
    run->add_flag("--svg", svg, "also emit SVG renderings of snapshots");

    CLI::App* xi = app.add_subcommand("xi", "tabulate the Poincare-like constant over M");
    xi->add_option("config", config_path, "config file")->required();
    xi->add_option("--out", out_dir, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "run the built-in property checks");
    verify->add_flag("--inject-gram-fault", inject_fault,
                     "corrupt the cross-check Gram data (testing hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, stride, svg);
        if (xi->parsed()) return cmd_xi(config_path, out_dir);
        return cmd_verify(inject_fault);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
