#include "fer/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "fer/classical.hpp"
#include "fer/config.hpp"
#include "fer/csv.hpp"
#include "fer/dual.hpp"
#include "fer/ergodic.hpp"
#include "fer/example.hpp"
#include "fer/longrun.hpp"
#include "fer/parallel.hpp"
#include "fer/risk.hpp"
#include "fer/sde.hpp"
#include "fer/version.hpp"

namespace fer::cli {

namespace {

namespace fs = std::filesystem;

struct Ctx {
    RunConfig cfg;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    int threads = 1;
    std::string subcommand;
    std::map<std::string, std::string> flags;  // resolved numeric flags, for the manifest
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;

    std::ostream& os() { return *out; }
    std::ostream& es() { return *err; }
};

void flag(Ctx& ctx, const std::string& k, double v) { ctx.flags[k] = csv::fmt(v); }
void flag(Ctx& ctx, const std::string& k, const std::string& v) { ctx.flags[k] = v; }

std::ofstream open_output(Ctx& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    const fs::path p = fs::path(ctx.out_dir) / name;
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    ctx.outputs.push_back(name);
    return f;
}

void write_manifests(Ctx& ctx) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.t0).count();
    for (const std::string& name : ctx.outputs) {
        const fs::path p = fs::path(ctx.out_dir) / (name + ".manifest");
        std::ofstream f(p);
        f << "subcommand = " << ctx.subcommand << '\n';
        f << "version = " << kVersionTag << '\n';
        f << "seed = " << ctx.seed << '\n';
        f << "threads = " << ctx.threads << '\n';
        f << "wall_time_s = " << csv::fmt(wall) << '\n';
        f << "output = " << name << '\n';
        for (const std::string& o : ctx.outputs) f << "output_set = " << o << '\n';
        for (const auto& [k, v] : ctx.flags) f << "flag." << k << " = " << v << '\n';
        std::istringstream cfgs(serialize_config(ctx.cfg));
        std::string line;
        while (std::getline(cfgs, line)) f << "config." << line << '\n';
    }
}

void print_warnings(Ctx& ctx, const ModelSpec& m) {
    for (const std::string& w : validate(m)) ctx.es() << "warning: " << w << '\n';
}

ErgodicOptions ergodic_options(double rho_floor) {
    ErgodicOptions opt;
    opt.rho_schedule.clear();
    for (double rho = 1e-2; rho > rho_floor * 0.5; rho /= 10.0) opt.rho_schedule.push_back(rho);
    return opt;
}

int steps_for(double T, double dt) { return std::max(1, static_cast<int>(std::lround(T / dt))); }

McConfig mc_config(const Ctx& ctx, std::int64_t paths, double horizon, int steps_per_unit) {
    McConfig mc;
    mc.n_paths = paths;
    mc.n_steps = std::max(10, static_cast<int>(std::lround(horizon * steps_per_unit)));
    mc.seed = ctx.seed;
    return mc;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_ergodic(Ctx& ctx, int nodes, double rho_floor) {
    const Grid1D grid = ctx.cfg.make_grid(nodes);
    const ModelSpec m = with_lipschitz_constants(ctx.cfg.model, grid);
    print_warnings(ctx, m);
    const ErgodicSolution sol = solve_ergodic(m, grid, ergodic_options(rho_floor));
    ctx.os() << "lambda = " << csv::fmt(sol.lambda) << '\n';
    ctx.os() << "residual = " << csv::fmt(sol.residual) << '\n';
    ctx.os() << "c_v = " << csv::fmt(*m.c_v) << ", c_z = " << csv::fmt(*m.c_z) << '\n';
    if (const auto zb = ergodic_z_bound(m))
        ctx.os() << "z_bound = " << csv::fmt(*zb) << '\n';
    else
        ctx.os() << "z_bound = n/a (c_eta <= c_v)\n";
    std::ofstream f = open_output(ctx, "ergodic.csv");
    f << "v,y,z1,z2\n";
    for (int i = 0; i < grid.n_nodes(); ++i)
        f << csv::fmt(grid.node(i)) << ',' << csv::fmt(sol.y[i]) << ',' << csv::fmt(sol.z1[i])
          << ',' << csv::fmt(sol.z2[i]) << '\n';
    return 0;
}

int cmd_risk(Ctx& ctx, int nodes, double rho_floor, double T, double v0, double t, double dt,
             bool dump_surface) {
    const Grid1D grid = ctx.cfg.make_grid(nodes);
    const ModelSpec m = with_lipschitz_constants(ctx.cfg.model, grid);
    print_warnings(ctx, m);
    const ErgodicSolution sol = solve_ergodic(m, grid, ergodic_options(rho_floor));
    const auto record =
        (dump_surface || t > 0.0) ? pde::RecordPolicy::all() : pde::RecordPolicy::none();
    const RiskSurface u = solve_risk_bsde(m, sol, ctx.cfg.payoff, T, steps_for(T, dt), record);
    const double rho = forward_entropic_risk(u, v0, t);
    const Vec2 alpha = hedging_strategy(m, sol, u, v0, t);
    ctx.os() << "rho = " << csv::fmt(rho) << '\n';
    ctx.os() << "alpha = (" << csv::fmt(alpha.x1) << ", " << csv::fmt(alpha.x2) << ")\n";
    {
        std::ofstream f = open_output(ctx, "risk.csv");
        f << "T,v0,t,rho,alpha1,alpha2\n";
        f << csv::fmt(T) << ',' << csv::fmt(v0) << ',' << csv::fmt(t) << ',' << csv::fmt(rho)
          << ',' << csv::fmt(alpha.x1) << ',' << csv::fmt(alpha.x2) << '\n';
    }
    if (dump_surface) {
        std::ofstream f = open_output(ctx, "risk_surface.csv");
        f << "t,v,u,zbar1,zbar2\n";
        for (std::size_t k = 0; k < u.times().size(); ++k) {
            const GridFn& lev = u.level(static_cast<int>(k));
            const GridFn& slope = u.slope_level(static_cast<int>(k));
            for (int i = 0; i < grid.n_nodes(); ++i)
                f << csv::fmt(u.times()[k]) << ',' << csv::fmt(grid.node(i)) << ','
                  << csv::fmt(lev[i]) << ',' << csv::fmt(m.kappa.x1 * slope[i]) << ','
                  << csv::fmt(m.kappa.x2 * slope[i]) << '\n';
        }
    }
    return 0;
}

int cmd_parity(Ctx& ctx, int nodes, double rho_floor, double T, double dt,
               std::vector<double> v0s) {
    const Grid1D grid = ctx.cfg.make_grid(nodes);
    const ModelSpec m = with_lipschitz_constants(ctx.cfg.model, grid);
    print_warnings(ctx, m);
    const ErgodicSolution sol = solve_ergodic(m, grid, ergodic_options(rho_floor));
    const ParityReport rep = parity_check(m, sol, ctx.cfg.payoff, T, grid, steps_for(T, dt));
    ctx.os() << "max_parity_residual = " << csv::fmt(rep.max_residual) << '\n';
    std::ofstream f = open_output(ctx, "parity.csv");
    f << "v0,T,rho_forward,rho_classical,parity_residual\n";
    for (double v0 : v0s) {
        const double fwd = interp(rep.forward_t0, v0);
        const double cls = interp(rep.classical_risk_t0, v0);
        const double res = std::abs(fwd - interp(rep.classical_pair_t0, v0));
        f << csv::fmt(v0) << ',' << csv::fmt(T) << ',' << csv::fmt(fwd) << ',' << csv::fmt(cls)
          << ',' << csv::fmt(res) << '\n';
    }
    return 0;
}

int cmd_dual_check(Ctx& ctx, int nodes, double rho_floor, double T, double v0,
                   std::int64_t paths, int steps_per_unit, double dt) {
    const Grid1D grid = ctx.cfg.make_grid(nodes);
    const ModelSpec m = with_lipschitz_constants(ctx.cfg.model, grid);
    print_warnings(ctx, m);
    const ErgodicSolution sol = solve_ergodic(m, grid, ergodic_options(rho_floor));
    const RiskSurface u = solve_risk_bsde(m, sol, ctx.cfg.payoff, T, steps_for(T, dt));
    const McConfig mc = mc_config(ctx, paths, T, steps_per_unit);
    const DualReport rep = dual_gap_mc(m, sol, u, ctx.cfg.payoff, v0, mc);
    ctx.os() << "rho_pde = " << csv::fmt(rep.rho_pde) << '\n';
    ctx.os() << "dual objective at q* = " << csv::fmt(rep.optimum.objective) << " +- "
             << csv::fmt(rep.optimum.std_error) << " (-rho = " << csv::fmt(-rep.rho_pde) << ")\n";
    std::ofstream f = open_output(ctx, "dual_check.csv");
    f << "perturbation_id,epsilon,objective,stderr,optimum,gap\n";
    auto row = [&](const DualRow& r) {
        f << r.id << ',' << csv::fmt(r.epsilon) << ',' << csv::fmt(r.objective) << ','
          << csv::fmt(r.std_error) << ',' << csv::fmt(rep.optimum.objective) << ','
          << csv::fmt(r.objective - rep.optimum.objective) << '\n';
    };
    row(rep.optimum);
    for (const DualRow& r : rep.perturbed) row(r);
    return 0;
}

int cmd_example(Ctx& ctx, int nodes, double rho_floor, double T, double v0, std::int64_t paths,
                int steps_per_unit, double dt) {
    const Grid1D grid = ctx.cfg.make_grid(nodes);
    const ModelSpec m = with_lipschitz_constants(ctx.cfg.model, grid);
    print_warnings(ctx, m);
    const ErgodicSolution sol = solve_ergodic(m, grid, ergodic_options(rho_floor));
    const McConfig mc = mc_config(ctx, paths, T, steps_per_unit);
    const ClosedFormReport rep =
        closed_form_report(m, sol, ctx.cfg.payoff, T, v0, grid, steps_for(T, dt), mc);
    ctx.os() << "rho_forward: pde = " << csv::fmt(rep.rho_forward_pde)
             << ", mc = " << csv::fmt(rep.rho_forward_mc.mean) << " +- "
             << csv::fmt(rep.rho_forward_mc.std_error) << '\n';
    ctx.os() << "rho_classical: pde = " << csv::fmt(rep.rho_classical_pde)
             << ", mc = " << csv::fmt(rep.rho_classical_mc.mean) << " +- "
             << csv::fmt(rep.rho_classical_mc.std_error) << '\n';
    if (rep.gaussian_oracle)
        ctx.os() << "gaussian_oracle = " << csv::fmt(*rep.gaussian_oracle) << '\n';
    std::ofstream f = open_output(ctx, "example.csv");
    f << "T,v0,rho_forward_mc,stderr_forward,rho_classical_mc,stderr_classical,"
         "rho_forward_pde,rho_classical_pde,gaussian_oracle\n";
    f << csv::fmt(T) << ',' << csv::fmt(v0) << ',' << csv::fmt(rep.rho_forward_mc.mean) << ','
      << csv::fmt(rep.rho_forward_mc.std_error) << ',' << csv::fmt(rep.rho_classical_mc.mean)
      << ',' << csv::fmt(rep.rho_classical_mc.std_error) << ','
      << csv::fmt(rep.rho_forward_pde) << ',' << csv::fmt(rep.rho_classical_pde) << ','
      << (rep.gaussian_oracle ? csv::fmt(*rep.gaussian_oracle) : std::string()) << '\n';
    return 0;
}

int cmd_figures(Ctx& ctx, int nodes, double rho_floor, int scenario, double t_max, double dt,
                std::int64_t paths, int steps_per_unit, double s_hedge, bool with_hedging,
                bool normalize_kappa, bool gnuplot) {
    const std::vector<std::pair<int, Vec2>> all_scenarios{
        {1, {0.9, 0.1}}, {2, {0.5, 0.5}}, {3, {0.0, 1.0}}};
    std::vector<std::pair<int, Vec2>> chosen;
    for (const auto& sc : all_scenarios)
        if (scenario == 0 || scenario == sc.first) chosen.push_back(sc);
    if (chosen.empty()) throw std::runtime_error("figures: scenario must be 0, 1, 2 or 3");

    const std::vector<double> v0s{5.0, 7.5, 10.0, 12.5, 15.0};
    std::vector<double> t_list;
    for (double T = 1.0; T <= t_max + 1e-9; T += 1.0) t_list.push_back(T);
    std::vector<double> hedge_ts;
    for (double T = std::floor(0.2 * t_max) + 2.0; T <= t_max - 2.0 + 1e-9; T += 4.0)
        hedge_ts.push_back(T);

    const Grid1D grid = ctx.cfg.make_grid(nodes);
    std::ofstream f = open_output(ctx, "figures.csv");
    f << "scenario,kappa1,kappa2,measure_kind,v0,T,rho\n";
    std::ofstream hf;
    if (with_hedging && hedge_ts.size() >= 4) {
        hf = open_output(ctx, "hedging.csv");
        hf << "scenario,kappa1,kappa2,v0,T,estimate,stderr\n";
    }
    std::optional<std::ofstream> gp;
    if (gnuplot) gp = open_output(ctx, "figures.dat");

    for (const auto& [id, kappa_raw] : chosen) {
        RunConfig cfg = ctx.cfg;
        cfg.model.kappa = kappa_raw;
        if (normalize_kappa) cfg.model.kappa = (1.0 / kappa_raw.norm()) * kappa_raw;
        const ModelSpec m = with_lipschitz_constants(cfg.model, grid);
        print_warnings(ctx, m);
        const ErgodicSolution sol = solve_ergodic(m, grid, ergodic_options(rho_floor));
        const SweepResult sweep =
            maturity_sweep(m, sol, cfg.payoff, v0s, t_list, grid, dt, true);

        for (const SweepRow& r : sweep.rows) {
            f << id << ',' << csv::fmt(r.kappa1) << ',' << csv::fmt(r.kappa2) << ",forward,"
              << csv::fmt(r.v0) << ',' << csv::fmt(r.T) << ',' << csv::fmt(r.rho_forward) << '\n';
        }
        for (const SweepRow& r : sweep.rows) {
            f << id << ',' << csv::fmt(r.kappa1) << ',' << csv::fmt(r.kappa2) << ",classical,"
              << csv::fmt(r.v0) << ',' << csv::fmt(r.T) << ',' << csv::fmt(r.rho_classical)
              << '\n';
        }
        ctx.os() << "scenario " << id << ": L_g = " << csv::fmt(sweep.L_g)
                 << ", v0 spread at T = " << csv::fmt(t_list.back()) << ": "
                 << csv::fmt(sweep.v0_spread.back());
        if (sweep.fit && !sweep.fit->degenerate)
            ctx.os() << ", decay rate = " << csv::fmt(sweep.fit->rate)
                     << " (R^2 = " << csv::fmt(sweep.fit->r_squared) << ")";
        else
            ctx.os() << ", decay fit degenerate";
        ctx.os() << '\n';

        if (gp) {
            for (const char* kind : {"forward", "classical"})
                for (double v0 : v0s) {
                    *gp << "# scenario " << id << " " << kind << " v0 = " << csv::fmt(v0) << '\n';
                    for (const SweepRow& r : sweep.rows)
                        if (r.v0 == v0)
                            *gp << csv::fmt(r.T) << ' '
                                << csv::fmt(kind == std::string("forward") ? r.rho_forward
                                                                           : r.rho_classical)
                                << '\n';
                    *gp << "\n\n";
                }
        }

        if (with_hedging && hedge_ts.size() >= 4) {
            const McConfig mc = mc_config(ctx, paths, s_hedge, steps_per_unit);
            const HedgingDecay hd =
                hedging_decay(m, sol, cfg.payoff, 10.0, s_hedge, hedge_ts, grid, dt, mc);
            for (const HedgingRow& r : hd.rows)
                hf << id << ',' << csv::fmt(m.kappa.x1) << ',' << csv::fmt(m.kappa.x2)
                   << ",10," << csv::fmt(r.T) << ',' << csv::fmt(r.estimate) << ','
                   << csv::fmt(r.std_error) << '\n';
            if (hd.degenerate)
                ctx.os() << "scenario " << id
                         << ": hedging decay degenerate (nothing to hedge along kappa)\n";
            else
                ctx.os() << "scenario " << id
                         << ": hedging log-slope = " << csv::fmt(hd.log_slope) << '\n';
        }
    }
    return 0;
}

int cmd_selftest(Ctx& ctx) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        ctx.os() << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
        if (!ok) ++failures;
    };
    auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };

    ModelSpec line = default_config().model;  // capped theta, line constraint
    ModelSpec cst = line;
    cst.theta = ThetaSpec::constant(0.5);

    check("theta constant(0.5) at v=3", theta_at(cst, 3.0) == 0.5);
    check("theta capped(10) at v=4", theta_at(line, 4.0) == 6.0);
    check("theta capped(10) at v=12", theta_at(line, 12.0) == 0.0);

    const Vec2 pw = project_pi(line, {1.2, -0.3});
    check("projection onto the line", pw.x1 == 1.2 && pw.x2 == 0.0 &&
                                          near(dist2_pi(line, {1.2, -0.3}), 0.09, 1e-15));
    ModelSpec full = line;
    full.constraint = ConstraintSet::full_space;
    check("full-space projection is the identity", dist2_pi(full, {3.0, -4.0}) == 0.0);
    check("origin belongs to the constraint set", dist2_pi(line, {0.0, 0.0}) == 0.0);

    ModelSpec th1 = line;
    th1.theta = ThetaSpec::constant(1.0);
    th1.gamma = 2.0;
    check("driver F at the quoted point", near(driver_f(th1, 0.0, {1.0, 2.0}), 0.5, 1e-14));
    ModelSpec full1 = full;
    full1.theta = ThetaSpec::constant(1.0);
    check("driver F of the zero argument", near(driver_f(full1, 0.0, {0.0, 0.0}), -0.5, 1e-14));
    check("driver G vanishes at zbar = 0",
          driver_g(line, 2.0, {0.3, -0.4}, {0.0, 0.0}) == 0.0);
    check("driver G at the quoted point",
          near(driver_g(th1, 0.0, {0.0, 1.0}, {1.0, 1.0}), 1.0, 1e-14));
    check("driver G is linear on the full space",
          near(driver_g(full1, 0.0, {0.2, 0.7}, {2.0, 3.0}), -2.0, 1e-14));

    ModelSpec g1 = th1;
    g1.gamma = 1.0;
    const Vec2 qs = optimal_density(g1, 0.0, {0.0, 0.0}, {0.0, 1.0});
    check("optimal density of the quadratic pair",
          qs.x1 == -1.0 && qs.x2 == 1.0 &&
              near(g_star(g1, 0.0, {0.0, 0.0}, qs), 0.5, 1e-14) &&
              near(driver_g(g1, 0.0, {0.0, 0.0}, {0.0, 1.0}), 0.5, 1e-14));
    check("penalty is infinite off the pinned coordinate",
          std::isinf(g_star(line, 0.0, {0.0, 0.0}, {1.0, 0.0})));

    // trivial solves on a small grid
    const Grid1D grid(-10.0, 10.0, 201);
    ModelSpec cst2 = cst;
    cst2.kappa = {0.6, 0.8};
    const ErgodicSolution sol = solve_ergodic(cst2, grid);
    double ysup = 0.0, zsup = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        ysup = std::max(ysup, std::abs(sol.y[i]));
        zsup = std::max(zsup, std::abs(sol.z1[i]) + std::abs(sol.z2[i]));
    }
    check("constant theta: lambda = -theta0^2/2, y = z = 0",
          near(sol.lambda, -0.125, 1e-8) && ysup < 1e-8 && zsup < 1e-8);

    const RiskSurface uc =
        solve_risk_bsde(cst2, sol, PayoffSpec::constant(2.0), 1.0, 40, pde::RecordPolicy::none());
    double dev = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) dev = std::max(dev, std::abs(uc.level(0)[i] - 2.0));
    check("constant position: rho = c (cash-translativity)", dev < 1e-10);

    const RiskSurface u0 =
        solve_risk_bsde(cst2, sol, PayoffSpec::constant(0.0), 1.0, 40, pde::RecordPolicy::none());
    const Vec2 a0 = hedging_strategy(cst2, sol, u0, 1.0, 0.0);
    check("zero position: rho = 0 and alpha = 0",
          std::abs(u0.level(0)[grid.zero_node()]) < 1e-12 && a0.norm() < 1e-12);

    const ClassicalSurface p0 = solve_classical(
        cst2, sample(grid, [](double) { return 2.0; }), 1.0, 40, pde::RecordPolicy::none());
    double cdev = 0.0;
    const double expect = 2.0 - 0.5 * 0.25 * 1.0 / cst2.gamma;
    for (int i = 0; i < grid.n_nodes(); ++i)
        cdev = std::max(cdev, std::abs(p0.level(0)[i] - expect));
    check("classical constant terminal follows the theta drift", cdev < 1e-10);

    const GridFn lin = sample(grid, [](double v) { return v; });
    check("first derivative of a linear function", near(d1(lin)[100], 1.0, 1e-12));
    const GridFn quad = sample(grid, [](double v) { return v * v; });
    check("second derivative of a quadratic", near(d2(quad)[100], 2.0, 1e-9));
    {
        std::vector<double> one(5, 1.0), zero(5, 0.0), rhs{1, 2, 3, 4, 5};
        const std::vector<double> x = solve_tridiag(zero, one, zero, rhs);
        check("identity tridiagonal solve", x == rhs);
    }

    McConfig mc;
    mc.n_paths = 2000;
    mc.n_steps = 64;
    mc.seed = ctx.seed;
    check("coupled contraction ratio within the dissipative bound",
          contraction_diagnostic(cst2, 5.0, 15.0, 2.0, mc) <= 1.0 + 1e-9);
    const PathEnsemble e1 = simulate_factor(cst2, 1.0, 1.0, mc);
    const PathEnsemble e2 = simulate_factor(cst2, 1.0, 1.0, mc);
    check("identical seeds give bit-identical ensembles", e1.values == e2.values);

    const Vec2 pi1 = optimal_strategy(sol, cst2, 0.0);
    check("optimal strategy projects onto the line", pi1.x2 == 0.0);

    ctx.os() << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"forward entropic risk measures via the ergodic-equation representation"};
    app.require_subcommand(1);

    Ctx ctx;
    ctx.out = &out;
    ctx.err = &err;
    ctx.t0 = std::chrono::steady_clock::now();

    std::string config_path;
    app.add_option("--config", config_path, "plain key = value configuration file");
    app.add_option("--seed", ctx.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", ctx.threads, "worker threads")->capture_default_str();

    int nodes = 1201;
    double rho_floor = 1e-5;
    double dt = 0.025;

    auto add_grid_flags = [&](CLI::App* sub) {
        sub->add_option("--nodes", nodes, "spatial grid nodes")->capture_default_str();
        sub->add_option("--rho-floor", rho_floor, "smallest vanishing-discount rate")
            ->capture_default_str();
    };

    CLI::App* c_erg = app.add_subcommand("ergodic", "solve the long-run equation (lambda, y, z)");
    c_erg->fallthrough();
    add_grid_flags(c_erg);

    double T = 10.0, v0 = 10.0, t_query = 0.0;
    bool dump_surface = false;
    CLI::App* c_risk = app.add_subcommand("risk", "forward entropic risk of the configured position");
    c_risk->fallthrough();
    add_grid_flags(c_risk);
    c_risk->add_option("--T", T, "maturity")->capture_default_str();
    c_risk->add_option("--v0", v0, "initial factor value")->capture_default_str();
    c_risk->add_option("--t", t_query, "evaluation time")->capture_default_str();
    c_risk->add_option("--dt", dt, "time step")->capture_default_str();
    c_risk->add_flag("--surface", dump_surface, "dump the full (t, v) surface");

    std::vector<double> v0_list{5.0, 7.5, 10.0, 12.5, 15.0};
    CLI::App* c_parity = app.add_subcommand("parity", "forward vs classical decomposition check");
    c_parity->fallthrough();
    add_grid_flags(c_parity);
    c_parity->add_option("--T", T, "maturity")->capture_default_str();
    c_parity->add_option("--dt", dt, "time step")->capture_default_str();
    c_parity->add_option("--v0", v0_list, "initial factor values")->capture_default_str();

    std::int64_t paths = 50000;
    int steps_per_unit = 100;
    CLI::App* c_dual = app.add_subcommand("dual-check", "Monte Carlo convex-dual verification");
    c_dual->fallthrough();
    add_grid_flags(c_dual);
    c_dual->add_option("--T", T, "maturity")->capture_default_str();
    c_dual->add_option("--v0", v0, "initial factor value")->capture_default_str();
    c_dual->add_option("--dt", dt, "PDE time step")->capture_default_str();
    c_dual->add_option("--paths", paths, "Monte Carlo paths")->capture_default_str();
    c_dual->add_option("--mc-steps-per-unit", steps_per_unit, "Euler steps per unit time")
        ->capture_default_str();

    std::int64_t paths_ex = 100000;
    CLI::App* c_example = app.add_subcommand("example", "closed-form simulation vs PDE routes");
    c_example->fallthrough();
    add_grid_flags(c_example);
    c_example->add_option("--T", T, "maturity")->capture_default_str();
    c_example->add_option("--v0", v0, "initial factor value")->capture_default_str();
    c_example->add_option("--dt", dt, "PDE time step")->capture_default_str();
    c_example->add_option("--paths", paths_ex, "Monte Carlo paths")->capture_default_str();
    c_example->add_option("--mc-steps-per-unit", steps_per_unit, "Euler steps per unit time")
        ->capture_default_str();

    int scenario = 0;
    double t_max = 50.0, s_hedge = 1.0;
    std::int64_t paths_fig = 20000;
    bool no_hedging = false, normalize_kappa = false, gnuplot = false;
    CLI::App* c_fig = app.add_subcommand("figures", "maturity sweeps for the three loadings");
    c_fig->fallthrough();
    add_grid_flags(c_fig);
    c_fig->add_option("--scenario", scenario, "1, 2 or 3; 0 runs all")->capture_default_str();
    c_fig->add_option("--t-max", t_max, "largest maturity")->capture_default_str();
    c_fig->add_option("--dt", dt, "time step")->capture_default_str();
    c_fig->add_option("--paths", paths_fig, "hedging Monte Carlo paths")->capture_default_str();
    c_fig->add_option("--mc-steps-per-unit", steps_per_unit, "Euler steps per unit time")
        ->capture_default_str();
    c_fig->add_option("--s", s_hedge, "hedging window [0, s]")->capture_default_str();
    c_fig->add_flag("--no-hedging", no_hedging, "skip the hedging-decay sweep");
    c_fig->add_flag("--normalize-kappa", normalize_kappa,
                    "rescale the loadings to |kappa| = 1 before running");
    c_fig->add_flag("--gnuplot", gnuplot, "also write gnuplot-style data blocks");

    CLI::App* c_self = app.add_subcommand("selftest", "run the built-in identity checks");
    c_self->fallthrough();

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        ctx.cfg = config_path.empty() ? default_config() : load_config(config_path);
        parallel::set_max_threads(ctx.threads);
        flag(ctx, "nodes", static_cast<double>(nodes));
        flag(ctx, "rho_floor", rho_floor);

        if (app.got_subcommand(c_erg)) {
            ctx.subcommand = "ergodic";
            const int rc = cmd_ergodic(ctx, nodes, rho_floor);
            write_manifests(ctx);
            return rc;
        }
        if (app.got_subcommand(c_risk)) {
            ctx.subcommand = "risk";
            flag(ctx, "T", T);
            flag(ctx, "v0", v0);
            flag(ctx, "t", t_query);
            flag(ctx, "dt", dt);
            const int rc = cmd_risk(ctx, nodes, rho_floor, T, v0, t_query, dt, dump_surface);
            write_manifests(ctx);
            return rc;
        }
        if (app.got_subcommand(c_parity)) {
            ctx.subcommand = "parity";
            flag(ctx, "T", T);
            flag(ctx, "dt", dt);
            const int rc = cmd_parity(ctx, nodes, rho_floor, T, dt, v0_list);
            write_manifests(ctx);
            return rc;
        }
        if (app.got_subcommand(c_dual)) {
            ctx.subcommand = "dual-check";
            flag(ctx, "T", T);
            flag(ctx, "v0", v0);
            flag(ctx, "dt", dt);
            flag(ctx, "paths", static_cast<double>(paths));
            flag(ctx, "mc_steps_per_unit", static_cast<double>(steps_per_unit));
            const int rc = cmd_dual_check(ctx, nodes, rho_floor, T, v0, paths, steps_per_unit, dt);
            write_manifests(ctx);
            return rc;
        }
        if (app.got_subcommand(c_example)) {
            ctx.subcommand = "example";
            flag(ctx, "T", T);
            flag(ctx, "v0", v0);
            flag(ctx, "dt", dt);
            flag(ctx, "paths", static_cast<double>(paths_ex));
            flag(ctx, "mc_steps_per_unit", static_cast<double>(steps_per_unit));
            const int rc =
                cmd_example(ctx, nodes, rho_floor, T, v0, paths_ex, steps_per_unit, dt);
            write_manifests(ctx);
            return rc;
        }
        if (app.got_subcommand(c_fig)) {
            ctx.subcommand = "figures";
            flag(ctx, "scenario", static_cast<double>(scenario));
            flag(ctx, "t_max", t_max);
            flag(ctx, "dt", dt);
            flag(ctx, "paths", static_cast<double>(paths_fig));
            flag(ctx, "mc_steps_per_unit", static_cast<double>(steps_per_unit));
            flag(ctx, "s", s_hedge);
            flag(ctx, "normalize_kappa", normalize_kappa ? "1" : "0");
            const int rc = cmd_figures(ctx, nodes, rho_floor, scenario, t_max, dt, paths_fig,
                                       steps_per_unit, s_hedge, !no_hedging, normalize_kappa,
                                       gnuplot);
            write_manifests(ctx);
            return rc;
        }
        if (app.got_subcommand(c_self)) {
            ctx.subcommand = "selftest";
            return cmd_selftest(ctx);
        }
        err << "error: no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace fer::cli
