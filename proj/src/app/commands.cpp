#include "crawlsim/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "crawlsim/app/svg_plot.hpp"
#include "crawlsim/errors.hpp"
#include "crawlsim/moreau_yosida.hpp"
#include "crawlsim/vi_checker.hpp"

namespace crawlsim::app {

namespace {

std::string label_for(double force, double velocity, double f) {
    if (f > 0.0 ? std::abs(force) < f : std::abs(velocity) <= kDefaultStickBand) {
        return std::string(to_string(BodyState::Stick));
    }
    return std::string(to_string(velocity > 0.0 ? BodyState::SlipPlus : BodyState::SlipMinus));
}

std::string join(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

std::vector<std::int64_t> to_vec(const RegularizationIndex& n) { return {n.n1(), n.n2()}; }

struct Context {
    const CommandOptions& opts;
    ScenarioConfig cfg;
    std::filesystem::path dir;
    std::ostream& out;

    template <class... A>
    void say(const A&... parts) {
        if (opts.quiet) return;
        (out << ... << parts);
        out << '\n';
    }
};

const PhysicalParams& two_body_params(const ScenarioConfig& cfg, const char* command) {
    if (!cfg.params) {
        throw InvalidInput(std::string("chain: the ") + command + " command supports two-body scenarios only");
    }
    return *cfg.params;
}

std::vector<Band> regime_bands(const EventTrajectory& ev, int body) {
    std::vector<Band> bands;
    for (std::size_t j = 0; j + 1 < ev.grid.size(); ++j) {
        const auto& r = body == 1 ? ev.regimes[j].body1 : ev.regimes[j].body2;
        if (r.state != BodyState::Stick) continue;
        if (!bands.empty() && bands.back().t1 == ev.grid[j]) {
            bands.back().t1 = ev.grid[j + 1];
        } else {
            bands.push_back({ev.grid[j], ev.grid[j + 1], body == 1 ? "#1f77b4" : "#d62728",
                             "body " + std::to_string(body) + " stuck"});
        }
    }
    return bands;
}

void plot_table(const std::filesystem::path& dir, const std::string& prefix,
                const TrajectoryTable& tab, const std::vector<Band>& bands) {
    write_svg(dir / (prefix + "_y.svg"), {prefix + ": velocity of body 1", "t [s]", "y [m/s]",
                                          {{"y", tab.t, tab.y}}, bands});
    write_svg(dir / (prefix + "_x.svg"), {prefix + ": positions", "t [s]", "x [m]",
                                          {{"x1", tab.t, tab.x1}, {"x2", tab.t, tab.x2}}, {}});
    PlotSpec k{prefix + ": impulses", "t [s]", "k [N s]", {}, {}};
    for (std::size_t i = 0; i < tab.k.size(); ++i) {
        k.series.push_back({"k" + std::to_string(i + 1), tab.t, tab.k[i]});
    }
    write_svg(dir / (prefix + "_k.svg"), k);
}

double planned_epsilon(const ScenarioConfig& cfg) {
    const auto& p = *cfg.params;
    const auto plan = plan_schedule(p.f1(), p.f2(), cfg.horizon, cfg.refinement);
    if (plan.stages.size() < 2) {
        const auto& n = plan.stages.front();
        return std::sqrt(p.f1() * p.f1() * cfg.horizon / static_cast<double>(n.n1()) +
                         p.f2() * p.f2() * cfg.horizon / static_cast<double>(n.n2()));
    }
    const auto& a = plan.stages[plan.stages.size() - 2];
    const auto& b = plan.stages.back();
    return std::sqrt(cauchy_bound(p.f1(), p.f2(), a, b, cfg.horizon));
}

// Number of doublings a chain needs, by the same rule as plan_schedule.
int chain_doublings(const ScenarioConfig& cfg) {
    const auto& spec = *cfg.chain;
    bool frictionless = true;
    for (double f : spec.frictions()) frictionless = frictionless && f == 0.0;
    if (frictionless) return 0;
    const double target = cfg.refinement.epsilon * cfg.refinement.epsilon;
    for (int k = 0; k < cfg.refinement.k_max; ++k) {
        std::vector<std::int64_t> a = cfg.chain_n0, b = cfg.chain_n0;
        for (auto& v : a) v <<= k;
        for (auto& v : b) v <<= k + 1;
        if (chain_cauchy_bound(spec, a, b, cfg.horizon) <= target) return k + 1;
    }
    return cfg.refinement.k_max;
}

int cmd_simulate(Context& c) {
    if (c.cfg.is_chain()) {
        const auto& spec = *c.cfg.chain;
        const auto study = chain_doubling_study(spec, c.cfg.initial, c.cfg.chain_n0,
                                                chain_doublings(c.cfg), c.cfg.horizon, c.cfg.solver,
                                                c.cfg.refinement.parallel);
        const auto& run = study.runs.back();
        const auto tab = chain_table(run, spec, c.cfg.initial.x10);
        write_trajectory_csv(c.dir / "trajectory.csv", tab);
        if (c.opts.plots || c.cfg.outputs.plots) plot_table(c.dir, "simulate", tab, {});
        const double bound = study.pairs.empty() ? 0.0 : study.pairs.back().bound;
        c.say("chain bodies: ", spec.bodies(), "  runs: ", study.runs.size());
        c.say("cauchy bound (last pair): ", format_number(bound));
        c.say("linear relation residual: ", format_number(run.linear_residual));
        return kExitOk;
    }
    const auto& p = *c.cfg.params;
    const auto res = refine(p, *c.cfg.gait, c.cfg.initial, c.cfg.horizon, c.cfg.solver, c.cfg.refinement);
    const auto& run = res.runs.back();
    const auto tab = penalized_table(run, p, *c.cfg.gait, c.cfg.initial.x10);
    write_trajectory_csv(c.dir / "trajectory.csv", tab);
    if (c.opts.plots || c.cfg.outputs.plots) plot_table(c.dir, "simulate", tab, {});
    const auto& cert = res.certificate;
    c.say("limit run: ", res.limit.provenance);
    c.say("cauchy bound: ", format_number(cert.theoretical_bound),
          "  epsilon: ", format_number(cert.epsilon),
          cert.converged ? "  (target met)" : "  (budget exhausted before target)");
    c.say("linear relation residual: ",
          format_number(check_linear_relation(res.limit, p, *c.cfg.gait)));
    c.say("wrote ", (c.dir / "trajectory.csv").string());
    return kExitOk;
}

int cmd_oracle(Context& c) {
    const auto& p = two_body_params(c.cfg, "oracle");
    const auto ev = simulate_events(p, *c.cfg.gait, c.cfg.initial, c.cfg.horizon, c.cfg.solver,
                                    c.cfg.oracle);
    const auto tab = oracle_table(ev, p, *c.cfg.gait);
    write_trajectory_csv(c.dir / "oracle.csv", tab);
    write_events_csv(c.dir / "events.csv", ev.events);
    if (c.opts.plots || c.cfg.outputs.plots) {
        auto bands = regime_bands(ev, 1);
        const auto b2 = regime_bands(ev, 2);
        bands.insert(bands.end(), b2.begin(), b2.end());
        plot_table(c.dir, "oracle", tab, bands);
    }
    c.say("events: ", ev.events.size(), "  max stick excess: ", format_number(ev.max_stick_excess));
    c.say("wrote ", (c.dir / "oracle.csv").string(), " and ", (c.dir / "events.csv").string());
    return kExitOk;
}

int cmd_converge(Context& c) {
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
    auto add = [&](const std::vector<std::int64_t>& n, const std::vector<std::int64_t>& r,
                   double bound, double sup, bool pass) {
        ok = ok && pass;
        rows.push_back({join(n), join(r), format_number(bound), format_number(sup * sup),
                        pass ? "pass" : "fail"});
        c.say(join(n), " -> ", join(r), "  bound ", format_number(bound), "  measured ",
              format_number(sup * sup), pass ? "  pass" : "  FAIL");
    };

    if (c.cfg.is_chain()) {
        const auto study = chain_doubling_study(*c.cfg.chain, c.cfg.initial, c.cfg.chain_n0,
                                                std::max(1, chain_doublings(c.cfg)), c.cfg.horizon,
                                                c.cfg.solver, c.cfg.refinement.parallel);
        for (const auto& pc : study.pairs) add(pc.n, pc.r, pc.bound, pc.measured_sup, pc.within_bound);
    } else {
        const auto& p = *c.cfg.params;
        auto res = refine(p, *c.cfg.gait, c.cfg.initial, c.cfg.horizon, c.cfg.solver,
                          c.cfg.refinement);
        auto pairs = res.certificate.pairs;
        if (pairs.empty()) {
            // A one-stage schedule still reports its first doubling.
            const auto n = res.runs.front().index();
            const auto r = n.doubled(1);
            const auto b = integrate(p, *c.cfg.gait, c.cfg.initial, r, c.cfg.horizon, c.cfg.solver);
            PairCheck pc{n, r, cauchy_bound(p.f1(), p.f2(), n, r, c.cfg.horizon),
                         sup_difference(res.runs.front().y, b.y), false};
            pc.within_bound = pc.measured_sup * pc.measured_sup <= pc.bound + kCauchySlack;
            pairs.push_back(pc);
        }
        for (const auto& pc : pairs) {
            add(to_vec(pc.n), to_vec(pc.r), pc.bound, pc.measured_sup, pc.within_bound);
        }
    }
    write_csv(c.dir / "convergence.csv", {"n", "r", "bound", "measured_sup2", "pass"}, rows);
    return ok ? kExitOk : kExitVerify;
}

int cmd_verify(Context& c) {
    const auto& p = two_body_params(c.cfg, "verify");
    const auto& gait = *c.cfg.gait;
    std::optional<std::filesystem::path> file = c.opts.trajectory;
    if (!file && c.cfg.verify_trajectory) file = *c.cfg.verify_trajectory;

    Trajectory traj;
    VerifyOptions vo = c.cfg.verify;
    if (file) {
        traj = read_trajectory_csv(*file).to_trajectory(file->string());
        if (traj.bodies() != 2) throw InvalidInput("verify: trajectory must have exactly k1 and k2");
        if (vo.epsilon == 0.0) vo.epsilon = planned_epsilon(c.cfg);
    } else {
        auto res = refine(p, gait, c.cfg.initial, c.cfg.horizon, c.cfg.solver, c.cfg.refinement);
        traj = std::move(res.limit);
        if (vo.epsilon == 0.0) vo.epsilon = res.certificate.epsilon;
    }

    const auto rep = verify_trajectory(traj, p, gait, vo);
    {
        const auto path = c.dir / "verify_report.txt";
        std::filesystem::create_directories(c.dir);
        std::ofstream f(path);
        f << "trajectory: " << traj.provenance << "\nvi_tol: " << format_number(rep.vi_tol) << '\n'
          << rep.to_text();
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& l : rep.lines) {
        rows.push_back({l.name, format_number(l.s), format_number(l.t), format_number(l.residual),
                        format_number(l.tolerance), l.pass ? "pass" : "fail"});
    }
    write_csv(c.dir / "verify_summary.csv", {"check", "s", "t", "residual", "tolerance", "pass"}, rows);

    const auto& worst = rep.worst();
    std::size_t failed = 0;
    std::vector<std::string> failing;
    for (const auto& l : rep.lines) {
        if (l.pass) continue;
        ++failed;
        const std::string base = l.name.substr(0, l.name.find('['));
        if (std::find(failing.begin(), failing.end(), base) == failing.end()) failing.push_back(base);
    }
    c.say("checks: ", rep.lines.size(), "  failed: ", failed, "  vi_tol: ", format_number(rep.vi_tol));
    if (!failing.empty()) {
        std::string names;
        for (const auto& f : failing) names += (names.empty() ? "" : ", ") + f;
        c.say("failing checks: ", names);
    }
    c.say(rep.all_pass ? "worst: " : "FAILED worst: ", worst.name, " on [", format_number(worst.s),
          ", ", format_number(worst.t), "] residual ", format_number(worst.residual), " tol ",
          format_number(worst.tolerance));
    return rep.all_pass ? kExitOk : kExitVerify;
}

int cmd_compare(Context& c) {
    const auto& p = two_body_params(c.cfg, "compare");
    const auto& gait = *c.cfg.gait;
    const auto res = refine(p, gait, c.cfg.initial, c.cfg.horizon, c.cfg.solver, c.cfg.refinement);
    const auto ev = simulate_events(p, gait, c.cfg.initial, c.cfg.horizon, c.cfg.solver, c.cfg.oracle);
    const auto oracle = ev.to_trajectory();
    const auto gap = uniqueness_compare(oracle, res.limit);

    bool ok = gap.y <= c.cfg.compare_tolerance;
    std::vector<std::vector<std::string>> rows{
        {"sup_y", format_number(gap.y), format_number(c.cfg.compare_tolerance)},
        {"sup_k_sum", format_number(gap.k_sum), ""},
        {"sup_k1", format_number(gap.k1), ""}};

    std::string drift_line = "drift: n/a (gait not periodic over two periods)";
    const auto period = gait.period();
    if (period && c.cfg.horizon >= 2.0 * *period) {
        const double d_pen = net_displacement_per_period(res.limit, gait);
        const double d_orc = net_displacement_per_period(ev, gait);
        const double allowed = c.cfg.drift_tolerance * std::abs(d_orc) + 1e-6;
        const bool drift_ok = std::abs(d_pen - d_orc) <= allowed;
        ok = ok && drift_ok;
        rows.push_back({"drift_penalized", format_number(d_pen), ""});
        rows.push_back({"drift_oracle", format_number(d_orc), ""});
        rows.push_back({"drift_difference", format_number(std::abs(d_pen - d_orc)), format_number(allowed)});
        drift_line = "drift per period: penalized " + format_number(d_pen) + "  oracle " +
                     format_number(d_orc) + (drift_ok ? "" : "  DISAGREE");
    }
    write_csv(c.dir / "compare.csv", {"metric", "value", "tolerance"}, rows);
    {
        std::ofstream f(c.dir / "compare.txt");
        f << "penalized: " << res.limit.provenance << "\noracle events: " << ev.events.size()
          << "\nsup |y_pen - y_oracle|: " << format_number(gap.y)
          << "\nsup |ksum_pen - ksum_oracle|: " << format_number(gap.k_sum)
          << "\nsup |k1_pen - k1_oracle|: " << format_number(gap.k1) << '\n'
          << drift_line << '\n';
    }
    if (c.opts.plots || c.cfg.outputs.plots) {
        const auto pen = penalized_table(res.runs.back(), p, gait, c.cfg.initial.x10);
        const auto orc = oracle_table(ev, p, gait);
        auto bands = regime_bands(ev, 1);
        const auto b2 = regime_bands(ev, 2);
        bands.insert(bands.end(), b2.begin(), b2.end());
        write_svg(c.dir / "compare_y.svg", {"velocity of body 1", "t [s]", "y [m/s]",
                                            {{"penalized", pen.t, pen.y}, {"event-driven", orc.t, orc.y}},
                                            bands});
        write_svg(c.dir / "compare_x1.svg", {"position of body 1", "t [s]", "x1 [m]",
                                             {{"penalized", pen.t, pen.x1}, {"event-driven", orc.t, orc.x1}},
                                             {}});
        write_svg(c.dir / "compare_k.svg", {"impulses", "t [s]", "k [N s]",
                                            {{"k1 penalized", pen.t, pen.k[0]},
                                             {"k2 penalized", pen.t, pen.k[1]},
                                             {"k1 event-driven", orc.t, orc.k[0]},
                                             {"k2 event-driven", orc.t, orc.k[1]}},
                                            {}});
    }
    c.say("sup |y_pen - y_oracle| = ", format_number(gap.y), "  (tolerance ",
          format_number(c.cfg.compare_tolerance), ")");
    c.say(drift_line);
    return ok ? kExitOk : kExitVerify;
}

}  // namespace

std::filesystem::path output_dir(const CommandOptions& opts, const ScenarioConfig& cfg) {
    if (opts.out) return *opts.out;
    if (cfg.outputs.dir) return *cfg.outputs.dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "crawlsim-out";
}

TrajectoryTable penalized_table(const PenalizedTrajectory& run, const PhysicalParams& params,
                                const GaitProgram& gait, double x10) {
    TrajectoryTable tab;
    tab.t = run.grid;
    tab.y = run.y;
    tab.k = run.k;
    const auto pos = reconstruct_positions(run.grid, run.y, x10, gait);
    tab.x1 = pos.x1;
    tab.x2 = pos.x2;
    const FrictionPotential p1(params.f1()), p2(params.f2());
    for (std::size_t j = 0; j < run.grid.size(); ++j) {
        const GaitState g = gait.evaluate(run.grid[j]);
        const double v2 = run.y[j] + g.rate;
        const double F1 = gradient(p1, run.n.at(0), run.y[j]);
        const double F2 = gradient(p2, run.n.at(1), v2);
        tab.F1.push_back(F1);
        tab.F2.push_back(F2);
        tab.G2.push_back(contact_force(params, g.accel, F1, F2));
        tab.regime1.push_back(label_for(F1, run.y[j], params.f1()));
        tab.regime2.push_back(label_for(F2, v2, params.f2()));
    }
    return tab;
}

TrajectoryTable chain_table(const PenalizedTrajectory& run, const ChainSpec& spec, double x10) {
    const std::size_t p = spec.bodies();
    TrajectoryTable tab;
    tab.t = run.grid;
    tab.y = run.y;
    tab.k = run.k;
    std::vector<GaitState> off(p);
    std::vector<double> F(p);
    double x = x10;
    for (std::size_t j = 0; j < run.grid.size(); ++j) {
        if (j > 0) x += 0.5 * (run.grid[j] - run.grid[j - 1]) * (run.y[j] + run.y[j - 1]);
        spec.offsets(run.grid[j], off);
        double forcing = 0.0, friction = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            F[i] = gradient(FrictionPotential(spec.frictions()[i]), run.n.at(i), run.y[j] + off[i].rate);
            friction += F[i];
            forcing += spec.masses()[i] * off[i].accel;
        }
        const double ydot = (-forcing - friction) / spec.total_mass();
        tab.x1.push_back(x);
        tab.x2.push_back(x + off[1].length);
        tab.F1.push_back(F[0]);
        tab.F2.push_back(F[1]);
        // Net link force on body 2: m2 x2'' = G2 - F2.
        tab.G2.push_back(spec.masses()[1] * (ydot + off[1].accel) + F[1]);
        tab.regime1.push_back(label_for(F[0], run.y[j], spec.frictions()[0]));
        tab.regime2.push_back(label_for(F[1], run.y[j] + off[1].rate, spec.frictions()[1]));
    }
    return tab;
}

TrajectoryTable oracle_table(const EventTrajectory& run, const PhysicalParams& params,
                             const GaitProgram& gait) {
    TrajectoryTable tab;
    tab.t = run.grid;
    tab.y = run.y;
    tab.x1 = run.x1;
    tab.k = {run.k1, run.k2};
    tab.F1 = run.F1;
    tab.F2 = run.F2;
    for (std::size_t j = 0; j < run.grid.size(); ++j) {
        const GaitState g = gait.evaluate(run.grid[j]);
        tab.x2.push_back(run.x1[j] + g.length);
        tab.G2.push_back(contact_force(params, g.accel, run.F1[j], run.F2[j]));
        tab.regime1.push_back(std::string(to_string(run.regimes[j].body1.state)));
        tab.regime2.push_back(std::string(to_string(run.regimes[j].body2.state)));
    }
    return tab;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
    try {
        ScenarioConfig cfg = load_config(opts.config);
        if (opts.seed) cfg.verify.seed = *opts.seed;
        Context c{opts, std::move(cfg), {}, out};
        c.dir = output_dir(opts, c.cfg);
        std::filesystem::create_directories(c.dir);
        if (name == "simulate") return cmd_simulate(c);
        if (name == "oracle") return cmd_oracle(c);
        if (name == "converge") return cmd_converge(c);
        if (name == "verify") return cmd_verify(c);
        if (name == "compare") return cmd_compare(c);
        err << "error: unknown command " << name << '\n';
        return kExitConfig;
    } catch (const InvalidInput& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        err << "solver failure at t = " << format_number(e.time()) << ": " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "runtime failure: " << e.what() << '\n';
        return kExitSolver;
    }
}

}  // namespace crawlsim::app
