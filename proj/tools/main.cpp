// swarmstat command-line interface: benchmark runs, the six estimation /
// design applications, and seeded multi-run comparisons.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "swarmstat/benchmarks.hpp"
#include "swarmstat/csv.hpp"
#include "swarmstat/design.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/experiment.hpp"
#include "swarmstat/impute.hpp"
#include "swarmstat/optimizer.hpp"
#include "swarmstat/rasch.hpp"
#include "swarmstat/renewal.hpp"
#include "swarmstat/scad.hpp"
#include "swarmstat/scgtm.hpp"
#include "swarmstat/stats.hpp"
#include "swarmstat/version.hpp"

namespace {

using namespace swarmstat;

struct GlobalOpts {
    std::string algo = "cso-ma";
    int swarm_size = 40;
    std::uint64_t evals = 20000;
    int runs = 1;
    std::uint64_t seed = 0;
    double phi = 0.3;
    double tolerance = 1e-5;
    std::string out;
    std::string format = "csv";
};

void add_global_flags(CLI::App* cmd, GlobalOpts& g) {
    cmd->add_option("--algo", g.algo, "Algorithm: cso-ma, cso, or pso");
    cmd->add_option("--swarm-size", g.swarm_size, "Number of particles");
    cmd->add_option("--evals", g.evals, "Objective evaluation budget");
    cmd->add_option("--runs", g.runs, "Independent seeded runs");
    cmd->add_option("--seed", g.seed, "Base seed");
    cmd->add_option("--phi", g.phi, "Social factor (default 0.3)");
    cmd->add_option("--tolerance", g.tolerance,
                    "Improvement-window stop threshold (0 disables)");
    cmd->add_option("--out", g.out, "Output file path");
    cmd->add_option("--format", g.format, "Output format: csv or json");
}

OptConfig make_config(const GlobalOpts& g) {
    OptConfig c;
    c.swarm_size = g.swarm_size;
    c.max_evals = g.evals;
    c.seed = g.seed;
    c.phi = g.phi;
    c.tolerance = g.tolerance;
    c.algorithm = algorithm_from_string(g.algo);
    return c;
}

void write_or_print(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
    } else {
        csv::write_file_atomic(out, text);
        std::cout << "wrote " << out << "\n";
    }
}

void print_result(const OptResult& r) {
    std::printf("best value     %.10g\n", r.best_value);
    std::printf("evaluations    %llu\n", static_cast<unsigned long long>(r.evals_used));
    std::printf("elapsed        %.3fs\n", r.elapsed_seconds);
    std::printf("best position ");
    for (const double v : r.best_position) std::printf(" %.6g", v);
    std::printf("\n");
}

int run_single_or_experiment(const GlobalOpts& g, const std::string& id,
                             const Objective& objective, const SearchSpace& space) {
    if (g.runs <= 1) {
        const OptResult r = minimize(objective, space, make_config(g));
        print_result(r);
        return 0;
    }
    experiment::Experiment exp;
    exp.objective_id = id;
    exp.dim = space.dim();
    exp.algorithms = {algorithm_from_string(g.algo)};
    exp.runs = g.runs;
    exp.config = make_config(g);
    const auto report = experiment::run_experiment(exp, objective, space);
    const auto& s = report.summary.at(exp.algorithms[0]);
    std::printf("%s over %d runs: mean %.10g sd %.3g median %.10g\n", id.c_str(), g.runs,
                s.mean, s.sd, s.median);
    if (!g.out.empty()) {
        experiment::emit(report, g.out, experiment::format_from_string(g.format));
        std::printf("wrote %s\n", g.out.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarmstat: competitive-swarm optimization with statistical applications"};
    app.set_version_flag("--version", std::string("swarmstat ") + kVersion);
    app.set_config("--config", "", "Read options from a key=value config file");
    app.require_subcommand(1);

    GlobalOpts g;

    // ---------------------------------------------------------------- bench
    auto* bench_cmd = app.add_subcommand("bench", "Minimize a named benchmark function");
    std::string fn = "ackley";
    std::size_t dim = 10;
    bench_cmd->add_option("--fn", fn, "weierstrass, quartic, ackley, dynamic-sphere, sphere");
    bench_cmd->add_option("--dim", dim, "Problem dimension");
    add_global_flags(bench_cmd, g);

    // ---------------------------------------------------------------- compare
    auto* compare_cmd =
        app.add_subcommand("compare", "Run all three algorithms and the rank-sum tests");
    compare_cmd->add_option("--fn", fn, "Benchmark name");
    compare_cmd->add_option("--dim", dim, "Problem dimension");
    add_global_flags(compare_cmd, g);

    // ---------------------------------------------------------------- scgtm
    auto* scgtm_cmd = app.add_subcommand("scgtm", "Fit the single-cell trend model");
    std::string data_path;
    bool estimate_baseline = false;
    scgtm_cmd->add_option("--data", data_path, "CSV with columns t,y (one gene)")
        ->required();
    scgtm_cmd->add_flag("--estimate-baseline", estimate_baseline,
                        "Estimate the baseline offset instead of fixing it at 0");
    add_global_flags(scgtm_cmd, g);

    // ---------------------------------------------------------------- rasch
    auto* rasch_cmd = app.add_subcommand("rasch", "Fit the Rasch marginal likelihood");
    int nodes = 21;
    rasch_cmd->add_option("--data", data_path, "Headerless 0/1 response matrix CSV")
        ->required();
    rasch_cmd->add_option("--nodes", nodes, "Gauss-Hermite nodes");
    add_global_flags(rasch_cmd, g);

    // ---------------------------------------------------------------- survival
    auto* surv_cmd =
        app.add_subcommand("survival", "Simulate a Markov renewal sample and estimate beta");
    std::string preset_name = "complete3";
    int individuals = 100;
    int cov_dim = 3;
    double baseline_rate = 0.5;
    double horizon = 10.0;
    double norm_p = 2.0;
    std::vector<double> beta_true;
    std::string export_paths;
    surv_cmd->add_option("--preset", preset_name, "bmt5, complete3, or twostate");
    surv_cmd->add_option("--m", individuals, "Number of individuals");
    surv_cmd->add_option("--d", cov_dim, "Covariate dimension");
    surv_cmd->add_option("--rate", baseline_rate, "Baseline hazard rate");
    surv_cmd->add_option("--horizon", horizon, "Calendar-time horizon");
    surv_cmd->add_option("--p", norm_p, "Norm order for the score objective");
    surv_cmd->add_option("--beta", beta_true, "True beta for simulation");
    surv_cmd->add_option("--export-paths", export_paths, "Write simulated paths CSV here");
    add_global_flags(surv_cmd, g);

    // ---------------------------------------------------------------- impute
    auto* impute_cmd = app.add_subcommand("impute", "EM matrix completion");
    int em_iters = 10;
    bool use_fixture = false;
    std::vector<double> theta_init = {0.381, 0.021, 0.197};
    impute_cmd->add_option("--data", data_path, "CSV with columns x,y1,y2 (blank = missing)");
    impute_cmd->add_flag("--fixture", use_fixture, "Use the built-in nine-row dataset");
    impute_cmd->add_option("--em-iters", em_iters, "EM iterations");
    impute_cmd->add_option("--theta-init", theta_init, "Initial theta (three values)");
    add_global_flags(impute_cmd, g);

    // ---------------------------------------------------------------- scad
    auto* scad_cmd = app.add_subcommand("scad", "SCAD-penalized regression solution path");
    std::string response = "CRAP";
    bool synthetic = false;
    int path_runs = 50;
    double scad_a = 2.5, scad_lambda = 1.0;
    scad_cmd->add_option("--data", data_path, "CSV with a header of variable names");
    scad_cmd->add_option("--response", response, "Response column name");
    scad_cmd->add_flag("--synthetic", synthetic, "Use the built-in synthetic fixture");
    scad_cmd->add_option("--path-runs", path_runs, "Repeated runs per grid value");
    scad_cmd->add_option("--a", scad_a, "SCAD a parameter");
    scad_cmd->add_option("--lambda", scad_lambda, "SCAD lambda parameter");
    add_global_flags(scad_cmd, g);

    // ---------------------------------------------------------------- design
    auto* design_cmd = app.add_subcommand("design", "Locally D-optimal design search");
    std::string spec_path;
    std::string design_preset = "";
    int k_points = 20;
    int particles = 200;
    bool check_efficiency = true;
    design_cmd->add_option("--spec", spec_path, "Model spec file");
    design_cmd->add_option("--preset", design_preset, "car-refuel or logistic2");
    design_cmd->add_option("--k", k_points, "Candidate support points");
    design_cmd->add_option("--particles", particles, "Swarm size for the search");
    design_cmd->add_flag("--efficiency,!--no-efficiency", check_efficiency,
                         "Compute the D-efficiency lower bound");
    add_global_flags(design_cmd, g);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench_cmd->parsed()) {
            const auto b = bench::make_benchmark(fn, dim);
            return run_single_or_experiment(g, b.name, b.objective, b.space);
        }

        if (compare_cmd->parsed()) {
            experiment::Experiment exp;
            exp.objective_id = fn;
            exp.dim = dim;
            exp.runs = std::max(g.runs, 2);
            exp.config = make_config(g);
            const auto report = experiment::run_experiment(exp);
            std::printf("%-8s %14s %12s %14s %10s\n", "algo", "mean", "sd", "median",
                        "p vs cso-ma");
            for (const auto& [algo, s] : report.summary) {
                std::printf("%-8s %14.6g %12.4g %14.6g %10s\n", to_string(algo).c_str(),
                            s.mean, s.sd, s.median,
                            s.p_vs_cso_ma ? csv::format_double(*s.p_vs_cso_ma).c_str()
                                          : "n/a");
            }
            if (!g.out.empty()) {
                experiment::emit(report, g.out, experiment::format_from_string(g.format));
                std::printf("wrote %s\n", g.out.c_str());
            }
            return 0;
        }

        if (scgtm_cmd->parsed()) {
            const auto data = scgtm::load_csv(data_path);
            const auto space = scgtm::parameter_space(data, estimate_baseline);
            return run_single_or_experiment(
                g, "scgtm:" + data_path, scgtm::make_objective(data, estimate_baseline),
                space);
        }

        if (rasch_cmd->parsed()) {
            const auto data = rasch::load_csv(data_path);
            return run_single_or_experiment(g, "rasch:" + data_path,
                                            rasch::make_objective(data, nodes),
                                            rasch::parameter_space(data));
        }

        if (surv_cmd->parsed()) {
            const auto structure = renewal::preset(preset_name);
            if (beta_true.empty())
                beta_true.assign(static_cast<std::size_t>(cov_dim), 0.5);
            const auto sample = renewal::simulate_sample(
                structure, static_cast<std::size_t>(individuals),
                static_cast<std::size_t>(cov_dim), baseline_rate, beta_true, horizon,
                g.seed);
            std::size_t events = 0;
            for (const auto& p : sample.paths) events += p.jumps();
            std::printf("simulated %d individuals, %zu transitions\n", individuals,
                        events);
            if (!export_paths.empty()) {
                csv::write_file_atomic(export_paths, renewal::paths_to_csv(sample));
                std::printf("wrote %s\n", export_paths.c_str());
            }
            const SearchSpace box = SearchSpace::box(static_cast<std::size_t>(cov_dim),
                                                     -5.0, 5.0);
            const OptResult fit =
                minimize(renewal::make_mnorm_objective(sample, norm_p), box,
                         make_config(g));
            print_result(fit);
            return 0;
        }

        if (impute_cmd->parsed()) {
            impute::BivariateData data;
            if (use_fixture || data_path.empty()) {
                data = impute::fixture_table();
            } else {
                // Sigma estimated from complete rows, then treated as known
                data = impute::load_csv(data_path, {{{1.0, 0.0}, {0.0, 1.0}}});
                data.sigma = impute::sigma_from_complete_rows(data);
            }
            if (theta_init.size() != 3)
                throw ConfigError("impute: --theta-init needs exactly three values");
            const auto fit = impute::em_fit(
                data, impute::CompartmentParams{theta_init[0], theta_init[1], theta_init[2]},
                em_iters, make_config(g));
            std::printf("theta_hat = (%.4f, %.4f, %.4f) after %d EM iterations\n",
                        fit.theta.theta1, fit.theta.theta2, fit.theta.theta3,
                        fit.iterations_run);
            std::string text = "x,y1,y2\n";
            for (std::size_t i = 0; i < data.rows(); ++i)
                text += csv::format_double(data.x[i]) + "," +
                        csv::format_double(fit.imputed[i][0]) + "," +
                        csv::format_double(fit.imputed[i][1]) + "\n";
            write_or_print(g.out, text);
            return 0;
        }

        if (scad_cmd->parsed()) {
            scad::RegressionData data;
            if (synthetic || data_path.empty()) {
                data = scad::synthetic_lake();
            } else {
                data = scad::load_csv(data_path, response);
                scad::standardize(data);
            }
            scad::ScadConfig cfg;
            cfg.a = scad_a;
            cfg.lambda = scad_lambda;
            OptConfig run_cfg = make_config(g);
            if (run_cfg.swarm_size == 40) run_cfg.swarm_size = 26; // near the study's 25
            const auto path = scad::solution_path(data, cfg, run_cfg, path_runs);
            write_or_print(g.out, scad::path_to_csv(path, data.names));
            return 0;
        }

        if (design_cmd->parsed()) {
            design::ModelSpec spec;
            if (!spec_path.empty())
                spec = design::load_spec(spec_path);
            else if (design_preset == "logistic2")
                spec = design::logistic2_spec();
            else
                spec = design::car_refuel_spec();
            OptConfig cfg = make_config(g);
            cfg.swarm_size = particles;
            const auto d = design::design_search(spec, k_points, cfg);
            const auto crit = design::d_criterion(d, spec);
            std::printf("support points: %zu, log det M = %.6f\n", d.size(),
                        crit.log_det);
            if (check_efficiency) {
                OptConfig inner = make_config(g);
                inner.swarm_size = 40;
                inner.max_evals = std::min<std::uint64_t>(g.evals, 20000);
                const auto bound = design::d_efficiency_lower_bound(d, spec, inner);
                std::printf("D-efficiency lower bound: %.4f (d_max = %.4f)\n",
                            bound.atwood, bound.d_max);
            }
            write_or_print(g.out, design::design_to_csv(d, spec));
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
