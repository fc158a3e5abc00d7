#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ppa/arrival.hpp"
#include "ppa/experiments.hpp"
#include "ppa/mp1.hpp"
#include "ppa/parallel.hpp"
#include "ppa/policies.hpp"
#include "ppa/secretary.hpp"

namespace {

using namespace ppa;

void write_output(const std::string& path, const std::string& payload) {
    if (path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << payload;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> values;
    std::stringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) values.push_back(std::stod(token));
    if (values.empty()) throw CLI::ValidationError("expected a comma-separated number list");
    return values;
}

struct SimulateOptions {
    std::string policy;
    double a = 0.0, p = -1.0, c = 0.9;
    int b = 0, n = 0;
    std::string instance = "table2";
    std::string instance_file;
    long trials = 10000;
    std::uint64_t seed = 1;
    bool trace = false;
};

int run_simulate(const SimulateOptions& opt, const std::string& out_path, int threads) {
    double a = opt.a;
    InitialSequence seq = build_all_empty(3);
    std::string instance_label;
    if (!opt.instance_file.empty()) {
        InstanceFile file = parse_instance_text(read_file(opt.instance_file));
        if (opt.a > 0.0 && opt.a != file.a)
            throw CLI::ValidationError("--a conflicts with the instance file value");
        a = file.a;
        seq = std::move(file.sequence);
        instance_label = "file:" + opt.instance_file;
    } else if (opt.instance == "table2") {
        if (opt.n < 3) throw CLI::ValidationError("the table2 instance needs --n");
        if (!(a > 0.0 && a < 1.0)) throw CLI::ValidationError("need --a in (0,1)");
        seq = table2_instance(opt.b, opt.n);
        instance_label = "table2";
    } else {
        throw CLI::ValidationError("unknown --instance kind: " + opt.instance);
    }

    static const std::set<std::string> known_policies{
        "alg1", "alg2", "ball", "uniform", "mixture", "accept-all", "reject-all"};
    if (!known_policies.count(opt.policy))
        throw CLI::ValidationError("unknown policy: " + opt.policy);

    const MarketParams params{opt.b, seq.n(), a, opt.p};
    params.validate();
    const PolicyFactory factory = policy_factory(opt.policy, opt.c);

    std::string header = "# config: simulate policy=" + opt.policy + " a=" + format_number(a) +
                         " p=" + format_number(opt.p) + " b=" + std::to_string(opt.b) +
                         " n=" + std::to_string(seq.n()) + " instance=" + instance_label;
    if (opt.policy == "alg2") header += " c=" + format_number(opt.c);
    header += " seed=" + std::to_string(opt.seed);

    std::string payload;
    if (opt.trace) {
        const Realization r = sample_realization(seq, opt.p, opt.seed);
        auto policy = factory(params, derive_seed(opt.seed, 1));
        std::vector<TrajectoryRow> rows;
        run_policy(*policy, r, params, &rows);
        payload = header + " trace=1\n" + trajectory_csv(rows, seq.n());
    } else {
        const RatioEstimate est = estimate_ratio(factory, seq, params, opt.trials, opt.seed, threads);
        payload = header + " trials=" + std::to_string(opt.trials) + "\n";
        payload += "policy,a,p,b,n,trials,seed,opt,mean_ratio,ci_half_width\n";
        payload += opt.policy + "," + format_number(a) + "," + format_number(opt.p) + "," +
                   std::to_string(opt.b) + "," + std::to_string(seq.n()) + "," +
                   std::to_string(opt.trials) + "," + std::to_string(opt.seed) + "," +
                   format_number(est.opt_value) + "," + format_number(est.mean_ratio) + "," +
                   format_number(est.ci_half_width_95) + "\n";
    }
    write_output(out_path, payload);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online allocation under partially predictable demand"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file merged under the flags");

    std::string out_path = "-";
    int threads = 0;
    app.add_option("--out", out_path, "output path, - for stdout")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

    // simulate
    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo ratio or trajectory dump");
    simulate->fallthrough();
    simulate->add_option("--policy", sim.policy, "one of alg1, alg2, ball, uniform, mixture, accept-all, reject-all")
        ->required();
    simulate->add_option("--a", sim.a, "type-2 revenue in (0,1)");
    simulate->add_option("--p", sim.p, "stochastic fraction")->required();
    simulate->add_option("--b", sim.b, "inventory")->required();
    simulate->add_option("--n", sim.n, "horizon");
    simulate->add_option("--c", sim.c, "target ratio for alg2")->capture_default_str();
    simulate->add_option("--instance", sim.instance, "named instance (table2)")->capture_default_str();
    simulate->add_option("--instance-file", sim.instance_file, "instance file path");
    simulate->add_option("--trials", sim.trials, "Monte Carlo trials")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "master seed")->capture_default_str();
    simulate->add_flag("--trace", sim.trace, "dump one seeded trajectory instead of estimating");

    // mp1
    double mp1_a = 0.5, mp1_p = 0.5, mp1_tol = 1e-4;
    std::string mp1_kappa = "0.5";
    int mp1_grid = 40;
    CLI::App* mp1 = app.add_subcommand("mp1", "solve the factor-revealing program");
    mp1->fallthrough();
    mp1->add_option("--a", mp1_a, "type-2 revenue")->required();
    mp1->add_option("--p", mp1_p, "stochastic fraction")->required();
    mp1->add_option("--kappa", mp1_kappa, "b/n list, comma separated")->capture_default_str();
    mp1->add_option("--grid", mp1_grid, "grid points per axis")->capture_default_str();
    mp1->add_option("--tol", mp1_tol, "refinement tolerance")->capture_default_str();

    // secretary
    double sec_p = 0.5, sec_gamma = 0.0;
    bool sec_optimal = false;
    int sec_n = 10000;
    long sec_trials = 0;
    std::uint64_t sec_seed = 1;
    std::string sec_instance = "tightness";
    CLI::App* secretary = app.add_subcommand("secretary", "observation-selection analysis");
    secretary->fallthrough();
    secretary->add_option("--p", sec_p, "stochastic fraction")->required();
    CLI::Option* gamma_opt = secretary->add_option("--gamma", sec_gamma, "observation fraction");
    secretary->add_flag("--optimal", sec_optimal, "use the optimal observation fraction")
        ->excludes(gamma_opt);
    secretary->add_option("--n", sec_n, "instance size for Monte Carlo")->capture_default_str();
    secretary->add_option("--trials", sec_trials, "Monte Carlo trials (0 = formula only)")
        ->capture_default_str();
    secretary->add_option("--seed", sec_seed, "master seed")->capture_default_str();
    secretary->add_option("--instance", sec_instance, "uniform-adversary or tightness")
        ->capture_default_str();

    // reproduce
    std::string rep_kind;
    std::string rep_a = "0.5", rep_kappa = "0.5,0.7,0.9", rep_p;
    double rep_scalar_p = 0.5;
    int rep_b = 5000, rep_n = 10000, rep_grid = 40;
    long rep_trials = 10000;
    std::uint64_t rep_seed = 1;
    CLI::App* reproduce = app.add_subcommand("reproduce", "rebuild a reported table or figure");
    reproduce->fallthrough();
    reproduce->add_option("target", rep_kind, "fig2, table2, table3, or bound61")->required();
    reproduce->add_option("--a", rep_a, "revenue list (fig2) or value")->capture_default_str();
    reproduce->add_option("--kappa", rep_kappa, "b/n list for fig2")->capture_default_str();
    reproduce->add_option("--p-grid", rep_p, "p list (defaults to the published grid)");
    reproduce->add_option("--p", rep_scalar_p, "p for table2/bound61")->capture_default_str();
    reproduce->add_option("--b", rep_b, "inventory for table2")->capture_default_str();
    reproduce->add_option("--n", rep_n, "horizon for table2/bound61")->capture_default_str();
    reproduce->add_option("--grid", rep_grid, "grid points per axis for fig2")->capture_default_str();
    reproduce->add_option("--trials", rep_trials, "Monte Carlo trials")->capture_default_str();
    reproduce->add_option("--seed", rep_seed, "master seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim, out_path, threads);

        if (mp1->parsed()) {
            std::string payload = "# config: mp1 a=" + format_number(mp1_a) +
                                  " p=" + format_number(mp1_p) + " kappa=" + mp1_kappa +
                                  " grid=" + std::to_string(mp1_grid) +
                                  " tol=" + format_number(mp1_tol) + "\n";
            payload += "a,p,kappa,c_star,lambda,n1,n2,eta1,eta2\n";
            for (double kappa : parse_list(mp1_kappa)) {
                const Mp1Solution sol =
                    solve_mp1(Mp1Params::normalized(mp1_a, mp1_p, kappa), mp1_grid, mp1_tol, threads);
                payload += format_number(mp1_a) + "," + format_number(mp1_p) + "," +
                           format_number(kappa) + "," + format_number(sol.c_star) + "," +
                           format_number(sol.argmin.lambda) + "," + format_number(sol.argmin.n1) +
                           "," + format_number(sol.argmin.n2) + "," +
                           format_number(sol.argmin.eta1) + "," + format_number(sol.argmin.eta2) +
                           "\n";
            }
            write_output(out_path, payload);
            return 0;
        }

        if (secretary->parsed()) {
            const double gamma = sec_optimal ? optimal_gamma(sec_p) : sec_gamma;
            if (!(gamma > 0.0 && gamma < 1.0))
                throw CLI::ValidationError("need --gamma in (0,1) or --optimal");
            std::string payload = "# config: secretary p=" + format_number(sec_p) +
                                  " gamma=" + format_number(gamma) +
                                  " instance=" + sec_instance + " n=" + std::to_string(sec_n) +
                                  " trials=" + std::to_string(sec_trials) +
                                  " seed=" + std::to_string(sec_seed) + "\n";
            payload += "p,gamma,formula_value,mc_estimate,ci_half_width\n";
            std::string mc_cols = ",";
            if (sec_trials > 0) {
                SecretaryInstance inst = [&] {
                    if (sec_instance == "tightness")
                        return adversarial_secretary_instance(sec_n, gamma);
                    if (sec_instance == "uniform-adversary") {
                        std::vector<double> revenues;
                        for (int i = 1; i <= sec_n; ++i) revenues.push_back(double(i));
                        return SecretaryInstance(std::move(revenues));
                    }
                    throw CLI::ValidationError("unknown --instance kind: " + sec_instance);
                }();
                const SuccessEstimate est =
                    estimate_success(inst, gamma, sec_p, sec_trials, sec_seed, threads);
                mc_cols = format_number(est.estimate) + "," + format_number(est.half_width_95);
            }
            payload += format_number(sec_p) + "," + format_number(gamma) + "," +
                       format_number(asymptotic_success(gamma, sec_p)) + "," + mc_cols + "\n";
            write_output(out_path, payload);
            return 0;
        }

        if (reproduce->parsed()) {
            std::string payload;
            if (rep_kind == "fig2") {
                std::vector<double> p_grid;
                if (rep_p.empty())
                    for (int i = 1; i <= 19; ++i) p_grid.push_back(0.05 * i);
                else
                    p_grid = parse_list(rep_p);
                payload = reproduce_figure2(parse_list(rep_a), parse_list(rep_kappa), p_grid,
                                            rep_grid, threads);
            } else if (rep_kind == "table2") {
                payload = reproduce_table2(parse_list(rep_a).front(), rep_scalar_p, rep_b, rep_n,
                                           rep_trials, rep_seed, threads);
            } else if (rep_kind == "table3") {
                std::vector<double> p_grid;
                if (rep_p.empty())
                    for (int i = 1; i <= 10; ++i) p_grid.push_back(0.1 * i);
                else
                    p_grid = parse_list(rep_p);
                payload = reproduce_table3(p_grid);
            } else if (rep_kind == "bound61") {
                payload = reproduce_bound61(parse_list(rep_a).front(), rep_scalar_p, rep_n,
                                            rep_trials, rep_seed, threads);
            } else {
                throw CLI::ValidationError("unknown reproduce target: " + rep_kind);
            }
            write_output(out_path, payload);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
