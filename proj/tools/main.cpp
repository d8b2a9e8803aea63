#include "pulsesplit/cli.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace pulsesplit;

struct CommonOptions {
    std::string solver = "mintikh";
    double alpha = 1e-3;
    double weight_r = 1.0;
    double weight_s = 0.0;
    std::string filter = "shift";
    double u_min = 1.0;
    double u_max = 10.0;
    int u_count = 100;
    double known_u = 0.0;
    bool has_known_u = false;
    // adm
    double u0 = 0.0;
    bool has_u0 = false;
    double outer_tol = 1e-3;
    double inner_tol = 1e-4;
    int window = 10;
    int max_outer = 2000;
    int max_inner = 200;
    std::string out_dir = "out";
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--solver", opt.solver, "Solver: direct | lintikh | mintikh | adm")
        ->check(CLI::IsMember({"direct", "lintikh", "mintikh", "adm"}))
        ->capture_default_str();
    cmd->add_option("--alpha", opt.alpha, "Regularization parameter")->capture_default_str();
    cmd->add_option("--weight-r", opt.weight_r, "Solution-space smoothness exponent r")
        ->capture_default_str();
    cmd->add_option("--weight-s", opt.weight_s, "Data-space smoothness exponent s")
        ->capture_default_str();
    cmd->add_option("--filter", opt.filter, "Direct-solver denominator filter: shift | threshold")
        ->check(CLI::IsMember({"shift", "threshold"}))
        ->capture_default_str();
    cmd->add_option("--u-min", opt.u_min, "Candidate grid lower bound (m/s)")->capture_default_str();
    cmd->add_option("--u-max", opt.u_max, "Candidate grid upper bound (m/s)")->capture_default_str();
    cmd->add_option("--u-count", opt.u_count, "Candidate grid size")->capture_default_str();
    cmd->add_option("--known-u", opt.known_u, "Velocity for direct/lintikh (m/s)")
        ->each([&opt](const std::string&) { opt.has_known_u = true; });
    cmd->add_option("--u0", opt.u0, "Initial velocity for adm (m/s)")
        ->each([&opt](const std::string&) { opt.has_u0 = true; });
    cmd->add_option("--outer-tol", opt.outer_tol, "adm outer stopping tolerance")
        ->capture_default_str();
    cmd->add_option("--inner-tol", opt.inner_tol, "adm inner stopping tolerance")
        ->capture_default_str();
    cmd->add_option("--window", opt.window, "adm stopping window")->capture_default_str();
    cmd->add_option("--max-outer", opt.max_outer, "adm outer iteration cap")->capture_default_str();
    cmd->add_option("--max-inner", opt.max_inner, "adm inner iteration cap")->capture_default_str();
    cmd->add_option("--out", opt.out_dir, "Output directory")
        ->envname("PULSESPLIT_OUTDIR")
        ->capture_default_str();
}

struct SimulateOptions {
    int n_points = 3;
    std::vector<double> distances;
    double true_u = 2.0;
    double period = 0.75;
    int samples = 500;
    double delta = 0.0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string reflectors;
};

void add_simulate_options(CLI::App* cmd, SimulateOptions& opt) {
    cmd->add_option("--n", opt.n_points, "Number of measurement points (preset geometry)")
        ->capture_default_str();
    cmd->add_option("--distances-m", opt.distances,
                    "Explicit distances from point 1 in meters, e.g. 0,0.09,0.15")
        ->delimiter(',');
    cmd->add_option("--true-u", opt.true_u, "True velocity (m/s)")->capture_default_str();
    cmd->add_option("--period-s", opt.period, "Cardiac period (s)")->capture_default_str();
    cmd->add_option("--samples", opt.samples, "Samples per period")->capture_default_str();
    cmd->add_option("--delta", opt.delta, "Relative noise level")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "Noise seed (required)")
        ->each([&opt](const std::string&) { opt.has_seed = true; });
    cmd->add_option("--reflectors", opt.reflectors,
                    "Reflectors as distance:attenuation pairs, e.g. 0.02:0.5,0.05:0.3");
}

ReflectionConfig parse_reflectors(const std::string& text) {
    if (text.empty()) return ReflectionConfig::defaults();
    std::vector<Reflector> reflectors;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, (comma == std::string::npos ? text.size() : comma) - start);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("config: reflector '" + item + "' is not distance:attenuation");
        }
        reflectors.push_back(Reflector{std::stod(item.substr(0, colon)),
                                       std::stod(item.substr(colon + 1))});
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return ReflectionConfig{std::move(reflectors)};
}

SolverKind parse_solver(const std::string& name) {
    if (name == "direct") return SolverKind::direct;
    if (name == "lintikh") return SolverKind::lintikh;
    if (name == "mintikh") return SolverKind::mintikh;
    return SolverKind::adm;
}

RunConfig build_config(const CommonOptions& common, const SimulateOptions* sim,
                       const std::string* input, const std::vector<double>* distances,
                       double period, int samples) {
    RunConfig config;
    config.solver = parse_solver(common.solver);
    config.reg.alpha = common.alpha;
    config.reg.params = WeightedNormParams{common.weight_s, common.weight_r};
    config.reg.filter = common.filter == "threshold" ? DenominatorFilter::hard_threshold
                                                     : DenominatorFilter::tikhonov_shift;
    config.candidates = CandidateGrid::linspace(common.u_min, common.u_max, common.u_count);
    if (common.has_known_u) config.known_u = common.known_u;
    if (config.solver == SolverKind::adm) {
        if (!common.has_u0) throw std::invalid_argument("config: adm requires --u0");
        AdmConfig adm_config;
        adm_config.u0 = common.u0;
        adm_config.alpha = common.alpha;
        adm_config.params = config.reg.params;
        adm_config.outer_tol = common.outer_tol;
        adm_config.inner_tol = common.inner_tol;
        adm_config.window = common.window;
        adm_config.max_outer = common.max_outer;
        adm_config.max_inner = common.max_inner;
        config.adm = std::move(adm_config);
    }
    config.output_dir = common.out_dir;

    if (sim != nullptr) {
        config.mode = RunMode::simulate;
        ScenarioConfig scenario;
        scenario.n_points = sim->n_points;
        if (!sim->distances.empty()) scenario.distances = sim->distances;
        scenario.true_u = sim->true_u;
        scenario.period = sim->period;
        scenario.samples = sim->samples;
        scenario.delta = sim->delta;
        scenario.seed = sim->seed;
        config.scenario = std::move(scenario);
        config.reflections = parse_reflectors(sim->reflectors);
        if (!sim->has_seed) throw std::invalid_argument("config: simulate requires --seed");
    } else {
        config.mode = RunMode::ingest;
        config.input_path = *input;
        IngestMetadata metadata;
        metadata.distances_m = *distances;
        metadata.period_s = period;
        metadata.samples = samples;
        config.metadata = std::move(metadata);
    }
    return config;
}

void print_summary(const ExperimentResult& result, const std::string& out_dir) {
    std::cout << "u = " << result.report.state.u.value << " m/s\n";
    std::cout << "e_res = " << result.report.e_res << "\n";
    if (result.report.e_fit) std::cout << "e_fit = " << *result.report.e_fit << "\n";
    std::cout << "outputs in " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse wave splitting and velocity estimation"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOptions sim_common;
    SimulateOptions sim_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "Synthesize waves and run a solver");
    add_common_options(simulate, sim_common);
    add_simulate_options(simulate, sim_opt);

    CommonOptions ing_common;
    std::string input_path;
    std::vector<double> ing_distances;
    double ing_period = 0.0;
    int ing_samples = 500;
    CLI::App* ingest = app.add_subcommand("ingest", "Read a wave CSV and run a solver");
    add_common_options(ingest, ing_common);
    ingest->add_option("--input", input_path, "Wave CSV file")->required();
    ingest->add_option("--distances-m", ing_distances, "Distances from point 1 in meters")
        ->delimiter(',')
        ->required();
    ingest->add_option("--period-s", ing_period, "Cardiac period (s)")->required();
    ingest->add_option("--samples", ing_samples, "Analysis samples per period")
        ->capture_default_str();

    CommonOptions sweep_common;
    SimulateOptions sweep_sim;
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Re-run a solver across parameter values");
    add_common_options(sweep_cmd, sweep_common);
    add_simulate_options(sweep_cmd, sweep_sim);
    sweep_cmd->add_option("--parameter", sweep_parameter, "Swept parameter: alpha | delta | u0")
        ->check(CLI::IsMember({"alpha", "delta", "u0"}))
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated parameter values")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const RunConfig config = build_config(sim_common, &sim_opt, nullptr, nullptr, 0.0, 0);
            const ExperimentResult result = run_experiment(config);
            print_summary(result, config.output_dir);
        } else if (ingest->parsed()) {
            const RunConfig config = build_config(ing_common, nullptr, &input_path,
                                                  &ing_distances, ing_period, ing_samples);
            const ExperimentResult result = run_experiment(config);
            print_summary(result, config.output_dir);
        } else {
            const RunConfig config =
                build_config(sweep_common, &sweep_sim, nullptr, nullptr, 0.0, 0);
            const std::vector<SweepRow> rows = sweep(config, sweep_parameter, sweep_values);
            std::cout << rows.size() << " sweep rows written to " << config.output_dir
                      << "/sweep.csv\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
