#include "pulsesplit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace pulsesplit {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view cell{line.data() + start,
                                    (comma == std::string::npos ? line.size() : comma) - start};
        cells.emplace_back(trim(cell));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_number(const std::string& cell, const std::string& where) {
    const std::string_view sv = trim(cell);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc{} || ptr != sv.data() + sv.size() || sv.empty()) {
        throw std::runtime_error("parse error: bad number '" + cell + "' in " + where);
    }
    return value;
}

struct RawWaves {
    std::vector<std::string> names;
    std::vector<double> t;
    std::vector<std::vector<double>> channels;
};

RawWaves read_wave_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io error: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse error: empty file '" + path + "'");

    RawWaves raw;
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 3 || header.front() != "t") {
        throw std::runtime_error("parse error: header must be 't,<channel>,...' with >= 2 channels");
    }
    raw.names.assign(header.begin() + 1, header.end());
    raw.channels.resize(raw.names.size());

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("parse error: row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        }
        const std::string where = "row " + std::to_string(row);
        raw.t.push_back(parse_number(cells[0], where));
        for (std::size_t c = 0; c < raw.channels.size(); ++c) {
            raw.channels[c].push_back(parse_number(cells[c + 1], where));
        }
    }
    if (raw.t.size() < 2) throw std::runtime_error("parse error: need at least two data rows");
    for (std::size_t i = 1; i < raw.t.size(); ++i) {
        if (!(raw.t[i] > raw.t[i - 1])) {
            throw std::invalid_argument("ingest: time column must be strictly increasing (row " +
                                        std::to_string(i + 2) + ")");
        }
    }
    return raw;
}

bool is_uniform_sampling(const std::vector<double>& t, double period) {
    const int m = static_cast<int>(t.size());
    const double dt = (t.back() - t.front()) / (m - 1);
    for (int i = 1; i < m; ++i) {
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) return false;
    }
    return std::abs(m * dt - period) <= 1e-6 * period;
}

// Evaluates the trigonometric interpolant of uniformly sampled data at m
// new uniform positions over one period.
std::vector<double> resample_trig(const std::vector<double>& samples, double period, int m) {
    const int src = static_cast<int>(samples.size());
    const TimeGrid src_grid{src, period};
    const Spectrum s = forward_dft(samples, src_grid);
    const int half = (src + 1) / 2 - 1;  // highest fully-paired bin
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) {
        const double tau = static_cast<double>(j) / m;
        double acc = s[0].real();
        for (int g = 1; g <= half; ++g) {
            acc += 2.0 * std::real(s[g] * std::polar(1.0, 2.0 * kPi * g * tau));
        }
        if (src % 2 == 0) {
            acc += s[src / 2].real() * std::cos(2.0 * kPi * (src / 2) * tau);
        }
        out[j] = acc / src;
    }
    return out;
}

// Periodic piecewise-linear interpolation for non-uniform input.
std::vector<double> resample_linear(const std::vector<double>& t, const std::vector<double>& x,
                                    double period, int m) {
    const int src = static_cast<int>(t.size());
    const double t0 = t.front();
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) {
        const double tt = t0 + period * static_cast<double>(j) / m;
        if (tt >= t[src - 1]) {
            const double gap = t0 + period - t[src - 1];
            const double frac = gap > 0.0 ? (tt - t[src - 1]) / gap : 0.0;
            out[j] = x[src - 1] + frac * (x[0] - x[src - 1]);
            continue;
        }
        const auto it = std::upper_bound(t.begin(), t.end(), tt);
        const int hi = static_cast<int>(it - t.begin());
        const int lo = hi - 1;
        const double frac = (tt - t[lo]) / (t[hi] - t[lo]);
        out[j] = x[lo] + frac * (x[hi] - x[lo]);
    }
    return out;
}

std::string solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::direct: return "direct";
        case SolverKind::lintikh: return "lintikh";
        case SolverKind::mintikh: return "mintikh";
        case SolverKind::adm: return "adm";
    }
    return "?";
}

std::vector<double> real_time_samples(const Spectrum& spec) {
    const std::vector<Complex> full = inverse_dft(spec);
    std::vector<double> out(full.size());
    std::transform(full.begin(), full.end(), out.begin(), [](Complex v) { return v.real(); });
    return out;
}

void write_report(const std::string& path, const RunConfig& config, const ExperimentResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io error: cannot write '" + path + "'");
    const SolverReport& rep = result.report;
    out << "mode = " << (config.mode == RunMode::simulate ? "simulate" : "ingest") << "\n";
    out << "solver = " << solver_name(config.solver) << "\n";
    out << "n_points = " << result.measurements.points() << "\n";
    out << "samples = " << result.time_grid.samples << "\n";
    out << "period_s = " << fmt(result.time_grid.period) << "\n";
    const WeightedNormParams& params =
        config.solver == SolverKind::adm ? config.adm->params : config.reg.params;
    const double alpha = config.solver == SolverKind::adm ? config.adm->alpha : config.reg.alpha;
    out << "alpha = " << fmt(alpha) << "\n";
    out << "weight_s = " << fmt(params.s) << "\n";
    out << "weight_r = " << fmt(params.r) << "\n";
    if (config.mode == RunMode::simulate) {
        out << "seed = " << config.scenario->seed << "\n";
        out << "delta = " << fmt(config.scenario->delta) << "\n";
        out << "true_u_mps = " << fmt(config.scenario->true_u) << "\n";
    } else {
        out << "input = " << *config.input_path << "\n";
    }
    out << "u_mps = " << fmt(rep.state.u.value) << "\n";
    out << "e_res = " << fmt(rep.e_res) << "\n";
    if (rep.e_fit) out << "e_fit = " << fmt(*rep.e_fit) << "\n";
    out << "lin_tikh_evaluations = " << rep.trace.lin_tikh_evaluations << "\n";
    if (config.solver == SolverKind::adm) {
        out << "outer_iterations = " << rep.trace.outer_u.size() << "\n";
        out << "converged = " << (rep.trace.converged ? "true" : "false") << "\n";
        out << "stop_reason = " << rep.trace.stop_reason << "\n";
    }
    if (rep.residual_curve) out << "curve_points = " << rep.residual_curve->size() << "\n";
    if (!rep.trace.events.empty()) {
        out << "events = ";
        for (std::size_t i = 0; i < rep.trace.events.size(); ++i) {
            out << (i ? "; " : "") << rep.trace.events[i];
        }
        out << "\n";
    }
}

void write_split_waves(const std::string& path, const ExperimentResult& result) {
    const SplitState& state = result.report.state;
    const Geometry& geom = result.measurements.geometry;
    const FrequencyGrid& grid = state.x1.grid;
    const PhaseFactors pf = phase_factors(geom, state.u, grid);

    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;
    cols.push_back(real_time_samples(state.x1));
    names.emplace_back("p1f_rec");
    cols.push_back(real_time_samples(state.x2));
    names.emplace_back("pNb_rec");
    for (int k = 0; k < geom.points(); ++k) {
        Spectrum fwd{grid};
        Spectrum bwd{grid};
        for (int j = 0; j < grid.samples; ++j) {
            fwd[j] = pf.e(k, j) * state.x1[j];
            bwd[j] = pf.et(k, j) * state.x2[j];
        }
        cols.push_back(real_time_samples(fwd));
        names.push_back("pf" + std::to_string(k + 1));
        cols.push_back(real_time_samples(bwd));
        names.push_back("pb" + std::to_string(k + 1));
    }
    write_wave_csv(path, result.time_grid, cols, names);
}

void write_residual_curve(const std::string& path,
                          const std::vector<std::pair<double, double>>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io error: cannot write '" + path + "'");
    out << "u,e_res\n";
    for (const auto& [u, res] : curve) out << fmt(u) << "," << fmt(res) << "\n";
}

void write_trace(const std::string& path, const IterationTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io error: cannot write '" + path + "'");
    out << "k,u,inner_steps,outer_residual\n";
    for (std::size_t k = 0; k < trace.outer_u.size(); ++k) {
        out << (k + 1) << "," << fmt(trace.outer_u[k]) << "," << trace.inner_steps[k] << ","
            << fmt(trace.outer_residual[k]) << "\n";
    }
}

int expected_points(const RunConfig& config) {
    if (config.mode == RunMode::simulate) {
        return config.scenario->distances ? static_cast<int>(config.scenario->distances->size())
                                          : config.scenario->n_points;
    }
    return static_cast<int>(config.metadata->distances_m.size());
}

}  // namespace

void RunConfig::validate() const {
    if (mode == RunMode::simulate) {
        if (!scenario) throw std::invalid_argument("config: simulate mode needs a scenario");
        scenario->validate();
    } else {
        if (!input_path || !metadata) {
            throw std::invalid_argument("config: ingest mode needs an input path and metadata");
        }
        static_cast<void>(Geometry{metadata->distances_m});
        if (!(metadata->period_s > 0.0)) throw std::invalid_argument("config: period must be positive");
        if (metadata->samples < 2) throw std::invalid_argument("config: samples must be >= 2");
    }
    if (solver == SolverKind::adm) {
        if (!adm) throw std::invalid_argument("config: adm solver requires an adm block (u0)");
        adm->validate();
    } else {
        reg.validate();
    }
    if ((solver == SolverKind::direct || solver == SolverKind::lintikh) &&
        mode == RunMode::ingest && !known_u) {
        throw std::invalid_argument("config: " + solver_name(solver) +
                                    " on ingested data requires a known velocity");
    }
    if (solver == SolverKind::direct && expected_points(*this) != 2) {
        throw std::invalid_argument("config: the direct solver handles exactly two points");
    }
}

MeasurementSet ingest_waveforms(const std::string& path, const IngestMetadata& metadata) {
    Geometry geom{metadata.distances_m};
    if (!(metadata.period_s > 0.0) || !std::isfinite(metadata.period_s)) {
        throw std::invalid_argument("ingest: period must be positive");
    }
    if (metadata.samples < 2) throw std::invalid_argument("ingest: samples must be >= 2");

    const RawWaves raw = read_wave_csv(path);
    if (static_cast<int>(raw.channels.size()) != geom.points()) {
        throw std::invalid_argument("ingest: file has " + std::to_string(raw.channels.size()) +
                                    " channels but metadata lists " +
                                    std::to_string(geom.points()) + " distances");
    }
    if (raw.t.back() - raw.t.front() >= metadata.period_s) {
        throw std::invalid_argument("ingest: time column spans more than one period");
    }

    const TimeGrid tgrid{metadata.samples, metadata.period_s};
    const bool uniform = is_uniform_sampling(raw.t, metadata.period_s);

    std::vector<Spectrum> spectra;
    spectra.reserve(geom.points());
    for (int k = 0; k < geom.points(); ++k) {
        std::vector<double> channel = raw.channels[k];
        double l1 = 0.0;
        for (double v : channel) l1 += std::abs(v);
        l1 /= channel.size();
        if (l1 == 0.0) {
            throw std::runtime_error("ingest: channel " + std::to_string(k + 1) +
                                     " is identically zero");
        }
        for (double& v : channel) v /= l1;

        const std::vector<double> resampled =
            uniform ? resample_trig(channel, metadata.period_s, metadata.samples)
                    : resample_linear(raw.t, channel, metadata.period_s, metadata.samples);
        spectra.push_back(forward_dft(resampled, tgrid));
    }
    return MeasurementSet{std::move(spectra), std::move(geom)};
}

ExperimentResult solve_experiment(const RunConfig& config) {
    config.validate();

    auto acquire = [&]() -> ExperimentResult {
        if (config.mode == RunMode::simulate) {
            SyntheticData data = synthesize_measurements(*config.scenario, config.reflections);
            TimeGrid tgrid{config.scenario->samples, config.scenario->period};
            SolverReport placeholder{SplitState{data.truth}};
            return ExperimentResult{std::move(placeholder), std::move(data.noisy),
                                    std::move(data.truth), tgrid};
        }
        MeasurementSet meas = ingest_waveforms(*config.input_path, *config.metadata);
        TimeGrid tgrid{config.metadata->samples, config.metadata->period_s};
        SolverReport placeholder{
            SplitState{Spectrum{meas.grid()}, Spectrum{meas.grid()}, Pwv{kDefaultMinPwv}}};
        return ExperimentResult{std::move(placeholder), std::move(meas), std::nullopt, tgrid};
    };
    ExperimentResult result = acquire();
    const MeasurementSet& meas = result.measurements;

    const double min_pwv = config.scenario ? config.scenario->min_pwv : kDefaultMinPwv;
    const double fixed_u = config.known_u
                               ? *config.known_u
                               : (config.scenario ? config.scenario->true_u : 0.0);

    switch (config.solver) {
        case SolverKind::direct: {
            const Pwv u{fixed_u, min_pwv};
            auto split = direct_split(meas.spectra[0], meas.spectra[1], u,
                                      meas.geometry.span(), config.reg);
            SplitState state{std::move(split.first), std::move(split.second), u};
            SolverReport rep{std::move(state)};
            rep.e_res = relative_residual_error(rep.state, meas);
            rep.trace.lin_tikh_evaluations = 0;
            result.report = std::move(rep);
            break;
        }
        case SolverKind::lintikh:
            result.report = lin_tikh(meas, Pwv{fixed_u, min_pwv}, config.reg);
            break;
        case SolverKind::mintikh: {
            const CandidateGrid grid =
                config.candidates ? *config.candidates : CandidateGrid::physiological();
            result.report = min_tikh(meas, grid, config.reg);
            break;
        }
        case SolverKind::adm:
            result.report = adm(meas, *config.adm);
            break;
    }

    if (result.truth) {
        const WeightedNormParams& params =
            config.solver == SolverKind::adm ? config.adm->params : config.reg.params;
        result.report.e_fit = relative_fit_error(result.report.state, *result.truth, params);
    }
    return result;
}

ExperimentResult run_experiment(const RunConfig& config) {
    ExperimentResult result = solve_experiment(config);

    const fs::path dir{config.output_dir};
    fs::create_directories(dir);
    write_report((dir / "report.txt").string(), config, result);
    write_split_waves((dir / "split_waves.csv").string(), result);
    if (config.mode == RunMode::simulate) {
        std::vector<std::vector<double>> cols;
        std::vector<std::string> names;
        for (int k = 0; k < result.measurements.points(); ++k) {
            cols.push_back(real_time_samples(result.measurements.spectra[k]));
            names.push_back("p_" + std::to_string(k + 1));
        }
        write_wave_csv((dir / "data_waves.csv").string(), result.time_grid, cols, names);
    }
    if (result.report.residual_curve) {
        write_residual_curve((dir / "residual_curve.csv").string(), *result.report.residual_curve);
    }
    if (config.solver == SolverKind::adm) {
        write_trace((dir / "trace.csv").string(), result.report.trace);
    }
    return result;
}

std::vector<SweepRow> sweep(const RunConfig& base, const std::string& parameter,
                            const std::vector<double>& values) {
    if (parameter != "alpha" && parameter != "delta" && parameter != "u0") {
        throw std::invalid_argument("sweep: parameter must be one of alpha, delta, u0");
    }
    if (parameter == "delta" && (base.mode != RunMode::simulate || !base.scenario)) {
        throw std::invalid_argument("sweep: delta sweeps need simulate mode");
    }
    if (parameter == "u0" && (base.solver != SolverKind::adm || !base.adm)) {
        throw std::invalid_argument("sweep: u0 sweeps need the adm solver");
    }

    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        RunConfig config = base;
        if (parameter == "alpha") {
            config.reg.alpha = v;
            if (config.adm) config.adm->alpha = v;
        } else if (parameter == "delta") {
            config.scenario->delta = v;
        } else {
            config.adm->u0 = v;
        }
        SweepRow row;
        row.value = v;
        try {
            const ExperimentResult result = solve_experiment(config);
            row.u_rec = result.report.state.u.value;
            row.e_res = result.report.e_res;
            row.e_fit = result.report.e_fit;
        } catch (const std::exception& e) {
            std::string message = e.what();
            std::replace(message.begin(), message.end(), ',', ';');
            row.status = "error: " + message;
        }
        rows.push_back(std::move(row));
    }

    const fs::path dir{base.output_dir};
    fs::create_directories(dir);
    std::ofstream out(dir / "sweep.csv");
    if (!out) throw std::runtime_error("io error: cannot write sweep.csv");
    out << "value,u,e_res,e_fit,status\n";
    for (const SweepRow& row : rows) {
        out << fmt(row.value) << ",";
        if (row.u_rec) out << fmt(*row.u_rec);
        out << ",";
        if (row.e_res) out << fmt(*row.e_res);
        out << ",";
        if (row.e_fit) out << fmt(*row.e_fit);
        out << "," << row.status << "\n";
    }
    return rows;
}

void write_wave_csv(const std::string& path, const TimeGrid& grid,
                    const std::vector<std::vector<double>>& channels,
                    const std::vector<std::string>& names) {
    if (channels.size() != names.size()) {
        throw std::invalid_argument("write_wave_csv: channel/name count mismatch");
    }
    for (const auto& c : channels) {
        if (static_cast<int>(c.size()) != grid.samples) {
            throw std::invalid_argument("write_wave_csv: channel length does not match grid");
        }
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io error: cannot write '" + path + "'");
    out << "t";
    for (const std::string& n : names) out << "," << n;
    out << "\n";
    for (int j = 0; j < grid.samples; ++j) {
        out << fmt(grid.time_at(j));
        for (const auto& c : channels) out << "," << fmt(c[j]);
        out << "\n";
    }
}

}  // namespace pulsesplit
