#pragma once

#include "pulsesplit/metrics.hpp"
#include "pulsesplit/sim.hpp"
#include "pulsesplit/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pulsesplit {

enum class RunMode { simulate, ingest };
enum class SolverKind { direct, lintikh, mintikh, adm };

// Sidecar metadata for a wave CSV: measurement-point distances, the cycle
// period, and the analysis sample count to resample onto.
struct IngestMetadata {
    std::vector<double> distances_m;
    double period_s = 0.0;
    int samples = 500;
};

struct RunConfig {
    RunMode mode = RunMode::simulate;
    SolverKind solver = SolverKind::mintikh;

    std::optional<ScenarioConfig> scenario;                 // simulate
    ReflectionConfig reflections = ReflectionConfig::defaults();
    std::optional<std::string> input_path;                  // ingest
    std::optional<IngestMetadata> metadata;                 // ingest

    RegularizationConfig reg{};
    std::optional<CandidateGrid> candidates;  // mintikh; physiological when absent
    std::optional<AdmConfig> adm;             // adm
    std::optional<double> known_u;            // direct / lintikh; defaults to true_u in simulate mode

    std::string output_dir = "out";

    void validate() const;
};

// Reads a wave CSV (header "t,p_1,...,p_N"), L1-normalizes every channel,
// resamples to metadata.samples uniform samples over one period
// (trigonometric interpolation for uniform input, linear otherwise), and
// transforms to the frequency domain.
MeasurementSet ingest_waveforms(const std::string& path, const IngestMetadata& metadata);

struct ExperimentResult {
    SolverReport report;
    MeasurementSet measurements;
    std::optional<SplitState> truth;
    TimeGrid time_grid;
};

// Runs the configured solver without touching the filesystem.
ExperimentResult solve_experiment(const RunConfig& config);

// Runs the solver and writes report.txt, split_waves.csv, and (depending
// on mode and solver) data_waves.csv, residual_curve.csv, trace.csv into
// the output directory.
ExperimentResult run_experiment(const RunConfig& config);

struct SweepRow {
    double value = 0.0;
    std::optional<double> u_rec;
    std::optional<double> e_res;
    std::optional<double> e_fit;
    std::string status = "ok";
};

// Re-runs the solver across values of one parameter (alpha, delta, or u0)
// with a fixed seed per row and writes sweep.csv. Per-row failures are
// recorded in the row and the sweep continues.
std::vector<SweepRow> sweep(const RunConfig& base, const std::string& parameter,
                            const std::vector<double>& values);

// Writes time-domain channels as CSV with 12 significant digits.
void write_wave_csv(const std::string& path, const TimeGrid& grid,
                    const std::vector<std::vector<double>>& channels,
                    const std::vector<std::string>& names);

}  // namespace pulsesplit
