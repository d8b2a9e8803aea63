#pragma once

#include "pulsesplit/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pulsesplit {

// Denominator filters for the two-point direct inversion: a complex shift
// x + alpha, or component-wise hard thresholding away from zero.
enum class DenominatorFilter { tikhonov_shift, hard_threshold };

struct RegularizationConfig {
    double alpha = 1e-3;
    DenominatorFilter filter = DenominatorFilter::tikhonov_shift;
    WeightedNormParams params{};

    void validate() const;
};

// Finite ascending set of admissible velocities searched by min_tikh.
struct CandidateGrid {
    std::vector<double> values;
    double min_pwv = kDefaultMinPwv;

    explicit CandidateGrid(std::vector<double> candidates, double min_pwv_mps = kDefaultMinPwv);

    static CandidateGrid linspace(double lo, double hi, int count,
                                  double min_pwv_mps = kDefaultMinPwv);
    // 100 values evenly spaced over [1, 10] m/s.
    static CandidateGrid physiological();
};

struct AdmConfig {
    double u0 = 0.0;
    std::optional<std::pair<Spectrum, Spectrum>> x0;  // zero when absent
    double alpha = 1e-3;
    WeightedNormParams params{};
    double outer_tol = 1e-3;
    double inner_tol = 1e-4;
    int window = 10;
    int max_outer = 2000;
    int max_inner = 200;
    double min_pwv = kDefaultMinPwv;

    void validate() const;
};

struct IterationTrace {
    std::vector<double> outer_u;          // u after each outer step
    std::vector<int> inner_steps;         // velocity updates per outer step
    std::vector<double> outer_residual;   // relative data misfit after each outer step
    std::vector<double> outer_functional; // penalized objective after each outer step
    int lin_tikh_evaluations = 0;
    bool converged = true;
    std::string stop_reason;
    std::vector<std::string> events;
};

struct SolverReport {
    SplitState state;
    double e_res = 0.0;
    std::optional<double> e_fit;
    std::optional<std::vector<std::pair<double, double>>> residual_curve;
    IterationTrace trace;

    explicit SolverReport(SplitState solution) : state(std::move(solution)) {}
};

// Two-point split at known velocity via the filtered division
//   x1 = (p1 - p2 exp(-i w L / u)) / filter(1 - exp(-2 i w L / u)),
// and symmetrically for x2.
std::pair<Spectrum, Spectrum> direct_split(const Spectrum& p1, const Spectrum& p2, const Pwv& u,
                                           double segment_length, const RegularizationConfig& config);

// Tikhonov-regularized split at known velocity: independent 2x2 Hermitian
// solves per frequency bin. When x0 is given the penalty is ||x - x0||^2,
// handled by solving for the increment against shifted data.
SolverReport lin_tikh(const MeasurementSet& meas, const Pwv& u, const RegularizationConfig& config,
                      const std::pair<Spectrum, Spectrum>* x0 = nullptr);

// Grid search over candidate velocities, picking the u whose lin_tikh
// residual is minimal; ties break toward the smallest u. The residual is
// measured with weight exponent residual_norm_exponent (default: s).
SolverReport min_tikh(const MeasurementSet& meas, const CandidateGrid& grid,
                      const RegularizationConfig& config,
                      std::optional<double> residual_norm_exponent = std::nullopt);

// Alternating scheme: lin_tikh in the wave pair at fixed u, then
// steepest-descent updates of u at fixed waves, with windowed stopping
// rules on both loops.
SolverReport adm(const MeasurementSet& meas, const AdmConfig& config);

// One steepest-descent update of the velocity at fixed waves:
//   u_next = u + gradient / direction_norm_sq,
// the exact minimizer of the linearized residual along the gradient.
struct PwvStep {
    double gradient = 0.0;
    double direction_norm_sq = 0.0;
    double u_next = 0.0;
    bool degenerate = false;  // derivative direction vanished
};
PwvStep landweber_pwv_step(const SplitState& state, const Geometry& geometry,
                           const std::vector<Spectrum>& data, const WeightedNormParams& params);

}  // namespace pulsesplit
