#include "pulsesplit/solvers.hpp"

#include "pulsesplit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pulsesplit {

namespace {

// sgn with sgn(0) = +1 keeps the hard-threshold filter bounded away from
// zero even when a component vanishes exactly (the DC bin does).
double sgn(double v) { return v >= 0.0 ? 1.0 : -1.0; }

Complex filtered_denominator(Complex d, const RegularizationConfig& config) {
    switch (config.filter) {
        case DenominatorFilter::tikhonov_shift:
            return d + config.alpha;
        case DenominatorFilter::hard_threshold:
            return Complex{sgn(d.real()) * std::max(std::abs(d.real()), config.alpha),
                           sgn(d.imag()) * std::max(std::abs(d.imag()), config.alpha)};
    }
    throw std::invalid_argument("direct_split: unknown filter kind");
}

// Per-bin normal equations (w_s G^H G + alpha w_r I) x = w_s G^H q.
std::pair<Spectrum, Spectrum> solve_tikhonov_bins(const std::vector<Spectrum>& data,
                                                  const PhaseFactors& pf,
                                                  const FrequencyGrid& grid, double alpha,
                                                  const WeightedNormParams& params) {
    Spectrum x1{grid};
    Spectrum x2{grid};
    for (int j = 0; j < grid.samples; ++j) {
        const double g = grid.harmonic(j);
        const double ws = std::pow(1.0 + g * g, params.s);
        const double wr = std::pow(1.0 + g * g, params.r);
        double gaa = 0.0;
        double gbb = 0.0;
        Complex gab{0.0, 0.0};
        Complex r1{0.0, 0.0};
        Complex r2{0.0, 0.0};
        for (int k = 0; k < pf.points; ++k) {
            const Complex e = pf.e(k, j);
            const Complex et = pf.et(k, j);
            gaa += std::norm(e);
            gbb += std::norm(et);
            gab += std::conj(e) * et;
            r1 += std::conj(e) * data[k][j];
            r2 += std::conj(et) * data[k][j];
        }
        const double m11 = ws * gaa + alpha * wr;
        const double m22 = ws * gbb + alpha * wr;
        const Complex m12 = ws * gab;
        r1 *= ws;
        r2 *= ws;
        const double det = m11 * m22 - std::norm(m12);
        x1[j] = (m22 * r1 - m12 * r2) / det;
        x2[j] = (m11 * r2 - std::conj(m12) * r1) / det;
    }
    return {std::move(x1), std::move(x2)};
}

// Relative residual of the state against the data in the exponent-t norm.
double relative_residual(const SplitState& state, const MeasurementSet& meas, double t) {
    const std::vector<Spectrum> fitted = apply_F(state, meas.geometry);
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < meas.points(); ++k) {
        Spectrum diff{state.x1.grid};
        for (int j = 0; j < diff.size(); ++j) diff[j] = fitted[k][j] - meas.spectra[k][j];
        const double r = weighted_norm(diff, t);
        const double p = weighted_norm(meas.spectra[k], t);
        num += r * r;
        den += p * p;
    }
    if (den == 0.0) return 0.0;  // zero data reconstructs to zero
    return std::sqrt(num / den);
}

double zero_guarded_e_res(const SplitState& state, const MeasurementSet& meas) {
    double den = 0.0;
    for (const Spectrum& p : meas.spectra) {
        const double n = weighted_norm(p, 0.0);
        den += n * n;
    }
    if (den == 0.0) return 0.0;
    return relative_residual_error(state, meas);
}

struct RawPwvStep {
    double gradient = 0.0;
    double direction_norm_sq = 0.0;
};

// Fused gradient and direction norm so the inner loop evaluates the phase
// factors once per velocity update.
RawPwvStep pwv_step_terms(const Spectrum& x1, const Spectrum& x2, double u,
                          const Geometry& geometry, const std::vector<Spectrum>& data,
                          const WeightedNormParams& params) {
    const FrequencyGrid& grid = x1.grid;
    const double total = geometry.span();
    RawPwvStep out;
    for (int k = 0; k < geometry.points(); ++k) {
        const double lk = geometry.distances[k];
        const double cf = lk / (u * u);
        const double cb = (total - lk) / (u * u);
        for (int j = 0; j < grid.samples; ++j) {
            const double w = grid.omega(j);
            const double g = grid.harmonic(j);
            const double ws = std::pow(1.0 + g * g, params.s);
            const Complex e = std::polar(1.0, -w * lk / u);
            const Complex et = std::polar(1.0, -w * (total - lk) / u);
            const Complex fwd = e * x1[j];
            const Complex bwd = et * x2[j];
            const Complex value = fwd + bwd;
            const Complex direction = Complex{0.0, w * cf} * fwd + Complex{0.0, w * cb} * bwd;
            const Complex residual = data[k][j] - value;
            out.gradient += ws * std::real(direction * std::conj(residual));
            out.direction_norm_sq += ws * std::norm(direction);
        }
    }
    const double dw = grid.delta_omega();
    out.gradient *= dw;
    out.direction_norm_sq *= dw;
    return out;
}

double window_sum(const std::vector<double>& history, int window) {
    // Sum of the last `window` absolute increments of the sequence.
    double sum = 0.0;
    const std::size_t n = history.size();
    for (int j = 0; j < window; ++j) {
        sum += std::abs(history[n - 1 - j] - history[n - 2 - j]);
    }
    return sum;
}

}  // namespace

void RegularizationConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("RegularizationConfig: alpha must be positive");
    }
    params.validate();
}

CandidateGrid::CandidateGrid(std::vector<double> candidates, double min_pwv_mps)
    : values(std::move(candidates)), min_pwv(min_pwv_mps) {
    if (values.empty()) throw std::invalid_argument("CandidateGrid: empty candidate set");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < min_pwv) {
            throw std::invalid_argument("CandidateGrid: candidates must be >= the velocity floor");
        }
        if (i > 0 && !(values[i] > values[i - 1])) {
            throw std::invalid_argument("CandidateGrid: candidates must be strictly ascending");
        }
    }
}

CandidateGrid CandidateGrid::linspace(double lo, double hi, int count, double min_pwv_mps) {
    if (count < 1) throw std::invalid_argument("CandidateGrid: count must be >= 1");
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) {
        v[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1);
    }
    return CandidateGrid{std::move(v), min_pwv_mps};
}

CandidateGrid CandidateGrid::physiological() { return linspace(1.0, 10.0, 100); }

void AdmConfig::validate() const {
    params.validate();
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("AdmConfig: alpha must be positive");
    }
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) {
        throw std::invalid_argument("AdmConfig: stopping tolerances must be positive");
    }
    if (window < 1) throw std::invalid_argument("AdmConfig: window must be >= 1");
    if (max_outer < 1 || max_inner < 1) {
        throw std::invalid_argument("AdmConfig: iteration caps must be >= 1");
    }
    if (!(min_pwv > 0.0)) throw std::invalid_argument("AdmConfig: velocity floor must be positive");
    if (!std::isfinite(u0) || u0 < min_pwv) {
        throw std::domain_error("AdmConfig: initial velocity is below the floor");
    }
}

std::pair<Spectrum, Spectrum> direct_split(const Spectrum& p1, const Spectrum& p2, const Pwv& u,
                                           double segment_length,
                                           const RegularizationConfig& config) {
    config.validate();
    if (!p1.grid.compatible(p2.grid)) {
        throw std::invalid_argument("direct_split: spectra live on different grids");
    }
    if (!(segment_length > 0.0) || !std::isfinite(segment_length)) {
        throw std::invalid_argument("direct_split: segment length must be positive");
    }
    const FrequencyGrid& grid = p1.grid;
    Spectrum x1{grid};
    Spectrum x2{grid};
    for (int j = 0; j < grid.samples; ++j) {
        const double w = grid.omega(j);
        const Complex shift = std::polar(1.0, -w * segment_length / u.value);
        const Complex den = filtered_denominator(1.0 - shift * shift, config);
        if (std::abs(den) == 0.0) {
            throw std::runtime_error("direct_split: filtered denominator vanished at bin " +
                                     std::to_string(j));
        }
        x1[j] = (p1[j] - p2[j] * shift) / den;
        x2[j] = (p2[j] - p1[j] * shift) / den;
    }
    return {std::move(x1), std::move(x2)};
}

SolverReport lin_tikh(const MeasurementSet& meas, const Pwv& u, const RegularizationConfig& config,
                      const std::pair<Spectrum, Spectrum>* x0) {
    config.validate();
    const FrequencyGrid& grid = meas.grid();
    const PhaseFactors pf = phase_factors(meas.geometry, u, grid);

    std::pair<Spectrum, Spectrum> solution{Spectrum{grid}, Spectrum{grid}};
    if (x0 == nullptr) {
        solution = solve_tikhonov_bins(meas.spectra, pf, grid, config.alpha, config.params);
    } else {
        if (!x0->first.grid.compatible(grid) || !x0->second.grid.compatible(grid)) {
            throw std::invalid_argument("lin_tikh: shift spectra live on a different grid");
        }
        // Substitute z = x - x0 and move F_u(x0) into the data.
        std::vector<Spectrum> shifted;
        shifted.reserve(meas.points());
        for (int k = 0; k < meas.points(); ++k) {
            Spectrum q{grid};
            for (int j = 0; j < grid.samples; ++j) {
                q[j] = meas.spectra[k][j] -
                       (pf.e(k, j) * x0->first[j] + pf.et(k, j) * x0->second[j]);
            }
            shifted.push_back(std::move(q));
        }
        auto z = solve_tikhonov_bins(shifted, pf, grid, config.alpha, config.params);
        for (int j = 0; j < grid.samples; ++j) {
            z.first[j] += x0->first[j];
            z.second[j] += x0->second[j];
        }
        solution = std::move(z);
    }

    SplitState state{std::move(solution.first), std::move(solution.second), u};
    SolverReport report{std::move(state)};
    report.e_res = zero_guarded_e_res(report.state, meas);
    report.trace.lin_tikh_evaluations = 1;
    report.trace.converged = true;
    return report;
}

SolverReport min_tikh(const MeasurementSet& meas, const CandidateGrid& grid,
                      const RegularizationConfig& config,
                      std::optional<double> residual_norm_exponent) {
    config.validate();
    const double t = residual_norm_exponent.value_or(config.params.s);
    if (!std::isfinite(t) || t < 0.0) {
        throw std::invalid_argument("min_tikh: residual norm exponent must be >= 0");
    }

    std::vector<std::pair<double, double>> curve;
    curve.reserve(grid.values.size());
    std::optional<SolverReport> best;
    double best_residual = std::numeric_limits<double>::infinity();
    for (double candidate : grid.values) {
        SolverReport rep = lin_tikh(meas, Pwv{candidate, grid.min_pwv}, config);
        const double res = relative_residual(rep.state, meas, t);
        curve.emplace_back(candidate, res);
        if (res < best_residual) {  // strict: ties keep the smaller u
            best_residual = res;
            best = std::move(rep);
        }
    }

    SolverReport report = std::move(*best);
    report.residual_curve = std::move(curve);
    report.trace.lin_tikh_evaluations = static_cast<int>(grid.values.size());
    report.trace.converged = true;
    return report;
}

PwvStep landweber_pwv_step(const SplitState& state, const Geometry& geometry,
                           const std::vector<Spectrum>& data, const WeightedNormParams& params) {
    params.validate();
    const RawPwvStep raw =
        pwv_step_terms(state.x1, state.x2, state.u.value, geometry, data, params);
    PwvStep step;
    step.gradient = raw.gradient;
    step.direction_norm_sq = raw.direction_norm_sq;
    step.degenerate = !(raw.direction_norm_sq > 0.0) || !std::isfinite(raw.direction_norm_sq);
    step.u_next = step.degenerate ? state.u.value : state.u.value + raw.gradient / raw.direction_norm_sq;
    return step;
}

SolverReport adm(const MeasurementSet& meas, const AdmConfig& config) {
    config.validate();
    const FrequencyGrid& grid = meas.grid();
    const bool shifted = config.x0.has_value();
    if (shifted && (!config.x0->first.grid.compatible(grid) ||
                    !config.x0->second.grid.compatible(grid))) {
        throw std::invalid_argument("adm: initial spectra live on a different grid");
    }

    RegularizationConfig inner_reg{config.alpha, DenominatorFilter::tikhonov_shift, config.params};
    inner_reg.validate();

    IterationTrace trace;
    if (!config.params.derivative_order_ok()) {
        trace.events.push_back("smoothness_relaxed: r < s + 2");
    }

    std::vector<double> history{config.u0};
    double u_prev = config.u0;
    Spectrum x1{grid};
    Spectrum x2{grid};
    bool converged = false;
    std::string stop_reason = "outer_cap";

    for (int outer = 1; outer <= config.max_outer; ++outer) {
        // Wave step: Tikhonov solve at the current velocity.
        const PhaseFactors pf = phase_factors(meas.geometry, Pwv{u_prev, config.min_pwv}, grid);
        if (!shifted) {
            auto solved = solve_tikhonov_bins(meas.spectra, pf, grid, config.alpha, config.params);
            x1 = std::move(solved.first);
            x2 = std::move(solved.second);
        } else {
            std::vector<Spectrum> data;
            data.reserve(meas.points());
            for (int k = 0; k < meas.points(); ++k) {
                Spectrum q{grid};
                for (int j = 0; j < grid.samples; ++j) {
                    q[j] = meas.spectra[k][j] -
                           (pf.e(k, j) * config.x0->first[j] + pf.et(k, j) * config.x0->second[j]);
                }
                data.push_back(std::move(q));
            }
            auto z = solve_tikhonov_bins(data, pf, grid, config.alpha, config.params);
            for (int j = 0; j < grid.samples; ++j) {
                z.first[j] += config.x0->first[j];
                z.second[j] += config.x0->second[j];
            }
            x1 = std::move(z.first);
            x2 = std::move(z.second);
        }
        trace.lin_tikh_evaluations += 1;

        // Velocity step: steepest-descent updates at fixed waves.
        double uu = u_prev;
        std::vector<double> inner_history{uu};
        int steps = 0;
        for (int inner = 1; inner <= config.max_inner; ++inner) {
            const RawPwvStep raw =
                pwv_step_terms(x1, x2, uu, meas.geometry, meas.spectra, config.params);
            if (!(raw.direction_norm_sq > 0.0) || !std::isfinite(raw.direction_norm_sq)) {
                trace.events.push_back("inner_gradient_vanished: outer=" + std::to_string(outer));
                break;
            }
            double u_next = uu + raw.gradient / raw.direction_norm_sq;
            if (u_next < config.min_pwv) {
                u_next = config.min_pwv;
                trace.events.push_back("pwv_clamped: outer=" + std::to_string(outer) +
                                       " inner=" + std::to_string(inner));
            }
            if (u_next == uu) break;  // no representable movement left
            inner_history.push_back(u_next);
            uu = u_next;
            ++steps;
            if (static_cast<int>(inner_history.size()) >= config.window + 1 &&
                window_sum(inner_history, config.window) < config.inner_tol) {
                break;
            }
            if (inner == config.max_inner) {
                trace.events.push_back("inner_cap: outer=" + std::to_string(outer));
            }
        }

        const double u_k = uu;
        history.push_back(u_k);
        trace.outer_u.push_back(u_k);
        trace.inner_steps.push_back(steps);
        {
            SplitState probe{x1, x2, Pwv{u_k, config.min_pwv}};
            trace.outer_residual.push_back(relative_residual(probe, meas, config.params.s));
            // The quantity both half-steps minimize: data misfit plus the
            // shifted penalty.
            const auto fitted = apply_F(probe, meas.geometry);
            double misfit = 0.0;
            for (int k = 0; k < meas.points(); ++k) {
                Spectrum diff{grid};
                for (int j = 0; j < grid.samples; ++j) diff[j] = fitted[k][j] - meas.spectra[k][j];
                const double n = weighted_norm(diff, config.params.s);
                misfit += n * n;
            }
            Spectrum z1 = x1;
            Spectrum z2 = x2;
            if (shifted) {
                for (int j = 0; j < grid.samples; ++j) {
                    z1[j] -= config.x0->first[j];
                    z2[j] -= config.x0->second[j];
                }
            }
            const double n1 = weighted_norm(z1, config.params.r);
            const double n2 = weighted_norm(z2, config.params.r);
            trace.outer_functional.push_back(misfit + config.alpha * (n1 * n1 + n2 * n2));
        }

        if (static_cast<int>(trace.outer_u.size()) >= config.window &&
            window_sum(history, config.window) < config.outer_tol) {
            converged = true;
            stop_reason = "outer_window";
            break;
        }
        // The outer map is deterministic in u, so an exactly repeated
        // velocity is a fixed point.
        if (u_k == u_prev) {
            converged = true;
            stop_reason = "fixed_point";
            break;
        }
        u_prev = u_k;
    }

    trace.converged = converged;
    trace.stop_reason = stop_reason;

    SplitState state{std::move(x1), std::move(x2), Pwv{history.back(), config.min_pwv}};
    SolverReport report{std::move(state)};
    report.e_res = zero_guarded_e_res(report.state, meas);
    report.trace = std::move(trace);
    return report;
}

}  // namespace pulsesplit
