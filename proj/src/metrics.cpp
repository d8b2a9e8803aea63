#include "pulsesplit/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace pulsesplit {

double relative_fit_error(const SplitState& state, const SplitState& truth,
                          const WeightedNormParams& params) {
    params.validate();
    if (!state.x1.grid.compatible(truth.x1.grid)) {
        throw std::invalid_argument("relative_fit_error: state and truth grids differ");
    }
    Spectrum d1{state.x1.grid};
    Spectrum d2{state.x2.grid};
    for (int j = 0; j < state.x1.size(); ++j) {
        d1[j] = state.x1[j] - truth.x1[j];
        d2[j] = state.x2[j] - truth.x2[j];
    }
    const double n1 = weighted_norm(truth.x1, params.r);
    const double n2 = weighted_norm(truth.x2, params.r);
    const double den = std::sqrt(n1 * n1 + n2 * n2);
    if (den == 0.0) throw std::domain_error("relative_fit_error: truth has zero norm");
    const double e1 = weighted_norm(d1, params.r);
    const double e2 = weighted_norm(d2, params.r);
    return std::sqrt(e1 * e1 + e2 * e2) / den;
}

double relative_residual_error(const SplitState& state, const MeasurementSet& meas) {
    if (!state.x1.grid.compatible(meas.grid())) {
        throw std::invalid_argument("relative_residual_error: state and data grids differ");
    }
    const std::vector<Spectrum> fitted = apply_F(state, meas.geometry);
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < meas.points(); ++k) {
        Spectrum diff{state.x1.grid};
        for (int j = 0; j < diff.size(); ++j) diff[j] = fitted[k][j] - meas.spectra[k][j];
        const double r = weighted_norm(diff, 0.0);
        const double p = weighted_norm(meas.spectra[k], 0.0);
        num += r * r;
        den += p * p;
    }
    if (den == 0.0) throw std::domain_error("relative_residual_error: data has zero norm");
    return std::sqrt(num / den);
}

ErrorReport error_report(const SplitState& state, const MeasurementSet& meas,
                         const SplitState* truth, const WeightedNormParams& params) {
    ErrorReport report;
    const std::vector<Spectrum> fitted = apply_F(state, meas.geometry);
    double num = 0.0;
    double den = 0.0;
    report.per_channel_residuals.resize(meas.points());
    for (int k = 0; k < meas.points(); ++k) {
        Spectrum diff{state.x1.grid};
        for (int j = 0; j < diff.size(); ++j) diff[j] = fitted[k][j] - meas.spectra[k][j];
        const double r = weighted_norm(diff, 0.0);
        const double p = weighted_norm(meas.spectra[k], 0.0);
        report.per_channel_residuals[k] = r;
        num += r * r;
        den += p * p;
    }
    if (den == 0.0) throw std::domain_error("error_report: data has zero norm");
    report.e_res = std::sqrt(num / den);
    if (truth != nullptr) report.e_fit = relative_fit_error(state, *truth, params);
    return report;
}

}  // namespace pulsesplit
