#pragma once

#include "pulsesplit/model.hpp"

#include <optional>
#include <vector>

namespace pulsesplit {

struct ErrorReport {
    std::optional<double> e_fit;
    double e_res = 0.0;
    std::vector<double> per_channel_residuals;
};

// ||(x1, x2) - (t1, t2)|| / ||(t1, t2)|| in the solution norm (exponent r).
// The velocity is not part of the quotient; report |u - u*| separately.
double relative_fit_error(const SplitState& state, const SplitState& truth,
                          const WeightedNormParams& params);

// ||F(x1, x2, u) - p|| / ||p|| in the plain (exponent 0) data norm,
// independent of the r, s configuration.
double relative_residual_error(const SplitState& state, const MeasurementSet& meas);

ErrorReport error_report(const SplitState& state, const MeasurementSet& meas,
                         const SplitState* truth, const WeightedNormParams& params);

}  // namespace pulsesplit
