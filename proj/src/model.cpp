#include "pulsesplit/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pulsesplit {

namespace {

void check_channel_shapes(const std::vector<Spectrum>& y, const Geometry& geometry) {
    if (static_cast<int>(y.size()) != geometry.points()) {
        throw std::invalid_argument("channel count does not match geometry");
    }
    for (const Spectrum& s : y) {
        if (!s.grid.compatible(y.front().grid)) {
            throw std::invalid_argument("channels live on different grids");
        }
    }
}

}  // namespace

Pwv::Pwv(double meters_per_second, double min_value_mps)
    : value(meters_per_second), min_value(min_value_mps) {
    if (!(min_value_mps > 0.0) || !std::isfinite(min_value_mps)) {
        throw std::invalid_argument("Pwv: lower bound must be positive and finite");
    }
    if (!std::isfinite(meters_per_second) || meters_per_second < min_value_mps) {
        throw std::domain_error("Pwv: velocity " + std::to_string(meters_per_second) +
                                " m/s is below the lower bound " + std::to_string(min_value_mps));
    }
}

Geometry::Geometry(std::vector<double> distances_m) : distances(std::move(distances_m)) {
    if (distances.size() < 2) throw std::invalid_argument("Geometry: need at least two points");
    if (distances.front() != 0.0) {
        throw std::invalid_argument("Geometry: distances are anchored at the first point, L_1 must be 0");
    }
    for (std::size_t k = 0; k < distances.size(); ++k) {
        if (!std::isfinite(distances[k])) throw std::invalid_argument("Geometry: non-finite distance");
        if (k > 0 && !(distances[k] > distances[k - 1])) {
            throw std::invalid_argument("Geometry: distances must be strictly increasing");
        }
    }
}

SplitState::SplitState(Spectrum forward, Spectrum backward, Pwv velocity)
    : x1(std::move(forward)), x2(std::move(backward)), u(velocity) {
    if (!x1.grid.compatible(x2.grid)) {
        throw std::invalid_argument("SplitState: wave spectra live on different grids");
    }
}

MeasurementSet::MeasurementSet(std::vector<Spectrum> observed, Geometry geom,
                               std::optional<double> delta)
    : spectra(std::move(observed)), geometry(std::move(geom)), noise_level(delta) {
    check_channel_shapes(spectra, geometry);
    if (noise_level && (!(*noise_level >= 0.0) || !std::isfinite(*noise_level))) {
        throw std::invalid_argument("MeasurementSet: noise level must be >= 0");
    }
}

PhaseFactors phase_factors(const Geometry& geometry, const Pwv& u, const FrequencyGrid& grid) {
    const int n = geometry.points();
    const int m = grid.samples;
    const double total = geometry.span();
    PhaseFactors pf;
    pf.points = n;
    pf.bins = m;
    pf.forward.resize(static_cast<std::size_t>(n) * m);
    pf.backward.resize(static_cast<std::size_t>(n) * m);
    for (int k = 0; k < n; ++k) {
        const double tau_fwd = geometry.distances[k] / u.value;
        const double tau_bwd = (total - geometry.distances[k]) / u.value;
        for (int j = 0; j < m; ++j) {
            const double w = grid.omega(j);
            pf.forward[static_cast<std::size_t>(k) * m + j] = std::polar(1.0, -w * tau_fwd);
            pf.backward[static_cast<std::size_t>(k) * m + j] = std::polar(1.0, -w * tau_bwd);
        }
    }
    return pf;
}

std::vector<Spectrum> apply_F(const SplitState& state, const Geometry& geometry) {
    const FrequencyGrid& grid = state.x1.grid;
    const PhaseFactors pf = phase_factors(geometry, state.u, grid);
    std::vector<Spectrum> out;
    out.reserve(geometry.points());
    for (int k = 0; k < geometry.points(); ++k) {
        Spectrum channel{grid};
        for (int j = 0; j < grid.samples; ++j) {
            channel[j] = pf.e(k, j) * state.x1[j] + pf.et(k, j) * state.x2[j];
        }
        out.push_back(std::move(channel));
    }
    return out;
}

std::pair<Spectrum, Spectrum> apply_Fu_adjoint(const std::vector<Spectrum>& y,
                                               const Geometry& geometry, const Pwv& u,
                                               const WeightedNormParams& params) {
    params.validate();
    check_channel_shapes(y, geometry);
    const FrequencyGrid& grid = y.front().grid;
    const PhaseFactors pf = phase_factors(geometry, u, grid);
    Spectrum a1{grid};
    Spectrum a2{grid};
    for (int j = 0; j < grid.samples; ++j) {
        const double g = grid.harmonic(j);
        const double embed = std::pow(1.0 + g * g, params.s - params.r);
        Complex s1{0.0, 0.0};
        Complex s2{0.0, 0.0};
        for (int k = 0; k < geometry.points(); ++k) {
            s1 += std::conj(pf.e(k, j)) * y[k][j];
            s2 += std::conj(pf.et(k, j)) * y[k][j];
        }
        a1[j] = embed * s1;
        a2[j] = embed * s2;
    }
    return {std::move(a1), std::move(a2)};
}

std::vector<Spectrum> apply_Fx_derivative(const SplitState& state, const Geometry& geometry,
                                          double h) {
    if (!std::isfinite(h)) throw std::invalid_argument("apply_Fx_derivative: h must be finite");
    const FrequencyGrid& grid = state.x1.grid;
    const PhaseFactors pf = phase_factors(geometry, state.u, grid);
    const double u = state.u.value;
    const double total = geometry.span();
    std::vector<Spectrum> out;
    out.reserve(geometry.points());
    for (int k = 0; k < geometry.points(); ++k) {
        const double cf = geometry.distances[k] / (u * u);
        const double cb = (total - geometry.distances[k]) / (u * u);
        Spectrum channel{grid};
        for (int j = 0; j < grid.samples; ++j) {
            const double w = grid.omega(j);
            channel[j] = Complex{0.0, h * w * cf} * pf.e(k, j) * state.x1[j] +
                         Complex{0.0, h * w * cb} * pf.et(k, j) * state.x2[j];
        }
        out.push_back(std::move(channel));
    }
    return out;
}

double apply_Fx_gradient(const SplitState& state, const Geometry& geometry,
                         const std::vector<Spectrum>& residual,
                         const WeightedNormParams& params) {
    params.validate();
    check_channel_shapes(residual, geometry);
    if (!residual.front().grid.compatible(state.x1.grid)) {
        throw std::invalid_argument("apply_Fx_gradient: residual grid does not match state");
    }
    const std::vector<Spectrum> direction = apply_Fx_derivative(state, geometry, 1.0);
    double acc = 0.0;
    const FrequencyGrid& grid = state.x1.grid;
    for (int k = 0; k < geometry.points(); ++k) {
        for (int j = 0; j < grid.samples; ++j) {
            const double g = grid.harmonic(j);
            acc += std::pow(1.0 + g * g, params.s) *
                   std::real(direction[k][j] * std::conj(residual[k][j]));
        }
    }
    return acc * grid.delta_omega();
}

Complex channels_inner(const std::vector<Spectrum>& a, const std::vector<Spectrum>& b,
                       double weight_exponent) {
    if (a.size() != b.size()) throw std::invalid_argument("channels_inner: channel count mismatch");
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k) acc += weighted_inner(a[k], b[k], weight_exponent);
    return acc;
}

double channels_norm(const std::vector<Spectrum>& a, double weight_exponent) {
    double acc = 0.0;
    for (const Spectrum& s : a) {
        const double n = weighted_norm(s, weight_exponent);
        acc += n * n;
    }
    return std::sqrt(acc);
}

}  // namespace pulsesplit
