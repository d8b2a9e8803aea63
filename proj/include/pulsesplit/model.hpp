#pragma once

#include "pulsesplit/spectral.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pulsesplit {

inline constexpr double kDefaultMinPwv = 0.1;  // m/s

// Pulse wave velocity, kept away from zero so the delay phases
// omega*L/u stay well defined.
struct Pwv {
    double value = 0.0;
    double min_value = kDefaultMinPwv;

    explicit Pwv(double meters_per_second, double min_value_mps = kDefaultMinPwv);
};

// Measurement-point distances L_1..L_N in meters along the vessel,
// anchored at the first point: 0 = L_1 < L_2 < ... < L_N.
struct Geometry {
    std::vector<double> distances;

    explicit Geometry(std::vector<double> distances_m);

    int points() const { return static_cast<int>(distances.size()); }
    double span() const { return distances.back(); }
};

// The unknown triple: forward-wave spectrum at point 1, backward-wave
// spectrum at point N, and the velocity.
struct SplitState {
    Spectrum x1;
    Spectrum x2;
    Pwv u;

    SplitState(Spectrum forward, Spectrum backward, Pwv velocity);
};

// The N observed wave spectra plus the geometry they were measured on.
struct MeasurementSet {
    std::vector<Spectrum> spectra;
    Geometry geometry;
    std::optional<double> noise_level;

    MeasurementSet(std::vector<Spectrum> observed, Geometry geom,
                   std::optional<double> delta = std::nullopt);

    const FrequencyGrid& grid() const { return spectra.front().grid; }
    int points() const { return geometry.points(); }
};

// Per-bin unit-modulus delay factors e_k = exp(-i w L_k / u) and
// et_k = exp(-i w (L_N - L_k) / u), stored row-major per point.
struct PhaseFactors {
    int points = 0;
    int bins = 0;
    std::vector<Complex> forward;
    std::vector<Complex> backward;

    const Complex& e(int k, int j) const { return forward[static_cast<std::size_t>(k) * bins + j]; }
    const Complex& et(int k, int j) const { return backward[static_cast<std::size_t>(k) * bins + j]; }
};

PhaseFactors phase_factors(const Geometry& geometry, const Pwv& u, const FrequencyGrid& grid);

// Forward map: channel k is e_k * x1 + et_k * x2, evaluated bin-wise.
std::vector<Spectrum> apply_F(const SplitState& state, const Geometry& geometry);

// Adjoint of the splitting map at fixed u, including the embedding weight
// (1 + omega^2)^(s-r) from the data space into the solution space.
std::pair<Spectrum, Spectrum> apply_Fu_adjoint(const std::vector<Spectrum>& y,
                                               const Geometry& geometry, const Pwv& u,
                                               const WeightedNormParams& params);

// Derivative of the forward map in the velocity direction h: channel k is
// h*(i w L_k / u^2) e_k x1 + h*(i w (L_N - L_k) / u^2) et_k x2.
std::vector<Spectrum> apply_Fx_derivative(const SplitState& state, const Geometry& geometry,
                                          double h);

// Scalar adjoint of the velocity derivative: the real part of the weighted
// inner product of the derivative direction with the residual, so that
// Re<F'_x(u) h, y> = h * apply_Fx_gradient(...) for all real h.
double apply_Fx_gradient(const SplitState& state, const Geometry& geometry,
                         const std::vector<Spectrum>& residual, const WeightedNormParams& params);

// Weighted inner product and norm over N-channel spectra.
Complex channels_inner(const std::vector<Spectrum>& a, const std::vector<Spectrum>& b,
                       double weight_exponent);
double channels_norm(const std::vector<Spectrum>& a, double weight_exponent);

}  // namespace pulsesplit
