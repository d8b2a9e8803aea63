#pragma once

#include "pulsesplit/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pulsesplit {

struct Reflector {
    double distance = 0.0;     // meters beyond the last measurement point
    double attenuation = 1.0;  // in (0, 1]
};

// Reflective points that build the backward wave from the forward wave.
struct ReflectionConfig {
    std::vector<Reflector> reflectors;

    explicit ReflectionConfig(std::vector<Reflector> r);

    // Three reflectors shortly beyond the last point, sized to return a
    // backward wave of roughly half the forward wave's energy.
    static ReflectionConfig defaults();
};

struct ScenarioConfig {
    int n_points = 3;
    std::optional<std::vector<double>> distances;  // preset by n_points when absent
    double true_u = 2.0;                           // m/s
    double period = 0.75;                          // s
    int samples = 500;                             // m
    double delta = 0.0;                            // relative noise level
    std::uint64_t seed = 0;
    double min_pwv = kDefaultMinPwv;

    void validate() const;
    Geometry geometry() const;
};

// The forward-wave formula on normalized time t in [0, 1), before the
// mean shift.
double forward_wave_raw(double t_normalized);

// Samples the forward-wave formula at t = j/m and shifts to zero mean.
std::vector<double> forward_wave_template(const TimeGrid& grid);

// Each reflector at distance d beyond the last point returns an attenuated
// copy of the forward wave there, delayed by the round trip 2d/u.
Spectrum build_backward_wave(const Spectrum& forward, const ReflectionConfig& reflections,
                             const Pwv& u, const Geometry& geometry);

struct SyntheticData {
    MeasurementSet noisy;
    MeasurementSet clean;
    SplitState truth;
};

// Builds the true split, pushes it through the forward map, and injects
// conjugate-symmetric complex Gaussian noise rescaled so every channel's
// relative spectral error equals delta exactly.
SyntheticData synthesize_measurements(const ScenarioConfig& scenario,
                                      const ReflectionConfig& reflections);

}  // namespace pulsesplit
