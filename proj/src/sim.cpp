#include "pulsesplit/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace pulsesplit {

ReflectionConfig::ReflectionConfig(std::vector<Reflector> r) : reflectors(std::move(r)) {
    if (reflectors.empty()) throw std::invalid_argument("ReflectionConfig: need at least one reflector");
    for (const Reflector& ref : reflectors) {
        if (!std::isfinite(ref.distance) || ref.distance < 0.0) {
            throw std::invalid_argument("ReflectionConfig: reflector distance must be >= 0");
        }
        if (!(ref.attenuation > 0.0) || ref.attenuation > 1.0) {
            throw std::invalid_argument("ReflectionConfig: attenuation must be in (0, 1]");
        }
    }
}

ReflectionConfig ReflectionConfig::defaults() {
    // Round-trip delays are short against the cardiac cycle, so the three
    // contributions add nearly coherently; attenuations summing to 0.5 put
    // the backward wave at roughly half the forward wave's norm.
    return ReflectionConfig{{{0.02, 0.25}, {0.05, 0.15}, {0.08, 0.1}}};
}

void ScenarioConfig::validate() const {
    if (samples < 2) throw std::invalid_argument("ScenarioConfig: samples must be >= 2");
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw std::invalid_argument("ScenarioConfig: period must be positive");
    }
    if (!(delta >= 0.0) || delta >= 1.0) {
        throw std::invalid_argument("ScenarioConfig: noise level must be in [0, 1)");
    }
    if (!std::isfinite(true_u) || true_u < min_pwv) {
        throw std::domain_error("ScenarioConfig: true velocity is below the floor");
    }
    geometry();  // validates distances / preset availability
}

Geometry ScenarioConfig::geometry() const {
    if (distances) return Geometry{*distances};
    switch (n_points) {
        case 2: return Geometry{{0.0, 0.15}};
        case 3: return Geometry{{0.0, 0.09, 0.15}};
        case 5: return Geometry{{0.0, 0.04, 0.09, 0.12, 0.15}};
        default:
            throw std::invalid_argument("ScenarioConfig: no geometry preset for N = " +
                                        std::to_string(n_points) + "; pass distances explicitly");
    }
}

double forward_wave_raw(double t_normalized) {
    const double a = std::sin(2.0 * kPi * t_normalized);
    const double b = std::sin(2.0 * kPi * t_normalized + 1.0);
    return a * a * a + 0.3 * b * b;
}

std::vector<double> forward_wave_template(const TimeGrid& grid) {
    std::vector<double> samples(grid.samples);
    double mean = 0.0;
    for (int j = 0; j < grid.samples; ++j) {
        samples[j] = forward_wave_raw(static_cast<double>(j) / grid.samples);
        mean += samples[j];
    }
    mean /= grid.samples;
    for (double& v : samples) v -= mean;
    return samples;
}

Spectrum build_backward_wave(const Spectrum& forward, const ReflectionConfig& reflections,
                             const Pwv& u, const Geometry& geometry) {
    const FrequencyGrid& grid = forward.grid;
    const double total = geometry.span();
    Spectrum out{grid};
    for (int j = 0; j < grid.samples; ++j) {
        const double w = grid.omega(j);
        Complex factor{0.0, 0.0};
        for (const Reflector& ref : reflections.reflectors) {
            factor += ref.attenuation * std::polar(1.0, -w * 2.0 * ref.distance / u.value);
        }
        out[j] = factor * std::polar(1.0, -w * total / u.value) * forward[j];
    }
    return out;
}

SyntheticData synthesize_measurements(const ScenarioConfig& scenario,
                                      const ReflectionConfig& reflections) {
    scenario.validate();
    const Geometry geom = scenario.geometry();
    const TimeGrid tgrid{scenario.samples, scenario.period};
    const FrequencyGrid fgrid{tgrid};
    const Pwv u{scenario.true_u, scenario.min_pwv};

    const std::vector<double> wave = forward_wave_template(tgrid);
    const Spectrum x1 = forward_dft(wave, tgrid);
    Spectrum x2 = build_backward_wave(x1, reflections, u, geom);
    SplitState truth{x1, std::move(x2), u};

    std::vector<Spectrum> clean_channels = apply_F(truth, geom);
    MeasurementSet clean{clean_channels, geom, 0.0};

    std::vector<Spectrum> noisy_channels = clean_channels;
    if (scenario.delta > 0.0) {
        std::mt19937_64 rng(scenario.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int m = fgrid.samples;
        for (int k = 0; k < geom.points(); ++k) {
            Spectrum eta{fgrid};
            for (int j = 0; j < m; ++j) eta[j] = Complex{gauss(rng), gauss(rng)};
            // Impose conjugate symmetry so the time-domain noise is real.
            eta[0] = Complex{eta[0].real(), 0.0};
            for (int j = 1; 2 * j < m; ++j) eta[m - j] = std::conj(eta[j]);
            if (m % 2 == 0) eta[m / 2] = Complex{eta[m / 2].real(), 0.0};

            const double eta_norm = weighted_norm(eta, 0.0);
            const double channel_norm = weighted_norm(clean_channels[k], 0.0);
            if (channel_norm == 0.0) {
                throw std::runtime_error("synthesize_measurements: channel " + std::to_string(k) +
                                         " is identically zero, cannot impose a relative noise level");
            }
            if (eta_norm == 0.0) {
                throw std::runtime_error("synthesize_measurements: degenerate noise draw");
            }
            const double scale = scenario.delta * channel_norm / eta_norm;
            for (int j = 0; j < m; ++j) noisy_channels[k][j] += scale * eta[j];
        }
    }
    MeasurementSet noisy{std::move(noisy_channels), geom, scenario.delta};

    return SyntheticData{std::move(noisy), std::move(clean), std::move(truth)};
}

}  // namespace pulsesplit
