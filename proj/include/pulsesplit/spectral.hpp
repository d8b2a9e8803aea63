#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pulsesplit {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Equispaced samples t_j = j*T/m covering one period [0, T).
struct TimeGrid {
    int samples = 0;    // m
    double period = 0;  // T in seconds

    TimeGrid(int m, double period_s);

    double dt() const { return period / samples; }
    double time_at(int j) const { return j * period / samples; }
};

// Angular frequencies in DFT bin order with signed bin indices
// (0, 1, ..., ceil(m/2)-1, -floor(m/2), ..., -1), scaled by the fundamental
// 2*pi/T so that omega carries physical units (rad/s). The signed layout
// keeps the weight (1 + omega^2)^s symmetric.
struct FrequencyGrid {
    int samples = 0;
    double period = 0;
    std::vector<double> omegas;

    FrequencyGrid(int m, double period_s);
    explicit FrequencyGrid(const TimeGrid& grid);

    static long long signed_bin(long long j, long long m);

    double delta_omega() const { return 2.0 * kPi / period; }
    double omega(int j) const { return omegas[j]; }
    // Dimensionless harmonic index omega / (2 pi / T); the smoothness
    // weights are built from this so they are invariant under rescaling
    // the period, while delay phases use the physical omega.
    double harmonic(int j) const { return static_cast<double>(signed_bin(j, samples)); }
    bool compatible(const FrequencyGrid& other) const {
        return samples == other.samples && period == other.period;
    }
};

// Complex frequency-domain representation of one wave on a fixed grid.
struct Spectrum {
    FrequencyGrid grid;
    std::vector<Complex> values;

    explicit Spectrum(FrequencyGrid g);
    Spectrum(FrequencyGrid g, std::vector<Complex> v);

    int size() const { return grid.samples; }
    Complex& operator[](int j) { return values[j]; }
    const Complex& operator[](int j) const { return values[j]; }
};

// Smoothness exponents of the weighted norms: s for the data space, r for
// the solution space, with r >= s >= 0. Differentiability of the velocity
// dependence would need r >= s + 2; r = 1, s = 0 works numerically and is
// flagged by solvers instead of rejected.
struct WeightedNormParams {
    double s = 0.0;
    double r = 1.0;

    void validate() const;
    bool derivative_order_ok() const { return r >= s + 2.0; }
};

// Unnormalized forward sum X_k = sum_j x_j exp(-2 pi i j k / m); the
// inverse divides by m, so inverse_dft(forward_dft(x)) == x.
Spectrum forward_dft(std::span<const double> signal, const TimeGrid& grid);
Spectrum forward_dft(std::span<const Complex> signal, const TimeGrid& grid);

std::vector<Complex> inverse_dft(const Spectrum& spec);

// For conjugate-symmetric spectra: drops the numerically-zero imaginary
// parts and returns real samples. Throws if the spectrum is visibly
// asymmetric.
std::vector<double> inverse_dft_real(const Spectrum& spec);

bool is_conjugate_symmetric(const Spectrum& spec, double rel_tol = 1e-12);

// Discrete weighted inner product
//   <a, b>_t = sum_j (1 + g_j^2)^t a_j conj(b_j) * delta_omega,
// with g_j the harmonic index; conjugate-linear in b.
Complex weighted_inner(const Spectrum& a, const Spectrum& b, double weight_exponent);
double weighted_norm(const Spectrum& a, double weight_exponent);

}  // namespace pulsesplit
