#include "pulsesplit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pulsesplit {

namespace {

int smallest_prime_factor(int n) {
    if (n % 2 == 0) return 2;
    for (int p = 3; static_cast<long long>(p) * p <= n; p += 2) {
        if (n % p == 0) return p;
    }
    return n;
}

// Twiddle table exp(sign * 2 pi i t / n) for t in [0, n). Indexing through
// (j*k) mod n keeps every angle in [0, 2 pi) and avoids large-argument
// reduction error.
std::vector<Complex> twiddles(int n, int sign) {
    std::vector<Complex> tw(n);
    for (int t = 0; t < n; ++t) {
        tw[t] = std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(t) / n);
    }
    return tw;
}

std::vector<Complex> dft_direct(std::span<const Complex> x, int sign) {
    const int n = static_cast<int>(x.size());
    const std::vector<Complex> tw = twiddles(n, sign);
    std::vector<Complex> out(n);
    for (int k = 0; k < n; ++k) {
        Complex acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            acc += x[j] * tw[static_cast<int>((static_cast<long long>(j) * k) % n)];
        }
        out[k] = acc;
    }
    return out;
}

// Mixed-radix Cooley-Tukey on the smallest prime factor, direct summation
// for prime sizes. Exact-arithmetic-equivalent to the plain DFT sum for
// arbitrary m; correctness over speed at desk scale.
std::vector<Complex> dft_recursive(std::span<const Complex> x, int sign) {
    const int n = static_cast<int>(x.size());
    if (n == 1) return {x[0]};
    const int p = smallest_prime_factor(n);
    if (p == n) return dft_direct(x, sign);
    const int q = n / p;

    std::vector<std::vector<Complex>> sub(p);
    std::vector<Complex> strided(q);
    for (int b = 0; b < p; ++b) {
        for (int a = 0; a < q; ++a) strided[a] = x[static_cast<std::size_t>(a) * p + b];
        sub[b] = dft_recursive(strided, sign);
    }

    const std::vector<Complex> tw = twiddles(n, sign);
    std::vector<Complex> out(n);
    for (int k = 0; k < n; ++k) {
        Complex acc{0.0, 0.0};
        for (int b = 0; b < p; ++b) {
            acc += tw[static_cast<int>((static_cast<long long>(b) * k) % n)] * sub[b][k % q];
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

TimeGrid::TimeGrid(int m, double period_s) : samples(m), period(period_s) {
    if (m < 2) throw std::invalid_argument("TimeGrid: sample count must be >= 2");
    if (!(period_s > 0.0) || !std::isfinite(period_s)) {
        throw std::invalid_argument("TimeGrid: period must be positive and finite");
    }
}

long long FrequencyGrid::signed_bin(long long j, long long m) {
    return j < (m + 1) / 2 ? j : j - m;
}

FrequencyGrid::FrequencyGrid(int m, double period_s) : samples(m), period(period_s) {
    if (m < 2) throw std::invalid_argument("FrequencyGrid: sample count must be >= 2");
    if (!(period_s > 0.0) || !std::isfinite(period_s)) {
        throw std::invalid_argument("FrequencyGrid: period must be positive and finite");
    }
    omegas.resize(m);
    const double fundamental = 2.0 * kPi / period;
    for (int j = 0; j < m; ++j) {
        omegas[j] = fundamental * static_cast<double>(signed_bin(j, m));
    }
}

FrequencyGrid::FrequencyGrid(const TimeGrid& grid) : FrequencyGrid(grid.samples, grid.period) {}

Spectrum::Spectrum(FrequencyGrid g) : grid(std::move(g)), values(grid.samples, Complex{0.0, 0.0}) {}

Spectrum::Spectrum(FrequencyGrid g, std::vector<Complex> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.samples) {
        throw std::invalid_argument("Spectrum: value count does not match grid");
    }
}

void WeightedNormParams::validate() const {
    if (!std::isfinite(s) || !std::isfinite(r) || s < 0.0 || r < s) {
        throw std::invalid_argument("WeightedNormParams: need r >= s >= 0");
    }
}

Spectrum forward_dft(std::span<const double> signal, const TimeGrid& grid) {
    if (static_cast<int>(signal.size()) != grid.samples) {
        throw std::invalid_argument("forward_dft: signal length does not match grid");
    }
    std::vector<Complex> lifted(signal.size());
    std::transform(signal.begin(), signal.end(), lifted.begin(),
                   [](double v) { return Complex{v, 0.0}; });
    return Spectrum{FrequencyGrid{grid}, dft_recursive(lifted, -1)};
}

Spectrum forward_dft(std::span<const Complex> signal, const TimeGrid& grid) {
    if (static_cast<int>(signal.size()) != grid.samples) {
        throw std::invalid_argument("forward_dft: signal length does not match grid");
    }
    return Spectrum{FrequencyGrid{grid}, dft_recursive(signal, -1)};
}

std::vector<Complex> inverse_dft(const Spectrum& spec) {
    std::vector<Complex> out = dft_recursive(spec.values, +1);
    const double scale = 1.0 / spec.grid.samples;
    for (Complex& v : out) v *= scale;
    return out;
}

std::vector<double> inverse_dft_real(const Spectrum& spec) {
    const std::vector<Complex> full = inverse_dft(spec);
    double max_abs = 0.0;
    double max_imag = 0.0;
    for (const Complex& v : full) {
        max_abs = std::max(max_abs, std::abs(v));
        max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    if (max_imag > 1e-9 * std::max(max_abs, 1e-300)) {
        throw std::invalid_argument(
            "inverse_dft_real: spectrum is not conjugate-symmetric (imaginary residue " +
            std::to_string(max_imag) + ")");
    }
    std::vector<double> out(full.size());
    std::transform(full.begin(), full.end(), out.begin(), [](Complex v) { return v.real(); });
    return out;
}

bool is_conjugate_symmetric(const Spectrum& spec, double rel_tol) {
    const int m = spec.size();
    double max_abs = 0.0;
    for (const Complex& v : spec.values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return true;
    for (int j = 0; j < m; ++j) {
        const int partner = j == 0 ? 0 : m - j;
        if (std::abs(spec[j] - std::conj(spec[partner])) > rel_tol * max_abs) return false;
    }
    return true;
}

Complex weighted_inner(const Spectrum& a, const Spectrum& b, double weight_exponent) {
    if (!a.grid.compatible(b.grid)) {
        throw std::invalid_argument("weighted_inner: spectra live on different grids");
    }
    Complex acc{0.0, 0.0};
    for (int j = 0; j < a.size(); ++j) {
        const double g = a.grid.harmonic(j);
        acc += std::pow(1.0 + g * g, weight_exponent) * a[j] * std::conj(b[j]);
    }
    return acc * a.grid.delta_omega();
}

double weighted_norm(const Spectrum& a, double weight_exponent) {
    double acc = 0.0;
    for (int j = 0; j < a.size(); ++j) {
        const double g = a.grid.harmonic(j);
        acc += std::pow(1.0 + g * g, weight_exponent) * std::norm(a[j]);
    }
    return std::sqrt(acc * a.grid.delta_omega());
}

}  // namespace pulsesplit
