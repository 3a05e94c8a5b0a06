#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace racetrack {

using Complex = std::complex<double>;

namespace detail {
inline Complex unit_root(long long k, long long m, long long n) {
    // Reduce k*m mod n first so the angle stays small for large indices.
    const long long r = ((k * m) % n + n) % n;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}
}  // namespace detail

/// Fourier coefficients with 1/R normalisation: f_hat_k = (1/R) sum_x f_x e^{-i 2 pi x k / R}.
inline std::vector<Complex> dft(std::span<const double> f) {
    const auto n = static_cast<long long>(f.size());
    std::vector<Complex> out(f.size());
    for (long long k = 0; k < n; ++k) {
        Complex s{};
        for (long long x = 0; x < n; ++x) s += f[static_cast<std::size_t>(x)] * std::conj(detail::unit_root(k, x, n));
        out[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
    }
    return out;
}

/// Inverse of dft(): f_x = sum_k f_hat_k e^{i 2 pi k x / R}. Returns the real part.
inline std::vector<double> inverse_dft(std::span<const Complex> coeffs) {
    const auto n = static_cast<long long>(coeffs.size());
    std::vector<double> out(coeffs.size());
    for (long long x = 0; x < n; ++x) {
        Complex s{};
        for (long long k = 0; k < n; ++k) s += coeffs[static_cast<std::size_t>(k)] * detail::unit_root(k, x, n);
        out[static_cast<std::size_t>(x)] = s.real();
    }
    return out;
}

/// Unnormalised modal sum sum_m g_m e^{+i 2 pi k m / R}.
///
/// For a circulant operator (J v)_x = sum_z g_{(z - x) mod R} v_z this is the
/// eigenvalue belonging to e^{i 2 pi k x / R}.
inline Complex modal_sum(std::span<const double> g, int k) {
    const auto n = static_cast<long long>(g.size());
    Complex s{};
    for (long long m = 0; m < n; ++m) s += g[static_cast<std::size_t>(m)] * detail::unit_root(k, m, n);
    return s;
}

}  // namespace racetrack
