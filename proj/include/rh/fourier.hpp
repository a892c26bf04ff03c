#pragma once

#include <cmath>
#include <vector>

#include "rh/errors.hpp"
#include "rh/fft.hpp"

namespace rh {

// Periodic sample vectors live on theta_j = 2 pi j / M (plus an optional fixed
// offset that never matters for these operators). M is even throughout.

// Signed mode range [-M/2, M/2) covered by an FFT of length M.
inline int min_mode(std::size_t m) { return -(int)m / 2; }
inline int max_mode(std::size_t m) { return (int)m / 2 - 1; }

// d/dtheta, spectral. The unmatched -M/2 mode is dropped.
inline std::vector<Cx> fourier_deriv(const std::vector<Cx>& samples) {
	auto c = fft_fwd(samples);
	std::size_t m = c.size();
	for (int k = min_mode(m); k <= max_mode(m); ++k) {
		std::size_t s = mode_slot(k, m);
		c[s] *= (k == min_mode(m)) ? Cx(0) : Cx(0, k);
	}
	return fft_inv(c);
}

// Zero-mean antiderivative in theta of the oscillatory part. The mean of the
// input (linear term of the antiderivative) is returned separately.
inline std::vector<Cx> fourier_antideriv(const std::vector<Cx>& samples, Cx* mean_out = nullptr) {
	auto c = fft_fwd(samples);
	std::size_t m = c.size();
	if (mean_out) *mean_out = c[0] / (double)m;
	c[0] = 0;
	for (int k = min_mode(m); k <= max_mode(m); ++k) {
		if (k == 0) continue;
		std::size_t s = mode_slot(k, m);
		c[s] = (k == min_mode(m)) ? Cx(0) : c[s] / Cx(0, k);
	}
	return fft_inv(c);
}

// Harmonic conjugate on the circle: u -> v where u + iv extends
// holomorphically and v has zero mean. Multiplier -i sgn(k).
inline std::vector<double> conjugate_series(const std::vector<double>& u) {
	std::size_t m = u.size();
	std::vector<Cx> x(m);
	for (std::size_t j = 0; j < m; ++j) x[j] = u[j];
	auto c = fft_fwd(x);
	for (int k = min_mode(m); k <= max_mode(m); ++k) {
		std::size_t s = mode_slot(k, m);
		if (k == 0 || k == min_mode(m)) c[s] = 0;
		else c[s] *= Cx(0, k > 0 ? -1 : 1);
	}
	auto v = fft_inv(c);
	std::vector<double> out(m);
	for (std::size_t j = 0; j < m; ++j) out[j] = v[j].real();
	return out;
}

// Taylor coefficients of the Schwarz integral
//   S gamma(z) = (1/2 pi i) int gamma(t) (t+z)/(t-z) dt/t
// for real boundary data gamma on the unit circle: a_0 = mean, a_k = 2 c_k for
// k >= 1 (c_k = Fourier coefficient). Re S gamma = gamma on the circle and
// Im S gamma(0) = 0. Modes at and beyond Nyquist are dropped.
inline std::vector<Cx> schwarz_taylor(const std::vector<double>& gamma) {
	std::size_t m = gamma.size();
	std::vector<Cx> x(m);
	for (std::size_t j = 0; j < m; ++j) x[j] = gamma[j];
	auto c = fft_fwd(x);
	std::vector<Cx> a(m / 2);
	a[0] = c[0].real() / (double)m;
	for (std::size_t k = 1; k < m / 2; ++k) a[k] = 2.0 * c[k] / (double)m;
	return a;
}

inline Cx taylor_eval(const std::vector<Cx>& a, Cx z) {
	Cx acc = 0;
	for (std::size_t i = a.size(); i-- > 0;) acc = acc * z + a[i];
	return acc;
}

// Values of a sampled periodic function at an arbitrary angle, by the
// interpolating trigonometric polynomial.
inline Cx fourier_eval(const std::vector<Cx>& samples, double theta, double grid_offset = 0.0) {
	auto c = fft_fwd(samples);
	std::size_t m = c.size();
	double t = theta - grid_offset;
	Cx acc = 0;
	for (int k = min_mode(m); k <= max_mode(m); ++k) {
		if (k == min_mode(m)) {
			// unmatched mode: symmetric (cosine) convention
			acc += c[mode_slot(k, m)] * std::cos(k * t);
		} else {
			acc += c[mode_slot(k, m)] * std::polar(1.0, k * t);
		}
	}
	return acc / (double)m;
}

// Continuous argument along a sampled closed loop of nonvanishing values.
// Returns the unwrapped angles; windings_out gets the integer winding number.
inline std::vector<double> unwrap_angle(const std::vector<Cx>& v, int* winding_out = nullptr) {
	std::size_t m = v.size();
	std::vector<double> a(m);
	require(m > 0, ErrorCode::ValidationError, "empty loop");
	for (std::size_t j = 0; j < m; ++j)
		require(std::abs(v[j]) > 1e-14, ErrorCode::NonIntegerWinding, "field vanishes on the boundary");
	a[0] = std::arg(v[0]);
	for (std::size_t j = 1; j < m; ++j) {
		double step = std::arg(v[j] / v[j - 1]);
		require(std::abs(step) < 2.8, ErrorCode::NonIntegerWinding,
		        "argument jumps by more than 2.8 radians between samples");
		a[j] = a[j - 1] + step;
	}
	double close = std::arg(v[0] / v[m - 1]);
	require(std::abs(close) < 2.8, ErrorCode::NonIntegerWinding, "argument jump at loop closure");
	double total = a[m - 1] + close - a[0];
	double w = total / (2 * PI);
	require(std::abs(w - std::round(w)) < 1e-6, ErrorCode::NonIntegerWinding, "winding is not an integer");
	if (winding_out) *winding_out = (int)std::lround(w);
	return a;
}

} // namespace rh
