#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace rh {

using Cx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279502884;

inline Eigen::FFT<double>& fft_engine() {
	thread_local Eigen::FFT<double> engine;
	return engine;
}

// X_k = sum_n x_n e^{-2 pi i k n / N}
inline std::vector<Cx> fft_fwd(const std::vector<Cx>& x) {
	std::vector<Cx> out(x.size());
	fft_engine().fwd(out, x);
	return out;
}

// x_n = (1/N) sum_k X_k e^{+2 pi i k n / N}
inline std::vector<Cx> fft_inv(const std::vector<Cx>& x) {
	std::vector<Cx> out(x.size());
	fft_engine().inv(out, x);
	return out;
}

// FFT storage slot for signed mode k in [-N/2, N/2).
inline std::size_t mode_slot(int k, std::size_t n) {
	int m = k % (int)n;
	if (m < 0) m += (int)n;
	return (std::size_t)m;
}

// Integer power by squaring, exact mode arithmetic for z^n on circles.
inline Cx ipow(Cx z, int n) {
	if (n < 0) return 1.0 / ipow(z, -n);
	Cx r = 1, b = z;
	for (unsigned e = (unsigned)n; e; e >>= 1, b *= b)
		if (e & 1) r *= b;
	return r;
}

} // namespace rh
