#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rh/errors.hpp"

namespace rh {

// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on P_n.
struct GaussLegendre {
	std::vector<double> x, w;

	explicit GaussLegendre(std::size_t n) : x(n), w(n) {
		for (std::size_t i = 0; i < n; ++i) {
			// Chebyshev-like initial guess, roots ordered increasing
			double t = std::cos(M_PI * (double(n - i) - 0.25) / (double(n) + 0.5));
			for (int it = 0; it < 100; ++it) {
				double p0 = 1.0, p1 = t;
				for (std::size_t j = 2; j <= n; ++j) {
					double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / double(j);
					p0 = p1;
					p1 = p2;
				}
				// p1 = P_n(t), derivative from the recurrence
				double dp = double(n) * (t * p1 - p0) / (t * t - 1.0);
				double dt = p1 / dp;
				t -= dt;
				if (std::abs(dt) < 1e-15) break;
			}
			double p0 = 1.0, p1 = t;
			for (std::size_t j = 2; j <= n; ++j) {
				double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / double(j);
				p0 = p1;
				p1 = p2;
			}
			double dp = double(n) * (t * p1 - p0) / (t * t - 1.0);
			x[i] = t;
			w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
		}
	}
};

inline double legendre_P(std::size_t l, double t) {
	if (l == 0) return 1.0;
	double p0 = 1.0, p1 = t;
	for (std::size_t j = 2; j <= l; ++j) {
		double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / double(j);
		p0 = p1;
		p1 = p2;
	}
	return p1;
}

// Barycentric weights for arbitrary distinct nodes.
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
	std::size_t n = x.size();
	std::vector<double> w(n, 1.0);
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j)
			if (j != i) w[i] /= (x[i] - x[j]);
	// rescale to avoid overflow for larger n
	double mx = 0;
	for (double v : w) mx = std::max(mx, std::abs(v));
	for (double& v : w) v /= mx;
	return w;
}

// Dense differentiation matrix for the interpolating polynomial on nodes x.
inline Eigen::MatrixXd diff_matrix(const std::vector<double>& x) {
	std::size_t n = x.size();
	auto w = barycentric_weights(x);
	Eigen::MatrixXd d(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		double rowsum = 0;
		for (std::size_t j = 0; j < n; ++j) {
			if (i == j) continue;
			d((long)i, (long)j) = (w[j] / w[i]) / (x[i] - x[j]);
			rowsum += d((long)i, (long)j);
		}
		d((long)i, (long)i) = -rowsum;
	}
	return d;
}

template <typename T>
inline T barycentric_eval(const std::vector<double>& x, const std::vector<double>& w,
                          const std::vector<T>& f, double t) {
	std::size_t n = x.size();
	T num{};
	double den = 0;
	for (std::size_t i = 0; i < n; ++i) {
		double dx = t - x[i];
		if (std::abs(dx) < 1e-14) return f[i];
		double c = w[i] / dx;
		num += c * f[i];
		den += c;
	}
	return num / den;
}

// Radial quadrature grid on [a,b]: Gauss-Legendre nodes with weights,
// plus interpolation and differentiation data.
struct RadialGrid {
	double a, b;
	std::vector<double> r, w;   // nodes and quadrature weights on [a,b]
	std::vector<double> bary;   // barycentric weights
	Eigen::MatrixXd diff;       // d/dr on the nodes

	RadialGrid(double a_, double b_, std::size_t n) : a(a_), b(b_), r(n), w(n) {
		require(b_ > a_, ErrorCode::ValidationError, "empty radial interval");
		GaussLegendre gl(n);
		for (std::size_t i = 0; i < n; ++i) {
			r[i] = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
			w[i] = 0.5 * (b - a) * gl.w[i];
		}
		bary = barycentric_weights(r);
		diff = diff_matrix(r);
	}

	template <typename T>
	T interp(const std::vector<T>& f, double t) const {
		return barycentric_eval(r, bary, f, t);
	}
};

} // namespace rh
