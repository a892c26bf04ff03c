#pragma once

#include <cmath>
#include <vector>

#include "rh/fourier.hpp"

namespace rh {

// Holomorphic map Phi(w) = c0 + w e^{g(w)} from the unit disk onto the region
// bounded by a closed curve that is starlike about c0, normalized by
// Phi(0) = c0 and Phi'(0) > 0. g is stored as a Taylor series.
struct DiskMap {
	Cx c0 = 0;
	std::vector<Cx> g, dg;
	std::vector<Cx> sp;      // source parameter minus disk angle, uniform in disk angle
	double fit_residual = 0; // size of the discarded negative boundary modes

	bool identity() const { return g.empty() && c0 == Cx(0); }

	Cx eval(Cx w) const { return c0 + w * std::exp(taylor_eval(g, w)); }

	Cx deriv(Cx w) const {
		Cx gv = taylor_eval(g, w);
		return std::exp(gv) * (1.0 + w * taylor_eval(dg, w));
	}

	// parameter of the source curve sample hit by the given boundary angle
	double source_param(double disk_angle) const {
		return disk_angle + (sp.empty() ? 0.0 : fourier_eval(sp, disk_angle).real());
	}

	// re-angle the disk so that deriv(0) is real and positive
	void normalize_rotation() {
		if (g.empty()) return;
		double a = g[0].imag();
		if (a == 0) return;
		std::vector<Cx> nsp(sp.size());
		for (std::size_t j = 0; j < sp.size(); ++j) {
			double th = 2 * PI * (double)j / (double)sp.size();
			nsp[j] = fourier_eval(sp, th - a) - a;
		}
		sp = std::move(nsp);
		for (std::size_t k = 0; k < g.size(); ++k) g[k] *= std::polar(1.0, -a * (double)k);
		g[0] -= Cx(0, a);
		for (std::size_t k = 1; k < g.size(); ++k) dg[k - 1] = (double)k * g[k];
	}

	// Newton solve of Phi(w) = target from a caller-supplied start; iterates
	// stay in the closed disk. Targets marginally outside the image resolve
	// to the boundary point the clamped iteration settles on, so convergence
	// is judged by the clamped movement, with a residual guard against
	// genuinely unreachable targets.
	Cx invert(Cx target, Cx guess, double tol = 1e-14, int maxit = 60) const {
		Cx w = guess;
		for (int it = 0; it < maxit; ++it) {
			Cx d = deriv(w);
			require(std::abs(d) > 1e-14, ErrorCode::MapIterationDiverged,
			        "conformal map derivative vanishes");
			Cx prev = w;
			w -= (eval(w) - target) / d;
			double r = std::abs(w);
			if (r > 1.0) w /= r;
			if (std::abs(w - prev) <= tol) {
				require(std::abs(eval(w) - target) <= 1e-3 * (1 + std::abs(target)),
				        ErrorCode::MapIterationDiverged, "target lies outside the mapped region");
				return w;
			}
		}
		fail(ErrorCode::MapIterationDiverged, "conformal map inversion did not converge");
	}
};

inline DiskMap identity_disk_map() { return DiskMap{}; }

// Conformal map of the unit disk onto the interior of a starlike curve by
// Theodorsen's method. The curve is given by samples at a uniform parameter;
// the polar radius about the centroid is interpolated trigonometrically in
// the curve parameter, so the parameterization itself need not be polar.
//
// With rho(phi) the polar radius, the boundary correspondence phi(theta) of
// Phi solves phi = theta + H[log rho(phi)] (H the circle harmonic conjugate),
// a contraction for near-circular curves. The converged boundary samples of
// log((Phi - c0)/w) give the Taylor series of g.
inline DiskMap theodorsen(const std::vector<Cx>& boundary, double tol = 1e-13, int maxit = 200) {
	std::size_t M = boundary.size();
	DiskMap out;
	for (const auto& z : boundary) out.c0 += z;
	out.c0 /= (double)M;

	int wind = 0;
	std::vector<Cx> v(M);
	for (std::size_t j = 0; j < M; ++j) v[j] = boundary[j] - out.c0;
	auto phis = unwrap_angle(v, &wind);
	require(wind == 1, ErrorCode::DegenerateEmbedding,
	        "curve does not wind once about its centroid");

	// polar angle as curve parameter offset, and log radius, both periodic
	std::vector<Cx> p(M), lr(M);
	double h = 2 * PI / (double)M, pbar = 0;
	for (std::size_t j = 0; j < M; ++j) {
		p[j] = phis[j] - h * (double)j;
		pbar += p[j].real() / (double)M;
		lr[j] = std::log(std::abs(v[j]));
	}
	std::vector<Cx> dp = fourier_deriv(p);

	// curve parameter at a given polar angle, Newton on the interpolants
	auto param_at = [&](double phi) {
		double th = phi - pbar;
		for (int it = 0; it < 60; ++it) {
			double r = th + fourier_eval(p, th).real() - phi;
			double d = 1.0 + fourier_eval(dp, th).real();
			require(std::abs(d) > 1e-10, ErrorCode::MapIterationDiverged,
			        "polar angle of the curve is not monotone");
			double step = r / d;
			th -= step;
			if (std::abs(step) <= 1e-13) return th;
		}
		fail(ErrorCode::MapIterationDiverged, "polar angle inversion did not converge");
	};

	std::vector<double> phi(M), u(M);
	for (std::size_t j = 0; j < M; ++j) phi[j] = h * (double)j;
	double change = 0;
	for (int it = 0;; ++it) {
		require(it < maxit, ErrorCode::MapIterationDiverged,
		        "boundary correspondence iteration did not converge");
		for (std::size_t j = 0; j < M; ++j) u[j] = fourier_eval(lr, param_at(phi[j])).real();
		auto cs = conjugate_series(u);
		change = 0;
		for (std::size_t j = 0; j < M; ++j) {
			double nphi = h * (double)j + cs[j];
			change = std::max(change, std::abs(nphi - phi[j]));
			phi[j] = nphi;
		}
		if (change <= tol) break;
	}

	out.sp.assign(M, Cx(0));
	for (std::size_t j = 0; j < M; ++j) out.sp[j] = param_at(phi[j]) - h * (double)j;

	std::vector<Cx> gb(M);
	for (std::size_t j = 0; j < M; ++j) gb[j] = Cx(u[j], phi[j] - h * (double)j);
	auto c = fft_fwd(gb);
	out.g.assign(M / 2, Cx(0));
	for (std::size_t k = 0; k < M / 2; ++k) out.g[k] = c[k] / (double)M;
	for (int k = min_mode(M); k < 0; ++k)
		out.fit_residual = std::max(out.fit_residual, std::abs(c[mode_slot(k, M)]) / (double)M);
	out.dg.assign(out.g.size() > 1 ? out.g.size() - 1 : 0, Cx(0));
	for (std::size_t k = 1; k < out.g.size(); ++k) out.dg[k - 1] = (double)k * out.g[k];
	return out;
}

} // namespace rh
