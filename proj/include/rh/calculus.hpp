#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rh/fourier.hpp"
#include "rh/grid.hpp"

namespace rh {

// Partial derivatives of a grid field: barycentric differentiation matrix in
// r, spectral differentiation in theta.
inline void polar_derivs(const PolarGrid& g, const std::vector<Cx>& f, std::vector<Cx>* fr,
                         std::vector<Cx>* fth) {
	std::size_t nr = g.nr, nth = g.nth;
	if (fr) {
		fr->assign(g.size(), Cx(0));
		const Eigen::MatrixXd& D = g.rad.diff;
		for (std::size_t j = 0; j < nth; ++j) {
			for (std::size_t i = 0; i < nr; ++i) {
				Cx s = 0;
				for (std::size_t p = 0; p < nr; ++p) s += D((long)i, (long)p) * f[g.idx(p, j)];
				(*fr)[g.idx(i, j)] = s;
			}
		}
	}
	if (fth) {
		fth->assign(g.size(), Cx(0));
		std::vector<Cx> row(nth);
		for (std::size_t i = 0; i < nr; ++i) {
			for (std::size_t j = 0; j < nth; ++j) row[j] = f[g.idx(i, j)];
			auto d = fourier_deriv(row);
			for (std::size_t j = 0; j < nth; ++j) (*fth)[g.idx(i, j)] = d[j];
		}
	}
}

// dbar = (d/dx + i d/dy)/2 = e^{i theta} (d/dr + (i/r) d/dtheta) / 2
inline std::vector<Cx> dbar_field(const PolarGrid& g, const std::vector<Cx>& f) {
	std::vector<Cx> fr, fth;
	polar_derivs(g, f, &fr, &fth);
	std::vector<Cx> out(g.size());
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			std::size_t p = g.idx(i, j);
			out[p] = 0.5 * std::polar(1.0, g.theta[j]) * (fr[p] + Cx(0, 1) / g.rad.r[i] * fth[p]);
		}
	return out;
}

// d/dz = (d/dx - i d/dy)/2 = e^{-i theta} (d/dr - (i/r) d/dtheta) / 2
inline std::vector<Cx> dz_field(const PolarGrid& g, const std::vector<Cx>& f) {
	std::vector<Cx> fr, fth;
	polar_derivs(g, f, &fr, &fth);
	std::vector<Cx> out(g.size());
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			std::size_t p = g.idx(i, j);
			out[p] = 0.5 * std::polar(1.0, -g.theta[j]) * (fr[p] - Cx(0, 1) / g.rad.r[i] * fth[p]);
		}
	return out;
}

} // namespace rh
