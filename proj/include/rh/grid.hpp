#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "rh/errors.hpp"
#include "rh/fft.hpp"
#include "rh/fourier.hpp"
#include "rh/legendre.hpp"

namespace rh {

// Tensor polar grid for area integrals on a disk (r0 = 0) or annulus
// (0 < r0 < 1), outer radius 1, centered at the origin. Radial direction uses
// Gauss-Legendre nodes (never touching r = 0), angular direction uses
// equispaced nodes theta_j = 2 pi j / nth.
struct PolarGrid {
	double r0 = 0.0;
	std::size_t nr = 0, nth = 0;
	RadialGrid rad;
	std::vector<double> theta;

	PolarGrid(double inner, std::size_t nr_, std::size_t nth_)
		: r0(inner), nr(nr_), nth(nth_), rad(inner, 1.0, nr_), theta(nth_) {
		require(inner >= 0 && inner < 1, ErrorCode::ValidationError, "inner radius out of range");
		require(nth_ >= 8 && (nth_ & (nth_ - 1)) == 0, ErrorCode::ValidationError,
		        "angular count must be a power of two >= 8");
		for (std::size_t j = 0; j < nth_; ++j) theta[j] = 2 * PI * (double)j / (double)nth_;
	}

	bool is_disk() const { return r0 == 0.0; }
	std::size_t size() const { return nr * nth; }
	std::size_t idx(std::size_t i, std::size_t j) const { return i * nth + j; }
	Cx point(std::size_t i, std::size_t j) const { return std::polar(rad.r[i], theta[j]); }

	// weight for integrals against dA = r dr dtheta
	double area_weight(std::size_t i) const { return rad.w[i] * rad.r[i] * 2 * PI / (double)nth; }

	std::vector<Cx> sample(const std::function<Cx(Cx)>& f) const {
		std::vector<Cx> out(size());
		for (std::size_t i = 0; i < nr; ++i)
			for (std::size_t j = 0; j < nth; ++j) out[idx(i, j)] = f(point(i, j));
		return out;
	}

	Cx integrate(const std::vector<Cx>& f) const {
		Cx s = 0;
		for (std::size_t i = 0; i < nr; ++i) {
			Cx row = 0;
			for (std::size_t j = 0; j < nth; ++j) row += f[idx(i, j)];
			s += row * area_weight(i);
		}
		return s;
	}
};

// Interpolation of a grid field at arbitrary points of the closed disk or
// annulus: trigonometric in theta per radial node, then polynomial in r.
struct FieldInterp {
	const PolarGrid* g;
	std::vector<std::vector<Cx>> rowc; // FFT coefficients per radial node

	FieldInterp(const PolarGrid& grid, const std::vector<Cx>& f) : g(&grid) {
		rowc.resize(grid.nr);
		std::vector<Cx> row(grid.nth);
		for (std::size_t i = 0; i < grid.nr; ++i) {
			for (std::size_t j = 0; j < grid.nth; ++j) row[j] = f[grid.idx(i, j)];
			rowc[i] = fft_fwd(row);
		}
	}

	Cx operator()(Cx z) const {
		double r = std::abs(z);
		double th = std::arg(z);
		require(r <= 1.0 + 1e-9, ErrorCode::ValidationError, "interpolation point outside domain");
		std::size_t m = g->nth;
		std::vector<Cx> vals(g->nr);
		for (std::size_t i = 0; i < g->nr; ++i) {
			Cx acc = 0;
			for (int k = min_mode(m); k <= max_mode(m); ++k) {
				Cx c = rowc[i][mode_slot(k, m)];
				if (k == min_mode(m)) acc += c * std::cos(k * th);
				else acc += c * std::polar(1.0, k * th);
			}
			vals[i] = acc / (double)m;
		}
		return g->rad.interp(vals, r);
	}
};

} // namespace rh
