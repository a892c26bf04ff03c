#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rh/errors.hpp"
#include "rh/fourier.hpp"

namespace rh {

// Closed curve sampled at sigma_j = 2 pi j / M with spectral derivative.
// Convention: the domain lies on the left, so the outer boundary runs
// counterclockwise and hole boundaries clockwise; the outward normal of the
// domain is then -i z' / |z'| on every component.
struct Curve {
	std::vector<Cx> z, dz;

	static Curve from_samples(std::vector<Cx> pts) {
		Curve c;
		c.z = std::move(pts);
		std::size_t m = c.z.size();
		require(m >= 32 && (m & (m - 1)) == 0, ErrorCode::ValidationError,
		        "curve sample count must be a power of two >= 32");
		c.dz = fourier_deriv(c.z);
		for (std::size_t j = 0; j < m; ++j)
			require(std::abs(c.dz[j]) > 1e-10, ErrorCode::DegenerateEmbedding,
			        "vanishing tangent vector");
		return c;
	}

	static Curve from_function(const std::function<Cx(double)>& f, std::size_t m) {
		std::vector<Cx> pts(m);
		for (std::size_t j = 0; j < m; ++j) pts[j] = f(2 * PI * (double)j / (double)m);
		return from_samples(std::move(pts));
	}

	static Curve circle(Cx center, double radius, std::size_t m, bool ccw = true) {
		return from_function(
			[&](double s) { return center + std::polar(radius, ccw ? s : -s); }, m);
	}

	static Curve ellipse(double a, double b, std::size_t m) {
		return from_function([&](double s) { return Cx(a * std::cos(s), b * std::sin(s)); }, m);
	}

	std::size_t size() const { return z.size(); }
	double param_step() const { return 2 * PI / (double)z.size(); }
	double speed(std::size_t j) const { return std::abs(dz[j]); }
	Cx tangent(std::size_t j) const { return dz[j] / speed(j); }
	Cx outward_normal(std::size_t j) const { return Cx(0, -1) * tangent(j); }

	double length() const {
		double s = 0;
		for (std::size_t j = 0; j < size(); ++j) s += speed(j);
		return s * param_step();
	}

	// winding of the curve around p, from summed argument increments
	int winding_about(Cx p) const {
		double total = 0;
		std::size_t m = size();
		for (std::size_t j = 0; j < m; ++j) total += std::arg((z[(j + 1) % m] - p) / (z[j] - p));
		return (int)std::lround(total / (2 * PI));
	}
};

// Winding number of a nonvanishing field sampled along one closed curve.
inline int field_winding(const std::vector<Cx>& values) {
	int w = 0;
	unwrap_angle(values, &w);
	return w;
}

struct Domain {
	Curve outer;
	std::vector<Curve> holes;

	std::size_t components() const { return 1 + holes.size(); }

	bool contains(Cx p) const {
		if (outer.winding_about(p) != 1) return false;
		for (const auto& h : holes)
			if (h.winding_about(p) != 0) return false;
		return true;
	}

	Cx interior_point_of_hole(std::size_t i) const {
		// centroid of the hole curve
		Cx s = 0;
		for (auto& v : holes[i].z) s += v;
		return s / (double)holes[i].size();
	}

	void validate() const {
		Cx c = 0;
		for (auto& v : outer.z) c += v;
		c /= (double)outer.size();
		require(outer.winding_about(c) == 1, ErrorCode::DegenerateEmbedding,
		        "outer boundary must run counterclockwise");
		for (std::size_t i = 0; i < holes.size(); ++i) {
			Cx hc = interior_point_of_hole(i);
			require(holes[i].winding_about(hc) == -1, ErrorCode::DegenerateEmbedding,
			        "hole boundary must run clockwise");
			require(outer.winding_about(hc) == 1, ErrorCode::DegenerateEmbedding,
			        "hole lies outside the outer boundary");
			for (std::size_t k = 0; k < holes.size(); ++k)
				if (k != i)
					require(holes[k].winding_about(hc) == 0, ErrorCode::DegenerateEmbedding,
					        "holes overlap");
		}
	}
};

} // namespace rh
