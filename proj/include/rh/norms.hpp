#pragma once

// Discrete Hoelder norm estimates on sampled point sets. The seminorm scans
// all pairs at least min_sep apart, so callers should hand in a decimated
// lattice rather than a full fine grid.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rh/errors.hpp"
#include "rh/grid.hpp"

namespace rh {

struct HolderEstimate {
	double sup = 0;
	double seminorm = 0;

	double norm() const { return sup + seminorm; }
};

inline HolderEstimate holder_norm_estimate(const std::vector<Cx>& values,
                                           const std::vector<Cx>& points, double alpha,
                                           double min_sep) {
	require(!values.empty() && values.size() == points.size(), ErrorCode::ValidationError,
	        "values and points must be nonempty and of equal length");
	require(alpha > 0 && alpha < 1, ErrorCode::ValidationError,
	        "exponent must lie strictly between 0 and 1");
	require(min_sep > 0, ErrorCode::ValidationError, "minimum separation must be positive");
	HolderEstimate est;
	std::size_t n = values.size();
	for (std::size_t i = 0; i < n; ++i) est.sup = std::max(est.sup, std::abs(values[i]));
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = i + 1; j < n; ++j) {
			double d = std::abs(points[i] - points[j]);
			if (d < min_sep) continue;
			double q = std::abs(values[i] - values[j]) / std::pow(d, alpha);
			est.seminorm = std::max(est.seminorm, q);
		}
	return est;
}

// Decimated sample of a field and its boundary trace for pairwise norms: all
// boundary nodes plus an interior lattice thinned by rstride and astride. The
// area grid carries Gauss radial nodes, so the trace supplies r = 1.
inline void holder_lattice(const PolarGrid& g, const std::vector<Cx>& f,
                           const std::vector<Cx>& trace, std::size_t rstride, std::size_t astride,
                           std::vector<Cx>& values, std::vector<Cx>& points) {
	require(f.size() == g.size() && trace.size() == g.nth, ErrorCode::ValidationError,
	        "field or trace does not match the grid");
	require(rstride > 0 && astride > 0, ErrorCode::ValidationError, "strides must be positive");
	values.clear();
	points.clear();
	for (std::size_t j = 0; j < g.nth; ++j) {
		values.push_back(trace[j]);
		points.push_back(std::polar(1.0, g.theta[j]));
	}
	for (std::size_t i = 0; i < g.nr; i += rstride)
		for (std::size_t j = 0; j < g.nth; j += astride) {
			values.push_back(f[g.idx(i, j)]);
			points.push_back(g.point(i, j));
		}
}

} // namespace rh
