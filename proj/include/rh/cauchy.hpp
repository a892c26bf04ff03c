#pragma once

#include <vector>

#include "rh/curve.hpp"

namespace rh {

// Boundary Cauchy integral C[phi](z) = (1/2 pi i) oint phi(t) dt / (t - z)
// over all components, z strictly inside. Plain trapezoid sums: spectrally
// accurate away from the boundary.
inline Cx cauchy_interior(const std::vector<const Curve*>& curves,
                          const std::vector<std::vector<Cx>>& phi, Cx z) {
	Cx acc = 0;
	for (std::size_t c = 0; c < curves.size(); ++c) {
		const Curve& cv = *curves[c];
		double h = cv.param_step();
		Cx s = 0;
		for (std::size_t j = 0; j < cv.size(); ++j) s += phi[c][j] * cv.dz[j] / (cv.z[j] - z);
		acc += s * h;
	}
	return acc / Cx(0, 2 * PI);
}

// Compensated (barycentric-type) form: exact for phi = 1, and the common
// quadrature error of numerator and denominator cancels near the boundary.
// Valid for z inside the domain (total winding 1). The cancellation is only
// complete for the part of phi extending analytically inside; negative-mode
// content still aliases at the usual trapezoid rate. Use CircleCauchy for
// uniform accuracy up to circular components.
inline Cx cauchy_compensated(const std::vector<const Curve*>& curves,
                             const std::vector<std::vector<Cx>>& phi, Cx z) {
	Cx num = 0, den = 0;
	for (std::size_t c = 0; c < curves.size(); ++c) {
		const Curve& cv = *curves[c];
		double h = cv.param_step();
		for (std::size_t j = 0; j < cv.size(); ++j) {
			Cx q = h * cv.dz[j] / (cv.z[j] - z);
			num += phi[c][j] * q;
			den += q;
		}
	}
	require(std::abs(den) > 1e-12, ErrorCode::NearBoundaryUnresolved,
	        "degenerate compensated Cauchy denominator");
	return num / den;
}

// Cauchy integral over one circular component, evaluated through Fourier
// modes of the density. Each mode maps to a single power of (z-c)/R or
// R/(z-c), so the evaluation stays spectrally accurate arbitrarily close to
// the circle (no quadrature pole, no alias amplification).
class CircleCauchy {
public:
	// samples in stored parameter order; ccw tells how the curve winds.
	CircleCauchy(Cx center, double radius, bool ccw, const std::vector<Cx>& samples)
	    : c_(center), R_(radius), ccw_(ccw), modes_(fft_fwd(samples)) {
		std::size_t m = modes_.size();
		for (auto& v : modes_) v /= double(m);
		modes_[m / 2] = 0; // unmatched Nyquist mode
	}

	// z strictly off the circle; inside/outside chosen by |z - c|.
	Cx eval(Cx z) const {
		std::size_t m = modes_.size();
		Cx u = (z - c_) / R_;
		bool inside = std::abs(u) < 1;
		Cx acc = 0;
		if (ccw_) {
			// stored mode k corresponds to ((t-c)/R)^k
			if (inside) {
				for (int k = int(m) / 2 - 1; k >= 0; --k) acc = acc * u + modes_[mode_slot(k, m)];
			} else {
				Cx v = 1.0 / u;
				for (int k = min_mode(m); k <= -1; ++k) acc = acc * v + modes_[mode_slot(k, m)];
				acc = -acc * v;
			}
		} else {
			// stored mode k corresponds to ((t-c)/R)^{-k}; reversed direction
			if (inside) {
				for (int k = min_mode(m); k <= 0; ++k) acc = acc * u + modes_[mode_slot(k, m)];
				acc = -acc;
			} else {
				Cx v = 1.0 / u;
				for (int k = int(m) / 2 - 1; k >= 1; --k) acc = acc * v + modes_[mode_slot(k, m)];
				acc *= v;
			}
		}
		return acc;
	}

private:
	Cx c_;
	double R_;
	bool ccw_;
	std::vector<Cx> modes_;
};

// Principal value of (1/2 pi i) oint phi(t) dt / (t - zeta) for zeta a node of
// component ci. Subtraction rule: over every component,
//   PV oint phi/(t-zeta) dt = oint (phi(t)-phi(zeta))/(t-zeta) dt + pi i phi(zeta),
// the pi i holding on any component under the domain-on-left convention.
// dphi[ci] are the parameter derivatives of phi on component ci.
inline Cx cauchy_pv(const std::vector<const Curve*>& curves,
                    const std::vector<std::vector<Cx>>& phi,
                    const std::vector<std::vector<Cx>>& dphi, std::size_t ci, std::size_t i) {
	Cx zeta = curves[ci]->z[i];
	Cx pz = phi[ci][i];
	Cx acc = Cx(0, PI) * pz;
	for (std::size_t c = 0; c < curves.size(); ++c) {
		const Curve& cv = *curves[c];
		double h = cv.param_step();
		Cx s = 0;
		for (std::size_t j = 0; j < cv.size(); ++j) {
			if (c == ci && j == i) {
				s += dphi[ci][i]; // limit of (phi(t)-phi(zeta)) z'/(t-zeta)
				continue;
			}
			s += (phi[c][j] - pz) * cv.dz[j] / (cv.z[j] - zeta);
		}
		acc += s * h;
	}
	return acc / Cx(0, 2 * PI);
}

// Interior boundary value by Plemelj: w+ = phi/2 + PV.
inline Cx cauchy_plus(const std::vector<const Curve*>& curves,
                      const std::vector<std::vector<Cx>>& phi,
                      const std::vector<std::vector<Cx>>& dphi, std::size_t ci, std::size_t i) {
	return 0.5 * phi[ci][i] + cauchy_pv(curves, phi, dphi, ci, i);
}

} // namespace rh
