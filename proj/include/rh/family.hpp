#pragma once

// One-parameter families of boundary value problems on deforming planar
// domains. A DomainFamily describes the deformation of the unit circle, a
// FamilyProblem attaches coefficient and boundary data generators, and sweep
// solves the slices over a lambda grid, pulling every solution back to the
// fixed reference disk so that neighbouring slices can be compared in the
// same coordinates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rh/conformal.hpp"
#include "rh/diskbvp.hpp"
#include "rh/errors.hpp"
#include "rh/fourier.hpp"
#include "rh/grid.hpp"
#include "rh/norms.hpp"

namespace rh {

inline Cx powi(Cx z, int k) {
	Cx acc = 1;
	for (int i = 0; i < k; ++i) acc *= z;
	return acc;
}

// Boundary deformation Gamma(e^{is}, lambda) = e^{is} + sum_p lambda^p D_p(s)
// with D_p a trigonometric polynomial; modes[p-1] holds its coefficients for
// k = -K..K. The interior extension replaces e^{iks} by z^k (k >= 0) or
// conj(z)^{-k} (k < 0), which is exact for affine stretches and keeps the
// extension harmonic in general.
struct DomainFamily {
	std::vector<std::vector<Cx>> modes;
	int jorder = 1; // lambda smoothness the generators promise

	static DomainFamily identity() { return {}; }

	// x + iy -> x (1 + amp lambda) + iy
	static DomainFamily stretch(double amp) {
		DomainFamily f;
		f.modes = {{amp / 2, 0.0, amp / 2}};
		return f;
	}

	bool moving() const {
		for (auto& row : modes)
			for (auto& c : row)
				if (c != Cx(0)) return true;
		return false;
	}

	Cx displacement(Cx z, double lam) const {
		Cx acc = 0;
		double lp = 1;
		for (auto& row : modes) {
			lp *= lam;
			int K = ((int)row.size() - 1) / 2;
			Cx m = 0;
			for (int k = -K; k <= K; ++k) {
				Cx c = row[(std::size_t)(k + K)];
				if (c == Cx(0)) continue;
				m += c * (k >= 0 ? powi(z, k) : powi(std::conj(z), -k));
			}
			acc += lp * m;
		}
		return acc;
	}

	Cx interior(Cx z, double lam) const { return z + displacement(z, lam); }

	Cx boundary(double s, double lam) const { return interior(std::polar(1.0, s), lam); }

	// tangent d/ds Gamma(e^{is}, lambda)
	Cx boundary_ds(double s, double lam) const {
		Cx z = std::polar(1.0, s), dz, dzb;
		ext_derivs(z, lam, dz, dzb);
		return Cx(0, 1) * z * (1.0 + dz) - Cx(0, 1) * std::conj(z) * dzb;
	}

	Cx boundary_dlam(double s, double lam) const {
		Cx z = std::polar(1.0, s), acc = 0;
		double lp = 1;
		for (std::size_t p = 0; p < modes.size(); ++p) {
			auto& row = modes[p];
			int K = ((int)row.size() - 1) / 2;
			Cx m = 0;
			for (int k = -K; k <= K; ++k) {
				Cx c = row[(std::size_t)(k + K)];
				if (c == Cx(0)) continue;
				m += c * (k >= 0 ? powi(z, k) : powi(std::conj(z), -k));
			}
			acc += (double)(p + 1) * lp * m;
			lp *= lam;
		}
		return acc;
	}

	void ext_derivs(Cx z, double lam, Cx& dz, Cx& dzb) const {
		dz = 0;
		dzb = 0;
		double lp = 1;
		for (auto& row : modes) {
			lp *= lam;
			int K = ((int)row.size() - 1) / 2;
			for (int k = 1; k <= K; ++k) {
				Cx cp = row[(std::size_t)(k + K)], cm = row[(std::size_t)(K - k)];
				if (cp != Cx(0)) dz += lp * cp * (double)k * powi(z, k - 1);
				if (cm != Cx(0)) dzb += lp * cm * (double)k * powi(std::conj(z), k - 1);
			}
		}
	}

	double jacobian(Cx z, double lam) const {
		Cx dz, dzb;
		ext_derivs(z, lam, dz, dzb);
		return std::norm(1.0 + dz) - std::norm(dzb);
	}

	// Reject deformations that fold over anywhere on the probed grid.
	void check_embedding(const PolarGrid& g, const std::vector<double>& lambdas) const {
		for (double lam : lambdas) {
			for (std::size_t j = 0; j < g.nth; ++j)
				require(jacobian(std::polar(1.0, g.theta[j]), lam) >= 1e-8,
				        ErrorCode::DegenerateEmbedding, "family deformation folds on the boundary");
			for (std::size_t i = 0; i < g.nr; ++i)
				for (std::size_t j = 0; j < g.nth; j += 4)
					require(jacobian(g.point(i, j), lam) >= 1e-8, ErrorCode::DegenerateEmbedding,
					        "family deformation folds in the interior");
		}
	}
};

inline DomainFamily build_domain_family(std::vector<std::vector<Cx>> table, int jorder = 1) {
	for (auto& row : table)
		require(!row.empty() && row.size() % 2 == 1, ErrorCode::ValidationError,
		        "each displacement row needs an odd coefficient count (modes -K..K)");
	DomainFamily f;
	f.modes = std::move(table);
	f.jorder = jorder;
	return f;
}

// Conformal map of the unit disk onto the slice domain, normalized so the
// derivative at the center is real positive. Exact identity when the slice
// does not move the circle.
inline DiskMap riemann_map_family(const DomainFamily& fam, double lam, std::size_t M) {
	std::vector<Cx> bnd(M);
	double dmax = 0;
	for (std::size_t j = 0; j < M; ++j) {
		double s = 2 * PI * (double)j / (double)M;
		bnd[j] = fam.boundary(s, lam);
		dmax = std::max(dmax, std::abs(bnd[j] - std::polar(1.0, s)));
	}
	if (dmax < 1e-14) return identity_disk_map();
	DiskMap map = theodorsen(bnd);
	map.normalize_rotation();
	return map;
}

// Problem data for the sweep. Boundary generators take the curve parameter s
// of Gamma(e^{is}, lambda) and lambda; area generators take the physical
// point on the slice domain. Side conditions are anchored on the reference
// domain and transported with the deformation. The d-prefixed generators are
// optional analytic lambda derivatives; absent ones mean that piece of the
// data does not depend on lambda.
struct FamilyProblem {
	DomainFamily domains;
	std::size_t nr = 40, nth = 128;
	SolveOptions options;

	std::function<Cx(double, double)> l;
	std::function<double(double, double)> gamma;
	std::function<Cx(Cx, double)> A, B, F;

	std::vector<Cx> interior_pins;
	std::vector<std::function<Cx(double)>> interior_values;
	std::vector<double> boundary_pins;
	std::vector<std::function<double(double)>> boundary_values;

	std::function<Cx(double, double)> dl;
	std::function<double(double, double)> dgamma;
	std::function<Cx(Cx, double)> dA, dB, dF;
	std::vector<std::function<Cx(double)>> interior_dvalues;
	std::vector<std::function<double(double)>> boundary_dvalues;

	void validate() const {
		require(l && gamma, ErrorCode::ValidationError,
		        "family needs boundary direction and data generators");
		require(interior_values.size() == interior_pins.size() &&
		            boundary_values.size() == boundary_pins.size(),
		        ErrorCode::ValidationError, "each pin needs a target generator");
	}
};

// One solved slice in both frames: the disk-frame solution and its pullback
// to the reference domain.
struct FamilySlice {
	double lambda = 0;
	DiskMap map;
	DiskBVP::Solution sol;
	int index = 0;
	std::vector<Cx> field;    // pullback at the reference grid nodes
	std::vector<Cx> boundary; // pullback at the reference curve parameters
};

inline FamilySlice solve_family_slice(const FamilyProblem& fp, const PolarGrid& g, double lam) {
	fp.validate();
	std::size_t N = g.size(), M = g.nth;
	FamilySlice out;
	out.lambda = lam;
	out.map = fp.domains.moving() ? riemann_map_family(fp.domains, lam, M) : identity_disk_map();
	bool id = out.map.identity();

	std::vector<Cx> lv(M);
	std::vector<double> gv(M);
	for (std::size_t j = 0; j < M; ++j) {
		double s = id ? g.theta[j] : out.map.source_param(g.theta[j]);
		lv[j] = fp.l(s, lam);
		gv[j] = fp.gamma(s, lam);
	}

	std::vector<Cx> Av, Bv, Fv;
	auto transplant = [&](const std::function<Cx(Cx, double)>& gen, std::vector<Cx>& dst) {
		if (!gen) return;
		dst.resize(N);
		for (std::size_t i = 0; i < g.nr; ++i)
			for (std::size_t j = 0; j < g.nth; ++j) {
				Cx rho = g.point(i, j);
				dst[g.idx(i, j)] = id ? gen(rho, lam)
				                      : std::conj(out.map.deriv(rho)) * gen(out.map.eval(rho), lam);
			}
	};
	transplant(fp.A, Av);
	transplant(fp.B, Bv);
	transplant(fp.F, Fv);

	std::vector<InteriorPin> ipins;
	for (std::size_t r = 0; r < fp.interior_pins.size(); ++r) {
		Cx zr = fp.interior_pins[r];
		Cx rho = id ? zr : out.map.invert(fp.domains.interior(zr, lam), zr);
		ipins.push_back({rho, fp.interior_values[r](lam)});
	}
	std::vector<BoundaryPin> bpins;
	for (std::size_t r = 0; r < fp.boundary_pins.size(); ++r) {
		double s = fp.boundary_pins[r];
		double th = s;
		if (!id)
			th = std::arg(out.map.invert(fp.domains.boundary(s, lam), std::polar(1.0, s)));
		bpins.push_back({th, fp.boundary_values[r](lam)});
	}

	DiskBVP bvp(g, std::move(Av), std::move(Bv), std::move(Fv), std::move(lv), std::move(gv),
	            fp.options);
	out.index = bvp.index();
	out.sol = bvp.solve(ipins, bpins);

	if (id) {
		out.field = out.sol.w;
		out.boundary = out.sol.trace;
	} else {
		FieldInterp itp(g, out.sol.w);
		out.field.resize(N);
		for (std::size_t i = 0; i < g.nr; ++i)
			for (std::size_t j = 0; j < g.nth; ++j) {
				Cx z = g.point(i, j);
				out.field[g.idx(i, j)] = itp(out.map.invert(fp.domains.interior(z, lam), z));
			}
		out.boundary.resize(M);
		for (std::size_t j = 0; j < M; ++j) {
			Cx rho = out.map.invert(fp.domains.boundary(g.theta[j], lam), std::polar(1.0, g.theta[j]));
			out.boundary[j] = fourier_eval(out.sol.trace, std::arg(rho));
		}
	}
	return out;
}

struct SliceResult {
	double lambda = 0;
	bool ok = false;
	std::string error;
	int index = 0;
	double relres = 0;
	bool feasible = true;
	double sup = 0;
	HolderEstimate holder;
	std::vector<Cx> field;
	std::vector<Cx> boundary;
	std::vector<Cx> lattice;
};

struct SweepReport {
	double mu = 0.5;
	double dlam = 0;
	std::vector<SliceResult> slices;
	std::vector<Cx> lattice_points;
	std::vector<double> moduli; // sup difference of consecutive pullbacks, -1 if unavailable
	bool index_constant = true;
	bool all_ok = true;
};

// Solve every slice and compare neighbours on the reference domain. Slice
// failures are recorded, not rethrown, so one bad slice does not void the
// rest of the table.
inline SweepReport sweep(const FamilyProblem& fp, const std::vector<double>& lambdas,
                         double mu = 0.5) {
	fp.validate();
	require(lambdas.size() >= 2, ErrorCode::ValidationError, "sweep needs at least two slices");
	PolarGrid g(0.0, fp.nr, fp.nth);
	fp.domains.check_embedding(g, lambdas);

	SweepReport rep;
	rep.mu = mu;
	rep.dlam = lambdas[1] - lambdas[0];
	double minsep = 2 * PI / (double)fp.nth;
	std::size_t rstride = std::max<std::size_t>(1, fp.nr / 8);
	std::size_t astride = std::max<std::size_t>(1, fp.nth / 16);

	for (double lam : lambdas) {
		SliceResult sr;
		sr.lambda = lam;
		try {
			FamilySlice sl = solve_family_slice(fp, g, lam);
			sr.ok = true;
			sr.index = sl.index;
			sr.relres = sl.sol.relres;
			sr.feasible = sl.sol.feasible;
			sr.field = std::move(sl.field);
			sr.boundary = std::move(sl.boundary);
			for (auto& v : sr.field) sr.sup = std::max(sr.sup, std::abs(v));
			std::vector<Cx> pts;
			holder_lattice(g, sr.field, sr.boundary, rstride, astride, sr.lattice, pts);
			sr.holder = holder_norm_estimate(sr.lattice, pts, mu, minsep);
			if (rep.lattice_points.empty()) rep.lattice_points = std::move(pts);
		} catch (const Error& e) {
			sr.error = e.what();
			rep.all_ok = false;
		}
		rep.slices.push_back(std::move(sr));
	}

	for (std::size_t i = 0; i + 1 < rep.slices.size(); ++i) {
		auto &a = rep.slices[i], &b = rep.slices[i + 1];
		if (!a.ok || !b.ok) {
			rep.moduli.push_back(-1);
			continue;
		}
		double m = 0;
		for (std::size_t p = 0; p < a.field.size(); ++p)
			m = std::max(m, std::abs(b.field[p] - a.field[p]));
		for (std::size_t p = 0; p < a.boundary.size(); ++p)
			m = std::max(m, std::abs(b.boundary[p] - a.boundary[p]));
		rep.moduli.push_back(m);
		if (b.index != a.index) rep.index_constant = false;
	}
	return rep;
}

// Aggregated regularity evidence across sweep refinements:
//   (a) the consecutive-slice moduli shrink linearly with the grid step,
//   (b) the Hoelder(mu) norms stay within a fixed ratio across lambda,
//   (c) the interpolation bound |Dw|_alpha <= C |w|_mu |Dw|_0^eps holds with
//       a stable constant, alpha = mu/2 and eps = 0.4.
// Pairs whose modulus breaks the linear trend by more than a factor of ten
// against the median are flagged; a data jump in the family shows up there.
struct FamilyVerdict {
	std::vector<double> modulus_constants;
	double order = 0;
	bool trivially_constant = false;
	bool modulus_first_order = false;
	double holder_ratio = 0;
	bool holder_uniform = false;
	double interp_ratio = 0;
	bool interpolation_stable = false;
	std::vector<std::size_t> flagged;
	bool index_constant = true;
	bool all_ok = true;
};

inline FamilyVerdict continuity_diagnostics(const std::vector<SweepReport>& refinements,
                                            double ratio_bound = 1.25, double order_min = 0.9) {
	require(!refinements.empty(), ErrorCode::ValidationError, "no sweep reports given");
	FamilyVerdict v;

	double maxmod_all = 0;
	std::vector<double> logm, logd;
	for (auto& rep : refinements) {
		v.index_constant = v.index_constant && rep.index_constant;
		v.all_ok = v.all_ok && rep.all_ok;
		double mm = 0;
		for (double m : rep.moduli)
			if (m >= 0) mm = std::max(mm, m);
		v.modulus_constants.push_back(mm / rep.dlam);
		maxmod_all = std::max(maxmod_all, mm);
		if (mm > 1e-12) {
			logm.push_back(std::log(mm));
			logd.push_back(std::log(rep.dlam));
		}
	}
	v.trivially_constant = maxmod_all <= 1e-12;

	if (logm.size() >= 2) {
		double n = (double)logm.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
		for (std::size_t i = 0; i < logm.size(); ++i) {
			sx += logd[i];
			sy += logm[i];
			sxx += logd[i] * logd[i];
			sxy += logd[i] * logm[i];
		}
		double den = n * sxx - sx * sx;
		v.order = den != 0 ? (n * sxy - sx * sy) / den : 0;
	}
	bool cstable = true;
	for (std::size_t i = 0; i + 1 < v.modulus_constants.size(); ++i)
		if (v.modulus_constants[i] > 1e-12)
			cstable = cstable && v.modulus_constants[i + 1] <= ratio_bound * v.modulus_constants[i];
	v.modulus_first_order = v.trivially_constant || (v.order >= order_min && cstable);

	const SweepReport& fine = refinements.back();
	double hmin = 0, hmax = 0;
	bool first = true;
	for (auto& s : fine.slices) {
		if (!s.ok) continue;
		double h = s.holder.norm();
		hmin = first ? h : std::min(hmin, h);
		hmax = first ? h : std::max(hmax, h);
		first = false;
	}
	v.holder_ratio = hmin > 0 ? hmax / hmin : (hmax == 0 ? 1.0 : 1e300);
	v.holder_uniform = v.holder_ratio <= ratio_bound;

	// interpolation surrogate on consecutive differences of the lattice values
	double alpha = fine.mu / 2, eps = 0.4, cmin = 0, cmax = 0;
	bool cfirst = true;
	double minsep = fine.lattice_points.size() > 1 ? 2 * PI / (double)fine.slices[0].boundary.size()
	                                               : 1.0;
	for (std::size_t i = 0; i + 1 < fine.slices.size(); ++i) {
		auto &a = fine.slices[i], &b = fine.slices[i + 1];
		if (!a.ok || !b.ok) continue;
		std::vector<Cx> diff(a.lattice.size());
		double dsup = 0;
		for (std::size_t p = 0; p < diff.size(); ++p) {
			diff[p] = b.lattice[p] - a.lattice[p];
			dsup = std::max(dsup, std::abs(diff[p]));
		}
		if (dsup < 1e-12) continue;
		auto de = holder_norm_estimate(diff, fine.lattice_points, alpha, minsep);
		double wmu = std::max(a.holder.norm(), b.holder.norm());
		if (wmu <= 0) continue;
		double c = de.seminorm / (wmu * std::pow(dsup, eps));
		cmin = cfirst ? c : std::min(cmin, c);
		cmax = cfirst ? c : std::max(cmax, c);
		cfirst = false;
	}
	v.interp_ratio = cfirst ? 1.0 : (cmin > 0 ? cmax / cmin : 1e300);
	v.interpolation_stable = v.interp_ratio <= 3.0;

	std::vector<double> good;
	for (double m : fine.moduli)
		if (m >= 0) good.push_back(m);
	if (good.size() >= 3) {
		std::vector<double> sorted = good;
		std::sort(sorted.begin(), sorted.end());
		double med = sorted[sorted.size() / 2];
		for (std::size_t i = 0; i < fine.moduli.size(); ++i) {
			double m = fine.moduli[i];
			if (m < 0) continue;
			bool bad = med > 1e-12 ? m > 10 * med : m > 1e-10;
			if (bad) v.flagged.push_back(i);
		}
	}
	return v;
}

// Compare difference quotients of the sweep against the lambda derivative at
// lam0. With analytic data derivatives on a fixed domain the derivative
// solves the linearized problem (same operator and index, differentiated
// data); otherwise a tight central quotient of the pipeline stands in for it.
struct DerivativeCheck {
	double lam0 = 0;
	bool structural = false;
	std::vector<double> steps, residuals;
	double order = 0;
	std::vector<Cx> reference;
};

inline DerivativeCheck lambda_derivative_check(const FamilyProblem& fp, double lam0,
                                               const std::vector<double>& steps) {
	fp.validate();
	require(!steps.empty(), ErrorCode::ValidationError, "no difference steps given");
	PolarGrid g(0.0, fp.nr, fp.nth);
	std::size_t N = g.size(), M = g.nth;

	DerivativeCheck out;
	out.lam0 = lam0;
	out.structural = !fp.domains.moving() && (bool)fp.dgamma;

	FamilySlice base = solve_family_slice(fp, g, lam0);

	if (out.structural) {
		require(fp.interior_dvalues.empty() ||
		            fp.interior_dvalues.size() == fp.interior_pins.size(),
		        ErrorCode::ValidationError, "interior pin derivative count");
		require(fp.boundary_dvalues.empty() ||
		            fp.boundary_dvalues.size() == fp.boundary_pins.size(),
		        ErrorCode::ValidationError, "boundary pin derivative count");

		std::vector<Cx> lv(M);
		std::vector<double> g2(M);
		for (std::size_t j = 0; j < M; ++j) {
			double s = g.theta[j];
			lv[j] = fp.l(s, lam0);
			g2[j] = fp.dgamma(s, lam0);
			if (fp.dl) g2[j] -= (std::conj(fp.dl(s, lam0)) * base.sol.trace[j]).real();
		}
		std::vector<Cx> Av, Bv;
		auto fill = [&](const std::function<Cx(Cx, double)>& gen, std::vector<Cx>& dst) {
			if (!gen) return;
			dst.resize(N);
			for (std::size_t i = 0; i < g.nr; ++i)
				for (std::size_t j = 0; j < g.nth; ++j) dst[g.idx(i, j)] = gen(g.point(i, j), lam0);
		};
		fill(fp.A, Av);
		fill(fp.B, Bv);
		std::vector<Cx> F2(N, Cx(0));
		bool haveF2 = (bool)fp.dF || (bool)fp.dA || (bool)fp.dB;
		if (haveF2)
			for (std::size_t i = 0; i < g.nr; ++i)
				for (std::size_t j = 0; j < g.nth; ++j) {
					std::size_t p = g.idx(i, j);
					Cx z = g.point(i, j);
					Cx acc = fp.dF ? fp.dF(z, lam0) : Cx(0);
					if (fp.dA) acc -= fp.dA(z, lam0) * base.sol.w[p];
					if (fp.dB) acc -= fp.dB(z, lam0) * std::conj(base.sol.w[p]);
					F2[p] = acc;
				}
		else
			F2.clear();

		std::vector<InteriorPin> ipins;
		for (std::size_t r = 0; r < fp.interior_pins.size(); ++r)
			ipins.push_back({fp.interior_pins[r],
			                 fp.interior_dvalues.empty() ? Cx(0) : fp.interior_dvalues[r](lam0)});
		std::vector<BoundaryPin> bpins;
		for (std::size_t r = 0; r < fp.boundary_pins.size(); ++r) {
			double s = fp.boundary_pins[r];
			double c = fp.boundary_dvalues.empty() ? 0.0 : fp.boundary_dvalues[r](lam0);
			if (fp.dl) {
				Cx tr = fourier_eval(base.sol.trace, s);
				c -= (std::conj(fp.dl(s, lam0)) * tr).imag();
			}
			bpins.push_back({s, c});
		}

		DiskBVP lin(g, std::move(Av), std::move(Bv), std::move(F2), std::move(lv), std::move(g2),
		            fp.options);
		out.reference = lin.solve(ipins, bpins).w;
	} else {
		double h = 1e-5;
		FamilySlice up = solve_family_slice(fp, g, lam0 + h);
		FamilySlice dn = solve_family_slice(fp, g, lam0 - h);
		out.reference.resize(N);
		for (std::size_t p = 0; p < N; ++p)
			out.reference[p] = (up.field[p] - dn.field[p]) / (2 * h);
	}

	for (double d : steps) {
		require(d > 0, ErrorCode::ValidationError, "difference steps must be positive");
		FamilySlice sl = solve_family_slice(fp, g, lam0 + d);
		double r = 0;
		for (std::size_t p = 0; p < N; ++p)
			r = std::max(r, std::abs((sl.field[p] - base.field[p]) / d - out.reference[p]));
		out.steps.push_back(d);
		out.residuals.push_back(r);
	}

	if (out.steps.size() >= 2) {
		double n = (double)out.steps.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
		bool usable = true;
		for (std::size_t i = 0; i < out.steps.size(); ++i) {
			if (out.residuals[i] <= 0) usable = false;
		}
		if (usable) {
			for (std::size_t i = 0; i < out.steps.size(); ++i) {
				double lx = std::log(out.steps[i]), ly = std::log(out.residuals[i]);
				sx += lx;
				sy += ly;
				sxx += lx * lx;
				sxy += lx * ly;
			}
			double den = n * sxx - sx * sx;
			out.order = den != 0 ? (n * sxy - sx * sy) / den : 0;
		}
	}
	return out;
}

// Uniform lambda grid on [0, 1]; 11 -> 21 -> 41 points halve the step.
inline std::vector<double> lambda_grid(std::size_t npoints) {
	require(npoints >= 2, ErrorCode::ValidationError, "lambda grid needs at least two points");
	std::vector<double> out(npoints);
	for (std::size_t i = 0; i < npoints; ++i)
		out[i] = (double)i / (double)(npoints - 1);
	return out;
}

} // namespace rh
