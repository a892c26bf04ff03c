#pragma once

// Reduction of second order elliptic boundary value problems with oblique
// boundary conditions to the first order boundary problem solved by DiskBVP
// and SieBVP.  The operator
//
//	L u = a u_xx + 2 b u_xy + c u_yy + d u_x + e u_y = f
//
// with uniformly elliptic principal part is flattened by an isothermal
// coordinate chart psi: the chart satisfies psi_zbar = -q psi_z for the
// Beltrami coefficient q built from a, b, c, and in the new coordinate the
// function w = u_x - i u_y of the transplanted potential obeys
//
//	dw/dzbar + A w + B conj(w) = F,    B = conj(A),
//
// with A, F assembled from the chart derivatives and the lower order
// coefficients.  The oblique condition du/dUpsilon = gamma becomes
// Re[conj(l) w] = gamma for a unimodular l whose winding equals the winding
// of conj(Upsilon); the chart does not change that index.
//
// The chart is produced in two stages: tau = z + T phi with the Neumann
// series phi = -q(1 + Pi phi) solves the Beltrami equation on the disk, then
// the conformal deformation left by tau is removed with a Theodorsen map, so
// psi sends the disk onto the disk.  For q identically zero the chart is the
// identity and the reduction is exact; that is also the only chart supported
// on multiply connected domains.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "calculus.hpp"
#include "conformal.hpp"
#include "curve.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "grid.hpp"
#include "threads.hpp"
#include "tops.hpp"

namespace rh {

// Coefficient fields of L, sampled on the area grid.  d, e, f may be left
// empty when the corresponding terms vanish.
struct EllipticCoefficients {
	std::vector<double> a, b, c;
	std::vector<double> d, e;
	std::vector<double> f;
};

// Boundary data du/dUpsilon = gamma, one entry per boundary curve in the
// grid's stored orientation.  Upsilon is the direction field written as a
// complex number xi + i eta and need not be normalized.
struct ObliqueBC {
	std::vector<std::vector<Cx>> Upsilon;
	std::vector<std::vector<double>> gamma;
};

// Output of the reduction: data for the first order problem in chart
// coordinates, ready for DiskBVP / SieBVP.  index is the boundary winding of
// the direction field l.
struct FirstOrderProblem {
	std::vector<Cx> A, B, F;
	std::vector<std::vector<Cx>> l;
	std::vector<std::vector<double>> gamma;
	int index = 0;
};

inline void check_coefficient_sizes(const PolarGrid& g, const EllipticCoefficients& co) {
	std::size_t N = g.nr * g.nth;
	require(co.a.size() == N && co.b.size() == N && co.c.size() == N,
	        ErrorCode::ValidationError, "principal coefficient fields must cover the grid");
	for (const auto* v : {&co.d, &co.e, &co.f})
		require(v->empty() || v->size() == N,
		        ErrorCode::ValidationError, "lower order coefficient field has the wrong size");
}

// q = (a - c + 2ib) / (a + c + 2 sqrt(ac - b^2)); the ellipticity condition
// ac - b^2 > 0 guarantees |q| < 1.  min_discriminant and max_modulus report
// how close the problem gets to degenerating.
inline std::vector<Cx> beltrami_coefficient(const PolarGrid& g, const EllipticCoefficients& co,
                                            double* min_discriminant = nullptr,
                                            double* max_modulus = nullptr) {
	check_coefficient_sizes(g, co);
	std::size_t N = g.nr * g.nth;
	std::vector<Cx> q(N);
	double dmin = std::numeric_limits<double>::max(), qmax = 0;
	for (std::size_t p = 0; p < N; ++p) {
		double disc = co.a[p] * co.c[p] - co.b[p] * co.b[p];
		require(disc > 0 && co.a[p] > 0, ErrorCode::EllipticityViolated,
		        "principal part is not uniformly elliptic");
		dmin = std::min(dmin, disc);
		q[p] = Cx(co.a[p] - co.c[p], 2 * co.b[p]) / (co.a[p] + co.c[p] + 2 * std::sqrt(disc));
		qmax = std::max(qmax, std::abs(q[p]));
	}
	if (min_discriminant) *min_discriminant = dmin;
	if (max_modulus) *max_modulus = qmax;
	return q;
}

struct ChartOptions {
	double neumann_tol = 1e-13;
	int neumann_maxit = 200;
	double theodorsen_tol = 1e-13;
	double invert_tol = 1e-13;
};

// Isothermal chart psi of the unit disk onto itself with psi_zbar = -q psi_z
// and positive Jacobian, split as psi = Phi^{-1} o tau.  Finite difference
// residuals of both stages are kept for diagnostics.  Off grid evaluation
// goes through Fourier-barycentric interpolation of tau and a quasiconformal
// Newton step for the inverse.
class IsothermalChart {
public:
	IsothermalChart(const PolarGrid& grid, std::vector<Cx> q, ChartOptions opt = {})
	    : g_(&grid), q_(std::move(q)), opt_(opt) {
		std::size_t N = g_->nr * g_->nth;
		require(q_.size() == N, ErrorCode::ValidationError, "Beltrami field must cover the grid");
		double qsup = 0;
		for (const Cx& v : q_) qsup = std::max(qsup, std::abs(v));
		qmax_ = qsup;
		if (qsup < 1e-15) { build_trivial(); return; }
		require(g_->is_disk(), ErrorCode::ValidationError,
		        "isothermal charts are only built on the disk");
		require(qsup <= 0.8, ErrorCode::ValidationError,
		        "Beltrami coefficient too close to degeneracy for the series chart");
		build();
	}

	bool trivial() const { return trivial_; }
	const PolarGrid& grid() const { return *g_; }
	const std::vector<Cx>& q() const { return q_; }
	const std::vector<Cx>& psi() const { return psi_; }
	const std::vector<Cx>& psi_z() const { return psiz_; }
	const std::vector<Cx>& psi_zbar() const { return psizb_; }
	const std::vector<double>& jacobian() const { return jac_; }
	const DiskMap& target() const { return map_; }
	double beltrami_residual() const { return bres_; }
	double chart_residual() const { return cres_; }
	double q_modulus() const { return qmax_; }
	int iterations() const { return iters_; }

	Cx forward(Cx z) const {
		if (trivial_) return z;
		return map_.invert((*itp_tau_)(z), z, opt_.invert_tol);
	}

	// Newton on tau with the quasiconformal update; the linearization of tau
	// as a map of R^2 inverts as (conj(tau_z) r - tau_zbar conj(r)) / J.
	Cx inverse(Cx rho) const {
		if (trivial_) return rho;
		Cx target = map_.eval(rho);
		Cx z = rho;
		for (int it = 0; it < 60; ++it) {
			Cx r = target - (*itp_tau_)(z);
			Cx tz = (*itp_tauz_)(z), tzb = (*itp_tauzb_)(z);
			double J = std::norm(tz) - std::norm(tzb);
			require(J > 1e-14, ErrorCode::DegenerateEmbedding,
			        "chart Jacobian vanished during inversion");
			Cx prev = z;
			z += (std::conj(tz) * r - tzb * std::conj(r)) / J;
			if (std::abs(z) > 1) z /= std::abs(z);
			if (std::abs(z - prev) <= opt_.invert_tol) {
				require(std::abs(target - (*itp_tau_)(z)) <= 1e-3 * (1 + std::abs(target)),
				        ErrorCode::MapIterationDiverged, "target lies outside the chart image");
				return z;
			}
		}
		fail(ErrorCode::MapIterationDiverged, "chart inversion did not converge");
	}

	// Chart derivatives at a source point z whose image rho = forward(z) is
	// already known.
	Cx psi_z_at(Cx z, Cx rho) const {
		return trivial_ ? Cx(1) : (*itp_tauz_)(z) / map_.deriv(rho);
	}
	Cx psi_zbar_at(Cx z, Cx rho) const {
		return trivial_ ? Cx(0) : (*itp_tauzb_)(z) / map_.deriv(rho);
	}

	// Boundary parameter theta on the source circle mapping to the given
	// angle on the image circle.
	double boundary_param(double disk_angle) const {
		return trivial_ ? disk_angle : map_.source_param(disk_angle);
	}

	Cx tau_z_boundary(double theta) const {
		return trivial_ ? Cx(1) : fourier_eval(tz_row_, theta);
	}
	Cx q_boundary(double theta) const {
		return trivial_ ? Cx(0) : fourier_eval(qb_row_, theta);
	}

private:
	const PolarGrid* g_;
	std::vector<Cx> q_;
	ChartOptions opt_;
	bool trivial_ = false;
	double qmax_ = 0, bres_ = 0, cres_ = 0;
	int iters_ = 0;
	std::vector<Cx> tau_, tauz_, tauzb_, psi_, psiz_, psizb_;
	std::vector<double> jac_;
	DiskMap map_;
	std::vector<Cx> tz_row_, qb_row_;  // boundary rows of tau_z and q
	std::unique_ptr<FieldInterp> itp_tau_, itp_tauz_, itp_tauzb_;

	void build_trivial() {
		std::size_t N = g_->nr * g_->nth;
		trivial_ = true;
		tau_.resize(N);
		for (std::size_t i = 0; i < g_->nr; ++i)
			for (std::size_t j = 0; j < g_->nth; ++j)
				tau_[g_->idx(i, j)] = g_->point(i, j);
		tauz_.assign(N, Cx(1));
		tauzb_.assign(N, Cx(0));
		psi_ = tau_;
		psiz_ = tauz_;
		psizb_ = tauzb_;
		jac_.assign(N, 1.0);
		map_ = identity_disk_map();
	}

	void build() {
		std::size_t N = g_->nr * g_->nth, M = g_->nth;
		ModeOps ops(*g_);

		std::vector<Cx> phi(N), next(N);
		for (std::size_t p = 0; p < N; ++p) phi[p] = -q_[p];
		bool converged = false;
		for (iters_ = 1; iters_ <= opt_.neumann_maxit; ++iters_) {
			auto it = ops.apply(phi, true, false);
			double change = 0;
			for (std::size_t p = 0; p < N; ++p) {
				next[p] = -q_[p] * (1.0 + it.Pi[p]);
				change = std::max(change, std::abs(next[p] - phi[p]));
			}
			phi.swap(next);
			if (change <= opt_.neumann_tol) { converged = true; break; }
			require(change < 1e8, ErrorCode::IterationDiverged, "Beltrami series blew up");
		}
		require(converged, ErrorCode::IterationDiverged, "Beltrami series did not converge");

		auto res = ops.apply(phi, true, true);
		tau_.resize(N);
		tauz_.resize(N);
		tauzb_ = phi;
		for (std::size_t i = 0; i < g_->nr; ++i)
			for (std::size_t j = 0; j < g_->nth; ++j) {
				std::size_t p = g_->idx(i, j);
				tau_[p] = g_->point(i, j) + res.T[p];
				tauz_[p] = 1.0 + res.Pi[p];
			}
		for (std::size_t p = 0; p < N; ++p)
			require(std::norm(tauz_[p]) - std::norm(tauzb_[p]) > 1e-12,
			        ErrorCode::DegenerateEmbedding, "intermediate chart folds over");

		auto db = dbar_field(*g_, tau_);
		auto dz = dz_field(*g_, tau_);
		for (std::size_t p = 0; p < N; ++p)
			bres_ = std::max(bres_, std::abs(db[p] + q_[p] * dz[p]));

		std::vector<Cx> image(M);
		for (std::size_t j = 0; j < M; ++j)
			image[j] = std::polar(1.0, g_->theta[j]) + res.outer[j];
		map_ = theodorsen(image, opt_.theodorsen_tol);

		itp_tau_ = std::make_unique<FieldInterp>(*g_, tau_);
		itp_tauz_ = std::make_unique<FieldInterp>(*g_, tauz_);
		itp_tauzb_ = std::make_unique<FieldInterp>(*g_, tauzb_);

		tz_row_.resize(M);
		qb_row_.resize(M);
		FieldInterp itp_q(*g_, q_);
		for (std::size_t j = 0; j < M; ++j) {
			Cx zb = std::polar(1.0, g_->theta[j]);
			tz_row_[j] = (*itp_tauz_)(zb);
			qb_row_[j] = itp_q(zb);
		}

		psi_.resize(N);
		psiz_.resize(N);
		psizb_.resize(N);
		jac_.resize(N);
		std::vector<std::string> errs(g_->nr);
		parallel_for(g_->nr, [&](std::size_t i) {
			try {
				for (std::size_t j = 0; j < g_->nth; ++j) {
					std::size_t p = g_->idx(i, j);
					Cx rho = map_.invert(tau_[p], g_->point(i, j), opt_.invert_tol);
					Cx dPhi = map_.deriv(rho);
					psi_[p] = rho;
					psiz_[p] = tauz_[p] / dPhi;
					psizb_[p] = tauzb_[p] / dPhi;
					jac_[p] = std::norm(psiz_[p]) - std::norm(psizb_[p]);
				}
			} catch (const Error& e) {
				errs[i] = e.what();
			}
		});
		for (const auto& msg : errs)
			require(msg.empty(), ErrorCode::MapIterationDiverged, msg.c_str());
		for (std::size_t p = 0; p < N; ++p)
			require(jac_[p] > 0, ErrorCode::DegenerateEmbedding, "chart Jacobian is not positive");

		auto cdb = dbar_field(*g_, psi_);
		auto cdz = dz_field(*g_, psi_);
		for (std::size_t p = 0; p < N; ++p)
			cres_ = std::max(cres_, std::abs(cdb[p] + q_[p] * cdz[p]));
	}
};

inline IsothermalChart isothermal_map(const PolarGrid& g, std::vector<Cx> q, ChartOptions opt = {}) {
	return IsothermalChart(g, std::move(q), opt);
}

// Reduce L u = f with du/dUpsilon = gamma to the first order problem in
// chart coordinates.  On a domain with m holes the reduced index must exceed
// m - 1 for the solvability theory to apply; negative index is accepted only
// on the disk.
inline FirstOrderProblem oblique_to_first_order(const PolarGrid& g, const EllipticCoefficients& co,
                                                const ObliqueBC& bc, const IsothermalChart& chart) {
	check_coefficient_sizes(g, co);
	std::size_t ncurves = g.is_disk() ? 1 : 2, M = g.nth, N = g.nr * g.nth;
	std::size_t m = ncurves - 1;
	require(bc.Upsilon.size() == ncurves && bc.gamma.size() == ncurves,
	        ErrorCode::ValidationError, "boundary data must cover every curve");
	for (std::size_t c = 0; c < ncurves; ++c) {
		require(bc.Upsilon[c].size() == M && bc.gamma[c].size() == M,
		        ErrorCode::ValidationError, "boundary sample count must match the angular grid");
		for (const Cx& v : bc.Upsilon[c])
			require(std::abs(v) > 1e-12, ErrorCode::ValidationError,
			        "oblique direction field vanishes");
	}
	require(m == 0 || chart.trivial(), ErrorCode::ValidationError,
	        "nontrivial isothermal charts are only supported on the disk");
	require(&chart.grid() == &g, ErrorCode::ValidationError, "chart was built on a different grid");

	int kappa = 0;
	for (std::size_t c = 0; c < ncurves; ++c) {
		std::vector<Cx> cb(M);
		for (std::size_t j = 0; j < M; ++j) cb[j] = std::conj(bc.Upsilon[c][j]);
		kappa += field_winding(cb);
	}
	require(m == 0 || kappa > (int)m - 1, ErrorCode::IndexOutOfRange,
	        "reduced index too small for a multiply connected domain");

	FirstOrderProblem out;
	out.index = kappa;
	out.l.resize(ncurves);
	out.gamma.resize(ncurves);

	if (chart.trivial()) {
		// exact reduction: A = (d + ie)/4, B = conj(A), F = f/2
		if (!co.d.empty() || !co.e.empty()) {
			out.A.resize(N);
			out.B.resize(N);
			for (std::size_t p = 0; p < N; ++p) {
				double dv = co.d.empty() ? 0.0 : co.d[p];
				double ev = co.e.empty() ? 0.0 : co.e[p];
				out.A[p] = Cx(dv, ev) / 4.0;
				out.B[p] = std::conj(out.A[p]);
			}
		}
		if (!co.f.empty()) {
			out.F.resize(N);
			for (std::size_t p = 0; p < N; ++p) out.F[p] = co.f[p] / 2.0;
		}
		for (std::size_t c = 0; c < ncurves; ++c) {
			out.l[c].resize(M);
			out.gamma[c].resize(M);
			for (std::size_t j = 0; j < M; ++j) {
				Cx lt = std::conj(bc.Upsilon[c][j]);
				double nm = std::abs(lt);
				out.l[c][j] = lt / nm;
				out.gamma[c][j] = bc.gamma[c][j] / nm;
			}
		}
	} else {
		// general chart: pull every image node back to its source point,
		// interpolate the coefficients there, and assemble
		//   Lambda = 2 |psi_z|^2 (s (1 + |q|^2) - 2 Re(conj(alpha) q)),
		//   A = ([-2 s q_z + conj(alpha)(q q_z - q_zbar)]
		//        + [(d + ie) - (d - ie) q]) psi_z / Lambda,
		//   B = conj(A),  F = 2 f / Lambda,
		// with s = a + c and alpha = a - c + 2ib.
		const std::vector<Cx>& q = chart.q();
		auto dqz = dz_field(g, q);
		auto dqb = dbar_field(g, q);
		auto cpx = [&](const std::vector<double>& v) {
			std::vector<Cx> r(N);
			for (std::size_t p = 0; p < N; ++p) r[p] = v.empty() ? 0.0 : v[p];
			return r;
		};
		FieldInterp ia(g, cpx(co.a)), ib(g, cpx(co.b)), ic(g, cpx(co.c));
		FieldInterp id(g, cpx(co.d)), ie(g, cpx(co.e)), ifr(g, cpx(co.f));
		FieldInterp iq(g, q), iqz(g, dqz), iqb(g, dqb);

		out.A.resize(N);
		out.B.resize(N);
		out.F.resize(N);
		std::vector<std::string> errs(g.nr);
		parallel_for(g.nr, [&](std::size_t i) {
			try {
				for (std::size_t j = 0; j < g.nth; ++j) {
					std::size_t p = g.idx(i, j);
					Cx rho = g.point(i, j);
					Cx z = chart.inverse(rho);
					double av = ia(z).real(), bv = ib(z).real(), cv = ic(z).real();
					double dv = id(z).real(), ev = ie(z).real(), fv = ifr(z).real();
					Cx qv = iq(z), qzv = iqz(z), qbv = iqb(z);
					double s = av + cv;
					Cx alpha(av - cv, 2 * bv);
					Cx psiz = chart.psi_z_at(z, rho);
					double lam = 2 * std::norm(psiz) *
					             (s * (1 + std::norm(qv)) - 2 * (std::conj(alpha) * qv).real());
					require(lam > 1e-12, ErrorCode::EllipticityViolated,
					        "transplanted operator lost ellipticity");
					Cx second = -2.0 * s * qzv + std::conj(alpha) * (qv * qzv - qbv);
					Cx first = Cx(dv, ev) - Cx(dv, -ev) * qv;
					out.A[p] = (second + first) * psiz / lam;
					out.B[p] = std::conj(out.A[p]);
					out.F[p] = 2.0 * fv / lam;
				}
			} catch (const Error& e) {
				errs[i] = e.what();
			}
		});
		for (const auto& msg : errs)
			require(msg.empty(), ErrorCode::MapIterationDiverged, msg.c_str());

		// boundary: l = conj(psi_z) (conj(Upsilon) - conj(q) Upsilon) at the
		// source parameter of each image angle, then normalized
		std::vector<Cx> gamc(M);
		for (std::size_t j = 0; j < M; ++j) gamc[j] = bc.gamma[0][j];
		out.l[0].resize(M);
		out.gamma[0].resize(M);
		for (std::size_t k = 0; k < M; ++k) {
			double thk = g.theta[k];
			double th = chart.boundary_param(thk);
			Cx Uv = fourier_eval(bc.Upsilon[0], th);
			double gv = fourier_eval(gamc, th).real();
			Cx qv = chart.q_boundary(th);
			Cx psiz = chart.tau_z_boundary(th) / chart.target().deriv(std::polar(1.0, thk));
			Cx lt = std::conj(psiz) * (std::conj(Uv) - std::conj(qv) * Uv);
			double nm = std::abs(lt);
			require(nm > 1e-12, ErrorCode::ValidationError,
			        "pushed boundary direction degenerates");
			out.l[0][k] = lt / nm;
			out.gamma[0][k] = gv / nm;
		}
	}

	int n = 0;
	for (std::size_t c = 0; c < ncurves; ++c) n += field_winding(out.l[c]);
	require(n == kappa, ErrorCode::WindingMismatch,
	        "assembled direction field lost the oblique index");
	return out;
}

// Transport a solution of the reduced problem back to the source domain:
// w = wtilde(psi) psi_z + conj(wtilde(psi)) conj(psi_zbar).
inline std::vector<Cx> chart_pullback(const IsothermalChart& chart, const std::vector<Cx>& wt) {
	const PolarGrid& g = chart.grid();
	std::size_t N = g.nr * g.nth;
	require(wt.size() == N, ErrorCode::ValidationError, "field must cover the grid");
	if (chart.trivial()) return wt;
	FieldInterp itp(g, wt);
	std::vector<Cx> w(N);
	const auto& psi = chart.psi();
	const auto& pz = chart.psi_z();
	const auto& pzb = chart.psi_zbar();
	parallel_for(g.nr, [&](std::size_t i) {
		for (std::size_t j = 0; j < g.nth; ++j) {
			std::size_t p = g.idx(i, j);
			Cx wv = itp(psi[p]);
			w[p] = wv * pz[p] + std::conj(wv) * std::conj(pzb[p]);
		}
	});
	return w;
}

// Potential reconstructed from its gradient field w = u_x - i u_y.
// path_mismatch compares two independent integration path families and
// moments lists Re of the circulation of w around each hole, counter
// clockwise; a nonzero moment obstructs a single valued potential.
struct Potential {
	std::vector<double> U;
	double path_mismatch = 0;
	std::vector<double> moments;
};

inline std::vector<double> circulation_moments(const PolarGrid& g, const std::vector<Cx>& w) {
	std::vector<double> out;
	if (g.is_disk()) return out;
	std::size_t i = g.nr / 2;
	double r = g.rad.r[i], h = 2 * PI / (double)g.nth;
	Cx acc = 0;
	for (std::size_t j = 0; j < g.nth; ++j)
		acc += w[g.idx(i, j)] * Cx(0, 1) * std::polar(r, g.theta[j]);
	out.push_back((h * acc).real());
	return out;
}

// U(z) = u0 + Re INT_{z0}^{z} w dzeta.  The integral is evaluated along
// radial and angular grid lines in both orders; the sup difference of the
// two families is reported as path_mismatch.
inline Potential reconstruct_potential(const PolarGrid& g, const std::vector<Cx>& w, Cx z0,
                                       double u0, double tol = 1e-6) {
	std::size_t nr = g.nr, nth = g.nth, N = nr * nth;
	require(w.size() == N, ErrorCode::ValidationError, "field must cover the grid");
	double az = std::abs(z0);
	require(az <= 1 + 1e-9 && (g.is_disk() || az >= g.r0 - 1e-9),
	        ErrorCode::ValidationError, "anchor point outside the domain");

	Potential pot;
	pot.moments = circulation_moments(g, w);
	double scale = 1;
	for (const Cx& v : w) scale = std::max(scale, std::abs(v));
	for (double mom : pot.moments)
		require(std::abs(mom) <= tol * scale, ErrorCode::MultivaluedPotential,
		        "circulation around a hole obstructs a single valued potential");

	// radial antiderivatives R(i, j) of Re[w e^{i theta_j}] along each ray,
	// anchored to zero at the innermost radial node
	Eigen::MatrixXd Dm = g.rad.diff;
	Dm.row(0).setZero();
	Dm(0, 0) = 1.0;
	Eigen::PartialPivLU<Eigen::MatrixXd> lu(Dm);
	Eigen::MatrixXd rhs((long)nr, (long)nth);
	for (std::size_t i = 0; i < nr; ++i)
		for (std::size_t j = 0; j < nth; ++j)
			rhs((long)i, (long)j) =
			    i == 0 ? 0.0 : (w[g.idx(i, j)] * std::polar(1.0, g.theta[j])).real();
	Eigen::MatrixXd R = lu.solve(rhs);

	// angular antiderivatives G_i(theta) of Re[w i r e^{i theta}] on each
	// circle, split into a periodic part plus mean * theta
	std::vector<std::vector<double>> G(nr, std::vector<double>(nth));
	for (std::size_t i = 0; i < nr; ++i) {
		std::vector<Cx> b(nth);
		for (std::size_t j = 0; j < nth; ++j)
			b[j] = (w[g.idx(i, j)] * Cx(0, 1) * std::polar(g.rad.r[i], g.theta[j])).real();
		Cx mean = 0;
		auto anti = fourier_antideriv(b, &mean);
		for (std::size_t j = 0; j < nth; ++j)
			G[i][j] = anti[j].real() + mean.real() * g.theta[j];
	}

	std::vector<double> UA(N), UB(N);
	double mismatch = 0;
	for (std::size_t i = 0; i < nr; ++i)
		for (std::size_t j = 0; j < nth; ++j) {
			std::size_t p = g.idx(i, j);
			UA[p] = (G[0][j] - G[0][0]) + (R((long)i, (long)j) - R(0, (long)j));
			UB[p] = (R((long)i, 0) - R(0, 0)) + (G[i][j] - G[i][0]);
			mismatch = std::max(mismatch, std::abs(UA[p] - UB[p]));
		}
	pot.path_mismatch = mismatch;

	std::vector<Cx> uc(N);
	for (std::size_t p = 0; p < N; ++p) uc[p] = UA[p];
	FieldInterp itp(g, uc);
	double shift = u0 - itp(z0).real();
	pot.U.resize(N);
	for (std::size_t p = 0; p < N; ++p) pot.U[p] = UA[p] + shift;
	return pot;
}

} // namespace rh
