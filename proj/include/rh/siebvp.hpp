#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rh/calculus.hpp"
#include "rh/cauchy.hpp"
#include "rh/curve.hpp"
#include "rh/diskbvp.hpp"
#include "rh/grid.hpp"
#include "rh/linalg.hpp"
#include "rh/threads.hpp"
#include "rh/tops.hpp"

namespace rh {

// One real point condition on a boundary curve: Im[conj(l) w] = c at the
// point with stored curve parameter sigma.
struct CurvePin {
	std::size_t curve = 0;
	double sigma = 0;
	double c = 0;
};

// Differentiation matrix for the 2 pi periodic trapezoid grid with an even
// number of nodes; exact on every resolved Fourier mode.
inline Eigen::MatrixXd trig_diff_matrix(std::size_t m) {
	Eigen::MatrixXd D = Eigen::MatrixXd::Zero((long)m, (long)m);
	double h = 2 * PI / (double)m;
	for (long i = 0; i < (long)m; ++i)
		for (long j = 0; j < (long)m; ++j) {
			if (i == j) continue;
			double sg = ((i - j) & 1) ? -1.0 : 1.0;
			D(i, j) = 0.5 * sg / std::tan(0.5 * h * (double)(i - j));
		}
	return D;
}

// oint w dz along the curve in its stored orientation, by the trapezoid rule.
inline Cx curve_moment(const Curve& c, const std::vector<Cx>& w) {
	Cx s = 0;
	for (std::size_t j = 0; j < c.size(); ++j) s += w[j] * c.dz[j];
	return s * c.param_step();
}

// Boundary integral equation solver for
//   dbar w + A w = F     on the unit disk or the annulus r0 < |z| < 1,
//   Re[conj(l) w] = gamma  on each boundary circle, |l| = 1,
// with index n = winding of l over the whole boundary (domain on the left)
// and m+1 boundary curves; requires n > m-1, the always-solvable range.
//
// Any solution has boundary values w = l (gamma + i eta) for a real density
// eta. With u = e^{-T A} (so dbar u = -A u), the solution built from that
// boundary value plus the area potential factors completely:
//   w(z) = u(z) [ C(e^{T A} l (gamma + i eta))(z) + T(e^{T A} F)(z) ],
// C the boundary Cauchy integral. Taking Re[conj(l) . ] of its interior
// limit turns the boundary condition into a singular integral equation
// K eta = gamma0 where gamma0 subtracts the gamma- and F-part boundary
// values. K splits into a dominant conjugated Cauchy principal value plus
// compact pieces: the smooth kernel (e^{omega(zeta,t)} - 1)/(t - zeta) with
// omega(zeta,t) = T A(t) - T A(zeta), and the d log((tbar - zetabar)/
// (t - zeta)) remainder of rewriting the conjugated half in terms of dt.
//
// The reducing operator M = (1/2 pi) PV oint . dt/(t - zeta) composes with K
// into a second-kind system: -4 Re(M K) = I + compact. The homogeneous
// density space has dimension 2n+1; its image in solutions has dimension
// 2n+1-m (the density-to-solution map has an m-dimensional kernel). A unique
// solution is selected by point values on a set with 2 h0 + h1 = 2n+1-m real
// conditions, an odd number of them on at least m of the curves.
//
// All principal values use the subtraction rule PV oint phi dt/(t-zeta) =
// oint (phi(t) - phi(zeta)) dt/(t-zeta) + pi i phi(zeta), whose constant is
// pi i on every component under the domain-on-left orientation; the
// subtracted integrand is completed at the node by the tangential spectral
// derivative. Conjugate-coefficient problems (B != 0) are not supported on
// this route; the disk solver handles them.
//
// The discrete density space is band-limited per curve. The trapezoid PV
// rule is exact only on resolved Fourier modes, and multiplying by l shifts
// the density spectrum by the winding of l on that curve, so the unmatched
// Nyquist mode and the top |winding| mode pairs would land on the wrong
// branch of the principal value and fake extra null directions. Those
// directions are excluded from the unknown space (the operators act as the
// identity there). The null basis and the minimum-norm particular density
// come from the singular system's own SVD: composing with the reducing
// operator keeps every singular-equation solution, but on a multiply
// connected domain it can add a spurious direction (a per-curve constant
// lying both in the null space of the reducer and in the range of the
// singular operator), so the composed system is asserted as a residual
// identity instead of being inverted.
class SieBVP {
public:
	struct Solution {
		std::vector<Cx> w;                      // area grid samples
		std::vector<std::vector<Cx>> trace;     // boundary values per curve
		std::vector<std::vector<double>> eta;   // density per curve
		std::vector<Cx> w_gamma, w_eta, w_F;    // the three parts on the grid
		std::vector<std::vector<Cx>> trace_gamma, trace_eta, trace_F;
		std::vector<Cx> moments;                // oint w dz, ccw around each hole
		double fredholm_residual = 0;           // sup |(I+N) eta - rhs|
		double singular_residual = 0;           // sup |K eta - gamma0|
		double boundary_residual = 0;           // sup |Re[conj(l) w+] - gamma|
		double pde_residual = 0;                // sup |dbar w + A w - F|
		double side_residual = 0;               // worst point-condition defect
	};

	SieBVP(const PolarGrid& grid, std::vector<Cx> A, std::vector<Cx> F,
	       std::vector<std::vector<Cx>> l, std::vector<std::vector<double>> gamma,
	       SolveOptions opt = {})
	    : g_(&grid), opt_(opt), A_(std::move(A)), Fsrc_(std::move(F)), l_(std::move(l)),
	      gamma_(std::move(gamma)) {
		std::size_t M = g_->nth, N = g_->size();
		curves_.push_back(Curve::circle(Cx(0), 1.0, M, true));
		if (!g_->is_disk()) curves_.push_back(Curve::circle(Cx(0), g_->r0, M, false));
		std::size_t nc = curves_.size();
		Mb_ = nc * M;

		require(l_.size() == nc && gamma_.size() == nc, ErrorCode::ValidationError,
		        "need boundary data on every curve");
		for (std::size_t c = 0; c < nc; ++c) {
			require(l_[c].size() == M && gamma_[c].size() == M, ErrorCode::ValidationError,
			        "boundary sample count must match the angular grid");
			for (auto& v : l_[c]) {
				double mod = std::abs(v);
				require(mod > 1e-12, ErrorCode::ValidationError, "boundary direction vanishes");
				v /= mod;
			}
		}
		require(A_.empty() || A_.size() == N, ErrorCode::ValidationError, "coefficient sample count");
		require(Fsrc_.empty() || Fsrc_.size() == N, ErrorCode::ValidationError,
		        "source sample count");

		n_ = 0;
		for (std::size_t c = 0; c < nc; ++c) {
			wind_.push_back(field_winding(l_[c]));
			require(2 * std::abs(wind_.back()) + 2 < (int)M, ErrorCode::ValidationError,
			        "angular grid too coarse for the boundary winding");
			n_ += wind_.back();
		}
		require(n_ > (int)holes() - 1, ErrorCode::ValidationError,
		        "index must exceed m-1 for the boundary equation route");

		build_exponent();
		build_matrices();
		build_rhs();

		svd_.compute(Kb_, Eigen::ComputeFullU | Eigen::ComputeFullV);
		rank_ = rank_with_gap(svd_.singularValues());
	}

	int index() const { return n_; }
	std::size_t holes() const { return curves_.size() - 1; }
	std::size_t nodes() const { return Mb_; }
	const Curve& curve(std::size_t c) const { return curves_[c]; }

	// Discrete PV oint phi dt/(t - zeta) over the whole boundary.
	const Eigen::MatrixXcd& pv_matrix() const { return P_; }

	// Dominant singular block (1/4 pi)[conj(l) P l + l P conj(l)].
	Eigen::MatrixXcd dominant_block() const {
		Eigen::VectorXcd lf = flat_l();
		return (lf.conjugate().asDiagonal() * P_ * lf.asDiagonal() +
		        lf.asDiagonal() * P_ * lf.conjugate().asDiagonal()) /
		       (4 * PI);
	}

	// Compact remainder of turning the conjugated half into dt form,
	// (1/4 pi) l (conj(P) - P) conj(l); kernel d log((tbar-zetabar)/(t-zeta)).
	Eigen::MatrixXcd log_ratio_block() const {
		Eigen::VectorXcd lf = flat_l();
		return (lf.asDiagonal() * (P_.conjugate() - P_) * lf.conjugate().asDiagonal()) / (4 * PI);
	}

	// Compact block from the smooth kernel (e^{omega} - 1)/(t - zeta).
	Eigen::MatrixXd smooth_block() const {
		Eigen::VectorXcd lf = flat_l();
		return (lf.conjugate().asDiagonal() * E_ * lf.asDiagonal()).real() / (2 * PI);
	}

	// Full real singular operator K before band limiting; equals the real part
	// of the sum of the blocks above (the conjugate-coefficient block is zero
	// here).
	const Eigen::MatrixXd& singular_matrix() const { return K_; }
	// Band-limited second-kind system -4 M K + identity on the cut modes.
	const Eigen::MatrixXd& fredholm_matrix() const { return Fh_; }
	const Eigen::VectorXd& fredholm_rhs() const { return b_; }
	const std::vector<double>& gamma0() const { return gamma0_; }
	const Eigen::VectorXd& singular_values() const { return svd_.singularValues(); }

	std::size_t null_dimension() const { return Mb_ - (std::size_t)rank_; }
	std::size_t solution_dimension() const { return basis().wrank; }

	// Measured Hoelder-type bound of the compact part: max over off-diagonal
	// node pairs of |N_ij| / (h |t_j - zeta_i|^nu).
	double kernel_bound(double nu = 0.5) const {
		double h = 2 * PI / (double)g_->nth, worst = 0;
		for (std::size_t i = 0; i < Mb_; ++i)
			for (std::size_t j = 0; j < Mb_; ++j) {
				if (i == j) continue;
				double d = std::abs(node(j) - node(i));
				double kv = std::abs(Fh_((long)i, (long)j) - (i == j ? 1.0 : 0.0));
				worst = std::max(worst, kv / (h * std::pow(d, nu)));
			}
		return worst;
	}

	static void check_kernel_bound(double coarse, double fine) {
		require(fine <= 10 * coarse + 1e-12, ErrorCode::KernelBoundViolated,
		        "compact kernel bound grew under refinement");
	}

	Solution solve(const std::vector<InteriorPin>& ipins,
	               const std::vector<CurvePin>& bpins) const {
		validate_conditions(ipins, bpins);
		std::size_t dim = (std::size_t)(2 * n_ + 1);
		require(null_dimension() == dim, ErrorCode::WrongNullspaceDimension,
		        "density null space does not have dimension 2n+1");
		const Basis& hb = basis();
		std::size_t wdim = dim - holes();
		require(hb.wrank == wdim, ErrorCode::WrongNullspaceDimension,
		        "homogeneous solution space does not have dimension 2n+1-m");

		// minimum-norm least-squares particular density of the singular system
		const Eigen::VectorXd& sv = svd_.singularValues();
		Eigen::VectorXd y = svd_.matrixU().transpose() * g0b_;
		for (long i = 0; i < (long)Mb_; ++i) y(i) = i < rank_ ? y(i) / sv(i) : 0.0;
		Eigen::VectorXd eta = svd_.matrixV() * y;

		// particular solution pieces at the pin points
		std::vector<Cx> dens_part = density_from(eta, true);
		auto cc_part = cauchy_parts(dens_part);
		auto tr_part = trace_from(dens_part, true);

		// pin the homogeneous coefficients
		long rows = (long)(2 * ipins.size() + bpins.size());
		Eigen::MatrixXd Pm(rows, (long)dim);
		Eigen::VectorXd rhs(rows);
		long row = 0;
		for (const auto& pin : ipins) {
			Cx wp = eval_interior(cc_part, pin.z, true);
			for (std::size_t s = 0; s < dim; ++s) {
				Cx v = eval_interior(hb.ccs[s], pin.z, false);
				Pm(row, (long)s) = v.real();
				Pm(row + 1, (long)s) = v.imag();
			}
			rhs(row) = (pin.value - wp).real();
			rhs(row + 1) = (pin.value - wp).imag();
			row += 2;
		}
		for (const auto& pin : bpins) {
			for (std::size_t s = 0; s < dim; ++s)
				Pm(row, (long)s) = pin_value(hb.traces[s], pin).imag();
			rhs(row) = pin.c - pin_value(tr_part, pin).imag();
			++row;
		}
		Eigen::JacobiSVD<Eigen::MatrixXd> psvd(Pm, Eigen::ComputeThinU | Eigen::ComputeThinV);
		const auto& psv = psvd.singularValues();
		require(psv(0) > 0 && psv(psv.size() - 1) > 1e-10 * psv(0), ErrorCode::PinningSingular,
		        "point conditions do not determine the free constants");
		Eigen::VectorXd d = psvd.solve(rhs);
		for (std::size_t s = 0; s < dim; ++s) eta += d((long)s) * hb.etas[s];

		return assemble(eta, ipins, bpins);
	}

private:
	struct Basis {
		std::vector<Eigen::VectorXd> etas;
		std::vector<std::vector<CircleCauchy>> ccs;
		std::vector<std::vector<Cx>> traces; // flat node order
		std::size_t wrank = 0;
	};

	const PolarGrid* g_;
	SolveOptions opt_;
	std::vector<Cx> A_, Fsrc_;
	std::vector<std::vector<Cx>> l_;
	std::vector<std::vector<double>> gamma_;
	std::vector<Curve> curves_;
	std::vector<int> wind_;
	std::size_t Mb_ = 0;
	int n_ = 0;

	std::optional<ModeOps> ops_;
	std::vector<std::vector<Cx>> a_;      // trace of T A per curve
	std::vector<Cx> u_field_;             // e^{-T A} on the grid
	std::vector<Cx> TFe_;                 // T(e^{T A} F) on the grid
	std::vector<std::vector<Cx>> tfe_tr_; // its trace per curve
	std::optional<FieldInterp> u_itp_, tfe_itp_;

	Eigen::MatrixXcd P_, E_;
	Eigen::MatrixXd K_, Kb_, Fh_, Mre_, band_;
	std::vector<double> gamma0_;
	Eigen::VectorXd b_, g0b_;
	Eigen::BDCSVD<Eigen::MatrixXd> svd_;
	long rank_ = 0;
	mutable std::optional<Basis> basis_;

	std::size_t flat(std::size_t c, std::size_t j) const { return c * g_->nth + j; }
	Cx node(std::size_t f) const { return curves_[f / g_->nth].z[f % g_->nth]; }

	Eigen::VectorXcd flat_l() const {
		Eigen::VectorXcd lf((long)Mb_);
		for (std::size_t c = 0; c < curves_.size(); ++c)
			for (std::size_t j = 0; j < g_->nth; ++j) lf((long)flat(c, j)) = l_[c][j];
		return lf;
	}

	// Trace arrays from ModeOps are indexed by grid angle; curve storage runs
	// clockwise on holes, so the hole trace needs the angle reversed.
	std::vector<Cx> trace_on_curve(const std::vector<Cx>& tr, std::size_t c) const {
		std::size_t M = g_->nth;
		std::vector<Cx> out(M);
		for (std::size_t j = 0; j < M; ++j) out[j] = c == 0 ? tr[j] : tr[(M - j) % M];
		return out;
	}

	void build_exponent() {
		std::size_t N = g_->size(), nc = curves_.size();
		a_.assign(nc, std::vector<Cx>(g_->nth, Cx(0)));
		u_field_.assign(N, Cx(1));
		TFe_.assign(N, Cx(0));
		tfe_tr_.assign(nc, std::vector<Cx>(g_->nth, Cx(0)));
		if (!A_.empty() || !Fsrc_.empty()) ops_.emplace(*g_);
		std::vector<Cx> ta(N, Cx(0));
		if (!A_.empty()) {
			auto res = ops_->apply(A_, false, true);
			ta = std::move(res.T);
			for (std::size_t p = 0; p < N; ++p) u_field_[p] = std::exp(-ta[p]);
			a_[0] = trace_on_curve(res.outer, 0);
			if (nc > 1) a_[1] = trace_on_curve(res.inner, 1);
		}
		if (!Fsrc_.empty()) {
			std::vector<Cx> Fe(N);
			for (std::size_t p = 0; p < N; ++p) Fe[p] = Fsrc_[p] * std::exp(ta[p]);
			auto res = ops_->apply(Fe, false, true);
			TFe_ = std::move(res.T);
			tfe_tr_[0] = trace_on_curve(res.outer, 0);
			if (nc > 1) tfe_tr_[1] = trace_on_curve(res.inner, 1);
		}
		u_itp_.emplace(*g_, u_field_);
		tfe_itp_.emplace(*g_, TFe_);
	}

	void build_matrices() {
		std::size_t M = g_->nth, nc = curves_.size();
		double h = 2 * PI / (double)M;
		Eigen::MatrixXd D = trig_diff_matrix(M);

		P_ = Eigen::MatrixXcd::Zero((long)Mb_, (long)Mb_);
		for (std::size_t ci = 0; ci < nc; ++ci) {
			for (std::size_t i = 0; i < M; ++i) {
				long row = (long)flat(ci, i);
				Cx zeta = curves_[ci].z[i];
				Cx rowsum = 0;
				for (std::size_t cj = 0; cj < nc; ++cj)
					for (std::size_t j = 0; j < M; ++j) {
						long col = (long)flat(cj, j);
						if (col == row) continue;
						Cx q = h * curves_[cj].dz[j] / (curves_[cj].z[j] - zeta);
						rowsum += q;
						P_(row, col) = q;
						if (ci == cj) P_(row, col) += h * D((long)i, (long)j);
					}
				P_(row, row) = Cx(0, PI) - rowsum;
			}
		}

		E_ = Eigen::MatrixXcd::Zero((long)Mb_, (long)Mb_);
		if (!A_.empty()) {
			for (std::size_t ci = 0; ci < nc; ++ci) {
				std::vector<Cx> da = fourier_deriv(a_[ci]);
				for (std::size_t i = 0; i < M; ++i) {
					long row = (long)flat(ci, i);
					Cx zeta = curves_[ci].z[i];
					for (std::size_t cj = 0; cj < nc; ++cj)
						for (std::size_t j = 0; j < M; ++j) {
							long col = (long)flat(cj, j);
							if (col == row) {
								E_(row, col) = h * da[i];
								continue;
							}
							Cx om = a_[cj][j] - a_[ci][i];
							E_(row, col) = h * (std::exp(om) - 1.0) * curves_[cj].dz[j] /
							               (curves_[cj].z[j] - zeta);
						}
				}
			}
		}

		Eigen::VectorXcd lf = flat_l();
		K_ = ((lf.conjugate().asDiagonal() * (P_ + E_) * lf.asDiagonal()).real() / (2 * PI)).eval();

		// Per-curve Dirichlet-kernel projector keeping modes |k| <= M/2-1-|n_c|
		band_ = Eigen::MatrixXd::Zero((long)Mb_, (long)Mb_);
		for (std::size_t c = 0; c < nc; ++c) {
			long kmax = (long)(M / 2) - 1 - std::abs(wind_[c]);
			for (std::size_t i = 0; i < M; ++i)
				for (std::size_t j = 0; j < M; ++j) {
					double d = 0.5 * h * (double)((long)i - (long)j);
					double s = i == j ? (double)(2 * kmax + 1)
					                  : std::sin((double)(2 * kmax + 1) * d) / std::sin(d);
					band_((long)flat(c, i), (long)flat(c, j)) = s / (double)M;
				}
		}
		Eigen::MatrixXd cut = Eigen::MatrixXd::Identity((long)Mb_, (long)Mb_) - band_;
		Kb_ = (band_ * K_ * band_ + cut).eval();
		Mre_ = (band_ * (P_.real() / (2 * PI)) * band_).eval();
		Fh_ = (-4.0 * (Mre_ * Kb_) + cut).eval();
	}

	void build_rhs() {
		std::size_t M = g_->nth, nc = curves_.size();
		Eigen::VectorXcd dg((long)Mb_);
		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j)
				dg((long)flat(c, j)) = std::exp(a_[c][j]) * l_[c][j] * gamma_[c][j];
		Eigen::VectorXcd Pd = P_ * dg;
		gamma0_.assign(Mb_, 0.0);
		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j) {
				std::size_t f = flat(c, j);
				Cx utr = std::exp(-a_[c][j]);
				Cx wplus = utr * (0.5 * dg((long)f) + Pd((long)f) / Cx(0, 2 * PI));
				Cx wF = utr * tfe_tr_[c][j];
				gamma0_[f] = gamma_[c][j] - (std::conj(l_[c][j]) * (wplus + wF)).real();
			}
		Eigen::VectorXd g0 = Eigen::Map<const Eigen::VectorXd>(gamma0_.data(), (long)Mb_);
		g0b_ = (band_ * g0).eval();
		b_ = (-4.0 * (Mre_ * g0)).eval();
	}

	void validate_conditions(const std::vector<InteriorPin>& ipins,
	                         const std::vector<CurvePin>& bpins) const {
		std::size_t want = (std::size_t)(2 * n_ + 1 - (int)holes());
		require(2 * ipins.size() + bpins.size() == want, ErrorCode::ValidationError,
		        "point conditions must supply exactly 2n+1-m real values");
		std::vector<std::size_t> cnt(curves_.size(), 0);
		for (const auto& p : bpins) {
			require(p.curve < curves_.size(), ErrorCode::ValidationError, "no such boundary curve");
			++cnt[p.curve];
		}
		std::size_t odd = 0;
		for (auto c : cnt) odd += c % 2;
		require(odd >= holes(), ErrorCode::ValidationError,
		        "an odd number of boundary conditions is needed on at least m curves");
		for (const auto& p : ipins) {
			double r = std::abs(p.z);
			require(r < 1.0 && (g_->is_disk() || r > g_->r0), ErrorCode::ValidationError,
			        "interior condition point outside the domain");
		}
	}

	// density e^{T A} l (gamma + i eta) (or the eta part alone) in flat order
	std::vector<Cx> density_from(const Eigen::VectorXd& eta, bool with_gamma) const {
		std::vector<Cx> d(Mb_);
		for (std::size_t c = 0; c < curves_.size(); ++c)
			for (std::size_t j = 0; j < g_->nth; ++j) {
				std::size_t f = flat(c, j);
				Cx val = Cx(with_gamma ? gamma_[c][j] : 0.0, eta((long)f));
				d[f] = std::exp(a_[c][j]) * l_[c][j] * val;
			}
		return d;
	}

	std::vector<CircleCauchy> cauchy_parts(const std::vector<Cx>& dens) const {
		std::vector<CircleCauchy> out;
		for (std::size_t c = 0; c < curves_.size(); ++c) {
			std::vector<Cx> slice(dens.begin() + (long)(c * g_->nth),
			                      dens.begin() + (long)((c + 1) * g_->nth));
			out.emplace_back(Cx(0), c == 0 ? 1.0 : g_->r0, c == 0, slice);
		}
		return out;
	}

	Cx eval_interior(const std::vector<CircleCauchy>& ccs, Cx z, bool with_F) const {
		Cx acc = 0;
		for (const auto& cc : ccs) acc += cc.eval(z);
		if (with_F) acc += (*tfe_itp_)(z);
		return (*u_itp_)(z)*acc;
	}

	std::vector<Cx> field_from(const std::vector<CircleCauchy>& ccs, bool with_F) const {
		std::vector<Cx> out(g_->size());
		parallel_for(g_->nr, [&](std::size_t i) {
			for (std::size_t j = 0; j < g_->nth; ++j) {
				std::size_t p = g_->idx(i, j);
				Cx z = g_->point(i, j), acc = 0;
				for (const auto& cc : ccs) acc += cc.eval(z);
				if (with_F) acc += TFe_[p];
				out[p] = u_field_[p] * acc;
			}
		});
		return out;
	}

	// domain-side boundary values of the generalized Cauchy part by Plemelj
	std::vector<Cx> trace_from(const std::vector<Cx>& dens, bool with_F) const {
		Eigen::VectorXcd dv = Eigen::Map<const Eigen::VectorXcd>(dens.data(), (long)Mb_);
		Eigen::VectorXcd Pd = P_ * dv;
		std::vector<Cx> out(Mb_);
		for (std::size_t c = 0; c < curves_.size(); ++c)
			for (std::size_t j = 0; j < g_->nth; ++j) {
				std::size_t f = flat(c, j);
				Cx val = 0.5 * dens[f] + Pd((long)f) / Cx(0, 2 * PI);
				if (with_F) val += tfe_tr_[c][j];
				out[f] = std::exp(-a_[c][j]) * val;
			}
		return out;
	}

	Cx pin_value(const std::vector<Cx>& trace_flat, const CurvePin& pin) const {
		std::size_t M = g_->nth;
		std::vector<Cx> prod(M);
		for (std::size_t j = 0; j < M; ++j)
			prod[j] = std::conj(l_[pin.curve][j]) * trace_flat[flat(pin.curve, j)];
		return fourier_eval(prod, pin.sigma);
	}

	const Basis& basis() const {
		if (basis_) return *basis_;
		Basis hb;
		std::size_t dim = null_dimension();
		Eigen::VectorXd wts((long)g_->size());
		for (std::size_t i = 0; i < g_->nr; ++i)
			for (std::size_t j = 0; j < g_->nth; ++j)
				wts((long)g_->idx(i, j)) = g_->area_weight(i);

		Eigen::MatrixXcd J((long)g_->size(), (long)dim);
		for (std::size_t s = 0; s < dim; ++s) {
			Eigen::VectorXd eta = svd_.matrixV().col(rank_ + (long)s);
			std::vector<Cx> dens = density_from(eta, false);
			auto ccs = cauchy_parts(dens);
			auto fld = field_from(ccs, false);
			for (std::size_t p = 0; p < fld.size(); ++p) J((long)p, (long)s) = fld[p];
			hb.etas.push_back(std::move(eta));
			hb.ccs.push_back(std::move(ccs));
			hb.traces.push_back(trace_from(dens, false));
		}
		// Rank of the span of the columns via the weighted Gram matrix. The
		// densities are unit vectors, so the m kernel directions of the
		// density-to-solution map show up as near-zero fields and drop out.
		Eigen::MatrixXd G((long)dim, (long)dim);
		for (std::size_t s = 0; s < dim; ++s)
			for (std::size_t t = 0; t < dim; ++t) {
				Cx acc = 0;
				for (long p = 0; p < (long)g_->size(); ++p)
					acc += std::conj(J(p, (long)s)) * J(p, (long)t) * wts(p);
				G((long)s, (long)t) = acc.real();
			}
		Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(G);
		hb.wrank = (std::size_t)rank_with_gap(gsvd.singularValues(), 1e4, 1e-9);
		basis_ = std::move(hb);
		return *basis_;
	}

	Solution assemble(const Eigen::VectorXd& eta, const std::vector<InteriorPin>& ipins,
	                  const std::vector<CurvePin>& bpins) const {
		std::size_t M = g_->nth, nc = curves_.size(), N = g_->size();
		Solution sol;

		Eigen::VectorXd zero = Eigen::VectorXd::Zero((long)Mb_);
		std::vector<Cx> dens_g = density_from(zero, true);
		std::vector<Cx> dens_e = density_from(eta, false);
		auto cc_g = cauchy_parts(dens_g);
		auto cc_e = cauchy_parts(dens_e);
		sol.w_gamma = field_from(cc_g, false);
		sol.w_eta = field_from(cc_e, false);
		sol.w_F.assign(N, Cx(0));
		for (std::size_t p = 0; p < N; ++p) sol.w_F[p] = u_field_[p] * TFe_[p];
		sol.w.assign(N, Cx(0));
		for (std::size_t p = 0; p < N; ++p) sol.w[p] = sol.w_gamma[p] + sol.w_eta[p] + sol.w_F[p];

		auto tg = trace_from(dens_g, false);
		auto te = trace_from(dens_e, false);
		auto unflat = [&](const std::vector<Cx>& v) {
			std::vector<std::vector<Cx>> out(nc);
			for (std::size_t c = 0; c < nc; ++c)
				out[c].assign(v.begin() + (long)(c * M), v.begin() + (long)((c + 1) * M));
			return out;
		};
		sol.trace_gamma = unflat(tg);
		sol.trace_eta = unflat(te);
		sol.trace_F.assign(nc, std::vector<Cx>(M));
		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j)
				sol.trace_F[c][j] = std::exp(-a_[c][j]) * tfe_tr_[c][j];
		sol.trace.assign(nc, std::vector<Cx>(M));
		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j)
				sol.trace[c][j] =
					sol.trace_gamma[c][j] + sol.trace_eta[c][j] + sol.trace_F[c][j];

		sol.eta.assign(nc, std::vector<double>(M));
		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j) sol.eta[c][j] = eta((long)flat(c, j));

		for (std::size_t c = 1; c < nc; ++c)
			sol.moments.push_back(-curve_moment(curves_[c], sol.trace[c]));

		Eigen::VectorXd fres = Fh_ * eta - b_;
		sol.fredholm_residual = fres.cwiseAbs().maxCoeff();
		Eigen::VectorXd sres = Kb_ * eta - g0b_;
		sol.singular_residual = sres.cwiseAbs().maxCoeff();

		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j)
				sol.boundary_residual =
					std::max(sol.boundary_residual,
				             std::abs((std::conj(l_[c][j]) * sol.trace[c][j]).real() -
				                      gamma_[c][j]));

		auto db = dbar_field(*g_, sol.w);
		for (std::size_t p = 0; p < N; ++p) {
			Cx r = db[p] - (Fsrc_.empty() ? Cx(0) : Fsrc_[p]);
			if (!A_.empty()) r += A_[p] * sol.w[p];
			sol.pde_residual = std::max(sol.pde_residual, std::abs(r));
		}

		std::vector<Cx> dens_full = density_from(eta, true);
		auto cc_full = cauchy_parts(dens_full);
		for (const auto& pin : ipins)
			sol.side_residual = std::max(
				sol.side_residual, std::abs(eval_interior(cc_full, pin.z, true) - pin.value));
		std::vector<Cx> tr_flat(Mb_);
		for (std::size_t c = 0; c < nc; ++c)
			for (std::size_t j = 0; j < M; ++j) tr_flat[flat(c, j)] = sol.trace[c][j];
		for (const auto& pin : bpins)
			sol.side_residual =
				std::max(sol.side_residual, std::abs(pin_value(tr_flat, pin).imag() - pin.c));
		return sol;
	}
};

} // namespace rh
