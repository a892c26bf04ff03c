#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rh/linalg.hpp"
#include "rh/threads.hpp"
#include "rh/tops.hpp"

namespace rh {

// Point conditions selecting one member of the affine solution family.
// An interior pin prescribes the full complex value (two real conditions),
// a boundary pin prescribes Im[conj(l) w] at one boundary angle (one real
// condition, the tangential component left free by the boundary condition).
struct InteriorPin {
	Cx z;
	Cx value;
};
struct BoundaryPin {
	double theta;
	double c;
};

struct SolveOptions {
	double gmres_tol = 1e-12;
	int gmres_maxit = 200;
	double feas_tol = 1e-6;
};

// First order elliptic system on the unit disk,
//   dbar w + A w + B conj(w) = F       in the disk,
//   Re[conj(l) w] = gamma              on the circle, |l| = 1.
//
// The winding number n of l splits the theory: for n >= 0 the solution space
// of the homogeneous problem has real dimension 2n+1 and pins are needed for
// uniqueness; for n < 0 the problem is uniquely solvable but only when 2|n|-1
// real functionals of the data vanish.
//
// Reduction: an analytic exponent X with Im X = -arg(l t^{-n}) on the circle
// turns the boundary condition for V = e^X w into Re[t^{-n}... ] canonical
// form with coefficients B e^{2i Im X}, F e^X and data gamma e^{Re X}. For
// n < 0 the A term is absorbed into X as well (X picks up the area integral
// T A plus a second analytic correction keeping Im X on the circle fixed),
// leaving the conjugate-only equation the negative index machinery needs.
class DiskBVP {
public:
	struct Basis {
		std::vector<std::vector<Cx>> fields; // grid samples of each solution
		std::vector<std::vector<Cx>> traces; // boundary samples
	};

	struct Solution {
		std::vector<Cx> w;
		std::vector<Cx> trace;
		double relres = 0;
		std::vector<double> functionals; // negative index: solvability values
		bool feasible = true;
	};

	DiskBVP(const PolarGrid& grid, std::vector<Cx> A, std::vector<Cx> B, std::vector<Cx> F,
	        std::vector<Cx> l, std::vector<double> gamma, SolveOptions opt = {})
	    : g_(&grid), opt_(opt), ops_(grid), A_(std::move(A)), B_(std::move(B)), F_(std::move(F)),
	      l_(std::move(l)), gamma_(std::move(gamma)) {
		require(grid.is_disk(), ErrorCode::ValidationError, "solver needs the unit disk grid");
		std::size_t N = grid.size(), M = grid.nth;
		require(l_.size() == M, ErrorCode::ValidationError, "boundary direction sample count");
		require(gamma_.empty() || gamma_.size() == M, ErrorCode::ValidationError,
		        "boundary data sample count");
		for (const auto* f : {&A_, &B_, &F_})
			require(f->empty() || f->size() == N, ErrorCode::ValidationError,
			        "coefficient field sample count");
		for (auto& v : l_) {
			double m = std::abs(v);
			require(m > 1e-12, ErrorCode::ValidationError, "boundary direction vanishes");
			v /= m;
		}
		unwrap_angle(l_, &n_);
		reduce();
	}

	int index() const { return n_; }
	const PolarGrid& grid() const { return *g_; }
	const ModeOps& ops() const { return ops_; }

	// Homogeneous solution basis (n >= 0: 2n+1 members; n < 0: empty).
	const Basis& homogeneous() const {
		if (!basis_built_) {
			build_basis();
			basis_built_ = true;
		}
		return basis_;
	}

	Solution solve(const std::vector<InteriorPin>& ipins = {},
	               const std::vector<BoundaryPin>& bpins = {}) const {
		return n_ >= 0 ? solve_nonneg(ipins, bpins) : solve_negative(ipins, bpins);
	}

	// Values of the 2|n|-1 solvability functionals (negative index only):
	//   Re[ (1/2i) oint l w' gamma dt - intint w' F dA ]
	// over a basis w' of homogeneous solutions of the adjoint problem
	// (coefficients -A, -conj B, boundary direction conj(l dt/ds)).
	const std::vector<double>& feasibility() const {
		require(n_ < 0, ErrorCode::ValidationError,
		        "solvability functionals exist only for negative index");
		if (feas_) return *feas_;
		std::size_t M = g_->nth;
		int k = -n_;
		std::vector<Cx> lp(M);
		for (std::size_t j = 0; j < M; ++j)
			lp[j] = std::conj(l_[j] * Cx(0, 1) * std::polar(1.0, g_->theta[j]));
		std::vector<Cx> nA = A_, nB = B_;
		for (auto& v : nA) v = -v;
		for (auto& v : nB) v = -std::conj(v);
		DiskBVP adj(*g_, std::move(nA), std::move(nB), {}, std::move(lp), {}, opt_);
		require(adj.index() == k - 1, ErrorCode::WindingMismatch, "adjoint winding is off");
		const Basis& hb = adj.homogeneous();
		std::vector<double> L(hb.fields.size());
		for (std::size_t s = 0; s < hb.fields.size(); ++s) {
			Cx bnd = 0;
			if (!gamma_.empty()) {
				for (std::size_t j = 0; j < M; ++j)
					bnd += l_[j] * std::polar(1.0, g_->theta[j]) * hb.traces[s][j] * gamma_[j];
				bnd *= PI / (double)M;
			}
			Cx area = 0;
			if (!F_.empty()) {
				std::vector<Cx> prod(g_->size());
				for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = hb.fields[s][p] * F_[p];
				area = g_->integrate(prod);
			}
			L[s] = (bnd - area).real();
		}
		feas_ = std::move(L);
		return *feas_;
	}

private:
	const PolarGrid* g_;
	SolveOptions opt_;
	ModeOps ops_;
	std::vector<Cx> A_, B_, F_, l_;
	std::vector<double> gamma_;
	int n_ = 0;

	std::vector<Cx> Xfield_, Xtrace_; // reduction exponent X
	std::vector<Cx> Ared_, Bred_, Fred_;
	std::vector<double> gred_;
	std::vector<Cx> unred_f_, unred_t_; // e^{-X}

	mutable Basis basis_;
	mutable bool basis_built_ = false;
	mutable double basis_relres_ = 0;
	mutable std::optional<std::vector<double>> feas_;

	void reduce() {
		std::size_t N = g_->size(), M = g_->nth;
		std::vector<Cx> v(M);
		for (std::size_t j = 0; j < M; ++j)
			v[j] = l_[j] * ipow(std::polar(1.0, -g_->theta[j]), n_);
		int w0 = 0;
		auto av = unwrap_angle(v, &w0);
		require(w0 == 0, ErrorCode::NonIntegerWinding, "winding reduction failed");
		std::vector<double> q(M);
		for (std::size_t j = 0; j < M; ++j) q[j] = -av[j];

		Xfield_.assign(N, Cx(0));
		Xtrace_.assign(M, Cx(0));
		add_analytic_with_boundary_im(q);

		if (n_ < 0 && !A_.empty()) {
			auto sig = ops_.apply(A_, false, true);
			for (std::size_t p = 0; p < N; ++p) Xfield_[p] += sig.T[p];
			std::vector<double> q2(M);
			for (std::size_t j = 0; j < M; ++j) {
				Xtrace_[j] += sig.outer[j];
				q2[j] = -sig.outer[j].imag();
			}
			add_analytic_with_boundary_im(q2);
		}

		unred_f_.resize(N);
		unred_t_.resize(M);
		for (std::size_t p = 0; p < N; ++p) unred_f_[p] = std::exp(-Xfield_[p]);
		for (std::size_t j = 0; j < M; ++j) unred_t_[j] = std::exp(-Xtrace_[j]);

		Ared_ = n_ >= 0 ? A_ : std::vector<Cx>{};
		if (!B_.empty()) {
			Bred_.resize(N);
			for (std::size_t p = 0; p < N; ++p)
				Bred_[p] = B_[p] * std::polar(1.0, 2 * Xfield_[p].imag());
		}
		if (!F_.empty()) {
			Fred_.resize(N);
			for (std::size_t p = 0; p < N; ++p) Fred_[p] = F_[p] * std::exp(Xfield_[p]);
		}
		if (!gamma_.empty()) {
			gred_.resize(M);
			for (std::size_t j = 0; j < M; ++j) gred_[j] = gamma_[j] * std::exp(Xtrace_[j].real());
		}
	}

	// X += the analytic function whose boundary imaginary part is q (real part
	// fixed by the conjugate series, imaginary mean kept as sampled).
	void add_analytic_with_boundary_im(const std::vector<double>& q) {
		auto a = schwarz_taylor(q);
		auto H = conjugate_series(q);
		for (std::size_t i = 0; i < g_->nr; ++i)
			for (std::size_t j = 0; j < g_->nth; ++j)
				Xfield_[g_->idx(i, j)] += Cx(0, 1) * taylor_eval(a, g_->point(i, j));
		for (std::size_t j = 0; j < g_->nth; ++j) Xtrace_[j] += Cx(-H[j], q[j]);
	}

	bool trivial_kernel() const { return Ared_.empty() && Bred_.empty(); }

	std::vector<Cx> mixed(const std::vector<Cx>& x) const {
		std::vector<Cx> m(x.size(), Cx(0));
		if (!Ared_.empty())
			for (std::size_t p = 0; p < x.size(); ++p) m[p] += Ared_[p] * x[p];
		if (!Bred_.empty())
			for (std::size_t p = 0; p < x.size(); ++p) m[p] += Bred_[p] * std::conj(x[p]);
		return m;
	}

	std::vector<Cx> project(const std::vector<Cx>& f, std::vector<Cx>* trace = nullptr) const {
		return n_ >= 0 ? ops_.Pn(f, n_, trace) : ops_.Pstar(f, -n_, trace);
	}

	std::function<std::vector<Cx>(const std::vector<Cx>&)> fredholm_op() const {
		return [this](const std::vector<Cx>& x) {
			auto out = project(mixed(x));
			for (std::size_t p = 0; p < x.size(); ++p) out[p] += x[p];
			return out;
		};
	}

	// Reduced right hand side, field and boundary trace.
	void reduced_rhs(std::vector<Cx>& Rf, std::vector<Cx>& Rtr) const {
		std::size_t N = g_->size(), M = g_->nth;
		Rf.assign(N, Cx(0));
		Rtr.assign(M, Cx(0));
		if (!Fred_.empty()) {
			std::vector<Cx> tr;
			Rf = project(Fred_, &tr);
			Rtr = std::move(tr);
		}
		if (gred_.empty()) return;
		if (n_ >= 0) {
			// + z^n S gamma, the Schwarz integral carrying the boundary data
			auto a = schwarz_taylor(gred_);
			auto H = conjugate_series(gred_);
			for (std::size_t i = 0; i < g_->nr; ++i)
				for (std::size_t j = 0; j < g_->nth; ++j) {
					Cx z = g_->point(i, j);
					Rf[g_->idx(i, j)] += ipow(z, n_) * taylor_eval(a, z);
				}
			for (std::size_t j = 0; j < M; ++j)
				Rtr[j] += ipow(std::polar(1.0, g_->theta[j]), n_) * Cx(gred_[j], H[j]);
		} else {
			// + (1/pi i) oint gamma dt / (t^k (t-z)) = 2 sum_j c_{k+j}(gamma) z^j
			int k = -n_;
			std::vector<Cx> gx(M);
			for (std::size_t j = 0; j < M; ++j) gx[j] = gred_[j];
			auto c = fft_fwd(gx);
			std::vector<Cx> b;
			for (int j = 0; k + j <= max_mode(M); ++j)
				b.push_back(2.0 * c[mode_slot(k + j, M)] / (double)M);
			for (std::size_t i = 0; i < g_->nr; ++i)
				for (std::size_t j = 0; j < g_->nth; ++j)
					Rf[g_->idx(i, j)] += taylor_eval(b, g_->point(i, j));
			for (std::size_t j = 0; j < M; ++j)
				Rtr[j] += taylor_eval(b, std::polar(1.0, g_->theta[j]));
		}
	}

	// Solve (I + P mixed) x = R, returning trace through the converged field.
	void fredholm_solve(const std::vector<Cx>& Rf, const std::vector<Cx>& Rtr, std::vector<Cx>& x,
	                    std::vector<Cx>& xtr, double& relres) const {
		if (trivial_kernel()) {
			x = Rf;
			xtr = Rtr;
			relres = 0;
			return;
		}
		auto r = gmres(fredholm_op(), Rf, opt_.gmres_tol, opt_.gmres_maxit);
		require(r.relres <= 1e-7, ErrorCode::SolverError, "area integral equation did not converge");
		x = std::move(r.x);
		relres = r.relres;
		std::vector<Cx> qtr;
		project(mixed(x), &qtr);
		xtr = Rtr;
		for (std::size_t j = 0; j < xtr.size(); ++j) xtr[j] -= qtr[j];
	}

	std::vector<Cx> unreduce_field(const std::vector<Cx>& x) const {
		std::vector<Cx> w(x.size());
		for (std::size_t p = 0; p < x.size(); ++p) w[p] = unred_f_[p] * x[p];
		return w;
	}
	std::vector<Cx> unreduce_trace(const std::vector<Cx>& x) const {
		std::vector<Cx> w(x.size());
		for (std::size_t j = 0; j < x.size(); ++j) w[j] = unred_t_[j] * x[j];
		return w;
	}

	// Polynomial solutions of the coefficient-free reduced homogeneous problem,
	// Re[t^{-n} g] = 0 on the circle: for k < n the pairs z^k - z^{2n-k} and
	// i (z^k + z^{2n-k}), plus i z^n.
	std::pair<std::vector<Cx>, std::vector<Cx>> sample_poly(std::size_t s) const {
		int n = n_;
		auto eval = [&](Cx z) -> Cx {
			if ((int)s == 2 * n) return Cx(0, 1) * ipow(z, n);
			int k = (int)s / 2;
			Cx lo = ipow(z, k), hi = ipow(z, 2 * n - k);
			return s % 2 == 0 ? lo - hi : Cx(0, 1) * (lo + hi);
		};
		std::vector<Cx> f(g_->size()), tr(g_->nth);
		for (std::size_t i = 0; i < g_->nr; ++i)
			for (std::size_t j = 0; j < g_->nth; ++j) f[g_->idx(i, j)] = eval(g_->point(i, j));
		for (std::size_t j = 0; j < g_->nth; ++j) tr[j] = eval(std::polar(1.0, g_->theta[j]));
		return {std::move(f), std::move(tr)};
	}

	void build_basis() const {
		basis_ = Basis{};
		if (n_ < 0) return;
		std::size_t dim = (std::size_t)(2 * n_ + 1);
		basis_.fields.resize(dim);
		basis_.traces.resize(dim);
		std::vector<double> rr(dim, 0.0);
		parallel_for(dim, [&](std::size_t s) {
			auto [gf, gtr] = sample_poly(s);
			std::vector<Cx> x, xtr;
			if (trivial_kernel()) {
				x = std::move(gf);
				xtr = std::move(gtr);
			} else {
				auto r = gmres(fredholm_op(), gf, opt_.gmres_tol, opt_.gmres_maxit);
				require(r.relres <= 1e-7, ErrorCode::SolverError,
				        "homogeneous basis solve did not converge");
				x = std::move(r.x);
				rr[s] = r.relres;
				std::vector<Cx> qtr;
				project(mixed(x), &qtr);
				xtr = std::move(gtr);
				for (std::size_t j = 0; j < xtr.size(); ++j) xtr[j] -= qtr[j];
			}
			basis_.fields[s] = unreduce_field(x);
			basis_.traces[s] = unreduce_trace(xtr);
		});
		basis_relres_ = *std::max_element(rr.begin(), rr.end());
	}

	Solution solve_nonneg(const std::vector<InteriorPin>& ipins,
	                      const std::vector<BoundaryPin>& bpins) const {
		std::size_t dim = (std::size_t)(2 * n_ + 1);
		require(2 * ipins.size() + bpins.size() == dim, ErrorCode::ValidationError,
		        "pins must supply exactly 2n+1 real conditions");

		std::vector<Cx> Rf, Rtr, x, xtr;
		double relres = 0;
		reduced_rhs(Rf, Rtr);
		fredholm_solve(Rf, Rtr, x, xtr, relres);

		Solution sol;
		sol.w = unreduce_field(x);
		sol.trace = unreduce_trace(xtr);

		const Basis& hb = homogeneous();
		sol.relres = std::max(relres, basis_relres_);

		std::vector<FieldInterp> itp;
		itp.reserve(dim);
		for (const auto& f : hb.fields) itp.emplace_back(*g_, f);
		FieldInterp itp_p(*g_, sol.w);

		auto pin_trace = [&](const std::vector<Cx>& tr, double theta) {
			std::vector<Cx> prod(tr.size());
			for (std::size_t j = 0; j < tr.size(); ++j) prod[j] = std::conj(l_[j]) * tr[j];
			return fourier_eval(prod, theta);
		};

		Eigen::MatrixXd P((long)dim, (long)dim);
		Eigen::VectorXd rhs((long)dim);
		long row = 0;
		for (const auto& pin : ipins) {
			require(std::abs(pin.z) < 1.0, ErrorCode::ValidationError, "interior pin outside disk");
			Cx wp = itp_p(pin.z);
			for (std::size_t s = 0; s < dim; ++s) {
				Cx v = itp[s](pin.z);
				P(row, (long)s) = v.real();
				P(row + 1, (long)s) = v.imag();
			}
			rhs(row) = (pin.value - wp).real();
			rhs(row + 1) = (pin.value - wp).imag();
			row += 2;
		}
		for (const auto& pin : bpins) {
			for (std::size_t s = 0; s < dim; ++s)
				P(row, (long)s) = pin_trace(hb.traces[s], pin.theta).imag();
			rhs(row) = pin.c - pin_trace(sol.trace, pin.theta).imag();
			++row;
		}

		Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
		const auto& sv = svd.singularValues();
		require(sv(0) > 0 && sv((long)dim - 1) > 1e-12 * sv(0), ErrorCode::PinningSingular,
		        "pin conditions do not determine the free constants");
		Eigen::VectorXd d = svd.solve(rhs);
		for (std::size_t s = 0; s < dim; ++s) {
			axpy(d((long)s), hb.fields[s], sol.w);
			axpy(d((long)s), hb.traces[s], sol.trace);
		}
		return sol;
	}

	Solution solve_negative(const std::vector<InteriorPin>& ipins,
	                        const std::vector<BoundaryPin>& bpins) const {
		require(ipins.empty() && bpins.empty(), ErrorCode::ValidationError,
		        "negative index leaves no freedom to pin");
		std::vector<Cx> Rf, Rtr, x, xtr;
		double relres = 0;
		reduced_rhs(Rf, Rtr);
		fredholm_solve(Rf, Rtr, x, xtr, relres);

		Solution sol;
		sol.w = unreduce_field(x);
		sol.trace = unreduce_trace(xtr);
		sol.relres = relres;
		sol.functionals = feasibility();
		double scale = 1;
		for (double v : gamma_) scale = std::max(scale, std::abs(v));
		for (Cx v : F_) scale = std::max(scale, std::abs(v));
		double worst = 0;
		for (double v : sol.functionals) worst = std::max(worst, std::abs(v));
		sol.feasible = worst <= opt_.feas_tol * scale;
		return sol;
	}
};

// Numerical dimension of the real linear span of grid fields: rank of the
// L2 Gram matrix, requiring a clean spectral gap.
inline int field_span_rank(const PolarGrid& g, const std::vector<std::vector<Cx>>& fs,
                           double gap = 1e4) {
	int n = (int)fs.size();
	if (n == 0) return 0;
	std::vector<std::vector<Cx>> u(fs.begin(), fs.end());
	auto wdot = [&](const std::vector<Cx>& a, const std::vector<Cx>& b) {
		double s = 0;
		for (std::size_t i = 0; i < g.nr; ++i) {
			double wt = g.area_weight(i);
			for (std::size_t j = 0; j < g.nth; ++j) {
				std::size_t p = g.idx(i, j);
				s += wt * (a[p] * std::conj(b[p])).real();
			}
		}
		return s;
	};
	for (auto& f : u) {
		double nm = std::sqrt(std::max(0.0, wdot(f, f)));
		if (nm > 1e-300)
			for (auto& v : f) v /= nm;
	}
	Eigen::MatrixXd G(n, n);
	for (int s = 0; s < n; ++s)
		for (int t = s; t < n; ++t) G(s, t) = G(t, s) = wdot(u[(size_t)s], u[(size_t)t]);
	Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
	return rank_with_gap(svd.singularValues(), gap);
}

} // namespace rh
