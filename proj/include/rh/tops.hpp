#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rh/grid.hpp"

namespace rh {

// Area integral operators on the disk / annulus, computed per angular mode.
//
// For f = sum_k f_k(rho) e^{i k alpha}, the Pompeiu operator
//   T f(z) = -(1/pi) intint f(zeta) / (zeta - z) dA(zeta)
// acts mode by mode: T f = sum_k g_k(r) e^{i (k-1) theta} with
//   g_k(r) = -2 r^{k-1} int_r^1 f_k(rho) rho^{1-k} drho            (k >= 1)
//   g_k(r) = +2 r^{k-1} int_{r_lo}^r f_k(rho) rho^{1-k} drho       (k <= 0)
// where r_lo is the inner radius (0 for the disk). Equivalently g_k solves
//   r g' - (k-1) g = 2 r f_k
// with g(1) = 0 for k >= 1 and g(r_lo) = 0 for k <= 0 (automatic at 0).
// Low modes are solved by spectral collocation of the ODE (the stable
// direction in both cases), high modes by a two-term Watson expansion with
// endpoint corrections, exact for affine f_k and O(k^-3) otherwise.
//
// The z-derivative Pi f = d/dz T f comes from the same data:
//   Pi f = sum_k [ (k-1) g_k / r + f_k ] e^{i (k-2) theta}.
class ModeOps {
public:
	explicit ModeOps(const PolarGrid& grid, int mode_cutoff = 0) : g_(&grid) {
		int nr = (int)grid.nr;
		kc_ = mode_cutoff > 0 ? mode_cutoff : nr - 2;
		kc_ = std::min(kc_, (int)grid.nth / 2 - 1);
		D_ = grid.rad.diff;
		eval1_ = eval_row(1.0);
		if (!grid.is_disk()) eval0_ = eval_row(grid.r0);

		lus_.resize((size_t)(2 * kc_ + 1));
		Eigen::MatrixXd rD(nr, nr);
		for (int i = 0; i < nr; ++i) rD.row(i) = grid.rad.r[(size_t)i] * D_.row(i);
		for (int k = -kc_; k <= kc_; ++k) {
			Eigen::MatrixXd M = rD;
			M.diagonal().array() -= (double)(k - 1);
			if (k >= 1) {
				for (int j = 0; j < nr; ++j) M(nr - 1, j) = eval1_((long)j);
			} else if (!grid.is_disk()) {
				for (int j = 0; j < nr; ++j) M(0, j) = eval0_((long)j);
			}
			lus_[(size_t)(k + kc_)].compute(M);
		}
	}

	const PolarGrid& grid() const { return *g_; }

	struct Result {
		std::vector<Cx> T;
		std::vector<Cx> Pi;
		std::vector<Cx> outer; // trace of T on r = 1, angular nodes
		std::vector<Cx> inner; // trace of T on r = r0 (annulus only)
	};

	Result apply(const std::vector<Cx>& f, bool want_pi = false, bool want_traces = false) const {
		const PolarGrid& g = *g_;
		std::size_t nr = g.nr, nth = g.nth;
		Eigen::MatrixXcd F = to_modes(f);
		Eigen::MatrixXcd GT = Eigen::MatrixXcd::Zero((long)nr, (long)nth);
		Eigen::MatrixXcd GP;
		if (want_pi) GP = Eigen::MatrixXcd::Zero((long)nr, (long)nth);
		std::vector<Cx> tr_out(nth, Cx(0)), tr_in(nth, Cx(0));

		for (int k = min_mode(nth) + 1; k <= max_mode(nth); ++k) {
			Eigen::VectorXcd fk = F.col((long)mode_slot(k, nth));
			Eigen::VectorXcd gk;
			Cx trace1(0), trace0(0);
			mode_solve(k, fk, gk, want_traces ? &trace1 : nullptr, want_traces ? &trace0 : nullptr);

			int kt = k - 1;
			if (kt > min_mode(nth)) {
				GT.col((long)mode_slot(kt, nth)) = gk;
				if (want_traces) {
					tr_out[mode_slot(kt, nth)] = trace1;
					if (!g.is_disk()) tr_in[mode_slot(kt, nth)] = trace0;
				}
			}
			if (want_pi) {
				int kp = k - 2;
				if (kp > min_mode(nth)) {
					Eigen::VectorXcd hk = fk;
					for (int i = 0; i < (int)nr; ++i)
						hk(i) += (double)(k - 1) * gk(i) / g.rad.r[(size_t)i];
					GP.col((long)mode_slot(kp, nth)) = hk;
				}
			}
		}

		Result out;
		out.T = from_modes(GT);
		if (want_pi) out.Pi = from_modes(GP);
		if (want_traces) {
			out.outer = fft_inv(tr_out);
			for (auto& v : out.outer) v *= (double)nth;
			if (!g.is_disk()) {
				out.inner = fft_inv(tr_in);
				for (auto& v : out.inner) v *= (double)nth;
			}
		}
		return out;
	}

	std::vector<Cx> T(const std::vector<Cx>& f) const { return apply(f).T; }
	std::vector<Cx> Pi(const std::vector<Cx>& f) const { return apply(f, true).Pi; }

	// P_n phi = T phi - (z^{2n+1}/pi) intint conj(phi) / (1 - z conj(zeta)) dA,
	// the disk operator whose output satisfies Re[z^-n P_n phi] = 0 on |z| = 1.
	// Reflection part: - 2 sum_j z^{2n+1+j} int_0^1 conj(f_{-j}) rho^{1+j} drho.
	std::vector<Cx> Pn(const std::vector<Cx>& f, int n, std::vector<Cx>* trace = nullptr) const {
		require(g_->is_disk(), ErrorCode::ValidationError, "P_n needs the disk grid");
		require(n >= 0, ErrorCode::IndexOutOfRange, "P_n needs n >= 0");
		auto res = apply(f, false, trace != nullptr);
		add_reflection(res, f, 2 * n + 1, 0, trace != nullptr);
		if (trace) *trace = std::move(res.outer);
		return std::move(res.T);
	}

	// P*_k f = T f - (1/pi) intint conj(zeta)^{2k-1} conj(f) / (1 - z conj(zeta)) dA,
	// for the negative index -k < 0 equation.
	// Reflection part: - 2 sum_j z^j int_0^1 conj(f_{-(2k-1+j)}) rho^{2k+j} drho.
	std::vector<Cx> Pstar(const std::vector<Cx>& f, int k, std::vector<Cx>* trace = nullptr) const {
		require(g_->is_disk(), ErrorCode::ValidationError, "P* needs the disk grid");
		require(k >= 1, ErrorCode::IndexOutOfRange, "P* needs k >= 1");
		auto res = apply(f, false, trace != nullptr);
		add_reflection(res, f, 0, 2 * k - 1, trace != nullptr);
		if (trace) *trace = std::move(res.outer);
		return std::move(res.T);
	}

	// Evaluation of T f strictly outside the closed unit disk by the moment
	// series  T f (z) = 2 sum_{j>=0} z^{-j-1} int f_{-j}(rho) rho^{1+j} drho,
	// valid because 1/(zeta - z) expands in powers of zeta/z there.
	Cx T_exterior(const std::vector<Cx>& f, Cx z) const {
		require(std::abs(z) > 1.0 + 1e-9, ErrorCode::ValidationError,
		        "exterior evaluation needs |z| > 1");
		Eigen::MatrixXcd F = to_modes(f);
		std::size_t nth = g_->nth;
		Cx iz = 1.0 / z, zp = iz, acc = 0;
		for (int j = 0; -j >= min_mode(nth) + 1; ++j) {
			acc += 2.0 * zp * power_moment(F.col((long)mode_slot(-j, nth)), j);
			zp *= iz;
		}
		return acc;
	}

private:
	const PolarGrid* g_;
	int kc_;
	Eigen::MatrixXd D_;
	Eigen::VectorXd eval1_, eval0_;
	std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lus_;

	static Cx dotc(const Eigen::VectorXd& a, const Eigen::VectorXcd& b) {
		Cx s = 0;
		for (long i = 0; i < a.size(); ++i) s += a(i) * b(i);
		return s;
	}

	static Eigen::VectorXcd solve_c(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
	                                const Eigen::VectorXcd& rhs) {
		Eigen::VectorXd re = lu.solve(Eigen::VectorXd(rhs.real()));
		Eigen::VectorXd im = lu.solve(Eigen::VectorXd(rhs.imag()));
		Eigen::VectorXcd out(rhs.size());
		out.real() = re;
		out.imag() = im;
		return out;
	}

	Eigen::VectorXd eval_row(double t) const {
		const auto& r = g_->rad.r;
		const auto& bw = g_->rad.bary;
		std::size_t n = r.size();
		Eigen::VectorXd row(n);
		double den = 0;
		for (std::size_t i = 0; i < n; ++i) den += bw[i] / (t - r[i]);
		for (std::size_t i = 0; i < n; ++i) row((long)i) = (bw[i] / (t - r[i])) / den;
		return row;
	}

	Eigen::MatrixXcd to_modes(const std::vector<Cx>& f) const {
		std::size_t nr = g_->nr, nth = g_->nth;
		Eigen::MatrixXcd F((long)nr, (long)nth);
		std::vector<Cx> row(nth);
		for (std::size_t i = 0; i < nr; ++i) {
			for (std::size_t j = 0; j < nth; ++j) row[j] = f[g_->idx(i, j)];
			auto c = fft_fwd(row);
			for (std::size_t s = 0; s < nth; ++s) F((long)i, (long)s) = c[s] / (double)nth;
		}
		return F;
	}

	std::vector<Cx> from_modes(const Eigen::MatrixXcd& G) const {
		std::size_t nr = g_->nr, nth = g_->nth;
		std::vector<Cx> out(g_->size());
		std::vector<Cx> row(nth);
		for (std::size_t i = 0; i < nr; ++i) {
			for (std::size_t s = 0; s < nth; ++s) row[s] = G((long)i, (long)s);
			auto v = fft_inv(row);
			for (std::size_t j = 0; j < nth; ++j) out[g_->idx(i, j)] = v[j] * (double)nth;
		}
		return out;
	}

	// One radial mode: returns nodal g_k and optionally traces at 1 and r0.
	void mode_solve(int k, const Eigen::VectorXcd& fk, Eigen::VectorXcd& gk, Cx* trace1,
	                Cx* trace0) const {
		const auto& r = g_->rad.r;
		int nr = (int)g_->nr;
		if (std::abs(k) <= kc_) {
			Eigen::VectorXcd rhs(nr);
			for (int i = 0; i < nr; ++i) rhs(i) = 2.0 * r[(size_t)i] * fk(i);
			if (k >= 1) rhs(nr - 1) = 0;
			else if (!g_->is_disk()) rhs(0) = 0;
			gk = solve_c(lus_[(size_t)(k + kc_)], rhs);
			if (trace1) *trace1 = (k >= 1) ? Cx(0) : dotc(eval1_, gk);
			if (trace0 && !g_->is_disk()) *trace0 = (k <= 0) ? Cx(0) : dotc(eval0_, gk);
			return;
		}

		Eigen::VectorXcd dfk = D_.cast<Cx>() * fk;
		gk.resize(nr);
		if (k >= 1) {
			double m2 = k - 2.0, m3 = k - 3.0;
			Cx f1 = dotc(eval1_, fk);
			Cx df1 = dotc(eval1_, dfk);
			Cx end = f1 / m2 + df1 / (m2 * m3);
			for (int i = 0; i < nr; ++i) {
				double ri = r[(size_t)i];
				Cx I = ri * fk(i) / m2 + ri * ri * dfk(i) / (m2 * m3) - std::pow(ri, k - 1) * end;
				gk(i) = -2.0 * I;
			}
			if (trace1) *trace1 = 0;
			if (trace0 && !g_->is_disk()) {
				double q = g_->r0;
				Cx f0 = dotc(eval0_, fk);
				Cx df0 = dotc(eval0_, dfk);
				Cx I0 = q * f0 / m2 + q * q * df0 / (m2 * m3) - std::pow(q, k - 1) * end;
				*trace0 = -2.0 * I0;
			}
		} else {
			double c2 = 2.0 - k, c3 = 3.0 - k;
			Cx lo_term(0);
			double q = g_->r0;
			if (!g_->is_disk()) {
				Cx f0 = dotc(eval0_, fk);
				Cx df0 = dotc(eval0_, dfk);
				lo_term = q * f0 / c2 - q * q * df0 / (c2 * c3);
			}
			for (int i = 0; i < nr; ++i) {
				double ri = r[(size_t)i];
				Cx J = ri * fk(i) / c2 - ri * ri * dfk(i) / (c2 * c3);
				if (!g_->is_disk()) J -= std::pow(q / ri, 1.0 - k) * lo_term;
				gk(i) = 2.0 * J;
			}
			if (trace1) {
				Cx f1 = dotc(eval1_, fk);
				Cx df1 = dotc(eval1_, dfk);
				Cx J1 = f1 / c2 - df1 / (c2 * c3);
				if (!g_->is_disk()) J1 -= std::pow(q, 1.0 - k) * lo_term;
				*trace1 = 2.0 * J1;
			}
			if (trace0 && !g_->is_disk()) *trace0 = 0;
		}
	}

	// int_0^1 h(rho) rho^{1+kappa} drho for a nodal radial function h.
	Cx power_moment(const Eigen::VectorXcd& h, int kappa) const {
		const auto& r = g_->rad.r;
		const auto& w = g_->rad.w;
		int nr = (int)g_->nr;
		if (kappa <= kc_) {
			Cx s = 0;
			for (int i = 0; i < nr; ++i) s += w[(size_t)i] * h(i) * std::pow(r[(size_t)i], 1 + kappa);
			return s;
		}
		Eigen::VectorXcd dh = D_.cast<Cx>() * h;
		Cx h1 = dotc(eval1_, h);
		Cx dh1 = dotc(eval1_, dh);
		double c2 = kappa + 2.0, c3 = kappa + 3.0;
		return h1 / c2 - dh1 / (c2 * c3);
	}

	// Adds -2 sum_j z^{shift+j} int conj(f_{-(lowmode+j)}) rho^{1+lowmode+j} drho
	// to res.T (and its r=1 values to res.outer when with_trace).
	// shift = 2n+1, lowmode = 0 for P_n; shift = 0, lowmode = 2k-1 for P*_k.
	void add_reflection(Result& res, const std::vector<Cx>& f, int shift, int lowmode,
	                    bool with_trace) const {
		std::size_t nr = g_->nr, nth = g_->nth;
		Eigen::MatrixXcd F = to_modes(f);
		std::vector<Cx> beta;
		for (int j = 0;; ++j) {
			int src = -(lowmode + j);
			int outm = shift + j;
			if (src <= min_mode(nth) || outm > max_mode(nth)) break;
			Eigen::VectorXcd h = F.col((long)mode_slot(src, nth)).conjugate();
			beta.push_back(-2.0 * power_moment(h, lowmode + j));
		}
		for (std::size_t i = 0; i < nr; ++i) {
			double ri = g_->rad.r[i];
			for (std::size_t j = 0; j < nth; ++j) {
				Cx z = std::polar(ri, g_->theta[j]);
				Cx zp = std::pow(z, shift);
				Cx acc = 0;
				for (std::size_t m = beta.size(); m-- > 0;) acc = acc * z + beta[m];
				res.T[g_->idx(i, j)] += zp * acc;
			}
		}
		if (with_trace) {
			if (res.outer.empty()) res.outer.assign(nth, Cx(0));
			for (std::size_t j = 0; j < nth; ++j) {
				Cx z = std::polar(1.0, g_->theta[j]);
				Cx zp = std::pow(z, shift);
				Cx acc = 0;
				for (std::size_t m = beta.size(); m-- > 0;) acc = acc * z + beta[m];
				res.outer[j] += zp * acc;
			}
		}
	}
};

} // namespace rh
