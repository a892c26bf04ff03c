#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rh/errors.hpp"
#include "rh/fft.hpp"

namespace rh {

// Inner product of C^n viewed as R^{2n}. All the integral operators here are
// only R-linear (they involve conjugation), so Krylov spaces are built over R.
inline double rdot(const std::vector<Cx>& u, const std::vector<Cx>& v) {
	double s = 0;
	for (std::size_t i = 0; i < u.size(); ++i)
		s += u[i].real() * v[i].real() + u[i].imag() * v[i].imag();
	return s;
}

inline double rnorm(const std::vector<Cx>& u) { return std::sqrt(rdot(u, u)); }

inline void axpy(double a, const std::vector<Cx>& x, std::vector<Cx>& y) {
	for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

struct GmresResult {
	std::vector<Cx> x;
	double relres = 0;
	int iters = 0;
};

// GMRES without restart for an R-linear operator on C^n, real Arnoldi
// coefficients, Givens-rotation least squares. Zero initial guess.
inline GmresResult gmres(const std::function<std::vector<Cx>(const std::vector<Cx>&)>& op,
                         const std::vector<Cx>& b, double tol = 1e-12, int maxit = 200) {
	std::size_t n = b.size();
	GmresResult out;
	double bnorm = rnorm(b);
	if (bnorm == 0) {
		out.x.assign(n, Cx(0));
		return out;
	}
	std::vector<std::vector<Cx>> basis;
	basis.push_back(b);
	for (auto& v : basis[0]) v /= bnorm;

	std::vector<std::vector<double>> hcols;
	std::vector<double> cs, sn, g;
	g.push_back(bnorm);

	int it = 0;
	double res = 1.0;
	for (; it < maxit; ++it) {
		auto w = op(basis[(size_t)it]);
		std::vector<double> h((size_t)it + 2, 0.0);
		for (int j = 0; j <= it; ++j) {
			h[(size_t)j] = rdot(w, basis[(size_t)j]);
			axpy(-h[(size_t)j], basis[(size_t)j], w);
		}
		double wnorm = rnorm(w);
		h[(size_t)it + 1] = wnorm;

		// apply accumulated rotations, then a new one to kill h[it+1]
		for (int j = 0; j < it; ++j) {
			double t = cs[(size_t)j] * h[(size_t)j] + sn[(size_t)j] * h[(size_t)j + 1];
			h[(size_t)j + 1] = -sn[(size_t)j] * h[(size_t)j] + cs[(size_t)j] * h[(size_t)j + 1];
			h[(size_t)j] = t;
		}
		double denom = std::hypot(h[(size_t)it], h[(size_t)it + 1]);
		double c = denom == 0 ? 1.0 : h[(size_t)it] / denom;
		double s = denom == 0 ? 0.0 : h[(size_t)it + 1] / denom;
		cs.push_back(c);
		sn.push_back(s);
		h[(size_t)it] = denom;
		h[(size_t)it + 1] = 0;
		g.push_back(-s * g[(size_t)it]);
		g[(size_t)it] *= c;
		hcols.push_back(h);

		res = std::abs(g[(size_t)it + 1]) / bnorm;
		if (res <= tol || wnorm == 0 || denom == 0) {
			++it;
			break;
		}
		for (auto& v : w) v /= wnorm;
		basis.push_back(std::move(w));
	}

	// back substitution on the triangular system
	int m = it;
	std::vector<double> y((size_t)m, 0.0);
	for (int i = m - 1; i >= 0; --i) {
		double s = g[(size_t)i];
		for (int j = i + 1; j < m; ++j) s -= hcols[(size_t)j][(size_t)i] * y[(size_t)j];
		y[(size_t)i] = s / hcols[(size_t)i][(size_t)i];
	}
	out.x.assign(n, Cx(0));
	for (int j = 0; j < m; ++j) axpy(y[(size_t)j], basis[(size_t)j], out.x);
	out.relres = res;
	out.iters = m;
	return out;
}

// Numerical rank from singular values with an explicit gap requirement:
// values above cut and below cut must be separated by at least `gap`.
inline int rank_with_gap(const Eigen::VectorXd& sv, double gap = 1e4, double floor_tol = 1e-11) {
	int n = (int)sv.size();
	if (n == 0) return 0;
	double top = sv(0);
	if (top == 0) return 0;
	int rank = 0;
	for (int i = 0; i < n; ++i)
		if (sv(i) > floor_tol * top) ++rank;
	if (rank > 0 && rank < n) {
		double hi = sv(rank - 1), lo = sv(rank);
		require(lo == 0 || hi / lo >= gap, ErrorCode::WrongNullspaceDimension,
		        "no clear spectral gap separating the null space");
	}
	return rank;
}

} // namespace rh
