#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rh/cauchy.hpp"
#include "rh/conformal.hpp"
#include "rh/curve.hpp"
#include "rh/fourier.hpp"
#include "rh/legendre.hpp"
#include "rh/linalg.hpp"

using namespace rh;

TEST_CASE("Gauss-Legendre quadrature integrates high-degree polynomials exactly") {
	GaussLegendre gl(12);
	double s = 0, sw = 0;
	for (std::size_t i = 0; i < 12; ++i) {
		s += gl.w[i] * std::pow(gl.x[i], 10);
		sw += gl.w[i];
	}
	CHECK(std::abs(s - 2.0 / 11.0) < 1e-14);
	CHECK(std::abs(sw - 2.0) < 1e-14);
}

TEST_CASE("differentiation matrix is exact on polynomials") {
	RadialGrid rg(0.0, 1.0, 20);
	Eigen::VectorXd f(20), want(20);
	for (int i = 0; i < 20; ++i) {
		f(i) = std::pow(rg.r[(size_t)i], 7);
		want(i) = 7 * std::pow(rg.r[(size_t)i], 6);
	}
	Eigen::VectorXd got = rg.diff * f;
	CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("radial barycentric interpolation") {
	RadialGrid rg(0.3, 1.0, 24);
	std::vector<Cx> f(24);
	for (std::size_t i = 0; i < 24; ++i) f[i] = std::exp(Cx(rg.r[i], 0.5));
	CHECK(std::abs(rg.interp(f, 0.77) - std::exp(Cx(0.77, 0.5))) < 1e-13);
	// boundary value by the same polynomial
	CHECK(std::abs(rg.interp(f, 1.0) - std::exp(Cx(1.0, 0.5))) < 1e-12);
}

TEST_CASE("spectral periodic derivative") {
	std::size_t m = 64;
	std::vector<Cx> f(m);
	for (std::size_t j = 0; j < m; ++j) {
		double t = 2 * PI * (double)j / (double)m;
		f[j] = std::polar(1.0, 3 * t) + std::cos(5 * t);
	}
	auto df = fourier_deriv(f);
	for (std::size_t j = 0; j < m; ++j) {
		double t = 2 * PI * (double)j / (double)m;
		Cx want = Cx(0, 3) * std::polar(1.0, 3 * t) - 5.0 * std::sin(5 * t);
		CHECK(std::abs(df[j] - want) < 1e-11);
	}
}

TEST_CASE("harmonic conjugation on the circle") {
	std::size_t m = 128;
	std::vector<double> u(m);
	for (std::size_t j = 0; j < m; ++j) {
		double t = 2 * PI * (double)j / (double)m;
		u[j] = std::cos(3 * t) + 2.0; // constant part must map to zero
	}
	auto v = conjugate_series(u);
	for (std::size_t j = 0; j < m; ++j) {
		double t = 2 * PI * (double)j / (double)m;
		CHECK(std::abs(v[j] - std::sin(3 * t)) < 1e-12);
	}
}

TEST_CASE("Schwarz integral of circle data") {
	std::size_t m = 256;
	std::vector<double> g1(m), g2(m);
	for (std::size_t j = 0; j < m; ++j) {
		double t = 2 * PI * (double)j / (double)m;
		g1[j] = std::cos(6 * t);
		g2[j] = std::sin(t);
	}
	auto a1 = schwarz_taylor(g1);
	auto a2 = schwarz_taylor(g2);
	// cos(k theta) extends to z^k, sin(theta) to -i z
	std::mt19937_64 rng(12345);
	std::uniform_real_distribution<double> ur(0.0, 1.0);
	for (int p = 0; p < 30; ++p) {
		Cx z = std::polar(ur(rng), 2 * PI * ur(rng));
		CHECK(std::abs(taylor_eval(a1, z) - std::pow(z, 6)) < 1e-12);
		CHECK(std::abs(taylor_eval(a2, z) - Cx(0, -1) * z) < 1e-12);
	}
}

TEST_CASE("argument unwrapping and winding") {
	std::size_t m = 64;
	std::vector<Cx> v(m);
	for (std::size_t j = 0; j < m; ++j) {
		double t = 2 * PI * (double)j / (double)m;
		v[j] = (2.0 + std::cos(t)) * std::polar(1.0, 2 * t);
	}
	int w = -99;
	unwrap_angle(v, &w);
	CHECK(w == 2);
	CHECK(field_winding(v) == 2);
}

TEST_CASE("GMRES solves an R-linear system to the requested residual") {
	std::size_t n = 40;
	std::mt19937_64 rng(12345);
	std::normal_distribution<double> nd;
	std::vector<Cx> b(n);
	for (auto& x : b) x = Cx(nd(rng), nd(rng));
	// x + 0.4 conj(shift(x)) + 0.2 i x reversed
	auto op = [n](const std::vector<Cx>& x) {
		std::vector<Cx> y(n);
		for (std::size_t i = 0; i < n; ++i)
			y[i] = x[i] + 0.4 * std::conj(x[(i + 3) % n]) + Cx(0, 0.2) * x[n - 1 - i];
		return y;
	};
	auto res = gmres(op, b, 1e-12, 200);
	auto ax = op(res.x);
	double err = 0;
	for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(ax[i] - b[i]));
	CHECK(err < 1e-10);
}

TEST_CASE("rank detection with spectral gap") {
	Eigen::VectorXd sv(4);
	sv << 2.0, 1.0, 0.4, 1e-13;
	CHECK(rank_with_gap(sv) == 3);
	Eigen::VectorXd bad(3);
	bad << 1.0, 1e-3, 1e-6; // no clean gap against the floor
	CHECK_THROWS_AS(rank_with_gap(bad, 1e4, 1e-5), Error);
}

TEST_CASE("curve geometry on circles") {
	auto c = Curve::circle(Cx(0.2, 0.1), 0.7, 64);
	CHECK(std::abs(c.length() - 2 * PI * 0.7) < 1e-12);
	CHECK(c.winding_about(Cx(0.2, 0.1)) == 1);
	CHECK(c.winding_about(Cx(2, 2)) == 0);
	// outward normal at angle 0 points along +x
	CHECK(std::abs(c.outward_normal(0) - Cx(1, 0)) < 1e-12);

	auto cw = Curve::circle(Cx(0), 0.3, 64, false);
	CHECK(cw.winding_about(Cx(0)) == -1);

	Domain ann{Curve::circle(Cx(0), 1.0, 64), {cw}};
	ann.validate();
	CHECK(ann.contains(Cx(0.5, 0.3)));
	CHECK(!ann.contains(Cx(0.1, 0.1)));
	CHECK(!ann.contains(Cx(1.2, 0)));
}

TEST_CASE("degenerate orientations are rejected") {
	Domain bad{Curve::circle(Cx(0), 1.0, 64, false), {}};
	CHECK_THROWS_AS(bad.validate(), Error);
	Domain bad2{Curve::circle(Cx(0), 1.0, 64), {Curve::circle(Cx(0), 0.3, 64, true)}};
	CHECK_THROWS_AS(bad2.validate(), Error);
}

TEST_CASE("Theodorsen map of a circle is linear") {
	std::vector<Cx> bnd(128);
	for (std::size_t j = 0; j < 128; ++j) bnd[j] = std::polar(0.8, 2 * PI * (double)j / 128);
	auto f = theodorsen(bnd);
	CHECK(std::abs(f.c0) < 1e-12);
	CHECK(f.fit_residual < 1e-12);
	CHECK(std::abs(f.deriv(0) - 0.8) < 1e-12);
	CHECK(std::abs(f.eval(Cx(0.3, -0.5)) - Cx(0.24, -0.4)) < 1e-12);
	CHECK(std::abs(f.source_param(1.7) - 1.7) < 1e-12);
}

TEST_CASE("Theodorsen map of an ellipse hits the boundary") {
	double a = 1.2, b = 1.0;
	auto rho = [&](double t) {
		return a * b / std::sqrt(b * b * std::cos(t) * std::cos(t) + a * a * std::sin(t) * std::sin(t));
	};
	std::vector<Cx> bnd(256);
	for (std::size_t j = 0; j < 256; ++j) {
		double t = 2 * PI * (double)j / 256;
		bnd[j] = std::polar(rho(t), t);
	}
	auto f = theodorsen(bnd);
	f.normalize_rotation();
	CHECK(f.deriv(0).real() > 0);
	CHECK(std::abs(f.deriv(0).imag()) < 1e-10);
	for (int j = 0; j < 32; ++j) {
		double t = 2 * PI * j / 32.0;
		Cx w = f.eval(std::polar(1.0, t));
		double lvl = std::pow(w.real() / a, 2) + std::pow(w.imag() / b, 2);
		CHECK(std::abs(lvl - 1.0) < 1e-9);
		// the boundary image equals the source sample at the matched parameter
		double s = f.source_param(t);
		CHECK(std::abs(w - std::polar(rho(s), s)) < 1e-9);
	}
	// Newton inversion returns to the argument
	Cx z0(0.31, -0.44);
	CHECK(std::abs(f.invert(f.eval(z0), z0 * 0.5) - z0) < 1e-11);
}

TEST_CASE("boundary Cauchy integral machinery") {
	auto circle = Curve::circle(Cx(0), 1.0, 256);
	std::vector<const Curve*> cs{&circle};
	std::vector<std::vector<Cx>> phi(1);
	phi[0].resize(256);
	for (std::size_t j = 0; j < 256; ++j) phi[0][j] = std::pow(circle.z[j], 2) + std::conj(circle.z[j]);
	// phi = t^2 + 1/t: interior value z^2 (1/t has no analytic extension inward)
	Cx z(0.4, 0.2);
	CHECK(std::abs(cauchy_interior(cs, phi, z) - z * z) < 1e-12);

	// near-boundary, analytic-inside density: compensated cancels the pole
	// amplification that wrecks the plain sum
	std::vector<std::vector<Cx>> pa(1);
	pa[0].resize(256);
	for (std::size_t j = 0; j < 256; ++j) pa[0][j] = std::pow(circle.z[j], 3) + 2.0 * circle.z[j];
	Cx zn = std::polar(0.995, 0.37);
	Cx want = zn * zn * zn + 2.0 * zn;
	double plain = std::abs(cauchy_interior(cs, pa, zn) - want);
	double comp = std::abs(cauchy_compensated(cs, pa, zn) - want);
	CHECK(comp < 1e-11);
	CHECK(plain > 1e-2);
}

TEST_CASE("mode-space Cauchy evaluation on circles") {
	// boundary values of f(z) = z^3 + 0.09/z, analytic throughout the annulus;
	// the two-component Cauchy integral must reproduce f even with probes
	// hugging either circle
	auto f = [](Cx z) { return z * z * z + 0.09 / z; };
	std::size_t m = 128;
	std::vector<Cx> outer_vals(m), inner_vals(m);
	auto outer = Curve::circle(Cx(0), 1.0, m);
	auto inner = Curve::circle(Cx(0), 0.3, m, false);
	for (std::size_t j = 0; j < m; ++j) {
		outer_vals[j] = f(outer.z[j]);
		inner_vals[j] = f(inner.z[j]);
	}
	CircleCauchy co(Cx(0), 1.0, true, outer_vals);
	CircleCauchy ci(Cx(0), 0.3, false, inner_vals);
	for (Cx z : {std::polar(0.999999, 1.1), std::polar(0.3000001, 2.0), Cx(0.6, 0.1)}) {
		CHECK(std::abs(co.eval(z) + ci.eval(z) - f(z)) < 1e-12);
	}
}

TEST_CASE("principal value with the uniform pi*i convention") {
	auto outer = Curve::circle(Cx(0), 1.0, 128);
	auto inner = Curve::circle(Cx(0), 0.4, 128, false);
	std::vector<const Curve*> cs{&outer, &inner};
	std::vector<std::vector<Cx>> phi(2), dphi(2);
	for (int c = 0; c < 2; ++c) {
		phi[(size_t)c].assign(128, Cx(1));
		dphi[(size_t)c].assign(128, Cx(0));
	}
	// constant density: boundary value of the constant 1 on both components
	CHECK(std::abs(cauchy_plus(cs, phi, dphi, 0, 17) - Cx(1)) < 1e-12);
	CHECK(std::abs(cauchy_plus(cs, phi, dphi, 1, 53) - Cx(1)) < 1e-12);

	// phi = t on a single circle: interior extension z, boundary value t
	std::vector<const Curve*> one{&outer};
	std::vector<std::vector<Cx>> p2(1), dp2(1);
	p2[0] = outer.z;
	dp2[0] = outer.dz;
	for (std::size_t i : {std::size_t(0), std::size_t(31), std::size_t(77)}) {
		CHECK(std::abs(cauchy_plus(one, p2, dp2, 0, i) - outer.z[i]) < 1e-11);
	}
}
