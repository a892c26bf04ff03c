#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rh/kernels.hpp"

using namespace rh;

TEST_CASE("coefficient-free kernels are plain Cauchy kernels") {
	PolarGrid g(0.0, 24, 64);
	DiskKernels kn(g, {}, {});
	CHECK(kn.diagonal_defect() < 1e-12);
	Cx z(0.2, 0.4), t(-0.5, 0.1);
	CHECK(std::abs(kn.X1(z, t) - 0.5 / (t - z)) < 1e-13);
	auto om = kn.omega_field(t);
	for (Cx v : om) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("constant coefficient resolvent field has closed form") {
	PolarGrid g(0.0, 32, 128);
	Cx a(0.3, 0.0);
	std::vector<Cx> A(g.size(), a);
	DiskKernels kn(g, A, {});
	// u = e^{-a conj z}: dbar u = -a u with the T-normalization u = 1 - T(A u)
	double uerr = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			Cx z = g.point(i, j);
			uerr = std::max(uerr,
			                std::abs(kn.resolvent()[g.idx(i, j)] - std::exp(-a * std::conj(z))));
		}
	CHECK(uerr < 1e-11);
	double terr = 0;
	for (std::size_t j = 0; j < g.nth; ++j) {
		Cx t = std::polar(1.0, g.theta[j]);
		terr = std::max(terr, std::abs(kn.resolvent_trace()[j] - std::exp(-a * std::conj(t))));
	}
	CHECK(terr < 1e-11);
	CHECK(kn.diagonal_defect() < 1e-10);
}

TEST_CASE("kernel integral equation residual and reciprocity") {
	PolarGrid g(0.0, 48, 256);
	std::vector<Cx> A(g.size(), Cx(0.3, 0.0)), nA(g.size(), Cx(-0.3, 0.0));
	DiskKernels kn(g, A, {});
	DiskKernels adj(g, nA, {});

	CHECK(kn.X1_residual(std::polar(0.45, 0.8)) < 1e-7);
	CHECK(kn.X1_residual(Cx(1.5, 0.0)) < 1e-7);

	// direct solve against the closed form, parameter point outside the disk:
	// u = e^{-0.3 conj z} inside, u(1.5) = e^{-0.3/1.5} via the exterior tail
	// of T(1) = 1/z
	Cx t_out(1.5, 0.0);
	auto X = kn.solve_X(t_out, 1);
	CHECK(kn.X_residual(X, t_out, 1) < 1e-9);
	double xerr = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			Cx z = g.point(i, j);
			Cx ex = std::exp(-0.3 * std::conj(z)) / (2.0 * std::exp(-0.2) * (t_out - z));
			xerr = std::max(xerr, std::abs(X[g.idx(i, j)] - ex));
		}
	CHECK(xerr < 1e-9);
	// second kind is -i times the first when B = 0
	auto X2 = kn.solve_X(t_out, 2);
	double kerr = 0;
	for (std::size_t p = 0; p < X.size(); ++p)
		kerr = std::max(kerr, std::abs(X2[p] + Cx(0, 1) * X[p]));
	CHECK(kerr < 1e-10);

	std::mt19937_64 rng(12345);
	std::uniform_real_distribution<double> rad(0.05, 0.8), ang(0.0, 2 * PI);
	for (int c = 0; c < 5; ++c) {
		Cx z = std::polar(rad(rng), ang(rng));
		Cx t = std::polar(rad(rng), ang(rng));
		if (std::abs(z - t) < 0.05) continue;
		CHECK(std::abs(kn.G1(z, t) + adj.G1(t, z)) < 1e-10);
	}
}

TEST_CASE("boundary plus area representation reproduces a solution") {
	PolarGrid g(0.0, 48, 256);
	Cx a(0.3, 0.0);
	auto wex = [](Cx z) { return std::exp(z) + std::conj(z); };
	std::vector<Cx> A(g.size(), a);
	auto F = g.sample([&](Cx z) { return Cx(1.0) + a * wex(z); });
	std::vector<Cx> wtr(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) wtr[j] = wex(std::polar(1.0, g.theta[j]));

	DiskKernels kn(g, A, {});
	auto rep = kn.representation(wtr, F);
	for (Cx z : {Cx(0.1, 0.2), Cx(-0.6, 0.3), Cx(0.0, -0.85), Cx(0.94, 0.0)}) {
		CHECK(std::abs(rep(z) - wex(z)) < 1e-8);
	}
}

TEST_CASE("conjugate coefficient kernel solve and exponent") {
	PolarGrid g(0.0, 32, 128);
	std::vector<Cx> A(g.size()), B(g.size());
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			Cx z = g.point(i, j);
			A[g.idx(i, j)] = Cx(0.1, 0.0) + 0.05 * z;
			B[g.idx(i, j)] = Cx(0.05, 0.02) * std::conj(z);
		}
	DiskKernels kn(g, A, B);

	SECTION("exterior parameter point, both kinds, exponent consistency") {
		Cx t(1.5, 0.0);
		auto X1 = kn.solve_X(t, 1);
		auto X2 = kn.solve_X(t, 2);
		CHECK(kn.X_residual(X1, t, 1) < 1e-9);
		CHECK(kn.X_residual(X2, t, 2) < 1e-9);

		auto om1 = kn.omega_from_X(X1, t);
		auto om2 = kn.omega_from_X(X2, t);
		double c1 = 0, c2 = 0, sep = 0;
		for (std::size_t i = 0; i < g.nr; ++i)
			for (std::size_t j = 0; j < g.nth; ++j) {
				std::size_t p = g.idx(i, j);
				Cx d = t - g.point(i, j);
				c1 = std::max(c1, std::abs(std::exp(om1[p]) / (2.0 * d) - X1[p]));
				c2 = std::max(c2, std::abs(std::exp(om2[p]) / (Cx(0, 2) * d) - X2[p]));
				sep = std::max(sep, std::abs(om1[p] - om2[p]));
			}
		CHECK(c1 < 1e-7);
		CHECK(c2 < 1e-7);
		// B != 0 splits the two exponents (G2 does not vanish)
		CHECK(sep > 1e-3);
	}

	SECTION("interior parameter point: discrete residual, diagonal zero") {
		Cx t(0.3, -0.2);
		auto X1 = kn.solve_X(t, 1);
		CHECK(kn.X_residual(X1, t, 1) < 1e-9);
		auto om = kn.omega_from_X(X1, t);
		CHECK(std::abs(FieldInterp(g, om)(t)) < 1e-10);
	}

	SECTION("degenerate ratio is refused") {
		std::vector<Cx> X(g.size(), Cx(1));
		X[g.idx(5, 7)] = Cx(0);
		try {
			kn.omega_from_X(X, Cx(1.5, 0.0));
			FAIL("expected a ratio error");
		} catch (const Error& e) {
			CHECK(e.code() == ErrorCode::RatioUndefined);
		}
	}
}
