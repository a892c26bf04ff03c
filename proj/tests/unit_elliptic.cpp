#include <catch2/catch_amalgamated.hpp>

#include <optional>

#include "rh/calculus.hpp"
#include "rh/diskbvp.hpp"
#include "rh/elliptic.hpp"

using namespace rh;

namespace {

std::vector<double> rfield(const PolarGrid& g, const std::function<double(Cx)>& f) {
	std::vector<double> v(g.size());
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) v[g.idx(i, j)] = f(g.point(i, j));
	return v;
}

// du/dUpsilon data for a known potential on the unit circle
std::vector<double> oblique_data(const PolarGrid& g, const std::vector<Cx>& Ups,
                                 const std::function<Cx(Cx)>& grad) {
	std::vector<double> v(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) {
		Cx t = std::polar(1.0, g.theta[j]);
		v[j] = (Ups[j] * grad(t)).real();
	}
	return v;
}

std::vector<Cx> outward_normal(const PolarGrid& g) {
	std::vector<Cx> u(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) u[j] = std::polar(1.0, g.theta[j]);
	return u;
}

// coefficients with a gently varying principal part; ac - b^2 stays near 1
EllipticCoefficients tilted_laplacian(const PolarGrid& g) {
	EllipticCoefficients co;
	co.a = rfield(g, [](Cx z) { return 1 + 0.1 * z.real(); });
	co.b = rfield(g, [](Cx z) { return 0.05 * z.imag(); });
	co.c = rfield(g, [](Cx) { return 1.0; });
	return co;
}

double max_cx_err(const PolarGrid& g, const std::vector<Cx>& got,
                  const std::function<Cx(Cx)>& want) {
	double m = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j)
			m = std::max(m, std::abs(got[g.idx(i, j)] - want(g.point(i, j))));
	return m;
}

template <typename F>
std::optional<ErrorCode> thrown_code(F&& f) {
	try {
		std::forward<F>(f)();
	} catch (const Error& e) {
		return e.code();
	}
	return std::nullopt;
}

} // namespace

TEST_CASE("Beltrami coefficient from the principal part") {
	PolarGrid g(0.0, 8, 16);
	std::size_t N = g.size();

	EllipticCoefficients lap{std::vector<double>(N, 1.0), std::vector<double>(N, 0.0),
	                         std::vector<double>(N, 1.0), {}, {}, {}};
	double dmin = 0, qmax = 1;
	auto q0 = beltrami_coefficient(g, lap, &dmin, &qmax);
	for (const Cx& v : q0) CHECK(std::abs(v) == 0.0);
	CHECK(dmin == 1.0);
	CHECK(qmax == 0.0);

	// stretched coordinate: a = 2, c = 1 gives the constant 3 - 2 sqrt(2)
	EllipticCoefficients st = lap;
	st.a.assign(N, 2.0);
	auto qs = beltrami_coefficient(g, st);
	for (const Cx& v : qs) {
		CHECK(std::abs(v.real() - (3 - 2 * std::sqrt(2.0))) < 1e-15);
		CHECK(v.imag() == 0.0);
	}

	// nearly degenerate mixed term stays strictly inside the unit disk
	EllipticCoefficients mx = lap;
	mx.b.assign(N, 0.999);
	double qm = 0;
	auto qmx = beltrami_coefficient(g, mx, nullptr, &qm);
	CHECK(qmx[0].real() == 0.0);
	CHECK(qm < 1.0);
	CHECK(qm > 0.95);

	mx.b.assign(N, 1.1);
	CHECK(thrown_code([&] { beltrami_coefficient(g, mx); }) == ErrorCode::EllipticityViolated);
	EllipticCoefficients neg = lap;
	neg.a.assign(N, -1.0);
	neg.c.assign(N, -2.0);
	CHECK(thrown_code([&] { beltrami_coefficient(g, neg); }) == ErrorCode::EllipticityViolated);
}

TEST_CASE("identity chart for the Laplacian") {
	PolarGrid g(0.0, 12, 32);
	auto chart = isothermal_map(g, std::vector<Cx>(g.size(), 0.0));
	CHECK(chart.trivial());
	CHECK(chart.beltrami_residual() == 0.0);
	CHECK(chart.chart_residual() == 0.0);
	CHECK(chart.target().identity());
	Cx z(0.4, -0.3);
	CHECK(std::abs(chart.forward(z) - z) == 0.0);
	CHECK(std::abs(chart.inverse(z) - z) == 0.0);
	CHECK(max_cx_err(g, chart.psi(), [](Cx w) { return w; }) == 0.0);

	PolarGrid ann(0.4, 12, 32);
	CHECK_NOTHROW(isothermal_map(ann, std::vector<Cx>(ann.size(), 0.0)));
	CHECK(thrown_code([&] { isothermal_map(ann, std::vector<Cx>(ann.size(), Cx(0.1))); }) == ErrorCode::ValidationError);
	CHECK(thrown_code([&] { isothermal_map(g, std::vector<Cx>(g.size(), Cx(0.9))); }) == ErrorCode::ValidationError);
}

TEST_CASE("constant coefficient chart is affine") {
	// the image of z - q zbar is a 0.8 by 1.2 ellipse whose boundary
	// correspondence has slowly decaying harmonics, so the angular grid
	// carries the accuracy here
	PolarGrid g(0.0, 24, 128);
	double q = 0.2;
	auto chart = isothermal_map(g, std::vector<Cx>(g.size(), Cx(q)));
	CHECK_FALSE(chart.trivial());
	CHECK(chart.iterations() <= 3);

	CHECK(chart.beltrami_residual() < 1e-11);
	CHECK(chart.chart_residual() < 1e-5);
	CHECK(std::abs(chart.target().c0) < 1e-13);
	CHECK(chart.target().fit_residual < 1e-7);

	for (double th : {0.0, 0.7, 2.9}) {
		Cx zb = std::polar(1.0, th);
		CHECK(std::abs(std::abs(chart.forward(zb)) - 1.0) < 1e-7);
	}
	Cx z(0.3, 0.4);
	CHECK(std::abs(chart.inverse(chart.forward(z)) - z) < 1e-9);
	// J = (1 - q^2)/|Phi'|^2 dips well below 1 near the long axis
	for (double j : chart.jacobian()) CHECK(j > 0.15);
}

TEST_CASE("variable coefficient chart solves its Beltrami equation") {
	PolarGrid g(0.0, 32, 128);
	auto co = tilted_laplacian(g);
	double qm = 0;
	auto q = beltrami_coefficient(g, co, nullptr, &qm);
	CHECK(qm < 0.05);

	auto chart = isothermal_map(g, q);
	CHECK(chart.beltrami_residual() < 1e-6);
	CHECK(chart.chart_residual() < 1e-6);
	for (double j : chart.jacobian()) CHECK(j > 0.5);

	for (Cx rho : {Cx(0.5, 0.1), Cx(-0.2, 0.6), Cx(0.05, -0.02)}) {
		Cx z = chart.inverse(rho);
		CHECK(std::abs(chart.forward(z) - rho) < 1e-9);
	}
	double th = chart.boundary_param(1.3);
	CHECK(std::abs(chart.forward(std::polar(1.0, th)) - std::polar(1.0, 1.3)) < 1e-7);
}

TEST_CASE("oblique reduction with the identity chart") {
	PolarGrid g(0.0, 16, 64);
	std::size_t N = g.size();
	EllipticCoefficients lap{std::vector<double>(N, 1.0), std::vector<double>(N, 0.0),
	                         std::vector<double>(N, 1.0), {}, {}, {}};
	auto chart = isothermal_map(g, std::vector<Cx>(N, 0.0));

	ObliqueBC bc;
	bc.Upsilon = {outward_normal(g)};
	bc.gamma = {oblique_data(g, bc.Upsilon[0], [](Cx z) { return 2.0 * z; })};
	auto fo = oblique_to_first_order(g, lap, bc, chart);
	CHECK(fo.index == -1);
	CHECK(fo.A.empty());
	CHECK(fo.B.empty());
	CHECK(fo.F.empty());
	for (std::size_t j = 0; j < g.nth; ++j) {
		CHECK(std::abs(fo.l[0][j] - std::polar(1.0, -g.theta[j])) < 1e-15);
		CHECK(std::abs(fo.gamma[0][j] - 2 * std::cos(2 * g.theta[j])) < 1e-14);
	}

	// lower order terms map straight into the zero order coefficients
	EllipticCoefficients low = lap;
	low.d = rfield(g, [](Cx z) { return z.real(); });
	low.e = rfield(g, [](Cx z) { return z.imag() - 2; });
	low.f = rfield(g, [](Cx z) { return 3 * z.real() * z.imag(); });
	auto fl = oblique_to_first_order(g, low, bc, chart);
	CHECK(max_cx_err(g, fl.A, [](Cx z) { return Cx(z.real(), z.imag() - 2) / 4.0; }) < 1e-15);
	CHECK(max_cx_err(g, fl.F, [](Cx z) { return Cx(1.5 * z.real() * z.imag()); }) < 1e-15);
	for (std::size_t p = 0; p < N; ++p) CHECK(fl.B[p] == std::conj(fl.A[p]));

	// a hole forces the index above m - 1
	PolarGrid ann(0.3, 12, 64);
	std::size_t Na = ann.size();
	EllipticCoefficients la{std::vector<double>(Na, 1.0), std::vector<double>(Na, 0.0),
	                        std::vector<double>(Na, 1.0), {}, {}, {}};
	auto ca = isothermal_map(ann, std::vector<Cx>(Na, 0.0));
	ObliqueBC flat;
	flat.Upsilon = {std::vector<Cx>(ann.nth, Cx(1)), std::vector<Cx>(ann.nth, Cx(1))};
	flat.gamma = {std::vector<double>(ann.nth, 0.0), std::vector<double>(ann.nth, 0.0)};
	CHECK(thrown_code([&] { oblique_to_first_order(ann, la, flat, ca); }) == ErrorCode::IndexOutOfRange);

	ObliqueBC spin = flat;
	for (std::size_t j = 0; j < ann.nth; ++j)
		spin.Upsilon[0][j] = std::polar(1.0, -2 * ann.theta[j]);
	auto fa = oblique_to_first_order(ann, la, spin, ca);
	CHECK(fa.index == 2);
	CHECK(field_winding(fa.l[0]) == 2);
	CHECK(field_winding(fa.l[1]) == 0);
}

TEST_CASE("constant stretch pipeline recovers a quadratic potential") {
	// 2 u_xx + u_yy = 2 with du/dn given, manufactured from u = x^2 - y^2
	PolarGrid g(0.0, 24, 128);
	std::size_t N = g.size();
	EllipticCoefficients co{std::vector<double>(N, 2.0), std::vector<double>(N, 0.0),
	                        std::vector<double>(N, 1.0), {}, {}, std::vector<double>(N, 2.0)};
	auto q = beltrami_coefficient(g, co);
	auto chart = isothermal_map(g, q);

	ObliqueBC bc;
	bc.Upsilon = {outward_normal(g)};
	bc.gamma = {oblique_data(g, bc.Upsilon[0], [](Cx z) { return 2.0 * z; })};
	auto fo = oblique_to_first_order(g, co, bc, chart);
	CHECK(fo.index == -1);

	// constant q has no derivative terms, so the zero order part vanishes
	double asup = 0, fim = 0;
	for (std::size_t p = 0; p < N; ++p) {
		asup = std::max(asup, std::abs(fo.A[p]));
		fim = std::max(fim, std::abs(fo.F[p].imag()));
		CHECK(fo.F[p].real() > 0);
	}
	CHECK(asup < 1e-8);
	CHECK(fim < 1e-8);

	DiskBVP bvp(g, fo.A, fo.B, fo.F, fo.l[0], fo.gamma[0]);
	REQUIRE(bvp.index() == -1);
	auto sol = bvp.solve();
	CHECK(sol.feasible);
	auto w = chart_pullback(chart, sol.w);
	CHECK(max_cx_err(g, w, [](Cx z) { return 2.0 * z; }) < 1e-4);

	auto pot = reconstruct_potential(g, w, Cx(0), 0.0);
	CHECK(pot.path_mismatch < 1e-5);
	double uerr = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			Cx z = g.point(i, j);
			double want = z.real() * z.real() - z.imag() * z.imag();
			uerr = std::max(uerr, std::abs(pot.U[g.idx(i, j)] - want));
		}
	CHECK(uerr < 1e-5);
}

TEST_CASE("reduction matches direct differentiation of the chart") {
	PolarGrid g(0.0, 32, 128);
	auto co = tilted_laplacian(g);
	co.d = rfield(g, [](Cx z) { return 0.3 + 0.2 * z.real(); });
	co.e = rfield(g, [](Cx z) { return -0.4 * z.imag(); });
	co.f = rfield(g, [](Cx z) { return 0.2 * z.real(); });
	auto q = beltrami_coefficient(g, co);
	auto chart = isothermal_map(g, q);

	ObliqueBC bc;
	bc.Upsilon = {outward_normal(g)};
	bc.gamma = {std::vector<double>(g.nth, 0.0)};
	auto fo = oblique_to_first_order(g, co, bc, chart);

	// apply the original operator to the chart by brute force and divide by
	// the same normalizer; the zero order coefficient must agree
	auto dx = [&](const std::vector<Cx>& f) {
		auto a = dz_field(g, f), b = dbar_field(g, f);
		for (std::size_t p = 0; p < g.size(); ++p) a[p] += b[p];
		return a;
	};
	auto dy = [&](const std::vector<Cx>& f) {
		auto a = dz_field(g, f), b = dbar_field(g, f);
		for (std::size_t p = 0; p < g.size(); ++p) a[p] = Cx(0, 1) * (a[p] - b[p]);
		return a;
	};
	const auto& psi = chart.psi();
	auto px = dx(psi), py = dy(psi);
	auto pxx = dx(px), pxy = dy(px), pyy = dy(py);
	std::size_t N = g.size();
	std::vector<Cx> Asrc(N), Fsrc(N);
	for (std::size_t p = 0; p < N; ++p) {
		double s = co.a[p] + co.c[p];
		Cx alpha(co.a[p] - co.c[p], 2 * co.b[p]);
		double lam = 2 * std::norm(chart.psi_z()[p]) *
		             (s * (1 + std::norm(q[p])) - 2 * (std::conj(alpha) * q[p]).real());
		Cx l2 = co.a[p] * pxx[p] + 2 * co.b[p] * pxy[p] + co.c[p] * pyy[p];
		Cx l1 = co.d[p] * px[p] + co.e[p] * py[p];
		Asrc[p] = (l2 + l1) / lam;
		Fsrc[p] = 2.0 * co.f[p] / lam;
	}
	FieldInterp iA(g, Asrc), iF(g, Fsrc);

	for (std::size_t j = 0; j < g.nth; j += 16) {
		std::size_t p = g.idx(g.nr / 2, j);
		Cx z = chart.inverse(g.point(g.nr / 2, j));
		CHECK(std::abs(fo.A[p] - iA(z)) < 1e-5);
		CHECK(std::abs(fo.F[p] - iF(z)) < 1e-7);
		CHECK(fo.B[p] == std::conj(fo.A[p]));
	}
}

TEST_CASE("gradient field potentials") {
	PolarGrid g(0.0, 24, 64);
	auto w = g.sample([](Cx z) { return 2.0 * z; });
	Cx z0(0.3, 0.1);
	double u0 = z0.real() * z0.real() - z0.imag() * z0.imag();
	auto pot = reconstruct_potential(g, w, z0, u0);
	CHECK(pot.moments.empty());
	CHECK(pot.path_mismatch < 1e-12);
	double err = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			Cx z = g.point(i, j);
			err = std::max(err, std::abs(pot.U[g.idx(i, j)] -
			                             (z.real() * z.real() - z.imag() * z.imag())));
		}
	CHECK(err < 1e-12);

	auto flat = reconstruct_potential(g, std::vector<Cx>(g.size(), Cx(0)), Cx(0), 7.0);
	for (double v : flat.U) CHECK(std::abs(v - 7.0) < 1e-13);

	PolarGrid ann(0.3, 24, 64);
	auto winv = ann.sample([](Cx z) { return 1.0 / z; });
	auto mom = circulation_moments(ann, winv);
	REQUIRE(mom.size() == 1);
	CHECK(std::abs(mom[0]) < 1e-12);
	auto lp = reconstruct_potential(ann, winv, Cx(1.0, 0.0), 0.0);
	CHECK(std::abs(lp.moments[0]) < 1e-12);
	CHECK(lp.path_mismatch < 1e-10);
	double lerr = 0;
	for (std::size_t i = 0; i < ann.nr; ++i)
		for (std::size_t j = 0; j < ann.nth; ++j)
			lerr = std::max(lerr, std::abs(lp.U[ann.idx(i, j)] - std::log(ann.rad.r[i])));
	CHECK(lerr < 1e-10);

	auto wmv = ann.sample([](Cx z) { return Cx(0, 1) / z; });
	CHECK(std::abs(circulation_moments(ann, wmv)[0] + 2 * PI) < 1e-12);
	CHECK(thrown_code([&] { reconstruct_potential(ann, wmv, Cx(1.0, 0.0), 0.0); }) == ErrorCode::MultivaluedPotential);
}

TEST_CASE("oblique problem with variable principal part end to end") {
	// (1 + 0.1x) u_xx + 0.1y u_xy + u_yy = 0.2x with du/dn from u = x^2 - y^2
	PolarGrid g(0.0, 32, 128);
	auto co = tilted_laplacian(g);
	co.f = rfield(g, [](Cx z) { return 0.2 * z.real(); });
	auto q = beltrami_coefficient(g, co);
	auto chart = isothermal_map(g, q);

	ObliqueBC bc;
	bc.Upsilon = {outward_normal(g)};
	bc.gamma = {oblique_data(g, bc.Upsilon[0], [](Cx z) { return 2.0 * z; })};
	auto fo = oblique_to_first_order(g, co, bc, chart);
	REQUIRE(fo.index == -1);

	SolveOptions opt;
	opt.feas_tol = 1e-4;
	DiskBVP bvp(g, fo.A, fo.B, fo.F, fo.l[0], fo.gamma[0], opt);
	REQUIRE(bvp.index() == -1);
	auto sol = bvp.solve();
	CHECK(sol.feasible);
	REQUIRE(sol.functionals.size() == 1);
	CHECK(std::abs(sol.functionals[0]) < 1e-4);

	auto w = chart_pullback(chart, sol.w);
	CHECK(max_cx_err(g, w, [](Cx z) { return 2.0 * z; }) < 1e-4);

	auto pot = reconstruct_potential(g, w, Cx(0), 0.0);
	CHECK(pot.path_mismatch < 1e-4);
	double uerr = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j) {
			Cx z = g.point(i, j);
			uerr = std::max(uerr, std::abs(pot.U[g.idx(i, j)] -
			                               (z.real() * z.real() - z.imag() * z.imag())));
		}
	CHECK(uerr < 1e-4);
}
