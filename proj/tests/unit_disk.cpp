#include <catch2/catch_amalgamated.hpp>

#include "rh/calculus.hpp"
#include "rh/diskbvp.hpp"

using namespace rh;

namespace {

double max_field_err(const PolarGrid& g, const std::vector<Cx>& got,
                     const std::function<Cx(Cx)>& want) {
	double m = 0;
	for (std::size_t i = 0; i < g.nr; ++i)
		for (std::size_t j = 0; j < g.nth; ++j)
			m = std::max(m, std::abs(got[g.idx(i, j)] - want(g.point(i, j))));
	return m;
}

std::vector<Cx> unit_tangent_dir(const PolarGrid& g, int pw) {
	std::vector<Cx> l(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) l[j] = ipow(std::polar(1.0, g.theta[j]), pw);
	return l;
}

} // namespace

TEST_CASE("polar spectral derivatives") {
	PolarGrid g(0.0, 16, 64);
	auto f = g.sample([](Cx z) { return z * z * std::conj(z); });
	auto db = dbar_field(g, f);
	auto dz = dz_field(g, f);
	CHECK(max_field_err(g, db, [](Cx z) { return z * z; }) < 1e-11);
	CHECK(max_field_err(g, dz, [](Cx z) { return 2.0 * z * std::conj(z); }) < 1e-11);

	auto e = g.sample([](Cx z) { return std::exp(z); });
	CHECK(max_field_err(g, dbar_field(g, e), [](Cx) { return Cx(0); }) < 1e-11);
}

TEST_CASE("analytic boundary problem with pins recovers z^2") {
	PolarGrid g(0.0, 24, 64);
	std::vector<double> gamma(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) gamma[j] = std::cos(g.theta[j]);
	DiskBVP bvp(g, {}, {}, {}, unit_tangent_dir(g, 1), gamma);
	REQUIRE(bvp.index() == 1);

	CHECK(field_span_rank(g, bvp.homogeneous().fields) == 3);

	std::vector<InteriorPin> ip{{Cx(0.3, 0.0), Cx(0.09, 0.0)}};
	std::vector<BoundaryPin> bp{{0.7, std::sin(0.7)}};
	auto sol = bvp.solve(ip, bp);
	CHECK(max_field_err(g, sol.w, [](Cx z) { return z * z; }) < 1e-12);
	for (std::size_t j = 0; j < g.nth; ++j)
		CHECK(std::abs(sol.trace[j] - std::polar(1.0, 2 * g.theta[j])) < 1e-12);
}

TEST_CASE("coefficient problem recovers a manufactured solution") {
	PolarGrid g(0.0, 32, 128);
	auto wex = [](Cx z) { return std::exp(z) + 0.5 * std::conj(z); };
	auto Af = [](Cx z) { return Cx(0.2, 0.0) + Cx(0, 0.1) * z; };
	Cx Bc(0.1, -0.05);
	auto A = g.sample(Af);
	std::vector<Cx> B(g.size(), Bc);
	auto F = g.sample([&](Cx z) { return 0.5 + Af(z) * wex(z) + Bc * std::conj(wex(z)); });
	std::vector<double> gamma(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) {
		Cx t = std::polar(1.0, g.theta[j]);
		gamma[j] = (std::conj(t) * wex(t)).real();
	}
	DiskBVP bvp(g, A, B, F, unit_tangent_dir(g, 1), gamma);
	REQUIRE(bvp.index() == 1);

	Cx zp(0.4, -0.2);
	Cx tb = std::polar(1.0, 1.3);
	std::vector<InteriorPin> ip{{zp, wex(zp)}};
	std::vector<BoundaryPin> bp{{1.3, (std::conj(tb) * wex(tb)).imag()}};
	auto sol = bvp.solve(ip, bp);
	CHECK(max_field_err(g, sol.w, wex) < 1e-8);
	double tre = 0;
	for (std::size_t j = 0; j < g.nth; ++j)
		tre = std::max(tre, std::abs(sol.trace[j] - wex(std::polar(1.0, g.theta[j]))));
	CHECK(tre < 1e-8);
}

TEST_CASE("negative index: unique solve and solvability functionals") {
	PolarGrid g(0.0, 24, 64);
	std::vector<double> g2(g.nth), g1(g.nth, 1.0);
	for (std::size_t j = 0; j < g.nth; ++j) g2[j] = std::cos(2 * g.theta[j]);

	DiskBVP feas(g, {}, {}, {}, unit_tangent_dir(g, -1), g2);
	REQUIRE(feas.index() == -1);
	auto sol = feas.solve();
	REQUIRE(sol.functionals.size() == 1);
	CHECK(std::abs(sol.functionals[0]) < 1e-12);
	CHECK(sol.feasible);
	CHECK(max_field_err(g, sol.w, [](Cx z) { return z; }) < 1e-12);

	DiskBVP infeas(g, {}, {}, {}, unit_tangent_dir(g, -1), g1);
	auto bad = infeas.solve();
	REQUIRE(bad.functionals.size() == 1);
	CHECK(std::abs(bad.functionals[0] - PI) < 1e-10);
	CHECK_FALSE(bad.feasible);
	// the produced field cannot meet the boundary condition
	double bcres = 0;
	for (std::size_t j = 0; j < g.nth; ++j) {
		Cx t = std::polar(1.0, g.theta[j]);
		bcres = std::max(bcres, std::abs((t * bad.trace[j]).real() - 1.0));
	}
	CHECK(bcres > 0.5);
}

TEST_CASE("negative index with coefficients, consistent data") {
	PolarGrid g(0.0, 32, 128);
	auto wex = [](Cx z) { return z * z + 0.3 * std::conj(z); };
	Cx Ac(0.2, 0.0), Bc(0.0, 0.1);
	std::vector<Cx> A(g.size(), Ac), B(g.size(), Bc);
	auto F = g.sample([&](Cx z) { return Cx(0.3) + Ac * wex(z) + Bc * std::conj(wex(z)); });
	std::vector<double> gamma(g.nth);
	for (std::size_t j = 0; j < g.nth; ++j) {
		Cx t = std::polar(1.0, g.theta[j]);
		gamma[j] = (t * wex(t)).real(); // conj(l) = t for l = conj(t)
	}
	DiskBVP bvp(g, A, B, F, unit_tangent_dir(g, -1), gamma);
	REQUIRE(bvp.index() == -1);
	auto sol = bvp.solve();
	CHECK(sol.feasible);
	CHECK(std::abs(sol.functionals[0]) < 1e-8);
	CHECK(max_field_err(g, sol.w, wex) < 1e-8);
}

TEST_CASE("pin validation and singularity") {
	PolarGrid g(0.0, 16, 64);
	std::vector<double> gamma(g.nth, 0.0);
	DiskBVP bvp(g, {}, {}, {}, unit_tangent_dir(g, 1), gamma);
	CHECK_THROWS_AS(bvp.solve({}, {}), Error);

	std::vector<BoundaryPin> same{{0.5, 0.0}, {0.5, 0.1}, {0.5, 0.2}};
	try {
		bvp.solve({}, same);
		FAIL("coincident pins must be rejected");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::PinningSingular);
	}

	// negative index refuses pins
	DiskBVP neg(g, {}, {}, {}, unit_tangent_dir(g, -1), gamma);
	std::vector<BoundaryPin> one{{0.5, 0.0}};
	CHECK_THROWS_AS(neg.solve({}, one), Error);
}
