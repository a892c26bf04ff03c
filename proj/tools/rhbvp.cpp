// Command line driver. Subcommands: solve, sweep, verify.
#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
	CLI::App app{"boundary value problem solver"};
	app.require_subcommand(1);

	std::string spec_path, out_dir = ".";
	double res_scale = 1.0;
	int threads = 0;
	std::vector<std::string> reports;

	auto add_common = [&](CLI::App* c) {
		c->add_option("--out", out_dir, "output directory");
		c->add_option("--resolution-scale", res_scale, "grid refinement factor");
		c->add_option("--threads", threads, "worker thread count (0 = hardware)");
	};
	auto* solve = app.add_subcommand("solve", "solve a single problem spec");
	solve->add_option("spec", spec_path, "problem spec file")->required();
	add_common(solve);
	auto* sweep = app.add_subcommand("sweep", "solve a parameterized family spec");
	sweep->add_option("spec", spec_path, "family spec file")->required();
	add_common(sweep);
	auto* verify = app.add_subcommand("verify", "re-check stored reports");
	verify->add_option("reports", reports, "report files")->required();

	CLI11_PARSE(app, argc, argv);
	std::fprintf(stderr, "not implemented yet\n");
	return 2;
}
