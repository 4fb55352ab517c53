// Command line driver for the three experiments.
#include "xfem3d1d/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace xfem3d1d;
  CLI::App app{"XFEM for 3D-1D coupled elliptic problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "assembly threads")->check(CLI::PositiveNumber);
  };
  auto* quad = app.add_subcommand("quad-table", "quadrature errors on the unit cube");
  auto* test1 = app.add_subcommand("test1", "convergence study with a line source");
  auto* test2 = app.add_subcommand("test2", "coupled 3D-1D problem, centreline profiles");
  for (auto* sub : {quad, test1, test2}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string experiment = quad->parsed() ? "quad_table" : (test1->parsed() ? "test1" : "test2");
    const Config file = config_path.empty() ? Config{} : Config::load(config_path);
    ExperimentConfig cfg = ExperimentConfig::from(file, experiment);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.output_dir.empty()) cfg.output_dir = ".";
    if (threads > 0) cfg.threads = threads;

    if (experiment == "quad_table") {
      const auto r = cmd_quad_table(cfg, &std::cout);
      std::cout << "wrote " << (cfg.output_dir / "table1.csv").string() << " in " << r.seconds << " s\n";
    } else if (experiment == "test1") {
      const auto r = cmd_test1(cfg, &std::cout);
      for (const auto& rate : r.rates)
        std::cout << "rate " << rate.method << (rate.method == "FEM" ? "" : "(" + std::to_string(rate.rho) + ")")
                  << ": L2 " << rate.fit_l2 << ", H1 " << rate.fit_h1 << '\n';
      std::cout << "wrote test1_errors.csv, test1_rates.csv in " << r.seconds << " s\n";
    } else {
      const auto r = cmd_test2(cfg, &std::cout);
      std::cout << "wrote test2_profiles.csv in " << r.seconds << " s\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
