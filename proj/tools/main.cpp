#include <iostream>

#include <CLI11.hpp>

#include "pst/cli.hpp"
#include "pst/error.hpp"

int main(int argc, char** argv) {
  pst::RunConfig config;
  std::vector<std::string> betas;
  bool table = false;

  CLI::App app{"Contour expansions and exact oracles for lattice spin models"};
  app.add_option("command", config.command,
                 "validate | groundstates | reduce | contours | peierls | zexact | zcontour | freeenergy | "
                 "correlate | decay | phases | bounds")
      ->required();
  app.add_option("--model", config.model_path, "model file, or the name of a bundled model")->required();
  app.add_option("--beta", betas, "inverse temperatures (integers, fractions or decimals)");
  app.add_option("--kmax", config.kmax, "largest contour support size");
  app.add_option("--box", config.box, "side of the square box or torus");
  app.add_flag("--torus", config.torus, "periodic region instead of a box (zexact)");
  app.add_option("--bc", config.bc, "spin symbol of the constant boundary condition");
  app.add_option("--window", config.window, "richness window, bounds side cap, verification cap");
  app.add_option("--collar", config.collar, "richness collar width");
  app.add_option("--period", config.period, "ground-state period cap");
  app.add_option("--block", config.block, "block size for reduce");
  app.add_option("--cap", config.cap, "enumeration cap");
  app.add_option("--distance", config.distances, "distances for decay");
  app.add_option("--flip", config.flips, "site x,y set to the other ground state (correlate)");
  app.add_flag("--table", table, "print human-readable tables instead of records");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!betas.empty()) {
      config.betas.clear();
      for (const auto& b : betas) config.betas.push_back(pst::parse_rational(b));
    }
  } catch (const pst::Error& e) {
    std::cout << "error code=" << e.code() << " message=\"" << e.what() << "\"\n";
    return pst::kErrorExit;
  }
  config.format = table ? pst::OutputFormat::kTable : pst::OutputFormat::kRecords;
  return pst::run(config, std::cout);
}
