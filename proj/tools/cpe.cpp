#include <iostream>

#include "CLI11.hpp"
#include "cpe/driver.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cpe::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-surface compressible flow solver on the fixed slab"};
  app.require_subcommand(1);

  std::string run_config, verify_config, icgen_config, icgen_out;
  auto* run = app.add_subcommand("run", "advance a configured simulation");
  run->add_option("config", run_config, "path to key = value config")->required();
  auto* verify = app.add_subcommand("verify", "run the inequality batteries");
  verify->add_option("config", verify_config, "path to key = value config")->required();
  auto* icgen = app.add_subcommand("icgen", "write an initial-condition snapshot");
  icgen->add_option("config", icgen_config, "path to key = value config")->required();
  icgen->add_option("out", icgen_out, "output snapshot path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const std::string text = read_file(run_config);
      return cpe::run_simulation(cpe::parse_config(text), text);
    }
    if (verify->parsed()) {
      return cpe::run_verify(cpe::parse_config(read_file(verify_config)));
    }
    return cpe::run_icgen(cpe::parse_config(read_file(icgen_config)), icgen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
