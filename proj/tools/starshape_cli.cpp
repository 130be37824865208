// Batch front-end. A command picks the pipeline; everything else is flat
// key=value configuration, taken from --config and/or --key value overrides.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "starshape/experiments.hpp"

namespace {

// every unregistered --key value (or --key=value) token pair becomes a
// config override; anything else is a usage error
void apply_overrides(starshape::Config& cfg,
                     const std::vector<std::string>& toks) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t.size() < 3 || t[0] != '-' || t[1] != '-')
      throw starshape::ConfigError("expected --key value, got '" + t + "'");
    std::string body = t.substr(2), key, value;
    std::size_t eq = body.find('=');
    if (eq != std::string::npos) {
      key = body.substr(0, eq);
      value = body.substr(eq + 1);
    } else {
      key = body;
      if (++i >= toks.size())
        throw starshape::ConfigError("flag --" + key + " needs a value");
      value = toks[i];
    }
    cfg.set(key, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "densities with star-shaped level sets: exact sampling and tail "
      "dependence diagnostics"};
  app.allow_extras();
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");

  struct Cmd {
    const char* name;
    const char* desc;
  };
  const Cmd cmds[] = {
      {"shape-info", "coordinate extrema and volume of a shape"},
      {"blunt", "bluntness verdict for a planar projection"},
      {"sample", "draw n points and write them out"},
      {"cloud", "scaled sample cloud and its convergence report"},
      {"lambda", "upper tail dependence curve over quantile levels"},
      {"sum", "sum-exceedance criterion over cloud sizes"},
      {"record", "probability that the coordinatewise max is a sample point"},
      {"overlap", "probability that the top-k sets of both coordinates meet"},
      {"heavy", "tail exponent fit from scaled coordinatewise maxima"},
      {"figure1a", "gaussian ellipse cloud, edge, and convergence picture"},
      {"figure1b", "meta-t cloud against its onion-shaped limit body"},
  };
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.desc);
    sub->allow_extras();
    sub->add_option("--config", config_path, "flat key=value config file");
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    starshape::Config cfg;
    if (!config_path.empty()) cfg = starshape::Config::from_file(config_path);
    apply_overrides(cfg, app.remaining());
    for (const CLI::App* sub : app.get_subcommands()) {
      apply_overrides(cfg, sub->remaining());
      cfg.set("command", sub->get_name());
    }
    return starshape::run(std::move(cfg), std::cout, std::cerr);
  } catch (const starshape::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
