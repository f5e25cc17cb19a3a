#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "noiseforge/config.hpp"
#include "noiseforge/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void print_error_record(const std::string& kind, const std::string& message,
                        const std::vector<noiseforge::ConfigError>* errors = nullptr) {
  nlohmann::json doc;
  doc["error"] = kind;
  doc["message"] = message;
  if (errors) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : *errors) list.push_back({{"path", e.path}, {"message", e.message}});
    doc["violations"] = list;
  }
  std::fprintf(stderr, "%s\n", doc.dump(2).c_str());
}

int run_mode(const std::string& mode_name, const std::string& config_path,
             const std::string& out_dir, bool svg, long seed_override, bool seed_given) {
  try {
    noiseforge::ExperimentConfig cfg = noiseforge::parse_config(config_path);
    const std::map<std::string, noiseforge::RunMode> modes = {
        {"characterize", noiseforge::RunMode::Characterize},
        {"plan", noiseforge::RunMode::Plan},
        {"simulate", noiseforge::RunMode::Simulate},
        {"mitigate", noiseforge::RunMode::Mitigate},
        {"cost", noiseforge::RunMode::Cost},
    };
    const auto wanted = modes.at(mode_name);
    if (cfg.mode != wanted) {
      print_error_record("config", "config mode does not match the subcommand " + mode_name);
      return kExitConfig;
    }
    if (seed_given) {
      cfg.run.seed = static_cast<uint64_t>(seed_override);
      cfg.run.seed_given = true;
    }
    const noiseforge::PipelineResult result = noiseforge::run_pipeline(cfg, out_dir, svg);
    for (const auto& artifact : result.artifacts) std::printf("%s\n", artifact.c_str());
    return kExitOk;
  } catch (const noiseforge::ConfigException& e) {
    print_error_record("config", "experiment config is invalid", &e.errors);
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    print_error_record("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    print_error_record("numerical", e.what());
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noiseforge: noise-assisted open-system simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", svg_flag = "on";
  long seed = 0;
  bool seed_given = false;

  for (const std::string mode : {"characterize", "plan", "simulate", "mitigate", "cost"}) {
    CLI::App* sub = app.add_subcommand(mode, mode + std::string(" pipeline"));
    sub->add_option("--config", config_path, "experiment config path")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--svg", svg_flag, "emit SVG plots: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&seed_given](const std::string&) { seed_given = true; });
  }

  CLI11_PARSE(app, argc, argv);

  const std::string mode = app.get_subcommands().front()->get_name();
  return run_mode(mode, config_path, out_dir, svg_flag == "on", seed, seed_given);
}
