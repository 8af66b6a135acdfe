#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  using namespace mlp::cli;
  CLI::App app{"mlplab: multilinear square functions and BMO/BLO experiments"};
  app.set_help_all_flag("--help-all");

  std::string command;
  std::vector<std::string> tokens;
  std::string config_file;
  app.add_option("command", command,
                 "validate-kernel | compute | norms | verify | sweep | refine");
  app.add_option("settings", tokens, "extra key=value settings");
  app.add_option("-c,--config", config_file, "configuration file")->check(CLI::ExistingFile);

  KeyValues flags;
  for (const auto& key : config_keys()) {
    if (key == "command") continue;
    app.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags[key] = v; },
        "overrides " + key);
  }
  CLI11_PARSE(app, argc, argv);

  std::string source;
  try {
    KeyValues kv;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      std::stringstream ss;
      ss << in.rdbuf();
      source = ss.str();
      if (!source.empty() && source.back() != '\n') source += '\n';
      kv = parse_tokens(source);
    }
    std::string extra;
    for (const auto& t : tokens) extra += t + "\n";
    for (const auto& [key, value] : parse_tokens(extra)) kv[key] = value;
    source += extra;
    if (!command.empty()) {
      kv["command"] = command;
      source += "command=" + command + "\n";
    }
    for (const auto& [key, value] : flags) {
      kv[key] = value;
      source += key + "=" + value + "\n";
    }
    const RunConfig config = resolve(kv);
    const RunResult result = run(config, source, std::cout);
    if (!result.failures.empty()) {
      std::cerr << result.failures.size() << " check(s) failed; see " << config.out
                << "/failures.csv\n";
    }
    return result.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
