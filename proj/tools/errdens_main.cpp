// errdens command line tool. Thin wrapper over the C API: parses the mode,
// the config file path and --key value overrides, then hands everything to
// errdens_run().

#include <errdens.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
  CLI::App app{ "Kernel estimation of the regression error density "
                "from estimated residuals" };
  app.allow_extras();

  std::string mode;
  std::string config_path;
  app.add_option("mode", mode, "estimate | rate | gap | normality | supnorm")
    ->required();
  app.add_option("--config", config_path, "flat key=value configuration file");

  CLI11_PARSE(app, argc, argv);

  const std::vector<std::string> extras = app.remaining();
  std::vector<std::string> keys, values;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& token = extras[i];
    if (token.rfind("--", 0) != 0 || token.size() <= 2) {
      std::fprintf(stderr, "error: InvalidArgument: expected --key value, got '%s'\n",
                   token.c_str());
      return 1;
    }
    if (i + 1 >= extras.size()) {
      std::fprintf(stderr, "error: InvalidArgument: missing value for '%s'\n",
                   token.c_str());
      return 1;
    }
    keys.push_back(token.substr(2));
    values.push_back(extras[++i]);
  }
  // the positional mode always wins over any mode key in the file
  keys.push_back("mode");
  values.push_back(mode);

  std::vector<const char*> key_ptrs, value_ptrs;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    key_ptrs.push_back(keys[i].c_str());
    value_ptrs.push_back(values[i].c_str());
  }

  const errdens_status status =
    errdens_run(config_path.empty() ? nullptr : config_path.c_str(), key_ptrs.data(),
                value_ptrs.data(), key_ptrs.size());
  if (status != ERRDENS_OK) {
    std::fprintf(stderr, "error: %s: %s\n", errdens_status_name(status),
                 errdens_last_error());
    return static_cast<int>(status);
  }
  return 0;
}
