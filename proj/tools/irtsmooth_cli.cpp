// Command-line driver. Talks to the library through the C API only.

#include "irtsmooth/irtsmooth.h"

#include <CLI11.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

struct OptionSpec
{
  const char* name;
  const char* help;
};

// Options shared by the subcommands that load a response matrix.
const std::vector<OptionSpec> kDataOptions = {
  { "key", "Correct options (list or file), one per item or one for all" },
  { "format", "Item formats: mc, rating, nominal (or 1, 2, 3)" },
  { "weights", "File with one row of option weights per item" },
  { "option-counts", "Declared option count per item (list or file)" },
  { "exclude-columns", "Comma-separated non-item columns" },
  { "na-token", "Cell text marking an omitted answer (default NA)" },
  { "miss", "Missing policy: option, runif, rmultinom, omit" },
  { "na-weight", "Weight of the synthetic missing option" },
  { "seed", "Seed for random imputation" },
  { "kernel", "Kernel: gaussian, uniform, quadratic" },
  { "bandwidth", "rot, cv, or a list of bandwidths" },
  { "nevalpoints", "Number of evaluation points (default 51)" },
  { "evalpoints", "Explicit evaluation points (list or file)" },
  { "theta-dist", "Latent distribution, e.g. normal:0,1" },
  { "rank-stat", "Subject ranking statistic: total, mean, median" },
  { "subject-ranks", "External subject ranking (list or file)" },
  { "items", "Items to plot (labels or 1-based indices)" },
  { "out", "Output directory" },
};

const std::vector<OptionSpec> kAnalysisOptions = {
  { "alpha", "Confidence level complement (default 0.05)" },
  { "axis", "x axis: scores or distribution" },
  { "plot", "Plots: occ,eis,rcc,triangle,tetrahedron,pca,ets,sd,density,"
            "dif-occ,dif-eis,dif-ets,dif-qq,dif-density or all" },
  { "subjects", "1-based subjects for credibility curves" },
};

const std::vector<OptionSpec> kDifOptions = {
  { "groups", "Group column name or file with one label per subject" },
  { "min-group-size", "Smallest group kept (default 30)" },
};

const std::vector<OptionSpec> kSimulateOptions = {
  { "items-spec", "Item specification file ('2pl a b' / 'grm a b1 ...')" },
  { "n", "Number of subjects" },
  { "seed", "Random seed" },
  { "out", "Output CSV path" },
};

struct Command
{
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::string data;
  bool exact = false;
};

void add_options(Command& cmd, const std::vector<OptionSpec>& specs)
{
  for (const auto& s : specs)
    cmd.app->add_option(std::string("--") + s.name, cmd.values[s.name], s.help);
}

int report_failure(irts_status status)
{
  std::fprintf(stderr, "error: %s\n", irts_last_error());
  const std::string module = irts_last_error_module();
  if (!module.empty())
    std::fprintf(stderr, "  module: %s\n  operation: %s\n", module.c_str(),
                 irts_last_error_operation());
  const std::string location = irts_last_error_location();
  if (!location.empty())
    std::fprintf(stderr, "  location: %s\n", location.c_str());
  std::fprintf(stderr, "  status: %s\n", irts_status_name(status));
  return static_cast<int>(status);
}

using ConfigPtr = std::unique_ptr<irts_config, decltype(&irts_config_destroy)>;

std::string env_name(const std::string& option)
{
  std::string var = "IRTSMOOTH_";
  for (char c : option)
    var += c == '-' ? '_'
                    : static_cast<char>(
                        std::toupper(static_cast<unsigned char>(c)));
  return var;
}

// Environment variables fill in options that were not given as flags.
irts_status configure(irts_config* config, const Command& cmd)
{
  if (!cmd.data.empty())
    if (auto st = irts_config_set(config, "data", cmd.data.c_str());
        st != IRTS_OK)
      return st;
  if (cmd.exact)
    if (auto st = irts_config_set(config, "exact", "1"); st != IRTS_OK)
      return st;
  for (const auto& [key, value] : cmd.values) {
    std::string text = value;
    if (!cmd.app->count("--" + key)) {
      const char* env = std::getenv(env_name(key).c_str());
      if (!env)
        continue;
      text = env;
    }
    if (text.empty())
      continue;
    if (auto st = irts_config_set(config, key.c_str(), text.c_str());
        st != IRTS_OK)
      return st;
  }
  return IRTS_OK;
}

void print_model(const irts_model* model)
{
  std::printf("subjects: %zu\nitems: %zu\nevaluation points: %zu\n",
              irts_model_n_subjects(model), irts_model_n_items(model),
              irts_model_n_points(model));
  std::printf("manifest: %s\n", irts_model_manifest_path(model));
  for (size_t i = 0; i < irts_model_n_warnings(model); ++i)
    std::fprintf(stderr, "warning: %s\n", irts_model_warning(model, i));
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Kernel-smoothing item response theory analysis" };
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(irts_version()));

  Command analyze{ app.add_subcommand("analyze", "Estimate and emit curves") };
  Command dif{ app.add_subcommand("dif", "Group-wise curves for DIF") };
  Command cv{ app.add_subcommand("cv-curve", "Cross-validation profile") };
  Command sim{ app.add_subcommand("simulate", "Simulate parametric data") };

  for (Command* c : { &analyze, &dif, &cv }) {
    c->app->add_option("data", c->data, "Response CSV file")->required();
    add_options(*c, kDataOptions);
    c->app->add_flag("--exact", c->exact, "Use the unbinned estimator");
  }
  for (Command* c : { &analyze, &dif })
    add_options(*c, kAnalysisOptions);
  add_options(dif, kDifOptions);
  add_options(sim, kSimulateOptions);

  CLI11_PARSE(app, argc, argv);

  ConfigPtr config(irts_config_create(), &irts_config_destroy);
  if (!config) {
    std::fprintf(stderr, "error: out of memory\n");
    return static_cast<int>(IRTS_ERR_INTERNAL);
  }

  for (Command* c : { &analyze, &dif, &cv, &sim }) {
    if (!c->app->parsed())
      continue;
    if (auto st = configure(config.get(), *c); st != IRTS_OK)
      return report_failure(st);
    if (c == &sim) {
      if (auto st = irts_simulate(config.get()); st != IRTS_OK)
        return report_failure(st);
      return 0;
    }
    if (c == &cv) {
      if (auto st = irts_cv_curve(config.get()); st != IRTS_OK)
        return report_failure(st);
      return 0;
    }
    irts_model* model = nullptr;
    const auto st = c == &dif ? irts_run_dif(config.get(), &model)
                              : irts_run_analysis(config.get(), &model);
    if (st != IRTS_OK)
      return report_failure(st);
    print_model(model);
    irts_model_destroy(model);
    return 0;
  }
  return 0;
}
