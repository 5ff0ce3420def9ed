#include "irtsmooth/irtsmooth.h"

#include "irtsmooth/analysis.hpp"
#include "irtsmooth/emit.hpp"
#include "irtsmooth/error.hpp"
#include "irtsmooth/simulation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <new>

struct irts_config
{
  irtsmooth::AnalysisConfig config;
};

struct irts_model
{
  irtsmooth::Model model;
  std::string manifest_path;
};

namespace {

struct LastError
{
  std::string message;
  std::string module;
  std::string operation;
  std::string location;
};

thread_local LastError last_error;

irts_status to_status(irtsmooth::ErrorKind kind)
{
  using irtsmooth::ErrorKind;
  switch (kind) {
    case ErrorKind::parse:
      return IRTS_ERR_PARSE;
    case ErrorKind::domain:
      return IRTS_ERR_DOMAIN;
    case ErrorKind::input:
      return IRTS_ERR_INPUT;
    case ErrorKind::degenerate:
      return IRTS_ERR_DEGENERATE;
    case ErrorKind::empty_neighborhood:
      return IRTS_ERR_EMPTY_NEIGHBORHOOD;
    case ErrorKind::io:
      return IRTS_ERR_IO;
  }
  return IRTS_ERR_INTERNAL;
}

template<class F>
irts_status guarded(F&& body)
{
  last_error = {};
  try {
    body();
    return IRTS_OK;
  } catch (const irtsmooth::Error& e) {
    last_error = { e.what(), e.module(), e.operation(), e.location() };
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = { "out of memory", "", "", "" };
    return IRTS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = { e.what(), "", "", "" };
    return IRTS_ERR_INTERNAL;
  } catch (...) {
    last_error = { "unknown failure", "", "", "" };
    return IRTS_ERR_INTERNAL;
  }
}

irts_status null_argument(const char* what)
{
  last_error = { std::string("null argument: ") + what, "", "", "" };
  return IRTS_ERR_NULL;
}

size_t copy_out(const std::vector<double>& values, double* out, size_t capacity)
{
  if (out)
    std::copy_n(values.begin(), std::min(capacity, values.size()), out);
  return values.size();
}

irts_status run(const irts_config* config, irts_model** model, bool dif)
{
  if (!config)
    return null_argument("config");
  if (!model)
    return null_argument("model");
  *model = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<irts_model>();
    handle->model = irtsmooth::run_analysis(config->config, dif);
    const auto manifest =
      irtsmooth::write_analysis(handle->model, config->config.out_dir);
    handle->manifest_path = manifest.root + "/manifest.json";
    *model = handle.release();
  });
}

} // namespace

extern "C" {

irts_config* irts_config_create(void)
{
  return new (std::nothrow) irts_config{};
}

void irts_config_destroy(irts_config* config)
{
  delete config;
}

irts_status irts_config_set(irts_config* config, const char* key,
                            const char* value)
{
  if (!config)
    return null_argument("config");
  if (!key || !value)
    return null_argument(!key ? "key" : "value");
  return guarded([&] { irtsmooth::set_option(config->config, key, value); });
}

irts_status irts_config_apply_env(irts_config* config)
{
  if (!config)
    return null_argument("config");
  return guarded([&] {
    for (const auto& name : irtsmooth::option_names()) {
      std::string var = "IRTSMOOTH_";
      for (char c : name)
        var += c == '-' ? '_'
                        : static_cast<char>(
                            std::toupper(static_cast<unsigned char>(c)));
      if (const char* v = std::getenv(var.c_str()))
        irtsmooth::set_option(config->config, name, v);
    }
  });
}

irts_status irts_run_analysis(const irts_config* config, irts_model** model)
{
  return run(config, model, false);
}

irts_status irts_run_dif(const irts_config* config, irts_model** model)
{
  return run(config, model, true);
}

irts_status irts_cv_curve(const irts_config* config)
{
  if (!config)
    return null_argument("config");
  return guarded([&] {
    const auto profile = irtsmooth::cv_profile(config->config);
    irtsmooth::write_cv_profile(profile, config->config.out_dir);
  });
}

irts_status irts_simulate(const irts_config* config)
{
  if (!config)
    return null_argument("config");
  return guarded([&] {
    const auto& cfg = config->config;
    std::ifstream spec(cfg.items_spec);
    if (!spec)
      throw irtsmooth::Error(irtsmooth::ErrorKind::io, "simulation",
                             "simulate", "cannot open '" + cfg.items_spec + "'");
    const auto items = irtsmooth::parse_item_specs(spec);
    const auto sim =
      irtsmooth::simulate_responses(items, cfg.simulate_n, cfg.seed);
    std::ofstream out(cfg.out_dir, std::ios::binary | std::ios::trunc);
    out << irtsmooth::responses_csv(sim.responses);
    out.close();
    if (!out)
      throw irtsmooth::Error(irtsmooth::ErrorKind::io, "simulation",
                             "simulate", "cannot write '" + cfg.out_dir + "'");
  });
}

void irts_model_destroy(irts_model* model)
{
  delete model;
}

size_t irts_model_n_subjects(const irts_model* model)
{
  return model ? model->model.prepared.data.n_subjects() : 0;
}

size_t irts_model_n_items(const irts_model* model)
{
  return model ? model->model.prepared.data.n_items() : 0;
}

size_t irts_model_n_points(const irts_model* model)
{
  return model ? model->model.curves.n_points() : 0;
}

size_t irts_model_n_options(const irts_model* model, size_t item)
{
  if (!model || item >= model->model.curves.n_items())
    return 0;
  return static_cast<size_t>(model->model.curves.items[item].occ.cols());
}

size_t irts_model_points(const irts_model* model, double* out, size_t capacity)
{
  return model ? copy_out(model->model.curves.points, out, capacity) : 0;
}

size_t irts_model_thetas(const irts_model* model, double* out, size_t capacity)
{
  return model ? copy_out(model->model.ability.thetas, out, capacity) : 0;
}

size_t irts_model_bandwidths(const irts_model* model, double* out,
                             size_t capacity)
{
  return model ? copy_out(model->model.bandwidths, out, capacity) : 0;
}

size_t irts_model_ets(const irts_model* model, double* out, size_t capacity)
{
  return model ? copy_out(model->model.ets, out, capacity) : 0;
}

size_t irts_model_theta_ml(const irts_model* model, double* out,
                           size_t capacity)
{
  if (!model)
    return 0;
  std::vector<double> v;
  for (const auto& s : model->model.subjects)
    v.push_back(s.theta_ml);
  return copy_out(v, out, capacity);
}

size_t irts_model_score_ml(const irts_model* model, double* out,
                           size_t capacity)
{
  if (!model)
    return 0;
  std::vector<double> v;
  for (const auto& s : model->model.subjects)
    v.push_back(s.score_ml);
  return copy_out(v, out, capacity);
}

size_t irts_model_occ(const irts_model* model, size_t item, double* out,
                      size_t capacity)
{
  if (!model || item >= model->model.curves.n_items())
    return 0;
  const auto& occ = model->model.curves.items[item].occ;
  std::vector<double> v;
  v.reserve(static_cast<size_t>(occ.size()));
  for (Eigen::Index s = 0; s < occ.rows(); ++s)
    for (Eigen::Index l = 0; l < occ.cols(); ++l)
      v.push_back(occ(s, l));
  return copy_out(v, out, capacity);
}

const char* irts_model_manifest_path(const irts_model* model)
{
  return model ? model->manifest_path.c_str() : "";
}

size_t irts_model_n_warnings(const irts_model* model)
{
  return model ? model->model.warnings.size() : 0;
}

const char* irts_model_warning(const irts_model* model, size_t i)
{
  if (!model || i >= model->model.warnings.size())
    return "";
  return model->model.warnings[i].c_str();
}

const char* irts_last_error(void)
{
  return last_error.message.c_str();
}

const char* irts_last_error_module(void)
{
  return last_error.module.c_str();
}

const char* irts_last_error_operation(void)
{
  return last_error.operation.c_str();
}

const char* irts_last_error_location(void)
{
  return last_error.location.c_str();
}

const char* irts_status_name(irts_status status)
{
  switch (status) {
    case IRTS_OK:
      return "ok";
    case IRTS_ERR_PARSE:
      return "parse";
    case IRTS_ERR_DOMAIN:
      return "domain";
    case IRTS_ERR_INPUT:
      return "input";
    case IRTS_ERR_DEGENERATE:
      return "degenerate";
    case IRTS_ERR_EMPTY_NEIGHBORHOOD:
      return "empty_neighborhood";
    case IRTS_ERR_IO:
      return "io";
    case IRTS_ERR_INTERNAL:
      return "internal";
    case IRTS_ERR_NULL:
      return "null";
  }
  return "unknown";
}

const char* irts_version(void)
{
  return "0.1.0";
}

} // extern "C"
