#include "irtsmooth/analysis.hpp"

#include "irtsmooth/error.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "cli-io";

// Contents of `value` when it names a readable file, else `value` itself.
std::string list_source(std::string_view value)
{
  const std::filesystem::path path{ std::string(value) };
  std::error_code ec;
  if (!value.empty() && std::filesystem::is_regular_file(path, ec)) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw Error(ErrorKind::io, kModule, "set_option",
                  "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return std::string(value);
}

std::vector<std::string> split_tokens(std::string_view text)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\n' ||
        c == '\r') {
      if (!cur.empty())
        out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    out.push_back(std::move(cur));
  return out;
}

std::vector<int> int_list(std::string_view value, const char* what)
{
  std::istringstream in(list_source(value));
  return read_integer_list(in, what);
}

std::vector<double> double_list(std::string_view value)
{
  std::istringstream in(list_source(value));
  std::vector<double> out;
  for (const auto& row : read_weight_table(in))
    out.insert(out.end(), row.begin(), row.end());
  return out;
}

template<class T>
T parse_number(std::string_view key, std::string_view value)
{
  T v{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size())
    throw Error(ErrorKind::input, kModule, "set_option",
                "bad value '" + std::string(value) + "' for '" +
                  std::string(key) + "'");
  return v;
}

bool parse_flag(std::string_view key, std::string_view value)
{
  if (value == "1" || value == "true" || value == "yes" || value == "on")
    return true;
  if (value == "0" || value == "false" || value == "no" || value == "off")
    return false;
  throw Error(ErrorKind::input, kModule, "set_option",
              "bad boolean '" + std::string(value) + "' for '" +
                std::string(key) + "'");
}

[[noreturn]] void bad_choice(std::string_view key, std::string_view value)
{
  throw Error(ErrorKind::input, kModule, "set_option",
              "unknown value '" + std::string(value) + "' for '" +
                std::string(key) + "'");
}

bool is_file(const std::string& path)
{
  std::error_code ec;
  return !path.empty() && std::filesystem::is_regular_file(path, ec);
}

ScoringScheme make_scheme(const AnalysisConfig& config,
                          const ResponseMatrix& data)
{
  const auto& counts = data.option_counts();
  if (config.weights)
    return scoring_from_weights(*config.weights, counts);
  auto formats = config.formats;
  if (formats.empty()) {
    if (config.key.empty())
      throw Error(ErrorKind::input, kModule, "run_analysis",
                  "supply a key, an item format or a weight table");
    formats = { ItemFormat::multiple_choice };
  }
  auto key = config.key;
  const bool any_mc =
    std::find(formats.begin(), formats.end(), ItemFormat::multiple_choice) !=
    formats.end();
  if (key.empty() && !any_mc)
    key.assign(counts.begin(), counts.end());
  return build_scoring(formats, key, counts);
}

std::vector<std::size_t> resolve_items(const std::vector<std::string>& wanted,
                                       const ResponseMatrix& data)
{
  std::vector<std::size_t> out;
  const auto& labels = data.item_labels();
  if (wanted.empty()) {
    out.resize(labels.size());
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = j;
    return out;
  }
  for (const auto& w : wanted) {
    const auto it = std::find(labels.begin(), labels.end(), w);
    if (it != labels.end()) {
      out.push_back(static_cast<std::size_t>(it - labels.begin()));
      continue;
    }
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), idx);
    if (ec != std::errc{} || ptr != w.data() + w.size() || idx < 1 ||
        idx > labels.size())
      throw Error(ErrorKind::input, kModule, "run_analysis",
                  "unknown item '" + w + "'");
    out.push_back(idx - 1);
  }
  return out;
}

// Per-subject values given either for every ingested row or for the rows
// retained by the missing policy.
template<class T>
std::vector<T> align_to_kept(const std::vector<T>& values,
                             std::size_t raw_n,
                             const std::vector<std::size_t>& kept,
                             const char* what)
{
  if (values.size() == kept.size())
    return values;
  if (values.size() == raw_n) {
    std::vector<T> out;
    out.reserve(kept.size());
    for (auto i : kept)
      out.push_back(values[i]);
    return out;
  }
  throw Error(ErrorKind::input, kModule, "run_analysis",
              std::string(what) + " has " + std::to_string(values.size()) +
                " entries for " + std::to_string(raw_n) + " subjects");
}

struct Prepared
{
  Dataset dataset;
  MissingResult prepared;
  AbilityEstimates ability;
};

IngestOptions ingest_options(const AnalysisConfig& config)
{
  auto options = config.ingest;
  if (!config.groups.empty() && !is_file(config.groups) &&
      std::find(options.non_item_columns.begin(),
                options.non_item_columns.end(),
                config.groups) == options.non_item_columns.end())
    options.non_item_columns.push_back(config.groups);
  return options;
}

Prepared prepare(const AnalysisConfig& config, Dataset dataset)
{
  Prepared p;
  p.dataset = std::move(dataset);
  const auto& raw = p.dataset.responses;
  auto scheme = make_scheme(config, raw);
  scheme.missing_weight = config.na_weight;
  p.prepared = apply_missing_policy(raw, scheme, { config.missing, config.seed });
  std::optional<std::vector<double>> ranks;
  if (config.subject_ranks)
    ranks = align_to_kept(*config.subject_ranks, raw.n_subjects(),
                          p.prepared.kept_subjects, "subject ranks");
  std::optional<std::span<const double>> override;
  if (ranks)
    override = std::span<const double>(*ranks);
  p.ability = estimate_ability(p.prepared.data, p.prepared.scheme,
                               config.distribution, config.rank_statistic,
                               override);
  return p;
}

} // namespace

const std::vector<std::string>& known_plots()
{
  static const std::vector<std::string> plots = {
    "occ",      "eis",     "rcc",       "triangle", "tetrahedron",
    "pca",      "ets",     "sd",        "density",  "dif-occ",
    "dif-eis",  "dif-ets", "dif-qq",    "dif-density"
  };
  return plots;
}

const std::vector<std::string>& option_names()
{
  static const std::vector<std::string> names = {
    "data",        "exclude-columns", "na-token",    "option-counts",
    "key",         "format",          "weights",     "miss",
    "na-weight",   "seed",            "kernel",      "bandwidth",
    "nevalpoints", "evalpoints",      "exact",       "theta-dist",
    "rank-stat",   "subject-ranks",   "alpha",       "axis",
    "plot",        "items",           "subjects",    "groups",
    "min-group-size", "items-spec",   "n",           "out"
  };
  return names;
}

void set_option(AnalysisConfig& config, std::string_view key,
                std::string_view value)
{
  if (key == "data") {
    config.data_path = value;
  } else if (key == "exclude-columns") {
    config.ingest.non_item_columns = split_tokens(value);
  } else if (key == "na-token") {
    config.ingest.missing_token = value;
  } else if (key == "option-counts") {
    config.ingest.option_counts = int_list(value, "option_counts");
  } else if (key == "key") {
    config.key = int_list(value, "key");
  } else if (key == "format") {
    config.formats.clear();
    for (const auto& t : split_tokens(list_source(value))) {
      auto f = parse_item_format(t);
      if (!f)
        bad_choice(key, t);
      config.formats.push_back(*f);
    }
  } else if (key == "weights") {
    std::istringstream in(list_source(value));
    config.weights = read_weight_table(in);
  } else if (key == "miss") {
    auto m = parse_missing_mode(value);
    if (!m)
      bad_choice(key, value);
    config.missing = *m;
  } else if (key == "na-weight") {
    config.na_weight = parse_number<double>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "kernel") {
    auto k = parse_kernel(value);
    if (!k)
      bad_choice(key, value);
    config.kernel = *k;
  } else if (key == "bandwidth") {
    config.bandwidth = parse_bandwidth_policy(list_source(value));
  } else if (key == "nevalpoints") {
    config.n_points = parse_number<std::size_t>(key, value);
  } else if (key == "evalpoints") {
    config.eval_points = double_list(value);
  } else if (key == "exact") {
    config.estimator =
      parse_flag(key, value) ? Estimator::exact : Estimator::binned;
  } else if (key == "theta-dist") {
    config.distribution = LatentDistribution::parse(value);
  } else if (key == "rank-stat") {
    auto s = parse_rank_statistic(value);
    if (!s)
      bad_choice(key, value);
    config.rank_statistic = *s;
  } else if (key == "subject-ranks") {
    config.subject_ranks = double_list(value);
  } else if (key == "alpha") {
    config.alpha = parse_number<double>(key, value);
  } else if (key == "axis") {
    if (value == "scores" || value == "expected")
      config.axis = AxisType::scores;
    else if (value == "distribution")
      config.axis = AxisType::distribution;
    else
      bad_choice(key, value);
  } else if (key == "plot") {
    config.plots.clear();
    for (const auto& t : split_tokens(value)) {
      if (t == "all") {
        config.plots.insert(known_plots().begin(), known_plots().end());
        continue;
      }
      if (std::find(known_plots().begin(), known_plots().end(), t) ==
          known_plots().end())
        bad_choice(key, t);
      config.plots.insert(t);
    }
  } else if (key == "items") {
    config.items = split_tokens(list_source(value));
  } else if (key == "subjects") {
    config.subjects.clear();
    for (int s : int_list(value, "subjects")) {
      if (s < 1)
        bad_choice(key, std::to_string(s));
      config.subjects.push_back(static_cast<std::size_t>(s));
    }
  } else if (key == "groups") {
    config.groups = value;
  } else if (key == "min-group-size") {
    config.min_group_size = parse_number<std::size_t>(key, value);
  } else if (key == "items-spec") {
    config.items_spec = value;
  } else if (key == "n") {
    config.simulate_n = parse_number<std::size_t>(key, value);
  } else if (key == "out") {
    config.out_dir = value;
  } else {
    throw Error(ErrorKind::input, kModule, "set_option",
                "unknown option '" + std::string(key) + "'");
  }
}

void validate(const AnalysisConfig& config)
{
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw Error(ErrorKind::domain, kModule, "validate",
                "alpha must lie in (0, 1)");
  if (!config.eval_points && config.n_points < 2)
    throw Error(ErrorKind::input, kModule, "validate",
                "at least two evaluation points are required");
  for (const auto& p : config.plots)
    if (std::find(known_plots().begin(), known_plots().end(), p) ==
        known_plots().end())
      throw Error(ErrorKind::input, kModule, "validate",
                  "unknown plot '" + p + "'");
}

std::vector<double> Model::axis_values() const
{
  return config.axis == AxisType::scores ? ets : curves.points;
}

Model run_analysis(const AnalysisConfig& config, bool with_dif)
{
  validate(config);
  if (config.data_path.empty())
    throw Error(ErrorKind::input, kModule, "run_analysis",
                "no data file given");
  return run_analysis(
    config, ingest_responses_file(config.data_path, ingest_options(config)),
    with_dif);
}

Model run_analysis(const AnalysisConfig& config, Dataset dataset,
                   bool with_dif)
{
  validate(config);
  Model m;
  m.config = config;
  auto p = prepare(config, std::move(dataset));
  m.dataset = std::move(p.dataset);
  m.prepared = std::move(p.prepared);
  m.ability = std::move(p.ability);
  const auto& data = m.prepared.data;
  const auto& scheme = m.prepared.scheme;
  const auto& thetas = m.ability.thetas;

  auto estimator = config.estimator;
  if (config.eval_points) {
    m.grid = build_grid_from_points(*config.eval_points, thetas, &data);
    estimator = Estimator::exact;
  } else {
    m.grid = build_grid(thetas, config.n_points, &data);
  }
  m.bandwidths = resolve_bandwidths(config.bandwidth, thetas, data,
                                    config.distribution.sigma(),
                                    config.kernel);
  m.curves = estimate_curves(data, scheme, thetas, m.grid, m.bandwidths,
                             config.kernel, estimator);
  m.confidence = ConfidenceConfig::from_alpha(config.alpha);
  for (std::size_t j = 0; j < data.n_items(); ++j) {
    const auto& item = m.curves.items[j];
    m.eis.push_back(expected_item_score(item.occ, item.weights));
    m.eis_se.push_back(eis_stderr(thetas, item.occ, item.weights,
                                  m.curves.points, item.bandwidth,
                                  config.kernel));
  }
  m.ets = expected_test_score(m.curves);
  m.score_sd = conditional_score_sd(m.curves);

  std::vector<int> row(data.n_items());
  m.subjects.resize(data.n_subjects());
  for (std::size_t i = 0; i < data.n_subjects(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = data.at(i, j);
    auto& s = m.subjects[i];
    try {
      const auto rcc = relative_credibility(m.curves, m.ets, row);
      s.theta_ml = rcc.theta_ml;
      s.score_ml = rcc.score_ml;
      s.floored = rcc.floored;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate)
        throw;
      s.theta_ml = std::numeric_limits<double>::quiet_NaN();
      s.score_ml = std::numeric_limits<double>::quiet_NaN();
      s.error = e.message() + " (" + e.location() + ")";
    }
  }
  for (auto s : config.subjects)
    if (s > data.n_subjects())
      throw Error(ErrorKind::input, kModule, "run_analysis",
                  "subject " + std::to_string(s) + " out of range 1.." +
                    std::to_string(data.n_subjects()));

  m.itemcor = item_total_correlation(data, scheme);
  try {
    m.density = score_density(m.ability.total_scores);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate)
      throw;
    m.warnings.push_back("score density skipped: " + e.message());
  }

  m.selected_items = resolve_items(config.items, data);

  std::vector<std::vector<double>> pca_curves;
  std::vector<double> lower, upper;
  for (std::size_t j = 0; j < data.n_items(); ++j)
    if (scheme.max_weight(j) > scheme.min_weight(j)) {
      m.pca_items.push_back(j);
      pca_curves.push_back(m.eis[j]);
      lower.push_back(scheme.min_weight(j));
      upper.push_back(scheme.max_weight(j));
    }
  if (m.pca_items.size() >= 3)
    m.pca = pca_summary(pca_curves, lower, upper);
  else
    m.warnings.push_back("PCA skipped: fewer than three scored items");

  for (auto j : m.selected_items) {
    const auto& occ = m.curves.items[j].occ;
    if (occ.cols() >= 3)
      m.triangles.push_back(simplex_coords(occ, j, 3));
    if (occ.cols() >= 4)
      m.tetrahedra.push_back(simplex_coords(occ, j, 4));
  }

  if (with_dif) {
    if (config.groups.empty())
      throw Error(ErrorKind::input, kModule, "run_dif",
                  "no grouping column or label file given");
    std::vector<std::string> labels;
    if (is_file(config.groups)) {
      std::ifstream in(config.groups);
      labels = read_label_list(in);
    } else {
      const auto it = m.dataset.covariates.find(config.groups);
      if (it == m.dataset.covariates.end())
        throw Error(ErrorKind::input, kModule, "run_dif",
                    "no column named '" + config.groups + "'");
      labels = it->second;
    }
    labels = align_to_kept(labels, m.dataset.responses.n_subjects(),
                           m.prepared.kept_subjects, "group labels");
    DifConfig dc;
    dc.kernel = config.kernel;
    dc.bandwidth = config.bandwidth;
    dc.estimator = estimator;
    dc.min_group_size = config.min_group_size;
    m.dif = dif_estimate(data, scheme, m.ability, m.grid, m.bandwidths, labels,
                         dc);
    for (const auto& d : m.dif->dropped)
      m.warnings.push_back("group '" + d.label + "' dropped: " +
                           std::to_string(d.size) + " subjects, minimum " +
                           std::to_string(config.min_group_size));
  }
  return m;
}

CvProfile cv_profile(const AnalysisConfig& config)
{
  validate(config);
  if (config.data_path.empty())
    throw Error(ErrorKind::input, kModule, "cv_profile", "no data file given");
  auto p = prepare(config, ingest_responses_file(config.data_path,
                                                 ingest_options(config)));
  const auto& data = p.prepared.data;
  const auto& thetas = p.ability.thetas;
  CvProfile out;
  if (config.bandwidth.mode == BandwidthMode::fixed)
    out.candidates = config.bandwidth.values;
  else if (!config.bandwidth.candidates.empty())
    out.candidates = config.bandwidth.candidates;
  else
    out.candidates = default_cv_candidates(
      rule_of_thumb_bandwidth(thetas.size(), config.distribution.sigma()));
  const auto all = cv_bandwidths(thetas, data, out.candidates, config.kernel);
  for (auto j : resolve_items(config.items, data)) {
    out.labels.push_back(data.item_labels()[j]);
    out.results.push_back(all[j]);
  }
  return out;
}

} // namespace irtsmooth
