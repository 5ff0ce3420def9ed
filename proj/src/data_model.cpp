#include "irtsmooth/data_model.hpp"

#include "irtsmooth/error.hpp"

#include <algorithm>
#include <boost/tokenizer.hpp>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "data-model";

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line)
{
  using Separator = boost::escaped_list_separator<char>;
  boost::tokenizer<Separator> tok(line, Separator('\\', ',', '"'));
  std::vector<std::string> cells;
  for (const auto& cell : tok)
    cells.emplace_back(trim(cell));
  return cells;
}

std::optional<long> parse_long(std::string_view s)
{
  long value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty())
    return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view s)
{
  double value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty())
    return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto next = line.find_first_of(" \t,;", pos);
    const auto field = line.substr(pos, next == std::string_view::npos
                                          ? std::string_view::npos
                                          : next - pos);
    if (!field.empty())
      out.push_back(field);
    if (next == std::string_view::npos)
      break;
    pos = next + 1;
  }
  return out;
}

bool skip_line(std::string_view line)
{
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

} // namespace

// ---------------------------------------------------------------------------
// ResponseMatrix

ResponseMatrix::ResponseMatrix(std::vector<std::string> item_labels,
                               std::vector<int> option_counts,
                               std::vector<int> selections,
                               std::vector<bool> missing_option)
  : labels_(std::move(item_labels))
  , option_counts_(std::move(option_counts))
  , missing_option_(std::move(missing_option))
  , selections_(std::move(selections))
{
  const char* op = "ResponseMatrix";
  const std::size_t k = labels_.size();
  if (k == 0)
    throw Error(ErrorKind::input, kModule, op, "no items");
  if (option_counts_.size() != k)
    throw Error(ErrorKind::input, kModule, op,
                "option count list has " +
                  std::to_string(option_counts_.size()) + " entries for " +
                  std::to_string(k) + " items");
  if (missing_option_.empty())
    missing_option_.assign(k, false);
  if (missing_option_.size() != k)
    throw Error(ErrorKind::input, kModule, op, "missing-option flags size");
  if (selections_.size() % k != 0)
    throw Error(ErrorKind::input, kModule, op,
                "selection count is not a multiple of the item count");
  n_subjects_ = selections_.size() / k;
  if (n_subjects_ < 2)
    throw Error(ErrorKind::input, kModule, op,
                "at least two subjects are required");
  for (std::size_t j = 0; j < k; ++j) {
    if (option_counts_[j] < 2)
      throw Error(ErrorKind::domain, kModule, op,
                  "item '" + labels_[j] + "' has fewer than two options");
    const int top = total_options(j);
    for (std::size_t i = 0; i < n_subjects_; ++i) {
      const int code = at(i, j);
      if (code != kMissing && (code < 1 || code > top))
        throw Error(ErrorKind::domain, kModule, op,
                    "option code " + std::to_string(code) +
                      " outside 1.." + std::to_string(top),
                    "subject " + std::to_string(i + 1) + ", item '" +
                      labels_[j] + "'");
    }
  }
}

std::size_t ResponseMatrix::missing_count() const
{
  return static_cast<std::size_t>(
    std::count(selections_.begin(), selections_.end(), kMissing));
}

bool ResponseMatrix::row_has_missing(std::size_t subject) const
{
  for (std::size_t j = 0; j < n_items(); ++j)
    if (is_missing(subject, j))
      return true;
  return false;
}

bool ResponseMatrix::row_all_missing(std::size_t subject) const
{
  for (std::size_t j = 0; j < n_items(); ++j)
    if (!is_missing(subject, j))
      return false;
  return true;
}

ResponseMatrix ResponseMatrix::select_subjects(
  std::span<const std::size_t> subjects) const
{
  std::vector<int> sel;
  sel.reserve(subjects.size() * n_items());
  for (std::size_t j = 0; j < n_items(); ++j)
    for (auto i : subjects)
      sel.push_back(at(i, j));
  return ResponseMatrix(labels_, option_counts_, std::move(sel),
                        missing_option_);
}

// ---------------------------------------------------------------------------
// Scoring

std::optional<ItemFormat> parse_item_format(std::string_view text)
{
  if (text == "mc" || text == "multiple-choice" || text == "1")
    return ItemFormat::multiple_choice;
  if (text == "rating" || text == "rating-scale" || text == "2")
    return ItemFormat::rating_scale;
  if (text == "nominal" || text == "3")
    return ItemFormat::nominal;
  return std::nullopt;
}

const char* to_string(ItemFormat format) noexcept
{
  switch (format) {
    case ItemFormat::multiple_choice:
      return "multiple-choice";
    case ItemFormat::rating_scale:
      return "rating-scale";
    case ItemFormat::nominal:
      return "nominal";
    case ItemFormat::weighted:
      return "weighted";
  }
  return "?";
}

double ScoringScheme::min_weight(std::size_t item) const
{
  return *std::min_element(weights[item].begin(), weights[item].end());
}

double ScoringScheme::max_weight(std::size_t item) const
{
  return *std::max_element(weights[item].begin(), weights[item].end());
}

bool ScoringScheme::all_nominal() const
{
  return std::all_of(formats.begin(), formats.end(),
                     [](ItemFormat f) { return f == ItemFormat::nominal; });
}

ScoringScheme build_scoring(std::span<const ItemFormat> formats,
                            std::span<const int> key,
                            std::span<const int> option_counts)
{
  const char* op = "build_scoring";
  const std::size_t k = option_counts.size();
  if (formats.size() != 1 && formats.size() != k)
    throw Error(ErrorKind::input, kModule, op,
                "format list has " + std::to_string(formats.size()) +
                  " entries for " + std::to_string(k) + " items");
  auto format_of = [&](std::size_t j) {
    return formats.size() == 1 ? formats[0] : formats[j];
  };
  bool needs_key = false;
  for (std::size_t j = 0; j < k; ++j)
    needs_key |= format_of(j) != ItemFormat::nominal;
  if (needs_key && key.size() != 1 && key.size() != k)
    throw Error(ErrorKind::input, kModule, op,
                "key has " + std::to_string(key.size()) + " entries for " +
                  std::to_string(k) + " items");

  ScoringScheme scheme;
  scheme.weights.resize(k);
  scheme.formats.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const int m = option_counts[j];
    const ItemFormat f = format_of(j);
    if (f == ItemFormat::weighted)
      throw Error(ErrorKind::input, kModule, op,
                  "weighted items need an explicit weight table");
    scheme.formats[j] = f;
    auto& w = scheme.weights[j];
    w.assign(static_cast<std::size_t>(m), 0.0);
    if (f == ItemFormat::nominal)
      continue;
    const int kj = key.size() == 1 ? key[0] : key[j];
    const std::string where = "item " + std::to_string(j + 1);
    if (f == ItemFormat::multiple_choice) {
      if (kj < 1 || kj > m)
        throw Error(ErrorKind::domain, kModule, op,
                    "key " + std::to_string(kj) + " outside options 1.." +
                      std::to_string(m),
                    where);
      w[static_cast<std::size_t>(kj - 1)] = 1.0;
    } else {
      if (kj != m)
        throw Error(ErrorKind::domain, kModule, op,
                    "rating-scale key " + std::to_string(kj) +
                      " must equal the option count " + std::to_string(m),
                    where);
      for (int l = 0; l < m; ++l)
        w[static_cast<std::size_t>(l)] = l + 1.0;
    }
  }
  return scheme;
}

ScoringScheme scoring_from_weights(
  const std::vector<std::vector<double>>& table,
  std::span<const int> option_counts)
{
  const char* op = "scoring_from_weights";
  if (table.size() != option_counts.size())
    throw Error(ErrorKind::input, kModule, op,
                "weight table has " + std::to_string(table.size()) +
                  " rows for " + std::to_string(option_counts.size()) +
                  " items");
  ScoringScheme scheme;
  scheme.weights = table;
  scheme.formats.assign(table.size(), ItemFormat::weighted);
  for (std::size_t j = 0; j < table.size(); ++j) {
    if (static_cast<int>(table[j].size()) != option_counts[j])
      throw Error(ErrorKind::input, kModule, op,
                  "expected " + std::to_string(option_counts[j]) +
                    " weights, found " + std::to_string(table[j].size()),
                  "item " + std::to_string(j + 1));
    if (std::all_of(table[j].begin(), table[j].end(),
                    [](double x) { return x == 0.0; }))
      scheme.formats[j] = ItemFormat::nominal;
  }
  return scheme;
}

// ---------------------------------------------------------------------------
// Missing values

std::optional<MissingMode> parse_missing_mode(std::string_view text)
{
  if (text == "option")
    return MissingMode::treat_as_option;
  if (text == "runif" || text == "random.unif")
    return MissingMode::random_uniform;
  if (text == "rmultinom" || text == "random.multinom")
    return MissingMode::random_multinomial;
  if (text == "omit")
    return MissingMode::omit_subject;
  return std::nullopt;
}

const char* to_string(MissingMode mode) noexcept
{
  switch (mode) {
    case MissingMode::treat_as_option:
      return "option";
    case MissingMode::random_uniform:
      return "runif";
    case MissingMode::random_multinomial:
      return "rmultinom";
    case MissingMode::omit_subject:
      return "omit";
  }
  return "?";
}

MissingResult apply_missing_policy(const ResponseMatrix& data,
                                   const ScoringScheme& scheme,
                                   const MissingPolicy& policy)
{
  const char* op = "apply_missing_policy";
  const std::size_t k = data.n_items();
  if (scheme.n_items() != k)
    throw Error(ErrorKind::input, kModule, op,
                "scoring scheme and data disagree on the item count");
  const bool random = policy.mode == MissingMode::random_uniform ||
                      policy.mode == MissingMode::random_multinomial;
  if (random && !policy.seed)
    throw Error(ErrorKind::input, kModule, op,
                "random imputation requires a seed");

  MissingResult out;
  out.scheme = scheme;
  for (std::size_t i = 0; i < data.n_subjects(); ++i) {
    if (data.row_all_missing(i)) {
      ++out.dropped_all_missing;
      continue;
    }
    if (policy.mode == MissingMode::omit_subject && data.row_has_missing(i)) {
      ++out.dropped_by_policy;
      continue;
    }
    out.kept_subjects.push_back(i);
  }
  if (out.kept_subjects.size() < 2)
    throw Error(ErrorKind::input, kModule, op,
                "fewer than two subjects remain after removing missing rows");

  ResponseMatrix kept = data.select_subjects(out.kept_subjects);
  if (kept.missing_count() == 0) {
    out.data = std::move(kept);
    return out;
  }

  const std::size_t n = kept.n_subjects();
  std::vector<int> sel = kept.raw();
  auto cell = [&](std::size_t i, std::size_t j) -> int& {
    return sel[j * n + i];
  };
  std::vector<bool> missing_option(k);
  for (std::size_t j = 0; j < k; ++j)
    missing_option[j] = kept.has_missing_option(j);

  switch (policy.mode) {
    case MissingMode::omit_subject:
      break;
    case MissingMode::treat_as_option:
      for (std::size_t j = 0; j < k; ++j) {
        const int code = kept.total_options(j) + (missing_option[j] ? 0 : 1);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i)
          if (cell(i, j) == kMissing) {
            cell(i, j) = code;
            any = true;
            ++out.imputed_cells;
          }
        if (any && !missing_option[j]) {
          missing_option[j] = true;
          out.scheme.weights[j].push_back(scheme.missing_weight);
        }
      }
      break;
    case MissingMode::random_uniform:
    case MissingMode::random_multinomial: {
      std::vector<std::discrete_distribution<int>> draw(k);
      for (std::size_t j = 0; j < k; ++j) {
        const auto m = static_cast<std::size_t>(kept.total_options(j));
        std::vector<double> freq(m, 1.0);
        if (policy.mode == MissingMode::random_multinomial) {
          std::fill(freq.begin(), freq.end(), 0.0);
          double total = 0;
          for (std::size_t i = 0; i < n; ++i)
            if (cell(i, j) != kMissing) {
              freq[static_cast<std::size_t>(cell(i, j) - 1)] += 1.0;
              total += 1.0;
            }
          if (total == 0.0) {
            bool needed = false;
            for (std::size_t i = 0; i < n; ++i)
              needed |= cell(i, j) == kMissing;
            if (needed)
              throw Error(ErrorKind::domain, kModule, op,
                          "every response is missing, no frequencies to "
                          "impute from",
                          "item '" + kept.item_labels()[j] + "'");
            continue;
          }
        } else if (kept.has_missing_option(j)) {
          freq.back() = 0.0;
        }
        draw[j] = std::discrete_distribution<int>(freq.begin(), freq.end());
      }
      // One stream, row-major cell order.
      std::mt19937_64 rng(*policy.seed);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
          if (cell(i, j) == kMissing) {
            cell(i, j) = draw[j](rng) + 1;
            ++out.imputed_cells;
          }
      break;
    }
  }

  if (policy.mode == MissingMode::omit_subject)
    out.data = std::move(kept);
  else
    out.data = ResponseMatrix(kept.item_labels(), kept.option_counts(),
                              std::move(sel), std::move(missing_option));
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

Dataset ingest_responses(std::istream& csv, const IngestOptions& options)
{
  const char* op = "ingest_responses";
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0)
      line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty())
    throw Error(ErrorKind::input, kModule, op, "empty CSV input");

  const std::size_t ncol = header.size();
  std::vector<bool> is_item(ncol, true);
  for (const auto& name : options.non_item_columns) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(ErrorKind::input, kModule, op,
                  "column '" + name + "' not found in header");
    is_item[static_cast<std::size_t>(it - header.begin())] = false;
  }
  std::vector<std::size_t> item_cols;
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < ncol; ++c)
    if (is_item[c]) {
      item_cols.push_back(c);
      labels.push_back(header[c]);
    }
  if (item_cols.empty())
    throw Error(ErrorKind::input, kModule, op, "no item columns");

  std::vector<std::vector<int>> columns(item_cols.size());
  Dataset out;
  for (std::size_t c = 0; c < ncol; ++c)
    if (!is_item[c])
      out.covariates[header[c]];

  while (std::getline(csv, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cells = split_csv_line(line);
    if (cells.size() != ncol)
      throw Error(ErrorKind::parse, kModule, op,
                  "expected " + std::to_string(ncol) + " cells, found " +
                    std::to_string(cells.size()),
                  "line " + std::to_string(line_no));
    std::size_t item = 0;
    for (std::size_t c = 0; c < ncol; ++c) {
      if (!is_item[c]) {
        out.covariates[header[c]].push_back(cells[c]);
        continue;
      }
      const std::string& cell = cells[c];
      int code = kMissing;
      if (cell != options.missing_token) {
        auto value = parse_long(cell);
        const std::string where = "line " + std::to_string(line_no) +
                                  ", column " + std::to_string(c + 1);
        if (!value)
          throw Error(ErrorKind::parse, kModule, op,
                      "non-integer cell '" + cell + "'", where);
        if (*value < 1)
          throw Error(ErrorKind::domain, kModule, op,
                      "option code " + cell + " is below 1", where);
        code = static_cast<int>(*value);
      }
      columns[item++].push_back(code);
    }
  }
  if (columns.front().empty())
    throw Error(ErrorKind::input, kModule, op, "CSV has no data rows");

  const std::size_t k = item_cols.size();
  std::vector<int> counts(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    const int observed =
      *std::max_element(columns[j].begin(), columns[j].end());
    if (options.option_counts) {
      const auto& given = *options.option_counts;
      if (given.size() != k)
        throw Error(ErrorKind::input, kModule, op,
                    "option-count sidecar has " +
                      std::to_string(given.size()) + " entries for " +
                      std::to_string(k) + " items");
      if (observed > given[j])
        throw Error(ErrorKind::domain, kModule, op,
                    "observed code " + std::to_string(observed) +
                      " exceeds declared option count " +
                      std::to_string(given[j]),
                    "item '" + labels[j] + "'");
      counts[j] = given[j];
    } else {
      // An item where nobody chose beyond option 1 still has two options.
      counts[j] = std::max(observed, 2);
    }
  }
  std::vector<int> sel;
  sel.reserve(k * columns.front().size());
  for (auto& col : columns)
    sel.insert(sel.end(), col.begin(), col.end());
  out.responses = ResponseMatrix(std::move(labels), std::move(counts),
                                 std::move(sel));
  return out;
}

Dataset ingest_responses_file(const std::string& path,
                              const IngestOptions& options)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io, kModule, "ingest_responses",
                "cannot open '" + path + "'");
  return ingest_responses(in, options);
}

std::vector<int> read_integer_list(std::istream& in, const char* what)
{
  std::vector<int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line))
      continue;
    for (auto field : split_fields(trim(line))) {
      auto v = parse_long(field);
      if (!v)
        throw Error(ErrorKind::parse, kModule, what,
                    "non-integer value '" + std::string(field) + "'",
                    "line " + std::to_string(line_no));
      out.push_back(static_cast<int>(*v));
    }
  }
  return out;
}

std::vector<std::vector<double>> read_weight_table(std::istream& in)
{
  std::vector<std::vector<double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line))
      continue;
    auto& row = out.emplace_back();
    for (auto field : split_fields(trim(line))) {
      auto v = parse_double(field);
      if (!v)
        throw Error(ErrorKind::parse, kModule, "read_weight_table",
                    "non-numeric weight '" + std::string(field) + "'",
                    "line " + std::to_string(line_no));
      row.push_back(*v);
    }
  }
  return out;
}

std::vector<std::string> read_label_list(std::istream& in)
{
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty())
      out.emplace_back(t);
  }
  return out;
}

} // namespace irtsmooth
