#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace irtsmooth {

//! Internal marker for an omitted answer. Every interface speaks 1-based
//! option codes, so 0 never collides with a real option.
inline constexpr int kMissing = 0;

//! n x k option selections, stored column-major so that an item column is a
//! contiguous span. Items may carry a synthetic "missing" option with code
//! m_j + 1 after the TreatAsOption policy has been applied.
class ResponseMatrix
{
public:
  ResponseMatrix() = default;

  //! `selections` is column-major (item by item), 1-based codes, kMissing for
  //! omitted answers. Throws Error on any invariant violation.
  ResponseMatrix(std::vector<std::string> item_labels,
                 std::vector<int> option_counts,
                 std::vector<int> selections,
                 std::vector<bool> missing_option = {});

  std::size_t n_subjects() const noexcept { return n_subjects_; }
  std::size_t n_items() const noexcept { return labels_.size(); }

  int at(std::size_t subject, std::size_t item) const
  {
    return selections_[item * n_subjects_ + subject];
  }
  bool is_missing(std::size_t subject, std::size_t item) const
  {
    return at(subject, item) == kMissing;
  }

  std::span<const int> column(std::size_t item) const
  {
    return { selections_.data() + item * n_subjects_, n_subjects_ };
  }

  //! Designed options m_j, excluding any synthetic missing option.
  int option_count(std::size_t item) const { return option_counts_[item]; }
  const std::vector<int>& option_counts() const noexcept
  {
    return option_counts_;
  }
  bool has_missing_option(std::size_t item) const
  {
    return missing_option_[item];
  }
  //! Number of selectable codes, m_j plus one when a missing option exists.
  int total_options(std::size_t item) const
  {
    return option_counts_[item] + (missing_option_[item] ? 1 : 0);
  }

  const std::vector<std::string>& item_labels() const noexcept
  {
    return labels_;
  }
  const std::vector<int>& raw() const noexcept { return selections_; }

  std::size_t missing_count() const;
  bool row_has_missing(std::size_t subject) const;
  bool row_all_missing(std::size_t subject) const;

  //! Submatrix of the listed subjects, in the given order.
  ResponseMatrix select_subjects(std::span<const std::size_t> subjects) const;

  friend bool operator==(const ResponseMatrix&,
                         const ResponseMatrix&) = default;

private:
  std::size_t n_subjects_ = 0;
  std::vector<std::string> labels_;
  std::vector<int> option_counts_;
  std::vector<bool> missing_option_;
  std::vector<int> selections_;
};

enum class ItemFormat
{
  multiple_choice,
  rating_scale,
  nominal,
  //! explicit weight table supplied by the user
  weighted
};

std::optional<ItemFormat> parse_item_format(std::string_view text);
const char* to_string(ItemFormat format) noexcept;

//! Per-item option weights x_jl. `weights[j]` has m_j entries, plus one
//! trailing slot for the synthetic missing option when present.
struct ScoringScheme
{
  std::vector<std::vector<double>> weights;
  std::vector<ItemFormat> formats;
  double missing_weight = 0.0;

  std::size_t n_items() const noexcept { return weights.size(); }
  double weight(std::size_t item, int option) const
  {
    return weights[item][static_cast<std::size_t>(option - 1)];
  }
  double min_weight(std::size_t item) const;
  double max_weight(std::size_t item) const;
  //! Nominal items are excluded from score-based ranking.
  bool scored(std::size_t item) const
  {
    return formats[item] != ItemFormat::nominal;
  }
  bool all_nominal() const;
};

//! Scalar `formats` / `key` (size 1) are broadcast across items. `key` may
//! be empty when every item is nominal.
ScoringScheme build_scoring(std::span<const ItemFormat> formats,
                            std::span<const int> key,
                            std::span<const int> option_counts);

//! Scheme from an explicit weight table, one row of m_j weights per item.
ScoringScheme scoring_from_weights(
  const std::vector<std::vector<double>>& table,
  std::span<const int> option_counts);

enum class MissingMode
{
  treat_as_option,
  random_uniform,
  random_multinomial,
  omit_subject
};

std::optional<MissingMode> parse_missing_mode(std::string_view text);
const char* to_string(MissingMode mode) noexcept;

struct MissingPolicy
{
  MissingMode mode = MissingMode::treat_as_option;
  std::optional<std::uint64_t> seed;
};

struct MissingResult
{
  ResponseMatrix data;
  ScoringScheme scheme;
  //! Original row index of every retained subject.
  std::vector<std::size_t> kept_subjects;
  std::size_t dropped_all_missing = 0;
  std::size_t dropped_by_policy = 0;
  std::size_t imputed_cells = 0;
};

//! Returns a matrix without MISSING entries. Subjects whose every answer is
//! missing are dropped first, regardless of mode.
MissingResult apply_missing_policy(const ResponseMatrix& data,
                                   const ScoringScheme& scheme,
                                   const MissingPolicy& policy);

struct IngestOptions
{
  std::string missing_token = "NA";
  //! Header names of columns that are covariates rather than items.
  std::vector<std::string> non_item_columns;
  //! Explicit m_j per item, overriding the max-observed-code inference.
  std::optional<std::vector<int>> option_counts;
};

struct Dataset
{
  ResponseMatrix responses;
  std::map<std::string, std::vector<std::string>> covariates;
};

Dataset ingest_responses(std::istream& csv, const IngestOptions& options = {});
Dataset ingest_responses_file(const std::string& path,
                              const IngestOptions& options = {});

//! Sidecar readers. Blank lines and lines starting with '#' are skipped.
std::vector<int> read_integer_list(std::istream& in, const char* what);
std::vector<std::vector<double>> read_weight_table(std::istream& in);
std::vector<std::string> read_label_list(std::istream& in);

} // namespace irtsmooth
