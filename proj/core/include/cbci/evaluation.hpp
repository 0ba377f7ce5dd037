#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cbci/data_model.hpp"

namespace cbci {

/// Name of the generator behind every seeded choice in this module.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

struct MaskSpec {
    double fraction = 0.1;
    std::uint64_t seed = 1;
    /// Column indices eligible for masking; empty means all columns.
    std::vector<std::size_t> eligible_columns;
    /// Cap on masked cells per record; empty means n - 1. A record always
    /// keeps at least one present cell.
    std::optional<std::size_t> max_per_record;
    /// Also hide the class label of every record that loses a cell, so
    /// class prediction can be scored.
    bool hide_labels = true;
};

struct MaskedCell {
    RecordId record_id = 0;
    std::size_t column = 0;
    double value = 0.0;
};

struct MaskResult {
    Dataset masked;
    std::vector<MaskedCell> truth;  // ascending (record id, column)
    std::map<RecordId, std::string> hidden_labels;
    std::size_t requested = 0;
    std::size_t shortfall = 0;
};

/// Hides round(fraction * eligible present cells) cells chosen by a seeded
/// Fisher-Yates shuffle.
MaskResult mask_dataset(const Dataset& dataset, const MaskSpec& spec);

struct ErrorStats {
    std::size_t count = 0;
    double rmse = 0.0;
    double mae = 0.0;
};

struct Metrics {
    ErrorStats numeric;                          // all numeric columns
    std::map<std::size_t, ErrorStats> per_column;  // numeric columns only
    std::size_t categorical_count = 0;
    std::size_t categorical_correct = 0;
    double categorical_accuracy = 1.0;
    std::size_t class_count = 0;
    std::size_t class_correct = 0;
    double class_accuracy = 1.0;
};

/// Compares `imputed` against the hidden cells. When `true_labels` is given,
/// class accuracy is computed over the records that had cells hidden, using
/// the labels carried by `imputed`.
Metrics score_imputation(const Dataset& imputed, std::span<const MaskedCell> truth,
                         const std::map<RecordId, std::string>* true_labels = nullptr);

namespace baseline {
/// Column mean (numeric) or mode (categorical, ties to lowest level) over
/// complete records.
struct GlobalMeanMode {};
/// k nearest complete records by masked Euclidean distance.
struct RawKnn {
    std::size_t k = 1;
};
}  // namespace baseline

using BaselineKind = std::variant<baseline::GlobalMeanMode, baseline::RawKnn>;

std::string describe(const BaselineKind& kind);

/// Fills every missing cell. When `predict_labels` is set, records are also
/// given a label: the majority class for GlobalMeanMode, the neighbours'
/// modal class for RawKnn.
Dataset run_baseline(const Dataset& masked, const BaselineKind& kind, bool predict_labels = false);

/// Class-conditional synthetic data: each class has a random centre per
/// numeric column and a preferred level per categorical column.
struct SyntheticSpec {
    std::size_t rows = 200;
    std::size_t numeric_columns = 4;
    std::size_t categorical_columns = 2;
    std::size_t classes = 3;
    std::size_t levels = 3;
    double noise = 1.0;
    std::uint64_t seed = 1;
};

Dataset make_synthetic(const SyntheticSpec& spec);

/// Uniform integer in [0, bound) from raw mt19937_64 output by rejection,
/// so results do not depend on the standard library's distributions.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform_unit(std::mt19937_64& rng);

}  // namespace cbci
