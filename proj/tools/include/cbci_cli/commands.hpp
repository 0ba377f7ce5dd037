#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbci/evaluation.hpp"
#include "cbci/imputation.hpp"
#include "cbci/report.hpp"

namespace cbci::cli {

enum class InitKind { FarthestFirst, ClassSeeded, Fixed };
enum class FillKind { CopyDonor, TopK, ClassMean };

/// Everything a pipeline subcommand needs. Optional counts left empty are
/// resolved by the pipeline (k from the labels, neighbours = k).
struct RunConfig {
    std::string input;
    std::string schema;
    /// Replaces the schema's missing tokens when set.
    std::optional<std::vector<std::string>> missing_tokens;
    std::optional<std::size_t> k;
    InitKind init = InitKind::FarthestFirst;
    std::string means_file;
    RecordId start_id = 0;
    std::size_t max_iter = 100;
    std::optional<std::size_t> neighbor_count;
    FillKind fill = FillKind::CopyDonor;
    std::size_t top_k = 1;
    std::size_t class_top_k = 1;
    bool scale = false;
    bool assign_labels = false;
    std::string output;  // imputed / labelled CSV; empty for none
    std::string report;  // report path; empty for stdout
};

enum class Method { Cbci, GlobalMeanMode, RawKnn };

struct EvaluateConfig {
    RunConfig run;
    bool synthetic = false;
    SyntheticSpec synthetic_spec;
    double fraction = 0.1;
    std::uint64_t seed = 1;
    std::vector<std::string> mask_columns;  // empty: every column
    std::optional<std::size_t> max_per_record;
    bool hide_labels = true;
    std::vector<Method> methods{Method::Cbci, Method::GlobalMeanMode, Method::RawKnn};
    std::size_t knn_k = 1;
    bool list_masked = true;
};

/// Result of a subcommand, held in memory so nothing is written when a
/// fatal error occurs part way through.
struct CommandOutput {
    report::Document report;
    std::optional<std::string> csv;
    int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

CommandOutput cmd_impute(const RunConfig& config);
CommandOutput cmd_trace(const RunConfig& config);
CommandOutput cmd_classify(const RunConfig& config);
CommandOutput cmd_evaluate(const EvaluateConfig& config);

std::string to_string(InitKind kind);
std::string to_string(FillKind kind);
std::string to_string(Method method);

/// Parses the command line, runs the subcommand and writes its outputs.
/// Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbci::cli
