#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "cbci/error.hpp"
#include "cbci/schema_file.hpp"
#include "cbci_cli/commands.hpp"

namespace cbci::cli {

namespace {

const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "io";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Pipeline: return "pipeline";
    }
    return "error";
}

std::optional<std::size_t> parse_count(const std::string& text, const char* what) {
    if (text == "auto") return std::nullopt;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || v == 0) {
        fail(ErrorKind::Validation, std::string(what) + " must be a positive integer or 'auto', got '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

/// Raw option text; counts and lists are resolved after parsing so that
/// 'auto' and quoted tokens can be used.
struct RunOptions {
    RunConfig config;
    std::string k = "auto";
    std::string neighbors = "auto";
    std::string missing;

    RunConfig resolve() const {
        RunConfig c = config;
        c.k = parse_count(k, "--k");
        c.neighbor_count = parse_count(neighbors, "--neighbors");
        if (!missing.empty()) c.missing_tokens = split_list(missing);
        return c;
    }
};

void add_pipeline_options(CLI::App* sub, RunOptions& o, bool require_input) {
    auto& c = o.config;
    auto* input = sub->add_option("-i,--input", c.input, "Input CSV");
    auto* schema = sub->add_option("-s,--schema", c.schema, "Schema sidecar file");
    if (require_input) {
        input->required();
        schema->required();
    }
    sub->add_option("--missing", o.missing, "Missing tokens, comma separated (overrides the schema), e.g. '\"?\", \"NA\"'");
    sub->add_option("--k", o.k, "Number of clusters, or 'auto' for the number of classes")->capture_default_str();
    const std::map<std::string, InitKind> inits{{"farthest_first", InitKind::FarthestFirst},
                                                {"class_seeded", InitKind::ClassSeeded},
                                                {"fixed", InitKind::Fixed}};
    sub->add_option("--init", c.init, "Initial means: farthest_first, class_seeded or fixed")
        ->transform(CLI::CheckedTransformer(inits, CLI::ignore_case))
        ->capture_default_str();
    sub->add_option("--means", c.means_file, "Initial means file for --init fixed");
    sub->add_option("--start-id", c.start_id, "First seed for farthest_first (0: lowest id)")->capture_default_str();
    sub->add_option("--max-iter", c.max_iter, "Lloyd iteration cap")->capture_default_str();
    sub->add_option("--neighbors", o.neighbors, "Nearest neighbours per record, or 'auto' for k")->capture_default_str();
    const std::map<std::string, FillKind> fills{{"copy_donor", FillKind::CopyDonor},
                                                {"top_k", FillKind::TopK},
                                                {"class_mean", FillKind::ClassMean}};
    sub->add_option("--fill", c.fill, "Fill strategy: copy_donor, top_k or class_mean")
        ->transform(CLI::CheckedTransformer(fills, CLI::ignore_case))
        ->capture_default_str();
    sub->add_option("--top-k", c.top_k, "Donors averaged by --fill top_k")->capture_default_str();
    sub->add_option("--class-top-k", c.class_top_k, "Donors voting on a predicted class")->capture_default_str();
    sub->add_flag("--scale", c.scale, "Min-max scale every column before clustering");
    sub->add_option("-r,--report", c.report, "Report path (default: standard output)");
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Class-based-cluster imputation of missing values", "cbci"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cbci 0.1.0");
    app.set_config("--config", "",
                   "TOML/INI file of options, one [impute]/[trace]/[classify]/[evaluate] section per "
                   "subcommand; the command line takes precedence");
    app.fallthrough();

    RunOptions impute_opts, trace_opts, classify_opts, eval_opts;

    auto* impute = app.add_subcommand("impute", "Fill missing cells and write the imputed CSV");
    add_pipeline_options(impute, impute_opts, true);
    impute->add_option("-o,--output", impute_opts.config.output, "Imputed CSV path")->required();
    impute->add_flag("--assign-labels", impute_opts.config.assign_labels,
                     "Give unlabelled incomplete records their predicted class");

    auto* trace = app.add_subcommand("trace", "Write every intermediate table of the pipeline");
    add_pipeline_options(trace, trace_opts, true);
    trace->add_option("-o,--output", trace_opts.config.output, "Optional imputed CSV path");
    trace->add_flag("--assign-labels", trace_opts.config.assign_labels,
                    "Give unlabelled incomplete records their predicted class");

    auto* classify = app.add_subcommand("classify", "Predict labels for unlabelled records");
    add_pipeline_options(classify, classify_opts, true);
    classify->add_option("-o,--output", classify_opts.config.output, "Labelled CSV path")->required();

    EvaluateConfig eval;
    auto* evaluate = app.add_subcommand("evaluate", "Mask known cells, impute them and score each method");
    add_pipeline_options(evaluate, eval_opts, false);
    evaluate->add_flag("--synthetic", eval.synthetic, "Use a generated dataset instead of --input");
    auto& sp = eval.synthetic_spec;
    evaluate->add_option("--rows", sp.rows, "Synthetic rows")->capture_default_str();
    evaluate->add_option("--numeric", sp.numeric_columns, "Synthetic numeric columns")->capture_default_str();
    evaluate->add_option("--categorical", sp.categorical_columns, "Synthetic categorical columns")->capture_default_str();
    evaluate->add_option("--classes", sp.classes, "Synthetic classes")->capture_default_str();
    evaluate->add_option("--levels", sp.levels, "Levels per synthetic categorical column")->capture_default_str();
    evaluate->add_option("--noise", sp.noise, "Synthetic noise scale")->capture_default_str();
    std::optional<std::uint64_t> synthetic_seed;
    evaluate->add_option("--synthetic-seed", synthetic_seed, "Generator seed (default: --seed)");
    evaluate->add_option("--fraction", eval.fraction, "Fraction of eligible cells to mask")->capture_default_str();
    evaluate->add_option("--seed", eval.seed, "Mask seed")->capture_default_str();
    evaluate->add_option("--mask-columns", eval.mask_columns, "Columns eligible for masking (default: all)")
        ->delimiter(',');
    evaluate->add_option("--max-per-record", eval.max_per_record, "Masked cells per record (default: n - 1)");
    bool keep_labels = false;
    evaluate->add_flag("--keep-labels", keep_labels, "Do not hide the labels of masked records");
    const std::map<std::string, Method> methods{{"cbci", Method::Cbci},
                                                {"global_mean_mode", Method::GlobalMeanMode},
                                                {"raw_knn", Method::RawKnn}};
    evaluate->add_option("--methods", eval.methods, "Methods to score: cbci, global_mean_mode, raw_knn")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
        ->delimiter(',');
    evaluate->add_option("--knn-k", eval.knn_k, "Neighbours used by raw_knn")->capture_default_str();
    bool no_masked_list = false;
    evaluate->add_flag("--no-masked-list", no_masked_list, "Leave the masked_cells table out of the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitFatal;
    }

    CommandOutput result;
    std::string csv_path;
    std::string report_path;
    try {
        if (impute->parsed()) {
            const auto c = impute_opts.resolve();
            result = cmd_impute(c);
            csv_path = c.output;
            report_path = c.report;
        } else if (trace->parsed()) {
            const auto c = trace_opts.resolve();
            result = cmd_trace(c);
            csv_path = c.output;
            report_path = c.report;
        } else if (classify->parsed()) {
            const auto c = classify_opts.resolve();
            result = cmd_classify(c);
            csv_path = c.output;
            report_path = c.report;
        } else {
            eval.run = eval_opts.resolve();
            eval.synthetic_spec.seed = synthetic_seed.value_or(eval.seed);
            eval.hide_labels = !keep_labels;
            eval.list_masked = !no_masked_list;
            if (!eval.synthetic && eval.run.input.empty()) {
                fail(ErrorKind::Validation, "evaluate needs --input and --schema, or --synthetic");
            }
            result = cmd_evaluate(eval);
            report_path = eval.run.report;
        }
        if (result.csv && !csv_path.empty()) write_file(csv_path, *result.csv);
        if (report_path.empty()) {
            result.report.write(out);
        } else {
            write_file(report_path, result.report.str());
        }
    } catch (const Error& e) {
        err << "cbci: " << kind_name(e.kind()) << " error: " << e.what() << '\n';
        return kExitFatal;
    } catch (const std::exception& e) {
        err << "cbci: error: " << e.what() << '\n';
        return kExitFatal;
    }
    if (result.exit_code == kExitPartial) {
        err << "cbci: some records could not be processed; see the report\n";
    }
    return result.exit_code;
}

}  // namespace cbci::cli
