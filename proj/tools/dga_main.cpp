// Command-line front end: sample diagnosis, network training, the method
// comparison harness, ratio-code inspection, rule-table dumps and gas-trend
// reports.
//
// Exit codes: 0 success, 2 malformed input, 3 configuration error,
// 4 training failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dga/dga.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitTraining = 4;

constexpr const char* kModelDirEnv = "DGA_MODEL_DIR";

struct Options {
    std::string input;
    std::string output;
    std::vector<std::string> methods{"rogers", "iec"};
    std::string iec_table;
    double floor = dga::kDefaultDetectionFloor;
    double threshold = 0.5;
    std::uint32_t seed = 42;
    std::string format = "text";
    std::string model_rogers;
    std::string model_iec;
    std::string train_method;
    std::vector<int> hidden;
    bool cv = false;
    bool train_first = false;
    std::string id_filter;
    dga::TrainConfig train;
    std::map<std::string, double> gas;  // codes subcommand
};

dga::OutputFormat format_of(const Options& opt) {
    auto f = dga::parse_format(opt.format);
    if (!f) throw dga::ConfigError("unknown output format '" + opt.format + "'");
    return *f;
}

dga::IecVariant variant_of(const Options& opt, dga::IecVariant fallback) {
    if (opt.iec_table.empty()) return fallback;
    if (opt.iec_table == "printed") return dga::IecVariant::Printed;
    if (opt.iec_table == "corrected") return dga::IecVariant::Corrected;
    throw dga::ConfigError("unknown IEC table variant '" + opt.iec_table + "'");
}

/// Buffers the full rendering, then writes it in one piece so failures never
/// leave partial output behind.
void emit(const std::string& text, const Options& opt) {
    if (opt.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.output);
    if (!out) throw dga::ConfigError("cannot open output file: " + opt.output);
    out << text;
    if (!out) throw dga::ConfigError("failed writing output file: " + opt.output);
}

dga::Corpus read_corpus(const std::string& input, double floor) {
    if (input == "builtin") return dga::builtin_corpus();
    if (input == "builtin:el-meghier") return dga::trend_history_el_meghier();
    if (input == "builtin:darguina") return dga::trend_history_darguina();
    std::ifstream in(input);
    if (!in) throw dga::ParseError(0, "cannot open input file: " + input);
    return dga::parse_samples(in, floor);
}

std::filesystem::path model_path(const std::string& flag, dga::RatioMethod method) {
    if (!flag.empty()) return flag;
    if (const char* dir = std::getenv(kModelDirEnv)) {
        return std::filesystem::path(dir) /
               (method == dga::RatioMethod::Rogers ? "ann-rogers.json" : "ann-iec.json");
    }
    throw dga::ConfigError(std::string("no model configured for ann-") +
                           std::string(to_string(method)) +
                           " (pass --model-" + std::string(to_string(method)) +
                           " or set " + kModelDirEnv + ")");
}

dga::TrainedModel load_model_checked(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw dga::ConfigError("model file does not exist: " + path.string());
    return dga::load_model(path);
}

dga::TrainedModel train_builtin(dga::RatioMethod method, const dga::TrainConfig& config,
                                std::vector<int> layer_sizes, dga::TrainReport* report_out) {
    if (layer_sizes.empty()) layer_sizes = dga::default_layer_sizes(method);
    const auto patterns = dga::training_set(method);
    auto net = dga::init_network(method, layer_sizes, config.seed);
    auto [trained, report] = dga::train_lm(std::move(net), patterns, config);
    if (report_out) *report_out = report;
    return {std::move(trained), config, report.final_mse};
}

void print_report(const dga::TrainReport& report, std::ostream& out) {
    out << "epochs " << report.epochs << ", final mse " << report.final_mse << ", "
        << (report.converged ? "converged" : "not converged") << " ("
        << to_string(report.stop_reason) << ")\n";
}

int cmd_diagnose(const Options& opt) {
    dga::MethodSet set{false, false, false, false};
    for (const auto& m : opt.methods) {
        if (m == "rogers") set.rogers = true;
        else if (m == "iec") set.iec = true;
        else if (m == "ann-rogers") set.ann_rogers = true;
        else if (m == "ann-iec") set.ann_iec = true;
        else if (m == "all") set = {true, true, true, true};
        else throw dga::ConfigError("unknown method '" + m + "'");
    }

    dga::PipelineConfig config;
    config.iec_variant = variant_of(opt, dga::IecVariant::Corrected);
    config.detection_floor = opt.floor;
    config.confidence_threshold = opt.threshold;

    dga::TrainedModel rogers_model, iec_model;
    dga::Models models;
    if (set.ann_rogers) {
        rogers_model = load_model_checked(model_path(opt.model_rogers, dga::RatioMethod::Rogers));
        models.rogers = &rogers_model;
    }
    if (set.ann_iec) {
        iec_model = load_model_checked(model_path(opt.model_iec, dga::RatioMethod::Iec));
        models.iec = &iec_model;
    }

    const auto corpus = read_corpus(opt.input, opt.floor);
    std::vector<dga::DiagnosisReport> reports;
    reports.reserve(corpus.samples.size());
    for (const auto& sample : corpus.samples)
        reports.push_back(dga::diagnose(sample, set, config, models));

    std::ostringstream os;
    dga::render(std::span<const dga::DiagnosisReport>(reports), format_of(opt), os);
    emit(os.str(), opt);
    return kExitOk;
}

int cmd_train(const Options& opt) {
    dga::RatioMethod method;
    if (opt.train_method == "rogers") method = dga::RatioMethod::Rogers;
    else if (opt.train_method == "iec") method = dga::RatioMethod::Iec;
    else throw dga::ConfigError("train --method must be rogers or iec");

    dga::TrainConfig config = opt.train;
    config.seed = opt.seed;

    std::vector<int> layer_sizes;
    const auto patterns = dga::training_set(method);
    const int in_size = static_cast<int>(patterns.front().input.size());
    const int out_size = static_cast<int>(patterns.front().target.size());
    if (!opt.hidden.empty()) {
        layer_sizes.push_back(in_size);
        for (int h : opt.hidden) layer_sizes.push_back(h);
        layer_sizes.push_back(out_size);
    }

    if (opt.cv) {
        std::vector<std::vector<int>> candidates;
        for (int h : {5, 10, 15, 20}) candidates.push_back({in_size, h, out_size});
        const auto cv = dga::cross_validate(method, candidates, patterns, config);
        for (const auto& s : cv.scores) {
            std::cout << "cv candidate (";
            for (std::size_t i = 0; i < s.layer_sizes.size(); ++i)
                std::cout << (i ? "," : "") << s.layer_sizes[i];
            std::cout << "): mean held-out mse " << s.mean_holdout_mse << '\n';
        }
        std::cout << "cv winner: hidden " << cv.best[1] << '\n';
        if (layer_sizes.empty()) layer_sizes = cv.best;
    }

    std::string out_path = opt.output;
    if (out_path.empty())
        out_path = std::string("ann-") + std::string(to_string(method)) + ".json";
    {
        // validate the output path before spending time training
        const bool existed = std::filesystem::exists(out_path);
        std::ofstream probe(out_path, std::ios::app);
        if (!probe) throw dga::ConfigError("cannot write model file: " + out_path);
        probe.close();
        if (!existed) std::filesystem::remove(out_path);
    }

    dga::TrainReport report;
    const auto model = train_builtin(method, config, layer_sizes, &report);
    print_report(report, std::cout);
    if (!report.converged) {
        std::cerr << "training did not reach the MSE goal; no model written\n";
        return kExitTraining;
    }
    dga::save_model(model, out_path);
    std::cout << "model written to " << out_path << '\n';
    return kExitOk;
}

int cmd_eval(const Options& opt) {
    const auto variant = variant_of(opt, dga::IecVariant::Printed);
    dga::PipelineConfig config;
    config.iec_variant = variant;
    config.detection_floor = opt.floor;
    config.confidence_threshold = opt.threshold;

    dga::TrainedModel rogers_model, iec_model;
    if (opt.train_first) {
        dga::TrainConfig tc = opt.train;
        tc.seed = opt.seed;
        rogers_model = train_builtin(dga::RatioMethod::Rogers, tc, {}, nullptr);
        iec_model = train_builtin(dga::RatioMethod::Iec, tc, {}, nullptr);
    } else {
        rogers_model = load_model_checked(model_path(opt.model_rogers, dga::RatioMethod::Rogers));
        iec_model = load_model_checked(model_path(opt.model_iec, dga::RatioMethod::Iec));
    }

    const auto corpus = read_corpus(opt.input, opt.floor);
    const auto reference = dga::reference_results();
    const bool use_reference = opt.input == "builtin";
    const auto table = dga::evaluate(corpus, rogers_model, iec_model, variant,
                                     use_reference ? &reference : nullptr, config);

    std::ostringstream os;
    dga::render(table, format_of(opt), os);
    emit(os.str(), opt);
    return kExitOk;
}

int cmd_codes(const Options& opt) {
    dga::GasSample sample;
    sample.id = "inline";
    sample.h2 = {opt.gas.at("h2"), false};
    sample.ch4 = {opt.gas.at("ch4"), false};
    sample.c2h2 = {opt.gas.at("c2h2"), false};
    sample.c2h4 = {opt.gas.at("c2h4"), false};
    sample.c2h6 = {opt.gas.at("c2h6"), false};
    sample.co = {opt.gas.count("co") ? opt.gas.at("co") : opt.floor, !opt.gas.count("co")};
    sample.co2 = {opt.gas.count("co2") ? opt.gas.at("co2") : opt.floor, !opt.gas.count("co2")};

    dga::PipelineConfig config;
    config.iec_variant = variant_of(opt, dga::IecVariant::Corrected);
    config.detection_floor = opt.floor;

    const auto report = dga::diagnose(sample, {true, true, false, false}, config, {});
    std::ostringstream os;
    dga::render(std::span<const dga::DiagnosisReport>(&report, 1), format_of(opt), os);
    emit(os.str(), opt);
    return kExitOk;
}

int cmd_trend(const Options& opt) {
    const auto corpus = read_corpus(opt.input, opt.floor);

    // group by id, preserving first-seen order
    std::vector<std::string> order;
    std::map<std::string, std::vector<dga::GasSample>> groups;
    for (const auto& s : corpus.samples) {
        if (!opt.id_filter.empty() && s.id != opt.id_filter) continue;
        if (!groups.count(s.id)) order.push_back(s.id);
        groups[s.id].push_back(s);
    }
    if (order.empty())
        throw dga::ParseError(0, opt.id_filter.empty()
                                     ? "no samples in input"
                                     : "no samples with id '" + opt.id_filter + "'");

    std::ostringstream os;
    for (const auto& id : order) {
        try {
            const auto table = dga::trend_report(groups[id]);
            dga::render(table, format_of(opt), os);
        } catch (const std::invalid_argument& e) {
            throw dga::ParseError(0, e.what());
        }
    }
    emit(os.str(), opt);
    return kExitOk;
}

int cmd_tables(const Options& opt) {
    std::ostringstream os;
    const auto format = format_of(opt);
    const auto variant = variant_of(opt, dga::IecVariant::Corrected);
    bool any = false;
    for (const auto& m : opt.methods) {
        if (m == "rogers" || m == "all") {
            dga::render(dga::rogers_rule_table(), format, os);
            any = true;
        }
        if (m == "iec" || m == "all") {
            dga::render(dga::iec_rule_table(variant), format, os);
            any = true;
        }
    }
    if (!any) throw dga::ConfigError("tables --method must include rogers or iec");
    emit(os.str(), opt);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Transformer dissolved-gas fault diagnosis: Rogers and IEC ratio tables "
        "plus neural networks trained on the ratio-code patterns."};
    app.require_subcommand(1);
    app.footer(
        "Sample CSV schema: id,date,h2,ch4,c2h2,c2h4,c2h6,co,co2,label\n"
        "  date ISO-8601 or empty; gas cells: decimal ppm, '<v' (detection limit),\n"
        "  or empty (below detection); label one of N/PD/ARC/OH or empty;\n"
        "  '#' lines are comments. The token 'builtin' names the bundled corpus.\n"
        "Exit codes: 0 success, 2 malformed input, 3 configuration error,\n"
        "  4 training failure.\n"
        "Environment: " + std::string(kModelDirEnv) +
        " names a directory holding ann-rogers.json / ann-iec.json.");

    Options opt;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", opt.format, "Output format: text, csv or json");
        cmd->add_option("--output", opt.output, "Write output to a file instead of stdout");
    };
    auto add_train_knobs = [&](CLI::App* cmd) {
        cmd->add_option("--mse-goal", opt.train.mse_goal, "Stop when the MSE reaches this");
        cmd->add_option("--max-epochs", opt.train.max_epochs, "Epoch cap");
        cmd->add_option("--mu-init", opt.train.mu_init, "Initial damping");
        cmd->add_option("--mu-factor", opt.train.mu_factor, "Damping step factor");
        cmd->add_option("--mu-max", opt.train.mu_max, "Damping limit");
        cmd->add_option("--seed", opt.seed, "Weight initialization seed");
    };

    auto* diagnose = app.add_subcommand(
        "diagnose", "Diagnose samples from a CSV file (or 'builtin')");
    diagnose->add_option("--input", opt.input, "Sample CSV path or 'builtin'")->required();
    diagnose->add_option("--method", opt.methods,
                         "Methods: rogers, iec, ann-rogers, ann-iec, all")
        ->delimiter(',');
    diagnose->add_option("--iec-table", opt.iec_table,
                         "IEC table variant: printed or corrected (default corrected)");
    diagnose->add_option("--floor", opt.floor, "Detection floor in ppm");
    diagnose->add_option("--threshold", opt.threshold, "Low-confidence threshold");
    diagnose->add_option("--model-rogers", opt.model_rogers, "Rogers model file");
    diagnose->add_option("--model-iec", opt.model_iec, "IEC model file");
    add_format(diagnose);

    auto* train = app.add_subcommand("train", "Train a network on the built-in patterns");
    train->add_option("--method", opt.train_method, "rogers or iec")->required();
    train->add_option("--out", opt.output, "Model file to write");
    train->add_option("--hidden", opt.hidden, "Hidden layer sizes")->delimiter(',');
    train->add_flag("--cv", opt.cv, "Leave-one-out cross-validation over hidden sizes");
    add_train_knobs(train);

    auto* eval = app.add_subcommand(
        "eval", "Compare all four methods on a labeled corpus (or 'builtin')");
    eval->add_option("--corpus", opt.input, "Corpus CSV path or 'builtin'")->required();
    eval->add_option("--iec-table", opt.iec_table,
                     "IEC table variant: printed or corrected (default printed)");
    eval->add_option("--model-rogers", opt.model_rogers, "Rogers model file");
    eval->add_option("--model-iec", opt.model_iec, "IEC model file");
    eval->add_flag("--train-first", opt.train_first, "Train both models in-process");
    eval->add_option("--floor", opt.floor, "Detection floor in ppm");
    eval->add_option("--threshold", opt.threshold, "Low-confidence threshold");
    add_train_knobs(eval);
    add_format(eval);

    auto* codes = app.add_subcommand("codes", "Show ratios, codes and table verdicts "
                                              "for inline gas values");
    for (const char* g : {"h2", "ch4", "c2h2", "c2h4", "c2h6"})
        codes->add_option(std::string("--") + g, opt.gas[g],
                          std::string(g) + " concentration in ppm")
            ->required();
    for (const char* g : {"co", "co2"})
        codes->add_option(std::string("--") + g, opt.gas[g],
                          std::string(g) + " concentration in ppm");
    codes->add_option("--floor", opt.floor, "Detection floor in ppm");
    codes->add_option("--iec-table", opt.iec_table,
                      "IEC table variant: printed or corrected (default corrected)");
    add_format(codes);

    auto* trend = app.add_subcommand(
        "trend", "Per-gas time series for dated sampling histories");
    trend->add_option("--input", opt.input,
                      "Sample CSV path, 'builtin:el-meghier' or 'builtin:darguina'")
        ->required();
    trend->add_option("--id", opt.id_filter, "Only this transformer id");
    trend->add_option("--floor", opt.floor, "Detection floor in ppm");
    add_format(trend);

    auto* tables = app.add_subcommand("tables", "Dump the fault lookup tables");
    tables->add_option("--method", opt.methods, "rogers, iec or all")->delimiter(',');
    tables->add_option("--iec-table", opt.iec_table,
                       "IEC table variant: printed or corrected (default corrected)");
    add_format(tables);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    // codes requires both gas maps: drop optional gases CLI11 default-inserted
    if (codes->parsed()) {
        for (const char* g : {"co", "co2"})
            if (codes->count(std::string("--") + g) == 0) opt.gas.erase(g);
    }

    try {
        if (diagnose->parsed()) return cmd_diagnose(opt);
        if (train->parsed()) return cmd_train(opt);
        if (eval->parsed()) return cmd_eval(opt);
        if (codes->parsed()) return cmd_codes(opt);
        if (trend->parsed()) return cmd_trend(opt);
        if (tables->parsed()) return cmd_tables(opt);
    } catch (const dga::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dga::ModelIoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dga::TrainingFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        print_report(e.report, std::cerr);
        return kExitTraining;
    } catch (const dga::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
