// pkiflow command line: ingestion, the experiment ladder (baselines, feature
// selection, PKI, progressive PKI, grid search), synthetic data generation,
// model scoring and report rendering.

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pkiflow/experiment.hpp"
#include "pkiflow/model_io.hpp"

namespace fs = std::filesystem;
using namespace pkiflow;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<uint64_t> seed;
    std::optional<unsigned> jobs;
};

ExperimentConfig load_config(const GlobalOptions& opts) {
    ExperimentConfig config;
    if (!opts.config_path.empty()) config = ExperimentConfig::from_json(read_text_file(opts.config_path));
    if (opts.seed) {
        config.seed = *opts.seed;
        config.synthetic.seed = *opts.seed;
    }
    if (opts.jobs) config.jobs = *opts.jobs;
    return config;
}

void write_artifacts(const std::string& out_dir,
                     const std::map<std::string, std::string>& artifacts) {
    fs::create_directories(out_dir);
    for (const auto& [name, content] : artifacts) {
        write_text_file((fs::path(out_dir) / name).string(), content);
    }
}

int run_stages(const GlobalOptions& opts, const StageSelection& stages) {
    ExperimentConfig config = load_config(opts);
    if (stages.grid) {
        std::cout << "grid: " << config.grid.size() << " combinations ("
                  << config.grid.covariance_types.size() << " covariance types x "
                  << config.grid.n_estimator_values().size() << " estimator counts x "
                  << config.grid.learning_rates.size() << " learning rates)\n";
    }
    ExperimentResult result = run_experiment(config, stages);
    write_artifacts(opts.out_dir, result.artifacts);
    auto rendered = emit_report(result.report_json, "text");
    write_artifacts(opts.out_dir, rendered);
    std::cout << rendered.at("report.txt");
    std::cout << "artifacts written to " << opts.out_dir << "\n";
    return 0;
}

int run_ingest(const GlobalOptions& opts) {
    ExperimentConfig config = load_config(opts);
    if (config.train_csv.empty())
        throw ConfigError("ingest needs data.train_csv and data.test_csv in the config");
    std::map<std::string, std::string> artifacts;
    auto [train_table, train_log] = ingest_csv_file(config.train_csv, config);
    artifacts["train_clean.csv"] = write_feature_csv(train_table);
    artifacts["train_sanitize.json"] = train_log.to_json();
    auto [test_table, test_log] = ingest_csv_file(config.test_csv, config);
    artifacts["test_clean.csv"] = write_feature_csv(test_table);
    artifacts["test_sanitize.json"] = test_log.to_json();
    write_artifacts(opts.out_dir, artifacts);
    std::cout << "ingested " << train_table.values.rows << " train rows, "
              << test_table.values.rows << " test rows, " << train_table.feature_names.size()
              << " features\n";
    return 0;
}

int run_synth(const GlobalOptions& opts) {
    ExperimentConfig config = load_config(opts);
    SyntheticData data = generate_synthetic(config.synthetic);
    std::map<std::string, std::string> artifacts;
    artifacts["train.csv"] = write_feature_csv(feature_table_from_dataset(data.train));
    artifacts["test.csv"] = write_feature_csv(feature_table_from_dataset(data.test));
    write_artifacts(opts.out_dir, artifacts);
    std::cout << "wrote " << data.train.n() << " train rows and " << data.test.n()
              << " test rows with " << data.train.d() << " features\n";
    return 0;
}

int run_score(const GlobalOptions& opts, const std::string& model_path,
              const std::string& flows_path) {
    ExperimentConfig config = load_config(opts);
    PkiModel model = pki_model_from_json(read_text_file(model_path));

    RawFlowTable raw = parse_flow_csv(read_text_file(flows_path), true);
    bool has_labels = false;
    for (const auto& name : raw.column_names) {
        if (name == config.label_column) has_labels = true;
    }
    std::vector<std::string> labels;
    RawFlowTable features = raw;
    if (has_labels) {
        std::tie(features, labels) =
            drop_identifier_columns(raw, config.drop_list, config.label_column);
    } else {
        IdentifierDropList drop = config.drop_list;
        std::vector<size_t> keep;
        for (size_t j = 0; j < raw.column_names.size(); ++j) {
            if (!drop.matches(raw.column_names[j])) keep.push_back(j);
        }
        features.column_names.clear();
        for (size_t j : keep) features.column_names.push_back(raw.column_names[j]);
        for (auto& row : features.rows) {
            std::vector<std::string> cells;
            for (size_t j : keep) cells.push_back(row[j]);
            row = std::move(cells);
        }
        labels.assign(features.rows.size(), "");
    }
    auto [table, log] = sanitize_values(features, labels, config.sanitize);

    // column mapping by name when the model knows its training schema
    Matrix x = table.values;
    if (!model.feature_names.empty()) {
        std::vector<size_t> mapping;
        for (const auto& name : model.feature_names) {
            auto it = std::find(table.feature_names.begin(), table.feature_names.end(), name);
            if (it == table.feature_names.end())
                throw DataError("flows are missing feature '" + name + "'");
            mapping.push_back(static_cast<size_t>(it - table.feature_names.begin()));
        }
        x = table.values.select_columns(mapping);
    }

    std::vector<int> pred = pki_predict(model, x);
    std::string csv = "row,predicted\n";
    for (size_t i = 0; i < pred.size(); ++i) {
        csv += std::to_string(i) + "," + model.class_index.name(static_cast<size_t>(pred[i])) + "\n";
    }
    std::map<std::string, std::string> artifacts;
    artifacts["predictions.csv"] = csv;

    if (has_labels) {
        EncodedLabels enc = encode_labels(table.labels, model.class_index.names);
        ConfusionMatrix cm = confusion_matrix(enc.y, pred, model.class_index);
        SummaryReport summary = summarize(cm);
        artifacts["score_report.txt"] =
            render_report_text(summary) + "\n" + render_confusion_text(cm);
        std::cout << render_report_text(summary);
    }
    write_artifacts(opts.out_dir, artifacts);
    std::cout << "scored " << pred.size() << " flows\n";
    return 0;
}

int run_render(const GlobalOptions& opts, const std::string& report_path,
               const std::string& format) {
    auto artifacts = emit_report(read_text_file(report_path), format);
    write_artifacts(opts.out_dir, artifacts);
    for (const auto& [name, content] : artifacts) {
        (void)content;
        std::cout << "wrote " << (fs::path(opts.out_dir) / name).string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prior-knowledge-augmented flow classification"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "experiment config JSON")->envname("PKIFLOW_CONFIG");
    app.add_option("--out", opts.out_dir, "output directory (default .)");
    uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the config seed");
    unsigned jobs_value = 0;
    auto* jobs_opt = app.add_option("--jobs", jobs_value, "worker threads for sweeps");

    auto* ingest = app.add_subcommand("ingest", "parse, strip identifiers and sanitize flow CSVs");
    auto* baseline = app.add_subcommand("baseline", "supervised baselines on all features");
    auto* featsel = app.add_subcommand("featsel", "feature-count sweep per selection method");
    auto* pki = app.add_subcommand("pki", "cluster-count sweep with one prior-knowledge column");
    auto* progressive = app.add_subcommand("progressive", "stack-size sweep of prior knowledge");
    auto* grid = app.add_subcommand("grid", "covariance/boosting grid search for gmm + gbt");
    auto* synth = app.add_subcommand("synth", "generate a synthetic train/test pair");

    auto* score = app.add_subcommand("score", "apply a saved model to a flow CSV");
    std::string model_path, flows_path;
    score->add_option("model", model_path, "model JSON path")->required();
    score->add_option("flows", flows_path, "flow CSV path")->required();

    auto* render = app.add_subcommand("report", "re-render a run report");
    std::string report_path, format = "text";
    render->add_option("report", report_path, "report.json path")->required();
    render->add_option("--format", format, "json, text or csv");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opts.seed = seed_value;
    if (*jobs_opt) opts.jobs = jobs_value;

    try {
        if (*ingest) return run_ingest(opts);
        if (*synth) return run_synth(opts);
        if (*baseline) return run_stages(opts, {.baseline1 = true});
        if (*featsel) return run_stages(opts, {.baseline2 = true});
        if (*pki) return run_stages(opts, {.baseline2 = true, .pki = true});
        if (*progressive) return run_stages(opts, {.baseline2 = true, .progressive = true});
        if (*grid) return run_stages(opts, {.baseline2 = true, .grid = true});
        if (*score) return run_score(opts, model_path, flows_path);
        if (*render) return run_render(opts, report_path, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
