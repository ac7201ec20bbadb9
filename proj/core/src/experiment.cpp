#include "pkiflow/experiment.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pkiflow/model_io.hpp"
#include "pkiflow/parallel.hpp"

namespace pkiflow {

namespace {

using nlohmann::json;

// --- config parsing -------------------------------------------------------

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + key + "'");
    }
}

SanitizePolicy sanitize_from_json(const json& j) {
    reject_unknown_keys(j, {"infinity_action", "nan_action"}, "sanitize");
    SanitizePolicy policy;
    std::string inf = get_or<std::string>(j, "infinity_action", "column_max_finite");
    if (inf == "column_max_finite") {
        policy.infinity_action = InfinityAction::replace_with_column_max_finite;
    } else if (inf == "drop_row") {
        policy.infinity_action = InfinityAction::drop_row;
    } else {
        throw ConfigError("infinity_action must be column_max_finite or drop_row");
    }
    std::string nan = get_or<std::string>(j, "nan_action", "zero");
    if (nan == "zero") {
        policy.nan_action = NanAction::replace_with_zero;
    } else if (nan == "drop_row") {
        policy.nan_action = NanAction::drop_row;
    } else {
        throw ConfigError("nan_action must be zero or drop_row");
    }
    return policy;
}

json sanitize_to_json(const SanitizePolicy& policy) {
    return json{{"infinity_action",
                 policy.infinity_action == InfinityAction::replace_with_column_max_finite
                     ? "column_max_finite"
                     : "drop_row"},
                {"nan_action",
                 policy.nan_action == NanAction::replace_with_zero ? "zero" : "drop_row"}};
}

SyntheticSpec synthetic_from_json(const json& j, uint64_t default_seed) {
    reject_unknown_keys(j,
                        {"class_names", "train_counts", "test_counts", "n_features",
                         "clusters_per_class", "latent_clusters", "separation", "noise_sigma",
                         "latent_offset", "latent_cluster_mode", "seed"},
                        "synthetic");
    SyntheticSpec spec = SyntheticSpec::defaults();
    spec.seed = default_seed;
    if (j.contains("class_names")) {
        spec.class_names = j.at("class_names").get<std::vector<std::string>>();
        spec.train_counts.clear();
        spec.test_counts.clear();
    }
    if (j.contains("train_counts"))
        spec.train_counts = j.at("train_counts").get<std::vector<size_t>>();
    if (j.contains("test_counts")) spec.test_counts = j.at("test_counts").get<std::vector<size_t>>();
    spec.n_features = get_or<size_t>(j, "n_features", spec.n_features);
    spec.clusters_per_class = get_or<size_t>(j, "clusters_per_class", spec.clusters_per_class);
    spec.latent_clusters = get_or<size_t>(j, "latent_clusters", spec.latent_clusters);
    spec.separation = get_or<double>(j, "separation", spec.separation);
    spec.noise_sigma = get_or<double>(j, "noise_sigma", spec.noise_sigma);
    spec.latent_offset = get_or<double>(j, "latent_offset", spec.latent_offset);
    spec.latent_cluster_mode = get_or<bool>(j, "latent_cluster_mode", spec.latent_cluster_mode);
    spec.seed = get_or<uint64_t>(j, "seed", spec.seed);
    return spec;
}

json synthetic_to_json(const SyntheticSpec& spec) {
    return json{{"class_names", spec.class_names},
                {"train_counts", spec.train_counts},
                {"test_counts", spec.test_counts},
                {"n_features", spec.n_features},
                {"clusters_per_class", spec.clusters_per_class},
                {"latent_clusters", spec.latent_clusters},
                {"separation", spec.separation},
                {"noise_sigma", spec.noise_sigma},
                {"latent_offset", spec.latent_offset},
                {"latent_cluster_mode", spec.latent_cluster_mode},
                {"seed", spec.seed}};
}

} // namespace

std::vector<size_t> GridSpec::n_estimator_values() const {
    std::vector<size_t> out;
    for (size_t v = n_estimators_min; v <= n_estimators_max; v += n_estimators_step)
        out.push_back(v);
    return out;
}

size_t GridSpec::size() const {
    return covariance_types.size() * n_estimator_values().size() * learning_rates.size();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    reject_unknown_keys(
        j, {"seed", "jobs", "data", "synthetic", "methods", "sweeps", "params", "grid"}, "config");

    ExperimentConfig config;
    config.seed = get_or<uint64_t>(j, "seed", config.seed);
    config.jobs = get_or<unsigned>(j, "jobs", config.jobs);

    if (j.contains("data")) {
        const json& data = j.at("data");
        reject_unknown_keys(data,
                            {"train_csv", "test_csv", "label_column", "drop_columns", "sanitize",
                             "class_order", "validation_fraction"},
                            "data");
        config.train_csv = get_or<std::string>(data, "train_csv", "");
        config.test_csv = get_or<std::string>(data, "test_csv", "");
        config.label_column = get_or<std::string>(data, "label_column", config.label_column);
        if (data.contains("drop_columns"))
            config.drop_list.patterns = data.at("drop_columns").get<std::vector<std::string>>();
        if (data.contains("sanitize")) config.sanitize = sanitize_from_json(data.at("sanitize"));
        if (data.contains("class_order"))
            config.class_order = data.at("class_order").get<std::vector<std::string>>();
        config.validation_fraction =
            get_or<double>(data, "validation_fraction", config.validation_fraction);
        if (config.validation_fraction < 0.0 || config.validation_fraction >= 1.0)
            throw ConfigError("validation_fraction must be in [0, 1)");
        if (config.train_csv.empty() != config.test_csv.empty())
            throw ConfigError("train_csv and test_csv must be given together");
    }
    if (j.contains("synthetic")) {
        config.synthetic = synthetic_from_json(j.at("synthetic"), config.seed);
    } else {
        config.synthetic.seed = config.seed;
    }

    if (j.contains("methods")) {
        const json& methods = j.at("methods");
        reject_unknown_keys(methods, {"supervised", "selection", "unsupervised"}, "methods");
        if (methods.contains("supervised")) {
            config.supervised.clear();
            for (const auto& name : methods.at("supervised"))
                config.supervised.push_back(supervised_kind_from_name(name.get<std::string>()));
        }
        if (methods.contains("selection")) {
            config.selections.clear();
            for (const auto& name : methods.at("selection"))
                config.selections.push_back(selection_method_from_name(name.get<std::string>()));
        }
        if (methods.contains("unsupervised")) {
            config.unsupervised.clear();
            for (const auto& name : methods.at("unsupervised"))
                config.unsupervised.push_back(unsupervised_kind_from_name(name.get<std::string>()));
        }
        if (config.supervised.empty() || config.selections.empty() || config.unsupervised.empty())
            throw ConfigError("methods lists must be non-empty");
    }

    if (j.contains("sweeps")) {
        const json& sweeps = j.at("sweeps");
        reject_unknown_keys(sweeps, {"cluster_k_max", "max_stack"}, "sweeps");
        config.cluster_k_max = get_or<size_t>(sweeps, "cluster_k_max", config.cluster_k_max);
        config.max_stack = get_or<size_t>(sweeps, "max_stack", config.max_stack);
        if (config.cluster_k_max < 2 || config.max_stack < 1)
            throw ConfigError("sweep ranges must be non-empty");
    }

    if (j.contains("params")) {
        const json& params = j.at("params");
        reject_unknown_keys(params, {"dt", "rf", "gbt", "unsupervised", "mi_bins"}, "params");
        if (params.contains("dt")) {
            const json& dt = params.at("dt");
            reject_unknown_keys(dt, {"max_depth", "min_samples_split", "min_impurity_decrease"},
                                "params.dt");
            config.dt_params.max_depth = get_or<size_t>(dt, "max_depth", 0);
            config.dt_params.min_samples_split = get_or<size_t>(dt, "min_samples_split", 2);
            config.dt_params.min_impurity_decrease = get_or<double>(dt, "min_impurity_decrease", 0.0);
        }
        if (params.contains("rf")) {
            const json& rf = params.at("rf");
            reject_unknown_keys(rf,
                                {"n_trees", "features_per_split", "bootstrap", "max_depth",
                                 "min_samples_split", "min_impurity_decrease"},
                                "params.rf");
            config.rf_params.n_trees = get_or<size_t>(rf, "n_trees", 100);
            config.rf_params.features_per_split = get_or<size_t>(rf, "features_per_split", 0);
            config.rf_params.bootstrap = get_or<bool>(rf, "bootstrap", true);
            config.rf_params.tree.max_depth = get_or<size_t>(rf, "max_depth", 0);
            config.rf_params.tree.min_samples_split = get_or<size_t>(rf, "min_samples_split", 2);
            config.rf_params.tree.min_impurity_decrease =
                get_or<double>(rf, "min_impurity_decrease", 0.0);
        }
        if (params.contains("gbt")) {
            const json& gbt = params.at("gbt");
            reject_unknown_keys(
                gbt, {"n_estimators", "learning_rate", "max_depth", "l2_lambda", "min_samples_split"},
                "params.gbt");
            config.gbt_params.n_estimators = get_or<size_t>(gbt, "n_estimators", 100);
            config.gbt_params.learning_rate = get_or<double>(gbt, "learning_rate", 0.3);
            config.gbt_params.max_depth = get_or<size_t>(gbt, "max_depth", 6);
            config.gbt_params.l2_lambda = get_or<double>(gbt, "l2_lambda", 1.0);
            config.gbt_params.min_samples_split = get_or<size_t>(gbt, "min_samples_split", 2);
        }
        if (params.contains("unsupervised")) {
            const json& unsup = params.at("unsupervised");
            reject_unknown_keys(unsup, {"max_iter", "tol", "reg", "covariance_type"},
                                "params.unsupervised");
            config.unsup_params.max_iter = get_or<size_t>(unsup, "max_iter", 300);
            config.unsup_params.tol = get_or<double>(unsup, "tol", 1e-4);
            config.unsup_params.reg = get_or<double>(unsup, "reg", 1e-6);
            if (unsup.contains("covariance_type"))
                config.unsup_params.covariance_type =
                    covariance_type_from_name(unsup.at("covariance_type").get<std::string>());
        }
        config.mi_bins = get_or<size_t>(params, "mi_bins", 10);
        if (config.mi_bins < 2) throw ConfigError("mi_bins must be >= 2");
    }

    if (j.contains("grid")) {
        const json& grid = j.at("grid");
        reject_unknown_keys(grid, {"covariance_types", "n_estimators", "learning_rates"}, "grid");
        if (grid.contains("covariance_types")) {
            config.grid.covariance_types.clear();
            for (const auto& name : grid.at("covariance_types"))
                config.grid.covariance_types.push_back(
                    covariance_type_from_name(name.get<std::string>()));
        }
        if (grid.contains("n_estimators")) {
            const json& range = grid.at("n_estimators");
            reject_unknown_keys(range, {"min", "max", "step"}, "grid.n_estimators");
            config.grid.n_estimators_min = get_or<size_t>(range, "min", 10);
            config.grid.n_estimators_max = get_or<size_t>(range, "max", 200);
            config.grid.n_estimators_step = get_or<size_t>(range, "step", 10);
            if (config.grid.n_estimators_step == 0 ||
                config.grid.n_estimators_min > config.grid.n_estimators_max)
                throw ConfigError("bad grid.n_estimators range");
        }
        if (grid.contains("learning_rates"))
            config.grid.learning_rates = grid.at("learning_rates").get<std::vector<double>>();
        // the documented enumeration (and its tie-break) is ascending
        std::sort(config.grid.learning_rates.begin(), config.grid.learning_rates.end());
        if (config.grid.size() == 0) throw ConfigError("grid must be non-empty");
    }
    return config;
}

std::string ExperimentConfig::to_json() const {
    json methods_supervised = json::array();
    for (SupervisedKind kind : supervised) methods_supervised.push_back(supervised_kind_name(kind));
    json methods_selection = json::array();
    for (SelectionMethod method : selections)
        methods_selection.push_back(selection_method_name(method));
    json methods_unsupervised = json::array();
    for (UnsupervisedKind kind : unsupervised)
        methods_unsupervised.push_back(unsupervised_kind_name(kind));
    json grid_covs = json::array();
    for (CovarianceType cov : grid.covariance_types)
        grid_covs.push_back(covariance_type_name(cov));

    json j{
        {"seed", seed},
        {"jobs", jobs},
        {"data",
         json{{"train_csv", train_csv},
              {"test_csv", test_csv},
              {"label_column", label_column},
              {"drop_columns", drop_list.patterns},
              {"sanitize", sanitize_to_json(sanitize)},
              {"class_order", class_order},
              {"validation_fraction", validation_fraction}}},
        {"synthetic", synthetic_to_json(synthetic)},
        {"methods",
         json{{"supervised", methods_supervised},
              {"selection", methods_selection},
              {"unsupervised", methods_unsupervised}}},
        {"sweeps", json{{"cluster_k_max", cluster_k_max}, {"max_stack", max_stack}}},
        {"params",
         json{{"dt",
               json{{"max_depth", dt_params.max_depth},
                    {"min_samples_split", dt_params.min_samples_split},
                    {"min_impurity_decrease", dt_params.min_impurity_decrease}}},
              {"rf",
               json{{"n_trees", rf_params.n_trees},
                    {"features_per_split", rf_params.features_per_split},
                    {"bootstrap", rf_params.bootstrap},
                    {"max_depth", rf_params.tree.max_depth},
                    {"min_samples_split", rf_params.tree.min_samples_split},
                    {"min_impurity_decrease", rf_params.tree.min_impurity_decrease}}},
              {"gbt",
               json{{"n_estimators", gbt_params.n_estimators},
                    {"learning_rate", gbt_params.learning_rate},
                    {"max_depth", gbt_params.max_depth},
                    {"l2_lambda", gbt_params.l2_lambda},
                    {"min_samples_split", gbt_params.min_samples_split}}},
              {"unsupervised",
               json{{"max_iter", unsup_params.max_iter},
                    {"tol", unsup_params.tol},
                    {"reg", unsup_params.reg},
                    {"covariance_type", covariance_type_name(unsup_params.covariance_type)}}},
              {"mi_bins", mi_bins}}},
        {"grid",
         json{{"covariance_types", grid_covs},
              {"n_estimators",
               json{{"min", grid.n_estimators_min},
                    {"max", grid.n_estimators_max},
                    {"step", grid.n_estimators_step}}},
              {"learning_rates", grid.learning_rates}}}};
    return j.dump();
}

std::string fnv1a_hex(const std::string& text) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("short write to '" + path + "'");
}

std::pair<FeatureTable, SanitizeLog> ingest_csv_file(const std::string& path,
                                                     const ExperimentConfig& config) {
    RawFlowTable raw = parse_flow_csv(read_text_file(path), true);
    auto [dropped, labels] = drop_identifier_columns(raw, config.drop_list, config.label_column);
    return sanitize_values(dropped, labels, config.sanitize);
}

PreparedData prepare_data(const ExperimentConfig& config) {
    PreparedData data;
    if (!config.train_csv.empty()) {
        auto [train_table, train_log] = ingest_csv_file(config.train_csv, config);
        auto [test_table, test_log] = ingest_csv_file(config.test_csv, config);
        std::vector<std::string> order = config.class_order;
        if (order.empty()) {
            // one shared index covering both splits, first appearance in train then test
            EncodedLabels probe = encode_labels(train_table.labels);
            order = probe.class_index.names;
            for (const auto& label : test_table.labels) {
                if (std::find(order.begin(), order.end(), label) == order.end())
                    order.push_back(label);
            }
        }
        if (train_table.feature_names != test_table.feature_names)
            throw DataError("train and test CSVs disagree on the feature columns");
        data.train_full = dataset_from_feature_table(train_table, order);
        data.test = dataset_from_feature_table(test_table, order);
        data.train_sanitize_json = train_log.to_json();
        data.test_sanitize_json = test_log.to_json();
    } else {
        SyntheticData synth = generate_synthetic(config.synthetic);
        data.train_full = std::move(synth.train);
        data.test = std::move(synth.test);
        data.train_sanitize_json = "{}";
        data.test_sanitize_json = "{}";
    }
    SplitResult split = stratified_split(data.train_full, {config.validation_fraction, config.seed});
    data.train = std::move(split.train);
    data.val = std::move(split.val);
    return data;
}

// --- report assembly -------------------------------------------------------

namespace {

json summary_to_json(const SummaryReport& summary, const ConfusionMatrix& cm) {
    json per_class = json::array();
    for (size_t c = 0; c < summary.class_index.size(); ++c) {
        per_class.push_back(json{{"class", summary.class_index.names[c]},
                                 {"precision", summary.per_class.precision[c]},
                                 {"recall", summary.per_class.recall[c]},
                                 {"f1", summary.per_class.f1[c]},
                                 {"support", summary.per_class.support[c]}});
    }
    json confusion = json::array();
    for (const auto& row : cm.counts) confusion.push_back(row);
    return json{{"macro_f1", summary.macro_f1},
                {"weighted_f1", summary.weighted_f1},
                {"per_class", std::move(per_class)},
                {"classes", summary.class_index.names},
                {"confusion", std::move(confusion)}};
}

struct Evaluation {
    SummaryReport summary;
    ConfusionMatrix cm;
    json to_json() const { return summary_to_json(summary, cm); }
};

Evaluation evaluate(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                    const ClassIndex& index) {
    Evaluation out;
    out.cm = confusion_matrix(y_true, y_pred, index);
    out.summary = summarize(out.cm);
    return out;
}

json trace_to_json(const PkiSweepTrace& trace) {
    json out = json::array();
    for (const auto& point : trace.points)
        out.push_back(json{{"candidate", point.candidate}, {"macro_f1", point.val_macro_f1}});
    return out;
}

std::string pki_trace_csv(const PkiSweepTrace& trace, const std::string& column) {
    std::ostringstream out;
    out << column << ",macro_f1\n";
    char buf[64];
    for (const auto& point : trace.points) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", point.candidate, point.val_macro_f1);
        out << buf;
    }
    return out.str();
}

SupervisedSpec make_supervised_spec(const ExperimentConfig& config, SupervisedKind kind) {
    SupervisedSpec spec;
    spec.kind = kind;
    spec.dt = config.dt_params;
    spec.rf = config.rf_params;
    spec.gbt = config.gbt_params;
    spec.jobs = config.jobs;
    return spec;
}

UnsupervisedSpec make_unsupervised_spec(const ExperimentConfig& config, UnsupervisedKind kind) {
    UnsupervisedSpec spec = config.unsup_params;
    spec.kind = kind;
    return spec;
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

struct StageContext {
    std::map<std::string, SweepResult> sweeps;          // key "<sup>_<sel>"
    std::map<std::string, SelectionResult> best_selection; // per supervised kind name
    std::map<std::string, ProgressiveResult> progressive;  // key "<unsup>_<sup>"
    json comparison = json::array();
};

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const StageSelection& stages) {
    auto t_total = std::chrono::steady_clock::now();
    PreparedData data = prepare_data(config);
    size_t d = data.train.d();

    json report;
    json timings;
    StageContext ctx;
    ExperimentResult result;

    std::string config_json = config.to_json();
    report["provenance"] =
        json{{"config_hash", fnv1a_hex(config_json)},
             {"seed", config.seed},
             {"data_source", config.train_csv.empty() ? "synthetic" : "csv"},
             {"classes", data.train.class_index.names},
             {"n_features", d},
             {"train_rows", data.train.n()},
             {"val_rows", data.val.n()},
             {"test_rows", data.test.n()},
             {"sanitize_policy", sanitize_to_json(config.sanitize)},
             {"train_sanitize", json::parse(data.train_sanitize_json)},
             {"test_sanitize", json::parse(data.test_sanitize_json)}};

    bool need_baseline2 = stages.baseline2 || stages.pki || stages.progressive || stages.grid;

    // Baseline 1: every supervised method on all features. The supervised
    // seed is seed + d so this is literally the k = d candidate of the
    // feature sweep.
    if (stages.baseline1) {
        auto t0 = std::chrono::steady_clock::now();
        json fragment;
        for (SupervisedKind kind : config.supervised) {
            SupervisedSpec spec = make_supervised_spec(config, kind);
            spec.set_seed(config.seed + d);
            SupervisedModel model = fit_supervised(data.train, spec);
            std::vector<int> val_pred = predict_supervised(model, data.val.x);
            double val_f1 =
                macro_f1(confusion_matrix(data.val.y, val_pred, data.val.class_index));
            std::vector<int> test_pred = predict_supervised(model, data.test.x);
            Evaluation test_eval = evaluate(data.test.y, test_pred, data.test.class_index);
            std::string name = supervised_kind_name(kind);
            fragment[name] = json{{"val_macro_f1", val_f1}, {"test", test_eval.to_json()}};
            ctx.comparison.push_back(json{{"stage", "baseline1"},
                                          {"method", name},
                                          {"val_macro_f1", val_f1},
                                          {"test_macro_f1", test_eval.summary.macro_f1}});
            result.artifacts["baseline1_" + name + "_report.txt"] =
                render_report_text(test_eval.summary);
            result.artifacts["baseline1_" + name + "_confusion.txt"] =
                render_confusion_text(test_eval.cm);
        }
        report["stages"]["baseline1"] = std::move(fragment);
        timings["baseline1_ms"] = ms_since(t0);
    }

    // Baseline 2: feature-count sweep per (supervised, selection) pair; the
    // best pair per supervised method feeds the cluster pipelines.
    if (need_baseline2) {
        auto t0 = std::chrono::steady_clock::now();
        json pairs = json::array();
        for (SupervisedKind kind : config.supervised) {
            std::string sup_name = supervised_kind_name(kind);
            double best_f1 = -1.0;
            for (SelectionMethod method : config.selections) {
                std::string sel_name = selection_method_name(method);
                SupervisedSpec spec = make_supervised_spec(config, kind);
                SweepResult sweep = sweep_feature_count(data.train, data.val, method, spec,
                                                        config.seed, config.mi_bins, config.jobs);
                // test evaluation of the chosen k, refit with the sweep's derived seed
                SupervisedSpec refit_spec = make_supervised_spec(config, kind);
                refit_spec.set_seed(config.seed + sweep.best.k);
                Dataset sub_train = data.train;
                sub_train.x = data.train.x.select_columns(sweep.best.indices);
                sub_train.feature_names.clear();
                SupervisedModel model = fit_supervised(sub_train, refit_spec);
                std::vector<int> test_pred =
                    predict_supervised(model, data.test.x.select_columns(sweep.best.indices));
                Evaluation test_eval = evaluate(data.test.y, test_pred, data.test.class_index);

                pairs.push_back(json{{"supervised", sup_name},
                                     {"selection", sel_name},
                                     {"best_k", sweep.best.k},
                                     {"val_macro_f1", sweep.best.val_macro_f1},
                                     {"test_macro_f1", test_eval.summary.macro_f1},
                                     {"test", test_eval.to_json()}});
                result.artifacts["featsel_" + sup_name + "_" + sel_name + "_trace.csv"] =
                    sweep_trace_csv(sweep);
                if (sweep.best.val_macro_f1 > best_f1) {
                    best_f1 = sweep.best.val_macro_f1;
                    ctx.best_selection[sup_name] = sweep.best;
                }
                ctx.sweeps[sup_name + "_" + sel_name] = std::move(sweep);
            }
            ctx.comparison.push_back(json{{"stage", "baseline2"},
                                          {"method", sup_name},
                                          {"val_macro_f1", best_f1}});
        }
        json best = json::object();
        for (const auto& [sup_name, selection] : ctx.best_selection) {
            best[sup_name] = json{{"selection", selection_method_name(selection.method)},
                                  {"k", selection.k},
                                  {"val_macro_f1", selection.val_macro_f1}};
        }
        report["stages"]["baseline2"] = json{{"pairs", std::move(pairs)}, {"best", std::move(best)}};
        timings["baseline2_ms"] = ms_since(t0);
    }

    // PKI: single-member stacks, cluster count swept {1} + [2, k_max].
    if (stages.pki) {
        auto t0 = std::chrono::steady_clock::now();
        json combos = json::array();
        for (UnsupervisedKind unsup_kind : config.unsupervised) {
            for (SupervisedKind sup_kind : config.supervised) {
                std::string unsup_name = unsupervised_kind_name(unsup_kind);
                std::string sup_name = supervised_kind_name(sup_kind);
                const SelectionResult& selection = ctx.best_selection.at(sup_name);
                SupervisedSpec sup_spec = make_supervised_spec(config, sup_kind);
                sup_spec.set_seed(config.seed + selection.k);
                UnsupervisedSpec unsup_spec = make_unsupervised_spec(config, unsup_kind);
                auto [model, trace] =
                    pki_train(data.train, data.val, selection, unsup_spec, sup_spec,
                              default_cluster_candidates(config.cluster_k_max), config.seed,
                              config.jobs);
                std::vector<int> test_pred = pki_predict(model, data.test.x);
                Evaluation test_eval = evaluate(data.test.y, test_pred, data.test.class_index);

                double best_val = 0.0;
                for (const auto& point : trace.points) {
                    if (point.candidate == trace.chosen) best_val = point.val_macro_f1;
                }
                std::string key = unsup_name + "_" + sup_name;
                combos.push_back(json{{"unsupervised", unsup_name},
                                      {"supervised", sup_name},
                                      {"selection", selection_method_name(selection.method)},
                                      {"n_features", selection.k},
                                      {"chosen_clusters", trace.chosen},
                                      {"val_macro_f1", best_val},
                                      {"trace", trace_to_json(trace)},
                                      {"test", test_eval.to_json()}});
                ctx.comparison.push_back(json{{"stage", "pki"},
                                              {"method", key},
                                              {"val_macro_f1", best_val},
                                              {"test_macro_f1", test_eval.summary.macro_f1}});
                result.artifacts["pki_" + key + ".model.json"] = pki_model_to_json(model);
                result.artifacts["pki_" + key + "_confusion.txt"] =
                    render_confusion_text(test_eval.cm);
                result.artifacts["pki_" + key + "_trace.csv"] = pki_trace_csv(trace, "clusters");
            }
        }
        report["stages"]["pki"] = json{{"combinations", std::move(combos)}};
        timings["pki_ms"] = ms_since(t0);
    }

    // Progressive PKI: stack size swept 1..max_stack at the per-pair cluster
    // count chosen by a preliminary cluster sweep.
    if (stages.grid &&
        std::find(config.supervised.begin(), config.supervised.end(), SupervisedKind::gbt) ==
            config.supervised.end()) {
        throw ConfigError("grid search tunes the gmm + gbt pipeline; add \"gbt\" to "
                          "methods.supervised");
    }
    if (stages.progressive || stages.grid) {
        auto t0 = std::chrono::steady_clock::now();
        json combos = json::array();
        std::vector<std::pair<UnsupervisedKind, SupervisedKind>> wanted;
        if (stages.progressive) {
            for (UnsupervisedKind u : config.unsupervised)
                for (SupervisedKind s : config.supervised) wanted.emplace_back(u, s);
        }
        // the grid stage sits on the gmm + gbt progressive context
        if (stages.grid &&
            std::find(wanted.begin(), wanted.end(),
                      std::pair{UnsupervisedKind::gmm, SupervisedKind::gbt}) == wanted.end()) {
            wanted.emplace_back(UnsupervisedKind::gmm, SupervisedKind::gbt);
        }
        size_t configured_pairs =
            stages.progressive ? config.unsupervised.size() * config.supervised.size() : 0;
        for (size_t pair_idx = 0; pair_idx < wanted.size(); ++pair_idx) {
            auto [unsup_kind, sup_kind] = wanted[pair_idx];
            bool report_pair = stages.progressive && pair_idx < configured_pairs;
            std::string unsup_name = unsupervised_kind_name(unsup_kind);
            std::string sup_name = supervised_kind_name(sup_kind);
            const SelectionResult& selection = ctx.best_selection.at(sup_name);
            SupervisedSpec sup_spec = make_supervised_spec(config, sup_kind);
            sup_spec.set_seed(config.seed + selection.k);
            UnsupervisedSpec unsup_spec = make_unsupervised_spec(config, unsup_kind);
            ProgressiveResult prog =
                progressive_pki_train(data.train, data.val, selection, unsup_spec, sup_spec,
                                      config.max_stack, config.seed, config.jobs);
            std::string key = unsup_name + "_" + sup_name;
            if (report_pair) {
                std::vector<int> test_pred = progressive_pki_predict(prog.model, data.test.x);
                Evaluation test_eval = evaluate(data.test.y, test_pred, data.test.class_index);
                double best_val = 0.0;
                for (const auto& point : prog.stack_trace.points) {
                    if (point.candidate == prog.stack_trace.chosen) best_val = point.val_macro_f1;
                }
                combos.push_back(json{{"unsupervised", unsup_name},
                                      {"supervised", sup_name},
                                      {"selection", selection_method_name(selection.method)},
                                      {"n_features", selection.k},
                                      {"cluster_count", prog.cluster_trace.chosen},
                                      {"chosen_stack_size", prog.stack_trace.chosen},
                                      {"val_macro_f1", best_val},
                                      {"trace", trace_to_json(prog.stack_trace)},
                                      {"test", test_eval.to_json()}});
                ctx.comparison.push_back(json{{"stage", "progressive"},
                                              {"method", key},
                                              {"val_macro_f1", best_val},
                                              {"test_macro_f1", test_eval.summary.macro_f1}});
                result.artifacts["progressive_" + key + ".model.json"] =
                    pki_model_to_json(prog.model);
                result.artifacts["progressive_" + key + "_confusion.txt"] =
                    render_confusion_text(test_eval.cm);
                result.artifacts["progressive_" + key + "_trace.csv"] =
                    pki_trace_csv(prog.stack_trace, "stack_size");
            }
            ctx.progressive[key] = std::move(prog);
        }
        if (stages.progressive) {
            report["stages"]["progressive"] = json{{"combinations", std::move(combos)}};
            timings["progressive_ms"] = ms_since(t0);
        }
    }

    // Grid search over (covariance type, boosting rounds, learning rate) for
    // the gmm + gbt progressive pipeline; selection on validation only, one
    // final refit on the full training data, one test evaluation.
    if (stages.grid) {
        auto t0 = std::chrono::steady_clock::now();
        const ProgressiveResult& prog = ctx.progressive.at("gmm_gbt");
        const SelectionResult& selection = ctx.best_selection.at("gbt");
        size_t cluster_k = std::max<size_t>(prog.cluster_trace.chosen, 1);
        size_t stack_size = prog.stack_trace.chosen;

        Dataset train_sel = data.train;
        train_sel.x = data.train.x.select_columns(selection.indices);
        train_sel.feature_names.clear();
        Dataset val_sel = data.val;
        val_sel.x = data.val.x.select_columns(selection.indices);
        val_sel.feature_names.clear();

        std::vector<size_t> estimator_values = config.grid.n_estimator_values();
        struct GridPoint {
            CovarianceType cov;
            size_t n_estimators;
            double learning_rate;
            double val_macro_f1;
        };
        std::vector<GridPoint> points;

        Standardizer standardizer = fit_standardizer(train_sel.x);
        Matrix standardized_train = apply_standardizer(standardizer, train_sel.x);
        Matrix standardized_val = apply_standardizer(standardizer, val_sel.x);

        size_t n_lr = config.grid.learning_rates.size();
        for (CovarianceType cov : config.grid.covariance_types) {
            UnsupervisedSpec unsup_spec = make_unsupervised_spec(config, UnsupervisedKind::gmm);
            unsup_spec.covariance_type = cov;
            PriorKnowledgeStack stack;
            stack.standardizer = standardizer;
            std::vector<ClusterModel> members(stack_size);
            parallel_for(stack_size, config.jobs, [&](size_t j) {
                members[j] = fit_cluster_model(standardized_train, unsup_spec, cluster_k,
                                               config.seed + j);
            });
            stack.members = std::move(members);

            Dataset train_aug = train_sel;
            train_aug.x = augment_with_prior_knowledge(train_sel.x, stack);
            Matrix val_aug = augment_with_prior_knowledge(val_sel.x, stack);

            // Boosting is greedy and deterministic, so an N-round model is the
            // first N rounds of the longest fit; one fit per learning rate
            // scores every estimator-count prefix.
            std::vector<GridPoint> cov_points(estimator_values.size() * n_lr);
            parallel_for(n_lr, config.jobs, [&](size_t li) {
                GbtParams params = config.gbt_params;
                params.n_estimators = config.grid.n_estimators_max;
                params.learning_rate = config.grid.learning_rates[li];
                params.seed = config.seed + selection.k;
                GradientBoostedModel model = gbt_fit(train_aug, params);

                Matrix scores(val_aug.rows, model.n_classes);
                for (size_t i = 0; i < val_aug.rows; ++i)
                    std::copy(model.base_scores.begin(), model.base_scores.end(),
                              scores.row_ptr(i));
                size_t next = 0;
                for (size_t round = 0; round < model.rounds.size() && next < estimator_values.size();
                     ++round) {
                    for (size_t c = 0; c < model.n_classes; ++c) {
                        const RegressionTree& tree = model.rounds[round][c];
                        for (size_t i = 0; i < val_aug.rows; ++i)
                            scores(i, c) += params.learning_rate * tree.predict(val_aug.row_ptr(i));
                    }
                    if (round + 1 != estimator_values[next]) continue;
                    std::vector<int> pred(val_aug.rows);
                    for (size_t i = 0; i < val_aug.rows; ++i) {
                        const double* row = scores.row_ptr(i);
                        int best_c = 0;
                        for (size_t c = 1; c < model.n_classes; ++c) {
                            if (row[c] > row[best_c]) best_c = static_cast<int>(c);
                        }
                        pred[i] = best_c;
                    }
                    double f1 = macro_f1(confusion_matrix(val_sel.y, pred, val_sel.class_index));
                    cov_points[next * n_lr + li] = {cov, estimator_values[next],
                                                    params.learning_rate, f1};
                    ++next;
                }
            });
            points.insert(points.end(), cov_points.begin(), cov_points.end());
        }

        size_t best_idx = 0;
        for (size_t i = 1; i < points.size(); ++i) {
            if (points[i].val_macro_f1 > points[best_idx].val_macro_f1) best_idx = i;
        }
        const GridPoint& best = points[best_idx];

        // final refit on the full training set, single test evaluation
        Dataset full_sel = data.train_full;
        full_sel.x = data.train_full.x.select_columns(selection.indices);
        full_sel.feature_names.clear();
        Standardizer full_standardizer = fit_standardizer(full_sel.x);
        Matrix standardized_full = apply_standardizer(full_standardizer, full_sel.x);
        UnsupervisedSpec final_unsup = make_unsupervised_spec(config, UnsupervisedKind::gmm);
        final_unsup.covariance_type = best.cov;
        PkiModel final_model;
        final_model.selection = selection;
        final_model.class_index = data.train_full.class_index;
        final_model.feature_names = data.train_full.feature_names;
        final_model.stack.standardizer = full_standardizer;
        std::vector<ClusterModel> final_members(stack_size);
        parallel_for(stack_size, config.jobs, [&](size_t j) {
            final_members[j] =
                fit_cluster_model(standardized_full, final_unsup, cluster_k, config.seed + j);
        });
        final_model.stack.members = std::move(final_members);
        Dataset full_aug = full_sel;
        full_aug.x = augment_with_prior_knowledge(full_sel.x, final_model.stack);
        GbtParams final_params = config.gbt_params;
        final_params.n_estimators = best.n_estimators;
        final_params.learning_rate = best.learning_rate;
        final_params.seed = config.seed + selection.k;
        final_model.supervised = gbt_fit(full_aug, final_params);

        std::vector<int> test_pred = pki_predict(final_model, data.test.x);
        Evaluation test_eval = evaluate(data.test.y, test_pred, data.test.class_index);

        std::ostringstream trace_csv;
        trace_csv << "covariance,n_estimators,learning_rate,macro_f1\n";
        char buf[96];
        json trace_json = json::array();
        for (const auto& point : points) {
            std::snprintf(buf, sizeof(buf), "%s,%zu,%g,%.6f\n",
                          covariance_type_name(point.cov).c_str(), point.n_estimators,
                          point.learning_rate, point.val_macro_f1);
            trace_csv << buf;
            trace_json.push_back(json{{"covariance", covariance_type_name(point.cov)},
                                      {"n_estimators", point.n_estimators},
                                      {"learning_rate", point.learning_rate},
                                      {"macro_f1", point.val_macro_f1}});
        }

        report["stages"]["grid"] =
            json{{"context",
                  json{{"selection", selection_method_name(selection.method)},
                       {"n_features", selection.k},
                       {"cluster_count", cluster_k},
                       {"stack_size", stack_size}}},
                 {"grid_size", points.size()},
                 {"best",
                  json{{"covariance", covariance_type_name(best.cov)},
                       {"n_estimators", best.n_estimators},
                       {"learning_rate", best.learning_rate},
                       {"val_macro_f1", best.val_macro_f1}}},
                 {"trace", std::move(trace_json)},
                 {"test", test_eval.to_json()}};
        ctx.comparison.push_back(json{{"stage", "grid"},
                                      {"method", "gmm_gbt"},
                                      {"val_macro_f1", best.val_macro_f1},
                                      {"test_macro_f1", test_eval.summary.macro_f1}});
        result.artifacts["grid_trace.csv"] = trace_csv.str();
        result.artifacts["grid_best.model.json"] = pki_model_to_json(final_model);
        result.artifacts["grid_confusion.txt"] = render_confusion_text(test_eval.cm);
        timings["grid_ms"] = ms_since(t0);
    }

    report["comparison"] = std::move(ctx.comparison);
    {
        std::ostringstream comparison_csv;
        comparison_csv << "stage,method,val_macro_f1,test_macro_f1\n";
        for (const auto& row : report["comparison"]) {
            comparison_csv << row.at("stage").get<std::string>() << ","
                           << row.at("method").get<std::string>() << ",";
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", row.at("val_macro_f1").get<double>());
            comparison_csv << buf << ",";
            if (row.contains("test_macro_f1")) {
                std::snprintf(buf, sizeof(buf), "%.4f", row.at("test_macro_f1").get<double>());
                comparison_csv << buf;
            }
            comparison_csv << "\n";
        }
        result.artifacts["comparison.csv"] = comparison_csv.str();
    }

    timings["total_ms"] = ms_since(t_total);
    report["timings"] = std::move(timings);
    result.report_json = report.dump();
    result.artifacts["report.json"] = result.report_json;
    return result;
}

// --- report rendering ------------------------------------------------------

namespace {

SummaryReport summary_from_json(const json& j) {
    SummaryReport summary;
    summary.macro_f1 = j.at("macro_f1").get<double>();
    summary.weighted_f1 = j.at("weighted_f1").get<double>();
    summary.class_index.names = j.at("classes").get<std::vector<std::string>>();
    for (const auto& row : j.at("per_class")) {
        summary.per_class.precision.push_back(row.at("precision").get<double>());
        summary.per_class.recall.push_back(row.at("recall").get<double>());
        summary.per_class.f1.push_back(row.at("f1").get<double>());
        summary.per_class.support.push_back(row.at("support").get<size_t>());
    }
    return summary;
}

ConfusionMatrix confusion_from_json(const json& j) {
    ConfusionMatrix cm;
    cm.class_index.names = j.at("classes").get<std::vector<std::string>>();
    for (const auto& row : j.at("confusion"))
        cm.counts.push_back(row.get<std::vector<size_t>>());
    return cm;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void render_eval_text(std::ostringstream& out, const std::string& title, const json& eval_json) {
    out << title << "\n";
    out << render_report_text(summary_from_json(eval_json));
    out << "Confusion matrix (rows = true, columns = predicted):\n";
    out << render_confusion_text(confusion_from_json(eval_json));
    out << "\n";
}

} // namespace

std::map<std::string, std::string> emit_report(const std::string& report_json,
                                               const std::string& format) {
    json report = json::parse(report_json, nullptr, false);
    if (report.is_discarded()) throw InvalidSpec("report is not valid JSON");
    std::map<std::string, std::string> artifacts;

    if (format == "json") {
        artifacts["report.json"] = report.dump();
        return artifacts;
    }
    if (format == "csv") {
        if (report.contains("comparison")) {
            std::ostringstream csv;
            csv << "stage,method,val_macro_f1\n";
            for (const auto& row : report.at("comparison")) {
                csv << row.at("stage").get<std::string>() << ","
                    << row.at("method").get<std::string>() << ","
                    << fixed4(row.at("val_macro_f1").get<double>()) << "\n";
            }
            artifacts["comparison.csv"] = csv.str();
        }
        auto trace_csv = [&](const json& trace, const std::string& column, const std::string& name) {
            std::ostringstream csv;
            csv << column << ",macro_f1\n";
            for (const auto& point : trace) {
                csv << point.at("candidate").get<size_t>() << ","
                    << fixed4(point.at("macro_f1").get<double>()) << "\n";
            }
            artifacts[name] = csv.str();
        };
        if (report.contains("stages") && report.at("stages").contains("pki")) {
            for (const auto& combo : report.at("stages").at("pki").at("combinations")) {
                trace_csv(combo.at("trace"), "clusters",
                          "pki_" + combo.at("unsupervised").get<std::string>() + "_" +
                              combo.at("supervised").get<std::string>() + "_trace.csv");
            }
        }
        if (report.contains("stages") && report.at("stages").contains("progressive")) {
            for (const auto& combo : report.at("stages").at("progressive").at("combinations")) {
                trace_csv(combo.at("trace"), "stack_size",
                          "progressive_" + combo.at("unsupervised").get<std::string>() + "_" +
                              combo.at("supervised").get<std::string>() + "_trace.csv");
            }
        }
        if (report.contains("stages") && report.at("stages").contains("grid")) {
            std::ostringstream csv;
            csv << "covariance,n_estimators,learning_rate,macro_f1\n";
            for (const auto& point : report.at("stages").at("grid").at("trace")) {
                csv << point.at("covariance").get<std::string>() << ","
                    << point.at("n_estimators").get<size_t>() << ","
                    << point.at("learning_rate").get<double>() << ","
                    << fixed4(point.at("macro_f1").get<double>()) << "\n";
            }
            artifacts["grid_trace.csv"] = csv.str();
        }
        return artifacts;
    }
    if (format != "text") throw InvalidSpec("format must be json, text or csv");

    std::ostringstream out;
    if (report.contains("provenance")) {
        const json& prov = report.at("provenance");
        out << "Run " << prov.at("config_hash").get<std::string>() << " (seed "
            << prov.at("seed").get<uint64_t>() << ", source "
            << prov.at("data_source").get<std::string>() << ")\n\n";
    }
    if (report.contains("stages")) {
        const json& stages = report.at("stages");
        if (stages.contains("baseline1")) {
            for (const auto& [name, fragment] : stages.at("baseline1").items()) {
                render_eval_text(out, "== Baseline 1: " + name + " ==", fragment.at("test"));
            }
        }
        if (stages.contains("baseline2")) {
            out << "== Baseline 2: feature selection ==\n";
            out << "supervised  selection  k     val_macro_f1  test_macro_f1\n";
            for (const auto& pair : stages.at("baseline2").at("pairs")) {
                char line[160];
                std::snprintf(line, sizeof(line), "%-11s %-10s %-5zu %-13s %s\n",
                              pair.at("supervised").get<std::string>().c_str(),
                              pair.at("selection").get<std::string>().c_str(),
                              pair.at("best_k").get<size_t>(),
                              fixed4(pair.at("val_macro_f1").get<double>()).c_str(),
                              fixed4(pair.at("test_macro_f1").get<double>()).c_str());
                out << line;
            }
            out << "\n";
        }
        if (stages.contains("pki")) {
            for (const auto& combo : stages.at("pki").at("combinations")) {
                std::string title = "== PKI: " + combo.at("unsupervised").get<std::string>() +
                                    " + " + combo.at("supervised").get<std::string>() +
                                    " (clusters=" +
                                    std::to_string(combo.at("chosen_clusters").get<size_t>()) +
                                    ") ==";
                render_eval_text(out, title, combo.at("test"));
            }
        }
        if (stages.contains("progressive")) {
            for (const auto& combo : stages.at("progressive").at("combinations")) {
                std::string title =
                    "== Progressive PKI: " + combo.at("unsupervised").get<std::string>() + " + " +
                    combo.at("supervised").get<std::string>() + " (stack=" +
                    std::to_string(combo.at("chosen_stack_size").get<size_t>()) + ") ==";
                render_eval_text(out, title, combo.at("test"));
            }
        }
        if (stages.contains("grid")) {
            const json& grid = stages.at("grid");
            const json& best = grid.at("best");
            out << "== Grid search (gmm + gbt) ==\n";
            out << "best: covariance=" << best.at("covariance").get<std::string>()
                << " n_estimators=" << best.at("n_estimators").get<size_t>()
                << " learning_rate=" << best.at("learning_rate").get<double>()
                << " val_macro_f1=" << fixed4(best.at("val_macro_f1").get<double>()) << "\n";
            render_eval_text(out, "-- tuned model on test --", grid.at("test"));
        }
    }
    artifacts["report.txt"] = out.str();
    return artifacts;
}

} // namespace pkiflow
