#ifndef PKIFLOW_EXPERIMENT_HPP
#define PKIFLOW_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pkiflow/flow_csv.hpp"
#include "pkiflow/metrics.hpp"
#include "pkiflow/pki.hpp"
#include "pkiflow/synthetic.hpp"

namespace pkiflow {

struct GridSpec {
    std::vector<CovarianceType> covariance_types = {CovarianceType::spherical, CovarianceType::diag,
                                                    CovarianceType::full, CovarianceType::tied};
    size_t n_estimators_min = 10;
    size_t n_estimators_max = 200;
    size_t n_estimators_step = 10;
    std::vector<double> learning_rates = {0.01, 0.05, 0.1, 0.2, 0.3};

    std::vector<size_t> n_estimator_values() const;
    size_t size() const;
};

struct ExperimentConfig {
    // data: CSV paths when set, otherwise the synthetic spec
    std::string train_csv;
    std::string test_csv;
    SyntheticSpec synthetic = SyntheticSpec::defaults();
    std::string label_column = "Label";
    IdentifierDropList drop_list = IdentifierDropList::defaults();
    SanitizePolicy sanitize;
    std::vector<std::string> class_order;
    double validation_fraction = 0.2;
    uint64_t seed = 42;
    unsigned jobs = 1;

    // which methods each stage covers
    std::vector<SupervisedKind> supervised = {SupervisedKind::dt, SupervisedKind::rf,
                                              SupervisedKind::gbt};
    std::vector<SelectionMethod> selections = {SelectionMethod::chi2, SelectionMethod::anova_f,
                                               SelectionMethod::mutual_info};
    std::vector<UnsupervisedKind> unsupervised = {UnsupervisedKind::kmeans, UnsupervisedKind::gmm};
    size_t cluster_k_max = 20;
    size_t max_stack = 20;
    size_t mi_bins = 10;

    // model hyperparameters
    DecisionTreeParams dt_params;
    RandomForestParams rf_params;
    GbtParams gbt_params;
    UnsupervisedSpec unsup_params; // covariance_type used outside the grid stage

    GridSpec grid;

    // Parsed from one JSON document; unknown keys are rejected. Throws ConfigError.
    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const; // canonical form, hashed for provenance
};

struct StageSelection {
    bool baseline1 = false;
    bool baseline2 = false;
    bool pki = false;
    bool progressive = false;
    bool grid = false;

    static StageSelection all() { return {true, true, true, true, true}; }
};

// Prepared train/validation/test data plus ingestion provenance.
struct PreparedData {
    Dataset train_full; // before the validation split
    Dataset train;
    Dataset val;
    Dataset test;
    std::string train_sanitize_json; // "{}" for synthetic data
    std::string test_sanitize_json;
};

PreparedData prepare_data(const ExperimentConfig& config);

struct ExperimentResult {
    std::string report_json;                      // canonical; bit-stable except "timings"
    std::map<std::string, std::string> artifacts; // relative filename -> content
};

// Runs the requested stages (plus the prerequisites they need: pki,
// progressive and grid all sit on top of the feature-selection sweep) and
// assembles the run report. Model selection only ever reads the validation
// split; the test set is evaluated once per reported combination.
ExperimentResult run_experiment(const ExperimentConfig& config, const StageSelection& stages);

// Rendering of a run report into text tables / trace CSVs. format is one of
// "json", "text", "csv". Feeding the "json" output back in is byte-stable.
std::map<std::string, std::string> emit_report(const std::string& report_json,
                                               const std::string& format);

// FNV-1a 64 as a hex string; used for the config hash in report provenance.
std::string fnv1a_hex(const std::string& text);

// Ingest helpers shared by the CLI: CSV file -> FeatureTable (+ sanitize log).
std::pair<FeatureTable, SanitizeLog> ingest_csv_file(const std::string& path,
                                                     const ExperimentConfig& config);

std::string read_text_file(const std::string& path);  // throws IoError
void write_text_file(const std::string& path, const std::string& content);

} // namespace pkiflow

#endif
