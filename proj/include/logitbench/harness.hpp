#pragma once

#include "logitbench/lasso.hpp"
#include "logitbench/selection.hpp"
#include "logitbench/simgen.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace logitbench {

struct HarnessConfig {
    std::vector<Method> methods{Method::Lasso, Method::LassoML, Method::StepML};
    int folds = 10;
    double train_frac = 0.7;
    LassoConfig lasso;
    StepwiseConfig stepwise;
    /// IRLS settings for the LassoML refit.
    IrlsConfig irls;
    /// Worker threads across replications (or splits).
    int parallelism = 1;
    /// Also score the data-generating model on simulated test sets.
    bool oracle = true;

    void validate() const;
    /// Labels of the persisted method rows, in output order.
    std::vector<std::string> labels(bool simulated) const;
};

inline constexpr const char* kOracleLabel = "Oracle";

struct TrainTestSplit {
    std::vector<Index> train;
    std::vector<Index> test;
};

/// Stratified split: within each class rows are shuffled with `seed` and the
/// first min(ceil(frac * count), count - 1) go to training, so both classes
/// reach the test part. Throws DegenerateData for a class of size 1 (or 0).
TrainTestSplit split_indices(const Dataset& data, double train_frac, std::uint64_t seed);
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_frac, std::uint64_t seed);

struct MethodOutcome {
    std::string label;
    double gini = 0.0;  // NaN when invalid
    Index model_size = 0;
    std::string status;
    double seconds = 0.0;

    bool valid() const;
};

struct ReplicationResult {
    std::string scenario_id;
    int rep = 0;
    bool test_valid = true;
    std::vector<MethodOutcome> outcomes;

    const MethodOutcome* find(std::string_view label) const;
};

struct MethodSummary {
    std::string label;
    double mean = 0.0;  // NaN when no valid replication
    double sd = 0.0;
    int valid = 0;
    int total = 0;
};

struct AggregateResult {
    std::string scenario_id;
    std::vector<MethodSummary> methods;

    const MethodSummary* find(std::string_view label) const;
};

/// Fits every configured method on `train` and scores it on `test`. Never
/// throws for fitting problems: they are recorded in the outcome status.
/// `models`, when given, receives the fitted models in method order (a null
/// model with status "error" stands in for a fit that threw).
ReplicationResult evaluate_split(const Dataset& train, const Dataset& test, std::uint64_t seed,
                                 const HarnessConfig& config, const TruthSpec* truth = nullptr,
                                 std::vector<FittedModel>* models = nullptr);

/// Generate, split, fit and score one replication of a scenario.
ReplicationResult run_replication(const ScenarioConfig& scenario, const TruthSpec& truth, int rep,
                                  const HarnessConfig& config);

/// Mean and sample SD per label over valid replications, folded in rep order.
AggregateResult aggregate(const std::string& scenario_id, std::vector<ReplicationResult> reps,
                          const std::vector<std::string>& labels);

/// The full factorial design: p in {10,30,50}, ORE in {0.2,0.5}, rho in {0.5,0.9}, n in {100,200,500,1000}.
std::vector<ScenarioConfig> full_design_grid(int n_reps, std::uint64_t master_seed);

struct GridOptions {
    /// When set, per-replication rows are appended to replications.csv there
    /// and aggregates.csv is written at the end; existing rows are reused.
    std::optional<std::filesystem::path> out_dir;
    /// Stop after this many newly executed replications (simulates an interruption).
    std::optional<int> stop_after;
};

struct GridOutcome {
    std::vector<AggregateResult> aggregates;  // scenario order
    std::vector<ReplicationResult> replications;  // scenario order, then rep order
    int executed = 0;
    int reused = 0;
    bool complete = true;
};

GridOutcome run_grid(const std::vector<ScenarioConfig>& scenarios, const HarnessConfig& config,
                     const GridOptions& options = {});

struct ApplicationOutcome {
    AggregateResult aggregate;
    std::vector<ReplicationResult> splits;
};

/// Repeated stratified train/test splits of a real dataset.
ApplicationOutcome run_application(const Dataset& data, int n_splits, std::uint64_t master_seed,
                                   const HarnessConfig& config, const std::string& name = "application");

// Persistence --------------------------------------------------------------

inline constexpr const char* kReplicationFile = "replications.csv";
inline constexpr const char* kAggregateFile = "aggregates.csv";

void write_replications_csv(const std::filesystem::path& file, const std::vector<ReplicationResult>& reps);
/// Complete replications found in a replications CSV (rows for every label);
/// partial trailing groups are dropped.
std::vector<ReplicationResult> read_replications_csv(const std::filesystem::path& file,
                                                     const std::vector<std::string>& labels);

/// Aggregates with scenario columns. `scenarios` may be empty (application runs),
/// in which case scenario columns are left out.
void write_aggregates_csv(const std::filesystem::path& file, const std::vector<AggregateResult>& aggregates,
                          const std::vector<ScenarioConfig>& scenarios);

/// One row per (scenario, method) with mean Gini: the data behind a figure panel.
void write_figure_csv(const std::filesystem::path& file, const std::vector<AggregateResult>& aggregates,
                      const std::vector<ScenarioConfig>& scenarios);

}  // namespace logitbench
