#include "logitbench/cli.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/ingest.hpp"
#include "logitbench/metrics.hpp"
#include "logitbench/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace logitbench {

using nlohmann::json;

namespace {

json irls_json(const IrlsConfig& c) {
    return {{"max_iter", c.max_iter},         {"tol", c.tol},
            {"coef_bound", c.coef_bound},     {"max_halvings", c.max_halvings},
            {"max_condition", c.max_condition}, {"weight_floor", c.weight_floor}};
}

IrlsConfig irls_from(const json& j) {
    IrlsConfig c;
    c.max_iter = j.value("max_iter", c.max_iter);
    c.tol = j.value("tol", c.tol);
    c.coef_bound = j.value("coef_bound", c.coef_bound);
    c.max_halvings = j.value("max_halvings", c.max_halvings);
    c.max_condition = j.value("max_condition", c.max_condition);
    c.weight_floor = j.value("weight_floor", c.weight_floor);
    return c;
}

}  // namespace

json to_json(const HarnessConfig& c) {
    json methods = json::array();
    for (Method m : c.methods) methods.push_back(std::string(method_name(m)));
    json lasso = {{"n_lambda", c.lasso.n_lambda},
                  {"lambda_min_ratio", c.lasso.lambda_min_ratio ? json(*c.lasso.lambda_min_ratio) : json(nullptr)},
                  {"max_outer", c.lasso.max_outer},
                  {"inner_tol", c.lasso.inner_tol},
                  {"outer_tol", c.lasso.outer_tol},
                  {"weight_floor", c.lasso.weight_floor}};
    json step = {{"direction", std::string(direction_name(c.stepwise.direction))},
                 {"max_model_size",
                  c.stepwise.max_model_size ? json(*c.stepwise.max_model_size) : json(nullptr)},
                 {"irls", irls_json(c.stepwise.irls)}};
    return {{"methods", methods}, {"folds", c.folds},       {"train_frac", c.train_frac}, {"oracle", c.oracle},
            {"lasso", lasso},     {"stepwise", step},       {"irls", irls_json(c.irls)}};
}

HarnessConfig harness_config_from_json(const json& j) {
    HarnessConfig c;
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods")) {
            auto parsed = parse_method(m.get<std::string>());
            if (!parsed) throw InvalidInput("unknown method " + m.get<std::string>());
            c.methods.push_back(*parsed);
        }
    }
    c.folds = j.value("folds", c.folds);
    c.train_frac = j.value("train_frac", c.train_frac);
    c.oracle = j.value("oracle", c.oracle);
    if (j.contains("lasso")) {
        const auto& l = j.at("lasso");
        c.lasso.n_lambda = l.value("n_lambda", c.lasso.n_lambda);
        if (l.contains("lambda_min_ratio") && !l.at("lambda_min_ratio").is_null()) {
            c.lasso.lambda_min_ratio = l.at("lambda_min_ratio").get<double>();
        }
        c.lasso.max_outer = l.value("max_outer", c.lasso.max_outer);
        c.lasso.inner_tol = l.value("inner_tol", c.lasso.inner_tol);
        c.lasso.outer_tol = l.value("outer_tol", c.lasso.outer_tol);
        c.lasso.weight_floor = l.value("weight_floor", c.lasso.weight_floor);
    }
    if (j.contains("stepwise")) {
        const auto& s = j.at("stepwise");
        if (s.contains("direction")) {
            auto d = parse_direction(s.at("direction").get<std::string>());
            if (!d) throw InvalidInput("unknown stepwise direction");
            c.stepwise.direction = *d;
        }
        if (s.contains("max_model_size") && !s.at("max_model_size").is_null()) {
            c.stepwise.max_model_size = s.at("max_model_size").get<Index>();
        }
        if (s.contains("irls")) c.stepwise.irls = irls_from(s.at("irls"));
    }
    if (j.contains("irls")) c.irls = irls_from(j.at("irls"));
    return c;
}

json to_json(const ScenarioConfig& s) {
    return {{"id", s.id()}, {"p", s.p}, {"n", s.n}, {"ore", s.ore}, {"rho", s.rho}, {"n_reps", s.n_reps}};
}

ScenarioConfig scenario_from_json(const json& j, std::uint64_t master_seed) {
    ScenarioConfig s;
    s.p = j.at("p").get<Index>();
    s.n = j.at("n").get<Index>();
    s.ore = j.at("ore").get<double>();
    s.rho = j.at("rho").get<double>();
    s.n_reps = j.at("n_reps").get<int>();
    s.master_seed = master_seed;
    s.validate();
    return s;
}

namespace {

struct SolverFlags {
    std::vector<std::string> methods{"Lasso", "LassoML", "StepML"};
    int folds = 10;
    int n_lambda = 100;
    std::optional<double> lambda_min_ratio;
    std::string direction = "both";
    std::optional<long> max_model_size;
    double irls_tol = 1e-8;
    int irls_max_iter = 50;
    double train_frac = 0.7;
    bool no_oracle = false;
    int threads = 1;

    void add_to(CLI::App& app, bool simulate) {
        app.add_option("--methods", methods, "Methods to run (Lasso, LassoML, StepML, MLE)")->delimiter(',');
        app.add_option("--folds", folds, "Cross-validation folds for the lasso penalty")->check(CLI::Range(2, 1000));
        app.add_option("--n-lambda", n_lambda, "Size of the lambda grid")->check(CLI::Range(2, 10000));
        app.add_option("--lambda-min-ratio", lambda_min_ratio, "Smallest lambda / lambda_max")
            ->check(CLI::Range(1e-12, 0.999999));
        app.add_option("--direction", direction, "Stepwise direction: forward, backward or both");
        app.add_option("--max-model-size", max_model_size, "Stepwise model size cap")->check(CLI::NonNegativeNumber);
        app.add_option("--irls-tol", irls_tol, "IRLS relative log-likelihood tolerance")->check(CLI::PositiveNumber);
        app.add_option("--irls-max-iter", irls_max_iter, "IRLS iteration limit")->check(CLI::Range(1, 100000));
        app.add_option("--train-frac", train_frac, "Training share of each split")->check(CLI::Range(0.01, 1.0));
        app.add_option("--threads", threads, "Parallel replications/splits")->check(CLI::Range(1, 4096));
        if (simulate) app.add_flag("--no-oracle", no_oracle, "Do not score the data-generating model");
    }

    HarnessConfig build() const {
        HarnessConfig c;
        c.methods.clear();
        for (const auto& m : methods) {
            auto parsed = parse_method(m);
            if (!parsed) throw InvalidInput("unknown method \"" + m + "\"");
            if (std::find(c.methods.begin(), c.methods.end(), *parsed) == c.methods.end()) c.methods.push_back(*parsed);
        }
        c.folds = folds;
        c.lasso.n_lambda = n_lambda;
        c.lasso.lambda_min_ratio = lambda_min_ratio;
        auto d = parse_direction(direction);
        if (!d) throw InvalidInput("unknown stepwise direction \"" + direction + "\"");
        c.stepwise.direction = *d;
        if (max_model_size) c.stepwise.max_model_size = static_cast<Index>(*max_model_size);
        c.irls.tol = irls_tol;
        c.irls.max_iter = irls_max_iter;
        c.stepwise.irls = c.irls;
        c.train_frac = train_frac;
        c.oracle = !no_oracle;
        c.parallelism = threads;
        return c;
    }
};

struct DataFlags {
    std::string csv;
    std::string spec_file;
    std::string target = "y";
    std::string positive = "1";
    std::string delimiter = ",";
    bool no_header = false;
    std::vector<std::string> categorical;

    void add_to(CLI::App& app) {
        app.add_option("--csv", csv, "Input CSV file");
        app.add_option("--spec", spec_file, "JSON ingest spec (replaces the other data flags)");
        app.add_option("--target", target, "Outcome column name (or V<k> without a header)");
        app.add_option("--positive", positive, "Outcome value mapped to 1");
        app.add_option("--delimiter", delimiter, "Field delimiter");
        app.add_flag("--no-header", no_header, "The first row is data");
        app.add_option("--categorical", categorical, "Columns to one-hot encode")->delimiter(',');
    }

    IngestSpec build() const {
        if (!spec_file.empty()) return IngestSpec::from_json_file(spec_file);
        if (csv.empty()) throw InvalidInput("either --csv or --spec is required");
        if (delimiter.size() != 1) throw InvalidInput("--delimiter must be one character");
        IngestSpec s;
        s.path = csv;
        s.target = target;
        s.positive_label = positive;
        s.delimiter = delimiter[0];
        s.has_header = !no_header;
        s.categorical_columns = categorical;
        return s;
    }
};

json ingest_json(const IngestSpec& s) {
    json target = std::holds_alternative<std::string>(s.target) ? json(std::get<std::string>(s.target))
                                                                : json(std::get<std::size_t>(s.target));
    return {{"path", s.path.string()},
            {"target", target},
            {"positive_label", s.positive_label},
            {"delimiter", std::string(1, s.delimiter)},
            {"has_header", s.has_header},
            {"categorical_columns", s.categorical_columns}};
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "results";
}

void write_json(const std::filesystem::path& file, const json& j) {
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot write " + tmp);
        os << j.dump(2) << '\n';
        if (!os) throw IoError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

json read_json(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open " + file.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw IoError(file.string() + ": " + e.what());
    }
}

std::string fixed(double v, int digits = 3) {
    if (std::isnan(v)) return "NA";
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void print_aggregates(std::ostream& out, const std::vector<AggregateResult>& aggs) {
    for (const auto& a : aggs) {
        out << a.scenario_id;
        for (const auto& m : a.methods) {
            out << "  " << m.label << " " << fixed(m.mean) << " (sd " << fixed(m.sd) << ", " << m.valid << "/"
                << m.total << ")";
        }
        out << '\n';
    }
}

int cmd_simulate(bool full_grid, const std::vector<long>& ps, const std::vector<long>& ns, const std::vector<double>& ores,
                 const std::vector<double>& rhos, int reps, std::uint64_t seed, const std::string& out_flag,
                 const std::string& manifest_in, std::optional<int> stop_after, const SolverFlags& flags,
                 std::ostream& out, std::ostream& err) {
    HarnessConfig config = flags.build();
    std::vector<ScenarioConfig> scenarios;
    if (!manifest_in.empty()) {
        const json m = read_json(manifest_in);
        const json& run = m.at("run");
        seed = run.at("master_seed").get<std::uint64_t>();
        const int threads = config.parallelism;
        config = harness_config_from_json(run.at("config"));
        config.parallelism = threads;
        for (const auto& s : run.at("scenarios")) scenarios.push_back(scenario_from_json(s, seed));
    } else if (full_grid) {
        scenarios = full_design_grid(reps, seed);
    } else {
        for (double ore : ores) {
            for (double rho : rhos) {
                for (long p : ps) {
                    for (long n : ns) {
                        ScenarioConfig s;
                        s.p = p;
                        s.n = n;
                        s.ore = ore;
                        s.rho = rho;
                        s.n_reps = reps;
                        s.master_seed = seed;
                        s.validate();
                        scenarios.push_back(s);
                    }
                }
            }
        }
    }
    config.validate();

    const std::filesystem::path dir = out_flag.empty() ? default_out_dir() : std::filesystem::path(out_flag);
    std::filesystem::create_directories(dir);
    json scen = json::array();
    for (const auto& s : scenarios) scen.push_back(to_json(s));
    const json run = {{"subcommand", "simulate"}, {"master_seed", seed}, {"config", to_json(config)}, {"scenarios", scen}};
    const auto manifest_file = dir / "manifest.json";
    if (std::filesystem::exists(manifest_file)) {
        const json previous = read_json(manifest_file);
        if (!previous.contains("run") || previous.at("run") != run) {
            err << "error: " << dir.string() << " holds results of a different run; choose another --out\n";
            return 1;
        }
    }
    json manifest = {{"tool", "logitbench"},
                     {"version", kVersion},
                     {"run", run},
                     {"parallelism", config.parallelism},
                     {"status", "running"},
                     {"outputs", {kReplicationFile, kAggregateFile, "figure_data.csv"}}};
    write_json(manifest_file, manifest);

    GridOptions options;
    options.out_dir = dir;
    options.stop_after = stop_after;
    const GridOutcome res = run_grid(scenarios, config, options);
    out << "scenarios: " << scenarios.size() << ", replications executed: " << res.executed
        << ", reused: " << res.reused << '\n';
    if (!res.complete) {
        manifest["status"] = "incomplete";
        write_json(manifest_file, manifest);
        err << "run stopped before completion; rerun the same command to resume\n";
        return 3;
    }
    write_figure_csv(dir / "figure_data.csv", res.aggregates, scenarios);
    manifest["status"] = "complete";
    write_json(manifest_file, manifest);
    print_aggregates(out, res.aggregates);
    return 0;
}

int cmd_apply(const DataFlags& data_flags, int splits, std::uint64_t seed, const std::string& out_flag,
              const std::string& name, const SolverFlags& flags, std::ostream& out, std::ostream& err) {
    HarnessConfig config = flags.build();
    config.oracle = false;
    config.validate();
    const IngestSpec spec = data_flags.build();
    const IngestResult ing = load_csv(spec);
    for (const auto& r : ing.rejected) err << "rejected row " << r.row << ": " << r.reason << '\n';
    const Dataset& data = ing.data;
    out << "dataset " << name << ": n=" << data.n() << " p=" << data.p() << " (after encoding) p/n="
        << fixed(static_cast<double>(data.p()) / static_cast<double>(data.n())) << " ORE=" << fixed(data.event_rate())
        << " rejected rows=" << ing.rejected.size() << '\n';

    const ApplicationOutcome res = run_application(data, splits, seed, config, name);

    const std::filesystem::path dir = out_flag.empty() ? default_out_dir() : std::filesystem::path(out_flag);
    std::filesystem::create_directories(dir);
    write_replications_csv(dir / "application_splits.csv", res.splits);
    write_aggregates_csv(dir / "application_aggregates.csv", {res.aggregate}, {});
    const json manifest = {{"tool", "logitbench"},
                           {"version", kVersion},
                           {"run",
                            {{"subcommand", "apply"},
                             {"master_seed", seed},
                             {"n_splits", splits},
                             {"name", name},
                             {"ingest", ingest_json(spec)},
                             {"config", to_json(config)}}},
                           {"data", {{"n", data.n()}, {"p_encoded", data.p()}, {"rejected_rows", ing.rejected.size()},
                                     {"zero_variance_columns", ing.zero_variance_columns}}},
                           {"parallelism", config.parallelism},
                           {"status", "complete"},
                           {"outputs", {"application_splits.csv", "application_aggregates.csv"}}};
    write_json(dir / "manifest.json", manifest);

    out << std::left << std::setw(10) << "Method" << std::setw(10) << "Average" << std::setw(10) << "SD"
        << "Valid\n";
    for (const auto& m : res.aggregate.methods) {
        out << std::left << std::setw(10) << m.label << std::setw(10) << fixed(m.mean) << std::setw(10) << fixed(m.sd)
            << m.valid << "/" << m.total << '\n';
    }
    return 0;
}

void print_model(std::ostream& out, const FittedModel& m, const Dataset& data) {
    out << "[" << method_name(m.method) << "] converged=" << (m.converged ? "true" : "false")
        << " status=" << (m.status.empty() ? "ok" : m.status) << " size=" << m.size() << '\n';
    out << "  (Intercept) " << std::setprecision(10) << m.alpha << '\n';
    for (Index j = 0; j < m.p(); ++j) {
        out << "  " << data.feature_names()[static_cast<std::size_t>(j)] << ' ' << std::setprecision(10) << m.beta[j]
            << '\n';
    }
}

double gini_on(const FittedModel& m, const Dataset& d) {
    if (!d.has_both_classes()) return std::numeric_limits<double>::quiet_NaN();
    const Vector mu = predict_mu(m, d.x());
    return gini(std::span<const double>(mu.data(), static_cast<std::size_t>(mu.size())),
                std::span<const double>(d.y().data(), static_cast<std::size_t>(d.n())));
}

int cmd_fit(const DataFlags& data_flags, const std::string& method, std::uint64_t seed, std::optional<double> lambda,
            const SolverFlags& flags, std::ostream& out, std::ostream& err) {
    HarnessConfig config = flags.build();
    const IngestResult ing = load_csv(data_flags.build());
    for (const auto& r : ing.rejected) err << "rejected row " << r.row << ": " << r.reason << '\n';
    const Dataset& data = ing.data;
    if (!data.has_both_classes()) {
        err << "error: the outcome has a single class (" << data.positives() << " of " << data.n()
            << " rows positive); no model can be fit\n";
        return 1;
    }

    std::vector<Method> methods;
    if (method == "all") {
        methods = {Method::Lasso, Method::LassoML, Method::StepML};
    } else {
        auto m = parse_method(method);
        if (!m) throw InvalidInput("unknown method \"" + method + "\"");
        methods = {*m};
    }

    const bool split = config.train_frac < 1.0;
    std::optional<Dataset> train, test;
    if (split) {
        auto parts = split_train_test(data, config.train_frac, derive_seed(seed, stream::split, 0));
        train = std::move(parts.first);
        test = std::move(parts.second);
    } else {
        train = data;
    }
    out << "rows: train " << train->n() << (test ? ", test " + std::to_string(test->n()) : std::string()) << "; p=" << data.p()
        << '\n';

    std::optional<FittedModel> lasso_solution;
    auto lasso_fit = [&]() -> FittedModel {
        if (lasso_solution) return *lasso_solution;
        if (lambda) {
            const LambdaPath path = fit_lasso_path(*train, std::vector<double>{*lambda}, config.lasso);
            lasso_solution = path.solutions.front();
        } else {
            lasso_solution = fit_lasso_cv(*train, config.folds, derive_seed(seed, stream::folds, 0), config.lasso);
        }
        return *lasso_solution;
    };

    for (Method m : methods) {
        FittedModel model;
        switch (m) {
            case Method::Lasso: model = lasso_fit(); break;
            case Method::LassoML: model = refit_support(*train, lasso_fit(), config.irls); break;
            case Method::StepML: model = fit_stepml(*train, config.stepwise); break;
            case Method::MLE: {
                std::vector<Index> all;
                for (Index j = 0; j < data.p(); ++j) all.push_back(j);
                model = fit_mle(*train, all, config.irls);
                break;
            }
        }
        print_model(out, model, data);
        out << "  train_gini " << fixed(gini_on(model, *train), 6);
        if (test) out << "  test_gini " << fixed(gini_on(model, *test), 6);
        out << '\n';
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lasso vs maximum-likelihood logistic regression: discrimination benchmark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run the Monte Carlo scenario grid");
    bool full_grid = false;
    std::vector<long> ps{10}, ns{100};
    std::vector<double> ores{0.5}, rhos{0.5};
    int reps = 500;
    std::uint64_t sim_seed = 1;
    std::string sim_out, manifest_in;
    std::optional<int> stop_after;
    SolverFlags sim_flags;
    sim->add_flag("--paper-grid", full_grid, "Full factorial design: p 10,30,50; n 100,200,500,1000; ORE 0.2,0.5; rho 0.5,0.9");
    sim->add_option("--p", ps, "Covariate counts")->delimiter(',')->check(CLI::PositiveNumber);
    sim->add_option("--n", ns, "Sample sizes")->delimiter(',')->check(CLI::Range(10L, 100000000L));
    sim->add_option("--ore", ores, "Target event rates")->delimiter(',')->check(CLI::Range(1e-9, 1.0 - 1e-9));
    sim->add_option("--rho", rhos, "Correlation parameters")->delimiter(',')->check(CLI::Range(0.0, 0.999999));
    sim->add_option("--reps", reps, "Replications per scenario")->check(CLI::Range(1, 100000000));
    sim->add_option("--seed", sim_seed, "Master seed");
    sim->add_option("--out", sim_out, std::string("Output directory (default $") + kOutDirEnv + " or ./results)");
    sim->add_option("--manifest", manifest_in, "Re-run the configuration recorded in a manifest.json");
    sim->add_option("--stop-after", stop_after, "Stop after this many new replications")->group("");
    sim_flags.add_to(*sim, true);

    // apply
    auto* apply = app.add_subcommand("apply", "Repeated train/test splits of a CSV dataset");
    DataFlags apply_data;
    int splits = 100;
    std::uint64_t apply_seed = 1;
    std::string apply_out, name = "dataset";
    SolverFlags apply_flags;
    apply_data.add_to(*apply);
    apply->add_option("--splits", splits, "Number of random splits")->check(CLI::Range(1, 1000000));
    apply->add_option("--seed", apply_seed, "Master seed");
    apply->add_option("--out", apply_out, "Output directory");
    apply->add_option("--name", name, "Dataset label used in the report");
    apply_flags.add_to(*apply, false);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one method on a CSV and print coefficients");
    DataFlags fit_data;
    std::string method = "all";
    std::uint64_t fit_seed = 1;
    std::optional<double> lambda;
    SolverFlags fit_flags;
    fit_data.add_to(*fit);
    fit->add_option("--method", method, "Lasso, LassoML, StepML, MLE or all");
    fit->add_option("--seed", fit_seed, "Seed for the split and CV folds");
    fit->add_option("--lambda", lambda, "Fixed lasso penalty (skips cross-validation)")->check(CLI::PositiveNumber);
    fit_flags.add_to(*fit, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*sim) {
            return cmd_simulate(full_grid, ps, ns, ores, rhos, reps, sim_seed, sim_out, manifest_in, stop_after, sim_flags,
                                out, err);
        }
        if (*apply) return cmd_apply(apply_data, splits, apply_seed, apply_out, name, apply_flags, out, err);
        if (*fit) return cmd_fit(fit_data, method, fit_seed, lambda, fit_flags, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace logitbench
