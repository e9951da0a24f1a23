#include "logitbench/harness.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/metrics.hpp"
#include "logitbench/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace logitbench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v, const char* spec) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string model_status(const FittedModel& m) {
    if (m.refit_fallback) return m.status;
    return m.converged ? "ok" : "nonconverged:" + m.status;
}

MethodOutcome score(const std::string& label, const FittedModel& model, const Dataset& test, bool test_valid) {
    MethodOutcome o;
    o.label = label;
    o.model_size = model.size();
    o.status = model_status(model);
    if (!test_valid) {
        o.gini = kNaN;
        o.status = "invalid_test";
        return o;
    }
    const Vector mu = predict_mu(model, test.x());
    o.gini = gini(std::span<const double>(mu.data(), static_cast<std::size_t>(mu.size())),
                  std::span<const double>(test.y().data(), static_cast<std::size_t>(test.n())));
    return o;
}

MethodOutcome failed(const std::string& label, const std::string& why) {
    MethodOutcome o;
    o.label = label;
    o.gini = kNaN;
    o.status = "error:" + why;
    return o;
}

}  // namespace

void HarnessConfig::validate() const {
    if (methods.empty()) throw InvalidInput("no methods requested");
    if (folds < 2) throw InvalidInput("folds must be >= 2");
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw InvalidInput("train_frac must lie in (0, 1)");
    if (parallelism < 1) throw InvalidInput("parallelism must be >= 1");
    lasso.validate();
    irls.validate();
    stepwise.irls.validate();
}

std::vector<std::string> HarnessConfig::labels(bool simulated) const {
    std::vector<std::string> out;
    for (Method m : methods) out.emplace_back(method_name(m));
    if (simulated && oracle) out.emplace_back(kOracleLabel);
    return out;
}

bool MethodOutcome::valid() const { return std::isfinite(gini); }

const MethodOutcome* ReplicationResult::find(std::string_view label) const {
    for (const auto& o : outcomes) {
        if (o.label == label) return &o;
    }
    return nullptr;
}

const MethodSummary* AggregateResult::find(std::string_view label) const {
    for (const auto& m : methods) {
        if (m.label == label) return &m;
    }
    return nullptr;
}

TrainTestSplit split_indices(const Dataset& data, double train_frac, std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw InvalidInput("train_frac must lie in (0, 1)");
    std::vector<Index> pos, neg;
    for (Index i = 0; i < data.n(); ++i) (data.y()[i] == 1.0 ? pos : neg).push_back(i);
    if (pos.size() < 2 || neg.size() < 2) {
        throw DegenerateData("stratified split needs at least 2 rows per class (" + std::to_string(pos.size()) +
                             " positives, " + std::to_string(neg.size()) + " negatives)");
    }
    Rng rng(seed);
    TrainTestSplit s;
    for (auto* cls : {&pos, &neg}) {
        std::shuffle(cls->begin(), cls->end(), rng);
        const auto count = cls->size();
        auto n_train = static_cast<std::size_t>(std::ceil(train_frac * static_cast<double>(count)));
        n_train = std::clamp<std::size_t>(n_train, 1, count - 1);
        s.train.insert(s.train.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(n_train));
        s.test.insert(s.test.end(), cls->begin() + static_cast<std::ptrdiff_t>(n_train), cls->end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_frac, std::uint64_t seed) {
    const TrainTestSplit s = split_indices(data, train_frac, seed);
    return {data.subset(s.train), data.subset(s.test)};
}

ReplicationResult evaluate_split(const Dataset& train, const Dataset& test, std::uint64_t seed,
                                 const HarnessConfig& config, const TruthSpec* truth,
                                 std::vector<FittedModel>* models) {
    ReplicationResult r;
    if (models) models->clear();
    auto keep = [&](const FittedModel& m) {
        if (models) models->push_back(m);
    };
    auto keep_failed = [&](Method m) {
        FittedModel null = FittedModel::null_model(train.p(), 0.0, m);
        null.converged = false;
        null.status = "error";
        keep(null);
    };
    r.test_valid = test.has_both_classes();
    const bool want_lasso = std::find(config.methods.begin(), config.methods.end(), Method::Lasso) != config.methods.end();
    const bool want_lassoml =
        std::find(config.methods.begin(), config.methods.end(), Method::LassoML) != config.methods.end();

    std::optional<FittedModel> lasso_model;
    std::string lasso_error;
    double lasso_seconds = 0.0;
    if (want_lasso || want_lassoml) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const CvResult cv = choose_lambda_cv(train, config.folds, derive_seed(seed, stream::folds, 0), config.lasso);
            const LambdaPath path = fit_lasso_path(train, cv.lambdas, config.lasso);
            lasso_model = path.solutions[cv.chosen_index];
        } catch (const std::exception& e) {
            lasso_error = e.what();
        }
        lasso_seconds = seconds_since(t0);
    }

    for (Method m : config.methods) {
        const std::string label(method_name(m));
        const std::size_t kept = models ? models->size() : 0;
        try {
            switch (m) {
                case Method::Lasso: {
                    if (!lasso_model) {
                        keep_failed(m);
                        r.outcomes.push_back(failed(label, sanitize(lasso_error)));
                        break;
                    }
                    keep(*lasso_model);
                    r.outcomes.push_back(score(label, *lasso_model, test, r.test_valid));
                    r.outcomes.back().seconds = lasso_seconds;
                    break;
                }
                case Method::LassoML: {
                    if (!lasso_model) {
                        keep_failed(m);
                        r.outcomes.push_back(failed(label, sanitize(lasso_error)));
                        break;
                    }
                    const auto t0 = std::chrono::steady_clock::now();
                    const FittedModel refit = refit_support(train, *lasso_model, config.irls);
                    const double secs = seconds_since(t0);
                    keep(refit);
                    r.outcomes.push_back(score(label, refit, test, r.test_valid));
                    r.outcomes.back().seconds = lasso_seconds + secs;
                    break;
                }
                case Method::StepML: {
                    const auto t0 = std::chrono::steady_clock::now();
                    const FittedModel step = fit_stepml(train, config.stepwise);
                    const double secs = seconds_since(t0);
                    keep(step);
                    r.outcomes.push_back(score(label, step, test, r.test_valid));
                    r.outcomes.back().seconds = secs;
                    break;
                }
                case Method::MLE: {
                    std::vector<Index> all(static_cast<std::size_t>(train.p()));
                    for (Index j = 0; j < train.p(); ++j) all[static_cast<std::size_t>(j)] = j;
                    const auto t0 = std::chrono::steady_clock::now();
                    const FittedModel mle = fit_mle(train, all, config.irls);
                    const double secs = seconds_since(t0);
                    keep(mle);
                    r.outcomes.push_back(score(label, mle, test, r.test_valid));
                    r.outcomes.back().seconds = secs;
                    break;
                }
            }
        } catch (const std::exception& e) {
            if (models) models->resize(kept);
            keep_failed(m);
            r.outcomes.push_back(failed(label, sanitize(e.what())));
        }
    }

    if (truth && config.oracle) {
        FittedModel oracle;
        oracle.alpha = truth->alpha_true;
        oracle.beta = truth->beta_true;
        oracle.support = nonzero_support(truth->beta_true);
        oracle.converged = true;
        oracle.status = "reference";
        MethodOutcome o = score(kOracleLabel, oracle, test, r.test_valid);
        if (r.test_valid) o.status = "reference";
        r.outcomes.push_back(std::move(o));
    }
    return r;
}

ReplicationResult run_replication(const ScenarioConfig& scenario, const TruthSpec& truth, int rep,
                                  const HarnessConfig& config) {
    const std::uint64_t seed = replication_seed(scenario, rep);
    ReplicationResult r;
    try {
        const Dataset data = gen_dataset(scenario, truth, rep);
        const auto [train, test] = split_train_test(data, config.train_frac, derive_seed(seed, stream::split, 0));
        r = evaluate_split(train, test, seed, config, &truth);
    } catch (const std::exception& e) {
        r.test_valid = false;
        for (const auto& label : config.labels(true)) r.outcomes.push_back(failed(label, sanitize(e.what())));
    }
    r.scenario_id = scenario.id();
    r.rep = rep;
    return r;
}

AggregateResult aggregate(const std::string& scenario_id, std::vector<ReplicationResult> reps,
                          const std::vector<std::string>& labels) {
    std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) { return a.rep < b.rep; });
    AggregateResult agg;
    agg.scenario_id = scenario_id;
    for (const auto& label : labels) {
        MethodSummary s;
        s.label = label;
        s.total = static_cast<int>(reps.size());
        double sum = 0.0;
        for (const auto& r : reps) {
            const MethodOutcome* o = r.find(label);
            if (o && o->valid()) {
                sum += o->gini;
                ++s.valid;
            }
        }
        if (s.valid == 0) {
            s.mean = kNaN;
            s.sd = kNaN;
        } else {
            s.mean = sum / s.valid;
            double ss = 0.0;
            for (const auto& r : reps) {
                const MethodOutcome* o = r.find(label);
                if (o && o->valid()) ss += (o->gini - s.mean) * (o->gini - s.mean);
            }
            s.sd = s.valid > 1 ? std::sqrt(ss / (s.valid - 1)) : 0.0;
        }
        agg.methods.push_back(std::move(s));
    }
    return agg;
}

std::vector<ScenarioConfig> full_design_grid(int n_reps, std::uint64_t master_seed) {
    std::vector<ScenarioConfig> grid;
    for (double ore : {0.5, 0.2}) {
        for (double rho : {0.5, 0.9}) {
            for (Index p : {10, 30, 50}) {
                for (Index n : {100, 200, 500, 1000}) {
                    ScenarioConfig s;
                    s.p = p;
                    s.n = n;
                    s.ore = ore;
                    s.rho = rho;
                    s.n_reps = n_reps;
                    s.master_seed = master_seed;
                    grid.push_back(s);
                }
            }
        }
    }
    return grid;
}

// Persistence ----------------------------------------------------------------

static const char* kReplicationHeader = "scenario_id,rep,method,gini,model_size,status,seconds";

static void write_rows(std::ostream& os, const ReplicationResult& r) {
    for (const auto& o : r.outcomes) {
        os << r.scenario_id << ',' << r.rep << ',' << o.label << ',' << fmt_double(o.gini, "%.17g") << ','
           << o.model_size << ',' << sanitize(o.status) << ',' << fmt_double(o.seconds, "%.6f") << '\n';
    }
}

void write_replications_csv(const std::filesystem::path& file, const std::vector<ReplicationResult>& reps) {
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot write " + tmp);
        os << kReplicationHeader << '\n';
        for (const auto& r : reps) write_rows(os, r);
        if (!os) throw IoError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) throw IoError("cannot replace " + file.string() + ": " + ec.message());
}

std::vector<ReplicationResult> read_replications_csv(const std::filesystem::path& file,
                                                     const std::vector<std::string>& labels) {
    std::vector<ReplicationResult> out;
    std::ifstream is(file);
    if (!is) return out;
    std::string line;
    if (!std::getline(is, line) || line != kReplicationHeader) {
        throw IoError(file.string() + " is not a replications file (unexpected header)");
    }
    std::map<std::pair<std::string, int>, ReplicationResult> groups;
    std::vector<std::pair<std::string, int>> order;
    while (std::getline(is, line)) {
        const auto cells = split_line(line);
        if (cells.size() != 7) continue;  // torn trailing line
        MethodOutcome o;
        o.label = cells[2];
        char* end = nullptr;
        const long rep = std::strtol(cells[1].c_str(), &end, 10);
        if (end == cells[1].c_str() || *end != '\0') continue;
        if (cells[3] == "NA") {
            o.gini = kNaN;
        } else {
            o.gini = std::strtod(cells[3].c_str(), &end);
            if (end == cells[3].c_str() || *end != '\0') continue;
        }
        o.model_size = std::strtol(cells[4].c_str(), nullptr, 10);
        o.status = cells[5];
        o.seconds = cells[6] == "NA" ? kNaN : std::strtod(cells[6].c_str(), nullptr);
        const auto key = std::make_pair(cells[0], static_cast<int>(rep));
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            it->second.scenario_id = key.first;
            it->second.rep = key.second;
            order.push_back(key);
        }
        if (o.status == "invalid_test") it->second.test_valid = false;
        if (!it->second.find(o.label)) it->second.outcomes.push_back(std::move(o));
    }
    for (const auto& key : order) {
        ReplicationResult& r = groups[key];
        bool complete = true;
        std::vector<MethodOutcome> ordered;
        for (const auto& label : labels) {
            const MethodOutcome* o = r.find(label);
            if (!o) {
                complete = false;
                break;
            }
            ordered.push_back(*o);
        }
        if (!complete) continue;
        r.outcomes = std::move(ordered);
        out.push_back(std::move(r));
    }
    return out;
}

void write_aggregates_csv(const std::filesystem::path& file, const std::vector<AggregateResult>& aggregates,
                          const std::vector<ScenarioConfig>& scenarios) {
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw IoError("cannot write " + file.string());
    const bool sim = !scenarios.empty();
    if (sim) {
        if (scenarios.size() != aggregates.size()) throw InvalidInput("aggregate/scenario count mismatch");
        os << "scenario_id,p,n,ore,rho,p_over_n,method,mean_gini,sd_gini,valid,total\n";
    } else {
        os << "dataset,method,mean_gini,sd_gini,valid,total\n";
    }
    for (std::size_t s = 0; s < aggregates.size(); ++s) {
        for (const auto& m : aggregates[s].methods) {
            os << aggregates[s].scenario_id << ',';
            if (sim) {
                const auto& sc = scenarios[s];
                os << sc.p << ',' << sc.n << ',' << fmt_double(sc.ore, "%g") << ',' << fmt_double(sc.rho, "%g") << ','
                   << fmt_double(sc.p_over_n(), "%.6g") << ',';
            }
            os << m.label << ',' << fmt_double(m.mean, "%.10f") << ',' << fmt_double(m.sd, "%.10f") << ','
               << m.valid << ',' << m.total << '\n';
        }
    }
    if (!os) throw IoError("write failed for " + file.string());
}

void write_figure_csv(const std::filesystem::path& file, const std::vector<AggregateResult>& aggregates,
                      const std::vector<ScenarioConfig>& scenarios) {
    if (scenarios.size() != aggregates.size()) throw InvalidInput("aggregate/scenario count mismatch");
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw IoError("cannot write " + file.string());
    os << "ore,rho,p,n,p_over_n,method,mean_gini\n";
    for (std::size_t s = 0; s < aggregates.size(); ++s) {
        const auto& sc = scenarios[s];
        for (const auto& m : aggregates[s].methods) {
            os << fmt_double(sc.ore, "%g") << ',' << fmt_double(sc.rho, "%g") << ',' << sc.p << ',' << sc.n << ','
               << fmt_double(sc.p_over_n(), "%.6g") << ',' << m.label << ',' << fmt_double(m.mean, "%.10f") << '\n';
        }
    }
    if (!os) throw IoError("write failed for " + file.string());
}

GridOutcome run_grid(const std::vector<ScenarioConfig>& scenarios, const HarnessConfig& config,
                     const GridOptions& options) {
    if (scenarios.empty()) throw InvalidInput("no scenarios to run");
    config.validate();
    std::map<std::string, std::size_t> index_of;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        scenarios[s].validate();
        if (!index_of.emplace(scenarios[s].id(), s).second) {
            throw InvalidInput("duplicate scenario " + scenarios[s].id());
        }
    }
    const auto labels = config.labels(true);

    // calibration runs once per scenario before any replication starts
    std::vector<TruthSpec> truths;
    truths.reserve(scenarios.size());
    for (const auto& s : scenarios) truths.push_back(make_truth(s.p, s.rho, s.ore));

    std::vector<std::vector<std::optional<ReplicationResult>>> results(scenarios.size());
    for (std::size_t s = 0; s < scenarios.size(); ++s) results[s].resize(static_cast<std::size_t>(scenarios[s].n_reps));

    GridOutcome outcome;
    std::ofstream log;
    std::filesystem::path rep_file;
    if (options.out_dir) {
        std::filesystem::create_directories(*options.out_dir);
        rep_file = *options.out_dir / kReplicationFile;
        std::vector<ReplicationResult> kept;
        for (auto& r : read_replications_csv(rep_file, labels)) {
            auto it = index_of.find(r.scenario_id);
            if (it == index_of.end() || r.rep < 0 || r.rep >= scenarios[it->second].n_reps) continue;
            auto& slot = results[it->second][static_cast<std::size_t>(r.rep)];
            if (slot) continue;
            slot = r;
            kept.push_back(std::move(r));
            ++outcome.reused;
        }
        write_replications_csv(rep_file, kept);
        log.open(rep_file, std::ios::app);
        if (!log) throw IoError("cannot append to " + rep_file.string());
    }

    std::vector<std::pair<std::size_t, int>> pending;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        for (int rep = 0; rep < scenarios[s].n_reps; ++rep) {
            if (!results[s][static_cast<std::size_t>(rep)]) pending.emplace_back(s, rep);
        }
    }

    std::mutex io_mutex;
    std::exception_ptr io_error;
    std::atomic<int> started{0};
    std::atomic<int> executed{0};
    const int limit = options.stop_after.value_or(std::numeric_limits<int>::max());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallelism)
    for (std::size_t t = 0; t < pending.size(); ++t) {
        if (started.fetch_add(1) >= limit) continue;
        const auto [s, rep] = pending[t];
        ReplicationResult r = run_replication(scenarios[s], truths[s], rep, config);
        std::lock_guard lock(io_mutex);
        if (log.is_open() && !io_error) {
            write_rows(log, r);
            log.flush();
            if (!log) io_error = std::make_exception_ptr(IoError("write failed for " + rep_file.string()));
        }
        results[s][static_cast<std::size_t>(rep)] = std::move(r);
        executed.fetch_add(1);
    }
    if (io_error) std::rethrow_exception(io_error);
    outcome.executed = executed.load();

    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        for (auto& r : results[s]) {
            if (!r) {
                outcome.complete = false;
                continue;
            }
            outcome.replications.push_back(*r);
        }
    }
    if (!outcome.complete) return outcome;

    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        std::vector<ReplicationResult> reps;
        for (auto& r : results[s]) reps.push_back(*r);
        outcome.aggregates.push_back(aggregate(scenarios[s].id(), std::move(reps), labels));
    }
    if (options.out_dir) {
        log.close();
        write_replications_csv(rep_file, outcome.replications);
        write_aggregates_csv(*options.out_dir / kAggregateFile, outcome.aggregates, scenarios);
    }
    return outcome;
}

ApplicationOutcome run_application(const Dataset& data, int n_splits, std::uint64_t master_seed,
                                   const HarnessConfig& config, const std::string& name) {
    config.validate();
    if (n_splits < 1) throw InvalidInput("n_splits must be >= 1");
    if (!data.has_both_classes()) throw DegenerateData("application data needs both outcome classes");
    const auto labels = config.labels(false);
    const std::uint64_t stream_id = fnv1a("application");

    ApplicationOutcome out;
    out.splits.resize(static_cast<std::size_t>(n_splits));
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallelism)
    for (int k = 0; k < n_splits; ++k) {
        const std::uint64_t seed = derive_seed(master_seed, stream_id, static_cast<std::uint64_t>(k));
        ReplicationResult r;
        try {
            const auto [train, test] = split_train_test(data, config.train_frac, derive_seed(seed, stream::split, 0));
            r = evaluate_split(train, test, seed, config, nullptr);
        } catch (const std::exception& e) {
            r.test_valid = false;
            r.outcomes.clear();
            for (const auto& label : labels) r.outcomes.push_back(failed(label, sanitize(e.what())));
        }
        r.scenario_id = name;
        r.rep = k;
        out.splits[static_cast<std::size_t>(k)] = std::move(r);
    }
    out.aggregate = aggregate(name, out.splits, labels);
    return out;
}

}  // namespace logitbench
