#pragma once

#include "logitbench/model.hpp"
#include "logitbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace testsupport {

using namespace logitbench;

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(LOGITBENCH_FIXTURE_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("logitbench_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Gaussian covariates and outcomes drawn from a logistic model with the given
/// coefficients (beta may be shorter than p; missing entries are 0).
inline Dataset random_logistic(Index n, Index p, std::uint64_t seed, double alpha = 0.0,
                               std::vector<double> beta = {}) {
    Rng rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) x(i, j) = z(rng);
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        double eta = alpha;
        for (std::size_t j = 0; j < beta.size() && static_cast<Index>(j) < p; ++j) {
            eta += beta[j] * x(i, static_cast<Index>(j));
        }
        y[i] = u(rng) < inv_logit(eta) ? 1.0 : 0.0;
    }
    return Dataset(std::move(x), std::move(y));
}

/// O(n^2) pair count: P(score_pos > score_neg) + 0.5 P(tie).
inline double brute_auc(std::span<const double> s, std::span<const double> y) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1.0) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0.0) continue;
            pairs += 1.0;
            if (s[i] > s[j]) wins += 1.0;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

/// Log-likelihood summed term by term with the naive formula.
inline double naive_loglik(double alpha, const Vector& beta, const Matrix& x, const Vector& y) {
    double ll = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
        double eta = alpha;
        for (Index j = 0; j < x.cols(); ++j) eta += beta[j] * x(i, j);
        const double mu = 1.0 / (1.0 + std::exp(-eta));
        ll += y[i] == 1.0 ? std::log(mu) : std::log(1.0 - mu);
    }
    return ll;
}

inline std::vector<Index> all_columns(Index p) {
    std::vector<Index> c(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) c[static_cast<std::size_t>(j)] = j;
    return c;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i] / n;
        mb += rb[i] / n;
    }
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace testsupport
