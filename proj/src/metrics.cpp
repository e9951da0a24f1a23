#include "logitbench/metrics.hpp"

#include "logitbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace logitbench {

double auc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) throw InvalidInput("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(scores[i])) throw InvalidInput("non-finite score");
        if (labels[i] == 1.0) {
            ++n_pos;
        } else if (labels[i] != 0.0) {
            throw InvalidInput("label is not 0 or 1");
        }
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DegenerateData("AUC needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based) mid-ranks of the positives.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1.0) rank_sum += mid;
        }
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - 0.5 * np * (np + 1.0);
    return u / (np * static_cast<double>(n_neg));
}

double gini(std::span<const double> scores, std::span<const double> labels) {
    return 2.0 * (auc(scores, labels) - 0.5);
}

}  // namespace logitbench
