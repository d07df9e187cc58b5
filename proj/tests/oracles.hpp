#pragma once

// Reference implementations kept deliberately separate from the library so
// the two can disagree. Same documented arithmetic, independent code.

#include <cstdint>
#include <vector>

#include "mitotk/dataset.hpp"

namespace oracle {

struct OtsuRef {
    double threshold = 0.0;
    bool degenerate = false;
};

// Exhaustive between-class-variance scan. Follows the histogram contract
// from the library header: bin = min(int(s*bins), bins-1), centers
// (i+0.5)/bins, sums accumulated in ascending bin order, variance
// (w0/n)(w1/n)(mu0-mu1)^2, ties resolved to the middle maximizer.
inline OtsuRef otsu(const std::vector<double>& scores, int bins) {
    std::vector<std::int64_t> hist(static_cast<std::size_t>(bins), 0);
    for (double s : scores) {
        int b = static_cast<int>(s * bins);
        if (b >= bins)
            b = bins - 1;
        ++hist[static_cast<std::size_t>(b)];
    }

    int occupied = 0, only = 0;
    for (int i = 0; i < bins; ++i)
        if (hist[static_cast<std::size_t>(i)] > 0) {
            ++occupied;
            only = i;
        }
    if (occupied == 1)
        return {static_cast<double>(only + 1) / bins, true};

    double n = static_cast<double>(scores.size());
    std::vector<int> ties;
    double best = -1.0;
    for (int b = 1; b < bins; ++b) {
        double w0 = 0.0, s0 = 0.0;
        for (int i = 0; i < b; ++i) {
            double h = static_cast<double>(hist[static_cast<std::size_t>(i)]);
            w0 += h;
            s0 += h * ((i + 0.5) / bins);
        }
        double w1 = 0.0, s1 = 0.0;
        for (int i = b; i < bins; ++i) {
            double h = static_cast<double>(hist[static_cast<std::size_t>(i)]);
            w1 += h;
            s1 += h * ((i + 0.5) / bins);
        }
        double var = 0.0;
        if (w0 > 0.0 && w1 > 0.0) {
            double mu0 = s0 / w0;
            double mu1 = s1 / w1;
            var = (w0 / n) * (w1 / n) * (mu0 - mu1) * (mu0 - mu1);
        }
        if (var > best) {
            best = var;
            ties.clear();
            ties.push_back(b);
        } else if (var == best) {
            ties.push_back(b);
        }
    }
    return {static_cast<double>(ties[(ties.size() - 1) / 2]) / bins, false};
}

// O(n^2) pairwise Mann-Whitney probability, ties counting half.
inline double auc(const std::vector<mitotk::Label>& labels, const std::vector<double>& scores) {
    double wins = 0.0;
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != mitotk::Label::AMF)
            continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != mitotk::Label::NMF)
                continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// Central finite difference.
template <typename F>
double central_diff(F f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace oracle
