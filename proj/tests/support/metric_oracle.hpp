#pragma once

// Brute-force reference implementations of the ranking metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace corank::oracle {

inline double precision(const std::vector<int>& ranked, std::size_t cutoff)
{
    double hits = 0;
    for (std::size_t r = 0; r < ranked.size() && r < cutoff; ++r) {
        hits += ranked[r] >= 1 ? 1 : 0;
    }
    return hits / static_cast<double>(cutoff);
}

inline double dcg(const std::vector<int>& g, std::size_t cutoff)
{
    double s = 0.0;
    for (std::size_t r = 0; r < g.size() && r < cutoff; ++r) {
        s += g[r] / std::log2(static_cast<double>(r) + 2.0);
    }
    return s;
}

/// Ideal DCG found by enumerating every ordering of the judged grades.
inline double ndcg(const std::vector<int>& ranked, std::vector<int> judged, std::size_t cutoff)
{
    std::sort(judged.begin(), judged.end());
    double ideal = 0.0;
    do {
        ideal = std::max(ideal, dcg(judged, cutoff));
    } while (std::next_permutation(judged.begin(), judged.end()));
    return ideal == 0.0 ? 0.0 : dcg(ranked, cutoff) / ideal;
}

inline double average_precision(const std::vector<int>& ranked, std::size_t relevant, std::size_t cutoff)
{
    if (relevant == 0) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < ranked.size() && r < cutoff; ++r) {
        if (ranked[r] >= 1) {
            std::vector<int> prefix(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(r + 1));
            sum += precision(prefix, r + 1);
        }
    }
    return sum / static_cast<double>(relevant);
}

}  // namespace corank::oracle
