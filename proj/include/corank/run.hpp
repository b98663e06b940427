#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace corank {

struct ScoredEntry {
    std::string doc_id;
    double score = 0.0;
    int source_group = 0;  // 1-based group that produced the score; 0 when not grouped
};

/// One query's ranking: score descending, ties by doc_id ascending.
struct ScoredList {
    std::string query_id;
    std::vector<ScoredEntry> entries;

    void sort()
    {
        std::sort(entries.begin(), entries.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
            if (a.score != b.score) {
                return a.score > b.score;
            }
            return a.doc_id < b.doc_id;
        });
    }

    [[nodiscard]] std::vector<std::string> doc_ids() const
    {
        std::vector<std::string> out;
        out.reserve(entries.size());
        for (auto const& e : entries) {
            out.push_back(e.doc_id);
        }
        return out;
    }
};

}  // namespace corank
