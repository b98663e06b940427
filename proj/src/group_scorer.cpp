#include "corank/group_scorer.hpp"

#include <stdexcept>
#include <unordered_set>

namespace corank {

std::vector<bool> GroupSchedule::pad_mask(std::size_t g) const
{
    std::vector<bool> mask(n, false);
    for (std::size_t s = 0; s < groups.at(g).size(); ++s) {
        mask[s] = true;
    }
    return mask;
}

GroupSchedule schedule_groups(std::size_t k, std::size_t n, std::size_t o)
{
    if (n < 1 || k < 1) {
        throw std::invalid_argument("schedule_groups: need k >= 1 and n >= 1");
    }
    if (o >= n) {
        throw std::invalid_argument("overlap must be smaller than group size");
    }
    const std::size_t stride = n - o;
    const std::size_t span = k > o ? k - o : 1;
    const std::size_t count = (span + stride - 1) / stride;

    GroupSchedule s{k, n, o, {}};
    s.groups.reserve(count);
    for (std::size_t g = 0; g < count; ++g) {
        const std::size_t first = g * stride + 1;
        const std::size_t last = std::min(k, first + n - 1);
        std::vector<std::size_t> window;
        for (std::size_t r = first; r <= last; ++r) {
            window.push_back(r);
        }
        s.groups.push_back(std::move(window));
    }
    return s;
}

ScoredList merge_scores(const std::string& query_id, const std::vector<std::string>& ranking,
                        const std::vector<std::vector<double>>& group_scores, const GroupSchedule& schedule)
{
    if (group_scores.size() != schedule.size() || ranking.size() != schedule.k) {
        throw std::invalid_argument("merge_scores: scores do not match the schedule");
    }
    ScoredList out{query_id, {}};
    out.entries.reserve(schedule.k);
    std::vector<bool> taken(schedule.k + 1, false);
    for (std::size_t g = 0; g < schedule.size(); ++g) {
        const auto& window = schedule.groups[g];
        if (group_scores[g].size() < window.size()) {
            throw std::invalid_argument("merge_scores: group " + std::to_string(g + 1) + " is missing scores");
        }
        for (std::size_t slot = 0; slot < window.size(); ++slot) {
            const std::size_t rank = window[slot];
            if (!taken[rank]) {
                taken[rank] = true;
                out.entries.push_back({ranking[rank - 1], group_scores[g][slot], static_cast<int>(g + 1)});
            }
        }
    }
    out.sort();
    return out;
}

}  // namespace corank
