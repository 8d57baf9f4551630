#pragma once

#include <string>
#include <vector>

#include "dfa/categories.hpp"
#include "dfa/community.hpp"
#include "dfa/graph.hpp"
#include "dfa/ingest.hpp"

namespace dfa {

struct AnalysisParams {
    std::size_t k_min = kDefaultMinCommunitySize;
    double theta = kDefaultJaccardThreshold;
};

struct DayAnalysis {
    Day day{};
    DailyGraph graph;  // filtered
    FilterStats filter;
    std::vector<Projection> projections;              // per category
    std::vector<std::vector<Community>> communities;  // per category
};

struct PartitionAnalysis {
    EventPartition partition;
    std::vector<DayAnalysis> days;  // every day of the window, in order
    std::vector<CommunityChain> chains;  // grouped by category in set order
};

// Builds, filters and projects one graph per window day, extracts communities
// and tracks them. Days are processed in parallel; results do not depend on
// the thread count.
inline PartitionAnalysis analyze_partition(EventPartition part, const CategorySet& categories,
                                           const AnalysisParams& params = {}) {
    if (params.k_min < 1) throw ConfigError("k_min must be at least 1");
    if (!(params.theta > 0.0 && params.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
    for (const auto& p : part.posts) {
        if (!categories.contains(p.label)) {
            throw DataError("post '" + p.post.id + "' has label '" + p.label + "' outside the category set");
        }
    }
    PartitionAnalysis out;
    const auto days = part.window.days();
    out.days.resize(days.size());
    parallel_for(days.size(), [&](std::size_t i) {
        auto& da = out.days[i];
        da.day = days[i];
        da.graph = filter_graph(build_day_graph(part, days[i]), &da.filter);
        for (const auto& cat : categories) {
            da.projections.push_back(co_engagement_projection(da.graph, categories, cat.label));
            da.communities.push_back(extract_communities(da.graph, da.projections.back(), params.k_min));
        }
    });
    for (std::size_t c = 0; c < categories.size(); ++c) {
        std::vector<DayCommunities> per_day;
        for (const auto& da : out.days) per_day.push_back({da.day, da.communities[c]});
        auto chains = track_communities(per_day, params.theta);
        out.chains.insert(out.chains.end(), std::make_move_iterator(chains.begin()), std::make_move_iterator(chains.end()));
    }
    out.partition = std::move(part);
    return out;
}

}  // namespace dfa
