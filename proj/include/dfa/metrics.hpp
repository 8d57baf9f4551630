#pragma once

// Fragmentation metrics over partitions, filtered day graphs, communities and
// chains. Edge-based metrics work on the simple undirected graph (parallel
// edges collapsed).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfa/categories.hpp"
#include "dfa/common.hpp"
#include "dfa/community.hpp"
#include "dfa/graph.hpp"
#include "dfa/ingest.hpp"

namespace dfa {

// ---------------------------------------------------------------------------
// Category distributions (dominance, historical comparison)
// ---------------------------------------------------------------------------

struct CategoryDistribution {
    std::vector<std::string> labels;
    std::vector<double> shares;  // aligned with labels; all zero when empty
    std::size_t sample_count = 0;

    bool empty() const { return sample_count == 0; }

    double share(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) return shares[i];
        }
        throw ConfigError("category '" + label + "' not in distribution");
    }
};

inline CategoryDistribution distribution_from_counts(const CategorySet& categories, const std::vector<std::size_t>& counts) {
    CategoryDistribution d{categories.labels(), std::vector<double>(categories.size(), 0.0), 0};
    for (auto c : counts) d.sample_count += c;
    if (d.sample_count == 0) return d;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        d.shares[i] = static_cast<double>(counts[i]) / static_cast<double>(d.sample_count);
    }
    return d;
}

// Share of each category among the given posts.
template <class Indices>
CategoryDistribution distribution_of(const EventPartition& part, const CategorySet& categories, const Indices& idx) {
    std::vector<std::size_t> counts(categories.size(), 0);
    for (auto i : idx) {
        const auto c = categories.index_of(part.posts[i].label);
        if (!c) throw DataError("post '" + part.posts[i].post.id + "' has unknown label '" + part.posts[i].label + "'");
        ++counts[*c];
    }
    return distribution_from_counts(categories, counts);
}

struct DayDistribution {
    Day day{};
    CategoryDistribution distribution;
};

// Per-day category shares over every day of the partition's window; days
// without posts carry an empty distribution.
inline std::vector<DayDistribution> dominance_series(const EventPartition& part, const CategorySet& categories) {
    std::vector<DayDistribution> out;
    static const std::vector<std::size_t> none;
    for (Day d : part.window.days()) {
        const auto it = part.day_index.find(d);
        out.push_back({d, distribution_of(part, categories, it == part.day_index.end() ? none : it->second)});
    }
    return out;
}

struct DistributionComparison {
    std::vector<std::string> labels;
    std::vector<double> deltas;  // to - from
    std::vector<std::size_t> rank_from;  // 1 = largest share
    std::vector<std::size_t> rank_to;
    double total_variation = 0.0;
};

inline std::vector<std::size_t> share_ranks(const std::vector<double>& shares) {
    std::vector<std::size_t> order(shares.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return shares[a] > shares[b]; });
    std::vector<std::size_t> rank(shares.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
    return rank;
}

inline DistributionComparison compare_distributions(const CategoryDistribution& from, const CategoryDistribution& to) {
    if (from.labels != to.labels) throw ConfigError("cannot compare distributions over different category sets");
    DistributionComparison c;
    c.labels = from.labels;
    for (std::size_t i = 0; i < from.labels.size(); ++i) {
        c.deltas.push_back(to.shares[i] - from.shares[i]);
        c.total_variation += std::abs(to.shares[i] - from.shares[i]);
    }
    c.total_variation /= 2.0;
    c.rank_from = share_ranks(from.shares);
    c.rank_to = share_ranks(to.shares);
    return c;
}

// ---------------------------------------------------------------------------
// Reaction to the event
// ---------------------------------------------------------------------------

inline constexpr double kReactionFloor = 1e-9;
inline constexpr double kReactionCap = 1e6;

struct Reaction {
    Metric value;  // clamped to [-cap, cap]
    double raw = 0.0;
    bool saturated = false;
    Metric pre_mean;
    Metric post_mean;
};

// Relative change of a category's mean daily share from the pre-event days
// [t-before, t-1] to [t, t+after]. Days with no posts are skipped.
inline Reaction reaction_index(const std::vector<DayDistribution>& series, const EventWindow& window,
                               const std::string& category) {
    double pre_sum = 0.0, post_sum = 0.0;
    std::size_t pre_n = 0, post_n = 0;
    for (const auto& [day, dist] : series) {
        if (!window.contains(day) || dist.empty()) continue;
        const double s = dist.share(category);
        if (day < window.event_date) {
            pre_sum += s;
            ++pre_n;
        } else {
            post_sum += s;
            ++post_n;
        }
    }
    Reaction r;
    if (pre_n) r.pre_mean = Metric::of(pre_sum / static_cast<double>(pre_n));
    if (post_n) r.post_mean = Metric::of(post_sum / static_cast<double>(post_n));
    if (!pre_n || !post_n) return r;
    r.raw = (r.post_mean.value - r.pre_mean.value) / std::max(r.pre_mean.value, kReactionFloor);
    r.saturated = std::abs(r.raw) > kReactionCap;
    r.value = Metric::of(std::clamp(r.raw, -kReactionCap, kReactionCap));
    return r;
}

// ---------------------------------------------------------------------------
// Polarization (E-I index) and diversity
// ---------------------------------------------------------------------------

struct EiResult {
    std::size_t internal = 0;
    std::size_t external = 0;

    Metric ei() const {
        const auto total = internal + external;
        if (!total) return Metric::undefined();
        return Metric::of((static_cast<double>(external) - static_cast<double>(internal)) / static_cast<double>(total));
    }

    // Fraction of cross-category sender-sender edges.
    Metric diversity() const {
        const auto total = internal + external;
        if (!total) return Metric::undefined();
        return Metric::of(static_cast<double>(external) / static_cast<double>(total));
    }
};

// Counts sender-sender edges within (internal) and across (external)
// categories. With a category, only edges touching it are counted.
inline EiResult ei_index(const DailyGraph& g, const std::optional<std::string>& category = std::nullopt) {
    EiResult r;
    for (const auto& [a, b] : simple_edges(g)) {
        const auto& na = g.nodes[a];
        const auto& nb = g.nodes[b];
        if (!na.is_sender() || !nb.is_sender()) continue;
        if (category && na.category != *category && nb.category != *category) continue;
        if (na.category == nb.category) {
            ++r.internal;
        } else {
            ++r.external;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

// Newman modularity Q = sum_c (e_cc - a_c^2) of a node labeling on a simple
// undirected graph; undefined without edges.
inline Metric modularity(std::span<const SimpleEdge> edges, const std::vector<std::size_t>& group_of) {
    if (edges.empty()) return Metric::undefined();
    std::size_t groups = 0;
    for (const auto& [a, b] : edges) groups = std::max({groups, group_of[a] + 1, group_of[b] + 1});
    std::vector<double> inside(groups, 0.0), ends(groups, 0.0);
    for (const auto& [a, b] : edges) {
        if (group_of[a] == group_of[b]) inside[group_of[a]] += 1.0;
        ends[group_of[a]] += 1.0;
        ends[group_of[b]] += 1.0;
    }
    const auto m = static_cast<double>(edges.size());
    double q = 0.0;
    for (std::size_t c = 0; c < groups; ++c) {
        const double a = ends[c] / (2.0 * m);
        q += inside[c] / m - a * a;
    }
    return Metric::of(q);
}

// Modularity of the category partition on the sender-sender subgraph.
inline Metric category_modularity(const DailyGraph& g, const CategorySet& categories) {
    std::vector<SimpleEdge> edges;
    for (const auto& e : simple_edges(g)) {
        if (g.nodes[e.first].is_sender() && g.nodes[e.second].is_sender()) edges.push_back(e);
    }
    std::vector<std::size_t> group(g.nodes.size(), 0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].is_sender()) group[i] = categories.require(g.nodes[i].category);
    }
    return modularity(edges, group);
}

struct Segmentation {
    std::vector<std::size_t> community_counts;  // per category
    Metric modularity;
};

// `communities[c]` holds the communities of category c for this day.
inline Segmentation segmentation(const DailyGraph& g, const CategorySet& categories,
                                 const std::vector<std::vector<Community>>& communities) {
    Segmentation s;
    for (std::size_t c = 0; c < categories.size(); ++c) {
        s.community_counts.push_back(c < communities.size() ? communities[c].size() : 0);
    }
    s.modularity = category_modularity(g, categories);
    return s;
}

// ---------------------------------------------------------------------------
// Cohesiveness and scatter
// ---------------------------------------------------------------------------

struct Cohesiveness {
    double internal_density = 0.0;
    Metric conductance;
};

inline Cohesiveness cohesiveness(const Community& community, const Projection& projection, const DailyGraph& g) {
    Cohesiveness out;
    std::vector<bool> member_local(projection.vertices.size(), false);
    for (auto node : community.nodes) member_local[projection.local_index(node)] = true;
    std::size_t m_in = 0;
    for (const auto& [a, b] : projection.edges) {
        if (member_local[a] && member_local[b]) ++m_in;
    }
    const auto n = static_cast<double>(community.nodes.size());
    out.internal_density = n >= 2 ? 2.0 * static_cast<double>(m_in) / (n * (n - 1.0)) : 0.0;

    std::vector<bool> in_set(g.nodes.size(), false);
    for (auto node : community.nodes) in_set[node] = true;
    std::size_t cut = 0, vol_in = 0, vol_out = 0;
    for (const auto& [a, b] : simple_edges(g)) {
        (in_set[a] ? vol_in : vol_out) += 1;
        (in_set[b] ? vol_in : vol_out) += 1;
        if (in_set[a] != in_set[b]) ++cut;
    }
    if (cut == 0) {
        out.conductance = Metric::of(0.0);
    } else if (const auto denom = std::min(vol_in, vol_out); denom > 0) {
        out.conductance = Metric::of(static_cast<double>(cut) / static_cast<double>(denom));
    }
    return out;
}

// Fraction of a category's sender personas that belong to no community.
inline Metric scatter_ratio(const DailyGraph& g, const std::string& category, const std::vector<Community>& communities) {
    std::size_t total = 0;
    for (const auto& n : g.nodes) {
        if (n.is_sender() && n.category == category) ++total;
    }
    if (!total) return Metric::undefined();
    std::size_t clustered = 0;
    for (const auto& c : communities) {
        if (c.category == category) clustered += c.size();
    }
    return Metric::of(1.0 - static_cast<double>(clustered) / static_cast<double>(total));
}

// ---------------------------------------------------------------------------
// Influential participants and relational structure
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDefaultTopN = 10;

struct RankedPersona {
    std::string user_id;
    std::string category;  // empty for receivers
    std::size_t degree = 0;
};

struct InfluencerTable {
    std::vector<RankedPersona> top_senders;
    std::vector<RankedPersona> top_receivers;
    std::map<std::size_t, std::size_t> degree_histogram;
    std::map<std::string, std::size_t> edge_kind_counts;

    std::map<std::string, double> edge_kind_shares() const {
        std::size_t total = 0;
        for (const auto& [k, n] : edge_kind_counts) total += n;
        std::map<std::string, double> out;
        for (const auto& [k, n] : edge_kind_counts) {
            out[k] = total ? static_cast<double>(n) / static_cast<double>(total) : 0.0;
        }
        return out;
    }
};

inline InfluencerTable influencers_and_degrees(const DailyGraph& g, std::size_t top_n = kDefaultTopN) {
    InfluencerTable t;
    std::vector<std::size_t> degree(g.nodes.size(), 0);
    for (const auto& [a, b] : simple_edges(g)) {
        ++degree[a];
        ++degree[b];
    }
    std::vector<RankedPersona> senders, receivers;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        ++t.degree_histogram[degree[i]];
        RankedPersona p{g.nodes[i].user_id, g.nodes[i].category, degree[i]};
        (g.nodes[i].is_sender() ? senders : receivers).push_back(std::move(p));
    }
    auto rank = [top_n](std::vector<RankedPersona>& v) {
        std::sort(v.begin(), v.end(), [](const RankedPersona& a, const RankedPersona& b) {
            if (a.degree != b.degree) return a.degree > b.degree;
            if (a.user_id != b.user_id) return a.user_id < b.user_id;
            return a.category < b.category;
        });
        if (v.size() > top_n) v.resize(top_n);
    };
    rank(senders);
    rank(receivers);
    t.top_senders = std::move(senders);
    t.top_receivers = std::move(receivers);
    for (const auto* kind : {"reply", "retweet", "mention"}) t.edge_kind_counts[kind] = 0;
    for (const auto& e : g.edges) ++t.edge_kind_counts[to_string(e.kind)];
    return t;
}

}  // namespace dfa
