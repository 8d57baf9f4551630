#pragma once

// Communities are connected components (>= k_min personas) of a day's
// co-engagement projection. Chains link communities on consecutive days by
// greedy highest-Jaccard matching.

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "dfa/common.hpp"
#include "dfa/graph.hpp"

namespace dfa {

inline constexpr std::size_t kDefaultMinCommunitySize = 3;
inline constexpr double kDefaultJaccardThreshold = 0.3;

struct Community {
    std::string id;  // "<day>/<category>/<ordinal>"
    Day day{};
    std::string category;
    std::size_t ordinal = 0;
    std::vector<std::string> members;  // user ids, sorted
    std::vector<std::size_t> nodes;    // day-graph node indices, ascending

    std::size_t size() const { return members.size(); }
};

inline std::vector<Community> extract_communities(const DailyGraph& g, const Projection& projection,
                                                  std::size_t k_min = kDefaultMinCommunitySize) {
    if (k_min < 1) throw ConfigError("k_min must be at least 1");
    std::vector<Community> out;
    for (const auto& part : connected_components(projection.vertices.size(), projection.edges)) {
        if (part.size() < k_min) continue;
        Community c;
        c.day = g.day;
        c.category = projection.category;
        for (auto local : part) {
            const auto node = projection.vertices[local];
            c.nodes.push_back(node);
            c.members.push_back(g.nodes[node].user_id);
        }
        std::sort(c.members.begin(), c.members.end());
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Community& a, const Community& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.members.front() < b.members.front();
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].ordinal = i;
        out[i].id = format_day(out[i].day) + "/" + out[i].category + "/" + std::to_string(i);
    }
    return out;
}

// Both arguments sorted and duplicate-free.
inline std::size_t intersection_size(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

// |A ∩ B| / |A ∪ B| over sorted duplicate-free user lists; 0 when both empty.
inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto inter = intersection_size(a, b);
    const auto uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline std::vector<std::vector<double>> jaccard_matrix(const std::vector<Community>& from,
                                                       const std::vector<Community>& to) {
    std::vector<std::vector<double>> m(from.size(), std::vector<double>(to.size(), 0.0));
    for (std::size_t i = 0; i < from.size(); ++i) {
        for (std::size_t j = 0; j < to.size(); ++j) m[i][j] = jaccard(from[i].members, to[j].members);
    }
    return m;
}

struct DayCommunities {
    Day day{};
    std::vector<Community> communities;
};

struct CommunityChain {
    std::string category;
    std::vector<Community> links;  // consecutive days

    std::size_t lifespan_days() const { return links.size(); }
    Day start_day() const { return links.front().day; }
    Day end_day() const { return links.back().day; }

    std::size_t peak_size() const {
        std::size_t peak = 0;
        for (const auto& c : links) peak = std::max(peak, c.size());
        return peak;
    }

    // Mean per-day relative change in size; undefined for single-day chains.
    Metric growth_rate() const {
        if (links.size() < 2) return Metric::undefined();
        const auto first = static_cast<double>(links.front().size());
        const auto last = static_cast<double>(links.back().size());
        return Metric::of((last - first) / (first * static_cast<double>(links.size() - 1)));
    }
};

// `days` must hold one category's communities in strictly increasing day
// order. Days missing from the list, or listed with no communities, end every
// open chain.
inline std::vector<CommunityChain> track_communities(const std::vector<DayCommunities>& days,
                                                     double theta = kDefaultJaccardThreshold) {
    if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
    for (std::size_t i = 1; i < days.size(); ++i) {
        if (!(days[i - 1].day < days[i].day)) throw std::invalid_argument("track_communities: days must be sorted");
    }
    std::vector<CommunityChain> chains;
    std::vector<std::size_t> open;  // chain index for each community of the previous listed day

    for (std::size_t d = 0; d < days.size(); ++d) {
        const auto& cur = days[d].communities;
        std::vector<std::size_t> chain_of(cur.size(), SIZE_MAX);
        const bool consecutive = d > 0 && days[d].day == days[d - 1].day + std::chrono::days{1};
        if (consecutive) {
            const auto& prev = days[d - 1].communities;
            struct Candidate {
                double j;
                std::size_t inter, a, b;
            };
            std::vector<Candidate> cand;
            for (std::size_t a = 0; a < prev.size(); ++a) {
                for (std::size_t b = 0; b < cur.size(); ++b) {
                    const double jac = jaccard(prev[a].members, cur[b].members);
                    if (jac >= theta) cand.push_back({jac, intersection_size(prev[a].members, cur[b].members), a, b});
                }
            }
            std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
                if (x.j != y.j) return x.j > y.j;
                if (x.inter != y.inter) return x.inter > y.inter;
                return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
            std::vector<bool> prev_used(prev.size(), false);
            for (const auto& c : cand) {
                if (prev_used[c.a] || chain_of[c.b] != SIZE_MAX) continue;
                prev_used[c.a] = true;
                chain_of[c.b] = open[c.a];
            }
        }
        for (std::size_t b = 0; b < cur.size(); ++b) {
            if (chain_of[b] == SIZE_MAX) {
                chain_of[b] = chains.size();
                chains.push_back({cur[b].category, {}});
            }
            chains[chain_of[b]].links.push_back(cur[b]);
        }
        open = std::move(chain_of);
    }
    return chains;
}

struct LifespanStats {
    std::size_t chain_count = 0;
    std::map<std::size_t, std::size_t> histogram;  // lifespan -> chains
    Metric median;
    Metric mean;
    Metric share_at_most_3;
};

inline LifespanStats lifespan_stats(const std::vector<CommunityChain>& chains) {
    LifespanStats s;
    std::vector<std::size_t> spans;
    for (const auto& c : chains) spans.push_back(c.lifespan_days());
    s.chain_count = spans.size();
    if (spans.empty()) return s;
    std::sort(spans.begin(), spans.end());
    std::size_t short_lived = 0;
    double total = 0.0;
    for (auto v : spans) {
        ++s.histogram[v];
        total += static_cast<double>(v);
        if (v <= 3) ++short_lived;
    }
    const auto n = spans.size();
    s.median = Metric::of(n % 2 ? static_cast<double>(spans[n / 2])
                                : (static_cast<double>(spans[n / 2 - 1]) + static_cast<double>(spans[n / 2])) / 2.0);
    s.mean = Metric::of(total / static_cast<double>(n));
    s.share_at_most_3 = Metric::of(static_cast<double>(short_lived) / static_cast<double>(n));
    return s;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json metric_to_json(const Metric& m) {
    return {{"value", m.defined ? nlohmann::json(m.value) : nlohmann::json(nullptr)}, {"defined", m.defined}};
}

inline nlohmann::json to_json(const Community& c) {
    return {{"id", c.id}, {"day", format_day(c.day)}, {"category", c.category}, {"size", c.size()}, {"members", c.members}};
}

inline nlohmann::json to_json(const CommunityChain& ch) {
    nlohmann::json ids = nlohmann::json::array(), sizes = nlohmann::json::array();
    for (const auto& c : ch.links) {
        ids.push_back(c.id);
        sizes.push_back(c.size());
    }
    return {{"category", ch.category},
            {"start_day", format_day(ch.start_day())},
            {"end_day", format_day(ch.end_day())},
            {"lifespan", ch.lifespan_days()},
            {"peak_size", ch.peak_size()},
            {"community_ids", ids},
            {"sizes", sizes},
            {"growth_rate", metric_to_json(ch.growth_rate())}};
}

inline nlohmann::json to_json(const LifespanStats& s) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [span, count] : s.histogram) hist[std::to_string(span)] = count;
    return {{"chain_count", s.chain_count},
            {"histogram", hist},
            {"median", metric_to_json(s.median)},
            {"mean", metric_to_json(s.mean)},
            {"share_at_most_3", metric_to_json(s.share_at_most_3)}};
}

inline void write_chains_csv(std::ostream& out, const std::vector<CommunityChain>& chains) {
    out << "category,start_day,lifespan,peak_size\n";
    for (const auto& ch : chains) {
        out << detail::csv_field(ch.category) << ',' << format_day(ch.start_day()) << ',' << ch.lifespan_days() << ',' << ch.peak_size()
            << '\n';
    }
}

}  // namespace dfa
