#pragma once

// Daily interaction graphs. Users appear as sender personas (one per user and
// category that user posted in that day) or as a single unlabeled receiver
// persona. Edges run from the sender persona of a post to each user the post
// replies to, retweets or mentions.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dfa/categories.hpp"
#include "dfa/common.hpp"
#include "dfa/ingest.hpp"

namespace dfa {

enum class PersonaKind { sender, receiver };
enum class EdgeKind { reply, retweet, mention };

inline const char* to_string(PersonaKind k) { return k == PersonaKind::sender ? "sender" : "receiver"; }

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::reply: return "reply";
        case EdgeKind::retweet: return "retweet";
        case EdgeKind::mention: return "mention";
    }
    return "?";
}

struct PersonaNode {
    std::string user_id;
    PersonaKind kind = PersonaKind::receiver;
    std::string category;  // empty for receivers

    bool is_sender() const { return kind == PersonaKind::sender; }

    auto operator<=>(const PersonaNode&) const = default;
};

struct InteractionEdge {
    std::size_t from = 0;  // always a sender persona
    std::size_t to = 0;
    EdgeKind kind = EdgeKind::reply;
    std::string post_id;

    bool operator==(const InteractionEdge&) const = default;
};

struct DailyGraph {
    Day day{};
    std::string area;
    std::string event;
    std::string provenance;
    std::vector<PersonaNode> nodes;  // sorted by (user_id, kind, category)
    std::vector<InteractionEdge> edges;

    bool empty() const { return nodes.empty(); }

    std::size_t sender_count() const {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_sender(); }));
    }
};

using SimpleEdge = std::pair<std::size_t, std::size_t>;

// Undirected, parallel edges collapsed; each pair (a, b) has a < b, sorted.
inline std::vector<SimpleEdge> simple_edges(const DailyGraph& g) {
    std::vector<SimpleEdge> out;
    out.reserve(g.edges.size());
    for (const auto& e : g.edges) out.emplace_back(std::min(e.from, e.to), std::max(e.from, e.to));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<std::vector<std::size_t>> adjacency(std::size_t n, std::span<const SimpleEdge> edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

// ---------------------------------------------------------------------------
// Connected components
// ---------------------------------------------------------------------------

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// Components of the undirected graph on nodes [0, n). Each part is sorted and
// parts are ordered by their smallest node.
inline std::vector<std::vector<std::size_t>> connected_components(std::size_t n, std::span<const SimpleEdge> edges) {
    DisjointSets sets(n);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw std::out_of_range("edge endpoint out of range");
        sets.unite(a, b);
    }
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> slot(n, SIZE_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        const auto root = sets.find(v);
        if (slot[root] == SIZE_MAX) {
            slot[root] = parts.size();
            parts.emplace_back();
        }
        parts[slot[root]].push_back(v);
    }
    return parts;
}

inline std::vector<std::vector<std::size_t>> connected_components(const DailyGraph& g) {
    const auto edges = simple_edges(g);
    return connected_components(g.nodes.size(), edges);
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

inline DailyGraph build_day_graph(const EventPartition& part, Day day) {
    if (!part.window.contains(day)) {
        throw std::out_of_range("day " + format_day(day) + " is outside the window of " + part.id());
    }
    DailyGraph g;
    g.day = day;
    g.area = part.area.name;
    g.event = part.window.event_name;
    g.provenance = part.id();

    const auto it = part.day_index.find(day);
    if (it == part.day_index.end()) return g;
    const auto& idx = it->second;

    std::map<std::string, std::set<std::string>> sender_labels;
    for (auto i : idx) sender_labels[part.posts[i].post.user_id].insert(part.posts[i].label);

    auto target_persona = [&](const std::string& v) {
        const auto s = sender_labels.find(v);
        if (s != sender_labels.end() && s->second.size() == 1) {
            return PersonaNode{v, PersonaKind::sender, *s->second.begin()};
        }
        return PersonaNode{v, PersonaKind::receiver, {}};
    };

    struct PendingEdge {
        PersonaNode from, to;
        EdgeKind kind;
        const std::string* post_id;
    };
    std::set<PersonaNode> personas;
    std::vector<PendingEdge> pending;
    for (auto i : idx) {
        const auto& lp = part.posts[i];
        const auto& u = lp.post.user_id;
        PersonaNode sender{u, PersonaKind::sender, lp.label};
        personas.insert(sender);
        auto link = [&](const std::string& v, EdgeKind kind) {
            if (v.empty() || v == u) return;
            auto target = target_persona(v);
            personas.insert(target);
            pending.push_back({sender, std::move(target), kind, &lp.post.id});
        };
        if (lp.post.reply_to_user) link(*lp.post.reply_to_user, EdgeKind::reply);
        if (lp.post.retweet_of_user) link(*lp.post.retweet_of_user, EdgeKind::retweet);
        for (const auto& m : lp.post.mentions) link(m, EdgeKind::mention);
    }

    g.nodes.assign(personas.begin(), personas.end());
    auto index_of = [&](const PersonaNode& p) {
        return static_cast<std::size_t>(std::lower_bound(g.nodes.begin(), g.nodes.end(), p) - g.nodes.begin());
    };
    g.edges.reserve(pending.size());
    for (const auto& e : pending) g.edges.push_back({index_of(e.from), index_of(e.to), e.kind, *e.post_id});
    return g;
}

// Induced subgraph on the nodes with keep[i] set; node and edge order kept.
inline DailyGraph induced_subgraph(const DailyGraph& g, const std::vector<bool>& keep) {
    DailyGraph out;
    out.day = g.day;
    out.area = g.area;
    out.event = g.event;
    out.provenance = g.provenance;
    std::vector<std::size_t> remap(g.nodes.size(), SIZE_MAX);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!keep[i]) continue;
        remap[i] = out.nodes.size();
        out.nodes.push_back(g.nodes[i]);
    }
    for (const auto& e : g.edges) {
        if (remap[e.from] == SIZE_MAX || remap[e.to] == SIZE_MAX) continue;
        out.edges.push_back({remap[e.from], remap[e.to], e.kind, e.post_id});
    }
    return out;
}

struct FilterStats {
    std::size_t isolated_removed = 0;
    std::size_t orphan_receivers_removed = 0;
    std::size_t components_dropped = 0;
    std::size_t nodes_kept = 0;

    bool empty_result() const { return nodes_kept == 0; }
};

// Removes non-interacting personas and keeps the largest connected component.
// Ties: more sender personas, then smallest member user_id, then earliest node.
inline DailyGraph filter_graph(const DailyGraph& g, FilterStats* stats = nullptr) {
    FilterStats st;
    const auto edges = simple_edges(g);
    std::vector<std::size_t> degree(g.nodes.size(), 0);
    for (const auto& [a, b] : edges) {
        ++degree[a];
        ++degree[b];
    }
    std::vector<bool> keep(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        keep[i] = degree[i] > 0;
        if (!keep[i]) ++st.isolated_removed;
    }
    // Receivers whose every neighbor is gone.
    const auto adj = adjacency(g.nodes.size(), edges);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!keep[i] || g.nodes[i].is_sender()) continue;
        const bool any = std::any_of(adj[i].begin(), adj[i].end(), [&](std::size_t j) { return keep[j]; });
        if (!any) {
            keep[i] = false;
            ++st.orphan_receivers_removed;
        }
    }
    const DailyGraph interacting = induced_subgraph(g, keep);

    auto parts = connected_components(interacting);
    if (parts.empty()) {
        if (stats) *stats = st;
        return interacting;
    }
    struct Rank {
        std::size_t size, senders;
        const std::string* min_user;
        std::size_t first;
    };
    auto rank_of = [&](const std::vector<std::size_t>& part) {
        Rank r{part.size(), 0, &interacting.nodes[part.front()].user_id, part.front()};
        for (auto v : part) {
            if (interacting.nodes[v].is_sender()) ++r.senders;
            if (interacting.nodes[v].user_id < *r.min_user) r.min_user = &interacting.nodes[v].user_id;
        }
        return r;
    };
    auto better = [](const Rank& a, const Rank& b) {
        if (a.size != b.size) return a.size > b.size;
        if (a.senders != b.senders) return a.senders > b.senders;
        if (*a.min_user != *b.min_user) return *a.min_user < *b.min_user;
        return a.first < b.first;
    };
    std::size_t best = 0;
    Rank best_rank = rank_of(parts[0]);
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const auto r = rank_of(parts[p]);
        if (better(r, best_rank)) {
            best = p;
            best_rank = r;
        }
    }
    std::vector<bool> in_best(interacting.nodes.size(), false);
    for (auto v : parts[best]) in_best[v] = true;
    st.components_dropped = parts.size() - 1;
    st.nodes_kept = parts[best].size();
    if (stats) *stats = st;
    return induced_subgraph(interacting, in_best);
}

// ---------------------------------------------------------------------------
// Co-engagement projection
// ---------------------------------------------------------------------------

// Same-category sender personas, linked when they interact directly or share
// a neighbor on the day graph.
struct Projection {
    std::string category;
    std::vector<std::size_t> vertices;  // day-graph node indices, ascending
    std::vector<SimpleEdge> edges;      // local vertex positions, a < b, sorted

    std::size_t local_index(std::size_t node) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), node);
        if (it == vertices.end() || *it != node) throw std::out_of_range("node not in projection");
        return static_cast<std::size_t>(it - vertices.begin());
    }
};

inline Projection co_engagement_projection(const DailyGraph& g, const CategorySet& categories,
                                           const std::string& category) {
    categories.require(category);
    Projection pr;
    pr.category = category;
    std::vector<std::size_t> local(g.nodes.size(), SIZE_MAX);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].is_sender() && g.nodes[i].category == category) {
            local[i] = pr.vertices.size();
            pr.vertices.push_back(i);
        }
    }
    const auto edges = simple_edges(g);
    for (const auto& [a, b] : edges) {
        if (local[a] != SIZE_MAX && local[b] != SIZE_MAX) pr.edges.emplace_back(std::min(local[a], local[b]), std::max(local[a], local[b]));
    }
    const auto adj = adjacency(g.nodes.size(), edges);
    std::vector<std::size_t> members;
    for (std::size_t w = 0; w < g.nodes.size(); ++w) {
        members.clear();
        for (auto v : adj[w]) {
            if (local[v] != SIZE_MAX) members.push_back(local[v]);
        }
        for (std::size_t x = 0; x < members.size(); ++x) {
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                pr.edges.emplace_back(std::min(members[x], members[y]), std::max(members[x], members[y]));
            }
        }
    }
    std::sort(pr.edges.begin(), pr.edges.end());
    pr.edges.erase(std::unique(pr.edges.begin(), pr.edges.end()), pr.edges.end());
    return pr;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const DailyGraph& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        nlohmann::json j = {{"id", i}, {"user_id", n.user_id}, {"kind", to_string(n.kind)}};
        j["category"] = n.is_sender() ? nlohmann::json(n.category) : nlohmann::json(nullptr);
        nodes.push_back(std::move(j));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}, {"post_id", e.post_id}});
    }
    return {{"day", format_day(g.day)}, {"area", g.area},   {"event", g.event},
            {"provenance", g.provenance}, {"nodes", nodes}, {"edges", edges}};
}

inline constexpr const char* kReceiverColor = "#bdbdbd";

namespace detail {

inline std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

// Graphviz export: sender personas filled with their category color,
// receivers gray. `positions`, when given, are emitted as pinned coordinates.
inline std::string to_dot(const DailyGraph& g, const CategorySet& categories,
                          std::span<const std::pair<double, double>> positions = {},
                          const std::string& receiver_color = kReceiverColor, double scale = 10.0) {
    std::ostringstream out;
    out << "graph \"" << detail::dot_escape(g.provenance + "/" + format_day(g.day)) << "\" {\n";
    out << "  node [shape=circle, style=filled, fontsize=8];\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        std::string color = receiver_color;
        if (n.is_sender()) color = categories[categories.require(n.category)].color;
        out << "  n" << i << " [label=\"" << detail::dot_escape(n.user_id) << "\", fillcolor=\"" << color << "\"";
        if (n.is_sender()) out << ", category=\"" << detail::dot_escape(n.category) << "\"";
        if (i < positions.size()) {
            out << ", pos=\"" << fixed(positions[i].first * scale) << "," << fixed(positions[i].second * scale) << "!\"";
        }
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        out << "  n" << e.from << " -- n" << e.to << " [kind=" << to_string(e.kind) << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace dfa
