#pragma once

// FragmentationReport: every metric series for one (area, event) partition,
// keyed to the fourteen analytical elements.

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dfa/analysis.hpp"
#include "dfa/categories.hpp"
#include "dfa/community.hpp"
#include "dfa/metrics.hpp"

namespace dfa {

struct OpinionEntry {
    std::size_t community_count = 0;
    std::size_t members_in_communities = 0;
    std::size_t largest_community = 0;
    Metric share_in_communities;  // 1 - scatter
};

struct CohesivenessRow {
    Day day{};
    std::string community_id;
    std::string category;
    std::size_t size = 0;
    Cohesiveness value;
};

struct DayReport {
    Day day{};
    std::size_t graph_nodes = 0;
    std::size_t graph_edges = 0;
    CategoryDistribution dominance;
    EiResult polarization;
    std::vector<EiResult> polarization_by_category;
    Segmentation segmentation;
    std::vector<Metric> scatter;          // per category
    std::vector<OpinionEntry> opinion;    // per category
    InfluencerTable influencers;
};

struct NamedComparison {
    std::string name;
    std::string from;
    std::string to;
    DistributionComparison comparison;
};

struct ChainGrowth {
    std::string category;
    Day start_day{};
    std::size_t lifespan = 0;
    std::vector<std::size_t> sizes;
    Metric growth_rate;
};

struct FragmentationReport {
    std::string area;
    std::string event;
    EventWindow window;
    std::vector<std::string> categories;
    std::size_t post_count = 0;
    CategoryDistribution overall;
    std::vector<DayReport> days;
    std::vector<CohesivenessRow> cohesiveness;
    LifespanStats lifespans;
    std::vector<ChainGrowth> chain_growth;
    std::vector<Reaction> reaction;  // per category
    std::vector<NamedComparison> comparisons;
};

// The fourteen analytical elements and the report fields serving each.
struct ElementSpec {
    const char* key;
    std::array<const char*, 3> fields;
};

inline constexpr std::array<ElementSpec, 14> kElements = {{
    {"content_focus", {"dominance", "overall_distribution", nullptr}},
    {"societal_discourse_themes", {"dominance", "comparisons", nullptr}},
    {"cultural_societal_trends", {"dominance", "comparisons", nullptr}},
    {"relational_dynamics", {"relational", nullptr, nullptr}},
    {"influential_participants", {"influencers", nullptr, nullptr}},
    {"opinion_formation", {"opinion", nullptr, nullptr}},
    {"polarization", {"polarization", nullptr, nullptr}},
    {"segmentation", {"segmentation", nullptr, nullptr}},
    {"ephemerality", {"lifespans", nullptr, nullptr}},
    {"historical_comparisons", {"comparisons", nullptr, nullptr}},
    {"reaction", {"reaction", nullptr, nullptr}},
    {"dominance", {"dominance", nullptr, nullptr}},
    {"diversity_echo_chambers", {"diversity", "chain_growth", nullptr}},
    {"cohesiveness", {"cohesiveness", nullptr, nullptr}},
}};

// `references` are named distributions (an earlier event, a historical
// baseline) that the partition's overall distribution is compared against.
inline FragmentationReport build_report(const PartitionAnalysis& analysis, const CategorySet& categories,
                                        const std::vector<std::pair<std::string, CategoryDistribution>>& references = {}) {
    const auto& part = analysis.partition;
    FragmentationReport r;
    r.area = part.area.name;
    r.event = part.window.event_name;
    r.window = part.window;
    r.categories = categories.labels();
    r.post_count = part.posts.size();

    std::vector<std::size_t> all(part.posts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    r.overall = distribution_of(part, categories, all);

    const auto dominance = dominance_series(part, categories);
    if (dominance.size() != analysis.days.size()) throw std::logic_error("analysis does not cover the window");

    for (std::size_t d = 0; d < analysis.days.size(); ++d) {
        const auto& da = analysis.days[d];
        DayReport day;
        day.day = da.day;
        day.graph_nodes = da.graph.nodes.size();
        day.graph_edges = da.graph.edges.size();
        day.dominance = dominance[d].distribution;
        day.polarization = ei_index(da.graph);
        day.segmentation = segmentation(da.graph, categories, da.communities);
        day.influencers = influencers_and_degrees(da.graph);
        for (std::size_t c = 0; c < categories.size(); ++c) {
            const auto& label = categories[c].label;
            day.polarization_by_category.push_back(ei_index(da.graph, label));
            const auto& comms = da.communities[c];
            const Metric scatter = scatter_ratio(da.graph, label, comms);
            day.scatter.push_back(scatter);
            OpinionEntry op;
            op.community_count = comms.size();
            for (const auto& cm : comms) {
                op.members_in_communities += cm.size();
                op.largest_community = std::max(op.largest_community, cm.size());
                r.cohesiveness.push_back({da.day, cm.id, label, cm.size(), cohesiveness(cm, da.projections[c], da.graph)});
            }
            if (scatter.defined) op.share_in_communities = Metric::of(1.0 - scatter.value);
            day.opinion.push_back(op);
        }
        r.days.push_back(std::move(day));
    }

    r.lifespans = lifespan_stats(analysis.chains);
    for (const auto& ch : analysis.chains) {
        ChainGrowth g{ch.category, ch.start_day(), ch.lifespan_days(), {}, ch.growth_rate()};
        for (const auto& c : ch.links) g.sizes.push_back(c.size());
        r.chain_growth.push_back(std::move(g));
    }
    for (const auto& cat : categories) r.reaction.push_back(reaction_index(dominance, part.window, cat.label));

    // Pre-event vs post-event within the window, then external references.
    std::vector<std::size_t> pre, post;
    for (std::size_t i = 0; i < part.posts.size(); ++i) {
        (part.posts[i].post.day() < part.window.event_date ? pre : post).push_back(i);
    }
    const auto pre_dist = distribution_of(part, categories, pre);
    const auto post_dist = distribution_of(part, categories, post);
    if (!pre_dist.empty() && !post_dist.empty()) {
        r.comparisons.push_back({"pre_vs_post_event", "pre_event", "post_event", compare_distributions(pre_dist, post_dist)});
    }
    if (!r.overall.empty()) {
        for (const auto& [name, ref] : references) {
            if (ref.empty()) continue;
            r.comparisons.push_back({name, name, "this_event", compare_distributions(ref, r.overall)});
        }
    }
    return r;
}

// Whether each element has at least one defined value behind it.
inline std::map<std::string, bool> element_coverage(const FragmentationReport& r) {
    auto any_day = [&](auto pred) { return std::any_of(r.days.begin(), r.days.end(), pred); };
    std::map<std::string, bool> field;
    field["dominance"] = any_day([](const DayReport& d) { return !d.dominance.empty(); });
    field["overall_distribution"] = !r.overall.empty();
    field["comparisons"] = !r.comparisons.empty();
    field["relational"] = any_day([](const DayReport& d) { return d.graph_edges > 0; });
    field["influencers"] = any_day([](const DayReport& d) { return !d.influencers.top_senders.empty(); });
    field["opinion"] = any_day([](const DayReport& d) {
        return std::any_of(d.opinion.begin(), d.opinion.end(), [](const OpinionEntry& o) { return o.share_in_communities.defined; });
    });
    field["polarization"] = any_day([](const DayReport& d) { return d.polarization.ei().defined; });
    field["diversity"] = field["polarization"];
    field["segmentation"] = any_day([](const DayReport& d) { return d.segmentation.modularity.defined; });
    field["lifespans"] = r.lifespans.chain_count > 0;
    field["chain_growth"] = std::any_of(r.chain_growth.begin(), r.chain_growth.end(),
                                        [](const ChainGrowth& g) { return g.growth_rate.defined; });
    field["reaction"] = std::any_of(r.reaction.begin(), r.reaction.end(), [](const Reaction& x) { return x.value.defined; });
    field["cohesiveness"] = !r.cohesiveness.empty();

    std::map<std::string, bool> out;
    for (const auto& e : kElements) {
        bool ok = false;
        for (const char* f : e.fields) {
            if (f && field.at(f)) ok = true;
        }
        out[e.key] = ok;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json by_category(const std::vector<std::string>& labels, auto&& value_of) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) j[labels[i]] = value_of(i);
    return j;
}

inline nlohmann::json ei_json(const EiResult& e) {
    return {{"internal", e.internal}, {"external", e.external}, {"ei", metric_to_json(e.ei())}};
}

inline nlohmann::json persona_json(const RankedPersona& p) {
    nlohmann::json j = {{"user_id", p.user_id}, {"degree", p.degree}};
    if (!p.category.empty()) j["category"] = p.category;
    return j;
}

}  // namespace detail

inline nlohmann::json to_json(const CategoryDistribution& d) {
    return {{"sample_count", d.sample_count},
            {"empty", d.empty()},
            {"shares", detail::by_category(d.labels, [&](std::size_t i) { return d.shares[i]; })}};
}

inline nlohmann::json to_json(const DistributionComparison& c) {
    return {{"deltas", detail::by_category(c.labels, [&](std::size_t i) { return c.deltas[i]; })},
            {"rank_from", detail::by_category(c.labels, [&](std::size_t i) { return c.rank_from[i]; })},
            {"rank_to", detail::by_category(c.labels, [&](std::size_t i) { return c.rank_to[i]; })},
            {"total_variation", c.total_variation}};
}

inline nlohmann::json to_json(const FragmentationReport& r) {
    using nlohmann::json;
    const auto& L = r.categories;
    json dominance = json::array(), polarization = json::array(), diversity = json::array(),
         segmentation = json::array(), opinion = json::array(), scatter = json::array(),
         influencers = json::array(), relational = json::array();
    for (const auto& d : r.days) {
        const auto day = format_day(d.day);
        json dj = to_json(d.dominance);
        dj["day"] = day;
        dominance.push_back(std::move(dj));

        json pj = detail::ei_json(d.polarization);
        pj["day"] = day;
        pj["by_category"] = detail::by_category(L, [&](std::size_t i) { return detail::ei_json(d.polarization_by_category[i]); });
        polarization.push_back(std::move(pj));

        diversity.push_back({{"day", day}, {"cross_category_fraction", metric_to_json(d.polarization.diversity())}});
        segmentation.push_back({{"day", day},
                                {"community_counts", detail::by_category(L, [&](std::size_t i) { return d.segmentation.community_counts[i]; })},
                                {"modularity", metric_to_json(d.segmentation.modularity)}});
        opinion.push_back({{"day", day}, {"by_category", detail::by_category(L, [&](std::size_t i) {
                                              const auto& o = d.opinion[i];
                                              return json{{"community_count", o.community_count},
                                                          {"members_in_communities", o.members_in_communities},
                                                          {"largest_community", o.largest_community},
                                                          {"share_in_communities", metric_to_json(o.share_in_communities)}};
                                          })}});
        scatter.push_back({{"day", day}, {"by_category", detail::by_category(L, [&](std::size_t i) { return metric_to_json(d.scatter[i]); })}});

        json top_s = json::array(), top_r = json::array();
        for (const auto& p : d.influencers.top_senders) top_s.push_back(detail::persona_json(p));
        for (const auto& p : d.influencers.top_receivers) top_r.push_back(detail::persona_json(p));
        influencers.push_back({{"day", day}, {"top_senders", top_s}, {"top_receivers", top_r}});

        json hist = json::object();
        for (const auto& [deg, n] : d.influencers.degree_histogram) hist[std::to_string(deg)] = n;
        relational.push_back({{"day", day},
                              {"nodes", d.graph_nodes},
                              {"edges", d.graph_edges},
                              {"degree_histogram", hist},
                              {"edge_kind_counts", d.influencers.edge_kind_counts},
                              {"edge_kind_shares", d.influencers.edge_kind_shares()}});
    }

    json cohesive = json::array();
    for (const auto& c : r.cohesiveness) {
        cohesive.push_back({{"day", format_day(c.day)},
                            {"community", c.community_id},
                            {"category", c.category},
                            {"size", c.size},
                            {"internal_density", c.value.internal_density},
                            {"conductance", metric_to_json(c.value.conductance)}});
    }
    json growth = json::array();
    for (const auto& g : r.chain_growth) {
        growth.push_back({{"category", g.category},
                          {"start_day", format_day(g.start_day)},
                          {"lifespan", g.lifespan},
                          {"sizes", g.sizes},
                          {"growth_rate", metric_to_json(g.growth_rate)}});
    }
    json reaction = detail::by_category(L, [&](std::size_t i) {
        const auto& x = r.reaction[i];
        json j = metric_to_json(x.value);
        j["raw"] = x.value.defined ? json(x.raw) : json(nullptr);
        j["saturated"] = x.saturated;
        j["pre_mean"] = metric_to_json(x.pre_mean);
        j["post_mean"] = metric_to_json(x.post_mean);
        return j;
    });
    json comparisons = json::array();
    for (const auto& c : r.comparisons) {
        json j = to_json(c.comparison);
        j["name"] = c.name;
        j["from"] = c.from;
        j["to"] = c.to;
        comparisons.push_back(std::move(j));
    }

    const auto coverage = element_coverage(r);
    json elements = json::object();
    for (const auto& e : kElements) {
        json fields = json::array();
        for (const char* f : e.fields) {
            if (f) fields.push_back(f);
        }
        elements[e.key] = {{"fields", fields}, {"populated", coverage.at(e.key)}};
    }

    return {{"area", r.area},
            {"event", r.event},
            {"window",
             {{"event_date", format_day(r.window.event_date)},
              {"first_day", format_day(r.window.first_day())},
              {"last_day", format_day(r.window.last_day())},
              {"delta_before", r.window.delta_before},
              {"delta_after", r.window.delta_after}}},
            {"categories", L},
            {"post_count", r.post_count},
            {"overall_distribution", to_json(r.overall)},
            {"dominance", dominance},
            {"polarization", polarization},
            {"diversity", diversity},
            {"segmentation", segmentation},
            {"opinion", opinion},
            {"scatter", scatter},
            {"influencers", influencers},
            {"relational", relational},
            {"cohesiveness", cohesive},
            {"lifespans", to_json(r.lifespans)},
            {"chain_growth", growth},
            {"reaction", reaction},
            {"comparisons", comparisons},
            {"elements", elements}};
}

// One scalar series as CSV: day,value,defined (value empty when undefined).
inline void write_series_csv(std::ostream& out, const std::vector<std::pair<Day, Metric>>& series) {
    out << "day,value,defined\n";
    for (const auto& [day, m] : series) {
        out << format_day(day) << ',';
        if (m.defined) out << nlohmann::json(m.value).dump();
        out << ',' << (m.defined ? "true" : "false") << '\n';
    }
}

// Scalar series exported to metrics/*.csv, keyed by file stem.
inline std::vector<std::pair<std::string, std::vector<std::pair<Day, Metric>>>> scalar_series(const FragmentationReport& r) {
    std::vector<std::pair<std::string, std::vector<std::pair<Day, Metric>>>> out;
    auto add = [&](std::string name, auto&& value_of) {
        std::vector<std::pair<Day, Metric>> s;
        for (const auto& d : r.days) s.emplace_back(d.day, value_of(d));
        out.emplace_back(std::move(name), std::move(s));
    };
    add("ei_index", [](const DayReport& d) { return d.polarization.ei(); });
    add("diversity", [](const DayReport& d) { return d.polarization.diversity(); });
    add("modularity", [](const DayReport& d) { return d.segmentation.modularity; });
    for (std::size_t c = 0; c < r.categories.size(); ++c) {
        const auto& label = r.categories[c];
        add("dominance_" + label, [c](const DayReport& d) {
            return d.dominance.empty() ? Metric::undefined() : Metric::of(d.dominance.shares[c]);
        });
        add("community_count_" + label,
            [c](const DayReport& d) { return Metric::of(static_cast<double>(d.segmentation.community_counts[c])); });
        add("scatter_" + label, [c](const DayReport& d) { return d.scatter[c]; });
        add("ei_index_" + label, [c](const DayReport& d) { return d.polarization_by_category[c].ei(); });
    }
    return out;
}

}  // namespace dfa
