#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "dfa/pipeline.hpp"

namespace th {

inline dfa::Day day(const char* s) { return dfa::parse_day(s); }

// Noon of the given day, plus `offset` seconds.
inline std::int64_t at(const char* d, std::int64_t offset = 0) { return dfa::day_start_seconds(day(d)) + 43200 + offset; }

inline dfa::Post post(std::string id, std::string user, std::int64_t ts, std::optional<std::string> reply = std::nullopt,
                      std::vector<std::string> mentions = {}, std::optional<std::string> retweet = std::nullopt,
                      std::string area = "Testville", std::string text = "text") {
    dfa::Post p{std::move(id), std::move(user), ts, std::move(text), std::move(area), std::move(reply), std::move(retweet),
                std::move(mentions)};
    dfa::canonicalize(p);
    return p;
}

inline dfa::LabeledPost labeled(dfa::Post p, std::string label, double score = 1.0) {
    return {std::move(p), std::move(label), score};
}

inline dfa::EventWindow window(const char* event_day, int before = 1, int after = 1, std::string name = "event") {
    return {std::move(name), day(event_day), before, after};
}

inline dfa::AreaSpec area(std::string name = "Testville") { return {std::move(name), {}, std::nullopt, std::nullopt}; }

// Day graph for posts all on `d`, built in a window centered on it.
inline dfa::DailyGraph graph_on(const std::vector<dfa::LabeledPost>& posts, const char* d) {
    return dfa::build_day_graph(dfa::partition(posts, area(), window(d)), day(d));
}

// Compact labeled-post builder: user `u` with label `cat` replies to `to` on 2020-03-10.
struct Builder {
    std::vector<dfa::LabeledPost> posts;
    int next = 0;
    const char* d = "2020-03-10";

    Builder& reply(const std::string& u, const std::string& cat, const std::string& to) {
        const int n = next++;
        posts.push_back(labeled(post("p" + std::to_string(n), u, at(d, n), to), cat));
        return *this;
    }
    Builder& mention(const std::string& u, const std::string& cat, std::vector<std::string> to) {
        const int n = next++;
        posts.push_back(labeled(post("p" + std::to_string(n), u, at(d, n), std::nullopt, std::move(to)), cat));
        return *this;
    }
    Builder& retweet(const std::string& u, const std::string& cat, const std::string& to) {
        const int n = next++;
        posts.push_back(labeled(post("p" + std::to_string(n), u, at(d, n), std::nullopt, {}, to), cat));
        return *this;
    }
    Builder& alone(const std::string& u, const std::string& cat) {
        const int n = next++;
        posts.push_back(labeled(post("p" + std::to_string(n), u, at(d, n)), cat));
        return *this;
    }
    dfa::DailyGraph graph() const { return graph_on(posts, d); }
};

inline std::optional<std::size_t> find_node(const dfa::DailyGraph& g, const std::string& user, const std::string& cat = {}) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].user_id == user && g.nodes[i].category == cat) return i;
    }
    return std::nullopt;
}

inline dfa::CategorySet two_categories() { return dfa::CategorySet({{"racism", "#984ea3"}, {"sexism", "#e41a1c"}}); }

// Runs the analysis on a synthetic stream and lists every difference between
// recovered and planted communities (per day and category) and chain lifespans.
inline std::vector<std::string> recovery_mismatches(const dfa::SynthConfig& cfg, const dfa::SynthOutput& out,
                                                     const dfa::AnalysisParams& params = {}) {
    const auto a = dfa::analyze_partition(dfa::partition(out.posts, {cfg.area, {}, std::nullopt, std::nullopt}, cfg.window),
                                          cfg.categories, params);
    std::vector<std::string> issues;
    const auto truth = out.truth.by_day();
    for (const auto& da : a.days) {
        for (std::size_t c = 0; c < cfg.categories.size(); ++c) {
            const auto& label = cfg.categories[c].label;
            std::vector<std::vector<std::string>> got;
            for (const auto& cm : da.communities[c]) got.push_back(cm.members);
            std::vector<std::vector<std::string>> want;
            if (auto d = truth.find(da.day); d != truth.end()) {
                if (auto w = d->second.find(label); w != d->second.end()) want = w->second;
            }
            if (got != want) {
                issues.push_back(dfa::format_day(da.day) + " " + label + ": recovered " + std::to_string(got.size()) +
                                 " communities, planted " + std::to_string(want.size()));
            }
        }
    }
    std::vector<int> got_spans, want_spans = out.truth.lifespans();
    for (const auto& ch : a.chains) got_spans.push_back(static_cast<int>(ch.lifespan_days()));
    std::sort(got_spans.begin(), got_spans.end());
    std::sort(want_spans.begin(), want_spans.end());
    if (got_spans != want_spans) issues.push_back("chain lifespans differ from the planted schedule");
    return issues;
}

}  // namespace th
