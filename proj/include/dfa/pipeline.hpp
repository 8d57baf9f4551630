#pragma once

// Run configuration and the analyze/render output trees.
//
// Output layout, per (area, event) partition under <out>/<area-slug>__<event-slug>/:
//   graphs/<day>.json     filtered daily graph
//   communities.json      communities per day and category
//   chains.csv            category,start_day,lifespan,peak_size
//   report.json           fragmentation report
//   metrics/<name>.csv    day,value,defined
//   render/<day>.svg|dot  snapshots; render/montage.svg
// plus <out>/summary.json with per-partition corpus counts.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfa/analysis.hpp"
#include "dfa/categories.hpp"
#include "dfa/classify.hpp"
#include "dfa/common.hpp"
#include "dfa/ingest.hpp"
#include "dfa/render.hpp"
#include "dfa/report.hpp"
#include "dfa/synth.hpp"

namespace dfa {

namespace fs = std::filesystem;

struct Thresholds {
    double label = kDefaultLabelThreshold;
    std::size_t k_min = kDefaultMinCommunitySize;
    double theta = kDefaultJaccardThreshold;

    void validate() const {
        if (!(label > 0.0 && label <= 1.0)) throw ConfigError("thresholds.label must lie in (0, 1]");
        if (k_min < 1) throw ConfigError("thresholds.k_min must be at least 1");
        if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("thresholds.theta must lie in (0, 1]");
    }
};

struct Baseline {
    std::string name;
    std::map<std::string, std::size_t> counts;  // labeled posts per category
};

struct RunConfig {
    fs::path base_dir;  // relative paths resolve against this
    std::vector<AreaSpec> areas;
    std::vector<EventWindow> events;
    CategorySet categories = default_categories();
    std::string classifier_kind = "lexicon";
    fs::path lexicon_path;
    Thresholds thresholds;
    std::uint64_t seed = 1;
    nlohmann::json synth = nlohmann::json::object();
    nlohmann::json render = nlohmann::json::object();
    std::optional<Baseline> baseline;

    fs::path resolve(const fs::path& p) const { return p.is_absolute() || p.empty() ? p : base_dir / p; }
};

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read input file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write output file: " + path.string());
    out << content;
    if (!out) throw DataError("failed writing output file: " + path.string());
}

inline std::string slug(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            out += static_cast<char>(std::tolower(c));
        } else if (!out.empty() && out.back() != '-') {
            out += '-';
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "x" : out;
}

inline std::string partition_dir(const AreaSpec& area, const EventWindow& w) { return slug(area.name) + "__" + slug(w.event_name); }

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

inline RunConfig config_from_json(const nlohmann::json& j, fs::path base_dir = {}) {
    RunConfig cfg;
    cfg.base_dir = std::move(base_dir);
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    try {
        for (const auto& a : j.value("areas", nlohmann::json::array())) {
            AreaSpec area;
            area.name = a.at("name").get<std::string>();
            area.aliases = a.value("aliases", std::vector<std::string>{});
            if (a.contains("country")) area.country = a.at("country").get<std::string>();
            if (a.contains("language")) area.language = a.at("language").get<std::string>();
            cfg.areas.push_back(normalized(area));
        }
        for (const auto& e : j.value("events", nlohmann::json::array())) {
            EventWindow w;
            w.event_name = e.at("name").get<std::string>();
            try {
                w.event_date = parse_day(e.at("date").get<std::string>());
            } catch (const DataError& err) {
                throw ConfigError(std::string("event '") + w.event_name + "': " + err.what());
            }
            w.delta_before = e.value("delta_before", w.delta_before);
            w.delta_after = e.value("delta_after", w.delta_after);
            w.validate();
            cfg.events.push_back(std::move(w));
        }
        if (j.contains("categories")) {
            std::vector<Category> cats;
            for (const auto& c : j.at("categories")) cats.push_back({c.at("label").get<std::string>(), c.at("color").get<std::string>()});
            cfg.categories = CategorySet(std::move(cats));
        }
        if (j.contains("classifier")) {
            const auto& c = j.at("classifier");
            cfg.classifier_kind = c.value("kind", cfg.classifier_kind);
            cfg.lexicon_path = c.value("path", std::string{});
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            cfg.thresholds.label = t.value("label", cfg.thresholds.label);
            cfg.thresholds.k_min = t.value("k_min", cfg.thresholds.k_min);
            cfg.thresholds.theta = t.value("theta", cfg.thresholds.theta);
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.synth = j.value("synth", nlohmann::json::object());
        cfg.render = j.value("render", nlohmann::json::object());
        if (j.contains("historical_baseline")) {
            const auto& b = j.at("historical_baseline");
            cfg.baseline = Baseline{b.value("name", std::string("baseline")), b.at("counts").get<std::map<std::string, std::size_t>>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    if (cfg.classifier_kind != "lexicon") throw ConfigError("classifier.kind must be \"lexicon\"");
    cfg.thresholds.validate();
    if (cfg.baseline) {
        for (const auto& [cat, n] : cfg.baseline->counts) {
            if (!cfg.categories.contains(cat)) throw ConfigError("historical_baseline: unknown category '" + cat + "'");
        }
    }
    return cfg;
}

inline RunConfig load_config(const fs::path& path) {
    const auto text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("configuration " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

inline LexiconClassifier load_classifier(const RunConfig& cfg, const fs::path& override_path = {}) {
    const auto path = override_path.empty() ? cfg.resolve(cfg.lexicon_path) : override_path;
    if (path.empty()) throw ConfigError("no lexicon path configured (classifier.path or --lexicon)");
    std::istringstream in(read_file(path));
    return LexiconClassifier(cfg.categories, Lexicon::load(in));
}

inline SynthConfig synth_config(const RunConfig& cfg) {
    if (cfg.events.empty()) throw ConfigError("synth needs at least one event to define the window");
    auto s = synth_config_from_json(cfg.synth, cfg.events.front(), cfg.categories);
    if (!cfg.synth.contains("seed")) s.seed = cfg.seed;
    if (!cfg.synth.contains("area") && !cfg.areas.empty()) s.area = cfg.areas.front().name;
    if (!cfg.synth.contains("k_min")) s.k_min = std::max<std::size_t>(cfg.thresholds.k_min, 3);
    return s;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

template <typename T>
ParseResult<T> read_records(const fs::path& path) {
    std::istringstream in(read_file(path));
    if constexpr (std::is_same_v<T, LabeledPost>) {
        return parse_labeled_records(in, format_from_path(path.string()));
    } else {
        return parse_records(in, format_from_path(path.string()));
    }
}

inline std::string records_text(const std::vector<LabeledPost>& posts, RecordFormat format) {
    std::ostringstream out;
    write_records(out, posts, format);
    return out.str();
}

// ---------------------------------------------------------------------------
// Analyze
// ---------------------------------------------------------------------------

inline CategoryDistribution baseline_distribution(const Baseline& b, const CategorySet& categories) {
    std::vector<std::size_t> counts(categories.size(), 0);
    for (const auto& [cat, n] : b.counts) counts[*categories.index_of(cat)] = n;
    return distribution_from_counts(categories, counts);
}

struct PartitionOutput {
    std::string dir;  // relative to the output root
    FragmentationReport report;
    PartitionAnalysis analysis;
};

// Partitions are (area, event) pairs in config order. Each is compared with
// the previous event (by date) of the same area and with the configured
// baseline.
inline std::vector<PartitionOutput> run_analysis(const RunConfig& cfg, const std::vector<LabeledPost>& posts) {
    if (cfg.areas.empty() || cfg.events.empty()) throw ConfigError("configuration needs at least one area and one event");
    std::vector<PartitionOutput> out;
    for (const auto& area : cfg.areas) {
        std::vector<std::size_t> order(cfg.events.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return cfg.events[a].event_date < cfg.events[b].event_date; });
        std::map<std::size_t, CategoryDistribution> overall;
        std::map<std::size_t, PartitionOutput> by_event;
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            const auto& w = cfg.events[order[rank]];
            auto analysis = analyze_partition(partition(posts, area, w), cfg.categories,
                                              {cfg.thresholds.k_min, cfg.thresholds.theta});
            std::vector<std::pair<std::string, CategoryDistribution>> refs;
            if (rank > 0) {
                const auto& prev = cfg.events[order[rank - 1]];
                refs.emplace_back("previous_event:" + prev.event_name, overall.at(order[rank - 1]));
            }
            if (cfg.baseline) refs.emplace_back("baseline:" + cfg.baseline->name, baseline_distribution(*cfg.baseline, cfg.categories));
            auto report = build_report(analysis, cfg.categories, refs);
            overall[order[rank]] = report.overall;
            by_event[order[rank]] = {partition_dir(area, w), std::move(report), std::move(analysis)};
        }
        for (auto& [idx, po] : by_event) out.push_back(std::move(po));
    }
    return out;
}

// Every file of the analyze tree, keyed by path relative to the output root.
inline std::map<std::string, std::string> analysis_files(const RunConfig& cfg, const std::vector<PartitionOutput>& parts) {
    std::map<std::string, std::string> files;
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& po : parts) {
        const auto& a = po.analysis;
        const std::string root = po.dir + "/";
        nlohmann::json comms = nlohmann::json::array();
        for (const auto& d : a.days) {
            files[root + "graphs/" + format_day(d.day) + ".json"] = to_json(d.graph).dump(2) + "\n";
            nlohmann::json by_cat = nlohmann::json::object();
            for (std::size_t c = 0; c < cfg.categories.size(); ++c) {
                nlohmann::json list = nlohmann::json::array();
                for (const auto& cm : d.communities[c]) list.push_back(to_json(cm));
                by_cat[cfg.categories[c].label] = list;
            }
            comms.push_back({{"day", format_day(d.day)},
                             {"filter", {{"isolated_removed", d.filter.isolated_removed},
                                         {"orphan_receivers_removed", d.filter.orphan_receivers_removed},
                                         {"components_dropped", d.filter.components_dropped},
                                         {"nodes_kept", d.filter.nodes_kept}}},
                             {"communities", by_cat}});
        }
        nlohmann::json chains = nlohmann::json::array();
        for (const auto& ch : a.chains) chains.push_back(to_json(ch));
        files[root + "communities.json"] = nlohmann::json{{"days", comms}, {"chains", chains}}.dump(2) + "\n";
        std::ostringstream csv;
        write_chains_csv(csv, a.chains);
        files[root + "chains.csv"] = csv.str();
        files[root + "report.json"] = to_json(po.report).dump(2) + "\n";
        for (const auto& [name, series] : scalar_series(po.report)) {
            std::ostringstream s;
            write_series_csv(s, series);
            files[root + "metrics/" + name + ".csv"] = s.str();
        }
        summary.push_back({{"dir", po.dir},
                           {"area", po.report.area},
                           {"event", po.report.event},
                           {"posts", po.report.post_count},
                           {"chains", a.chains.size()}});
    }
    files["summary.json"] = summary.dump(2) + "\n";
    return files;
}

inline void write_tree(const fs::path& out_dir, const std::map<std::string, std::string>& files) {
    for (const auto& [rel, content] : files) write_file(out_dir / rel, content);
}

// ---------------------------------------------------------------------------
// Render
// ---------------------------------------------------------------------------

enum class RenderFormat { svg, dot };

struct RenderRequest {
    std::optional<Day> day;  // one snapshot; otherwise the montage
    RenderFormat format = RenderFormat::svg;
};

// Layout seed for one day: the run seed mixed with the day number.
inline std::uint64_t layout_seed(std::uint64_t seed, Day day) {
    return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(day.time_since_epoch().count());
}

inline std::map<std::string, std::string> render_files(const RunConfig& cfg, const std::vector<LabeledPost>& posts,
                                                       const RenderRequest& req) {
    if (cfg.areas.empty() || cfg.events.empty()) throw ConfigError("configuration needs at least one area and one event");
    const auto style = style_from_json(cfg.render, cfg.categories);
    std::map<std::string, std::string> files;
    for (const auto& area : cfg.areas) {
        for (const auto& w : cfg.events) {
            const auto part = partition(posts, area, w);
            const std::string root = partition_dir(area, w) + "/render/";
            std::vector<Day> days;
            if (req.day) {
                if (!w.contains(*req.day)) continue;
                days.push_back(*req.day);
            } else {
                days = w.days();
            }
            std::vector<Panel> panels(days.size());
            std::vector<std::string> singles(days.size());
            parallel_for(days.size(), [&](std::size_t i) {
                const auto g = filter_graph(build_day_graph(part, days[i]));
                const auto lay = layout(g, layout_seed(cfg.seed, days[i]), style.layout);
                panels[i] = {days[i], snapshot_body(g, lay, style)};
                if (req.day) singles[i] = req.format == RenderFormat::dot ? emit_dot(g, lay, style) : emit_snapshot(g, lay, style);
            });
            if (req.day) {
                files[root + format_day(*req.day) + (req.format == RenderFormat::dot ? ".dot" : ".svg")] = singles[0];
            } else {
                files[root + "montage.svg"] = montage(std::move(panels), style);
            }
        }
    }
    if (req.day && files.empty()) throw ConfigError("day " + format_day(*req.day) + " is outside every configured event window");
    return files;
}

}  // namespace dfa
