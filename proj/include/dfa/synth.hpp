#pragma once

// Synthetic labeled post streams with planted communities and exact ground
// truth.
//
// Each planted community has hub users that never post. Every member posts
// once per active day, replying to the first hub (and mentioning another hub
// when there are several), so the members form one connected group in the
// co-engagement projection. Optionally each member also mentions the next
// member, which gives same-category sender-sender edges.
//
// To keep all of a day's communities in one connected component, consecutive
// hubs are joined by short chains of "bridge" posts through dedicated
// receivers. A bridge never shares a category with the hub it touches, and at
// most two same-category bridges are ever adjacent, so bridges never form a
// community when k_min >= 3.
//
// Random numbers come from std::mt19937_64 seeded with `seed`, consumed in a
// fixed order: per day, community churn, then member timestamps, then cross
// posts, then noise posts, then bridge timestamps.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfa/categories.hpp"
#include "dfa/common.hpp"
#include "dfa/ingest.hpp"

namespace dfa {

struct PlantedCommunity {
    std::string category;
    std::size_t size = 4;
    int birth_day = 0;  // offset from the window's first day
    int lifespan = 1;
    double overlap = 0.8;  // minimum Jaccard between consecutive days
    std::size_t hub_count = 1;
    int growth = 0;  // members added (or removed, if negative) per day
};

struct SynthConfig {
    std::uint64_t seed = 1;
    std::string area = "Synthetic City";
    EventWindow window;
    CategorySet categories;
    std::vector<PlantedCommunity> communities;
    double noise_rate = 0.0;  // noise posts per day
    std::size_t noise_users = 200;
    double cross_edge_rate = 0.0;  // cross-category member mentions per day
    bool intra_mentions = true;
    std::size_t k_min = 3;
};

struct PlantedRecord {
    std::string id;
    std::string category;
    Day birth{};
    int lifespan = 0;
    std::vector<std::string> hubs;
    std::vector<std::vector<std::string>> members_by_day;  // sorted
};

struct PlantedTruth {
    std::vector<PlantedRecord> communities;

    // day -> category -> sorted member sets (sorted by size desc, then first member)
    std::map<Day, std::map<std::string, std::vector<std::vector<std::string>>>> by_day() const {
        std::map<Day, std::map<std::string, std::vector<std::vector<std::string>>>> out;
        for (const auto& c : communities) {
            for (int k = 0; k < c.lifespan; ++k) {
                out[c.birth + std::chrono::days{k}][c.category].push_back(c.members_by_day[static_cast<std::size_t>(k)]);
            }
        }
        for (auto& [day, cats] : out) {
            for (auto& [cat, sets] : cats) {
                std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
                    if (a.size() != b.size()) return a.size() > b.size();
                    return a.front() < b.front();
                });
            }
        }
        return out;
    }

    std::vector<int> lifespans() const {
        std::vector<int> out;
        for (const auto& c : communities) out.push_back(c.lifespan);
        return out;
    }
};

struct SynthOutput {
    std::vector<LabeledPost> posts;
    PlantedTruth truth;
};

// Words used to write post text. Each built-in word is a weight-1 term of the
// bundled lexicon for its category; other categories use their own label.
inline std::vector<std::string> synth_keywords(const std::string& category) {
    static const std::map<std::string, std::vector<std::string>> kWords = {
        {"sexism", {"misogyny", "sexist", "misogynist"}},
        {"racism", {"racist", "racial", "supremacist"}},
        {"xenophobia", {"immigrants", "foreigners", "xenophobic"}},
        {"ableism", {"ableist", "disabled", "handicapped"}},
        {"homophobia", {"homophobic", "gays", "lesbians"}},
        {"religious_intolerance", {"infidels", "heathens", "blasphemers"}},
    };
    if (auto it = kWords.find(category); it != kWords.end()) return it->second;
    return {category};
}

inline const std::vector<std::string>& synth_filler() {
    static const std::vector<std::string> kFiller = {"today", "downtown", "thread", "people", "news", "again",
                                                     "street", "tonight", "everyone", "city"};
    return kFiller;
}

namespace detail {

inline std::size_t max_churn(std::size_t prev, std::size_t next, double overlap) {
    // Largest r with (common) / (union) >= overlap, where r members are
    // swapped on top of the size change.
    const std::size_t removed_for_size = prev > next ? prev - next : 0;
    const std::size_t added_for_size = next > prev ? next - prev : 0;
    std::size_t best = SIZE_MAX;
    for (std::size_t r = 0; r + removed_for_size <= prev; ++r) {
        const double common = static_cast<double>(prev - removed_for_size - r);
        const double uni = static_cast<double>(prev + added_for_size + r);
        if (common / uni + 1e-12 >= overlap) {
            best = r;
        } else {
            break;
        }
    }
    return best;
}

}  // namespace detail

inline void validate(const SynthConfig& cfg) {
    cfg.window.validate();
    if (cfg.categories.empty()) throw ConfigError("synth: category set is empty");
    if (cfg.k_min < 3) throw ConfigError("synth: k_min must be at least 3 so bridge posts never form communities");
    const auto days = static_cast<int>(cfg.window.day_count());
    for (std::size_t i = 0; i < cfg.communities.size(); ++i) {
        const auto& c = cfg.communities[i];
        const std::string name = "planted community #" + std::to_string(i) + " (" + c.category + ")";
        if (!cfg.categories.contains(c.category)) throw ConfigError(name + ": category not in the category set");
        if (c.lifespan < 1) throw ConfigError(name + ": lifespan must be at least 1");
        if (c.birth_day < 0 || c.birth_day + c.lifespan > days) {
            throw ConfigError(name + ": schedule does not fit inside the " + std::to_string(days) + "-day window");
        }
        if (c.hub_count < 1) throw ConfigError(name + ": needs at least one hub");
        if (!(c.overlap >= 0.8 && c.overlap <= 1.0)) throw ConfigError(name + ": overlap must lie in [0.8, 1]");
        for (int k = 0; k < c.lifespan; ++k) {
            const long long n = static_cast<long long>(c.size) + static_cast<long long>(k) * c.growth;
            if (n < static_cast<long long>(cfg.k_min)) {
                throw ConfigError(name + ": size on day " + std::to_string(k) + " falls below k_min");
            }
            if (k > 0) {
                const auto prev = static_cast<std::size_t>(n - c.growth);
                if (detail::max_churn(prev, static_cast<std::size_t>(n), c.overlap) == SIZE_MAX) {
                    throw ConfigError(name + ": growth too fast for the required day-to-day overlap");
                }
            }
        }
    }
    if (cfg.noise_rate < 0.0 || cfg.cross_edge_rate < 0.0) throw ConfigError("synth: rates must be non-negative");
    if (cfg.noise_rate > 0.0 && cfg.noise_users < 2) throw ConfigError("synth: noise needs at least two noise users");
}

inline SynthOutput generate(const SynthConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    SynthOutput out;
    const auto days = cfg.window.days();

    struct Draft {
        std::int64_t created_at;
        std::string user;
        std::string label;
        std::string text;
        std::optional<std::string> reply_to;
        std::vector<std::string> mentions;
    };
    std::vector<Draft> drafts;

    auto text_for = [&](const std::string& category) {
        const auto words = synth_keywords(category);
        const auto& filler = synth_filler();
        return words[rng.below(words.size())] + " " + filler[rng.below(filler.size())] + " " +
               filler[rng.below(filler.size())];
    };
    auto timestamp = [&](Day d) { return day_start_seconds(d) + 1 + static_cast<std::int64_t>(rng.below(kSecondsPerDay - 2)); };

    // Current member lists (insertion order) and fresh-member counters.
    std::vector<std::vector<std::string>> members(cfg.communities.size());
    std::vector<std::size_t> next_member(cfg.communities.size(), 0);
    for (std::size_t i = 0; i < cfg.communities.size(); ++i) {
        const auto& c = cfg.communities[i];
        PlantedRecord rec;
        rec.id = "planted-" + std::to_string(i);
        rec.category = c.category;
        rec.birth = cfg.window.first_day() + std::chrono::days{c.birth_day};
        rec.lifespan = c.lifespan;
        for (std::size_t h = 0; h < c.hub_count; ++h) rec.hubs.push_back("c" + std::to_string(i) + "h" + std::to_string(h));
        out.truth.communities.push_back(std::move(rec));
    }
    auto fresh = [&](std::size_t i) { return "c" + std::to_string(i) + "u" + std::to_string(next_member[i]++); };

    for (std::size_t d = 0; d < days.size(); ++d) {
        const Day day = days[d];
        const int offset = static_cast<int>(d);

        // Membership for the day.
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < cfg.communities.size(); ++i) {
            const auto& c = cfg.communities[i];
            if (offset < c.birth_day || offset >= c.birth_day + c.lifespan) continue;
            active.push_back(i);
            const int age = offset - c.birth_day;
            const auto target = static_cast<std::size_t>(static_cast<long long>(c.size) + static_cast<long long>(age) * c.growth);
            auto& m = members[i];
            if (age == 0) {
                while (m.size() < target) m.push_back(fresh(i));
            } else {
                const auto prev = m.size();
                const auto churn = detail::max_churn(prev, target, c.overlap);
                const auto drop = churn + (prev > target ? prev - target : 0);
                for (std::size_t k = 0; k < drop; ++k) m.erase(m.begin() + static_cast<std::ptrdiff_t>(rng.below(m.size())));
                while (m.size() < target) m.push_back(fresh(i));
            }
            auto sorted = m;
            std::sort(sorted.begin(), sorted.end());
            out.truth.communities[i].members_by_day.push_back(std::move(sorted));
        }

        // Member posts.
        for (auto i : active) {
            const auto& c = cfg.communities[i];
            const auto& hubs = out.truth.communities[i].hubs;
            const auto& sorted = out.truth.communities[i].members_by_day.back();
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                Draft p{timestamp(day), sorted[k], c.category, text_for(c.category), hubs[0], {}};
                if (hubs.size() > 1 && k % hubs.size() != 0) p.mentions.push_back(hubs[k % hubs.size()]);
                if (cfg.intra_mentions && sorted.size() > 1) p.mentions.push_back(sorted[(k + 1) % sorted.size()]);
                drafts.push_back(std::move(p));
            }
        }

        // Cross-category mentions between members of different communities.
        if (cfg.cross_edge_rate > 0.0 && active.size() > 1) {
            const double rate = cfg.cross_edge_rate;
            auto count = static_cast<std::size_t>(std::floor(rate));
            if (rng.bernoulli(rate - std::floor(rate))) ++count;
            for (std::size_t k = 0; k < count; ++k) {
                const auto a = active[rng.below(active.size())];
                std::vector<std::size_t> others;
                for (auto b : active) {
                    if (cfg.communities[b].category != cfg.communities[a].category) others.push_back(b);
                }
                if (others.empty()) continue;
                const auto b = others[rng.below(others.size())];
                const auto& ma = out.truth.communities[a].members_by_day.back();
                const auto& mb = out.truth.communities[b].members_by_day.back();
                const auto& cat = cfg.communities[a].category;
                drafts.push_back({timestamp(day), ma[rng.below(ma.size())], cat, text_for(cat), std::nullopt,
                                  {mb[rng.below(mb.size())]}});
            }
        }

        // Ambient noise among a separate pool of users.
        if (cfg.noise_rate > 0.0) {
            auto count = static_cast<std::size_t>(std::floor(cfg.noise_rate));
            if (rng.bernoulli(cfg.noise_rate - std::floor(cfg.noise_rate))) ++count;
            for (std::size_t k = 0; k < count; ++k) {
                const auto u = rng.below(cfg.noise_users);
                auto v = rng.below(cfg.noise_users - 1);
                if (v >= u) ++v;
                const auto& cat = cfg.categories[rng.below(cfg.categories.size())].label;
                Draft p{timestamp(day), "n" + std::to_string(u), cat, text_for(cat), "n" + std::to_string(v), {}};
                if (rng.bernoulli(0.3)) {
                    auto w = rng.below(cfg.noise_users);
                    if (w != u) p.mentions.push_back("n" + std::to_string(w));
                }
                drafts.push_back(std::move(p));
            }
        }

        // Bridges joining consecutive hubs into one component.
        std::size_t bridge_no = 0, relay_no = 0;
        std::optional<std::size_t> last;
        int run = 0;
        const std::string tag = std::to_string(offset);
        auto emit_bridge = [&](std::size_t color, const std::string& from, const std::string& to) {
            const auto& cat = cfg.categories[color].label;
            drafts.push_back({timestamp(day), "b" + tag + "-" + std::to_string(bridge_no++), cat, text_for(cat), from, {to}});
            run = (last && *last == color) ? run + 1 : 1;
            last = color;
        };
        for (std::size_t a = 0; a + 1 < active.size(); ++a) {
            std::string cur = out.truth.communities[active[a]].hubs[0];
            std::optional<std::size_t> cur_cat = cfg.categories.index_of(cfg.communities[active[a]].category);
            const std::string& target = out.truth.communities[active[a + 1]].hubs[0];
            const std::size_t target_cat = *cfg.categories.index_of(cfg.communities[active[a + 1]].category);
            for (int step = 0;; ++step) {
                if (step > 8) throw std::logic_error("synth: bridge placement did not converge");
                std::optional<std::size_t> direct;
                for (std::size_t x = 0; x < cfg.categories.size() && !direct; ++x) {
                    if (x != target_cat && x != cur_cat && x != last) direct = x;
                }
                if (direct) {
                    emit_bridge(*direct, cur, target);
                    break;
                }
                std::optional<std::size_t> via;
                for (std::size_t y = 0; y < cfg.categories.size() && !via; ++y) {
                    if (y != cur_cat && y != last) via = y;
                }
                for (std::size_t y = 0; y < cfg.categories.size() && !via; ++y) {
                    if (y != cur_cat && !(y == last && run >= 2)) via = y;
                }
                if (!via) throw std::logic_error("synth: no bridge color available");
                const std::string relay = "r" + tag + "-" + std::to_string(relay_no++);
                emit_bridge(*via, cur, relay);
                cur = relay;
                cur_cat.reset();
            }
        }
    }

    std::vector<std::size_t> order(drafts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return drafts[a].created_at < drafts[b].created_at; });
    const auto width = std::to_string(drafts.size()).size();
    for (std::size_t n = 0; n < order.size(); ++n) {
        auto& d = drafts[order[n]];
        std::string id = std::to_string(n + 1);
        id.insert(0, width - id.size(), '0');
        Post p{"p" + id, d.user, d.created_at, d.text, cfg.area, d.reply_to, std::nullopt, d.mentions};
        canonicalize(p);
        out.posts.push_back({std::move(p), d.label, 1.0});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Configuration and truth files
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const PlantedTruth& t, const SynthConfig& cfg) {
    using nlohmann::json;
    json comms = json::array();
    for (const auto& c : t.communities) {
        json by_day = json::object();
        for (int k = 0; k < c.lifespan; ++k) {
            by_day[format_day(c.birth + std::chrono::days{k})] = c.members_by_day[static_cast<std::size_t>(k)];
        }
        comms.push_back({{"id", c.id},
                         {"category", c.category},
                         {"birth_day", format_day(c.birth)},
                         {"lifespan", c.lifespan},
                         {"hubs", c.hubs},
                         {"members_by_day", by_day}});
    }
    json days = json::object();
    for (const auto& [day, cats] : t.by_day()) {
        json jc = json::object();
        for (const auto& [cat, sets] : cats) jc[cat] = sets;
        days[format_day(day)] = jc;
    }
    return {{"seed", cfg.seed},
            {"area", cfg.area},
            {"event", cfg.window.event_name},
            {"first_day", format_day(cfg.window.first_day())},
            {"last_day", format_day(cfg.window.last_day())},
            {"communities", comms},
            {"days", days},
            {"expected_lifespans", t.lifespans()}};
}

// Reads the "synth" block of a run configuration. Window and categories come
// from the caller.
inline SynthConfig synth_config_from_json(const nlohmann::json& j, EventWindow window, CategorySet categories) {
    SynthConfig cfg;
    cfg.window = std::move(window);
    cfg.categories = std::move(categories);
    try {
        cfg.seed = j.value("seed", cfg.seed);
        cfg.area = j.value("area", cfg.area);
        cfg.noise_rate = j.value("noise_rate", cfg.noise_rate);
        cfg.noise_users = j.value("noise_users", cfg.noise_users);
        cfg.cross_edge_rate = j.value("cross_edge_rate", cfg.cross_edge_rate);
        cfg.intra_mentions = j.value("intra_mentions", cfg.intra_mentions);
        cfg.k_min = j.value("k_min", cfg.k_min);
        for (const auto& c : j.value("communities", nlohmann::json::array())) {
            PlantedCommunity pc;
            pc.category = c.at("category").get<std::string>();
            pc.size = c.value("size", pc.size);
            pc.birth_day = c.value("birth_day", pc.birth_day);
            pc.lifespan = c.value("lifespan", pc.lifespan);
            pc.overlap = c.value("overlap", pc.overlap);
            pc.hub_count = c.value("hub_count", pc.hub_count);
            pc.growth = c.value("growth", pc.growth);
            cfg.communities.push_back(std::move(pc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synth configuration: ") + e.what());
    }
    return cfg;
}

}  // namespace dfa
