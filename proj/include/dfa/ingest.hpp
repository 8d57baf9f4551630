#pragma once

// Post records: parsing (JSONL / CSV), collection queries, event windows and
// per-area partitioning.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "dfa/common.hpp"

namespace dfa {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Areas and collection queries
// ---------------------------------------------------------------------------

struct AreaSpec {
    std::string name;
    std::vector<std::string> aliases;
    std::optional<std::string> country;
    std::optional<std::string> language;

    bool operator==(const AreaSpec&) const = default;
};

// Checks the area invariants and returns a copy with aliases deduplicated
// (first occurrence kept) and aliases equal to the name dropped.
inline AreaSpec normalized(AreaSpec area) {
    auto no_quote = [](const std::string& s) { return s.find('"') == std::string::npos; };
    if (area.name.empty()) throw ConfigError("area name must be nonempty");
    if (!no_quote(area.name)) throw ConfigError("area name must not contain '\"'");
    std::vector<std::string> aliases;
    std::set<std::string> seen;
    for (auto& a : area.aliases) {
        if (a.empty() || a == area.name || !seen.insert(a).second) continue;
        if (!no_quote(a)) throw ConfigError("alias must not contain '\"': " + a);
        aliases.push_back(std::move(a));
    }
    area.aliases = std::move(aliases);
    auto check_code = [](const std::optional<std::string>& code, const char* what) {
        if (code && code->size() != 2) {
            throw ConfigError(std::string(what) + " code must have exactly two letters, got '" + *code + "'");
        }
    };
    check_code(area.country, "country");
    check_code(area.language, "language");
    return area;
}

// (("NAME") AND (("A1") OR ("A2"))) AND (country:"CC") AND (language:"LL")
inline std::string build_query(const AreaSpec& raw) {
    const AreaSpec area = normalized(raw);
    std::string q = "((\"" + area.name + "\")";
    if (!area.aliases.empty()) {
        q += " AND (";
        for (std::size_t i = 0; i < area.aliases.size(); ++i) {
            if (i) q += " OR ";
            q += "(\"" + area.aliases[i] + "\")";
        }
        q += ")";
    }
    q += ")";
    if (area.country) q += " AND (country:\"" + *area.country + "\")";
    if (area.language) q += " AND (language:\"" + *area.language + "\")";
    return q;
}

// Inverse of build_query.
inline AreaSpec parse_query(std::string_view q) {
    auto fail = [&] { return DataError("malformed area query: " + std::string(q)); };
    std::size_t pos = 0;
    auto expect = [&](std::string_view lit) {
        if (q.substr(pos, lit.size()) != lit) throw fail();
        pos += lit.size();
    };
    auto quoted = [&] {
        expect("\"");
        const auto end = q.find('"', pos);
        if (end == std::string_view::npos) throw fail();
        std::string s(q.substr(pos, end - pos));
        pos = end + 1;
        return s;
    };
    AreaSpec area;
    expect("((");
    area.name = quoted();
    expect(")");
    if (q.substr(pos, 6) == " AND (") {
        pos += 6;
        for (;;) {
            expect("(");
            area.aliases.push_back(quoted());
            expect(")");
            if (q.substr(pos, 4) == " OR ") {
                pos += 4;
                continue;
            }
            break;
        }
        expect(")");
    }
    expect(")");
    if (q.substr(pos, 14) == " AND (country:") {
        pos += 14;
        area.country = quoted();
        expect(")");
    }
    if (q.substr(pos, 15) == " AND (language:") {
        pos += 15;
        area.language = quoted();
        expect(")");
    }
    if (pos != q.size()) throw fail();
    return area;
}

// ---------------------------------------------------------------------------
// Event windows
// ---------------------------------------------------------------------------

struct EventWindow {
    std::string event_name;
    Day event_date{};
    int delta_before = 1;
    int delta_after = 1;

    void validate() const {
        if (delta_before < 1 || delta_before > 30 || delta_after < 1 || delta_after > 30) {
            throw ConfigError("event '" + event_name + "': window deltas must lie in [1, 30] days");
        }
    }

    Day first_day() const { return event_date - std::chrono::days{delta_before}; }
    Day last_day() const { return event_date + std::chrono::days{delta_after}; }
    std::size_t day_count() const { return static_cast<std::size_t>(delta_before + delta_after + 1); }
    bool contains(Day d) const { return d >= first_day() && d <= last_day(); }

    std::vector<Day> days() const {
        std::vector<Day> out;
        for (Day d = first_day(); d <= last_day(); d += std::chrono::days{1}) out.push_back(d);
        return out;
    }

    bool operator==(const EventWindow&) const = default;
};

// ---------------------------------------------------------------------------
// Posts
// ---------------------------------------------------------------------------

struct Post {
    std::string id;
    std::string user_id;
    std::int64_t created_at = 0;
    std::string text;
    std::string area;
    std::optional<std::string> reply_to_user;
    std::optional<std::string> retweet_of_user;
    std::vector<std::string> mentions;

    Day day() const { return day_of(created_at); }

    bool operator==(const Post&) const = default;
};

struct LabeledPost {
    Post post;
    std::string label;
    double score = 0.0;

    bool operator==(const LabeledPost&) const = default;
};

// Enforces the per-record invariants: self-mentions dropped, mentions
// deduplicated, a retweet that is also a reply recorded as a reply.
inline void canonicalize(Post& p) {
    std::vector<std::string> mentions;
    std::unordered_set<std::string> seen;
    for (auto& m : p.mentions) {
        if (m.empty() || m == p.user_id || !seen.insert(m).second) continue;
        mentions.push_back(std::move(m));
    }
    p.mentions = std::move(mentions);
    if (p.reply_to_user && p.reply_to_user->empty()) p.reply_to_user.reset();
    if (p.retweet_of_user && p.retweet_of_user->empty()) p.retweet_of_user.reset();
    if (p.reply_to_user && p.retweet_of_user) p.retweet_of_user.reset();
}

enum class RecordFormat { jsonl, csv };

inline RecordFormat format_from_path(std::string_view path) {
    return path.ends_with(".csv") ? RecordFormat::csv : RecordFormat::jsonl;
}

struct ParseIssue {
    std::size_t record = 0;  // 1-based record number (JSONL: line number)
    std::string reason;
};

struct ParseReport {
    std::size_t parsed = 0;
    std::size_t skipped = 0;
    std::vector<ParseIssue> issues;

    std::map<std::string, std::size_t> reasons() const {
        std::map<std::string, std::size_t> out;
        for (const auto& i : issues) ++out[i.reason.substr(0, i.reason.find(':'))];
        return out;
    }
};

template <class T>
struct ParseResult {
    std::vector<T> records;
    ParseReport report;
};

namespace detail {

struct RawRecord {
    Post post;
    std::optional<std::string> label;
    std::optional<double> score;
};

inline const char* kRequired[] = {"id", "user_id", "created_at", "text", "area"};

inline RawRecord record_from_json(const json& j) {
    if (!j.is_object()) throw DataError("malformed: not a JSON object");
    for (const char* field : kRequired) {
        if (!j.contains(field) || j[field].is_null()) throw DataError(std::string("missing field: ") + field);
    }
    auto str = [&](const char* field) {
        const auto& v = j[field];
        if (!v.is_string()) throw DataError(std::string("malformed: field '") + field + "' must be a string");
        return v.get<std::string>();
    };
    auto opt_str = [&](const char* field) -> std::optional<std::string> {
        if (!j.contains(field) || j[field].is_null()) return std::nullopt;
        return str(field);
    };
    RawRecord r;
    r.post.id = str("id");
    r.post.user_id = str("user_id");
    const auto& ts = j["created_at"];
    if (!ts.is_number_integer()) throw DataError("malformed: field 'created_at' must be an integer");
    r.post.created_at = ts.get<std::int64_t>();
    r.post.text = str("text");
    r.post.area = str("area");
    r.post.reply_to_user = opt_str("reply_to_user");
    r.post.retweet_of_user = opt_str("retweet_of_user");
    if (j.contains("mentions") && !j["mentions"].is_null()) {
        if (!j["mentions"].is_array()) throw DataError("malformed: field 'mentions' must be an array");
        for (const auto& m : j["mentions"]) {
            if (!m.is_string()) throw DataError("malformed: mentions must be strings");
            r.post.mentions.push_back(m.get<std::string>());
        }
    }
    r.label = opt_str("label");
    if (j.contains("score") && !j["score"].is_null()) {
        if (!j["score"].is_number()) throw DataError("malformed: field 'score' must be a number");
        r.score = j["score"].get<double>();
    }
    return r;
}

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. Returns false at end of input.
inline bool read_csv_row(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field += c;
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

inline std::string csv_field(std::string_view s) {
    const bool needs_quotes = s.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline const std::vector<std::string> kCsvColumns = {"id", "user_id", "created_at", "text", "area",
                                                     "reply_to_user", "retweet_of_user", "mentions"};

inline RawRecord record_from_csv(const std::vector<std::string>& f) {
    if (f.size() != 8 && f.size() != 10) {
        throw DataError("malformed: expected 8 or 10 columns, got " + std::to_string(f.size()));
    }
    for (std::size_t i = 0; i < 5; ++i) {
        if (i == 3) continue;  // empty text is a valid post
        if (f[i].empty()) throw DataError(std::string("missing field: ") + kRequired[i]);
    }
    RawRecord r;
    r.post.id = f[0];
    r.post.user_id = f[1];
    std::int64_t ts = 0;
    auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), ts);
    if (ec != std::errc{} || p != f[2].data() + f[2].size()) throw DataError("malformed: created_at '" + f[2] + "'");
    r.post.created_at = ts;
    r.post.text = f[3];
    r.post.area = f[4];
    if (!f[5].empty()) r.post.reply_to_user = f[5];
    if (!f[6].empty()) r.post.retweet_of_user = f[6];
    std::string_view m = f[7];
    while (!m.empty()) {
        const auto bar = m.find('|');
        r.post.mentions.emplace_back(m.substr(0, bar));
        if (bar == std::string_view::npos) break;
        m.remove_prefix(bar + 1);
    }
    if (f.size() == 10) {
        if (!f[8].empty()) r.label = f[8];
        if (!f[9].empty()) {
            try {
                std::size_t used = 0;
                r.score = std::stod(f[9], &used);
                if (used != f[9].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw DataError("malformed: score '" + f[9] + "'");
            }
        }
    }
    return r;
}

inline const std::string& id_of(const Post& p) { return p.id; }
inline const std::string& id_of(const LabeledPost& p) { return p.post.id; }

// Shared driver: reads raw records, validates, drops duplicates. `accept`
// converts a RawRecord to the output type or throws DataError.
template <class T, class Accept>
ParseResult<T> parse_with(std::istream& in, RecordFormat format, Accept accept) {
    ParseResult<T> out;
    std::unordered_set<std::string> ids;
    std::size_t record_no = 0;
    auto handle = [&](auto&& produce) {
        ++record_no;
        try {
            RawRecord raw = produce();
            if (raw.post.created_at <= 0) throw DataError("malformed: created_at must be positive");
            canonicalize(raw.post);
            if (ids.count(raw.post.id)) throw DataError("duplicate: id '" + raw.post.id + "'");
            T value = accept(std::move(raw));
            ids.insert(id_of(value));
            out.records.push_back(std::move(value));
            ++out.report.parsed;
        } catch (const DataError& e) {
            ++out.report.skipped;
            out.report.issues.push_back({record_no, e.what()});
        }
    };
    if (format == RecordFormat::jsonl) {
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) {
                ++record_no;
                continue;
            }
            handle([&] {
                json j;
                try {
                    j = json::parse(line);
                } catch (const json::exception&) {
                    throw DataError("malformed: invalid JSON");
                }
                return record_from_json(j);
            });
        }
    } else {
        std::vector<std::string> fields;
        bool first = true;
        while (read_csv_row(in, fields)) {
            if (first) {
                first = false;
                if (fields.size() >= 2 && fields[0] == "id" && fields[1] == "user_id") continue;  // header
            }
            if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
            handle([&] { return record_from_csv(fields); });
        }
    }
    return out;
}

}  // namespace detail

inline ParseResult<Post> parse_records(std::istream& in, RecordFormat format) {
    return detail::parse_with<Post>(in, format, [](detail::RawRecord r) { return std::move(r.post); });
}

// Like parse_records, but every record must carry "label" and "score".
inline ParseResult<LabeledPost> parse_labeled_records(std::istream& in, RecordFormat format) {
    return detail::parse_with<LabeledPost>(in, format, [](detail::RawRecord r) {
        if (!r.label || r.label->empty()) throw DataError("missing field: label");
        if (!r.score) throw DataError("missing field: score");
        return LabeledPost{std::move(r.post), std::move(*r.label), *r.score};
    });
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline json to_json(const Post& p) {
    json j;
    j["id"] = p.id;
    j["user_id"] = p.user_id;
    j["created_at"] = p.created_at;
    j["text"] = p.text;
    j["area"] = p.area;
    if (p.reply_to_user) j["reply_to_user"] = *p.reply_to_user;
    if (p.retweet_of_user) j["retweet_of_user"] = *p.retweet_of_user;
    j["mentions"] = p.mentions;
    return j;
}

inline json to_json(const LabeledPost& p) {
    json j = to_json(p.post);
    j["label"] = p.label;
    j["score"] = p.score;
    return j;
}

inline void write_csv_header(std::ostream& out, bool labeled) {
    for (std::size_t i = 0; i < detail::kCsvColumns.size(); ++i) out << (i ? "," : "") << detail::kCsvColumns[i];
    if (labeled) out << ",label,score";
    out << '\n';
}

inline void write_csv_fields(std::ostream& out, const Post& p) {
    std::string mentions;
    for (std::size_t i = 0; i < p.mentions.size(); ++i) mentions += (i ? "|" : "") + p.mentions[i];
    out << detail::csv_field(p.id) << ',' << detail::csv_field(p.user_id) << ',' << p.created_at << ','
        << detail::csv_field(p.text) << ',' << detail::csv_field(p.area) << ','
        << detail::csv_field(p.reply_to_user.value_or("")) << ','
        << detail::csv_field(p.retweet_of_user.value_or("")) << ',' << detail::csv_field(mentions);
}

inline void write_records(std::ostream& out, const std::vector<Post>& posts, RecordFormat format) {
    if (format == RecordFormat::csv) {
        write_csv_header(out, false);
        for (const auto& p : posts) {
            write_csv_fields(out, p);
            out << '\n';
        }
        return;
    }
    for (const auto& p : posts) out << to_json(p).dump() << '\n';
}

inline void write_records(std::ostream& out, const std::vector<LabeledPost>& posts, RecordFormat format) {
    if (format == RecordFormat::csv) {
        write_csv_header(out, true);
        for (const auto& p : posts) {
            write_csv_fields(out, p.post);
            out << ',' << detail::csv_field(p.label) << ',' << json(p.score).dump() << '\n';
        }
        return;
    }
    for (const auto& p : posts) out << to_json(p).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Event partitions
// ---------------------------------------------------------------------------

struct EventPartition {
    AreaSpec area;
    EventWindow window;
    std::vector<LabeledPost> posts;
    // UTC day -> indices into `posts`, ordered by (created_at, id).
    std::map<Day, std::vector<std::size_t>> day_index;

    std::string id() const { return area.name + "/" + window.event_name; }
};

inline EventPartition partition(const std::vector<LabeledPost>& posts, const AreaSpec& area,
                                const EventWindow& window) {
    window.validate();
    EventPartition part{normalized(area), window, {}, {}};
    for (const auto& p : posts) {
        if (p.post.area == part.area.name && window.contains(p.post.day())) part.posts.push_back(p);
    }
    for (std::size_t i = 0; i < part.posts.size(); ++i) part.day_index[part.posts[i].post.day()].push_back(i);
    for (auto& [day, idx] : part.day_index) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& pa = part.posts[a].post;
            const auto& pb = part.posts[b].post;
            if (pa.created_at != pb.created_at) return pa.created_at < pb.created_at;
            return pa.id < pb.id;
        });
    }
    return part;
}

inline json to_json(const EventPartition& part) {
    json days = json::object();
    for (const auto& [day, idx] : part.day_index) {
        json ids = json::array();
        for (auto i : idx) ids.push_back(part.posts[i].post.id);
        days[format_day(day)] = std::move(ids);
    }
    return {{"area", part.area.name},
            {"event", part.window.event_name},
            {"first_day", format_day(part.window.first_day())},
            {"last_day", format_day(part.window.last_day())},
            {"post_count", part.posts.size()},
            {"day_index", std::move(days)}};
}

struct CorpusSummary {
    std::string area;
    std::size_t tweets = 0;
    std::size_t users = 0;
    std::size_t multi_category_users = 0;

    bool operator==(const CorpusSummary&) const = default;
};

// Per-area totals over all partitions of that area; a post shared by two
// overlapping windows is counted once.
inline std::vector<CorpusSummary> summarize_corpus(const std::vector<EventPartition>& partitions) {
    struct Acc {
        std::set<std::string> post_ids;
        std::map<std::string, std::set<std::string>> labels_by_user;
    };
    std::map<std::string, Acc> by_area;
    for (const auto& part : partitions) {
        auto& acc = by_area[part.area.name];
        for (const auto& p : part.posts) {
            if (!acc.post_ids.insert(p.post.id).second) continue;
            acc.labels_by_user[p.post.user_id].insert(p.label);
        }
    }
    std::vector<CorpusSummary> out;
    for (const auto& [area, acc] : by_area) {
        CorpusSummary s{area, acc.post_ids.size(), acc.labels_by_user.size(), 0};
        for (const auto& [user, labels] : acc.labels_by_user) {
            if (labels.size() >= 2) ++s.multi_category_users;
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline json to_json(const CorpusSummary& s) {
    return {{"area", s.area}, {"tweets", s.tweets}, {"users", s.users}, {"multi_category_users", s.multi_category_users}};
}

}  // namespace dfa
