#pragma once

// Category scoring and the labeling policy: a post is labeled with the
// highest-scoring category when that score reaches the threshold (0.5 by
// default), otherwise it is dropped.

#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dfa/categories.hpp"
#include "dfa/common.hpp"
#include "dfa/ingest.hpp"
#include "dfa/text.hpp"

namespace dfa {

inline constexpr double kDefaultLabelThreshold = 0.5;

// Scores aligned with CategorySet order.
struct ScoreVector {
    std::vector<double> values;

    void validate(const CategorySet& categories) const {
        if (values.size() != categories.size()) {
            throw ConfigError("score vector has " + std::to_string(values.size()) + " entries for " +
                              std::to_string(categories.size()) + " categories");
        }
        for (double v : values) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("score outside [0, 1]");
        }
    }
};

struct Label {
    std::string label;
    double score = 0.0;

    bool operator==(const Label&) const = default;
};

// Argmax over scores; the first category in set order wins ties. Returns
// nothing when the best score is below the threshold.
inline std::optional<Label> assign_label(const CategorySet& categories, const ScoreVector& scores,
                                         double threshold = kDefaultLabelThreshold) {
    scores.validate(categories);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.values.size(); ++i) {
        if (scores.values[i] > scores.values[best]) best = i;
    }
    if (scores.values.empty() || scores.values[best] < threshold) return std::nullopt;
    return Label{categories[best].label, scores.values[best]};
}

// ---------------------------------------------------------------------------
// Classifiers
// ---------------------------------------------------------------------------

class Classifier {
public:
    virtual ~Classifier() = default;

    // Category labels this classifier scores, in output order.
    virtual std::vector<std::string> category_labels() const = 0;

    virtual ScoreVector score_tokens(std::span<const std::string> tokens) const = 0;

    virtual ScoreVector score_text(std::string_view text) const { return score_tokens(preprocess(text)); }
};

// Scores tokens with `classifier`, after checking that it was configured for
// exactly this category set.
inline ScoreVector score(const Classifier& classifier, const CategorySet& categories,
                         std::span<const std::string> tokens) {
    if (classifier.category_labels() != categories.labels()) {
        throw ConfigError("classifier categories do not match the active category set");
    }
    ScoreVector s = classifier.score_tokens(tokens);
    s.validate(categories);
    return s;
}

// Per-category term weights. Terms are stored stemmed.
class Lexicon {
public:
    Lexicon() = default;

    void add(const std::string& category, const std::string& term, double weight) {
        if (!(weight > 0.0) || !std::isfinite(weight)) {
            throw ConfigError("lexicon weight for '" + term + "' in '" + category + "' must be finite and positive");
        }
        auto normalized = preprocess(term);
        if (normalized.size() != 1) {
            throw ConfigError("lexicon term '" + term + "' must normalize to exactly one token");
        }
        terms_[category][normalized.front()] += weight;
    }

    const std::map<std::string, std::unordered_map<std::string, double>>& terms() const { return terms_; }

    static Lexicon from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw DataError("lexicon must be a JSON object {category: {term: weight}}");
        Lexicon lex;
        for (const auto& [category, entries] : j.items()) {
            if (!entries.is_object()) throw DataError("lexicon entry for '" + category + "' must be an object");
            lex.terms_[category];
            for (const auto& [term, weight] : entries.items()) {
                if (!weight.is_number()) throw DataError("lexicon weight for '" + term + "' must be a number");
                lex.add(category, term, weight.get<double>());
            }
        }
        return lex;
    }

    static Lexicon load(std::istream& in) {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("lexicon is not valid JSON: ") + e.what());
        }
        return from_json(j);
    }

private:
    std::map<std::string, std::unordered_map<std::string, double>> terms_;
};

// Weighted-lexicon baseline: raw r_c sums the weights of matching tokens
// (with multiplicity) and the score is r_c / (r_c + 1), so a category clears
// 0.5 exactly when r_c >= 1.
class LexiconClassifier final : public Classifier {
public:
    LexiconClassifier(CategorySet categories, const Lexicon& lexicon) : categories_(std::move(categories)) {
        for (const auto& [category, terms] : lexicon.terms()) {
            const auto idx = categories_.index_of(category);
            if (!idx) throw ConfigError("lexicon category '" + category + "' is not in the category set");
            for (const auto& [term, w] : terms) index_[term].push_back({*idx, w});
        }
    }

    std::vector<std::string> category_labels() const override { return categories_.labels(); }

    std::vector<double> raw_weights(std::span<const std::string> tokens) const {
        std::vector<double> raw(categories_.size(), 0.0);
        for (const auto& t : tokens) {
            auto it = index_.find(t);
            if (it == index_.end()) continue;
            for (const auto& [idx, w] : it->second) raw[idx] += w;
        }
        return raw;
    }

    ScoreVector score_tokens(std::span<const std::string> tokens) const override {
        ScoreVector s;
        for (double r : raw_weights(tokens)) s.values.push_back(r / (r + 1.0));
        return s;
    }

    const CategorySet& categories() const { return categories_; }

private:
    struct Entry {
        std::size_t category;
        double weight;
    };
    CategorySet categories_;
    std::unordered_map<std::string, std::vector<Entry>> index_;
};

// ---------------------------------------------------------------------------
// Labeling
// ---------------------------------------------------------------------------

struct LabelReport {
    std::size_t input = 0;
    std::size_t labeled = 0;
    std::size_t dropped = 0;
};

struct LabelResult {
    std::vector<LabeledPost> posts;
    LabelReport report;
};

// Scores every post and keeps the labelable ones in input order.
inline LabelResult label_posts(const std::vector<Post>& posts, const Classifier& classifier,
                               const CategorySet& categories, double threshold = kDefaultLabelThreshold) {
    if (classifier.category_labels() != categories.labels()) {
        throw ConfigError("classifier categories do not match the active category set");
    }
    std::vector<std::optional<Label>> labels(posts.size());
    parallel_for(posts.size(), [&](std::size_t i) {
        labels[i] = assign_label(categories, score(classifier, categories, preprocess(posts[i].text)), threshold);
    });
    LabelResult out;
    out.report.input = posts.size();
    for (std::size_t i = 0; i < posts.size(); ++i) {
        if (!labels[i]) continue;
        out.posts.push_back({posts[i], labels[i]->label, labels[i]->score});
    }
    out.report.labeled = out.posts.size();
    out.report.dropped = posts.size() - out.posts.size();
    return out;
}

inline nlohmann::json to_json(const LabelReport& r) {
    return {{"input", r.input}, {"labeled", r.labeled}, {"dropped", r.dropped}};
}

// ---------------------------------------------------------------------------
// Held-out evaluation
// ---------------------------------------------------------------------------

struct LabeledText {
    std::string text;
    std::string label;
};

struct EvalConfig {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
    double threshold = kDefaultLabelThreshold;
};

struct CategoryScores {
    std::string label;
    std::size_t support = 0;
    Metric precision;
    Metric recall;
    double f1 = 0.0;
};

struct EvalReport {
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<CategoryScores> per_category;
    // confusion[gold][predicted]; the extra last column counts "no label".
    std::vector<std::vector<std::size_t>> confusion;
};

inline std::vector<LabeledText> load_eval_corpus(std::istream& in) {
    std::vector<LabeledText> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            out.push_back({j.at("text").get<std::string>(), j.at("label").get<std::string>()});
        } catch (const nlohmann::json::exception&) {
            throw DataError("eval corpus line " + std::to_string(line_no) + ": expected {\"text\", \"label\"}");
        }
    }
    return out;
}

// Indices of the held-out examples for a seeded (optionally stratified) split.
inline std::vector<std::size_t> held_out_indices(const std::vector<LabeledText>& corpus, const CategorySet& categories,
                                                 const EvalConfig& cfg) {
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    }
    Rng rng(cfg.seed);
    std::vector<std::size_t> test;
    auto take = [&](std::vector<std::size_t> idx) {
        rng.shuffle(idx);
        const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(idx.size())));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    };
    if (cfg.stratified) {
        std::vector<std::vector<std::size_t>> groups(categories.size());
        for (std::size_t i = 0; i < corpus.size(); ++i) groups[categories.require(corpus[i].label)].push_back(i);
        for (std::size_t c = 0; c < groups.size(); ++c) {
            if (groups[c].empty()) {
                throw ConfigError("cannot stratify: no examples for category '" + categories[c].label + "'");
            }
        }
        for (auto& g : groups) take(std::move(g));
    } else {
        std::vector<std::size_t> all(corpus.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        take(std::move(all));
    }
    std::sort(test.begin(), test.end());
    return test;
}

inline EvalReport evaluate(const Classifier& classifier, const CategorySet& categories,
                           const std::vector<LabeledText>& corpus, const EvalConfig& cfg) {
    for (const auto& ex : corpus) categories.require(ex.label);
    const auto test = held_out_indices(corpus, categories, cfg);
    const std::size_t k = categories.size();

    EvalReport rep;
    rep.test_size = test.size();
    rep.train_size = corpus.size() - test.size();
    rep.confusion.assign(k, std::vector<std::size_t>(k + 1, 0));
    std::size_t correct = 0;
    for (auto i : test) {
        const auto gold = categories.require(corpus[i].label);
        const auto scores = score(classifier, categories, preprocess(corpus[i].text));
        const auto pred = assign_label(categories, scores, cfg.threshold);
        const std::size_t col = pred ? categories.require(pred->label) : k;
        ++rep.confusion[gold][col];
        if (col == gold) ++correct;
    }
    rep.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());

    double f1_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = rep.confusion[c][c], predicted = 0, support = 0;
        for (std::size_t g = 0; g < k; ++g) predicted += rep.confusion[g][c];
        for (std::size_t p = 0; p <= k; ++p) support += rep.confusion[c][p];
        CategoryScores cs{categories[c].label, support, {}, {}, 0.0};
        if (predicted) cs.precision = Metric::of(static_cast<double>(tp) / static_cast<double>(predicted));
        if (support) cs.recall = Metric::of(static_cast<double>(tp) / static_cast<double>(support));
        const double p = cs.precision.defined ? cs.precision.value : 0.0;
        const double r = cs.recall.defined ? cs.recall.value : 0.0;
        cs.f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        f1_sum += cs.f1;
        rep.per_category.push_back(std::move(cs));
    }
    rep.macro_f1 = k ? f1_sum / static_cast<double>(k) : 0.0;
    return rep;
}

inline nlohmann::json metric_json(const Metric& m) {
    return m.defined ? nlohmann::json(m.value) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const EvalReport& r, const CategorySet& categories) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& c : r.per_category) {
        per.push_back({{"label", c.label},
                       {"support", c.support},
                       {"precision", metric_json(c.precision)},
                       {"recall", metric_json(c.recall)},
                       {"f1", c.f1}});
    }
    auto columns = categories.labels();
    columns.push_back("none");
    return {{"train_size", r.train_size},
            {"test_size", r.test_size},
            {"accuracy", r.accuracy},
            {"macro_f1", r.macro_f1},
            {"per_category", per},
            {"confusion", {{"rows", categories.labels()}, {"columns", columns}, {"counts", r.confusion}}}};
}

}  // namespace dfa
