#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dfa/common.hpp"

namespace dfa {

struct Category {
    std::string label;
    std::string color;  // "#rrggbb"

    bool operator==(const Category&) const = default;
};

// Ordered set of discourse categories. Order is significant: it breaks ties
// in labeling and ranking.
class CategorySet {
public:
    CategorySet() = default;

    explicit CategorySet(std::vector<Category> categories) : categories_(std::move(categories)) {
        if (categories_.size() < 2) throw ConfigError("a category set needs at least two categories");
        std::set<std::string> labels, colors;
        for (const auto& c : categories_) {
            if (c.label.empty()) throw ConfigError("category label must be nonempty");
            if (!valid_color(c.color)) throw ConfigError("category '" + c.label + "' has invalid color '" + c.color + "'");
            if (!labels.insert(c.label).second) throw ConfigError("duplicate category label '" + c.label + "'");
            if (!colors.insert(c.color).second) throw ConfigError("duplicate category color '" + c.color + "'");
        }
    }

    std::size_t size() const { return categories_.size(); }
    bool empty() const { return categories_.empty(); }
    const Category& operator[](std::size_t i) const { return categories_[i]; }
    auto begin() const { return categories_.begin(); }
    auto end() const { return categories_.end(); }

    std::optional<std::size_t> index_of(std::string_view label) const {
        for (std::size_t i = 0; i < categories_.size(); ++i) {
            if (categories_[i].label == label) return i;
        }
        return std::nullopt;
    }

    bool contains(std::string_view label) const { return index_of(label).has_value(); }

    std::size_t require(std::string_view label) const {
        auto i = index_of(label);
        if (!i) throw ConfigError("category '" + std::string(label) + "' is not in the category set");
        return *i;
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (const auto& c : categories_) out.push_back(c.label);
        return out;
    }

    bool operator==(const CategorySet&) const = default;

    static bool valid_color(std::string_view c) {
        if (c.size() != 7 || c[0] != '#') return false;
        for (char ch : c.substr(1)) {
            const bool hex = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f') || (ch >= 'A' && ch <= 'F');
            if (!hex) return false;
        }
        return true;
    }

private:
    std::vector<Category> categories_;
};

// The six harmful-language categories used throughout the bundled data.
inline CategorySet default_categories() {
    return CategorySet({
        {"sexism", "#e41a1c"},
        {"racism", "#984ea3"},
        {"xenophobia", "#377eb8"},
        {"ableism", "#ff7f00"},
        {"homophobia", "#4daf4a"},
        {"religious_intolerance", "#a65628"},
    });
}

}  // namespace dfa
