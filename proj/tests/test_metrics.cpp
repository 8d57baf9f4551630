#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace dfa;

namespace {

// Sender-only graph: node i is user "n<i>" posting in `cats[i]`; edges are
// replies between them.
DailyGraph sender_graph(const std::vector<std::string>& cats, const std::vector<SimpleEdge>& edges) {
    DailyGraph g;
    g.day = th::day("2020-03-10");
    for (std::size_t i = 0; i < cats.size(); ++i) g.nodes.push_back({"n" + std::to_string(i), PersonaKind::sender, cats[i]});
    std::size_t k = 0;
    for (auto [a, b] : edges) g.edges.push_back({a, b, EdgeKind::reply, "p" + std::to_string(k++)});
    return g;
}

// Q = 1/(2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j), straight from the
// adjacency matrix.
double brute_modularity(std::size_t n, const std::vector<SimpleEdge>& edges, const std::vector<std::size_t>& group) {
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (auto [a, b] : edges) A[a][b] = A[b][a] = 1.0;
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) k[i] += A[i][j];
    }
    const double two_m = 2.0 * static_cast<double>(edges.size());
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (group[i] == group[j]) q += A[i][j] - k[i] * k[j] / two_m;
        }
    }
    return q / two_m;
}

EventPartition partition_of(const std::vector<std::pair<const char*, std::string>>& day_labels, const char* event_day,
                            int before, int after) {
    std::vector<LabeledPost> posts;
    int n = 0;
    for (const auto& [d, label] : day_labels) {
        posts.push_back(th::labeled(th::post("p" + std::to_string(n), "u" + std::to_string(n), th::at(d, n)), label));
        ++n;
    }
    return partition(posts, th::area(), th::window(event_day, before, after));
}

}  // namespace

// ---------------------------------------------------------------------------
// Dominance
// ---------------------------------------------------------------------------

TEST(Dominance, SharesPerDay) {
    std::vector<std::pair<const char*, std::string>> rows;
    for (int i = 0; i < 6; ++i) rows.push_back({"2020-03-10", "xenophobia"});
    for (int i = 0; i < 4; ++i) rows.push_back({"2020-03-10", "racism"});
    for (int i = 0; i < 3; ++i) rows.push_back({"2020-03-11", "sexism"});
    const auto series = dominance_series(partition_of(rows, "2020-03-10", 1, 1), default_categories());
    ASSERT_EQ(series.size(), 3u);
    EXPECT_TRUE(series[0].distribution.empty());
    EXPECT_EQ(series[0].distribution.sample_count, 0u);
    for (double s : series[0].distribution.shares) EXPECT_EQ(s, 0.0);
    EXPECT_DOUBLE_EQ(series[1].distribution.share("xenophobia"), 0.6);
    EXPECT_DOUBLE_EQ(series[2].distribution.share("sexism"), 1.0);
    for (const auto& d : series) {
        if (d.distribution.empty()) continue;
        double sum = 0.0;
        for (double s : d.distribution.shares) sum += s;
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Polarization and diversity
// ---------------------------------------------------------------------------

TEST(EiIndex, AllInternal) {
    std::vector<std::string> cats(11, "racism");
    std::vector<SimpleEdge> e;
    for (std::size_t i = 1; i <= 10; ++i) e.emplace_back(0, i);
    const auto r = ei_index(sender_graph(cats, e));
    EXPECT_EQ(r.internal, 10u);
    EXPECT_DOUBLE_EQ(r.ei().value, -1.0);
    EXPECT_DOUBLE_EQ(r.diversity().value, 0.0);
}

TEST(EiIndex, AllExternal) {
    const auto r = ei_index(sender_graph({"racism", "sexism", "racism"}, {{0, 1}, {1, 2}}));
    EXPECT_DOUBLE_EQ(r.ei().value, 1.0);
    EXPECT_DOUBLE_EQ(r.diversity().value, 1.0);
}

TEST(EiIndex, OneExternalThreeInternal) {
    const auto g = sender_graph({"racism", "racism", "racism", "racism", "sexism"}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    const auto r = ei_index(g);
    EXPECT_EQ(r.external, 1u);
    EXPECT_EQ(r.internal, 3u);
    EXPECT_DOUBLE_EQ(r.ei().value, -0.5);
    EXPECT_DOUBLE_EQ(r.diversity().value, 0.25);
    // Only the cross edge touches sexism.
    EXPECT_DOUBLE_EQ(ei_index(g, std::string("sexism")).ei().value, 1.0);
}

TEST(EiIndex, ReceiversAndDuplicatesIgnored) {
    auto g = sender_graph({"racism", "racism"}, {{0, 1}, {0, 1}, {1, 0}});
    g.nodes.push_back({"r", PersonaKind::receiver, ""});
    g.edges.push_back({0, 2, EdgeKind::mention, "q"});
    const auto r = ei_index(g);
    EXPECT_EQ(r.internal, 1u);
    EXPECT_EQ(r.external, 0u);
}

TEST(EiIndex, UndefinedWithoutSenderEdges) {
    const auto g = th::Builder{}.reply("a", "racism", "h").graph();
    EXPECT_FALSE(ei_index(g).ei().defined);
    EXPECT_FALSE(ei_index(g).diversity().defined);
}

TEST(EiIndex, BoundsAndDiversityIdentity) {
    Rng rng(12);
    const std::vector<std::string> labels = {"racism", "sexism", "ableism"};
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 2 + rng.below(20);
        std::vector<std::string> cats;
        for (std::size_t i = 0; i < n; ++i) cats.push_back(labels[rng.below(3)]);
        std::vector<SimpleEdge> e;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng.bernoulli(0.2)) e.emplace_back(a, b);
            }
        }
        const auto r = ei_index(sender_graph(cats, e));
        if (!r.ei().defined) continue;
        EXPECT_GE(r.ei().value, -1.0);
        EXPECT_LE(r.ei().value, 1.0);
        EXPECT_NEAR(r.diversity().value, (r.ei().value + 1.0) / 2.0, 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

TEST(Modularity, TwoSeparatedBlocks) {
    const std::vector<SimpleEdge> e = {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
    const std::vector<std::size_t> group = {0, 0, 0, 1, 1, 1};
    const double oracle = brute_modularity(6, e, group);
    EXPECT_NEAR(oracle, 0.5, 1e-12);
    EXPECT_NEAR(modularity(e, group).value, oracle, 1e-12);
    const auto g = sender_graph({"racism", "racism", "racism", "sexism", "sexism", "sexism"}, e);
    EXPECT_NEAR(category_modularity(g, th::two_categories()).value, 0.5, 1e-12);
}

TEST(Modularity, SingleCategoryIsZero) {
    const auto g = sender_graph({"racism", "racism", "racism"}, {{0, 1}, {1, 2}});
    EXPECT_NEAR(category_modularity(g, th::two_categories()).value, 0.0, 1e-12);
}

TEST(Modularity, UndefinedWithoutEdges) {
    EXPECT_FALSE(category_modularity(sender_graph({"racism"}, {}), th::two_categories()).defined);
}

TEST(Modularity, MatchesAdjacencyFormula) {
    Rng rng(44);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(25);
        std::vector<SimpleEdge> e;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng.bernoulli(0.25)) e.emplace_back(a, b);
            }
        }
        if (e.empty()) continue;
        std::vector<std::size_t> group(n);
        for (auto& x : group) x = rng.below(4);
        const double q = modularity(e, group).value;
        EXPECT_NEAR(q, brute_modularity(n, e, group), 1e-12);
        EXPECT_LE(q, 1.0);
    }
}

TEST(Modularity, LabelShuffleCentersOnZero) {
    Rng rng(4242);
    const std::size_t n = 400;
    std::vector<SimpleEdge> e;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (rng.bernoulli(0.03)) e.emplace_back(a, b);
        }
    }
    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = i % 3;
    double sum = 0.0;
    for (int s = 0; s < 100; ++s) {
        rng.shuffle(group);
        sum += std::abs(modularity(e, group).value);
    }
    EXPECT_LT(sum / 100.0, 0.05);
}

TEST(Segmentation, CountsPerCategory) {
    const auto g = sender_graph({"racism", "sexism"}, {{0, 1}});
    Community c;
    c.category = "racism";
    const auto s = segmentation(g, th::two_categories(), {{c, c}, {}});
    EXPECT_EQ(s.community_counts, (std::vector<std::size_t>{2, 0}));
    EXPECT_DOUBLE_EQ(s.modularity.value, -0.5);
}

// ---------------------------------------------------------------------------
// Cohesiveness and scatter
// ---------------------------------------------------------------------------

namespace {

Community community_of(const std::vector<std::size_t>& nodes, const DailyGraph& g) {
    Community c;
    c.category = "racism";
    c.nodes = nodes;
    for (auto i : nodes) c.members.push_back(g.nodes[i].user_id);
    std::sort(c.members.begin(), c.members.end());
    return c;
}

}  // namespace

TEST(Cohesiveness, CliqueDensity) {
    const std::vector<SimpleEdge> e = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    const auto g = sender_graph({"racism", "racism", "racism", "racism"}, e);
    const Projection p{"racism", {0, 1, 2, 3}, e};
    const auto c = cohesiveness(community_of({0, 1, 2, 3}, g), p, g);
    EXPECT_DOUBLE_EQ(c.internal_density, 1.0);
    EXPECT_TRUE(c.conductance.defined);
    EXPECT_DOUBLE_EQ(c.conductance.value, 0.0);
}

TEST(Cohesiveness, PathDensity) {
    const std::vector<SimpleEdge> e = {{0, 1}, {1, 2}, {2, 3}};
    const auto g = sender_graph({"racism", "racism", "racism", "racism"}, e);
    const Projection p{"racism", {0, 1, 2, 3}, e};
    EXPECT_DOUBLE_EQ(cohesiveness(community_of({0, 1, 2, 3}, g), p, g).internal_density, 0.5);
}

TEST(Cohesiveness, ConductanceOfHalfPath) {
    // Path 0-1-2-3, S = {0,1}: cut 1, vol(S) = 3, vol(rest) = 3.
    const std::vector<SimpleEdge> e = {{0, 1}, {1, 2}, {2, 3}};
    const auto g = sender_graph({"racism", "racism", "racism", "racism"}, e);
    const Projection p{"racism", {0, 1, 2, 3}, e};
    const auto c = cohesiveness(community_of({0, 1}, g), p, g);
    EXPECT_DOUBLE_EQ(c.conductance.value, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.internal_density, 1.0);
}

TEST(Scatter, Examples) {
    std::vector<std::string> cats(10, "racism");
    const auto g = sender_graph(cats, {});
    Community seven;
    seven.category = "racism";
    for (int i = 0; i < 7; ++i) seven.members.push_back("n" + std::to_string(i));
    Community three;
    three.category = "racism";
    three.members = {"n7", "n8", "n9"};
    EXPECT_NEAR(scatter_ratio(g, "racism", {seven}).value, 0.3, 1e-12);
    EXPECT_DOUBLE_EQ(scatter_ratio(g, "racism", {seven, three}).value, 0.0);
    EXPECT_DOUBLE_EQ(scatter_ratio(g, "racism", {}).value, 1.0);
    EXPECT_FALSE(scatter_ratio(g, "sexism", {}).defined);
}

// ---------------------------------------------------------------------------
// Reaction
// ---------------------------------------------------------------------------

namespace {

std::vector<DayDistribution> share_series(const char* first, const std::vector<double>& racism_shares) {
    std::vector<DayDistribution> out;
    Day d = th::day(first);
    for (double s : racism_shares) {
        out.push_back({d, {{"racism", "sexism"}, {s, 1.0 - s}, 10}});
        d += std::chrono::days{1};
    }
    return out;
}

}  // namespace

TEST(Reaction, Formula) {
    // Window: 2 days before, event day, 1 after.
    const auto w = th::window("2020-03-10", 2, 1);
    const auto r = reaction_index(share_series("2020-03-08", {0.1, 0.3, 0.25, 0.35}), w, "racism");
    EXPECT_NEAR(r.pre_mean.value, 0.2, 1e-12);
    EXPECT_NEAR(r.post_mean.value, 0.3, 1e-12);
    EXPECT_NEAR(r.value.value, 0.5, 1e-12);
    EXPECT_FALSE(r.saturated);
}

TEST(Reaction, Unchanged) {
    const auto r = reaction_index(share_series("2020-03-09", {0.4, 0.4, 0.4}), th::window("2020-03-10"), "racism");
    EXPECT_DOUBLE_EQ(r.value.value, 0.0);
}

TEST(Reaction, FloorAndCap) {
    const auto r = reaction_index(share_series("2020-03-09", {0.0, 0.1, 0.1}), th::window("2020-03-10"), "racism");
    EXPECT_NEAR(r.raw, 1e8, 1e-3);
    EXPECT_TRUE(r.saturated);
    EXPECT_DOUBLE_EQ(r.value.value, 1e6);
}

TEST(Reaction, EmptySideUndefined) {
    auto s = share_series("2020-03-09", {0.4, 0.4, 0.4});
    s[0].distribution.sample_count = 0;
    const auto r = reaction_index(s, th::window("2020-03-10"), "racism");
    EXPECT_FALSE(r.value.defined);
    EXPECT_FALSE(r.pre_mean.defined);
    EXPECT_TRUE(r.post_mean.defined);
}

// ---------------------------------------------------------------------------
// Comparisons
// ---------------------------------------------------------------------------

TEST(CompareDistributions, Delta) {
    const CategoryDistribution p{{"xenophobia", "racism"}, {0.40, 0.60}, 10};
    const CategoryDistribution q{{"xenophobia", "racism"}, {0.60, 0.40}, 10};
    const auto c = compare_distributions(p, q);
    EXPECT_NEAR(c.deltas[0], 0.20, 1e-12);
    EXPECT_NEAR(c.total_variation, 0.20, 1e-12);
    EXPECT_EQ(c.rank_from, (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(c.rank_to, (std::vector<std::size_t>{1, 2}));
}

TEST(CompareDistributions, IdentityAndDisjoint) {
    const CategoryDistribution p{{"a", "b"}, {1.0, 0.0}, 3};
    const CategoryDistribution q{{"a", "b"}, {0.0, 1.0}, 3};
    const auto same = compare_distributions(p, p);
    EXPECT_EQ(same.total_variation, 0.0);
    for (double d : same.deltas) EXPECT_EQ(d, 0.0);
    EXPECT_DOUBLE_EQ(compare_distributions(p, q).total_variation, 1.0);
}

TEST(CompareDistributions, RankTiesFollowCategoryOrder) {
    const CategoryDistribution p{{"a", "b", "c"}, {0.25, 0.5, 0.25}, 4};
    EXPECT_EQ(compare_distributions(p, p).rank_from, (std::vector<std::size_t>{2, 1, 3}));
}

TEST(CompareDistributions, MismatchedSets) {
    const CategoryDistribution p{{"a", "b"}, {1.0, 0.0}, 3};
    const CategoryDistribution q{{"a", "c"}, {1.0, 0.0}, 3};
    EXPECT_THROW(compare_distributions(p, q), ConfigError);
}

TEST(CompareDistributions, TotalVariationIsAMetric) {
    Rng rng(9);
    auto random_dist = [&] {
        std::vector<std::size_t> counts(4);
        for (auto& c : counts) c = rng.below(20);
        counts[0] += 1;
        return distribution_from_counts(CategorySet({{"a", "#000001"}, {"b", "#000002"}, {"c", "#000003"}, {"d", "#000004"}}),
                                        counts);
    };
    for (int t = 0; t < 300; ++t) {
        const auto p = random_dist(), q = random_dist(), r = random_dist();
        const double pq = compare_distributions(p, q).total_variation;
        EXPECT_NEAR(pq, compare_distributions(q, p).total_variation, 1e-12);
        EXPECT_LE(pq, compare_distributions(p, r).total_variation + compare_distributions(r, q).total_variation + 1e-12);
        EXPECT_EQ(compare_distributions(p, p).total_variation, 0.0);
    }
}

// ---------------------------------------------------------------------------
// Influencers
// ---------------------------------------------------------------------------

TEST(Influencers, StarHubFirst) {
    th::Builder b;
    for (int i = 0; i < 9; ++i) b.reply("s" + std::to_string(i), "racism", "h");
    const auto t = influencers_and_degrees(b.graph());
    ASSERT_FALSE(t.top_receivers.empty());
    EXPECT_EQ(t.top_receivers[0].user_id, "h");
    EXPECT_EQ(t.top_receivers[0].degree, 9u);
    EXPECT_EQ(t.degree_histogram.at(1), 9u);
    EXPECT_EQ(t.degree_histogram.at(9), 1u);
    ASSERT_EQ(t.top_senders.size(), 9u);
    EXPECT_EQ(t.top_senders[0].user_id, "s0");
}

TEST(Influencers, Empty) {
    const auto t = influencers_and_degrees(DailyGraph{});
    EXPECT_TRUE(t.top_senders.empty());
    EXPECT_TRUE(t.top_receivers.empty());
    EXPECT_TRUE(t.degree_histogram.empty());
    for (const auto& [k, v] : t.edge_kind_shares()) EXPECT_EQ(v, 0.0);
}

TEST(Influencers, EdgeKindBreakdown) {
    th::Builder b;
    for (int i = 0; i < 5; ++i) b.reply("a" + std::to_string(i), "racism", "h");
    for (int i = 0; i < 3; ++i) b.mention("b" + std::to_string(i), "racism", {"h"});
    for (int i = 0; i < 2; ++i) b.retweet("c" + std::to_string(i), "racism", "h");
    const auto shares = influencers_and_degrees(b.graph()).edge_kind_shares();
    EXPECT_DOUBLE_EQ(shares.at("reply"), 0.5);
    EXPECT_DOUBLE_EQ(shares.at("mention"), 0.3);
    EXPECT_DOUBLE_EQ(shares.at("retweet"), 0.2);
}

TEST(Influencers, TopNTruncates) {
    th::Builder b;
    for (int i = 0; i < 15; ++i) b.reply("s" + std::to_string(i), "racism", "h" + std::to_string(i % 2));
    EXPECT_EQ(influencers_and_degrees(b.graph(), 10).top_senders.size(), 10u);
    EXPECT_EQ(influencers_and_degrees(b.graph(), 3).top_senders.size(), 3u);
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

namespace {

bool all_finite(const nlohmann::json& j) {
    if (j.is_number_float()) return std::isfinite(j.get<double>());
    if (j.is_structured()) {
        for (const auto& v : j) {
            if (!all_finite(v)) return false;
        }
    }
    return true;
}

}  // namespace

TEST(Report, SchemaHasFourteenElements) {
    EXPECT_EQ(kElements.size(), 14u);
    std::set<std::string> keys;
    for (const auto& e : kElements) keys.insert(e.key);
    EXPECT_EQ(keys.size(), 14u);
    const auto cats = default_categories();
    const auto a = analyze_partition(partition({}, th::area(), th::window("2020-03-10")), cats);
    const auto j = to_json(build_report(a, cats));
    ASSERT_TRUE(j.contains("elements"));
    EXPECT_EQ(j["elements"].size(), 14u);
}

TEST(Report, EmptyPartitionAllUndefined) {
    const auto cats = default_categories();
    const auto a = analyze_partition(partition({}, th::area(), th::window("2020-03-10")), cats);
    const auto r = build_report(a, cats);
    EXPECT_EQ(r.days.size(), 3u);
    for (const auto& [k, covered] : element_coverage(r)) EXPECT_FALSE(covered) << k;
    for (const auto& d : r.days) {
        EXPECT_TRUE(d.dominance.empty());
        EXPECT_FALSE(d.polarization.ei().defined);
        EXPECT_FALSE(d.segmentation.modularity.defined);
    }
    EXPECT_TRUE(all_finite(to_json(r)));
}

TEST(Report, FullSyntheticRunCoversEveryElement) {
    SynthConfig sc;
    sc.seed = 3;
    sc.window = th::window("2020-03-10", 3, 3);
    sc.categories = default_categories();
    sc.communities = {{"xenophobia", 5, 1, 3, 0.8, 1, 1}, {"racism", 4, 3, 2, 0.8, 1, 0}, {"sexism", 4, 4, 1, 0.8, 1, 0}};
    sc.cross_edge_rate = 2.0;
    const auto out = generate(sc);
    const auto a = analyze_partition(partition(out.posts, {sc.area, {}, std::nullopt, std::nullopt}, sc.window), sc.categories);
    CategoryDistribution ref = distribution_from_counts(sc.categories, {1, 1, 1, 1, 1, 1});
    const auto r = build_report(a, sc.categories, {{"baseline", ref}});
    for (const auto& [k, covered] : element_coverage(r)) EXPECT_TRUE(covered) << k;
    EXPECT_TRUE(all_finite(to_json(r)));
    EXPECT_EQ(to_json(r).dump(), to_json(build_report(a, sc.categories, {{"baseline", ref}})).dump());
}

TEST(Report, SeriesCsv) {
    std::ostringstream out;
    write_series_csv(out, {{th::day("2020-03-10"), Metric::of(0.5)}, {th::day("2020-03-11"), Metric::undefined()}});
    EXPECT_EQ(out.str(), "day,value,defined\n2020-03-10,0.5,true\n2020-03-11,,false\n");
}
