// dfa: command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfa/pipeline.hpp"

namespace {

using dfa::fs::path;
using nlohmann::json;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k_min;
    std::optional<double> theta;
    std::optional<double> label;

    void apply(dfa::RunConfig& cfg) const {
        if (seed) cfg.seed = *seed;
        if (k_min) cfg.thresholds.k_min = *k_min;
        if (theta) cfg.thresholds.theta = *theta;
        if (label) cfg.thresholds.label = *label;
        cfg.thresholds.validate();
    }
};

void print_plan(const json& plan) { std::cout << plan.dump(2) << '\n'; }

json thresholds_json(const dfa::RunConfig& cfg) {
    return {{"label", cfg.thresholds.label}, {"k_min", cfg.thresholds.k_min}, {"theta", cfg.thresholds.theta}};
}

json partitions_json(const dfa::RunConfig& cfg) {
    json out = json::array();
    for (const auto& a : cfg.areas) {
        for (const auto& w : cfg.events) {
            out.push_back({{"area", a.name},
                           {"event", w.event_name},
                           {"first_day", dfa::format_day(w.first_day())},
                           {"last_day", dfa::format_day(w.last_day())},
                           {"dir", dfa::partition_dir(a, w)}});
        }
    }
    return out;
}

template <typename T>
std::vector<T> load_records(const path& in, bool strict) {
    auto result = dfa::read_records<T>(in);
    if (result.report.skipped > 0) {
        std::cerr << in.string() << ": skipped " << result.report.skipped << " malformed record(s)\n";
        for (const auto& issue : result.report.issues) std::cerr << "  record " << issue.record << ": " << issue.reason << '\n';
        if (strict) throw dfa::DataError(in.string() + ": malformed records present (--strict)");
    }
    return std::move(result.records);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discourse fragmentation analysis: synthesize, label, analyze and render daily interaction graphs."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dfa 1.0.0");

    std::string config_path;
    bool dry_run = false;
    bool strict = false;
    Overrides ov;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("-c,--config", config_path, "Run configuration (JSON)");
        if (config_required) opt->required();
        sub->add_flag("--dry-run", dry_run, "Print the resolved plan without writing anything");
        sub->add_option("--seed", ov.seed, "Override the configured seed");
    };

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic stream with planted communities");
    add_common(synth, true);
    std::string synth_out, synth_truth;
    synth->add_option("-o,--out", synth_out, "Output posts (.jsonl or .csv)")->required();
    synth->add_option("--truth", synth_truth, "Output ground truth (JSON)")->required();

    // classify
    auto* classify = app.add_subcommand("classify", "Label posts with the lexicon classifier and drop unlabeled ones");
    add_common(classify, false);
    std::string cls_in, cls_out, cls_lexicon, cls_report;
    classify->add_option("-i,--in", cls_in, "Input posts (.jsonl or .csv)")->required();
    classify->add_option("-o,--out", cls_out, "Output labeled posts (.jsonl or .csv)")->required();
    classify->add_option("--lexicon", cls_lexicon, "Lexicon JSON (overrides classifier.path)");
    classify->add_option("--report", cls_report, "Write the drop report here (JSON)");
    classify->add_option("--threshold", ov.label, "Label threshold");
    classify->add_flag("--strict", strict, "Fail on malformed records instead of skipping them");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Build daily graphs, communities, chains and the fragmentation report");
    add_common(analyze, true);
    std::string an_in, an_out;
    analyze->add_option("-i,--in", an_in, "Labeled posts (.jsonl or .csv)")->required();
    analyze->add_option("-o,--out", an_out, "Output directory")->required();
    analyze->add_option("--k-min", ov.k_min, "Minimum community size");
    analyze->add_option("--theta", ov.theta, "Jaccard threshold for chains");
    analyze->add_flag("--strict", strict, "Fail on malformed records instead of skipping them");

    // render
    auto* render = app.add_subcommand("render", "Render one day's snapshot or the chronological montage");
    add_common(render, true);
    std::string rd_in, rd_out, rd_day, rd_format = "svg";
    bool rd_montage = false;
    render->add_option("-i,--in", rd_in, "Labeled posts (.jsonl or .csv)")->required();
    render->add_option("-o,--out", rd_out, "Output directory")->required();
    auto* day_opt = render->add_option("--day", rd_day, "Day to render (YYYY-MM-DD)");
    auto* montage_opt = render->add_flag("--montage", rd_montage, "Render every window day into one grid");
    day_opt->excludes(montage_opt);
    render->add_option("--format", rd_format, "Snapshot format for --day")->check(CLI::IsMember({"svg", "dot"}));
    render->add_flag("--strict", strict, "Fail on malformed records instead of skipping them");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate the lexicon classifier on a held-out split");
    add_common(eval, false);
    std::string ev_corpus, ev_lexicon, ev_out;
    double ev_fraction = 0.8;
    bool ev_unstratified = false;
    eval->add_option("--corpus", ev_corpus, "Labeled texts (JSONL with text and label)")->required();
    eval->add_option("--lexicon", ev_lexicon, "Lexicon JSON (overrides classifier.path)");
    eval->add_option("--train-fraction", ev_fraction, "Fraction of each category kept for training")->check(CLI::Range(0.0, 1.0));
    eval->add_flag("--unstratified", ev_unstratified, "Split without stratifying by category");
    eval->add_option("-o,--out", ev_out, "Write the report here instead of stdout");
    eval->add_option("--threshold", ov.label, "Label threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        dfa::RunConfig cfg;
        if (!config_path.empty()) cfg = dfa::load_config(config_path);
        ov.apply(cfg);

        if (synth->parsed()) {
            auto scfg = dfa::synth_config(cfg);
            if (ov.seed) scfg.seed = *ov.seed;
            dfa::validate(scfg);
            if (dry_run) {
                print_plan({{"command", "synth"},
                            {"seed", scfg.seed},
                            {"area", scfg.area},
                            {"first_day", dfa::format_day(scfg.window.first_day())},
                            {"last_day", dfa::format_day(scfg.window.last_day())},
                            {"planted_communities", scfg.communities.size()},
                            {"writes", {synth_out, synth_truth}}});
                return 0;
            }
            const auto result = dfa::generate(scfg);
            dfa::write_file(synth_out, dfa::records_text(result.posts, dfa::format_from_path(synth_out)));
            dfa::write_file(synth_truth, dfa::to_json(result.truth, scfg).dump(2) + "\n");
            std::cerr << "synth: " << result.posts.size() << " posts, " << result.truth.communities.size()
                      << " planted communities\n";
            return 0;
        }

        if (classify->parsed()) {
            const path lex = cls_lexicon.empty() ? cfg.resolve(cfg.lexicon_path) : path(cls_lexicon);
            if (dry_run) {
                print_plan({{"command", "classify"},
                            {"in", cls_in},
                            {"lexicon", lex.string()},
                            {"threshold", cfg.thresholds.label},
                            {"categories", cfg.categories.labels()},
                            {"writes", cls_report.empty() ? json{cls_out} : json{cls_out, cls_report}}});
                return 0;
            }
            const auto classifier = dfa::load_classifier(cfg, lex);
            const auto posts = load_records<dfa::Post>(cls_in, strict);
            const auto result = dfa::label_posts(posts, classifier, cfg.categories, cfg.thresholds.label);
            dfa::write_file(cls_out, dfa::records_text(result.posts, dfa::format_from_path(cls_out)));
            const auto report = dfa::to_json(result.report).dump(2) + "\n";
            if (!cls_report.empty()) dfa::write_file(cls_report, report);
            std::cerr << "classify: " << result.report.labeled << " labeled, " << result.report.dropped << " dropped\n";
            return 0;
        }

        if (analyze->parsed()) {
            if (dry_run) {
                print_plan({{"command", "analyze"},
                            {"in", an_in},
                            {"out", an_out},
                            {"thresholds", thresholds_json(cfg)},
                            {"categories", cfg.categories.labels()},
                            {"partitions", partitions_json(cfg)}});
                return 0;
            }
            const auto posts = load_records<dfa::LabeledPost>(an_in, strict);
            const auto parts = dfa::run_analysis(cfg, posts);
            dfa::write_tree(an_out, dfa::analysis_files(cfg, parts));
            std::cerr << "analyze: " << posts.size() << " posts, " << parts.size() << " partition(s)\n";
            return 0;
        }

        if (render->parsed()) {
            dfa::RenderRequest req;
            if (!rd_day.empty()) {
                try {
                    req.day = dfa::parse_day(rd_day);
                } catch (const dfa::DataError& e) {
                    throw dfa::ConfigError(std::string("--day: ") + e.what());
                }
            } else if (!rd_montage) {
                throw dfa::ConfigError("render needs --day or --montage");
            }
            req.format = rd_format == "dot" ? dfa::RenderFormat::dot : dfa::RenderFormat::svg;
            if (dry_run) {
                print_plan({{"command", "render"},
                            {"in", rd_in},
                            {"out", rd_out},
                            {"mode", req.day ? "day" : "montage"},
                            {"day", req.day ? json(dfa::format_day(*req.day)) : json(nullptr)},
                            {"format", rd_format},
                            {"partitions", partitions_json(cfg)}});
                return 0;
            }
            const auto posts = load_records<dfa::LabeledPost>(rd_in, strict);
            dfa::write_tree(rd_out, dfa::render_files(cfg, posts, req));
            return 0;
        }

        if (eval->parsed()) {
            const path lex = ev_lexicon.empty() ? cfg.resolve(cfg.lexicon_path) : path(ev_lexicon);
            dfa::EvalConfig ec{ev_fraction, cfg.seed, !ev_unstratified, cfg.thresholds.label};
            if (dry_run) {
                print_plan({{"command", "eval"},
                            {"corpus", ev_corpus},
                            {"lexicon", lex.string()},
                            {"train_fraction", ec.train_fraction},
                            {"seed", ec.seed},
                            {"stratified", ec.stratified},
                            {"writes", ev_out.empty() ? json::array() : json{ev_out}}});
                return 0;
            }
            const auto classifier = dfa::load_classifier(cfg, lex);
            std::istringstream in(dfa::read_file(ev_corpus));
            const auto corpus = dfa::load_eval_corpus(in);
            const auto report = dfa::to_json(dfa::evaluate(classifier, cfg.categories, corpus, ec), cfg.categories).dump(2) + "\n";
            if (ev_out.empty()) {
                std::cout << report;
            } else {
                dfa::write_file(ev_out, report);
            }
            return 0;
        }
    } catch (const dfa::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const dfa::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dfa::fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
