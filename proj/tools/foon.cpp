#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foon/bench.hpp"
#include "foon/model.hpp"
#include "foon/parser.hpp"
#include "foon/retrieval.hpp"
#include "foon/similarity.hpp"
#include "foon/transform.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

foon::HierarchyLevel to_level(int level) { return foon::level_from_int(level); }

foon::Graph load_graph(const std::string& path, int level) {
    foon::Subgraph subgraph = foon::parse_subgraph(foon::read_text_file(path), path);
    return foon::merge(std::vector<foon::Subgraph>{std::move(subgraph)}, to_level(level));
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        foon::write_text_file(out_path, content);
}

std::string graph_to_text(const foon::Graph& g) {
    foon::Subgraph s;
    s.units = g.units();
    return foon::serialize_subgraph(s);
}

std::vector<std::string> node_labels(const foon::Graph& g) {
    std::set<std::string> labels;
    for (const auto& unit : g.units()) {
        for (const auto& node : unit.inputs)
            labels.insert(node.label);
        for (const auto& node : unit.outputs)
            labels.insert(node.label);
    }
    return {labels.begin(), labels.end()};
}

std::map<std::string, double> parse_motion_costs(std::string_view text) {
    std::map<std::string, double> costs;
    int line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos)
            throw foon::ParseError("expected <motion>\\t<cost>", line_number);
        std::string label = foon::normalize_label(line.substr(0, tab));
        std::string value{line.substr(tab + 1)};
        try {
            costs[label] = std::stod(value);
        } catch (const std::exception&) {
            throw foon::ParseError("malformed cost \"" + value + '"', line_number);
        }
    }
    return costs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FOON knowledge-graph engine: parse, merge, abstract, expand, generalize "
                 "and query functional object-oriented networks"};
    app.set_version_flag("--version", "foon 1.0.0");
    app.require_subcommand(1);

    int exit_code = 0;

    // validate
    {
        auto* cmd = app.add_subcommand("validate", "Parse a subgraph file and report problems");
        auto file = std::make_shared<std::string>();
        auto level = std::make_shared<int>(3);
        cmd->add_option("file", *file, "subgraph file")->required();
        cmd->add_option("--level", *level, "hierarchy level")->check(CLI::Range(1, 3));
        cmd->callback([file, level, &exit_code] {
            foon::Graph g = load_graph(*file, *level);
            std::cout << "ok: " << g.unit_count() << " units\n";
            exit_code = 0;
        });
    }

    // stats
    {
        auto* cmd = app.add_subcommand("stats", "Print node and unit counts of a network");
        auto file = std::make_shared<std::string>();
        auto level = std::make_shared<int>(3);
        cmd->add_option("--graph", *file, "subgraph file")->required();
        cmd->add_option("--level", *level, "hierarchy level")->check(CLI::Range(1, 3));
        cmd->callback([file, level, &exit_code] {
            foon::GraphStats stats = foon::graph_stats(load_graph(*file, *level));
            std::cout << "objects=" << stats.object_node_count
                      << " motions=" << stats.motion_node_count
                      << " units=" << stats.unit_count << "\n";
            exit_code = 0;
        });
    }

    // merge
    {
        auto* cmd = app.add_subcommand("merge", "Merge subgraph files, dropping duplicate units");
        auto files = std::make_shared<std::vector<std::string>>();
        auto out = std::make_shared<std::string>();
        auto level = std::make_shared<int>(3);
        cmd->add_option("files", *files, "subgraph files")->required();
        cmd->add_option("--out", *out, "output file (stdout when omitted)");
        cmd->add_option("--level", *level, "hierarchy level for duplicate detection")
            ->check(CLI::Range(1, 3));
        cmd->callback([files, out, level, &exit_code] {
            std::vector<foon::Subgraph> subgraphs;
            for (const auto& path : *files)
                subgraphs.push_back(foon::parse_subgraph(foon::read_text_file(path), path));
            foon::Graph merged = foon::merge(subgraphs, to_level(*level));
            write_output(*out, graph_to_text(merged));
            exit_code = 0;
        });
    }

    // abstract
    {
        auto* cmd = app.add_subcommand("abstract", "Rewrite a network to a coarser level");
        auto file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto level = std::make_shared<int>(3);
        cmd->add_option("file", *file, "subgraph file")->required();
        cmd->add_option("--out", *out, "output file (stdout when omitted)");
        cmd->add_option("--level", *level, "target hierarchy level")->check(CLI::Range(1, 3));
        cmd->callback([file, out, level, &exit_code] {
            foon::Graph g = load_graph(*file, 3);
            foon::Graph abstracted = foon::abstract_to_level(g, to_level(*level));
            write_output(*out, graph_to_text(abstracted));
            exit_code = 0;
        });
    }

    // expand
    {
        auto* cmd = app.add_subcommand("expand",
                                       "Add units with similar objects substituted in");
        auto file = std::make_shared<std::string>();
        auto index = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto level = std::make_shared<int>(3);
        auto threshold = std::make_shared<double>(0.89);
        auto max_units = std::make_shared<std::int64_t>(-1);
        cmd->add_option("file", *file, "subgraph file")->required();
        cmd->add_option("--index", *index, "similarity matrix file")->required();
        cmd->add_option("--threshold", *threshold, "similarity cutoff in [0,1]");
        cmd->add_option("--max-units", *max_units, "cap on generated units");
        cmd->add_option("--out", *out, "output file (stdout when omitted)");
        cmd->add_option("--level", *level, "hierarchy level")->check(CLI::Range(1, 3));
        cmd->callback([file, index, out, level, threshold, max_units, &exit_code] {
            foon::Graph g = load_graph(*file, *level);
            foon::SimilarityMatrix matrix =
                foon::parse_similarity_matrix(foon::read_text_file(*index));
            foon::SimilarityIndex idx =
                foon::build_similarity_index(matrix, node_labels(g), *threshold);
            foon::ExpansionConfig cfg;
            cfg.threshold = *threshold;
            if (*max_units >= 0)
                cfg.max_units = static_cast<std::size_t>(*max_units);
            foon::Graph expanded = foon::expand(g, idx, cfg);
            write_output(*out, graph_to_text(expanded));
            exit_code = 0;
        });
    }

    // generalize
    {
        auto* cmd = app.add_subcommand("generalize",
                                       "Relabel categorized objects to their categories");
        auto file = std::make_shared<std::string>();
        auto categories = std::make_shared<std::string>();
        auto mode = std::make_shared<std::string>("first");
        auto out = std::make_shared<std::string>();
        auto level = std::make_shared<int>(3);
        cmd->add_option("file", *file, "subgraph file")->required();
        cmd->add_option("--categories", *categories, "category index file")->required();
        cmd->add_option("--mode", *mode, "first | all")
            ->check(CLI::IsMember({"first", "all"}));
        cmd->add_option("--out", *out, "output file (stdout when omitted)");
        cmd->add_option("--level", *level, "hierarchy level")->check(CLI::Range(1, 3));
        cmd->callback([file, categories, mode, out, level, &exit_code] {
            foon::Graph g = load_graph(*file, *level);
            foon::CategoryIndex cats =
                foon::parse_category_index(foon::read_text_file(*categories));
            foon::GeneralizeMode m = *mode == "all" ? foon::GeneralizeMode::AllCombinations
                                                    : foon::GeneralizeMode::FirstCategory;
            foon::Graph generalized = foon::generalize(g, cats, m);
            write_output(*out, graph_to_text(generalized));
            exit_code = 0;
        });
    }

    // similarity
    {
        auto* cmd = app.add_subcommand("similarity",
                                       "Build a neighbor index from a taxonomy");
        auto taxonomy = std::make_shared<std::string>();
        auto objects = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto threshold = std::make_shared<double>(0.89);
        auto level = std::make_shared<int>(3);
        cmd->add_option("--taxonomy", *taxonomy, "taxonomy file")->required();
        cmd->add_option("--objects", *objects, "object label list file")->required();
        cmd->add_option("--threshold", *threshold, "similarity cutoff in [0,1]");
        cmd->add_option("--out", *out, "output file (stdout when omitted)");
        cmd->add_option("--level", *level, "hierarchy level (unused, kept uniform)")
            ->check(CLI::Range(1, 3));
        cmd->callback([taxonomy, objects, out, threshold, &exit_code] {
            foon::Taxonomy t = foon::parse_taxonomy(foon::read_text_file(*taxonomy));
            std::vector<std::string> labels =
                foon::parse_label_list(foon::read_text_file(*objects));
            foon::SimilarityIndex idx = foon::build_similarity_index(t, labels, *threshold);
            for (const auto& label : idx.unresolved)
                std::cerr << "unresolved: " << label << "\n";
            write_output(*out, foon::serialize_similarity_index(idx));
            exit_code = 0;
        });
    }

    // retrieve
    {
        auto* cmd = app.add_subcommand("retrieve",
                                       "Search for a task tree producing a goal object");
        auto file = std::make_shared<std::string>();
        auto goal = std::make_shared<std::string>();
        auto kitchen = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto costs_path = std::make_shared<std::string>();
        auto budget = std::make_shared<std::uint64_t>(1'000'000);
        auto budget_ms = std::make_shared<double>(-1.0);
        auto level = std::make_shared<int>(3);
        cmd->add_option("--graph", *file, "subgraph file")->required();
        cmd->add_option("--goal", *goal, "goal spec: label[:state,...][:I=ing,...][:M]")
            ->required();
        cmd->add_option("--kitchen", *kitchen, "kitchen manifest file")->required();
        cmd->add_option("--budget", *budget, "max candidate-unit visits");
        cmd->add_option("--budget-ms", *budget_ms, "wall-clock limit in milliseconds");
        cmd->add_option("--motion-costs", *costs_path,
                        "motion cost table (<motion>\\t<cost> rows) for tie-breaking");
        cmd->add_option("--out", *out, "write the task tree as a subgraph file");
        cmd->add_option("--level", *level, "hierarchy level")->check(CLI::Range(1, 3));
        cmd->callback([file, goal, kitchen, out, costs_path, budget, budget_ms, level,
                       &exit_code] {
            foon::Graph g = load_graph(*file, *level);
            foon::ObjectNode goal_node = foon::parse_goal_spec(*goal);
            foon::Kitchen k = foon::parse_kitchen(foon::read_text_file(*kitchen));
            foon::SearchBudget b;
            b.max_expansions = *budget;
            if (*budget_ms >= 0.0)
                b.wall_clock_limit_ms = *budget_ms;
            std::map<std::string, double> costs;
            bool have_costs = !costs_path->empty();
            if (have_costs)
                costs = parse_motion_costs(foon::read_text_file(*costs_path));
            foon::RetrievalOutcome outcome = foon::retrieve_task_tree(
                g, goal_node, k, b, have_costs ? &costs : nullptr);
            switch (outcome.status) {
            case foon::RetrievalOutcome::Status::Solved: {
                std::cout << "solved units=" << outcome.tree->units.size()
                          << " expansions=" << outcome.expansions_used
                          << " elapsed_ms=" << foon::format_double(outcome.elapsed_ms) << "\n";
                if (!out->empty()) {
                    foon::Subgraph tree;
                    tree.units = outcome.tree->units;
                    foon::write_text_file(*out, foon::serialize_subgraph(tree));
                }
                exit_code = 0;
                break;
            }
            case foon::RetrievalOutcome::Status::Unsolvable:
                std::cout << "unsolvable expansions=" << outcome.expansions_used << "\n";
                exit_code = 1;
                break;
            case foon::RetrievalOutcome::Status::TimedOut:
                std::cout << "timed_out expansions=" << outcome.expansions_used << "\n";
                exit_code = 2;
                break;
            }
        });
    }

    // bench
    {
        auto* cmd = app.add_subcommand("bench", "Run the seeded retrieval experiment");
        auto config = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto csv = std::make_shared<bool>(false);
        auto level = std::make_shared<int>(0);
        cmd->add_option("--config", *config, "experiment config file")->required();
        cmd->add_option("--out", *out, "output file (stdout when omitted)");
        cmd->add_flag("--csv", *csv, "emit summary tables instead of JSON lines");
        cmd->add_option("--level", *level, "override the config hierarchy level")
            ->check(CLI::Range(1, 3));
        cmd->callback([config, out, csv, level, &exit_code] {
            std::optional<foon::HierarchyLevel> override;
            if (*level != 0)
                override = to_level(*level);
            foon::LoadedExperiment loaded = foon::load_experiment(*config, override);
            foon::ExperimentReport report =
                foon::run_experiment(loaded.graphs, loaded.categories, loaded.cfg);
            write_output(*out, *csv ? foon::report_to_csv(report)
                                    : foon::report_to_jsonl(report));
            exit_code = 0;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const foon::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return exit_code;
}
