#include "foon/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "foon/transform.hpp"

namespace foon {

namespace {

const char* status_name(RetrievalOutcome::Status status) {
    switch (status) {
    case RetrievalOutcome::Status::Solved: return "solved";
    case RetrievalOutcome::Status::Unsolvable: return "unsolvable";
    case RetrievalOutcome::Status::TimedOut: return "timed_out";
    }
    return "unknown";
}

std::size_t resolve_kitchen_size(const ExperimentConfig& cfg) {
    if (cfg.kitchen_count.has_value() == cfg.kitchen_fraction.has_value())
        throw ValidationError("set exactly one of kitchen count and kitchen fraction");
    std::size_t pool = cfg.kitchen_pool.items.size();
    if (cfg.kitchen_count) {
        if (*cfg.kitchen_count > pool)
            throw ValidationError("kitchen size exceeds the pool size");
        return *cfg.kitchen_count;
    }
    if (*cfg.kitchen_fraction < 0.0 || *cfg.kitchen_fraction > 1.0)
        throw ValidationError("kitchen fraction out of range [0,1]");
    return static_cast<std::size_t>(std::llround(*cfg.kitchen_fraction * pool));
}

} // namespace

std::vector<IdentityKey> eligible_goal_identities(const Graph& g) {
    std::set<std::string> eligible;
    for (const auto& unit : g.units()) {
        std::set<std::string> inputs;
        for (const auto& node : unit.inputs)
            inputs.insert(node_identity(node, g.level()).value);
        for (const auto& node : unit.outputs) {
            std::string key = node_identity(node, g.level()).value;
            if (!inputs.count(key))
                eligible.insert(std::move(key));
        }
    }
    std::vector<IdentityKey> result;
    for (auto& key : eligible)
        result.push_back(IdentityKey{key});
    return result;
}

std::vector<IdentityKey> select_goals(const Graph& g, std::size_t n, Rng& rng) {
    std::vector<IdentityKey> pool = eligible_goal_identities(g);
    if (n > pool.size())
        throw ValidationError("requested " + std::to_string(n) + " goals but only " +
                              std::to_string(pool.size()) + " identities are eligible");
    std::vector<IdentityKey> drawn;
    drawn.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pick = rng.bounded(pool.size());
        drawn.push_back(std::move(pool[pick]));
        pool.erase(pool.begin() + static_cast<long>(pick));
    }
    return drawn;
}

Kitchen select_kitchen(const Kitchen& pool, std::size_t size, Rng& rng) {
    if (size > pool.items.size())
        throw ValidationError("kitchen size exceeds the pool size");
    std::vector<ObjectNode> items = pool.items;
    std::sort(items.begin(), items.end(), [](const ObjectNode& a, const ObjectNode& b) {
        return node_identity(a, HierarchyLevel::L3).value <
               node_identity(b, HierarchyLevel::L3).value;
    });
    Kitchen drawn;
    drawn.items.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t pick = rng.bounded(items.size());
        drawn.items.push_back(std::move(items[pick]));
        items.erase(items.begin() + static_cast<long>(pick));
    }
    return drawn;
}

ExperimentReport run_experiment(const BenchGraphs& graphs, const CategoryIndex& cats,
                                const ExperimentConfig& cfg) {
    if (cfg.trials < 1)
        throw ValidationError("trials must be at least 1");
    if (cfg.goals_per_trial < 1)
        throw ValidationError("goals_per_trial must be at least 1");
    for (const Graph* g : {&graphs.reg, &graphs.exp, &graphs.gen}) {
        if (g->level() != cfg.level)
            throw ValidationError("graph level does not match the experiment level");
    }
    const std::size_t kitchen_size = resolve_kitchen_size(cfg);

    ExperimentReport report;
    report.trials = cfg.trials;
    report.goals_per_trial = cfg.goals_per_trial;
    report.seed = cfg.seed;
    report.budget_expansions = cfg.budget.max_expansions;
    report.level = static_cast<int>(cfg.level);
    report.kitchen_pool_size = cfg.kitchen_pool.items.size();
    report.kitchen_size = kitchen_size;

    struct NamedGraph {
        const char* name;
        const Graph* graph;
    };
    const NamedGraph named[3] = {{"reg", &graphs.reg}, {"exp", &graphs.exp}, {"gen", &graphs.gen}};

    struct Tally {
        int successes_total = 0;
        double elapsed_total = 0.0;
        std::vector<int> successes_per_trial;
    };
    Tally tallies[3];

    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(t));
        Kitchen kitchen = select_kitchen(cfg.kitchen_pool, kitchen_size, rng);
        std::vector<IdentityKey> goals =
            select_goals(graphs.reg, static_cast<std::size_t>(cfg.goals_per_trial), rng);

        TrialReport trial;
        trial.trial = t + 1;
        for (const auto& item : kitchen.items)
            trial.kitchen.push_back(display_identity(item, cfg.level));

        std::vector<ObjectNode> goal_nodes;
        for (const auto& key : goals) {
            const ObjectNode* node = graphs.reg.representative(key);
            goal_nodes.push_back(*node);
            trial.goals.push_back(display_identity(*node, cfg.level));
        }

        for (int gi = 0; gi < 3; ++gi) {
            GraphTrialSummary summary;
            summary.graph = named[gi].name;
            double elapsed_sum = 0.0;
            for (std::size_t i = 0; i < goal_nodes.size(); ++i) {
                RetrievalOutcome outcome;
                if (gi == 2) {
                    auto [mapped_kitchen, mapped_goal] =
                        categorize_query(kitchen, goal_nodes[i], cats,
                                         GeneralizeMode::FirstCategory);
                    outcome = retrieve_task_tree(*named[gi].graph, mapped_goal, mapped_kitchen,
                                                 cfg.budget);
                } else {
                    outcome = retrieve_task_tree(*named[gi].graph, goal_nodes[i], kitchen,
                                                 cfg.budget);
                }
                GoalResult result;
                result.goal = trial.goals[i];
                result.status = outcome.status;
                result.elapsed_ms = cfg.zero_timing ? 0.0 : outcome.elapsed_ms;
                result.expansions = outcome.expansions_used;
                switch (outcome.status) {
                case RetrievalOutcome::Status::Solved: ++summary.successes; break;
                case RetrievalOutcome::Status::Unsolvable: ++summary.unsolvables; break;
                case RetrievalOutcome::Status::TimedOut: ++summary.timeouts; break;
                }
                elapsed_sum += result.elapsed_ms;
                summary.results.push_back(std::move(result));
            }
            summary.mean_ms = elapsed_sum / static_cast<double>(goal_nodes.size());
            tallies[gi].successes_total += summary.successes;
            tallies[gi].elapsed_total += elapsed_sum;
            tallies[gi].successes_per_trial.push_back(summary.successes);
            trial.graphs.push_back(std::move(summary));
        }
        report.trial_reports.push_back(std::move(trial));
    }

    for (int gi = 0; gi < 3; ++gi) {
        GraphAggregate aggregate;
        aggregate.graph = named[gi].name;
        aggregate.successes_total = tallies[gi].successes_total;
        aggregate.mean_ms = tallies[gi].elapsed_total /
                            static_cast<double>(cfg.trials * cfg.goals_per_trial);
        aggregate.successes_per_trial = std::move(tallies[gi].successes_per_trial);
        report.aggregates.push_back(std::move(aggregate));
    }
    return report;
}

std::string report_to_jsonl(const ExperimentReport& report) {
    using nlohmann::json;
    std::string out;
    auto emit = [&out](const json& record) {
        out += record.dump();
        out.push_back('\n');
    };

    emit(json{{"record", "meta"},
              {"trials", report.trials},
              {"goals_per_trial", report.goals_per_trial},
              {"seed", report.seed},
              {"budget_expansions", report.budget_expansions},
              {"level", report.level},
              {"kitchen_pool_size", report.kitchen_pool_size},
              {"kitchen_size", report.kitchen_size}});

    for (const auto& trial : report.trial_reports) {
        emit(json{{"record", "trial_setup"},
                  {"trial", trial.trial},
                  {"kitchen", trial.kitchen},
                  {"goals", trial.goals}});
        for (const auto& summary : trial.graphs) {
            for (const auto& result : summary.results) {
                emit(json{{"record", "retrieval"},
                          {"trial", trial.trial},
                          {"graph", summary.graph},
                          {"goal", result.goal},
                          {"status", status_name(result.status)},
                          {"elapsed_ms", result.elapsed_ms},
                          {"expansions", result.expansions}});
            }
            emit(json{{"record", "trial_summary"},
                      {"trial", trial.trial},
                      {"graph", summary.graph},
                      {"successes", summary.successes},
                      {"timeouts", summary.timeouts},
                      {"unsolvables", summary.unsolvables},
                      {"mean_ms", summary.mean_ms}});
        }
    }
    for (const auto& aggregate : report.aggregates) {
        emit(json{{"record", "aggregate"},
                  {"graph", aggregate.graph},
                  {"successes_total", aggregate.successes_total},
                  {"mean_ms", aggregate.mean_ms},
                  {"successes_per_trial", aggregate.successes_per_trial}});
    }
    return out;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "trial,reg_successes,exp_successes,gen_successes\n";
    for (const auto& trial : report.trial_reports) {
        out += std::to_string(trial.trial);
        for (const auto& summary : trial.graphs) {
            out.push_back(',');
            out += std::to_string(summary.successes);
        }
        out.push_back('\n');
    }
    out += "\ngraph,mean_ms\n";
    for (const auto& aggregate : report.aggregates) {
        out += aggregate.graph;
        out.push_back(',');
        out += format_double(aggregate.mean_ms);
        out.push_back('\n');
    }
    return out;
}

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    return text;
}

template <typename T>
T parse_number(std::string_view value, const char* key, int line) {
    T parsed{};
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || end != value.data() + value.size())
        throw ParseError(std::string("malformed value for ") + key, line);
    return parsed;
}

std::string resolve_path(std::string_view value, const std::string& base_dir) {
    std::filesystem::path p{std::string(value)};
    if (p.is_absolute() || base_dir.empty())
        return p.string();
    return (std::filesystem::path(base_dir) / p).string();
}

} // namespace

BenchFileConfig parse_bench_config(std::string_view text, const std::string& base_dir) {
    BenchFileConfig config;
    config.cfg.budget.max_expansions = 1'000'000;
    int line_number = 0;
    std::size_t pos = 0;
    std::set<std::string> seen;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_number;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key = value", line_number);
        std::string key{trim(line.substr(0, eq))};
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("expected key = value", line_number);
        if (!seen.insert(key).second)
            throw ParseError("duplicate key \"" + key + '"', line_number);

        if (key == "reg") {
            config.reg_path = resolve_path(value, base_dir);
        } else if (key == "exp") {
            config.exp_path = resolve_path(value, base_dir);
        } else if (key == "gen") {
            config.gen_path = resolve_path(value, base_dir);
        } else if (key == "categories") {
            config.categories_path = resolve_path(value, base_dir);
        } else if (key == "kitchen_pool") {
            config.kitchen_pool_path = resolve_path(value, base_dir);
        } else if (key == "kitchen_size") {
            if (value.find('.') != std::string_view::npos)
                config.cfg.kitchen_fraction = parse_number<double>(value, "kitchen_size",
                                                                   line_number);
            else
                config.cfg.kitchen_count = parse_number<std::size_t>(value, "kitchen_size",
                                                                     line_number);
        } else if (key == "seed") {
            config.cfg.seed = parse_number<std::uint64_t>(value, "seed", line_number);
        } else if (key == "trials") {
            config.cfg.trials = parse_number<int>(value, "trials", line_number);
        } else if (key == "goals_per_trial") {
            config.cfg.goals_per_trial = parse_number<int>(value, "goals_per_trial",
                                                           line_number);
        } else if (key == "level") {
            config.cfg.level = level_from_int(parse_number<int>(value, "level", line_number));
        } else if (key == "budget_expansions") {
            config.cfg.budget.max_expansions =
                parse_number<std::uint64_t>(value, "budget_expansions", line_number);
        } else if (key == "budget_ms") {
            config.cfg.budget.wall_clock_limit_ms =
                parse_number<double>(value, "budget_ms", line_number);
        } else if (key == "zero_timing") {
            config.cfg.zero_timing = parse_number<int>(value, "zero_timing", line_number) != 0;
        } else {
            throw ParseError("unknown key \"" + key + '"', line_number);
        }
    }
    const std::pair<const char*, const std::string*> required[] = {
        {"reg", &config.reg_path},
        {"exp", &config.exp_path},
        {"gen", &config.gen_path},
        {"kitchen_pool", &config.kitchen_pool_path},
    };
    for (const auto& [key, path] : required) {
        if (path->empty())
            throw ParseError(std::string("missing required key \"") + key + '"', line_number);
    }
    if (!config.cfg.kitchen_count && !config.cfg.kitchen_fraction)
        throw ParseError("missing required key \"kitchen_size\"", line_number);
    return config;
}

LoadedExperiment load_experiment(const std::string& config_path,
                                 std::optional<HierarchyLevel> level_override) {
    std::string base_dir = std::filesystem::path(config_path).parent_path().string();
    BenchFileConfig file = parse_bench_config(read_text_file(config_path), base_dir);
    if (level_override)
        file.cfg.level = *level_override;

    auto load_graph = [&file](const std::string& path) {
        Subgraph subgraph = parse_subgraph(read_text_file(path), path);
        return merge(std::vector<Subgraph>{std::move(subgraph)}, file.cfg.level);
    };
    LoadedExperiment loaded;
    loaded.graphs.reg = load_graph(file.reg_path);
    loaded.graphs.exp = load_graph(file.exp_path);
    loaded.graphs.gen = load_graph(file.gen_path);
    if (!file.categories_path.empty())
        loaded.categories = parse_category_index(read_text_file(file.categories_path));
    loaded.cfg = std::move(file.cfg);
    loaded.cfg.kitchen_pool = parse_kitchen(read_text_file(file.kitchen_pool_path));
    return loaded;
}

} // namespace foon
