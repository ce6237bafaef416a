#ifndef FOON_BENCH_HPP
#define FOON_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "foon/model.hpp"
#include "foon/parser.hpp"
#include "foon/retrieval.hpp"
#include "foon/rng.hpp"

namespace foon {

/// The three networks a trial queries, all at the same hierarchy level.
struct BenchGraphs {
    Graph reg;  // merged network as annotated
    Graph exp;  // similarity-expanded variant
    Graph gen;  // category-compressed variant
};

struct ExperimentConfig {
    int trials = 10;
    int goals_per_trial = 100;
    Kitchen kitchen_pool;
    std::optional<std::size_t> kitchen_count;  // exactly one of these two is set
    std::optional<double> kitchen_fraction;    // of the pool size, rounded to nearest
    std::uint64_t seed = 0;
    SearchBudget budget;
    HierarchyLevel level = HierarchyLevel::L2;
    bool zero_timing = false;  // zero every wall-clock field for byte-stable reports
};

struct GoalResult {
    std::string goal;  // display identity at the experiment level
    RetrievalOutcome::Status status = RetrievalOutcome::Status::Unsolvable;
    double elapsed_ms = 0.0;
    std::uint64_t expansions = 0;
};

struct GraphTrialSummary {
    std::string graph;  // "reg", "exp" or "gen"
    int successes = 0;
    int timeouts = 0;
    int unsolvables = 0;
    double mean_ms = 0.0;
    std::vector<GoalResult> results;  // one per goal, goal draw order
};

struct TrialReport {
    int trial = 1;  // 1-based
    std::vector<std::string> kitchen;  // display identities, draw order
    std::vector<std::string> goals;    // display identities, draw order
    std::vector<GraphTrialSummary> graphs;  // reg, exp, gen
};

struct GraphAggregate {
    std::string graph;
    int successes_total = 0;
    double mean_ms = 0.0;  // pooled over every retrieval of this graph
    std::vector<int> successes_per_trial;
};

struct ExperimentReport {
    int trials = 0;
    int goals_per_trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t budget_expansions = 0;
    int level = 2;
    std::size_t kitchen_pool_size = 0;
    std::size_t kitchen_size = 0;  // resolved per-trial sample size
    std::vector<TrialReport> trial_reports;
    std::vector<GraphAggregate> aggregates;
};

/// Identities eligible as benchmark goals: outputs of some unit that does
/// not also consume them (objects never transformed into do not count).
std::vector<IdentityKey> eligible_goal_identities(const Graph& g);

/// Draws n distinct goals uniformly without replacement from the eligible
/// identities of g, iterated in sorted order for determinism.
std::vector<IdentityKey> select_goals(const Graph& g, std::size_t n, Rng& rng);

/// Draws `size` pool items uniformly without replacement; the pool is
/// iterated in sorted identity order for determinism.
Kitchen select_kitchen(const Kitchen& pool, std::size_t size, Rng& rng);

/// Runs the full experiment: per trial, one sampled kitchen and goal set
/// shared by all three graphs; GEN queries are first-category-mapped through
/// `cats`. Trial t draws from the (cfg.seed, t) substream, kitchen first.
ExperimentReport run_experiment(const BenchGraphs& graphs, const CategoryIndex& cats,
                                const ExperimentConfig& cfg);

/// Line-delimited JSON: a meta record, then per trial a setup record, one
/// record per retrieval, and per-graph trial summaries, then per-graph
/// aggregate records. Byte-stable for equal configs when timing is zeroed.
std::string report_to_jsonl(const ExperimentReport& report);

/// Two summary blocks: successes per trial per graph, then mean retrieval
/// time per graph.
std::string report_to_csv(const ExperimentReport& report);

/// Key = value configuration file naming the graph/category/kitchen inputs
/// and the experiment parameters. Relative paths resolve against the
/// config file's directory.
struct BenchFileConfig {
    std::string reg_path;
    std::string exp_path;
    std::string gen_path;
    std::string categories_path;  // optional, empty = no categories
    std::string kitchen_pool_path;
    ExperimentConfig cfg;
};

BenchFileConfig parse_bench_config(std::string_view text, const std::string& base_dir);

/// Reads the config file, loads every referenced input at cfg.level (or the
/// override when given) and returns the ready-to-run experiment.
struct LoadedExperiment {
    BenchGraphs graphs;
    CategoryIndex categories;
    ExperimentConfig cfg;
};

LoadedExperiment load_experiment(const std::string& config_path,
                                 std::optional<HierarchyLevel> level_override = std::nullopt);

} // namespace foon

#endif
