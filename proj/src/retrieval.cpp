#include "foon/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace foon {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> distinct_input_keys(const FunctionalUnit& unit, HierarchyLevel level) {
    std::vector<std::string> keys;
    for (const auto& node : unit.inputs) {
        std::string key = node_identity(node, level).value;
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            keys.push_back(std::move(key));
    }
    return keys;
}

struct BudgetExhausted {};

class Searcher {
public:
    Searcher(const Graph& g, std::set<std::string> kitchen, const SearchBudget& budget,
             const std::map<std::string, double>* motion_costs)
        : g_(g), kitchen_(std::move(kitchen)), budget_(budget), costs_(motion_costs),
          start_(Clock::now()) {}

    struct Result {
        bool solved = false;
        bool tainted = false;             // failure depended on the current path
        std::vector<std::uint32_t> units; // executable order, deduplicated
    };

    Result solve(const std::string& key) {
        if (kitchen_.count(key))
            return {true, false, {}};
        if (auto it = memo_.find(key); it != memo_.end()) {
            if (it->second.solved)
                return {true, false, it->second.units};
            return {false, false, {}};
        }
        if (in_progress_.count(key))
            return {false, true, {}};

        in_progress_.insert(key);
        std::vector<std::uint32_t> remaining = g_.producers_of(IdentityKey{key});
        bool tainted = false;
        while (!remaining.empty()) {
            std::size_t pick = best_candidate(remaining);
            std::uint32_t unit_index = remaining[pick];
            remaining.erase(remaining.begin() + static_cast<long>(pick));
            charge_expansion();
            Result attempt = try_unit(unit_index);
            if (attempt.solved) {
                attempt.units.push_back(unit_index);
                dedup_keep_first(attempt.units);
                memo_.emplace(key, Memo{true, attempt.units});
                in_progress_.erase(key);
                return {true, false, std::move(attempt.units)};
            }
            tainted = tainted || attempt.tainted;
        }
        in_progress_.erase(key);
        if (!tainted)
            memo_.emplace(key, Memo{false, {}});
        return {false, tainted, {}};
    }

    std::uint64_t expansions() const { return expansions_; }

private:
    struct Memo {
        bool solved = false;
        std::vector<std::uint32_t> units;
    };

    // Screens the unit's inputs breadth-first, then descends into the ones
    // still unresolved in queue order.
    Result try_unit(std::uint32_t unit_index) {
        const FunctionalUnit& unit = g_.units()[unit_index];
        std::vector<std::uint32_t> subtree;
        std::deque<std::string> unresolved;
        for (auto& key : distinct_input_keys(unit, g_.level())) {
            if (kitchen_.count(key))
                continue;
            if (auto it = memo_.find(key); it != memo_.end()) {
                if (!it->second.solved)
                    return {false, false, {}};
                append(subtree, it->second.units);
                continue;
            }
            if (in_progress_.count(key))
                return {false, true, {}};  // cycle guard: skip this candidate
            unresolved.push_back(std::move(key));
        }
        while (!unresolved.empty()) {
            std::string key = std::move(unresolved.front());
            unresolved.pop_front();
            Result sub = solve(key);
            if (!sub.solved)
                return {false, sub.tainted, {}};
            append(subtree, sub.units);
        }
        dedup_keep_first(subtree);
        return {true, false, std::move(subtree)};
    }

    // Index into `remaining` of the candidate with the lowest currently
    // known step estimate; ties break on motion cost, then insertion order.
    std::size_t best_candidate(const std::vector<std::uint32_t>& remaining) {
        std::size_t best = 0;
        std::uint64_t best_est = estimate(remaining[0]);
        double best_cost = motion_cost(remaining[0]);
        for (std::size_t i = 1; i < remaining.size(); ++i) {
            std::uint64_t est = estimate(remaining[i]);
            double cost = motion_cost(remaining[i]);
            if (est < best_est || (est == best_est && cost < best_cost)) {
                best = i;
                best_est = est;
                best_cost = cost;
            }
        }
        return best;
    }

    // 1 + the sum of the known minimal subtree sizes of the unit's inputs;
    // unknown and in-progress inputs count 0 (optimistic), known-failed ones
    // push the candidate to the back.
    std::uint64_t estimate(std::uint32_t unit_index) {
        constexpr std::uint64_t kFailed = 1ULL << 32;
        std::uint64_t total = 1;
        for (auto& key : distinct_input_keys(g_.units()[unit_index], g_.level())) {
            if (kitchen_.count(key))
                continue;
            if (auto it = memo_.find(key); it != memo_.end())
                total += it->second.solved ? it->second.units.size() : kFailed;
        }
        return total;
    }

    double motion_cost(std::uint32_t unit_index) const {
        if (!costs_)
            return 0.0;
        auto it = costs_->find(g_.units()[unit_index].motion.label);
        return it == costs_->end() ? std::numeric_limits<double>::infinity() : it->second;
    }

    void charge_expansion() {
        if (expansions_ >= budget_.max_expansions)
            throw BudgetExhausted{};
        ++expansions_;
        if (budget_.wall_clock_limit_ms && expansions_ % 256 == 0 &&
            ms_since(start_) >= *budget_.wall_clock_limit_ms)
            throw BudgetExhausted{};
    }

    static void append(std::vector<std::uint32_t>& into, const std::vector<std::uint32_t>& from) {
        into.insert(into.end(), from.begin(), from.end());
    }

    static void dedup_keep_first(std::vector<std::uint32_t>& units) {
        std::unordered_set<std::uint32_t> seen;
        std::vector<std::uint32_t> kept;
        kept.reserve(units.size());
        for (auto u : units) {
            if (seen.insert(u).second)
                kept.push_back(u);
        }
        units = std::move(kept);
    }

    const Graph& g_;
    std::set<std::string> kitchen_;
    const SearchBudget& budget_;
    const std::map<std::string, double>* costs_;
    Clock::time_point start_;
    std::uint64_t expansions_ = 0;
    std::unordered_map<std::string, Memo> memo_;
    std::unordered_set<std::string> in_progress_;
};

// Reorders the found units into the canonical execution order: repeatedly
// run the lowest-indexed unit whose inputs are available. The input order is
// already executable, so this never gets stuck.
std::vector<std::uint32_t> schedule(const Graph& g, std::vector<std::uint32_t> units,
                                    const std::set<std::string>& kitchen) {
    std::set<std::string> available = kitchen;
    std::vector<std::uint32_t> ready_order;
    std::vector<std::uint32_t> remaining = std::move(units);
    std::sort(remaining.begin(), remaining.end());
    while (!remaining.empty()) {
        bool progressed = false;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const FunctionalUnit& unit = g.units()[remaining[i]];
            bool ready = true;
            for (const auto& node : unit.inputs) {
                if (!available.count(node_identity(node, g.level()).value)) {
                    ready = false;
                    break;
                }
            }
            if (!ready)
                continue;
            for (const auto& node : unit.outputs)
                available.insert(node_identity(node, g.level()).value);
            ready_order.push_back(remaining[i]);
            remaining.erase(remaining.begin() + static_cast<long>(i));
            progressed = true;
            break;
        }
        if (!progressed) {
            ready_order.insert(ready_order.end(), remaining.begin(), remaining.end());
            break;
        }
    }
    return ready_order;
}

std::vector<IdentityKey> kitchen_usage(const Graph& g, const std::vector<std::uint32_t>& order) {
    std::set<std::string> produced;
    std::set<std::string> used;
    for (auto index : order) {
        const FunctionalUnit& unit = g.units()[index];
        for (const auto& node : unit.inputs) {
            std::string key = node_identity(node, g.level()).value;
            if (!produced.count(key))
                used.insert(std::move(key));
        }
        for (const auto& node : unit.outputs)
            produced.insert(node_identity(node, g.level()).value);
    }
    std::vector<IdentityKey> result;
    for (auto& key : used)
        result.push_back(IdentityKey{key});
    return result;
}

} // namespace

RetrievalOutcome retrieve_task_tree(const Graph& g, const ObjectNode& goal, const Kitchen& k,
                                    const SearchBudget& budget,
                                    const std::map<std::string, double>* motion_costs) {
    const auto start = Clock::now();
    const IdentityKey goal_key = node_identity(goal, g.level());
    std::set<std::string> kitchen;
    for (auto& id : k.identities(g.level()))
        kitchen.insert(std::move(id.value));

    RetrievalOutcome out;
    if (kitchen.count(goal_key.value)) {
        out.status = RetrievalOutcome::Status::Solved;
        out.tree = TaskTree{{}, goal_key, {goal_key}};
        out.elapsed_ms = ms_since(start);
        return out;
    }

    Searcher searcher(g, kitchen, budget, motion_costs);
    try {
        Searcher::Result result = searcher.solve(goal_key.value);
        out.expansions_used = searcher.expansions();
        if (result.solved) {
            std::vector<std::uint32_t> order = schedule(g, std::move(result.units), kitchen);
            TaskTree tree;
            tree.goal = goal_key;
            tree.kitchen_used = kitchen_usage(g, order);
            for (auto index : order)
                tree.units.push_back(g.units()[index]);
            out.status = RetrievalOutcome::Status::Solved;
            out.tree = std::move(tree);
        } else {
            out.status = RetrievalOutcome::Status::Unsolvable;
        }
    } catch (const BudgetExhausted&) {
        out.status = RetrievalOutcome::Status::TimedOut;
        out.expansions_used = searcher.expansions();
    }
    out.elapsed_ms = ms_since(start);
    return out;
}

bool is_solvable(const Graph& g, const ObjectNode& goal, const Kitchen& k) {
    const std::string goal_key = node_identity(goal, g.level()).value;
    std::set<std::string> available;
    for (auto& id : k.identities(g.level()))
        available.insert(std::move(id.value));
    if (available.count(goal_key))
        return true;

    std::vector<bool> fired(g.unit_count(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < g.unit_count(); ++i) {
            if (fired[i])
                continue;
            const FunctionalUnit& unit = g.units()[i];
            bool runnable = true;
            for (const auto& node : unit.inputs) {
                if (!available.count(node_identity(node, g.level()).value)) {
                    runnable = false;
                    break;
                }
            }
            if (!runnable)
                continue;
            fired[i] = true;
            changed = true;
            for (const auto& node : unit.outputs)
                available.insert(node_identity(node, g.level()).value);
            if (available.count(goal_key))
                return true;
        }
    }
    return available.count(goal_key) > 0;
}

bool verify_tree(const Graph& g, const TaskTree& tree, const Kitchen& k) {
    std::set<std::string> signatures;
    for (const auto& unit : tree.units) {
        if (!g.contains(unit))
            return false;
        if (!signatures.insert(unit_signature(unit, g.level())).second)
            return false;
    }
    std::set<std::string> available;
    for (auto& id : k.identities(g.level()))
        available.insert(std::move(id.value));
    for (const auto& unit : tree.units) {
        for (const auto& node : unit.inputs) {
            if (!available.count(node_identity(node, g.level()).value))
                return false;
        }
        for (const auto& node : unit.outputs)
            available.insert(node_identity(node, g.level()).value);
    }
    return available.count(tree.goal.value) > 0;
}

} // namespace foon
