#ifndef FOON_RETRIEVAL_HPP
#define FOON_RETRIEVAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foon/model.hpp"

namespace foon {

/// Limits on one retrieval. One expansion = one visit of one candidate
/// producer unit during the backward search.
struct SearchBudget {
    std::uint64_t max_expansions = 1'000'000;
    std::optional<double> wall_clock_limit_ms;
};

/// An executable plan: walking `units` in order with the available set
/// initialized to the kitchen, every unit's inputs are available when it is
/// reached, its outputs become available after, and the goal identity is
/// available at the end. Contains no duplicate units.
struct TaskTree {
    std::vector<FunctionalUnit> units;
    IdentityKey goal;
    std::vector<IdentityKey> kitchen_used;  // sorted, distinct
};

struct RetrievalOutcome {
    enum class Status { Solved, Unsolvable, TimedOut };

    Status status = Status::Unsolvable;
    std::optional<TaskTree> tree;  // present iff Solved
    double elapsed_ms = 0.0;
    std::uint64_t expansions_used = 0;
};

/// Backward-chaining search for a plan producing `goal` from `k`.
///
/// Candidate producer units for an unresolved identity are tried depth-first
/// in ascending order of their currently known minimal subtree step count;
/// ties go to the lower motion cost when `motion_costs` is supplied (labels
/// missing from the table sort last), then to graph insertion order. Within
/// a candidate, input objects are screened breadth-first through a queue.
/// Solved and path-independent failed identities are memoized; identities on
/// the current expansion path are marked in progress and candidates needing
/// one are skipped there (cycle guard), so search terminates on cyclic
/// graphs under every budget.
RetrievalOutcome retrieve_task_tree(const Graph& g, const ObjectNode& goal, const Kitchen& k,
                                    const SearchBudget& budget = {},
                                    const std::map<std::string, double>* motion_costs = nullptr);

/// Budget-free solvability oracle: grows the available set from the kitchen
/// by repeatedly firing every unit whose inputs are all available, until a
/// fixpoint, then checks the goal. Deliberately shares no machinery with
/// retrieve_task_tree.
bool is_solvable(const Graph& g, const ObjectNode& goal, const Kitchen& k);

/// True iff every tree unit is in g, no unit repeats, and the TaskTree
/// executability invariant holds for kitchen `k`.
bool verify_tree(const Graph& g, const TaskTree& tree, const Kitchen& k);

} // namespace foon

#endif
