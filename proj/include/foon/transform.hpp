#ifndef FOON_TRANSFORM_HPP
#define FOON_TRANSFORM_HPP

#include <optional>
#include <utility>
#include <vector>

#include "foon/model.hpp"
#include "foon/parser.hpp"
#include "foon/similarity.hpp"

namespace foon {

struct ExpansionConfig {
    double threshold = 0.89;
    std::optional<std::size_t> max_units;  // cap on generated units, safety valve
};

/// How objects with several categories are rewritten: FirstCategory takes the
/// first listed one (index order is specificity order), AllCombinations emits
/// one candidate unit per assignment over the unit's multi-category labels.
enum class GeneralizeMode { FirstCategory, AllCombinations };

/// Union of the inputs with duplicate units (per unit_equals at `level`)
/// removed, first occurrence kept. Empty input gives an empty graph.
Graph merge(const std::vector<Subgraph>& subgraphs, HierarchyLevel level);
Graph merge(const std::vector<Graph>& graphs, HierarchyLevel level);

/// Rewrites every node to carry only the fields of `target` (L1: label only,
/// L2: ingredients dropped), collapsing nodes that become identical within a
/// unit side, then deduplicates units at `target`. Raising the level is an
/// error: dropped detail cannot be invented.
Graph abstract_to_level(const Graph& g, HierarchyLevel target);

/// Similarity expansion: for each unit, every distinct node label can be
/// swapped for one of its index neighbors, one candidate unit per combination.
/// A chosen swap applies to every occurrence of the label in the unit,
/// ingredient entries included. Candidates that break node or unit
/// invariants are dropped; the rest dedup into a superset of g.
Graph expand(const Graph& g, const SimilarityIndex& idx, const ExpansionConfig& cfg);

/// Category compression: relabels every categorized object (ingredient
/// entries included) to a category per `mode`; uncategorized labels stay.
/// Nodes that become identical within a unit side collapse; units then dedup
/// at g.level.
Graph generalize(const Graph& g, const CategoryIndex& cats, GeneralizeMode mode);

/// Applies the generalize relabeling rule to a query, so retrievals against
/// a generalized network can reuse kitchens and goals stated concretely.
std::pair<Kitchen, ObjectNode> categorize_query(const Kitchen& k, const ObjectNode& goal,
                                                const CategoryIndex& cats,
                                                GeneralizeMode mode);

} // namespace foon

#endif
