#include "foon/transform.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace foon {

namespace {

ObjectNode drop_fields(const ObjectNode& node, HierarchyLevel target) {
    switch (target) {
    case HierarchyLevel::L1:
        return ObjectNode::make(node.label);
    case HierarchyLevel::L2:
        return ObjectNode::make(node.label, node.states, {}, node.is_moving);
    case HierarchyLevel::L3:
        return node;
    }
    throw ValidationError("bad hierarchy level");
}

// Keeps the first node per L3 identity, preserving order.
std::vector<ObjectNode> collapse_side(std::vector<ObjectNode> side) {
    std::vector<ObjectNode> kept;
    std::vector<std::string> seen;
    for (auto& node : side) {
        std::string key = node_identity(node, HierarchyLevel::L3).value;
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(std::move(key));
            kept.push_back(std::move(node));
        }
    }
    return kept;
}

// Distinct node labels of a unit, inputs before outputs, first occurrence
// kept. Ingredient entries do not contribute.
std::vector<std::string> distinct_labels(const FunctionalUnit& unit) {
    std::vector<std::string> labels;
    auto collect = [&labels](const std::vector<ObjectNode>& side) {
        for (const auto& node : side) {
            if (std::find(labels.begin(), labels.end(), node.label) == labels.end())
                labels.push_back(node.label);
        }
    };
    collect(unit.inputs);
    collect(unit.outputs);
    return labels;
}

ObjectNode substitute_node(const ObjectNode& node,
                           const std::map<std::string, std::string>& sub) {
    auto mapped = [&sub](const std::string& label) {
        auto it = sub.find(label);
        return it == sub.end() ? label : it->second;
    };
    std::vector<std::string> ingredients;
    ingredients.reserve(node.ingredients.size());
    for (const auto& ing : node.ingredients)
        ingredients.push_back(mapped(ing));
    return ObjectNode::make(mapped(node.label), node.states, std::move(ingredients),
                            node.is_moving);
}

// Applies a per-label substitution to a whole unit. Returns nullopt when the
// substitution breaks a node or unit invariant (self-ingredient, duplicate
// identity inside one side).
std::optional<FunctionalUnit> substitute_unit(const FunctionalUnit& unit,
                                              const std::map<std::string, std::string>& sub,
                                              bool collapse_duplicates) {
    try {
        std::vector<ObjectNode> inputs;
        std::vector<ObjectNode> outputs;
        inputs.reserve(unit.inputs.size());
        outputs.reserve(unit.outputs.size());
        for (const auto& node : unit.inputs)
            inputs.push_back(substitute_node(node, sub));
        for (const auto& node : unit.outputs)
            outputs.push_back(substitute_node(node, sub));
        if (collapse_duplicates) {
            inputs = collapse_side(std::move(inputs));
            outputs = collapse_side(std::move(outputs));
        }
        return FunctionalUnit::make(std::move(inputs), unit.motion, std::move(outputs),
                                    unit.time_span, unit.provenance);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

// Walks every assignment of one alternative per slot, first combination all
// zeros, last slot varying fastest.
template <typename Fn>
void for_each_combination(const std::vector<std::size_t>& sizes, Fn&& fn) {
    std::vector<std::size_t> choice(sizes.size(), 0);
    for (;;) {
        fn(choice);
        std::size_t slot = sizes.size();
        while (slot > 0) {
            --slot;
            if (++choice[slot] < sizes[slot])
                break;
            choice[slot] = 0;
            if (slot == 0)
                return;
        }
        if (sizes.empty())
            return;
    }
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        return std::numeric_limits<std::size_t>::max();
    return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
    if (b > std::numeric_limits<std::size_t>::max() - a)
        return std::numeric_limits<std::size_t>::max();
    return a + b;
}

} // namespace

Graph merge(const std::vector<Subgraph>& subgraphs, HierarchyLevel level) {
    Graph out(level);
    for (const auto& subgraph : subgraphs) {
        for (const auto& unit : subgraph.units)
            out.add_unit(unit);
    }
    return out;
}

Graph merge(const std::vector<Graph>& graphs, HierarchyLevel level) {
    Graph out(level);
    for (const auto& g : graphs) {
        for (const auto& unit : g.units())
            out.add_unit(unit);
    }
    return out;
}

Graph abstract_to_level(const Graph& g, HierarchyLevel target) {
    if (static_cast<int>(target) > static_cast<int>(g.level()))
        throw ValidationError("cannot raise a graph from level " +
                              std::to_string(static_cast<int>(g.level())) + " to level " +
                              std::to_string(static_cast<int>(target)) +
                              ": dropped detail cannot be invented");
    Graph out(target);
    for (const auto& unit : g.units()) {
        std::vector<ObjectNode> inputs;
        std::vector<ObjectNode> outputs;
        for (const auto& node : unit.inputs)
            inputs.push_back(drop_fields(node, target));
        for (const auto& node : unit.outputs)
            outputs.push_back(drop_fields(node, target));
        out.add_unit(FunctionalUnit::make(collapse_side(std::move(inputs)), unit.motion,
                                          collapse_side(std::move(outputs)), unit.time_span,
                                          unit.provenance));
    }
    return out;
}

Graph expand(const Graph& g, const SimilarityIndex& idx, const ExpansionConfig& cfg) {
    if (cfg.threshold < 0.0 || cfg.threshold > 1.0)
        throw ValidationError("threshold out of range [0,1]");
    if (idx.threshold != cfg.threshold)
        throw ValidationError("similarity index was built at threshold " +
                              format_double(idx.threshold) + ", expansion wants " +
                              format_double(cfg.threshold));
    if (cfg.max_units && *cfg.max_units < g.unit_count())
        throw ValidationError("max_units is below the input unit count");

    std::size_t projected = 0;
    for (const auto& unit : g.units()) {
        std::size_t combinations = 1;
        for (const auto& label : distinct_labels(unit))
            combinations = saturating_mul(combinations, 1 + idx.neighbors_of(label).size());
        projected = saturating_add(projected, combinations);
    }
    if (cfg.max_units && projected > *cfg.max_units)
        throw ExpansionLimitError(projected, *cfg.max_units);

    Graph out(g.level());
    for (const auto& unit : g.units()) {
        std::vector<std::string> labels = distinct_labels(unit);
        std::vector<std::vector<std::string>> alternatives;
        std::vector<std::size_t> sizes;
        for (const auto& label : labels) {
            std::vector<std::string> alts{label};
            for (const auto& [neighbor, _] : idx.neighbors_of(label))
                alts.push_back(neighbor);
            sizes.push_back(alts.size());
            alternatives.push_back(std::move(alts));
        }
        for_each_combination(sizes, [&](const std::vector<std::size_t>& choice) {
            std::map<std::string, std::string> sub;
            for (std::size_t i = 0; i < labels.size(); ++i)
                sub[labels[i]] = alternatives[i][choice[i]];
            if (auto candidate = substitute_unit(unit, sub, false))
                out.add_unit(std::move(*candidate));
        });
    }
    return out;
}

namespace {

std::map<std::string, std::string> first_category_map(const CategoryIndex& cats) {
    std::map<std::string, std::string> sub;
    for (const auto& [object, categories] : cats.assignments) {
        if (!categories.empty())
            sub[object] = categories.front();
    }
    return sub;
}

} // namespace

Graph generalize(const Graph& g, const CategoryIndex& cats, GeneralizeMode mode) {
    Graph out(g.level());
    const auto first_map = first_category_map(cats);
    for (const auto& unit : g.units()) {
        if (mode == GeneralizeMode::FirstCategory) {
            if (auto candidate = substitute_unit(unit, first_map, true))
                out.add_unit(std::move(*candidate));
            continue;
        }
        std::vector<std::string> slots;
        std::vector<std::vector<std::string>> alternatives;
        std::vector<std::size_t> sizes;
        for (const auto& label : distinct_labels(unit)) {
            const auto* categories = cats.categories_of(label);
            if (categories && !categories->empty()) {
                slots.push_back(label);
                sizes.push_back(categories->size());
                alternatives.push_back(*categories);
            }
        }
        for_each_combination(sizes, [&](const std::vector<std::size_t>& choice) {
            std::map<std::string, std::string> sub = first_map;
            for (std::size_t i = 0; i < slots.size(); ++i)
                sub[slots[i]] = alternatives[i][choice[i]];
            if (auto candidate = substitute_unit(unit, sub, true))
                out.add_unit(std::move(*candidate));
        });
    }
    return out;
}

std::pair<Kitchen, ObjectNode> categorize_query(const Kitchen& k, const ObjectNode& goal,
                                                const CategoryIndex& cats,
                                                GeneralizeMode mode) {
    const auto first_map = first_category_map(cats);
    auto map_first = [&first_map](const ObjectNode& node) {
        auto mapped = [&first_map](const std::string& label) {
            auto it = first_map.find(label);
            return it == first_map.end() ? label : it->second;
        };
        std::vector<std::string> ingredients;
        for (const auto& ing : node.ingredients)
            ingredients.push_back(mapped(ing));
        try {
            return ObjectNode::make(mapped(node.label), node.states, std::move(ingredients),
                                    node.is_moving);
        } catch (const ValidationError&) {
            return node;
        }
    };

    Kitchen mapped_kitchen;
    std::vector<std::string> seen;
    auto add_item = [&](ObjectNode node) {
        std::string key = node_identity(node, HierarchyLevel::L3).value;
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(std::move(key));
            mapped_kitchen.items.push_back(std::move(node));
        }
    };
    for (const auto& item : k.items) {
        const auto* categories = cats.categories_of(item.label);
        if (mode == GeneralizeMode::AllCombinations && categories && !categories->empty()) {
            bool added = false;
            for (const auto& category : *categories) {
                std::map<std::string, std::string> sub = first_map;
                sub[item.label] = category;
                try {
                    add_item(substitute_node(item, sub));
                    added = true;
                } catch (const ValidationError&) {
                }
            }
            if (!added)
                add_item(item);
        } else {
            add_item(map_first(item));
        }
    }
    return {std::move(mapped_kitchen), map_first(goal)};
}

} // namespace foon
