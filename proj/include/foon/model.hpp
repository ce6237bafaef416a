#ifndef FOON_MODEL_HPP
#define FOON_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "foon/error.hpp"

namespace foon {

/// Degree of detail carried by object-node identity.
///   L1: label only.
///   L2: label + states + motion flag, ingredient contents ignored.
///   L3: label + states + ingredient contents + motion flag.
enum class HierarchyLevel : int { L1 = 1, L2 = 2, L3 = 3 };

HierarchyLevel level_from_int(int value);

/// Normalizes an annotation label: trims, collapses inner whitespace runs to
/// a single space, lowercases ASCII. Throws ValidationError if the result is
/// empty or contains control characters (which would break identity keys).
std::string normalize_label(std::string_view raw);

/// An object in the scene: type label, observed states, ingredient contents
/// and whether the object is moving. Immutable once built.
struct ObjectNode {
    std::string label;
    std::vector<std::string> states;       // sorted, unique
    std::vector<std::string> ingredients;  // sorted, unique, never == label
    bool is_moving = false;

    /// Validating factory; normalizes every label and enforces invariants.
    static ObjectNode make(std::string_view label,
                           std::vector<std::string> states = {},
                           std::vector<std::string> ingredients = {},
                           bool is_moving = false);

    bool operator==(const ObjectNode&) const = default;
};

struct MotionNode {
    std::string label;

    static MotionNode make(std::string_view label);

    bool operator==(const MotionNode&) const = default;
};

struct TimeSpan {
    double start_s = 0.0;
    double end_s = 0.0;

    bool operator==(const TimeSpan&) const = default;
};

/// The atomic learning unit: input objects, one motion, output objects.
/// Input/output order follows the annotation source; equality ignores it.
struct FunctionalUnit {
    std::vector<ObjectNode> inputs;   // length >= 1
    MotionNode motion;
    std::vector<ObjectNode> outputs;  // length >= 1
    std::optional<TimeSpan> time_span;
    std::optional<std::string> provenance;

    /// Validating factory: rejects empty sides, duplicate node identities at
    /// L3 within one side, and end-before-start time spans.
    static FunctionalUnit make(std::vector<ObjectNode> inputs, MotionNode motion,
                               std::vector<ObjectNode> outputs,
                               std::optional<TimeSpan> time_span = std::nullopt,
                               std::optional<std::string> provenance = std::nullopt);

    /// Field-for-field equality (order-sensitive); unit_equals is the
    /// level-aware semantic comparison.
    bool operator==(const FunctionalUnit&) const = default;
};

/// Opaque comparable identity of an object node at a hierarchy level.
/// Two nodes are the same network node at a level iff their keys compare equal.
struct IdentityKey {
    std::string value;

    bool operator==(const IdentityKey&) const = default;
    auto operator<=>(const IdentityKey&) const = default;
};

struct IdentityKeyHash {
    std::size_t operator()(const IdentityKey& k) const {
        return std::hash<std::string>{}(k.value);
    }
};

/// Identity of `node` at `level`. L1 keys drop states, ingredients and the
/// motion flag; L2 keys drop ingredients; L3 keys keep everything. Keys are
/// insensitive to the stored order of set fields.
IdentityKey node_identity(const ObjectNode& node, HierarchyLevel level);

/// Canonical signature of a unit at a level: motion label plus the input and
/// output identity-key multisets. unit_equals(a, b, lv) iff signatures match.
std::string unit_signature(const FunctionalUnit& unit, HierarchyLevel level);

/// True iff the two units carry the same motion and the same input/output
/// identity multisets at `level`. Ordering, time spans and provenance are
/// ignored.
bool unit_equals(const FunctionalUnit& a, const FunctionalUnit& b, HierarchyLevel level);

/// Human-readable canonical form of a node at a level:
/// `label[:state,...][:I=ing,...][:M]`. Parseable back by parse_goal_spec.
std::string display_identity(const ObjectNode& node, HierarchyLevel level);

struct GraphStats {
    std::size_t object_node_count = 0;
    std::size_t motion_node_count = 0;
    std::size_t unit_count = 0;

    bool operator==(const GraphStats&) const = default;
};

/// A deduplicated set of functional units with derived node indices. Identity
/// is enforced at a declared hierarchy level; units keep their full node
/// detail regardless of the level. Immutable after construction: transforms
/// build new graphs.
class Graph {
public:
    Graph() : level_(HierarchyLevel::L3) {}
    explicit Graph(HierarchyLevel level) : level_(level) {}

    HierarchyLevel level() const { return level_; }
    const std::vector<FunctionalUnit>& units() const { return units_; }
    std::size_t unit_count() const { return units_.size(); }

    /// Unit indices where the identity appears as an input or an output,
    /// ascending. Empty when the identity is not in the graph.
    const std::vector<std::uint32_t>& units_touching(const IdentityKey& id) const;

    /// Unit indices where the identity appears as an output, ascending.
    const std::vector<std::uint32_t>& producers_of(const IdentityKey& id) const;

    /// One representative node per identity key (the first one inserted).
    const ObjectNode* representative(const IdentityKey& id) const;

    std::size_t distinct_object_count() const { return object_index_.size(); }

    /// All identity keys present in the graph, lexicographically sorted.
    std::vector<IdentityKey> sorted_identities() const;

    /// Identity keys that appear as some unit's output, sorted.
    std::vector<IdentityKey> sorted_producible_identities() const;

    /// Appends a unit unless an equal one (at the graph level) is already
    /// present. Returns true when the unit was added.
    bool add_unit(FunctionalUnit unit);

    bool contains(const FunctionalUnit& unit) const;

private:
    using IndexMap = std::unordered_map<IdentityKey, std::vector<std::uint32_t>, IdentityKeyHash>;

    HierarchyLevel level_;
    std::vector<FunctionalUnit> units_;
    std::unordered_map<std::string, std::uint32_t> signatures_;  // signature -> unit index
    IndexMap object_index_;
    IndexMap producer_index_;
    std::unordered_map<IdentityKey, ObjectNode, IdentityKeyHash> representatives_;
};

/// object_node_count counts distinct identity keys at the graph's level
/// across all inputs and outputs; every unit contributes one motion node.
GraphStats graph_stats(const Graph& g);

/// Objects available in the environment, in unlimited quantity.
struct Kitchen {
    std::vector<ObjectNode> items;

    /// Distinct identity keys of the items at `level`.
    std::vector<IdentityKey> identities(HierarchyLevel level) const;
};

} // namespace foon

#endif
