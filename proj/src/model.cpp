#include "foon/model.hpp"

#include <algorithm>
#include <cctype>

namespace foon {

namespace {

// Separator bytes used inside identity keys and unit signatures. Normalized
// labels cannot contain control characters, so keys stay injective.
constexpr char kFieldSep = '\x1f';
constexpr char kItemSep = '\x1e';
constexpr char kListSep = '\x1d';
constexpr char kSectionSep = '\x1c';

const std::vector<std::uint32_t> kNoUnits;

void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.push_back(sep);
        out += items[i];
    }
    return out;
}

std::string join_comma(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += items[i];
    }
    return out;
}

} // namespace

HierarchyLevel level_from_int(int value) {
    switch (value) {
        case 1: return HierarchyLevel::L1;
        case 2: return HierarchyLevel::L2;
        case 3: return HierarchyLevel::L3;
        default: throw ValidationError("hierarchy level must be 1, 2 or 3, got " + std::to_string(value));
    }
}

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x20 || c == 0x7f)
            throw ValidationError("label contains a control character");
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    if (out.empty())
        throw ValidationError("label is empty");
    return out;
}

ObjectNode ObjectNode::make(std::string_view label, std::vector<std::string> states,
                            std::vector<std::string> ingredients, bool is_moving) {
    ObjectNode node;
    node.label = normalize_label(label);
    for (auto& s : states) s = normalize_label(s);
    for (auto& s : ingredients) s = normalize_label(s);
    sort_unique(states);
    sort_unique(ingredients);
    for (const auto& ing : ingredients) {
        if (ing == node.label)
            throw ValidationError("object \"" + node.label + "\" lists itself as an ingredient");
    }
    node.states = std::move(states);
    node.ingredients = std::move(ingredients);
    node.is_moving = is_moving;
    return node;
}

MotionNode MotionNode::make(std::string_view label) {
    return MotionNode{normalize_label(label)};
}

FunctionalUnit FunctionalUnit::make(std::vector<ObjectNode> inputs, MotionNode motion,
                                    std::vector<ObjectNode> outputs,
                                    std::optional<TimeSpan> time_span,
                                    std::optional<std::string> provenance) {
    if (inputs.empty())
        throw ValidationError("functional unit has no input objects");
    if (outputs.empty())
        throw ValidationError("functional unit has no output objects");
    for (const auto* side : {&inputs, &outputs}) {
        std::vector<std::string> keys;
        keys.reserve(side->size());
        for (const auto& node : *side)
            keys.push_back(node_identity(node, HierarchyLevel::L3).value);
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
            throw ValidationError("functional unit repeats an identical object on one side");
    }
    if (time_span && time_span->start_s > time_span->end_s)
        throw ValidationError("functional unit time span ends before it starts");
    FunctionalUnit unit;
    unit.inputs = std::move(inputs);
    unit.motion = std::move(motion);
    unit.outputs = std::move(outputs);
    unit.time_span = time_span;
    unit.provenance = std::move(provenance);
    return unit;
}

IdentityKey node_identity(const ObjectNode& node, HierarchyLevel level) {
    std::string key;
    key.push_back(static_cast<char>('0' + static_cast<int>(level)));
    key.push_back(kFieldSep);
    key += node.label;
    if (level >= HierarchyLevel::L2) {
        key.push_back(kFieldSep);
        key += join(node.states, kItemSep);
        key.push_back(kFieldSep);
        key.push_back(node.is_moving ? '1' : '0');
    }
    if (level >= HierarchyLevel::L3) {
        key.push_back(kFieldSep);
        key += join(node.ingredients, kItemSep);
    }
    return IdentityKey{std::move(key)};
}

std::string unit_signature(const FunctionalUnit& unit, HierarchyLevel level) {
    auto side_signature = [&](const std::vector<ObjectNode>& side) {
        std::vector<std::string> keys;
        keys.reserve(side.size());
        for (const auto& node : side)
            keys.push_back(node_identity(node, level).value);
        std::sort(keys.begin(), keys.end());
        return join(keys, kListSep);
    };
    std::string sig = unit.motion.label;
    sig.push_back(kSectionSep);
    sig += side_signature(unit.inputs);
    sig.push_back(kSectionSep);
    sig += side_signature(unit.outputs);
    return sig;
}

bool unit_equals(const FunctionalUnit& a, const FunctionalUnit& b, HierarchyLevel level) {
    return unit_signature(a, level) == unit_signature(b, level);
}

std::string display_identity(const ObjectNode& node, HierarchyLevel level) {
    std::string out = node.label;
    if (level >= HierarchyLevel::L2 && !node.states.empty()) {
        out.push_back(':');
        out += join_comma(node.states);
    }
    if (level >= HierarchyLevel::L3 && !node.ingredients.empty()) {
        out += ":I=";
        out += join_comma(node.ingredients);
    }
    if (level >= HierarchyLevel::L2 && node.is_moving)
        out += ":M";
    return out;
}

const std::vector<std::uint32_t>& Graph::units_touching(const IdentityKey& id) const {
    auto it = object_index_.find(id);
    return it == object_index_.end() ? kNoUnits : it->second;
}

const std::vector<std::uint32_t>& Graph::producers_of(const IdentityKey& id) const {
    auto it = producer_index_.find(id);
    return it == producer_index_.end() ? kNoUnits : it->second;
}

const ObjectNode* Graph::representative(const IdentityKey& id) const {
    auto it = representatives_.find(id);
    return it == representatives_.end() ? nullptr : &it->second;
}

std::vector<IdentityKey> Graph::sorted_identities() const {
    std::vector<IdentityKey> keys;
    keys.reserve(object_index_.size());
    for (const auto& [key, _] : object_index_)
        keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::vector<IdentityKey> Graph::sorted_producible_identities() const {
    std::vector<IdentityKey> keys;
    keys.reserve(producer_index_.size());
    for (const auto& [key, _] : producer_index_)
        keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

bool Graph::add_unit(FunctionalUnit unit) {
    std::string sig = unit_signature(unit, level_);
    if (signatures_.contains(sig))
        return false;
    auto index = static_cast<std::uint32_t>(units_.size());
    signatures_.emplace(std::move(sig), index);

    auto note = [&](IndexMap& map, const ObjectNode& node) {
        auto key = node_identity(node, level_);
        auto& touched = map[key];
        if (touched.empty() || touched.back() != index)
            touched.push_back(index);
        representatives_.try_emplace(std::move(key), node);
    };
    for (const auto& node : unit.inputs)
        note(object_index_, node);
    for (const auto& node : unit.outputs) {
        note(object_index_, node);
        note(producer_index_, node);
    }
    units_.push_back(std::move(unit));
    return true;
}

bool Graph::contains(const FunctionalUnit& unit) const {
    return signatures_.contains(unit_signature(unit, level_));
}

GraphStats graph_stats(const Graph& g) {
    return GraphStats{g.distinct_object_count(), g.unit_count(), g.unit_count()};
}

std::vector<IdentityKey> Kitchen::identities(HierarchyLevel level) const {
    std::vector<IdentityKey> keys;
    keys.reserve(items.size());
    for (const auto& item : items)
        keys.push_back(node_identity(item, level));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

} // namespace foon
