#include "foon/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace foon {

namespace {

struct Line {
    int number = 0;  // 1-based
    std::string_view text;
};

// Splits into content lines, dropping blank and "#" comment lines.
std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        if (eol == std::string_view::npos && line.empty())
            break;
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
        if (!blank && line.front() != '#')
            lines.push_back(Line{number, line});
        if (eol == std::string_view::npos)
            break;
        pos = eol + 1;
    }
    return lines;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = text.find(sep, pos);
        if (next == std::string_view::npos) {
            fields.push_back(text.substr(pos));
            return fields;
        }
        fields.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
}

std::string normalize_or_rethrow(std::string_view raw, int line) {
    try {
        return normalize_label(raw);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line);
    }
}

std::vector<std::string> parse_csv_labels(std::string_view field, int line) {
    std::vector<std::string> labels;
    for (std::string_view item : split(field, ','))
        labels.push_back(normalize_or_rethrow(item, line));
    return labels;
}

double parse_score(std::string_view field, int line) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(value))
        throw ParseError("malformed similarity score \"" + std::string(field) + '"', line);
    if (value < 0.0 || value > 1.0)
        throw ParseError("similarity score out of range [0,1]", line);
    return value;
}

double parse_seconds(std::string_view field, int line) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(value))
        throw ParseError("malformed timestamps", line);
    return value;
}

// One object block under construction while its S/I/W lines arrive.
struct PendingNode {
    std::string label;
    std::vector<std::string> states;
    std::vector<std::string> ingredients;
    bool is_moving = false;
    bool saw_ingredients = false;
    bool saw_flag = false;
    int line = 0;
    bool is_output = false;
};

struct PendingUnit {
    std::vector<PendingNode> nodes;
    std::optional<MotionNode> motion;
    std::optional<TimeSpan> time_span;
    bool open = false;
};

FunctionalUnit finish_unit(PendingUnit& pending, const std::string& source, int line) {
    if (!pending.motion)
        throw ParseError("functional unit missing motion (M) line", line);
    std::vector<ObjectNode> inputs;
    std::vector<ObjectNode> outputs;
    for (auto& node : pending.nodes) {
        auto built = ObjectNode::make(node.label, std::move(node.states),
                                      std::move(node.ingredients), node.is_moving);
        (node.is_output ? outputs : inputs).push_back(std::move(built));
    }
    if (inputs.empty())
        throw ParseError("functional unit has no input objects", line);
    if (outputs.empty())
        throw ParseError("functional unit has no output objects", line);
    try {
        return FunctionalUnit::make(std::move(inputs), *pending.motion, std::move(outputs),
                                    pending.time_span,
                                    source.empty() ? std::nullopt : std::optional(source));
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line);
    }
}

} // namespace

Subgraph parse_subgraph(std::string_view text, std::string source) {
    Subgraph result;
    result.source = source;
    PendingUnit pending;
    int last_line = 0;

    for (const Line& line : content_lines(text)) {
        last_line = line.number;
        auto fields = split(line.text, '\t');
        std::string_view tag = fields[0];

        if (tag == "//") {
            if (fields.size() > 1)
                throw ParseError("unexpected extra field on unit terminator", line.number);
            result.units.push_back(finish_unit(pending, source, line.number));
            pending = PendingUnit{};
            continue;
        }
        if (tag == "O") {
            if (fields.size() != 2)
                throw ParseError("expected exactly one label after O", line.number);
            pending.open = true;
            PendingNode node;
            node.label = normalize_or_rethrow(fields[1], line.number);
            node.line = line.number;
            node.is_output = pending.motion.has_value();
            pending.nodes.push_back(std::move(node));
            continue;
        }
        if (tag == "S" || tag == "I" || tag == "W") {
            if (pending.nodes.empty()) {
                const char* what = tag == "S"   ? "state before object"
                                   : tag == "I" ? "ingredients before object"
                                                : "motion flag before object";
                throw ParseError(what, line.number);
            }
            if (fields.size() != 2)
                throw ParseError(std::string("expected exactly one field after ") + std::string(tag),
                                 line.number);
            PendingNode& node = pending.nodes.back();
            if (tag == "S") {
                node.states.push_back(normalize_or_rethrow(fields[1], line.number));
            } else if (tag == "I") {
                if (node.saw_ingredients)
                    throw ParseError("duplicate ingredient (I) line for object", line.number);
                node.saw_ingredients = true;
                node.ingredients = parse_csv_labels(fields[1], line.number);
                for (const auto& ing : node.ingredients) {
                    if (ing == node.label)
                        throw ParseError("object \"" + node.label + "\" lists itself as an ingredient",
                                         line.number);
                }
            } else {
                if (node.saw_flag)
                    throw ParseError("duplicate motion-flag (W) line for object", line.number);
                node.saw_flag = true;
                if (fields[1] == "0")
                    node.is_moving = false;
                else if (fields[1] == "1")
                    node.is_moving = true;
                else
                    throw ParseError("motion flag must be 0 or 1", line.number);
            }
            continue;
        }
        if (tag == "M") {
            if (pending.motion)
                throw ParseError("duplicate motion (M) line in functional unit", line.number);
            if (fields.size() != 2 && fields.size() != 4)
                throw ParseError("malformed timestamps", line.number);
            pending.open = true;
            pending.motion = MotionNode{normalize_or_rethrow(fields[1], line.number)};
            if (fields.size() == 4) {
                TimeSpan span;
                span.start_s = parse_seconds(fields[2], line.number);
                span.end_s = parse_seconds(fields[3], line.number);
                if (span.start_s > span.end_s)
                    throw ParseError("functional unit time span ends before it starts", line.number);
                pending.time_span = span;
            }
            continue;
        }
        throw ParseError("unknown line tag \"" + std::string(tag) + '"', line.number);
    }

    // A trailing unit without "//" is accepted; it still has to be complete.
    if (pending.open || !pending.nodes.empty())
        result.units.push_back(finish_unit(pending, source, last_line));
    return result;
}

std::string serialize_subgraph(const Subgraph& s) {
    std::string out;
    auto emit_node = [&out](const ObjectNode& node) {
        out += "O\t";
        out += node.label;
        out.push_back('\n');
        for (const auto& state : node.states) {
            out += "S\t";
            out += state;
            out.push_back('\n');
        }
        if (!node.ingredients.empty()) {
            out += "I\t";
            for (std::size_t i = 0; i < node.ingredients.size(); ++i) {
                if (i > 0) out.push_back(',');
                out += node.ingredients[i];
            }
            out.push_back('\n');
        }
        if (node.is_moving)
            out += "W\t1\n";
    };
    for (const auto& unit : s.units) {
        for (const auto& node : unit.inputs)
            emit_node(node);
        out += "M\t";
        out += unit.motion.label;
        if (unit.time_span) {
            out.push_back('\t');
            out += format_double(unit.time_span->start_s);
            out.push_back('\t');
            out += format_double(unit.time_span->end_s);
        }
        out.push_back('\n');
        for (const auto& node : unit.outputs)
            emit_node(node);
        out += "//\n";
    }
    return out;
}

void SimilarityMatrix::insert(std::string_view a, std::string_view b, double score) {
    if (score < 0.0 || score > 1.0)
        throw ValidationError("similarity score out of range [0,1]");
    std::string first(a), second(b);
    if (first == second && score != 1.0)
        throw ValidationError("self-pair (" + first + ") must score 1.0");
    if (second < first)
        std::swap(first, second);
    auto key = std::make_pair(std::move(first), std::move(second));
    auto [it, inserted] = entries_.try_emplace(std::move(key), score);
    if (!inserted && it->second != score)
        throw ValidationError("conflicting duplicate similarity for (" + it->first.first + ", " +
                              it->first.second + ")");
}

std::optional<double> SimilarityMatrix::lookup(std::string_view a, std::string_view b) const {
    std::string first(a), second(b);
    if (second < first)
        std::swap(first, second);
    auto it = entries_.find(std::make_pair(first, second));
    if (it != entries_.end())
        return it->second;
    if (first == second)
        return 1.0;
    return std::nullopt;
}

SimilarityMatrix parse_similarity_matrix(std::string_view text) {
    SimilarityMatrix matrix;
    for (const Line& line : content_lines(text)) {
        auto fields = split(line.text, '\t');
        if (fields.size() != 3)
            throw ParseError("expected <labelA>\\t<labelB>\\t<score>", line.number);
        std::string a = normalize_or_rethrow(fields[0], line.number);
        std::string b = normalize_or_rethrow(fields[1], line.number);
        double score = parse_score(fields[2], line.number);
        try {
            matrix.insert(a, b, score);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line.number);
        }
    }
    return matrix;
}

bool Taxonomy::contains(const std::string& label) const {
    return std::binary_search(nodes.begin(), nodes.end(), label);
}

const std::vector<std::string>& Taxonomy::parents_of(const std::string& label) const {
    static const std::vector<std::string> none;
    auto it = parents.find(label);
    return it == parents.end() ? none : it->second;
}

namespace {

// Iterative DFS cycle check over parent edges; returns one offending cycle.
std::optional<std::vector<std::string>> find_cycle(const Taxonomy& t) {
    enum class Color { White, Grey, Black };
    std::map<std::string, Color> color;
    for (const auto& node : t.nodes)
        color[node] = Color::White;

    std::vector<std::string> path;
    struct Frame {
        std::string node;
        std::size_t next_parent = 0;
    };
    for (const auto& start : t.nodes) {
        if (color[start] != Color::White)
            continue;
        std::vector<Frame> stack{{start}};
        color[start] = Color::Grey;
        path = {start};
        while (!stack.empty()) {
            Frame& frame = stack.back();
            const auto& ps = t.parents_of(frame.node);
            if (frame.next_parent < ps.size()) {
                const std::string& parent = ps[frame.next_parent++];
                if (color[parent] == Color::Grey) {
                    auto at = std::find(path.begin(), path.end(), parent);
                    std::vector<std::string> cycle(at, path.end());
                    cycle.push_back(parent);
                    return cycle;
                }
                if (color[parent] == Color::White) {
                    color[parent] = Color::Grey;
                    path.push_back(parent);
                    stack.push_back(Frame{parent});
                }
            } else {
                color[frame.node] = Color::Black;
                path.pop_back();
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

} // namespace

Taxonomy parse_taxonomy(std::string_view text) {
    Taxonomy taxonomy;
    std::map<std::string, std::vector<std::string>> parents;
    std::vector<std::string> nodes;
    for (const Line& line : content_lines(text)) {
        auto fields = split(line.text, '\t');
        if (fields.size() != 2)
            throw ParseError("expected <child>\\t<parent>", line.number);
        std::string child = normalize_or_rethrow(fields[0], line.number);
        std::string parent = normalize_or_rethrow(fields[1], line.number);
        if (child == parent)
            throw ParseError("taxonomy cycle: " + child + " -> " + parent, line.number);
        auto& ps = parents[child];
        if (std::find(ps.begin(), ps.end(), parent) == ps.end())
            ps.push_back(parent);
        nodes.push_back(child);
        nodes.push_back(parent);
    }
    if (nodes.empty())
        throw ParseError("empty taxonomy", 1);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (auto& [_, ps] : parents)
        std::sort(ps.begin(), ps.end());
    taxonomy.nodes = std::move(nodes);
    taxonomy.parents = std::move(parents);
    for (const auto& node : taxonomy.nodes) {
        if (taxonomy.parents_of(node).empty())
            taxonomy.roots.push_back(node);
    }
    if (auto cycle = find_cycle(taxonomy)) {
        std::string msg = "taxonomy cycle: ";
        for (std::size_t i = 0; i < cycle->size(); ++i) {
            if (i > 0) msg += " -> ";
            msg += (*cycle)[i];
        }
        throw ParseError(msg, 1);
    }
    return taxonomy;
}

const std::vector<std::string>* CategoryIndex::categories_of(const std::string& label) const {
    auto it = assignments.find(label);
    return it == assignments.end() ? nullptr : &it->second;
}

std::optional<std::string> CategoryIndex::first_category(const std::string& label) const {
    auto it = assignments.find(label);
    if (it == assignments.end() || it->second.empty())
        return std::nullopt;
    return it->second.front();
}

CategoryIndex parse_category_index(std::string_view text) {
    CategoryIndex index;
    bool saw_header = false;
    for (const Line& line : content_lines(text)) {
        auto fields = split(line.text, '\t');
        if (!saw_header) {
            if (fields.size() != 2 || fields[0] != "CATEGORIES")
                throw ParseError("expected header CATEGORIES\\t<c1>,<c2>,...", line.number);
            for (auto& cat : parse_csv_labels(fields[1], line.number)) {
                if (std::find(index.categories.begin(), index.categories.end(), cat) !=
                    index.categories.end())
                    throw ParseError("duplicate category \"" + cat + "\" in header", line.number);
                index.categories.push_back(std::move(cat));
            }
            std::sort(index.categories.begin(), index.categories.end());
            saw_header = true;
            continue;
        }
        if (fields.size() != 2)
            throw ParseError("expected <object>\\t<cat>[,<cat>...]", line.number);
        std::string object = normalize_or_rethrow(fields[0], line.number);
        if (index.assignments.contains(object))
            throw ParseError("duplicate object row \"" + object + '"', line.number);
        std::vector<std::string> cats = parse_csv_labels(fields[1], line.number);
        for (std::size_t i = 0; i < cats.size(); ++i) {
            if (!std::binary_search(index.categories.begin(), index.categories.end(), cats[i]))
                throw ParseError("category \"" + cats[i] + "\" not declared in header", line.number);
            if (cats[i] == object)
                throw ParseError("object \"" + object + "\" mapped to itself as category",
                                 line.number);
            if (std::find(cats.begin(), cats.begin() + static_cast<long>(i), cats[i]) !=
                cats.begin() + static_cast<long>(i))
                throw ParseError("duplicate category \"" + cats[i] + "\" for object", line.number);
        }
        index.assignments.emplace(std::move(object), std::move(cats));
    }
    if (!saw_header)
        throw ParseError("expected header CATEGORIES\\t<c1>,<c2>,...", 1);
    return index;
}

Kitchen parse_kitchen(std::string_view text) {
    Kitchen kitchen;
    std::vector<std::string> seen;  // L3 identity keys, for exact-duplicate dropping
    for (const Line& line : content_lines(text)) {
        auto fields = split(line.text, '\t');
        if (fields.size() > 3)
            throw ParseError("too many fields for kitchen item", line.number);
        std::string label = normalize_or_rethrow(fields[0], line.number);
        std::vector<std::string> states;
        std::vector<std::string> ingredients;
        bool saw_ingredients = false;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            std::string_view field = fields[i];
            if (field.starts_with("I=")) {
                if (saw_ingredients)
                    throw ParseError("duplicate ingredient field", line.number);
                saw_ingredients = true;
                ingredients = parse_csv_labels(field.substr(2), line.number);
            } else {
                if (saw_ingredients)
                    throw ParseError("states must precede the ingredient field", line.number);
                if (!states.empty())
                    throw ParseError("duplicate state field", line.number);
                states = parse_csv_labels(field, line.number);
            }
        }
        ObjectNode item;
        try {
            item = ObjectNode::make(label, std::move(states), std::move(ingredients));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line.number);
        }
        std::string key = node_identity(item, HierarchyLevel::L3).value;
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(std::move(key));
            kitchen.items.push_back(std::move(item));
        }
    }
    return kitchen;
}

std::vector<std::string> parse_label_list(std::string_view text) {
    std::vector<std::string> labels;
    for (const Line& line : content_lines(text)) {
        std::string label = normalize_or_rethrow(line.text, line.number);
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
            labels.push_back(std::move(label));
    }
    return labels;
}

ObjectNode parse_goal_spec(std::string_view spec) {
    auto segments = split(spec, ':');
    std::string label = normalize_label(segments[0]);
    std::vector<std::string> states;
    std::vector<std::string> ingredients;
    bool is_moving = false;
    bool saw_ingredients = false;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        std::string_view segment = segments[i];
        if (segment == "M") {
            is_moving = true;
        } else if (segment.starts_with("I=")) {
            if (saw_ingredients)
                throw ValidationError("goal spec repeats the I= segment");
            saw_ingredients = true;
            for (std::string_view item : split(segment.substr(2), ','))
                ingredients.push_back(normalize_label(item));
        } else {
            for (std::string_view item : split(segment, ','))
                states.push_back(normalize_label(item));
        }
    }
    return ObjectNode::make(label, std::move(states), std::move(ingredients), is_moving);
}

std::string format_double(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw Error("write failed: " + path);
}

} // namespace foon
