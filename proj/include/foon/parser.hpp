#ifndef FOON_PARSER_HPP
#define FOON_PARSER_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foon/model.hpp"

namespace foon {

// Subgraph file grammar (UTF-8, TAB-separated fields, "#" starts a comment
// line, "//" on a line of its own ends a functional unit):
//
//   O <label>                 begin an object block; input before the unit's
//                             M line, output after it
//   S <state>                 add a state to the current object (repeatable)
//   I <ing>[,<ing>...]        set the current object's ingredient contents
//   W <0|1>                   set the current object's moving flag
//   M <motion>[ <start> <end>]  the unit's motion, optional timestamps (s)
//
// A unit needs at least one input, one output and exactly one M line.
// serialize_subgraph emits the canonical form: set fields sorted, defaults
// omitted, every unit terminated by "//".

/// The unit sequence annotated from one source video. Duplicates are allowed
/// until the subgraph is merged into a network.
struct Subgraph {
    std::vector<FunctionalUnit> units;
    std::string source;
};

/// Symmetric object-pair similarity scores in [0, 1].
class SimilarityMatrix {
public:
    /// Records a score; the pair is stored orientation-free. Throws on a
    /// score outside [0, 1], a self-pair not scored 1.0, or a conflicting
    /// duplicate entry.
    void insert(std::string_view a, std::string_view b, double score);

    std::optional<double> lookup(std::string_view a, std::string_view b) const;

    const std::map<std::pair<std::string, std::string>, double>& entries() const {
        return entries_;
    }

private:
    std::map<std::pair<std::string, std::string>, double> entries_;
};

/// A DAG of concept labels: children point to one or more parents; roots
/// have none. Stands in for the lexical hierarchy similarity is derived from.
struct Taxonomy {
    std::vector<std::string> nodes;  // sorted
    std::map<std::string, std::vector<std::string>> parents;
    std::vector<std::string> roots;  // sorted

    bool contains(const std::string& label) const;
    const std::vector<std::string>& parents_of(const std::string& label) const;
};

/// Object label -> ordered category labels (listed most-specific first).
/// Objects absent from the index have no categories.
struct CategoryIndex {
    std::map<std::string, std::vector<std::string>> assignments;
    std::vector<std::string> categories;  // sorted

    const std::vector<std::string>* categories_of(const std::string& label) const;
    std::optional<std::string> first_category(const std::string& label) const;
    bool empty() const { return assignments.empty(); }
};

Subgraph parse_subgraph(std::string_view text, std::string source = "");

/// Canonical serialization; parse(serialize(s)) reproduces s exactly and
/// serializing again is byte-identical.
std::string serialize_subgraph(const Subgraph& s);

/// `<labelA> <labelB> <score>` rows, tab-separated, either orientation.
SimilarityMatrix parse_similarity_matrix(std::string_view text);

/// `<child> <parent>` rows. Rejects cyclic input, reporting one cycle.
Taxonomy parse_taxonomy(std::string_view text);

/// Header `CATEGORIES <c1>,<c2>,...` then `<object> <cat>[,<cat>...]` rows.
CategoryIndex parse_category_index(std::string_view text);

/// One object per line: `<label>[ <state>[,<state>...]][ I=<ing>,...]`.
Kitchen parse_kitchen(std::string_view text);

/// One label per line; order kept, duplicates dropped.
std::vector<std::string> parse_label_list(std::string_view text);

/// Parses the goal grammar `label[:state,...][:I=<ing>,...][:M]`, the same
/// form display_identity emits. Throws ValidationError on a malformed spec.
ObjectNode parse_goal_spec(std::string_view spec);

/// Shortest round-trip decimal form of a double (used by every serializer).
std::string format_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

} // namespace foon

#endif
