#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "test_helpers.hpp"

using namespace foon;
using helpers::obj;

namespace {

std::string error_of(const char* text) {
    try {
        parse_subgraph(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("salad fixture parses into two fully described units") {
    Subgraph s = parse_subgraph(helpers::salad_text(), "salad.foon");
    REQUIRE(s.units.size() == 2);

    const FunctionalUnit& cut = s.units[0];
    CHECK(cut.motion.label == "cut");
    REQUIRE(cut.inputs.size() == 2);
    CHECK(cut.inputs[0] == obj("knife"));
    CHECK(cut.inputs[1] == obj("lettuce", {"whole"}));
    REQUIRE(cut.outputs.size() == 2);
    CHECK(cut.outputs[1] == obj("lettuce", {"chopped"}));
    CHECK_FALSE(cut.time_span.has_value());
    CHECK(cut.provenance == std::optional<std::string>("salad.foon"));

    const FunctionalUnit& pour = s.units[1];
    CHECK(pour.motion.label == "pour");
    CHECK(pour.inputs[0] == obj("bowl", {"contains"}, {"tomato"}));
    CHECK(pour.inputs[1] == obj("lettuce", {"chopped"}));
    REQUIRE(pour.outputs.size() == 1);
    CHECK(pour.outputs[0] == obj("bowl", {"contains"}, {"lettuce", "tomato"}));
}

TEST_CASE("serialization is canonical and reparses to the same subgraph") {
    Subgraph s = parse_subgraph(helpers::salad_text());
    std::string text = serialize_subgraph(s);
    CHECK(text == helpers::salad_text());

    // scrambled set-field order, comments, blank lines and CRLF all normalize
    std::string scrambled =
        "# annotated salad\r\n"
        "\r\n"
        "O\tknife\r\n"
        "O\tlettuce\r\n"
        "S\twhole\r\n"
        "M\tcut\r\n"
        "O\tknife\r\n"
        "O\tlettuce\r\n"
        "S\tchopped\r\n"
        "//\r\n"
        "O\tbowl\r\n"
        "I\ttomato\r\n"
        "S\tcontains\r\n"
        "O\tlettuce\r\n"
        "S\tchopped\r\n"
        "M\tpour\r\n"
        "O\tbowl\r\n"
        "S\tcontains\r\n"
        "I\tlettuce,tomato\r\n"
        "//\r\n";
    CHECK(serialize_subgraph(parse_subgraph(scrambled)) == helpers::salad_text());
}

TEST_CASE("timestamps, moving flags and implicit final terminator") {
    std::string text =
        "O\tspoon\n"
        "W\t1\n"
        "O\tcup\n"
        "M\tstir\t1.5\t2.25\n"
        "O\tcup\n"
        "S\tstirred\n";
    Subgraph s = parse_subgraph(text);
    REQUIRE(s.units.size() == 1);
    CHECK(s.units[0].inputs[0].is_moving);
    REQUIRE(s.units[0].time_span.has_value());
    CHECK(s.units[0].time_span->start_s == 1.5);
    CHECK(s.units[0].time_span->end_s == 2.25);
    CHECK(s.units[0].provenance == std::nullopt);

    std::string canonical = serialize_subgraph(s);
    CHECK(canonical ==
          "O\tspoon\n"
          "W\t1\n"
          "O\tcup\n"
          "M\tstir\t1.5\t2.25\n"
          "O\tcup\n"
          "S\tstirred\n"
          "//\n");
}

TEST_CASE("empty input parses to an empty subgraph") {
    CHECK(parse_subgraph("").units.empty());
    CHECK(parse_subgraph("# nothing here\n\n").units.empty());
    CHECK(serialize_subgraph(Subgraph{}) == "");
}

TEST_CASE("every malformed construct is reported with its line") {
    CHECK(error_of("S\twhole\n") == "state before object, line 1");
    CHECK(error_of("I\ttomato\n") == "ingredients before object, line 1");
    CHECK(error_of("W\t1\n") == "motion flag before object, line 1");
    CHECK(error_of("# intro\nO\tknife\nM\tcut\nO\tknife\n//\nS\tlate\n") ==
          "state before object, line 6");
    CHECK(error_of("O\tknife\nO\tlettuce\nM\tcut\nM\tcut\nO\tknife\n//\n") ==
          "duplicate motion (M) line in functional unit, line 4");
    CHECK(error_of("O\tknife\n//\n") == "functional unit missing motion (M) line, line 2");
    CHECK(error_of("M\tcut\nO\tknife\n//\n") == "functional unit has no input objects, line 3");
    CHECK(error_of("O\tknife\nM\tcut\n//\n") == "functional unit has no output objects, line 3");
    CHECK(error_of("O\tbowl\nI\tx\nI\ty\nM\tcut\nO\tbowl\n//\n") ==
          "duplicate ingredient (I) line for object, line 3");
    CHECK(error_of("O\tbowl\nW\t1\nW\t0\nM\tcut\nO\tbowl\n//\n") ==
          "duplicate motion-flag (W) line for object, line 3");
    CHECK(error_of("O\tbowl\nW\t2\nM\tcut\nO\tbowl\n//\n") == "motion flag must be 0 or 1, line 2");
    CHECK(error_of("O\tbowl\nI\tbowl\nM\tcut\nO\tbowl\n//\n") ==
          "object \"bowl\" lists itself as an ingredient, line 2");
    CHECK(error_of("O\ta\nM\tcut\t1.0\nO\tb\n//\n") == "malformed timestamps, line 2");
    CHECK(error_of("O\ta\nM\tcut\tx\ty\nO\tb\n//\n") == "malformed timestamps, line 2");
    CHECK(error_of("O\ta\nM\tcut\t5\t1\nO\tb\n//\n") ==
          "functional unit time span ends before it starts, line 2");
    CHECK(error_of("O\ta\tb\nM\tcut\nO\tc\n//\n") == "expected exactly one label after O, line 1");
    CHECK(error_of("Q\tmystery\n") == "unknown line tag \"Q\", line 1");
    CHECK(error_of("O\ta\nM\tcut\nO\tb\n//\textra\n") ==
          "unexpected extra field on unit terminator, line 4");
    CHECK(error_of("O\ta\nM\tcut\nO\ta\nO\ta\n//\n") != "");  // duplicate output identity
    CHECK(error_of("O\t\nM\tcut\nO\tb\n//\n") != "");         // empty label

    CHECK_THROWS_AS(parse_subgraph("S\twhole\n"), ParseError);
    try {
        parse_subgraph("O\ta\nM\tcut\nO\tb\n//\n//\n");
        FAIL("terminator without a unit must throw");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
}

TEST_CASE("parse/serialize round-trips 1000 random subgraphs exactly") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        Subgraph original = helpers::random_subgraph(rng);
        std::string text = serialize_subgraph(original);
        Subgraph reparsed = parse_subgraph(text);
        REQUIRE(reparsed.units.size() == original.units.size());
        for (std::size_t u = 0; u < original.units.size(); ++u)
            CHECK(reparsed.units[u] == original.units[u]);
        CHECK(serialize_subgraph(reparsed) == text);
    }
}

TEST_CASE("similarity matrix stores orientation-free scores") {
    SimilarityMatrix m = parse_similarity_matrix("kale\tlettuce\t0.9\n# note\nkale\trock\t0.1\n");
    CHECK(m.lookup("kale", "lettuce") == std::optional<double>(0.9));
    CHECK(m.lookup("lettuce", "kale") == std::optional<double>(0.9));
    CHECK(m.lookup("rock", "kale") == std::optional<double>(0.1));
    CHECK(m.lookup("kale", "kale") == std::optional<double>(1.0));
    CHECK_FALSE(m.lookup("kale", "bowl").has_value());

    SimilarityMatrix dup;
    dup.insert("a", "b", 0.5);
    CHECK_NOTHROW(dup.insert("b", "a", 0.5));
    CHECK_THROWS_AS(dup.insert("b", "a", 0.6), ValidationError);
    CHECK_THROWS_AS(dup.insert("a", "c", 1.5), ValidationError);
    CHECK_THROWS_AS(dup.insert("a", "a", 0.5), ValidationError);
    CHECK_NOTHROW(dup.insert("a", "a", 1.0));

    CHECK_THROWS_AS(parse_similarity_matrix("kale\tlettuce\n"), ParseError);
    CHECK_THROWS_AS(parse_similarity_matrix("kale\tlettuce\tnope\n"), ParseError);
}

TEST_CASE("taxonomy parsing finds roots and rejects cycles") {
    Taxonomy t = helpers::produce_taxonomy();
    CHECK(t.roots == std::vector<std::string>{"root"});
    CHECK(t.contains("kale"));
    CHECK_FALSE(t.contains("granite"));
    CHECK(t.parents_of("kale") == std::vector<std::string>{"vegetable"});
    CHECK(t.parents_of("root").empty());
    CHECK(std::is_sorted(t.nodes.begin(), t.nodes.end()));

    // diamond: two parents, still a DAG
    CHECK_NOTHROW(parse_taxonomy("d\tb\nd\tc\nb\ta\nc\ta\n"));

    CHECK_THROWS_AS(parse_taxonomy(""), ParseError);
    CHECK_THROWS_AS(parse_taxonomy("a\ta\n"), ParseError);
    try {
        parse_taxonomy("a\tb\nb\tc\nc\ta\n");
        FAIL("cycle must throw");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("taxonomy cycle") != std::string::npos);
    }
}

TEST_CASE("category index enforces its header and row invariants") {
    CategoryIndex idx = parse_category_index(
        "CATEGORIES\tcitrus,vegetable\n"
        "grapefruit\tcitrus\n"
        "orange\tcitrus\n"
        "potato\tvegetable,citrus\n");
    CHECK(idx.categories == std::vector<std::string>{"citrus", "vegetable"});
    CHECK(idx.first_category("grapefruit") == std::optional<std::string>("citrus"));
    CHECK(idx.first_category("potato") == std::optional<std::string>("vegetable"));
    CHECK_FALSE(idx.first_category("bowl").has_value());
    REQUIRE(idx.categories_of("potato") != nullptr);
    CHECK(*idx.categories_of("potato") == std::vector<std::string>{"vegetable", "citrus"});
    CHECK(idx.categories_of("bowl") == nullptr);
    CHECK_FALSE(idx.empty());
    CHECK(parse_category_index("CATEGORIES\tx\n").empty());

    CHECK_THROWS_AS(parse_category_index(""), ParseError);
    CHECK_THROWS_AS(parse_category_index("grapefruit\tcitrus\n"), ParseError);
    CHECK_THROWS_AS(parse_category_index("CATEGORIES\tcitrus,citrus\n"), ParseError);
    CHECK_THROWS_AS(parse_category_index("CATEGORIES\tcitrus\na\tcitrus\na\tcitrus\n"), ParseError);
    CHECK_THROWS_AS(parse_category_index("CATEGORIES\tcitrus\na\tvegetable\n"), ParseError);
    CHECK_THROWS_AS(parse_category_index("CATEGORIES\tcitrus\ncitrus\tcitrus\n"), ParseError);
    CHECK_THROWS_AS(parse_category_index("CATEGORIES\tcitrus,veg\na\tcitrus,citrus\n"), ParseError);
}

TEST_CASE("kitchen manifests describe one object per line") {
    Kitchen k = parse_kitchen(
        "knife\n"
        "lettuce\twhole\n"
        "bowl\tcontains\tI=tomato\n"
        "bowl\tcontains\tI=tomato\n"
        "cup\tclean,dry\n");
    REQUIRE(k.items.size() == 4);  // exact duplicate dropped
    CHECK(k.items[0] == obj("knife"));
    CHECK(k.items[1] == obj("lettuce", {"whole"}));
    CHECK(k.items[2] == obj("bowl", {"contains"}, {"tomato"}));
    CHECK(k.items[3] == obj("cup", {"clean", "dry"}));

    CHECK_THROWS_AS(parse_kitchen("bowl\tI=x\textra\tmore\n"), ParseError);
    CHECK_THROWS_AS(parse_kitchen("bowl\tI=x\tstate\n"), ParseError);
    CHECK_THROWS_AS(parse_kitchen("bowl\tI=x\tI=y\n"), ParseError);
    CHECK_THROWS_AS(parse_kitchen("bowl\ta\ta\n"), ParseError);
}

TEST_CASE("label lists keep order and drop duplicates") {
    CHECK(parse_label_list("kale\n# greens\nlettuce\nkale\n") ==
          std::vector<std::string>{"kale", "lettuce"});
    CHECK(parse_label_list("").empty());
}

TEST_CASE("goal specs parse the display grammar") {
    CHECK(parse_goal_spec("lettuce") == obj("lettuce"));
    CHECK(parse_goal_spec("lettuce:chopped") == obj("lettuce", {"chopped"}));
    CHECK(parse_goal_spec("bowl:contains:I=tomato,lettuce") ==
          obj("bowl", {"contains"}, {"lettuce", "tomato"}));
    CHECK(parse_goal_spec("spoon:M") == obj("spoon", {}, {}, true));
    CHECK(parse_goal_spec("cup:a,b:I=x:M") == obj("cup", {"a", "b"}, {"x"}, true));
    CHECK_THROWS_AS(parse_goal_spec(""), ValidationError);
    CHECK_THROWS_AS(parse_goal_spec("a:I=x:I=y"), ValidationError);
    CHECK_THROWS_AS(parse_goal_spec("bowl:I=bowl"), ValidationError);

    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        ObjectNode n = helpers::random_node(rng);
        CHECK(parse_goal_spec(display_identity(n, HierarchyLevel::L3)) == n);
    }
}

TEST_CASE("format_double emits shortest exact decimal forms") {
    CHECK(format_double(1.5) == "1.5");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.89) == "0.89");
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        double v = rng.unit_double() * 1000.0;
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("text files round-trip through the filesystem helpers") {
    helpers::TempDir dir("foon-parser-test");
    std::string path = dir.file("sample.foon", helpers::salad_text());
    CHECK(read_text_file(path) == helpers::salad_text());
    CHECK_THROWS_AS(read_text_file((dir.path() / "missing.foon").string()), Error);
}
