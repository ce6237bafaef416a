#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"

using namespace foon;
using helpers::graph_of;
using helpers::obj;
using helpers::unit;

TEST_CASE("merge deduplicates across subgraphs and keeps first provenance") {
    Subgraph a = parse_subgraph(helpers::salad_text(), "a.foon");
    Subgraph b = parse_subgraph(helpers::salad_text(), "b.foon");
    Graph merged = merge(std::vector<Subgraph>{a, b}, HierarchyLevel::L3);
    CHECK(merged.unit_count() == 2);
    CHECK(merged.units()[0].provenance == std::optional<std::string>("a.foon"));

    FunctionalUnit u1 = unit({obj("x")}, "cut", {obj("y")});
    FunctionalUnit u2 = unit({obj("y")}, "mix", {obj("z")});
    FunctionalUnit u3 = unit({obj("z")}, "pour", {obj("w")});
    Subgraph first, second;
    first.units = {u1, u2};
    second.units = {u2, u3};
    Graph overlap = merge(std::vector<Subgraph>{first, second}, HierarchyLevel::L3);
    CHECK(overlap.unit_count() == 3);
    CHECK(overlap.units() == std::vector<FunctionalUnit>{u1, u2, u3});

    CHECK(merge(std::vector<Subgraph>{}, HierarchyLevel::L2).unit_count() == 0);
    CHECK(merge(std::vector<Subgraph>{}, HierarchyLevel::L2).level() == HierarchyLevel::L2);
}

TEST_CASE("merge collapses units that coincide at the target level") {
    FunctionalUnit milk = unit({obj("bowl", {"full"}, {"egg", "milk"})}, "mix",
                               {obj("bowl", {"mixed"}, {"egg", "milk"})});
    FunctionalUnit salt = unit({obj("bowl", {"full"}, {"egg", "salt"})}, "mix",
                               {obj("bowl", {"mixed"}, {"egg", "salt"})});
    Subgraph sg;
    sg.units = {milk, salt};
    CHECK(merge(std::vector<Subgraph>{sg}, HierarchyLevel::L3).unit_count() == 2);
    CHECK(merge(std::vector<Subgraph>{sg}, HierarchyLevel::L2).unit_count() == 1);
}

TEST_CASE("merge is idempotent and associative on random inputs") {
    Rng rng(51);
    for (int round = 0; round < 60; ++round) {
        Graph a = helpers::random_graph(rng, 8);
        Graph b = helpers::random_graph(rng, 8);
        Graph c = helpers::random_graph(rng, 8);
        auto level = HierarchyLevel::L3;

        Graph twice = merge(std::vector<Graph>{a, a}, level);
        CHECK(twice.units() == a.units());

        Graph left = merge(std::vector<Graph>{merge(std::vector<Graph>{a, b}, level), c}, level);
        Graph right = merge(std::vector<Graph>{a, merge(std::vector<Graph>{b, c}, level)}, level);
        Graph flat = merge(std::vector<Graph>{a, b, c}, level);
        CHECK(left.units() == flat.units());
        CHECK(right.units() == flat.units());
    }
}

TEST_CASE("abstraction drops detail, collapses nodes and refuses to raise") {
    Graph salad = helpers::salad_graph();
    Graph l2 = abstract_to_level(salad, HierarchyLevel::L2);
    CHECK(l2.level() == HierarchyLevel::L2);
    CHECK(graph_stats(l2) == GraphStats{4, 2, 2});
    for (const auto& u : l2.units())
        for (const auto& n : u.inputs) CHECK(n.ingredients.empty());
    CHECK(l2.units()[0].provenance == salad.units()[0].provenance);

    Graph l1 = abstract_to_level(l2, HierarchyLevel::L1);
    CHECK(graph_stats(l1) == GraphStats{3, 2, 2});
    for (const auto& u : l1.units())
        for (const auto& n : u.outputs) {
            CHECK(n.states.empty());
            CHECK_FALSE(n.is_moving);
        }

    CHECK(abstract_to_level(salad, HierarchyLevel::L3).units() == salad.units());
    CHECK_THROWS_AS(abstract_to_level(l1, HierarchyLevel::L2), ValidationError);
    CHECK_THROWS_AS(abstract_to_level(l2, HierarchyLevel::L3), ValidationError);
}

TEST_CASE("abstraction merges ingredient variants and collapsing sides") {
    FunctionalUnit milk = unit({obj("bowl", {"full"}, {"egg", "milk"})}, "mix",
                               {obj("bowl", {"mixed"}, {"egg", "milk"})});
    FunctionalUnit salt = unit({obj("bowl", {"full"}, {"egg", "salt"})}, "mix",
                               {obj("bowl", {"mixed"}, {"egg", "salt"})});
    Graph g = graph_of({milk, salt});
    CHECK(abstract_to_level(g, HierarchyLevel::L2).unit_count() == 1);

    FunctionalUnit two_eggs = unit({obj("egg", {"raw"}), obj("egg", {"boiled"})}, "mix",
                                   {obj("dish")});
    Graph collapsed = abstract_to_level(graph_of({two_eggs}), HierarchyLevel::L1);
    REQUIRE(collapsed.unit_count() == 1);
    CHECK(collapsed.units()[0].inputs.size() == 1);
    CHECK(collapsed.units()[0].inputs[0] == obj("egg"));
}

TEST_CASE("abstraction unit counts are monotone across levels") {
    Rng rng(52);
    for (int round = 0; round < 100; ++round) {
        Graph l3 = helpers::random_graph(rng, 12);
        std::size_t n3 = l3.unit_count();
        std::size_t n2 = abstract_to_level(l3, HierarchyLevel::L2).unit_count();
        std::size_t n1 = abstract_to_level(l3, HierarchyLevel::L1).unit_count();
        CHECK(n1 <= n2);
        CHECK(n2 <= n3);
        // collapsing straight to L1 equals going through L2
        CHECK(abstract_to_level(abstract_to_level(l3, HierarchyLevel::L2), HierarchyLevel::L1)
                  .unit_count() == n1);
    }
}

namespace {

SimilarityIndex index_of(const std::vector<std::tuple<std::string, std::string, double>>& pairs,
                         const Graph& g, double threshold) {
    SimilarityMatrix m;
    for (const auto& [a, b, score] : pairs) m.insert(a, b, score);
    return build_similarity_index(m, helpers::node_labels(g), threshold);
}

} // namespace

TEST_CASE("expansion substitutes per label across the whole unit") {
    Graph g = graph_of({unit({obj("knife"), obj("kale")}, "cut",
                             {obj("knife"), obj("kale", {"chopped"})})});
    SimilarityIndex idx = index_of({{"kale", "lettuce", 0.9}}, g, 0.89);
    Graph expanded = expand(g, idx, {0.89, std::nullopt});
    CHECK(expanded.unit_count() == 2);
    CHECK(expanded.contains(g.units()[0]));
    CHECK(expanded.contains(unit({obj("knife"), obj("lettuce")}, "cut",
                                 {obj("knife"), obj("lettuce", {"chopped"})})));
    // no cross-label mixing: cut kale never produces chopped lettuce
    for (const auto& u : expanded.units()) {
        bool kale_in = false, lettuce_out = false;
        for (const auto& n : u.inputs) kale_in = kale_in || n.label == "kale";
        for (const auto& n : u.outputs) lettuce_out = lettuce_out || n.label == "lettuce";
        CHECK_FALSE((kale_in && lettuce_out));
    }

    SimilarityIndex two = index_of({{"kale", "lettuce", 0.9}, {"knife", "cleaver", 0.93}}, g, 0.89);
    CHECK(expand(g, two, {0.89, std::nullopt}).unit_count() == 4);
}

TEST_CASE("expansion maps matching ingredient entries") {
    Graph g = graph_of({unit({obj("kale"), obj("bowl", {}, {"kale", "tomato"})}, "mix",
                             {obj("bowl", {"full"}, {"kale", "tomato"})})});
    SimilarityIndex idx = index_of({{"kale", "lettuce", 0.9}}, g, 0.89);
    Graph expanded = expand(g, idx, {0.89, std::nullopt});
    REQUIRE(expanded.unit_count() == 2);
    CHECK(expanded.contains(unit({obj("lettuce"), obj("bowl", {}, {"lettuce", "tomato"})}, "mix",
                                 {obj("bowl", {"full"}, {"lettuce", "tomato"})})));
}

TEST_CASE("ingredient-only labels do not drive expansion") {
    Graph g = graph_of({unit({obj("bowl", {}, {"tomato"})}, "mix", {obj("bowl", {"full"}, {"tomato"})})});
    SimilarityMatrix m;
    m.insert("tomato", "pepper", 0.95);
    SimilarityIndex idx = build_similarity_index(m, {"bowl", "tomato"}, 0.89);
    CHECK(expand(g, idx, {0.89, std::nullopt}).unit_count() == 1);
}

TEST_CASE("candidates breaking unit invariants are dropped") {
    // a -> b and b -> a: the mixed tuples duplicate an input, the swap dedups
    Graph g = graph_of({unit({obj("a"), obj("b")}, "mix", {obj("c")})});
    SimilarityIndex idx = index_of({{"a", "b", 0.95}}, g, 0.89);
    CHECK(expand(g, idx, {0.89, std::nullopt}).unit_count() == 1);

    // bowl -> kale substitution would make kale list itself as an ingredient
    Graph self_ing = graph_of({unit({obj("bowl", {}, {"kale"})}, "mix",
                                    {obj("bowl", {"full"}, {"kale"})})});
    SimilarityIndex idx2 = index_of({{"bowl", "kale", 0.95}}, self_ing, 0.89);
    CHECK(expand(self_ing, idx2, {0.89, std::nullopt}).unit_count() == 1);
}

TEST_CASE("expansion deduplicates overlapping orbits") {
    Graph g = graph_of({unit({obj("kale")}, "cut", {obj("kale", {"chopped"})}),
                        unit({obj("lettuce")}, "cut", {obj("lettuce", {"chopped"})})});
    SimilarityIndex idx = index_of({{"kale", "lettuce", 0.9}}, g, 0.89);
    CHECK(expand(g, idx, {0.89, std::nullopt}).unit_count() == 2);
}

TEST_CASE("expansion validates its configuration") {
    Graph g = helpers::salad_graph();
    SimilarityIndex idx = index_of({}, g, 0.7);
    CHECK_THROWS_AS(expand(g, idx, {0.89, std::nullopt}), ValidationError);  // threshold mismatch
    SimilarityIndex ok = index_of({}, g, 0.89);
    CHECK_THROWS_AS(expand(g, ok, {1.3, std::nullopt}), ValidationError);
    CHECK(expand(g, ok, {0.89, std::nullopt}).units() == g.units());
}

TEST_CASE("the unit cap is checked against the projected pre-dedup size") {
    Graph g = graph_of({unit({obj("kale")}, "cut", {obj("kale", {"chopped"})}),
                        unit({obj("lettuce")}, "cut", {obj("lettuce", {"chopped"})})});
    SimilarityIndex idx = index_of({{"kale", "lettuce", 0.9}}, g, 0.89);
    // each unit projects 2 candidates even though they dedup to 2 total
    try {
        expand(g, idx, {0.89, 3});
        FAIL("cap must trigger");
    } catch (const ExpansionLimitError& e) {
        CHECK(e.projected_units() == 4);
        CHECK(e.limit() == 3);
    }
    CHECK(expand(g, idx, {0.89, 4}).unit_count() == 2);
}

TEST_CASE("expansion count matches the substitution-tuple oracle") {
    Rng rng(53);
    for (int round = 0; round < 30; ++round) {
        Graph g = helpers::random_graph(rng, 10);
        SimilarityIndex idx = helpers::random_index(rng, g, 2, 0.9);
        Graph expanded = expand(g, idx, {0.9, std::nullopt});
        std::set<std::string> oracle = helpers::oracle_expand_keys(g, idx);
        CHECK(expanded.unit_count() == oracle.size());
        for (const auto& u : g.units()) CHECK(expanded.contains(u));
        for (const auto& u : expanded.units())
            CHECK(oracle.count(helpers::oracle_unit_key(u, g.level())) == 1);
    }
}

TEST_CASE("first-category generalization compresses label variants") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tcitrus\n"
        "grapefruit\tcitrus\n"
        "orange\tcitrus\n");
    Graph g = graph_of({unit({obj("grapefruit")}, "cut", {obj("grapefruit", {"sliced"})}),
                        unit({obj("orange")}, "cut", {obj("orange", {"sliced"})})});
    Graph gen = generalize(g, cats, GeneralizeMode::FirstCategory);
    REQUIRE(gen.unit_count() == 1);
    CHECK(gen.units()[0].inputs[0] == obj("citrus"));
    CHECK(gen.units()[0].outputs[0] == obj("citrus", {"sliced"}));

    // uncategorized labels and empty indices leave the graph alone
    CHECK(generalize(g, CategoryIndex{}, GeneralizeMode::FirstCategory).units() == g.units());
    Graph knife = graph_of({unit({obj("knife"), obj("orange")}, "cut",
                                 {obj("knife"), obj("orange", {"sliced"})})});
    Graph gen2 = generalize(knife, cats, GeneralizeMode::FirstCategory);
    REQUIRE(gen2.unit_count() == 1);
    CHECK(gen2.units()[0].inputs[0] == obj("knife"));
    CHECK(gen2.units()[0].inputs[1] == obj("citrus"));
}

TEST_CASE("generalization rewrites ingredient entries and collapses sides") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tvegetable\n"
        "onion\tvegetable\n"
        "potato\tvegetable\n");
    Graph g = graph_of({unit({obj("onion"), obj("potato")}, "mix",
                             {obj("bowl", {}, {"onion", "potato"})})});
    Graph gen = generalize(g, cats, GeneralizeMode::FirstCategory);
    REQUIRE(gen.unit_count() == 1);
    REQUIRE(gen.units()[0].inputs.size() == 1);
    CHECK(gen.units()[0].inputs[0] == obj("vegetable"));
    CHECK(gen.units()[0].outputs[0] == obj("bowl", {}, {"vegetable"}));
}

TEST_CASE("generalization skips units whose rewrite is invalid") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tbowl\n"
        "stock\tbowl\n");
    // rewriting stock -> bowl makes the node its own ingredient
    Graph g = graph_of({unit({obj("bowl", {}, {"stock"})}, "mix",
                             {obj("bowl", {"full"}, {"stock"})})});
    CHECK(generalize(g, cats, GeneralizeMode::FirstCategory).unit_count() == 0);
}

TEST_CASE("all-combinations generalization fans out per category") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tvegetable,root vegetable,utensil\n"
        "potato\tvegetable,root vegetable\n"
        "knife\tutensil\n");
    Graph g = graph_of({unit({obj("potato")}, "cut", {obj("potato", {"diced"})})});
    Graph gen = generalize(g, cats, GeneralizeMode::AllCombinations);
    CHECK(gen.unit_count() == 2);
    CHECK(gen.contains(unit({obj("vegetable")}, "cut", {obj("vegetable", {"diced"})})));
    CHECK(gen.contains(unit({obj("root vegetable")}, "cut", {obj("root vegetable", {"diced"})})));

    Graph two = graph_of({unit({obj("potato"), obj("knife")}, "cut",
                               {obj("potato", {"diced"}), obj("knife")})});
    CHECK(generalize(two, cats, GeneralizeMode::AllCombinations).unit_count() == 2);

    // ingredient-only labels stick to their first category even in ALL mode
    Graph ing = graph_of({unit({obj("bowl", {}, {"potato"})}, "mix",
                               {obj("bowl", {"full"}, {"potato"})})});
    Graph ing_gen = generalize(ing, cats, GeneralizeMode::AllCombinations);
    REQUIRE(ing_gen.unit_count() == 1);
    CHECK(ing_gen.units()[0].inputs[0] == obj("bowl", {}, {"vegetable"}));
}

TEST_CASE("first-category generalization never grows and is idempotent here") {
    Rng rng(54);
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tcat0,cat1\n"
        "obj0\tcat0\n"
        "obj1\tcat0\n"
        "obj2\tcat1\n");
    for (int round = 0; round < 50; ++round) {
        Graph g = helpers::random_graph(rng, 10);
        Graph once = generalize(g, cats, GeneralizeMode::FirstCategory);
        CHECK(once.unit_count() <= g.unit_count());
        Graph twice = generalize(once, cats, GeneralizeMode::FirstCategory);
        CHECK(twice.units() == once.units());
    }
}

TEST_CASE("categorize_query maps kitchens and goals like the network") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tcitrus,vegetable\n"
        "grapefruit\tcitrus\n"
        "orange\tcitrus\n"
        "potato\tvegetable,citrus\n");
    Kitchen k = helpers::kitchen_of({obj("grapefruit"), obj("orange"), obj("knife"),
                                     obj("bowl", {}, {"grapefruit"})});
    auto [mapped, goal] =
        categorize_query(k, obj("potato", {"diced"}), cats, GeneralizeMode::FirstCategory);
    CHECK(goal == obj("vegetable", {"diced"}));
    REQUIRE(mapped.items.size() == 3);  // grapefruit and orange collapse
    CHECK(mapped.items[0] == obj("citrus"));
    CHECK(mapped.items[1] == obj("knife"));
    CHECK(mapped.items[2] == obj("bowl", {}, {"citrus"}));
}

TEST_CASE("categorize_query in ALL mode adds one variant per category") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tvegetable,root vegetable\n"
        "potato\tvegetable,root vegetable\n");
    Kitchen k = helpers::kitchen_of({obj("potato"), obj("knife")});
    auto [mapped, goal] =
        categorize_query(k, obj("potato", {"diced"}), cats, GeneralizeMode::AllCombinations);
    CHECK(goal == obj("vegetable", {"diced"}));  // goals always use the first category
    REQUIRE(mapped.items.size() == 3);
    CHECK(mapped.items[0] == obj("vegetable"));
    CHECK(mapped.items[1] == obj("root vegetable"));
    CHECK(mapped.items[2] == obj("knife"));
}

TEST_CASE("categorize_query keeps items whose rewrite would be invalid") {
    CategoryIndex cats = parse_category_index(
        "CATEGORIES\tbowl\n"
        "stock\tbowl\n");
    Kitchen k = helpers::kitchen_of({obj("bowl", {}, {"stock"})});
    auto [mapped, goal] = categorize_query(k, obj("stock"), cats, GeneralizeMode::FirstCategory);
    CHECK(goal == obj("bowl"));
    REQUIRE(mapped.items.size() == 1);
    CHECK(mapped.items[0] == obj("bowl", {}, {"stock"}));
}
