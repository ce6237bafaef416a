#include "foon/similarity.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace foon {

namespace {

// D(n) for every node: node count on the longest root-to-n path, roots = 1.
std::map<std::string, int> longest_path_depths(const Taxonomy& t) {
    std::map<std::string, int> depth;
    std::function<int(const std::string&)> depth_of = [&](const std::string& node) -> int {
        auto it = depth.find(node);
        if (it != depth.end())
            return it->second;
        int best = 0;
        for (const auto& parent : t.parents_of(node))
            best = std::max(best, depth_of(parent));
        return depth[node] = best + 1;
    };
    for (const auto& node : t.nodes)
        depth_of(node);
    return depth;
}

// Minimum upward edge count from `start` to each of its subsumers
// (including itself at distance 0).
std::map<std::string, int> upward_distances(const Taxonomy& t, const std::string& start) {
    std::map<std::string, int> dist{{start, 0}};
    std::deque<std::string> queue{start};
    while (!queue.empty()) {
        std::string node = std::move(queue.front());
        queue.pop_front();
        int next = dist[node] + 1;
        for (const auto& parent : t.parents_of(node)) {
            if (dist.emplace(parent, next).second)
                queue.push_back(parent);
        }
    }
    return dist;
}

// Score from precomputed depths and upward-distance maps; nullopt when the
// two nodes share no subsumer.
std::optional<double> score_from_maps(const std::map<std::string, int>& depths,
                                      const std::map<std::string, int>& up_a,
                                      const std::map<std::string, int>& up_b) {
    int best_depth = 0;
    int best_sum = 0;
    bool found = false;
    for (const auto& [node, da] : up_a) {
        auto it = up_b.find(node);
        if (it == up_b.end())
            continue;
        int d = depths.at(node);
        int sum = da + it->second;
        if (!found || d > best_depth || (d == best_depth && sum < best_sum)) {
            found = true;
            best_depth = d;
            best_sum = sum;
        }
    }
    if (!found)
        return std::nullopt;
    return 2.0 * best_depth / (2.0 * best_depth + best_sum);
}

void insert_neighbor_pair(SimilarityIndex& idx, const std::string& a, const std::string& b,
                          double score) {
    idx.neighbors[a].emplace_back(b, score);
    idx.neighbors[b].emplace_back(a, score);
}

void finalize_index(SimilarityIndex& idx, const std::vector<std::string>& objects) {
    for (const auto& object : objects)
        idx.neighbors.try_emplace(object);
    for (auto& [_, list] : idx.neighbors)
        std::sort(list.begin(), list.end());
    std::sort(idx.unresolved.begin(), idx.unresolved.end());
    idx.unresolved.erase(std::unique(idx.unresolved.begin(), idx.unresolved.end()),
                         idx.unresolved.end());
}

std::vector<std::string> sorted_unique(std::vector<std::string> labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

} // namespace

const std::vector<std::pair<std::string, double>>& SimilarityIndex::neighbors_of(
    const std::string& label) const {
    static const std::vector<std::pair<std::string, double>> none;
    auto it = neighbors.find(label);
    return it == neighbors.end() ? none : it->second;
}

std::optional<double> wu_palmer(const Taxonomy& t, const std::string& a,
                                const std::string& b) {
    if (!t.contains(a))
        throw ValidationError("label \"" + a + "\" is not in the taxonomy");
    if (!t.contains(b))
        throw ValidationError("label \"" + b + "\" is not in the taxonomy");
    auto depths = longest_path_depths(t);
    return score_from_maps(depths, upward_distances(t, a), upward_distances(t, b));
}

SimilarityIndex build_similarity_index(const Taxonomy& t,
                                       const std::vector<std::string>& objects,
                                       double threshold,
                                       const SimilarityMatrix* overrides) {
    if (threshold < 0.0 || threshold > 1.0)
        throw ValidationError("threshold out of range [0,1]");
    SimilarityIndex idx;
    idx.threshold = threshold;

    std::vector<std::string> known = sorted_unique(objects);
    auto depths = longest_path_depths(t);
    std::map<std::string, std::map<std::string, int>> up;
    for (const auto& object : known) {
        if (t.contains(object))
            up.emplace(object, upward_distances(t, object));
        else
            idx.unresolved.push_back(object);
    }
    for (std::size_t i = 0; i < known.size(); ++i) {
        for (std::size_t j = i + 1; j < known.size(); ++j) {
            const std::string& a = known[i];
            const std::string& b = known[j];
            std::optional<double> score;
            if (overrides)
                score = overrides->lookup(a, b);
            if (!score) {
                auto ia = up.find(a);
                auto ib = up.find(b);
                if (ia == up.end() || ib == up.end())
                    continue;
                score = score_from_maps(depths, ia->second, ib->second);
            }
            if (score && *score >= threshold)
                insert_neighbor_pair(idx, a, b, *score);
        }
    }
    finalize_index(idx, known);
    return idx;
}

SimilarityIndex build_similarity_index(const SimilarityMatrix& m,
                                       const std::vector<std::string>& objects,
                                       double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw ValidationError("threshold out of range [0,1]");
    SimilarityIndex idx;
    idx.threshold = threshold;

    std::vector<std::string> known = sorted_unique(objects);
    auto is_known = [&known](const std::string& label) {
        return std::binary_search(known.begin(), known.end(), label);
    };
    std::vector<std::string> seen;
    for (const auto& [pair, score] : m.entries()) {
        seen.push_back(pair.first);
        seen.push_back(pair.second);
        if (pair.first == pair.second || score < threshold)
            continue;
        if (is_known(pair.first))
            idx.neighbors[pair.first].emplace_back(pair.second, score);
        if (is_known(pair.second))
            idx.neighbors[pair.second].emplace_back(pair.first, score);
    }
    seen = sorted_unique(std::move(seen));
    for (const auto& object : known) {
        if (!std::binary_search(seen.begin(), seen.end(), object))
            idx.unresolved.push_back(object);
    }
    finalize_index(idx, known);
    return idx;
}

std::string serialize_similarity_index(const SimilarityIndex& idx) {
    std::string out;
    for (const auto& [label, list] : idx.neighbors) {
        for (const auto& [other, score] : list) {
            if (label < other) {
                out += label;
                out.push_back('\t');
                out += other;
                out.push_back('\t');
                out += format_double(score);
                out.push_back('\n');
            }
        }
    }
    return out;
}

} // namespace foon

