#ifndef FOON_SIMILARITY_HPP
#define FOON_SIMILARITY_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foon/parser.hpp"

namespace foon {

/// Per-object neighbor lists at a fixed score cutoff, driving network
/// expansion. Symmetric by construction; scores are always >= threshold and
/// an object is never its own neighbor.
struct SimilarityIndex {
    double threshold = 0.0;
    std::map<std::string, std::vector<std::pair<std::string, double>>> neighbors;
    std::vector<std::string> unresolved;  // objects absent from the source, sorted

    /// Neighbor (label, score) pairs sorted by label; empty when unknown.
    const std::vector<std::pair<std::string, double>>& neighbors_of(
        const std::string& label) const;

    bool operator==(const SimilarityIndex&) const = default;
};

/// Wu-Palmer conceptual similarity of two taxonomy labels:
///   2*D(c) / (2*D(c) + d(a,c) + d(b,c))
/// where c is the deepest common subsumer, D(n) counts nodes on the longest
/// root-to-n path (roots have D = 1) and d(x,c) is the minimum edge count
/// from x up to c. Equally deep subsumers are broken by the smaller
/// d(a,c) + d(b,c). Returns nullopt when the labels share no subsumer
/// (multi-root taxonomies); throws ValidationError on an unknown label.
std::optional<double> wu_palmer(const Taxonomy& t, const std::string& a,
                                const std::string& b);

/// Index over `objects` from taxonomy-derived Wu-Palmer scores. Objects
/// missing from the taxonomy get empty neighbor sets and are listed in
/// `unresolved`. When `overrides` is given, its scores win on matching pairs
/// (manual corrections for labels the taxonomy handles poorly).
SimilarityIndex build_similarity_index(const Taxonomy& t,
                                       const std::vector<std::string>& objects,
                                       double threshold,
                                       const SimilarityMatrix* overrides = nullptr);

/// Index over `objects` from precomputed pair scores. Neighbors are not
/// limited to `objects`: a matrix row can introduce a label the caller has
/// never seen, which is how expansion grows a network's vocabulary. Objects
/// appearing in no matrix entry get empty neighbor sets and are listed in
/// `unresolved`.
SimilarityIndex build_similarity_index(const SimilarityMatrix& m,
                                       const std::vector<std::string>& objects,
                                       double threshold);

/// The index rendered as similarity-matrix rows (each pair once, smaller
/// label first), re-readable by parse_similarity_matrix.
std::string serialize_similarity_index(const SimilarityIndex& idx);

} // namespace foon

#endif
