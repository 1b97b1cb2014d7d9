#pragma once

#include "arrkit/error.hpp"
#include "arrkit/graph.hpp"

#include <map>
#include <string>
#include <vector>

namespace arrkit {

// Finite graded atomic poset with a designated bottom element. Elements are
// addressed by index; ids are canonical strings (sorted token lists) so that
// equality and serialization are deterministic. Immutable after make().
struct GradedPoset {
    std::vector<std::string> ids;
    std::vector<int> rank_;
    std::vector<std::vector<int>> covers_up;   // y -> { x : y <: x }
    std::vector<std::vector<int>> covers_down; // x -> { y : y <: x }
    std::vector<int> atoms; // rank-1 elements, in atom order (fixes OS signs)
    int bottom = -1;

    std::map<std::string, int> index_of;
    std::vector<std::vector<bool>> leq_;
    std::vector<long long> moebius_;

    int size() const { return static_cast<int>(ids.size()); }
    int idx(const std::string& id) const;
    int rank(int x) const { return rank_[x]; }
    int max_rank() const;

    bool leq(int a, int b) const;
    // All minimal elements of { t : t >= every s in S }. May be empty.
    std::vector<int> min_upper_bounds(const std::vector<int>& s) const;
    // Minimal upper bounds within the interval [0, top].
    std::vector<int> min_upper_bounds_in(const std::vector<int>& s, int top) const;
    long long moebius(int x) const { return moebius_[x]; }
    // Position of atom element in the atom order, -1 if not an atom.
    int atom_pos(int x) const;
};

// Validates ranks, cover steps, reachability and atomicity.
GradedPoset make_poset(const std::vector<std::pair<std::string, int>>& elements,
                       const std::vector<std::pair<std::string, std::string>>& covers,
                       const std::vector<std::string>& atom_order = {});

bool is_locally_geometric(const GradedPoset& p);

// Boolean lattice 2^{1..n}; ids like "{1,3}".
GradedPoset boolean_lattice(int n);

// Partitions of V(G) into blocks inducing connected subgraphs, ordered by
// refinement; atoms are the edges of G. Ids like "{1,2}|{3}".
GradedPoset partition_lattice(const Graph& g);

// Intersection poset from labelled strata: one label per subset of atoms,
// equal labels meaning equal intersections, empty label meaning empty
// intersection (dropped). Rank from chain lengths; NotGradable when covers
// disagree.
GradedPoset intersection_poset(const std::vector<std::string>& atom_names,
                               const std::map<std::vector<int>, std::string>& strata);

// The cubical lattice Q(L): pairs (x, I) with x a minimal upper bound of the
// atom set I, ordered componentwise, ranked by |I|.
struct CubicalLattice {
    GradedPoset q;
    std::vector<int> vertex;                 // q-index -> L-index (projection)
    std::vector<std::vector<int>> atom_set;  // q-index -> sorted atom positions
};
CubicalLattice cubical_lattice(const GradedPoset& p);

std::string poset_to_json(const GradedPoset& p);
GradedPoset poset_from_json(const std::string& text);

} // namespace arrkit
