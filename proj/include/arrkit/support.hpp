#pragma once

#include "arrkit/graph.hpp"
#include "arrkit/oscomplex.hpp"
#include "arrkit/poset.hpp"
#include "arrkit/ratmatrix.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace arrkit {

// Finite-dimensional graded-commutative ring with a distinguished unit and an
// optional Poincare pairing given by "integration": every top-degree basis
// vector integrates to 1, and <a,b> is the integral of a*b.
struct GradedRing {
    std::vector<int> deg;
    std::vector<std::string> label;
    RatVec unit;
    ProductTensor product; // (i,j) -> [(k, c)]
    bool has_pairing = false;
    int top_degree = 0;

    int dim() const { return static_cast<int>(deg.size()); }
    std::vector<int> basis_of_degree(int d) const;
    RatVec mul(const RatVec& a, const RatVec& b) const;
    Rat integral(const RatVec& v) const;
    Rat pair(const RatVec& a, const RatVec& b) const { return integral(mul(a, b)); }
    void validate() const;
};

GradedRing ring_projective(int n); // H*(P^n) = Q[t]/t^{n+1}
GradedRing ring_point();
GradedRing ring_points(int k);     // k disjoint points
GradedRing ring_quadric();         // H*(P^1 x P^1)
GradedRing ring_elliptic();        // genus-1: 1, a, b, pt with ab = -ba = pt

GradedRing ring_from_json(const std::string& text);
std::string ring_to_json(const GradedRing& r);

// Per-vertex cohomology with support, indexed by ambient degree q. Cover maps
// are the Gysin-type maps g_{yx}; products are the partial products on
// rank-additive minimal joins, matching the OS partial algebra.
struct SupportSpace {
    std::vector<int> deg;
    std::vector<std::string> label;
    int dim() const { return static_cast<int>(deg.size()); }
};

struct SupportModule {
    GradedPoset poset;
    std::vector<SupportSpace> space;
    std::map<std::pair<int, int>, RatMatrix> cover;      // (y,x) for covers y <: x
    std::map<std::array<int, 3>, ProductTensor> product; // (x,y,t)
    std::vector<int> weight_offset;

    void validate() const;
};

// Projective subspace strata in P^n: the space at x is the ideal
// t^{c_x} Q[t]/t^{n+1} in ambient degrees, cover maps are the inclusions,
// products multiply in Q[t]/t^{n+1}.
SupportModule projective_support(int n, const GradedPoset& p,
                                 const std::map<std::string, int>& codim);

// Affine subspaces with rank = complex codimension: one Thom class per
// element in degree 2 r(x); all cover maps vanish by degree.
SupportModule affine_support(int n, const GradedPoset& p);

// Diagonal arrangement of a graph inside M^{V(G)}: Kunneth powers of H*(M)
// with Thom shifts; Gysin maps computed from the pairing adjunction.
SupportModule diagonal_support(const GradedRing& hM, const Graph& g);

// One stratum per poset element: its cohomology ring plus complex codimension,
// restrictions along covers. Gysin maps come from the pairing adjunction;
// products are restrict-then-multiply on transversal pairs (zero map on
// non-transversal pairs whenever every relevant target degree vanishes).
struct VarietyStratum {
    GradedRing ring;
    int codim = 0;
};
SupportModule varieties_support(const GradedPoset& p, const std::vector<VarietyStratum>& strata,
                                const std::map<std::pair<int, int>, RatMatrix>& restrictions);

SupportModule custom_support(const std::string& json_text);
std::string support_to_json(const SupportModule& s);

// Poset/space automorphism data for equivariance checks.
struct SupportAction {
    std::vector<int> atom_perm;         // atom position -> atom position
    std::vector<int> element_perm;      // poset index -> poset index
    std::vector<RatMatrix> space_maps;  // space(x) -> space(perm(x))
};

// The action of a graph automorphism on a diagonal support module.
SupportAction diagonal_action(const GradedRing& hM, const Graph& g,
                              const std::vector<int>& vertex_perm,
                              const SupportModule& supp);

// Permutation action fixing every stratum space pointwise (projective strata).
SupportAction projective_action(const SupportModule& supp, const std::vector<int>& atom_perm,
                                const std::vector<int>& element_perm);

} // namespace arrkit
