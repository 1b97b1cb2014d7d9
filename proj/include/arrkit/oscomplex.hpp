#pragma once

#include "arrkit/poset.hpp"
#include "arrkit/ratmatrix.hpp"
#include "arrkit/report.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace arrkit {

// Grassmann monomial on the atoms of a poset: strictly increasing list of
// atom positions (0-based, in the poset's fixed atom order). Degree -|atoms|.
struct Monomial {
    std::vector<int> atoms;
    bool operator<(const Monomial& o) const
    {
        if (atoms.size() != o.atoms.size())
            return atoms.size() < o.atoms.size();
        return atoms < o.atoms;
    }
    bool operator==(const Monomial& o) const { return atoms == o.atoms; }
    std::string str() const;
};

using MonoTerm = std::pair<Rat, Monomial>;

// Full Koszul differential: sum_k (-1)^{k-1} (monomial minus its k-th atom).
std::vector<MonoTerm> koszul_partial(const Monomial& m);

// Grassmann product with shuffle sign; zero when atom sets overlap.
// Returns (sign, merged) with sign 0 on overlap.
std::pair<int, Monomial> grassmann_product(const Monomial& a, const Monomial& b);

// The atomic complex D of a locally geometric poset: D_x is spanned by the
// monomials whose atom set has x among its minimal upper bounds, with the
// label-preserving part of the Koszul differential as inner differential and
// the label-dropping part as structure maps toward lower covers.
struct AtomicComplex {
    const GradedPoset* poset = nullptr;
    std::vector<std::vector<std::pair<int, Monomial>>> labelled; // per x: (x, I) monomials
    std::vector<RatMatrix> inner;                                // per x: D_x -> D_x
    std::map<std::pair<int, int>, RatMatrix> cross;              // (y,x) cover: D_x -> D_y
};

AtomicComplex atomic_complex(const GradedPoset& p);

// Sparse product tensor on basis pairs: (i,j) -> list of (k, coeff).
using ProductTensor = std::map<std::pair<int, int>, std::vector<std::pair<int, Rat>>>;

// Orlik-Solomon algebra of a locally geometric poset, computed homologically
// from the atomic complex; basis representatives are the first monomials in
// lexicographic atom order completing the relation space.
struct OSAlgebra {
    GradedPoset poset;
    std::vector<std::vector<Monomial>> basis;          // per x, representatives, |I| = r(x)
    std::vector<std::vector<Monomial>> top_monomials;  // per x, all label-x monomials of size r(x)
    std::vector<std::vector<RatVec>> relation_rows;    // per x, rref rows of the relation span
    std::vector<std::vector<RatVec>> normal_form_tab;  // per x, top monomial -> basis coords
    std::map<std::pair<int, int>, RatMatrix> structure; // cover (y,x): OS_x -> OS_y
    std::map<std::array<int, 3>, ProductTensor> product; // (x,y,t), rank-additive minimal joins

    int dim(int x) const { return static_cast<int>(basis[x].size()); }
    // Product of basis elements, as components per target element t.
    std::map<int, RatVec> multiply(int x, const RatVec& a, int y, const RatVec& b) const;
    // Combinatorial differential of a component, per lower cover.
    std::map<int, RatVec> boundary(int x, const RatVec& a) const;
};

OSAlgebra os_algebra(const GradedPoset& p);

// Coordinates of a monomial-span vector in the chosen basis of OS_x, modulo
// the relation subspace. Monomials must have size r(x) and carry label x.
RatVec os_normal_form(const OSAlgebra& alg, int x, const std::vector<MonoTerm>& v);

// d^2 = 0, Leibniz, acyclicity of every lower interval, dim = |mu|.
CheckReport verify_chain_algebra(const OSAlgebra& alg);

std::string os_algebra_to_json(const OSAlgebra& alg);

} // namespace arrkit
