#pragma once

#include "arrkit/oscomplex.hpp"
#include "arrkit/poset.hpp"
#include "arrkit/report.hpp"
#include "arrkit/support.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace arrkit {

using Bidegree = std::pair<int, int>; // (p, q), second quadrant: p <= 0 <= q

// The E1 page of the Mayer-Vietoris spectral sequence as a bigraded cdga:
// E1^{pq} = sum over rank -p elements of (support space in ambient degree q)
// tensor OS_x, with d1 assembled cover-by-cover and weight tag q.
struct E1Algebra {
    GradedPoset poset;
    OSAlgebra os;
    SupportModule supp;

    struct Gen {
        int x; // poset element
        int h; // support basis index
        int m; // OS basis index
    };
    std::vector<Gen> basis;
    std::vector<Bidegree> bidegree_of;
    std::vector<int> pos_of; // position inside the bidegree bucket
    std::map<Bidegree, std::vector<int>> bucket;
    std::map<Bidegree, RatMatrix> d1; // block E^{p,q} -> E^{p+1,q}

    int dim(const Bidegree& b) const;
    int total_degree(int flat) const
    {
        return bidegree_of[flat].first + bidegree_of[flat].second;
    }
    // unit of the cdga (support unit at the bottom element), as a flat vector
    std::map<int, Rat> unit() const;

    // product of two flat basis elements, as a sparse flat vector
    std::map<int, Rat> product(int i, int j) const;
    // d1 of a flat basis element
    std::map<int, Rat> differential(int i) const;

    std::string describe_gen(int i) const;
};

E1Algebra build_e1_lattice(const GradedPoset& L, const OSAlgebra& os, const SupportModule& supp);

// Cubical route: support over a Boolean lattice, OS = full Grassmann algebra.
E1Algebra build_e1_cubical(const SupportModule& supp);

// d1^2 = 0, Leibniz and graded commutativity on all basis pairs, weight
// preservation of d1; with a cohomology ring also Euler invariance.
CheckReport verify_e1(const E1Algebra& e1);
CheckReport verify_e1(const E1Algebra& e1, const struct CohomologyRing& h);

// E2 = E-infinity with representatives, Betti numbers, weight table and the
// ring structure on chosen representatives.
struct CohomologyRing {
    std::map<Bidegree, int> dims;
    std::map<Bidegree, std::vector<RatVec>> reps;  // bucket coordinates
    std::map<Bidegree, std::vector<RatVec>> image; // d1 image inside each bucket
    std::vector<long long> betti;
    std::map<int, std::map<int, int>> weights; // n -> q -> dim

    using ClassRef = std::array<int, 3>; // (p, q, index)
    std::map<std::pair<ClassRef, ClassRef>, std::vector<std::pair<ClassRef, Rat>>> ring;

    int total_dim() const;
};

// Section 0 is the deterministic first-completion choice; any other section
// index shifts representatives by the image basis (used by the
// representative-independence check).
CohomologyRing cohomology(const E1Algebra& e1, int section = 0);

std::vector<long long> poincare_polynomial(const CohomologyRing& h);

// Sufficient multiplicative-section test: representatives close under the
// product on the nose. Reports "formal by section" or "inconclusive".
struct FormalityReport {
    bool formal_by_section = false;
    std::string detail;
    std::string verdict() const { return formal_by_section ? "formal by section" : "inconclusive"; }
};
FormalityReport formality_report(const E1Algebra& e1, const CohomologyRing& h);

// Degree-preserving algebra automorphism matrices induced by a poset/support
// automorphism; verified to commute with d1.
std::map<Bidegree, RatMatrix> group_action_on_e1(const E1Algebra& e1, const SupportAction& act);

// Plain-text table of a bigraded dimension chart, rows q descending, columns
// p ascending, axis labels on the right and bottom.
std::string render_e_table(const std::map<Bidegree, int>& page);

std::string report_to_json(const E1Algebra& e1, const CohomologyRing& h);

} // namespace arrkit
