#pragma once

#include "arrkit/error.hpp"
#include "arrkit/rat.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace arrkit {

using RatVec = std::vector<Rat>;

// Sparse matrix over Q. Absent entries are zero; stored entries are nonzero.
// Row-major key order keeps iteration deterministic.
struct RatMatrix {
    int rows = 0;
    int cols = 0;
    std::map<std::pair<int, int>, Rat> entries;

    RatMatrix() = default;
    RatMatrix(int r, int c) : rows(r), cols(c) {}

    static RatMatrix identity(int n);

    const Rat& at(int i, int j) const;
    void set(int i, int j, const Rat& v); // erases on zero, bounds-checked

    RatMatrix transpose() const;
    RatVec apply(const RatVec& v) const; // m * v
    bool is_zero() const { return entries.empty(); }

    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
    bool operator==(const RatMatrix& o) const;

    std::vector<RatVec> dense() const;
    static RatMatrix from_dense(const std::vector<RatVec>& d);
    static RatMatrix from_columns(int rows, const std::vector<RatVec>& cols);
};

// A linear subspace of Q^ambient_dim given by a list of independent vectors.
struct Subspace {
    int ambient_dim = 0;
    std::vector<RatVec> basis;
    int dim() const { return static_cast<int>(basis.size()); }
};

// Exact rank. Fraction-free (Bareiss-style) elimination on the
// denominator-cleared integer matrix, first-nonzero pivoting.
int rank(const RatMatrix& m);

// Basis of {v : m v = 0}, dimension cols - rank. Deterministic: free columns
// in increasing order, pivot coordinates filled from the reduced echelon form.
Subspace kernel_basis(const RatMatrix& m);

// Basis of the column span: the columns of m at the pivot positions of the
// reduced echelon form (first independent columns in column order).
Subspace image_basis(const RatMatrix& m);

// Vectors of `total`, in order, completing `sub` to a basis of span(total).
// Throws ContainmentViolation if some sub vector lies outside span(total).
Subspace quotient_basis(const Subspace& sub, const Subspace& total);

// The adjoint m! = pairing_dst^{-1} m^T pairing_src of m with respect to two
// perfect pairings, so that pairing_dst(m! a, b) = pairing_src(a, m b).
// Throws SingularPairing if a pairing matrix is not invertible.
RatMatrix pairing_adjoint(const RatMatrix& m, const RatMatrix& pairing_src,
                          const RatMatrix& pairing_dst);

std::optional<RatMatrix> inverse(const RatMatrix& m);

// Coordinates c with sum_i c_i span[i] = v, if v lies in the span.
std::optional<RatVec> coords_in_span(const std::vector<RatVec>& span, const RatVec& v);

// Least structure shared by the solvers: reduced row echelon form in place;
// returns pivot column indices.
std::vector<int> rref_inplace(std::vector<RatVec>& a);

bool is_zero_vec(const RatVec& v);
RatVec scaled(const RatVec& v, const Rat& c);
void add_scaled(RatVec& v, const Rat& c, const RatVec& w);

} // namespace arrkit
