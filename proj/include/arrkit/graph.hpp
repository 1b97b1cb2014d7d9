#pragma once

#include "arrkit/error.hpp"

#include <string>
#include <utility>
#include <vector>

namespace arrkit {

// Finite simple graph on vertices 1..n.
struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges; // a < b, sorted, no duplicates

    static Graph make(int n, std::vector<std::pair<int, int>> raw_edges);

    bool has_edge(int a, int b) const;
    std::vector<int> neighbours(int v) const;
};

// Named graphs accepted on the command line: k2, k3, k4, path3, path4, c4, c5,
// edgeless<n>.
Graph named_graph(const std::string& name);

// All simple cycles as vertex lists, canonical up to rotation/reflection:
// each cycle starts at its least vertex and its second entry is smaller than
// its last. Sorted lexicographically.
std::vector<std::vector<int>> simple_cycles(const Graph& g);

// Chromatic polynomial evaluated at k, by deletion-contraction.
long long chromatic_polynomial_at(const Graph& g, long long k);

// p_G as a coefficient vector, p_G(k) = sum coeff[i] k^i (computed by
// deletion-contraction over exact integers).
std::vector<long long> chromatic_polynomial(const Graph& g);

} // namespace arrkit
