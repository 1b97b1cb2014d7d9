#include "arrkit/graph.hpp"

#include <algorithm>
#include <set>

namespace arrkit {

Graph Graph::make(int n, std::vector<std::pair<int, int>> raw_edges)
{
    Graph g;
    g.vertices = n;
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : raw_edges) {
        if (a == b)
            throw SchemaError("graph has a loop at vertex " + std::to_string(a));
        if (a > b)
            std::swap(a, b);
        if (a < 1 || b > n)
            throw SchemaError("edge endpoint out of range");
        seen.insert({a, b});
    }
    g.edges.assign(seen.begin(), seen.end());
    return g;
}

bool Graph::has_edge(int a, int b) const
{
    if (a > b)
        std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

std::vector<int> Graph::neighbours(int v) const
{
    std::vector<int> out;
    for (auto [a, b] : edges) {
        if (a == v)
            out.push_back(b);
        else if (b == v)
            out.push_back(a);
    }
    return out;
}

Graph named_graph(const std::string& name)
{
    if (name == "k2")
        return Graph::make(2, {{1, 2}});
    if (name == "k3")
        return Graph::make(3, {{1, 2}, {1, 3}, {2, 3}});
    if (name == "k4")
        return Graph::make(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    if (name == "path3")
        return Graph::make(3, {{1, 2}, {2, 3}});
    if (name == "path4")
        return Graph::make(4, {{1, 2}, {2, 3}, {3, 4}});
    if (name == "c4")
        return Graph::make(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    if (name == "c5")
        return Graph::make(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}});
    if (name.rfind("edgeless", 0) == 0) {
        const int n = std::stoi(name.substr(8));
        return Graph::make(n, {});
    }
    throw SchemaError("unknown graph name '" + name + "'");
}

namespace {

void cycle_dfs(const Graph& g, int start, std::vector<int>& path, std::vector<bool>& used,
               std::vector<std::vector<int>>& out)
{
    const int v = path.back();
    for (int w : g.neighbours(v)) {
        if (w == start && path.size() >= 3) {
            // canonical: second vertex smaller than last kills the reflection
            if (path[1] < path.back())
                out.push_back(path);
            continue;
        }
        if (w <= start || used[w])
            continue;
        used[w] = true;
        path.push_back(w);
        cycle_dfs(g, start, path, used, out);
        path.pop_back();
        used[w] = false;
    }
}

} // namespace

std::vector<std::vector<int>> simple_cycles(const Graph& g)
{
    std::vector<std::vector<int>> out;
    std::vector<bool> used(g.vertices + 1, false);
    for (int s = 1; s <= g.vertices; ++s) {
        std::vector<int> path = {s};
        used[s] = true;
        cycle_dfs(g, s, path, used, out);
        used[s] = false;
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Multigraph deletion-contraction. Parallel edges collapse (chromatic
// polynomial ignores multiplicity); a loop kills the branch.
long long chrom_rec(int n, std::vector<std::pair<int, int>> edges, long long k)
{
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [a, b] : edges)
        if (a == b)
            return 0;
    if (edges.empty()) {
        long long acc = 1;
        for (int i = 0; i < n; ++i)
            acc *= k;
        return acc;
    }
    const auto [a, b] = edges.back();
    auto del = edges;
    del.pop_back();
    // contract b into a
    std::vector<std::pair<int, int>> con;
    for (auto e : del) {
        int u = e.first == b ? a : e.first;
        int v = e.second == b ? a : e.second;
        if (u > v)
            std::swap(u, v);
        con.push_back({u, v});
    }
    // relabel vertices > b downwards
    for (auto& e : con) {
        if (e.first > b)
            --e.first;
        if (e.second > b)
            --e.second;
    }
    return chrom_rec(n, del, k) - chrom_rec(n - 1, con, k);
}

} // namespace

long long chromatic_polynomial_at(const Graph& g, long long k)
{
    return chrom_rec(g.vertices, g.edges, k);
}

namespace {

// Polynomial-valued deletion-contraction, coefficients in the monomial basis.
std::vector<long long> chrom_poly_rec(int n, std::vector<std::pair<int, int>> edges)
{
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [a, b] : edges)
        if (a == b)
            return {0};
    if (edges.empty()) {
        std::vector<long long> coeff(n + 1, 0);
        coeff[n] = 1;
        return coeff;
    }
    const auto [a, b] = edges.back();
    auto del = edges;
    del.pop_back();
    std::vector<std::pair<int, int>> con;
    for (auto e : del) {
        int u = e.first == b ? a : e.first;
        int v = e.second == b ? a : e.second;
        if (u > v)
            std::swap(u, v);
        con.push_back({u, v});
    }
    for (auto& e : con) {
        if (e.first > b)
            --e.first;
        if (e.second > b)
            --e.second;
    }
    auto p = chrom_poly_rec(n, del);
    const auto q = chrom_poly_rec(n - 1, con);
    if (p.size() < q.size())
        p.resize(q.size(), 0);
    for (std::size_t i = 0; i < q.size(); ++i)
        p[i] -= q[i];
    return p;
}

} // namespace

std::vector<long long> chromatic_polynomial(const Graph& g)
{
    auto coeff = chrom_poly_rec(g.vertices, g.edges);
    while (coeff.size() > 1 && coeff.back() == 0)
        coeff.pop_back();
    return coeff;
}

} // namespace arrkit
