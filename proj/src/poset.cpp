#include "arrkit/poset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace arrkit {

int GradedPoset::idx(const std::string& id) const
{
    auto it = index_of.find(id);
    if (it == index_of.end())
        throw UnknownElement("unknown poset element '" + id + "'");
    return it->second;
}

int GradedPoset::max_rank() const
{
    int m = 0;
    for (int r : rank_)
        m = std::max(m, r);
    return m;
}

bool GradedPoset::leq(int a, int b) const
{
    if (a < 0 || a >= size() || b < 0 || b >= size())
        throw UnknownElement("poset index out of range");
    return leq_[a][b];
}

std::vector<int> GradedPoset::min_upper_bounds(const std::vector<int>& s) const
{
    std::vector<int> ub;
    for (int t = 0; t < size(); ++t) {
        bool ok = true;
        for (int x : s)
            if (!leq(x, t)) {
                ok = false;
                break;
            }
        if (ok)
            ub.push_back(t);
    }
    std::vector<int> out;
    for (int t : ub) {
        bool minimal = true;
        for (int u : ub)
            if (u != t && leq_[u][t]) {
                minimal = false;
                break;
            }
        if (minimal)
            out.push_back(t);
    }
    return out;
}

std::vector<int> GradedPoset::min_upper_bounds_in(const std::vector<int>& s, int top) const
{
    std::vector<int> ub;
    for (int t = 0; t < size(); ++t) {
        if (!leq_[t][top])
            continue;
        bool ok = true;
        for (int x : s)
            if (!leq_[x][t]) {
                ok = false;
                break;
            }
        if (ok)
            ub.push_back(t);
    }
    std::vector<int> out;
    for (int t : ub) {
        bool minimal = true;
        for (int u : ub)
            if (u != t && leq_[u][t]) {
                minimal = false;
                break;
            }
        if (minimal)
            out.push_back(t);
    }
    return out;
}

int GradedPoset::atom_pos(int x) const
{
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i] == x)
            return static_cast<int>(i);
    return -1;
}

GradedPoset make_poset(const std::vector<std::pair<std::string, int>>& elements,
                       const std::vector<std::pair<std::string, std::string>>& covers,
                       const std::vector<std::string>& atom_order)
{
    GradedPoset p;
    for (const auto& [id, r] : elements) {
        if (p.index_of.count(id))
            throw SchemaError("duplicate poset element '" + id + "'");
        p.index_of[id] = p.size();
        p.ids.push_back(id);
        p.rank_.push_back(r);
    }
    const int n = p.size();
    if (n == 0)
        throw SchemaError("empty poset");
    p.covers_up.assign(n, {});
    p.covers_down.assign(n, {});
    for (const auto& [lo, hi] : covers) {
        const int y = p.idx(lo), x = p.idx(hi);
        if (p.rank_[x] != p.rank_[y] + 1)
            throw InvariantViolation("cover " + lo + " <: " + hi + " does not raise rank by 1");
        p.covers_up[y].push_back(x);
        p.covers_down[x].push_back(y);
    }
    for (auto& v : p.covers_up)
        std::sort(v.begin(), v.end());
    for (auto& v : p.covers_down)
        std::sort(v.begin(), v.end());

    // bottom: the unique rank-0 element
    for (int i = 0; i < n; ++i)
        if (p.rank_[i] == 0) {
            if (p.bottom >= 0)
                throw InvariantViolation("two rank-0 elements");
            p.bottom = i;
        }
    if (p.bottom < 0)
        throw InvariantViolation("no rank-0 element");

    // reflexive-transitive closure of covers, by rank sweep
    p.leq_.assign(n, std::vector<bool>(n, false));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&p](int a, int b) { return p.rank_[a] < p.rank_[b]; });
    for (int x : order) {
        p.leq_[x][x] = true;
        for (int y : p.covers_down[x])
            for (int z = 0; z < n; ++z)
                if (p.leq_[z][y])
                    p.leq_[z][x] = true;
    }
    for (int i = 0; i < n; ++i)
        if (!p.leq_[p.bottom][i])
            throw InvariantViolation("element '" + p.ids[i] + "' not reachable from bottom");

    // atoms
    std::vector<int> atom_idx;
    for (int i = 0; i < n; ++i)
        if (p.rank_[i] == 1)
            atom_idx.push_back(i);
    if (!atom_order.empty()) {
        if (atom_order.size() != atom_idx.size())
            throw SchemaError("atom order must list exactly the rank-1 elements");
        p.atoms.clear();
        std::set<int> seen;
        for (const auto& id : atom_order) {
            const int a = p.idx(id);
            if (p.rank_[a] != 1 || !seen.insert(a).second)
                throw SchemaError("bad atom order entry '" + id + "'");
            p.atoms.push_back(a);
        }
    } else {
        p.atoms = atom_idx;
    }

    // atomicity: every x is a minimal upper bound of its atoms
    for (int x = 0; x < n; ++x) {
        if (p.rank_[x] == 0)
            continue;
        std::vector<int> below;
        for (int a : p.atoms)
            if (p.leq_[a][x])
                below.push_back(a);
        if (below.empty())
            throw InvariantViolation("element '" + p.ids[x] + "' dominates no atom");
        const auto mub = p.min_upper_bounds(below);
        if (std::find(mub.begin(), mub.end(), x) == mub.end())
            throw InvariantViolation("element '" + p.ids[x] +
                                     "' is not a minimal upper bound of its atoms");
    }

    // Moebius numbers mu[0,x] by the defining recursion
    p.moebius_.assign(n, 0);
    for (int x : order) {
        if (x == p.bottom) {
            p.moebius_[x] = 1;
            continue;
        }
        long long s = 0;
        for (int y = 0; y < n; ++y)
            if (y != x && p.leq_[y][x])
                s += p.moebius_[y];
        p.moebius_[x] = -s;
    }
    return p;
}

namespace {

// join/meet inside the interval [0,top]; -1 when not unique or missing
int join_in(const GradedPoset& p, int x, int y, int top)
{
    const auto m = p.min_upper_bounds_in({x, y}, top);
    return m.size() == 1 ? m[0] : -1;
}

int meet_in(const GradedPoset& p, int x, int y)
{
    std::vector<int> lb;
    for (int t = 0; t < p.size(); ++t)
        if (p.leq_[t][x] && p.leq_[t][y])
            lb.push_back(t);
    std::vector<int> maximal;
    for (int t : lb) {
        bool is_max = true;
        for (int u : lb)
            if (u != t && p.leq_[t][u]) {
                is_max = false;
                break;
            }
        if (is_max)
            maximal.push_back(t);
    }
    return maximal.size() == 1 ? maximal[0] : -1;
}

} // namespace

bool is_locally_geometric(const GradedPoset& p)
{
    for (int top = 0; top < p.size(); ++top) {
        std::vector<int> interval;
        for (int z = 0; z < p.size(); ++z)
            if (p.leq_[z][top])
                interval.push_back(z);
        for (int x : interval)
            for (int y : interval) {
                if (x > y)
                    continue;
                const int j = join_in(p, x, y, top);
                const int m = meet_in(p, x, y);
                if (j < 0 || m < 0)
                    return false;
                if (p.rank_[j] + p.rank_[m] > p.rank_[x] + p.rank_[y])
                    return false;
            }
    }
    return true;
}

namespace {

std::string subset_id(const std::vector<int>& atoms_1based)
{
    std::string s = "{";
    for (std::size_t i = 0; i < atoms_1based.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(atoms_1based[i]);
    }
    return s + "}";
}

} // namespace

GradedPoset boolean_lattice(int n)
{
    if (n < 0 || n > 20)
        throw SchemaError("boolean lattice size out of range");
    std::vector<std::pair<std::string, int>> elements;
    std::vector<std::pair<std::string, std::string>> covers;
    std::vector<std::string> atom_order;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i))
                members.push_back(i + 1);
        elements.push_back({subset_id(members), static_cast<int>(members.size())});
        if (members.size() == 1)
            atom_order.push_back(subset_id(members));
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                std::vector<int> lower;
                for (int j = 0; j < n; ++j)
                    if ((mask & (1u << j)) && j != i)
                        lower.push_back(j + 1);
                covers.push_back({subset_id(lower), subset_id(members)});
            }
    }
    std::sort(atom_order.begin(), atom_order.end(),
              [](const std::string& a, const std::string& b) {
                  return std::stoi(a.substr(1, a.size() - 2)) <
                         std::stoi(b.substr(1, b.size() - 2));
              });
    return make_poset(elements, covers, atom_order);
}

namespace {

using Partition = std::vector<std::vector<int>>; // sorted blocks of sorted vertices

std::string partition_id(const Partition& blocks)
{
    std::string s;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i)
            s += "|";
        s += "{";
        for (std::size_t j = 0; j < blocks[i].size(); ++j) {
            if (j)
                s += ",";
            s += std::to_string(blocks[i][j]);
        }
        s += "}";
    }
    return s;
}

Partition canonical_partition(Partition blocks)
{
    for (auto& b : blocks)
        std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return blocks;
}

bool block_connected(const Graph& g, const std::vector<int>& block)
{
    if (block.size() <= 1)
        return true;
    std::set<int> in(block.begin(), block.end());
    std::vector<int> stack = {block[0]};
    std::set<int> seen = {block[0]};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : g.neighbours(v))
            if (in.count(w) && !seen.count(w)) {
                seen.insert(w);
                stack.push_back(w);
            }
    }
    return seen.size() == block.size();
}

void enum_partitions(int n, int next, Partition& acc, std::vector<Partition>& out)
{
    if (next > n) {
        out.push_back(canonical_partition(acc));
        return;
    }
    for (auto& block : acc) {
        block.push_back(next);
        enum_partitions(n, next + 1, acc, out);
        block.pop_back();
    }
    acc.push_back({next});
    enum_partitions(n, next + 1, acc, out);
    acc.pop_back();
}

} // namespace

GradedPoset partition_lattice(const Graph& g)
{
    const int n = g.vertices;
    if (n < 1 || n > 10)
        throw SchemaError("partition lattice limited to 1..10 vertices");
    std::vector<Partition> all;
    Partition acc;
    enum_partitions(n, 1, acc, all);

    std::vector<Partition> kept;
    for (const auto& part : all) {
        bool ok = true;
        for (const auto& b : part)
            if (!block_connected(g, b)) {
                ok = false;
                break;
            }
        if (ok)
            kept.push_back(part);
    }

    std::vector<std::pair<std::string, int>> elements;
    std::map<std::string, const Partition*> by_id;
    for (const auto& part : kept) {
        int r = 0;
        for (const auto& b : part)
            r += static_cast<int>(b.size()) - 1;
        elements.push_back({partition_id(part), r});
        by_id[partition_id(part)] = &part;
    }

    // covers: merge two blocks joined by an edge
    std::vector<std::pair<std::string, std::string>> covers;
    std::set<std::pair<std::string, std::string>> cover_set;
    for (const auto& part : kept) {
        for (std::size_t i = 0; i < part.size(); ++i)
            for (std::size_t j = i + 1; j < part.size(); ++j) {
                bool joined = false;
                for (int a : part[i]) {
                    for (int b : part[j])
                        if (g.has_edge(a, b)) {
                            joined = true;
                            break;
                        }
                    if (joined)
                        break;
                }
                if (!joined)
                    continue;
                Partition merged;
                for (std::size_t k = 0; k < part.size(); ++k)
                    if (k != i && k != j)
                        merged.push_back(part[k]);
                std::vector<int> fused = part[i];
                fused.insert(fused.end(), part[j].begin(), part[j].end());
                merged.push_back(fused);
                cover_set.insert({partition_id(part), partition_id(canonical_partition(merged))});
            }
    }
    covers.assign(cover_set.begin(), cover_set.end());

    // atoms are the edges, ordered as in g.edges
    std::vector<std::string> atom_order;
    for (auto [a, b] : g.edges) {
        Partition part;
        part.push_back({a, b});
        for (int v = 1; v <= n; ++v)
            if (v != a && v != b)
                part.push_back({v});
        atom_order.push_back(partition_id(canonical_partition(part)));
    }
    return make_poset(elements, covers, atom_order);
}

GradedPoset intersection_poset(const std::vector<std::string>& atom_names,
                               const std::map<std::vector<int>, std::string>& strata)
{
    const int n = static_cast<int>(atom_names.size());
    auto find_label = [&strata](const std::vector<int>& key) -> const std::string& {
        auto it = strata.find(key);
        if (it == strata.end())
            throw SchemaError("strata must label every subset of atoms");
        return it->second;
    };
    const std::string ambient = find_label({});

    // label -> union of generating atom subsets (empty label = empty intersection)
    std::map<std::string, std::set<int>> gen;
    std::vector<int> subset;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        subset.clear();
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i))
                subset.push_back(i);
        const std::string& label = find_label(subset);
        if (label.empty())
            continue;
        auto& s = gen[label];
        for (int i : subset)
            s.insert(i);
    }
    // sanity: singletons must have distinct labels different from ambient
    for (int i = 0; i < n; ++i) {
        const std::string& li = find_label({i});
        if (li.empty() || li == ambient)
            throw SchemaError("atom '" + atom_names[i] + "' has no proper stratum");
    }

    // order labels by inclusion of generating sets; ambient is bottom
    std::vector<std::string> labels;
    for (const auto& [l, s] : gen)
        labels.push_back(l);
    const int m = static_cast<int>(labels.size());
    std::map<std::string, int> pos;
    for (int i = 0; i < m; ++i)
        pos[labels[i]] = i;
    auto contains = [&gen, &labels](int big, int small) {
        const auto& b = gen[labels[big]];
        for (int x : gen[labels[small]])
            if (!b.count(x))
                return false;
        return true;
    };

    // rank by longest chain from bottom
    std::vector<int> rank(m, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j || !contains(j, i) || contains(i, j))
                    continue;
                if (rank[j] < rank[i] + 1) {
                    rank[j] = rank[i] + 1;
                    changed = true;
                }
            }
    }

    // covers: strict containments with nothing in between
    std::vector<std::pair<std::string, std::string>> covers;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j || !contains(j, i) || contains(i, j))
                continue;
            bool direct = true;
            for (int k = 0; k < m && direct; ++k) {
                if (k == i || k == j)
                    continue;
                if (contains(k, i) && !contains(i, k) && contains(j, k) && !contains(k, j))
                    direct = false;
            }
            if (!direct)
                continue;
            if (rank[j] != rank[i] + 1)
                throw NotGradable("no rank function: cover " + labels[i] + " <: " + labels[j] +
                                  " skips levels");
            covers.push_back({labels[i], labels[j]});
        }

    std::vector<std::pair<std::string, int>> elements;
    for (int i = 0; i < m; ++i)
        elements.push_back({labels[i], rank[i]});
    std::vector<std::string> atom_order;
    for (int i = 0; i < n; ++i)
        atom_order.push_back(find_label({i}));
    std::sort(atom_order.begin(), atom_order.end());
    atom_order.erase(std::unique(atom_order.begin(), atom_order.end()), atom_order.end());
    try {
        return make_poset(elements, covers, atom_order);
    } catch (const InvariantViolation& e) {
        throw NotGradable(std::string("intersection data admits no graded poset: ") + e.what());
    }
}

CubicalLattice cubical_lattice(const GradedPoset& p)
{
    const int na = static_cast<int>(p.atoms.size());
    if (na > 20)
        throw SchemaError("cubical lattice limited to 20 atoms");
    for (int x = 0; x < p.size(); ++x) {
        if (p.rank_[x] == 0)
            continue;
        std::vector<int> below;
        for (int a : p.atoms)
            if (p.leq_[a][x])
                below.push_back(a);
        const auto mub = p.min_upper_bounds(below);
        if (std::find(mub.begin(), mub.end(), x) == mub.end())
            throw NotAtomic("poset is not atomic at '" + p.ids[x] + "'");
    }

    CubicalLattice out;
    std::vector<std::pair<std::string, int>> elements;
    std::vector<std::pair<std::string, std::string>> covers;
    std::vector<std::string> atom_order;
    std::vector<std::pair<int, std::vector<int>>> members; // (vertex, atom positions)

    auto pair_id = [&p](int x, const std::vector<int>& atom_positions) {
        std::string s = "(" + p.ids[x] + ";{";
        for (std::size_t i = 0; i < atom_positions.size(); ++i) {
            if (i)
                s += ",";
            s += std::to_string(atom_positions[i] + 1);
        }
        return s + "})";
    };

    for (unsigned mask = 0; mask < (1u << na); ++mask) {
        std::vector<int> atom_positions, atom_elems;
        for (int i = 0; i < na; ++i)
            if (mask & (1u << i)) {
                atom_positions.push_back(i);
                atom_elems.push_back(p.atoms[i]);
            }
        const auto mub = atom_positions.empty() ? std::vector<int>{p.bottom}
                                                : p.min_upper_bounds(atom_elems);
        for (int x : mub) {
            members.push_back({x, atom_positions});
            elements.push_back({pair_id(x, atom_positions), static_cast<int>(atom_positions.size())});
            if (atom_positions.size() == 1)
                atom_order.push_back(pair_id(x, atom_positions));
        }
    }
    // covers: (x,I) <: (y,J) iff I subset J, |J|-|I| = 1, x <= y
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = 0; j < members.size(); ++j) {
            const auto& [x, I] = members[i];
            const auto& [y, J] = members[j];
            if (J.size() != I.size() + 1 || !p.leq(x, y))
                continue;
            if (!std::includes(J.begin(), J.end(), I.begin(), I.end()))
                continue;
            covers.push_back({pair_id(x, I), pair_id(y, J)});
        }
    // atom order follows the base poset's atom order
    std::sort(atom_order.begin(), atom_order.end(), [&](const std::string& a, const std::string& b) {
        auto key = [](const std::string& s) {
            const auto l = s.rfind("{"), r = s.rfind("}");
            return std::stoi(s.substr(l + 1, r - l - 1));
        };
        return key(a) < key(b);
    });
    out.q = make_poset(elements, covers, atom_order);
    out.vertex.assign(out.q.size(), -1);
    out.atom_set.assign(out.q.size(), {});
    for (const auto& [x, I] : members) {
        const int qi = out.q.idx(pair_id(x, I));
        out.vertex[qi] = x;
        out.atom_set[qi] = I;
    }
    return out;
}

std::string poset_to_json(const GradedPoset& p)
{
    nlohmann::json j;
    std::vector<std::string> sorted_ids = p.ids;
    std::sort(sorted_ids.begin(), sorted_ids.end());
    j["elements"] = nlohmann::json::array();
    for (const auto& id : sorted_ids)
        j["elements"].push_back({{"id", id}, {"rank", p.rank_[p.idx(id)]}});
    j["covers"] = nlohmann::json::array();
    std::vector<std::pair<std::string, std::string>> cv;
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x])
            cv.push_back({p.ids[y], p.ids[x]});
    std::sort(cv.begin(), cv.end());
    for (const auto& [lo, hi] : cv)
        j["covers"].push_back({lo, hi});
    j["atoms"] = nlohmann::json::array();
    for (int a : p.atoms)
        j["atoms"].push_back(p.ids[a]);
    return j.dump(2);
}

GradedPoset poset_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("bad poset JSON: ") + e.what());
    }
    if (!j.contains("elements") || !j.contains("covers"))
        throw SchemaError("poset JSON needs 'elements' and 'covers'");
    std::vector<std::pair<std::string, int>> elements;
    for (const auto& e : j["elements"]) {
        if (!e.contains("id") || !e.contains("rank"))
            throw SchemaError("poset element needs 'id' and 'rank'");
        elements.push_back({e["id"].get<std::string>(), e["rank"].get<int>()});
    }
    std::vector<std::pair<std::string, std::string>> covers;
    for (const auto& c : j["covers"]) {
        if (!c.is_array() || c.size() != 2)
            throw SchemaError("poset cover must be [lo,hi]");
        covers.push_back({c[0].get<std::string>(), c[1].get<std::string>()});
    }
    std::vector<std::string> atom_order;
    if (j.contains("atoms"))
        for (const auto& a : j["atoms"])
            atom_order.push_back(a.get<std::string>());
    try {
        return make_poset(elements, covers, atom_order);
    } catch (const UnknownElement& e) {
        throw SchemaError(std::string("poset JSON refers to unknown element: ") + e.what());
    }
}

} // namespace arrkit
