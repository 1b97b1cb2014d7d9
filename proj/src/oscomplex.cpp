#include "arrkit/oscomplex.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace arrkit {

std::string Monomial::str() const
{
    std::string s = "dv[";
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(atoms[i] + 1);
    }
    return s + "]";
}

std::vector<MonoTerm> koszul_partial(const Monomial& m)
{
    std::vector<MonoTerm> out;
    for (std::size_t k = 0; k < m.atoms.size(); ++k) {
        Monomial rest;
        rest.atoms = m.atoms;
        rest.atoms.erase(rest.atoms.begin() + static_cast<long>(k));
        out.push_back({Rat((k % 2 == 0) ? 1 : -1), rest});
    }
    return out;
}

std::pair<int, Monomial> grassmann_product(const Monomial& a, const Monomial& b)
{
    Monomial merged;
    merged.atoms.reserve(a.atoms.size() + b.atoms.size());
    int inversions = 0;
    std::size_t i = 0, j = 0;
    while (i < a.atoms.size() || j < b.atoms.size()) {
        if (j == b.atoms.size() || (i < a.atoms.size() && a.atoms[i] < b.atoms[j])) {
            merged.atoms.push_back(a.atoms[i++]);
        } else if (i == a.atoms.size() || b.atoms[j] < a.atoms[i]) {
            // b's atom jumps over the remaining atoms of a
            inversions += static_cast<int>(a.atoms.size() - i);
            merged.atoms.push_back(b.atoms[j++]);
        } else {
            return {0, Monomial{}}; // common atom
        }
    }
    return {(inversions % 2 == 0) ? 1 : -1, merged};
}

namespace {

// Unique minimal upper bound of an atom set inside [0, top]; throws when the
// interval fails to be a lattice there.
int sup_in_interval(const GradedPoset& p, const std::vector<int>& atom_positions, int top)
{
    std::vector<int> elems;
    for (int pos : atom_positions)
        elems.push_back(p.atoms[pos]);
    const auto mub = p.min_upper_bounds_in(elems, top);
    if (mub.size() != 1)
        throw NotLocallyGeometric("atom set has " + std::to_string(mub.size()) +
                                  " minimal upper bounds inside an interval");
    return mub[0];
}

} // namespace

AtomicComplex atomic_complex(const GradedPoset& p)
{
    if (!is_locally_geometric(p))
        throw NotLocallyGeometric("poset is not a locally geometric lattice");
    const int na = static_cast<int>(p.atoms.size());
    if (na > 16)
        throw SchemaError("atomic complex limited to 16 atoms");

    AtomicComplex d;
    d.poset = &p;
    d.labelled.assign(p.size(), {});
    for (unsigned mask = 0; mask < (1u << na); ++mask) {
        std::vector<int> positions, elems;
        for (int i = 0; i < na; ++i)
            if (mask & (1u << i)) {
                positions.push_back(i);
                elems.push_back(p.atoms[i]);
            }
        const auto mub =
            positions.empty() ? std::vector<int>{p.bottom} : p.min_upper_bounds(elems);
        for (int x : mub)
            d.labelled[x].push_back({x, Monomial{positions}});
    }
    for (auto& v : d.labelled)
        std::sort(v.begin(), v.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });

    // position lookup per element
    std::vector<std::map<Monomial, int>> pos(p.size());
    for (int x = 0; x < p.size(); ++x)
        for (std::size_t i = 0; i < d.labelled[x].size(); ++i)
            pos[x][d.labelled[x][i].second] = static_cast<int>(i);

    d.inner.assign(p.size(), RatMatrix());
    for (int x = 0; x < p.size(); ++x) {
        const int nx = static_cast<int>(d.labelled[x].size());
        d.inner[x] = RatMatrix(nx, nx);
    }
    for (int x = 0; x < p.size(); ++x) {
        for (std::size_t col = 0; col < d.labelled[x].size(); ++col) {
            const Monomial& mono = d.labelled[x][col].second;
            const auto terms = koszul_partial(mono);
            for (const auto& [coef, rest] : terms) {
                const int y = rest.atoms.empty() ? p.bottom : sup_in_interval(p, rest.atoms, x);
                if (y == x) {
                    const int row = pos[x].at(rest);
                    d.inner[x].set(row, static_cast<int>(col),
                                   d.inner[x].at(row, static_cast<int>(col)) + coef);
                } else {
                    if (p.rank(y) != p.rank(x) - 1)
                        throw NotLocallyGeometric("Koszul term drops rank by more than one");
                    auto key = std::make_pair(y, x);
                    auto it = d.cross.find(key);
                    if (it == d.cross.end())
                        it = d.cross
                                 .emplace(key, RatMatrix(static_cast<int>(d.labelled[y].size()),
                                                         static_cast<int>(d.labelled[x].size())))
                                 .first;
                    const int row = pos[y].at(rest);
                    it->second.set(row, static_cast<int>(col),
                                   it->second.at(row, static_cast<int>(col)) + coef);
                }
            }
        }
    }
    return d;
}

namespace {

// Incremental elimination basis for testing membership/extension of spans.
struct Eliminator {
    std::vector<RatVec> rows; // reduced, nonzero leading entries at pivot cols
    std::vector<int> pivots;

    // reduce v against rows; returns the remainder
    RatVec reduce(RatVec v) const
    {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const int pc = pivots[r];
            if (v[pc] != 0)
                add_scaled(v, -v[pc], rows[r]);
        }
        return v;
    }
    // try to add v to the span; true if rank grew
    bool add(const RatVec& v)
    {
        RatVec w = reduce(v);
        int pc = -1;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] != 0) {
                pc = static_cast<int>(i);
                break;
            }
        if (pc < 0)
            return false;
        const Rat inv = Rat(1) / w[pc];
        for (auto& x : w)
            x *= inv;
        rows.push_back(std::move(w));
        pivots.push_back(pc);
        // keep rows mutually reduced
        for (std::size_t r = 0; r + 1 < rows.size(); ++r)
            if (rows[r][pc] != 0)
                add_scaled(rows[r], -rows[r][pc], rows.back());
        return true;
    }
};

} // namespace

OSAlgebra os_algebra(const GradedPoset& p)
{
    AtomicComplex d = atomic_complex(p);
    OSAlgebra alg;
    alg.poset = p;
    const int n = p.size();
    alg.basis.assign(n, {});
    alg.top_monomials.assign(n, {});
    alg.relation_rows.assign(n, {});
    alg.normal_form_tab.assign(n, {});

    std::vector<std::map<Monomial, int>> top_pos(n);
    for (int x = 0; x < n; ++x) {
        const int r = p.rank(x);
        // flat positions of size-r and size-(r+1) monomials inside D_x
        std::vector<int> top_idx, next_idx;
        for (std::size_t i = 0; i < d.labelled[x].size(); ++i) {
            const int sz = static_cast<int>(d.labelled[x][i].second.atoms.size());
            if (sz == r)
                top_idx.push_back(static_cast<int>(i));
            else if (sz == r + 1)
                next_idx.push_back(static_cast<int>(i));
            else if (sz < r)
                throw AcyclicityFailure("monomial below rank in atomic complex");
        }
        for (int i : top_idx) {
            top_pos[x][d.labelled[x][i].second] = static_cast<int>(alg.top_monomials[x].size());
            alg.top_monomials[x].push_back(d.labelled[x][i].second);
        }
        const int nt = static_cast<int>(top_idx.size());

        Eliminator elim;
        for (int j : next_idx) {
            RatVec rel(nt, Rat(0));
            for (int i = 0; i < nt; ++i) {
                const Rat& c = d.inner[x].at(top_idx[i], j);
                if (c != 0)
                    rel[i] = c;
            }
            if (elim.add(rel))
                alg.relation_rows[x].push_back(elim.rows.back());
        }
        // representatives: first unit monomial vectors extending the relations
        Eliminator chooser = elim;
        std::vector<int> basis_cols;
        for (int i = 0; i < nt; ++i) {
            RatVec e(nt, Rat(0));
            e[i] = 1;
            if (chooser.add(e)) {
                basis_cols.push_back(i);
                alg.basis[x].push_back(alg.top_monomials[x][i]);
            }
        }
        if (static_cast<int>(alg.basis[x].size()) != std::llabs(p.moebius(x)))
            throw AcyclicityFailure("dim OS_" + p.ids[x] + " = " +
                                    std::to_string(alg.basis[x].size()) + " but |mu| = " +
                                    std::to_string(std::llabs(p.moebius(x))));

        // normal-form table: monomial -> coordinates in the representatives
        std::vector<RatVec> span; // columns: basis units then relation vectors
        for (int c : basis_cols) {
            RatVec e(nt, Rat(0));
            e[c] = 1;
            span.push_back(e);
        }
        for (const auto& rel : alg.relation_rows[x])
            span.push_back(rel);
        for (int i = 0; i < nt; ++i) {
            RatVec e(nt, Rat(0));
            e[i] = 1;
            auto coords = coords_in_span(span, e);
            if (!coords)
                throw AcyclicityFailure("normal form failed");
            coords->resize(alg.basis[x].size());
            alg.normal_form_tab[x].push_back(*coords);
        }
    }

    // structure maps on representatives
    for (int x = 0; x < n; ++x) {
        for (int y : p.covers_down[x]) {
            RatMatrix m(static_cast<int>(alg.basis[y].size()),
                        static_cast<int>(alg.basis[x].size()));
            for (std::size_t col = 0; col < alg.basis[x].size(); ++col) {
                const auto terms = koszul_partial(alg.basis[x][col]);
                for (const auto& [coef, rest] : terms) {
                    const int lbl =
                        rest.atoms.empty() ? p.bottom : sup_in_interval(p, rest.atoms, x);
                    if (lbl != y)
                        continue;
                    const auto it = top_pos[y].find(rest);
                    if (it == top_pos[y].end())
                        throw AcyclicityFailure("missing monomial in structure map");
                    const RatVec& nf = alg.normal_form_tab[y][it->second];
                    for (std::size_t k = 0; k < nf.size(); ++k)
                        if (nf[k] != 0)
                            m.set(static_cast<int>(k), static_cast<int>(col),
                                  m.at(static_cast<int>(k), static_cast<int>(col)) + coef * nf[k]);
                }
            }
            alg.structure[{y, x}] = std::move(m);
        }
    }

    // products on rank-additive minimal joins
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const auto joins = p.min_upper_bounds({x, y});
            for (int t : joins) {
                if (p.rank(t) != p.rank(x) + p.rank(y))
                    continue;
                ProductTensor tensor;
                for (std::size_t i = 0; i < alg.basis[x].size(); ++i)
                    for (std::size_t j = 0; j < alg.basis[y].size(); ++j) {
                        const auto [sign, merged] =
                            grassmann_product(alg.basis[x][i], alg.basis[y][j]);
                        if (sign == 0)
                            continue;
                        const int lbl = sup_in_interval(p, merged.atoms, t);
                        if (lbl != t)
                            throw AcyclicityFailure("product monomial label mismatch");
                        const RatVec& nf = alg.normal_form_tab[t][top_pos[t].at(merged)];
                        std::vector<std::pair<int, Rat>> terms;
                        for (std::size_t k = 0; k < nf.size(); ++k)
                            if (nf[k] != 0)
                                terms.push_back({static_cast<int>(k), Rat(sign) * nf[k]});
                        if (!terms.empty())
                            tensor[{static_cast<int>(i), static_cast<int>(j)}] = std::move(terms);
                    }
                alg.product[{x, y, t}] = std::move(tensor);
            }
        }
    return alg;
}

RatVec os_normal_form(const OSAlgebra& alg, int x, const std::vector<MonoTerm>& v)
{
    const GradedPoset& p = alg.poset;
    if (x < 0 || x >= p.size())
        throw UnknownElement("os_normal_form: bad element");
    RatVec out(alg.basis[x].size(), Rat(0));
    std::map<Monomial, int> pos;
    for (std::size_t i = 0; i < alg.top_monomials[x].size(); ++i)
        pos[alg.top_monomials[x][i]] = static_cast<int>(i);
    for (const auto& [coef, mono] : v) {
        if (static_cast<int>(mono.atoms.size()) != p.rank(x))
            throw LabelMismatch("monomial " + mono.str() + " has wrong size for element " +
                                p.ids[x]);
        auto it = pos.find(mono);
        if (it == pos.end())
            throw LabelMismatch("monomial " + mono.str() + " does not carry label " + p.ids[x]);
        const RatVec& nf = alg.normal_form_tab[x][it->second];
        for (std::size_t k = 0; k < nf.size(); ++k)
            out[k] += coef * nf[k];
    }
    return out;
}

std::map<int, RatVec> OSAlgebra::multiply(int x, const RatVec& a, int y, const RatVec& b) const
{
    std::map<int, RatVec> out;
    for (const auto& [key, tensor] : product) {
        if (key[0] != x || key[1] != y)
            continue;
        const int t = key[2];
        RatVec acc(basis[t].size(), Rat(0));
        bool any = false;
        for (const auto& [ij, terms] : tensor) {
            const Rat c = a[ij.first] * b[ij.second];
            if (c == 0)
                continue;
            for (const auto& [k, w] : terms) {
                acc[k] += c * w;
                any = true;
            }
        }
        if (any && !is_zero_vec(acc))
            out[t] = std::move(acc);
    }
    return out;
}

std::map<int, RatVec> OSAlgebra::boundary(int x, const RatVec& a) const
{
    std::map<int, RatVec> out;
    for (int y : poset.covers_down[x]) {
        const RatMatrix& m = structure.at({y, x});
        RatVec v = m.apply(a);
        if (!is_zero_vec(v))
            out[y] = std::move(v);
    }
    return out;
}

namespace {

void accumulate(std::map<int, RatVec>& acc, int elem, const RatVec& v, const Rat& scale)
{
    auto it = acc.find(elem);
    if (it == acc.end())
        it = acc.emplace(elem, RatVec(v.size(), Rat(0))).first;
    for (std::size_t i = 0; i < v.size(); ++i)
        it->second[i] += scale * v[i];
}

bool all_zero(const std::map<int, RatVec>& acc)
{
    for (const auto& [e, v] : acc)
        if (!is_zero_vec(v))
            return false;
    return true;
}

} // namespace

CheckReport verify_chain_algebra(const OSAlgebra& alg)
{
    const GradedPoset& p = alg.poset;
    CheckReport rep;

    // d^2 = 0 across all two-step paths
    bool dd = true;
    std::string dd_detail;
    for (int x = 0; x < p.size() && dd; ++x) {
        std::map<int, RatMatrix> acc; // z -> sum over y of M_zy M_yx
        for (int y : p.covers_down[x])
            for (int z : p.covers_down[y]) {
                const RatMatrix prod = alg.structure.at({z, y}) * alg.structure.at({y, x});
                auto it = acc.find(z);
                if (it == acc.end())
                    acc.emplace(z, prod);
                else
                    it->second = it->second + prod;
            }
        for (const auto& [z, m] : acc)
            if (!m.is_zero()) {
                dd = false;
                dd_detail = "nonzero d^2 from " + p.ids[x] + " to " + p.ids[z];
                break;
            }
    }
    rep.add("ddzero", dd, dd_detail);

    // Leibniz on all basis pairs
    bool leib = true;
    std::string leib_detail;
    for (int x = 0; x < p.size() && leib; ++x)
        for (int y = 0; y < p.size() && leib; ++y)
            for (std::size_t i = 0; i < alg.basis[x].size() && leib; ++i)
                for (std::size_t j = 0; j < alg.basis[y].size() && leib; ++j) {
                    RatVec a(alg.basis[x].size(), Rat(0)), b(alg.basis[y].size(), Rat(0));
                    a[i] = 1;
                    b[j] = 1;
                    std::map<int, RatVec> diff;
                    for (const auto& [t, v] : alg.multiply(x, a, y, b))
                        for (const auto& [z, w] : alg.boundary(t, v))
                            accumulate(diff, z, w, Rat(1));
                    for (const auto& [x2, da] : alg.boundary(x, a))
                        for (const auto& [t, v] : alg.multiply(x2, da, y, b))
                            accumulate(diff, t, v, Rat(-1));
                    const Rat sgn = (p.rank(x) % 2 == 0) ? 1 : -1;
                    for (const auto& [y2, db] : alg.boundary(y, b))
                        for (const auto& [t, v] : alg.multiply(x, a, y2, db))
                            accumulate(diff, t, v, -sgn);
                    if (!all_zero(diff)) {
                        leib = false;
                        leib_detail = "Leibniz fails on " + p.ids[x] + " x " + p.ids[y];
                    }
                }
    rep.add("leibniz", leib, leib_detail);

    // acyclicity of Tot(OS|[0,x]) for every x > 0
    bool acyc = true;
    std::string acyc_detail;
    for (int x = 0; x < p.size() && acyc; ++x) {
        if (x == p.bottom)
            continue;
        std::vector<std::pair<int, int>> flat; // (element, basis index)
        std::map<int, int> offset;
        for (int t = 0; t < p.size(); ++t) {
            if (!p.leq(t, x))
                continue;
            offset[t] = static_cast<int>(flat.size());
            for (int i = 0; i < alg.dim(t); ++i)
                flat.push_back({t, i});
        }
        const int nflat = static_cast<int>(flat.size());
        RatMatrix dtot(nflat, nflat);
        for (const auto& [key, m] : alg.structure) {
            const auto [y, t] = key;
            if (!offset.count(t) || !offset.count(y))
                continue;
            for (const auto& [ij, v] : m.entries)
                dtot.set(offset.at(y) + ij.first, offset.at(t) + ij.second, v);
        }
        // exactness degree by degree: rank(d) restricted appropriately
        // H = ker d / im d on the whole graded space: total dims
        const int r = rank(dtot);
        if (2 * r != nflat) { // acyclic iff rank is half the dimension
            acyc = false;
            acyc_detail = "interval [0," + p.ids[x] + "] not acyclic";
        }
    }
    rep.add("acyclicity", acyc, acyc_detail);

    // dim vs Moebius
    bool dims = true;
    std::string dim_detail;
    for (int x = 0; x < p.size(); ++x)
        if (alg.dim(x) != std::llabs(p.moebius(x))) {
            dims = false;
            dim_detail = "dim OS_" + p.ids[x] + " != |mu|";
            break;
        }
    rep.add("moebius_dims", dims, dim_detail);
    return rep;
}

std::string os_algebra_to_json(const OSAlgebra& alg)
{
    const GradedPoset& p = alg.poset;
    nlohmann::json j;
    j["poset"] = nlohmann::json::parse(poset_to_json(p));
    auto& elems = j["elements"];
    std::vector<std::string> sorted_ids = p.ids;
    std::sort(sorted_ids.begin(), sorted_ids.end());
    for (const auto& id : sorted_ids) {
        const int x = p.idx(id);
        nlohmann::json e;
        e["rank"] = p.rank(x);
        e["dim"] = alg.dim(x);
        e["basis"] = nlohmann::json::array();
        for (const auto& m : alg.basis[x]) {
            nlohmann::json atoms = nlohmann::json::array();
            for (int a : m.atoms)
                atoms.push_back(a + 1);
            e["basis"].push_back(atoms);
        }
        elems[id] = e;
    }
    auto& st = j["structure_maps"];
    st = nlohmann::json::object();
    for (const auto& [key, m] : alg.structure) {
        const auto [y, x] = key;
        nlohmann::json rowsj = nlohmann::json::array();
        for (int i = 0; i < m.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < m.cols; ++c)
                row.push_back(rat_str(m.at(i, c)));
            rowsj.push_back(row);
        }
        st[p.ids[y] + "<:" + p.ids[x]] = rowsj;
    }
    auto& pr = j["products"];
    pr = nlohmann::json::object();
    for (const auto& [key, tensor] : alg.product) {
        if (tensor.empty())
            continue;
        nlohmann::json tj = nlohmann::json::array();
        for (const auto& [ij, terms] : tensor) {
            nlohmann::json termj = nlohmann::json::array();
            for (const auto& [k, c] : terms)
                termj.push_back({k, rat_str(c)});
            tj.push_back({{"i", ij.first}, {"j", ij.second}, {"terms", termj}});
        }
        pr[p.ids[key[0]] + "*" + p.ids[key[1]] + "->" + p.ids[key[2]]] = tj;
    }
    return j.dump(2);
}

} // namespace arrkit
