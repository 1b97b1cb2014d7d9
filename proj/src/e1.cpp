#include "arrkit/e1.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace arrkit {

int E1Algebra::dim(const Bidegree& b) const
{
    auto it = bucket.find(b);
    return it == bucket.end() ? 0 : static_cast<int>(it->second.size());
}

std::map<int, Rat> E1Algebra::unit() const
{
    std::map<int, Rat> u;
    const int x0 = poset.bottom;
    // the support space at the bottom is H*(X); its unit occupies the degree-0
    // part. Built-in constructors store the ring unit as the weight-0 part of
    // the first basis vectors; custom modules must put the unit there too.
    // We reconstruct it as the sum of degree-0 basis vectors weighted by the
    // stored unit when available (projective/diagonal put "1" first).
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i].x == x0 && supp.space[x0].deg[basis[i].h] == 0 && basis[i].m == 0)
            u[static_cast<int>(i)] = unit_coeff_[basis[i].h];
    return u;
}

std::map<int, Rat> E1Algebra::product(int i, int j) const
{
    std::map<int, Rat> out;
    const Gen a = basis[i];
    const Gen b = basis[j];
    const int qj = supp.space[b.x].deg[b.h];
    const Rat sign = ((poset.rank(a.x) * qj) % 2 == 0) ? 1 : -1;
    for (const auto& [key, os_tensor] : os.product) {
        if (key[0] != a.x || key[1] != b.x)
            continue;
        const int t = key[2];
        auto os_it = os_tensor.find({a.m, b.m});
        if (os_it == os_tensor.end())
            continue;
        auto sp_it = supp.product.find(key);
        if (sp_it == supp.product.end())
            continue;
        auto hp_it = sp_it->second.find({a.h, b.h});
        if (hp_it == sp_it->second.end())
            continue;
        for (const auto& [h2, ch] : hp_it->second)
            for (const auto& [m2, cm] : os_it->second) {
                const int flat = flat_index_.at(std::array<int, 3>{t, h2, m2});
                out[flat] += sign * ch * cm;
            }
    }
    for (auto it = out.begin(); it != out.end();)
        it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
}

std::map<int, Rat> E1Algebra::differential(int i) const
{
    std::map<int, Rat> out;
    const Gen a = basis[i];
    const int q = supp.space[a.x].deg[a.h];
    const Rat sign = (q % 2 == 0) ? 1 : -1;
    for (int y : poset.covers_down[a.x]) {
        const RatMatrix& g = supp.cover.at({y, a.x});
        const RatMatrix& del = os.structure.at({y, a.x});
        for (int h2 = 0; h2 < g.rows; ++h2) {
            const Rat& gc = g.at(h2, a.h);
            if (gc == 0)
                continue;
            for (int m2 = 0; m2 < del.rows; ++m2) {
                const Rat& dc = del.at(m2, a.m);
                if (dc == 0)
                    continue;
                const int flat = flat_index_.at(std::array<int, 3>{y, h2, m2});
                out[flat] += sign * gc * dc;
            }
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
}

std::string E1Algebra::describe_gen(int i) const
{
    const Gen g = basis[i];
    return poset.ids[g.x] + ":" + supp.space[g.x].label[g.h] + ":" + os.basis[g.x][g.m].str();
}

namespace {

E1Algebra assemble(const GradedPoset& L, OSAlgebra os, SupportModule supp)
{
    if (os.poset.ids != L.ids || supp.poset.ids != L.ids)
        throw PosetMismatch("OS algebra and support module must share the poset");
    E1Algebra e;
    e.poset = L;
    e.os = std::move(os);
    e.supp = std::move(supp);

    for (int x = 0; x < L.size(); ++x)
        for (int h = 0; h < e.supp.space[x].dim(); ++h)
            for (int m = 0; m < e.os.dim(x); ++m) {
                const int flat = static_cast<int>(e.basis.size());
                e.basis.push_back({x, h, m});
                const Bidegree b{-L.rank(x), e.supp.space[x].deg[h]};
                e.bidegree_of.push_back(b);
                e.flat_index_[std::array<int, 3>{x, h, m}] = flat;
                e.bucket[b].push_back(flat);
            }
    e.pos_of.assign(e.basis.size(), -1);
    for (const auto& [b, list] : e.bucket)
        for (std::size_t k = 0; k < list.size(); ++k)
            e.pos_of[list[k]] = static_cast<int>(k);

    // unit coefficients at the bottom: ring unit of the ambient space
    e.unit_coeff_.assign(e.supp.space[L.bottom].dim(), Rat(0));
    for (int h = 0; h < e.supp.space[L.bottom].dim(); ++h)
        if (e.supp.space[L.bottom].deg[h] == 0)
            e.unit_coeff_[h] = 1;

    // d1 blocks
    for (const auto& [b, list] : e.bucket) {
        const Bidegree target{b.first + 1, b.second};
        auto it = e.bucket.find(target);
        const int rows = it == e.bucket.end() ? 0 : static_cast<int>(it->second.size());
        RatMatrix block(rows, static_cast<int>(list.size()));
        for (std::size_t col = 0; col < list.size(); ++col)
            for (const auto& [flat, c] : e.differential(list[col])) {
                if (e.bidegree_of[flat] != target)
                    throw InvariantViolation("d1 leaves the (p+1,q) block");
                block.set(e.pos_of[flat], static_cast<int>(col), c);
            }
        e.d1[b] = std::move(block);
    }
    return e;
}

} // namespace

E1Algebra build_e1_lattice(const GradedPoset& L, const OSAlgebra& os, const SupportModule& supp)
{
    return assemble(L, os, supp);
}

E1Algebra build_e1_cubical(const SupportModule& supp)
{
    const GradedPoset& b = supp.poset;
    // the poset must be Boolean: 2^n elements, ranks binomially distributed
    const int n = static_cast<int>(b.atoms.size());
    if (b.size() != (1 << n))
        throw SchemaError("cubical route needs a support module over a Boolean lattice");
    return assemble(b, os_algebra(b), supp);
}

CheckReport verify_e1(const E1Algebra& e1)
{
    CheckReport rep;
    const int n = static_cast<int>(e1.basis.size());

    bool dd = true;
    std::string dd_detail;
    for (const auto& [b, block] : e1.d1) {
        const Bidegree next{b.first + 1, b.second};
        auto it = e1.d1.find(next);
        if (it == e1.d1.end())
            continue;
        if (!(it->second * block).is_zero()) {
            dd = false;
            dd_detail = "d1^2 != 0 at (" + std::to_string(b.first) + "," + std::to_string(b.second) + ")";
            break;
        }
    }
    rep.add("d1_squared_zero", dd, dd_detail);

    bool weight = true;
    for (const auto& [key, m] : e1.supp.cover) {
        for (const auto& [ij, v] : m.entries) {
            (void)v;
            if (e1.supp.space[key.first].deg[ij.first] != e1.supp.space[key.second].deg[ij.second])
                weight = false;
        }
    }
    rep.add("weight_preservation", weight,
            weight ? "" : "a cover map mixes ambient degrees");

    bool leib = true, comm = true;
    std::string leib_detail, comm_detail;
    std::vector<std::map<int, Rat>> dcache(n);
    for (int i = 0; i < n; ++i)
        dcache[i] = e1.differential(i);
    for (int i = 0; i < n && (leib || comm); ++i) {
        for (int j = 0; j < n && (leib || comm); ++j) {
            const auto ab = e1.product(i, j);
            if (comm) {
                auto ba = e1.product(j, i);
                const long long di = e1.total_degree(i), dj = e1.total_degree(j);
                const Rat sgn = ((di * dj) % 2 == 0) ? 1 : -1;
                std::map<int, Rat> diff = ab;
                for (const auto& [k, c] : ba)
                    diff[k] -= sgn * c;
                for (const auto& [k, c] : diff)
                    if (c != 0) {
                        comm = false;
                        comm_detail = "commutativity fails on " + e1.describe_gen(i) + " * " +
                                      e1.describe_gen(j);
                        break;
                    }
            }
            if (leib) {
                std::map<int, Rat> lhs;
                for (const auto& [k, c] : ab)
                    for (const auto& [k2, c2] : dcache[k])
                        lhs[k2] += c * c2;
                for (const auto& [k, c] : dcache[i])
                    for (const auto& [k2, c2] : e1.product(k, j))
                        lhs[k2] -= c * c2;
                const Rat sgn = (e1.total_degree(i) % 2 == 0) ? 1 : -1;
                for (const auto& [k, c] : dcache[j])
                    for (const auto& [k2, c2] : e1.product(i, k))
                        lhs[k2] -= sgn * c * c2;
                for (const auto& [k, c] : lhs)
                    if (c != 0) {
                        leib = false;
                        leib_detail = "Leibniz fails on " + e1.describe_gen(i) + " * " +
                                      e1.describe_gen(j);
                        break;
                    }
            }
        }
    }
    rep.add("leibniz", leib, leib_detail);
    rep.add("graded_commutativity", comm, comm_detail);
    return rep;
}

CheckReport verify_e1(const E1Algebra& e1, const CohomologyRing& h)
{
    CheckReport rep = verify_e1(e1);
    long long chi1 = 0, chi2 = 0;
    for (const auto& [b, list] : e1.bucket)
        chi1 += ((b.first + b.second) % 2 == 0 ? 1 : -1) * static_cast<long long>(list.size());
    for (const auto& [b, d] : h.dims)
        chi2 += ((b.first + b.second) % 2 == 0 ? 1 : -1) * static_cast<long long>(d);
    rep.add("euler_invariance", chi1 == chi2,
            chi1 == chi2 ? "" : "chi(E1) != chi(E2)");
    return rep;
}

CohomologyRing cohomology(const E1Algebra& e1, int section)
{
    CohomologyRing h;
    for (const auto& [b, list] : e1.bucket) {
        const RatMatrix& out = e1.d1.at(b);
        Subspace ker = kernel_basis(out);
        if (out.rows == 0) {
            ker.ambient_dim = static_cast<int>(list.size());
            ker.basis.clear();
            for (std::size_t i = 0; i < list.size(); ++i) {
                RatVec v(list.size(), Rat(0));
                v[i] = 1;
                ker.basis.push_back(std::move(v));
            }
        }
        Subspace img;
        img.ambient_dim = static_cast<int>(list.size());
        const Bidegree prev{b.first - 1, b.second};
        auto pit = e1.d1.find(prev);
        if (pit != e1.d1.end())
            img = image_basis(pit->second);
        const Subspace q = quotient_basis(img, ker);
        if (q.dim() > 0 || !img.basis.empty()) {
            h.image[b] = img.basis;
        }
        if (q.dim() > 0) {
            h.dims[b] = q.dim();
            auto reps = q.basis;
            if (section != 0 && !img.basis.empty()) {
                for (auto& r : reps)
                    for (const auto& iv : img.basis)
                        add_scaled(r, Rat(section), iv);
            }
            h.reps[b] = std::move(reps);
        }
    }

    int max_n = 0;
    for (const auto& [b, d] : h.dims) {
        const int n = b.first + b.second;
        if (n < 0)
            throw InvariantViolation("cohomology in negative total degree");
        max_n = std::max(max_n, n);
        h.weights[n][b.second] += d;
    }
    h.betti.assign(max_n + 1, 0);
    for (const auto& [b, d] : h.dims)
        h.betti[b.first + b.second] += d;

    // ring structure on representatives, projected back to the class basis
    for (const auto& [ba, repsa] : h.reps)
        for (const auto& [bb, repsb] : h.reps) {
            const Bidegree bt{ba.first + bb.first, ba.second + bb.second};
            for (std::size_t i = 0; i < repsa.size(); ++i)
                for (std::size_t j = 0; j < repsb.size(); ++j) {
                    // multiply in E1
                    std::map<int, Rat> prod;
                    const auto& la = e1.bucket.at(ba);
                    const auto& lb = e1.bucket.at(bb);
                    for (std::size_t ia = 0; ia < la.size(); ++ia) {
                        if (repsa[i][ia] == 0)
                            continue;
                        for (std::size_t jb = 0; jb < lb.size(); ++jb) {
                            if (repsb[j][jb] == 0)
                                continue;
                            for (const auto& [k, c] : e1.product(la[ia], lb[jb]))
                                prod[k] += repsa[i][ia] * repsb[j][jb] * c;
                        }
                    }
                    bool nonzero = false;
                    for (const auto& [k, c] : prod)
                        if (c != 0)
                            nonzero = true;
                    if (!nonzero)
                        continue;
                    auto bt_it = e1.bucket.find(bt);
                    if (bt_it == e1.bucket.end())
                        throw InvariantViolation("product lands outside the page");
                    RatVec v(bt_it->second.size(), Rat(0));
                    for (const auto& [k, c] : prod) {
                        if (e1.bidegree_of[k] != bt)
                            throw InvariantViolation("product mixes bidegrees");
                        v[e1.pos_of[k]] = c;
                    }
                    // project to class coordinates modulo the image
                    std::vector<RatVec> span;
                    auto rit = h.reps.find(bt);
                    if (rit != h.reps.end())
                        for (const auto& r : rit->second)
                            span.push_back(r);
                    const std::size_t nreps = span.size();
                    auto iit = h.image.find(bt);
                    if (iit != h.image.end())
                        for (const auto& r : iit->second)
                            span.push_back(r);
                    auto coords = coords_in_span(span, v);
                    if (!coords)
                        throw InvariantViolation("product class not closed");
                    std::vector<std::pair<CohomologyRing::ClassRef, Rat>> terms;
                    for (std::size_t k = 0; k < nreps; ++k)
                        if ((*coords)[k] != 0)
                            terms.push_back(
                                {{bt.first, bt.second, static_cast<int>(k)}, (*coords)[k]});
                    if (!terms.empty())
                        h.ring[{{ba.first, ba.second, static_cast<int>(i)},
                                {bb.first, bb.second, static_cast<int>(j)}}] = std::move(terms);
                }
        }
    return h;
}

int CohomologyRing::total_dim() const
{
    int s = 0;
    for (const auto& [b, d] : dims)
        s += d;
    return s;
}

std::vector<long long> poincare_polynomial(const CohomologyRing& h)
{
    return h.betti;
}

FormalityReport formality_report(const E1Algebra& e1, const CohomologyRing& h)
{
    FormalityReport fr;
    // the section must send the unit class to the cdga unit
    const auto unit = e1.unit();
    auto it00 = h.reps.find({0, 0});
    if (it00 == h.reps.end() || it00->second.size() != 1) {
        fr.detail = "no one-dimensional unit class";
        return fr;
    }
    {
        const auto& rep = it00->second[0];
        const auto& list = e1.bucket.at({0, 0});
        std::map<int, Rat> diff;
        for (std::size_t k = 0; k < list.size(); ++k)
            diff[list[k]] = rep[k];
        for (const auto& [k, c] : unit)
            diff[k] -= c;
        for (const auto& [k, c] : diff)
            if (c != 0) {
                fr.detail = "unit class representative differs from the cdga unit";
                return fr;
            }
    }
    // products of representatives must land exactly in the representative span
    for (const auto& [ba, repsa] : h.reps)
        for (const auto& [bb, repsb] : h.reps)
            for (std::size_t i = 0; i < repsa.size(); ++i)
                for (std::size_t j = 0; j < repsb.size(); ++j) {
                    const Bidegree bt{ba.first + bb.first, ba.second + bb.second};
                    std::map<int, Rat> prod;
                    const auto& la = e1.bucket.at(ba);
                    const auto& lb = e1.bucket.at(bb);
                    for (std::size_t ia = 0; ia < la.size(); ++ia) {
                        if (repsa[i][ia] == 0)
                            continue;
                        for (std::size_t jb = 0; jb < lb.size(); ++jb) {
                            if (repsb[j][jb] == 0)
                                continue;
                            for (const auto& [k, c] : e1.product(la[ia], lb[jb]))
                                prod[k] += repsa[i][ia] * repsb[j][jb] * c;
                        }
                    }
                    bool nonzero = false;
                    for (const auto& [k, c] : prod)
                        if (c != 0)
                            nonzero = true;
                    if (!nonzero)
                        continue;
                    auto bt_it = e1.bucket.find(bt);
                    RatVec v(bt_it->second.size(), Rat(0));
                    for (const auto& [k, c] : prod)
                        v[e1.pos_of[k]] = c;
                    std::vector<RatVec> span;
                    auto rit = h.reps.find(bt);
                    if (rit != h.reps.end())
                        span = rit->second;
                    auto coords = coords_in_span(span, v);
                    if (!coords) {
                        fr.detail = "product of representatives leaves the section";
                        return fr;
                    }
                }
    fr.formal_by_section = true;
    return fr;
}

std::map<Bidegree, RatMatrix> group_action_on_e1(const E1Algebra& e1, const SupportAction& act)
{
    const GradedPoset& p = e1.poset;
    if (static_cast<int>(act.element_perm.size()) != p.size())
        throw NotAutomorphism("element permutation has wrong size");
    // poset automorphism: ranks and covers preserved
    for (int x = 0; x < p.size(); ++x) {
        if (p.rank(act.element_perm[x]) != p.rank(x))
            throw NotAutomorphism("permutation does not preserve rank");
        for (int y : p.covers_down[x]) {
            const int sy = act.element_perm[y], sx = act.element_perm[x];
            bool found = false;
            for (int z : p.covers_down[sx])
                if (z == sy)
                    found = true;
            if (!found)
                throw NotAutomorphism("permutation does not preserve covers");
        }
    }
    // support structure fixed: U commutes with cover maps
    for (const auto& [key, g] : e1.supp.cover) {
        const auto [y, x] = key;
        const int sy = act.element_perm[y], sx = act.element_perm[x];
        const RatMatrix lhs = act.space_maps[y] * g;
        const RatMatrix rhs = e1.supp.cover.at({sy, sx}) * act.space_maps[x];
        if (!(lhs == rhs))
            throw NotAutomorphism("space maps do not commute with cover maps at " + p.ids[x]);
    }

    // induced OS action on representatives
    std::vector<RatMatrix> os_maps(p.size());
    for (int x = 0; x < p.size(); ++x) {
        const int sx = act.element_perm[x];
        RatMatrix m(e1.os.dim(sx), e1.os.dim(x));
        for (int col = 0; col < e1.os.dim(x); ++col) {
            Monomial img;
            img.atoms = e1.os.basis[x][col].atoms;
            for (auto& a : img.atoms)
                a = act.atom_perm[a];
            // sort and track the sign
            int sign = 1;
            for (std::size_t i = 0; i < img.atoms.size(); ++i)
                for (std::size_t j = i + 1; j < img.atoms.size(); ++j)
                    if (img.atoms[i] > img.atoms[j])
                        sign = -sign;
            std::sort(img.atoms.begin(), img.atoms.end());
            const RatVec nf = os_normal_form(e1.os, sx, {{Rat(sign), img}});
            for (std::size_t r = 0; r < nf.size(); ++r)
                if (nf[r] != 0)
                    m.set(static_cast<int>(r), col, nf[r]);
        }
        os_maps[x] = std::move(m);
    }

    // assemble per-bidegree matrices
    std::map<Bidegree, RatMatrix> out;
    for (const auto& [b, list] : e1.bucket) {
        RatMatrix m(static_cast<int>(list.size()), static_cast<int>(list.size()));
        for (std::size_t col = 0; col < list.size(); ++col) {
            const auto gen = e1.basis[list[col]];
            const int sx = act.element_perm[gen.x];
            const RatMatrix& um = act.space_maps[gen.x];
            const RatMatrix& om = os_maps[gen.x];
            for (int h2 = 0; h2 < um.rows; ++h2) {
                if (um.at(h2, gen.h) == 0)
                    continue;
                for (int m2 = 0; m2 < om.rows; ++m2) {
                    if (om.at(m2, gen.m) == 0)
                        continue;
                    const int flat = e1.flat_index_.at(std::array<int, 3>{sx, h2, m2});
                    if (e1.bidegree_of[flat] != b)
                        throw NotAutomorphism("action does not preserve bidegree");
                    m.set(e1.pos_of[flat], static_cast<int>(col),
                          um.at(h2, gen.h) * om.at(m2, gen.m));
                }
            }
        }
        out[b] = std::move(m);
    }
    // commute with d1
    for (const auto& [b, block] : e1.d1) {
        const Bidegree next{b.first + 1, b.second};
        if (!e1.bucket.count(next)) {
            if (!block.is_zero())
                throw NotAutomorphism("dangling d1 block");
            continue;
        }
        const RatMatrix lhs = out.at(next) * block;
        const RatMatrix rhs = e1.d1.at(b).rows ? e1.d1.at(b) * RatMatrix() : RatMatrix();
        (void)rhs;
        const RatMatrix rhs2 = e1.d1.at(b) * out.at(b);
        if (!(lhs == rhs2))
            throw NotAutomorphism("action does not commute with d1");
    }
    return out;
}

std::string render_e_table(const std::map<Bidegree, int>& page)
{
    int pmin = 0, pmax = 0, qmin = 0, qmax = 0;
    bool any = false;
    for (const auto& [b, d] : page) {
        if (d == 0)
            continue;
        if (!any) {
            pmin = pmax = b.first;
            qmin = qmax = b.second;
            any = true;
        } else {
            pmin = std::min(pmin, b.first);
            pmax = std::max(pmax, b.first);
            qmin = std::min(qmin, b.second);
            qmax = std::max(qmax, b.second);
        }
    }
    std::ostringstream out;
    if (!any) {
        out << "---+----\n   | q\\p\n";
        return out.str();
    }
    pmax = std::max(pmax, 0);
    qmin = std::min(qmin, 0);
    const int w = 5;
    for (int q = qmax; q >= qmin; --q) {
        for (int p = pmin; p <= pmax; ++p) {
            auto it = page.find({p, q});
            std::string cell = ".";
            if (it != page.end() && it->second != 0)
                cell = std::to_string(it->second);
            out << std::string(w - cell.size(), ' ') << cell;
        }
        out << " | " << q << "\n";
    }
    out << std::string(w * (pmax - pmin + 1), '-') << "-+----\n";
    for (int p = pmin; p <= pmax; ++p) {
        const std::string cell = std::to_string(p);
        out << std::string(w - cell.size(), ' ') << cell;
    }
    out << " | q\\p\n";
    return out.str();
}

std::string report_to_json(const E1Algebra& e1, const CohomologyRing& h)
{
    nlohmann::json j;
    auto key = [](const Bidegree& b) {
        return "(" + std::to_string(b.first) + "," + std::to_string(b.second) + ")";
    };
    j["e1"] = nlohmann::json::object();
    for (const auto& [b, list] : e1.bucket)
        if (!list.empty())
            j["e1"][key(b)] = list.size();
    j["e2"] = nlohmann::json::object();
    for (const auto& [b, d] : h.dims)
        j["e2"][key(b)] = d;
    j["betti"] = h.betti;
    j["weights"] = nlohmann::json::object();
    for (const auto& [n, qs] : h.weights) {
        nlohmann::json wn = nlohmann::json::object();
        for (const auto& [q, d] : qs)
            wn[std::to_string(q)] = d;
        j["weights"][std::to_string(n)] = wn;
    }
    j["poincare"] = poincare_polynomial(h);
    j["ring"] = nlohmann::json::array();
    auto cref = [](const CohomologyRing::ClassRef& r) {
        return nlohmann::json::array({r[0], r[1], r[2]});
    };
    for (const auto& [ab, terms] : h.ring) {
        nlohmann::json termj = nlohmann::json::array();
        for (const auto& [r, c] : terms)
            termj.push_back({cref(r), rat_str(c)});
        j["ring"].push_back({{"a", cref(ab.first)}, {"b", cref(ab.second)}, {"terms", termj}});
    }
    return j.dump(2);
}

} // namespace arrkit
