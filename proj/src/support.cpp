#include "arrkit/support.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace arrkit {

std::vector<int> GradedRing::basis_of_degree(int d) const
{
    std::vector<int> out;
    for (int i = 0; i < dim(); ++i)
        if (deg[i] == d)
            out.push_back(i);
    return out;
}

RatVec GradedRing::mul(const RatVec& a, const RatVec& b) const
{
    RatVec out(dim(), Rat(0));
    for (int i = 0; i < dim(); ++i) {
        if (a[i] == 0)
            continue;
        for (int j = 0; j < dim(); ++j) {
            if (b[j] == 0)
                continue;
            auto it = product.find({i, j});
            if (it == product.end())
                continue;
            for (const auto& [k, c] : it->second)
                out[k] += a[i] * b[j] * c;
        }
    }
    return out;
}

Rat GradedRing::integral(const RatVec& v) const
{
    Rat s = 0;
    for (int i = 0; i < dim(); ++i)
        if (deg[i] == top_degree)
            s += v[i];
    return s;
}

void GradedRing::validate() const
{
    if (static_cast<int>(unit.size()) != dim() || static_cast<int>(label.size()) != dim())
        throw SchemaError("graded ring: inconsistent sizes");
    for (const auto& [ij, terms] : product)
        for (const auto& [k, c] : terms) {
            (void)c;
            if (deg[k] != deg[ij.first] + deg[ij.second])
                throw InvariantViolation("graded ring: product does not add degrees");
        }
    // unit
    for (int i = 0; i < dim(); ++i) {
        RatVec e(dim(), Rat(0));
        e[i] = 1;
        if (mul(unit, e) != e || mul(e, unit) != e)
            throw InvariantViolation("graded ring: unit fails on basis " + label[i]);
    }
    // graded commutativity and associativity on all basis tuples
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) {
            RatVec ei(dim(), Rat(0)), ej(dim(), Rat(0));
            ei[i] = 1;
            ej[j] = 1;
            RatVec ab = mul(ei, ej), ba = mul(ej, ei);
            const Rat sgn = (deg[i] * deg[j]) % 2 == 0 ? 1 : -1;
            for (int k = 0; k < dim(); ++k)
                if (ab[k] != sgn * ba[k])
                    throw InvariantViolation("graded ring: not graded-commutative");
        }
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j)
            for (int k = 0; k < dim(); ++k) {
                RatVec ei(dim(), Rat(0)), ej(dim(), Rat(0)), ek(dim(), Rat(0));
                ei[i] = 1;
                ej[j] = 1;
                ek[k] = 1;
                if (mul(mul(ei, ej), ek) != mul(ei, mul(ej, ek)))
                    throw InvariantViolation("graded ring: not associative");
            }
    if (has_pairing) {
        // perfect in every degree: square blocks, invertible
        std::map<int, std::vector<int>> by_deg;
        for (int i = 0; i < dim(); ++i)
            by_deg[deg[i]].push_back(i);
        for (const auto& [d, rows] : by_deg) {
            const auto cols = basis_of_degree(top_degree - d);
            if (cols.size() != rows.size())
                throw NoPairing("pairing blocks not square in degree " + std::to_string(d));
            RatMatrix pm(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    RatVec a(dim(), Rat(0)), b(dim(), Rat(0));
                    a[rows[i]] = 1;
                    b[cols[j]] = 1;
                    pm.set(static_cast<int>(i), static_cast<int>(j), pair(a, b));
                }
            if (!inverse(pm))
                throw NoPairing("pairing singular in degree " + std::to_string(d));
        }
    }
}

GradedRing ring_projective(int n)
{
    GradedRing r;
    for (int i = 0; i <= n; ++i) {
        r.deg.push_back(2 * i);
        r.label.push_back(i == 0 ? "1" : (i == 1 ? "t" : "t^" + std::to_string(i)));
    }
    r.unit.assign(n + 1, Rat(0));
    r.unit[0] = 1;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (i + j <= n)
                r.product[{i, j}] = {{i + j, Rat(1)}};
    r.top_degree = 2 * n;
    r.has_pairing = true;
    r.validate();
    return r;
}

GradedRing ring_point() { return ring_projective(0); }

GradedRing ring_points(int k)
{
    GradedRing r;
    for (int i = 0; i < k; ++i) {
        r.deg.push_back(0);
        r.label.push_back("p" + std::to_string(i + 1));
    }
    r.unit.assign(k, Rat(1));
    for (int i = 0; i < k; ++i)
        r.product[{i, i}] = {{i, Rat(1)}};
    r.top_degree = 0;
    r.has_pairing = true;
    r.validate();
    return r;
}

GradedRing ring_quadric()
{
    GradedRing r;
    r.deg = {0, 2, 2, 4};
    r.label = {"1", "a", "b", "ab"};
    r.unit = {Rat(1), Rat(0), Rat(0), Rat(0)};
    for (int i = 0; i < 4; ++i) {
        r.product[{0, i}] = {{i, Rat(1)}};
        if (i)
            r.product[{i, 0}] = {{i, Rat(1)}};
    }
    r.product[{1, 2}] = {{3, Rat(1)}};
    r.product[{2, 1}] = {{3, Rat(1)}};
    r.top_degree = 4;
    r.has_pairing = true;
    r.validate();
    return r;
}

GradedRing ring_elliptic()
{
    GradedRing r;
    r.deg = {0, 1, 1, 2};
    r.label = {"1", "a", "b", "pt"};
    r.unit = {Rat(1), Rat(0), Rat(0), Rat(0)};
    for (int i = 0; i < 4; ++i) {
        r.product[{0, i}] = {{i, Rat(1)}};
        if (i)
            r.product[{i, 0}] = {{i, Rat(1)}};
    }
    r.product[{1, 2}] = {{3, Rat(1)}};
    r.product[{2, 1}] = {{3, Rat(-1)}};
    r.top_degree = 2;
    r.has_pairing = true;
    r.validate();
    return r;
}

GradedRing ring_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("bad ring JSON: ") + e.what());
    }
    GradedRing r;
    if (!j.contains("basis"))
        throw SchemaError("ring JSON needs 'basis'");
    for (const auto& b : j["basis"]) {
        r.deg.push_back(b.at("deg").get<int>());
        r.label.push_back(b.at("label").get<std::string>());
    }
    r.unit.assign(r.dim(), Rat(0));
    if (j.contains("unit")) {
        const auto& u = j["unit"];
        if (static_cast<int>(u.size()) != r.dim())
            throw SchemaError("ring unit size mismatch");
        for (int i = 0; i < r.dim(); ++i)
            r.unit[i] = rat_parse(u[i].get<std::string>());
    } else {
        r.unit[0] = 1;
    }
    for (const auto& pr : j.at("products")) {
        std::vector<std::pair<int, Rat>> terms;
        for (const auto& t : pr.at("terms"))
            terms.push_back({t[0].get<int>(), rat_parse(t[1].get<std::string>())});
        r.product[{pr.at("i").get<int>(), pr.at("j").get<int>()}] = terms;
    }
    if (j.contains("pairing")) {
        r.has_pairing = true;
        r.top_degree = j["pairing"].at("top_degree").get<int>();
    }
    r.validate();
    return r;
}

std::string ring_to_json(const GradedRing& r)
{
    nlohmann::json j;
    j["basis"] = nlohmann::json::array();
    for (int i = 0; i < r.dim(); ++i)
        j["basis"].push_back({{"label", r.label[i]}, {"deg", r.deg[i]}});
    j["unit"] = nlohmann::json::array();
    for (const auto& c : r.unit)
        j["unit"].push_back(rat_str(c));
    j["products"] = nlohmann::json::array();
    for (const auto& [ij, terms] : r.product) {
        nlohmann::json termj = nlohmann::json::array();
        for (const auto& [k, c] : terms)
            termj.push_back({k, rat_str(c)});
        j["products"].push_back({{"i", ij.first}, {"j", ij.second}, {"terms", termj}});
    }
    if (r.has_pairing)
        j["pairing"] = {{"top_degree", r.top_degree}};
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Kunneth helpers (tensor powers of a graded ring, with Koszul signs)

namespace {

struct Kunneth {
    const GradedRing* R = nullptr;
    int k = 0;
    std::vector<std::vector<int>> basis; // tuples, lex order
    std::map<std::vector<int>, int> pos;
    std::vector<int> deg;

    static Kunneth make(const GradedRing& ring, int k)
    {
        Kunneth K;
        K.R = &ring;
        K.k = k;
        std::vector<int> tuple(k, 0);
        while (true) {
            K.pos[tuple] = static_cast<int>(K.basis.size());
            int d = 0;
            for (int f : tuple)
                d += ring.deg[f];
            K.basis.push_back(tuple);
            K.deg.push_back(d);
            int i = k - 1;
            while (i >= 0 && tuple[i] == ring.dim() - 1)
                tuple[i--] = 0;
            if (i < 0)
                break;
            ++tuple[i];
        }
        return K;
    }

    int dim() const { return static_cast<int>(basis.size()); }

    // product of two basis tuples: componentwise with the Koszul sign
    std::vector<std::pair<int, Rat>> mul_basis(int a, int b) const
    {
        const auto& A = basis[a];
        const auto& B = basis[b];
        long long sign_exp = 0;
        for (int j = 0; j < k; ++j)
            for (int i = j + 1; i < k; ++i)
                sign_exp += static_cast<long long>(R->deg[B[j]]) * R->deg[A[i]];
        Rat coeff = (sign_exp % 2 == 0) ? 1 : -1;

        std::vector<std::pair<std::vector<int>, Rat>> acc = {{{}, coeff}};
        for (int f = 0; f < k; ++f) {
            auto it = R->product.find({A[f], B[f]});
            if (it == R->product.end())
                return {};
            std::vector<std::pair<std::vector<int>, Rat>> next;
            for (const auto& [prefix, c] : acc)
                for (const auto& [r, w] : it->second) {
                    auto t = prefix;
                    t.push_back(r);
                    next.push_back({std::move(t), c * w});
                }
            acc = std::move(next);
            if (acc.empty())
                return {};
        }
        std::vector<std::pair<int, Rat>> out;
        for (const auto& [tuple, c] : acc)
            out.push_back({pos.at(tuple), c});
        return out;
    }

    // integral over M^k (1 on tuples of top classes, 0 otherwise)
    Rat pair_basis(int a, int b) const
    {
        Rat s = 0;
        for (const auto& [t, c] : mul_basis(a, b)) {
            bool top = true;
            for (int f : basis[t])
                if (R->deg[f] != R->top_degree) {
                    top = false;
                    break;
                }
            if (top)
                s += c;
        }
        return s;
    }

    std::vector<int> basis_of_degree(int d) const
    {
        std::vector<int> out;
        for (int i = 0; i < dim(); ++i)
            if (deg[i] == d)
                out.push_back(i);
        return out;
    }

    RatMatrix pairing_matrix(int d) const
    {
        const auto rows = basis_of_degree(d);
        const auto cols = basis_of_degree(k * R->top_degree - d);
        RatMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                m.set(static_cast<int>(i), static_cast<int>(j), pair_basis(rows[i], cols[j]));
        return m;
    }
};

// Parse "{1,2}|{3}" into blocks.
std::vector<std::vector<int>> parse_partition_id(const std::string& id)
{
    std::vector<std::vector<int>> blocks;
    std::vector<int> cur;
    std::string num;
    for (char ch : id) {
        if (std::isdigit(ch)) {
            num += ch;
        } else {
            if (!num.empty()) {
                cur.push_back(std::stoi(num));
                num.clear();
            }
            if (ch == '}') {
                blocks.push_back(cur);
                cur.clear();
            }
        }
    }
    return blocks;
}

// Restriction along a block merge: from the Kunneth power over src_blocks to
// the one over dst_blocks (every dst block a union of src blocks).
// target_of[i] = index of the dst block containing src block i.
RatMatrix merge_restriction(const Kunneth& src, const Kunneth& dst, const GradedRing& R,
                            const std::vector<int>& target_of)
{
    RatMatrix m(dst.dim(), src.dim());
    const int ks = src.k;
    const int kd = dst.k;
    for (int col = 0; col < src.dim(); ++col) {
        const auto& tuple = src.basis[col];
        // graded sign of the stable grouping permutation
        long long sign_exp = 0;
        for (int i = 0; i < ks; ++i)
            for (int j = i + 1; j < ks; ++j)
                if (target_of[i] > target_of[j])
                    sign_exp += static_cast<long long>(R.deg[tuple[i]]) * R.deg[tuple[j]];
        const Rat sgn = (sign_exp % 2 == 0) ? 1 : -1;

        // multiply factors within each destination block, in source order
        std::vector<RatVec> block_val(kd, R.unit);
        bool dead = false;
        for (int i = 0; i < ks && !dead; ++i) {
            RatVec e(R.dim(), Rat(0));
            e[tuple[i]] = 1;
            block_val[target_of[i]] = R.mul(block_val[target_of[i]], e);
            if (is_zero_vec(block_val[target_of[i]]))
                dead = true;
        }
        if (dead)
            continue;
        // expand the tensor product of the block values
        std::vector<std::pair<std::vector<int>, Rat>> acc = {{{}, sgn}};
        for (int bjj = 0; bjj < kd; ++bjj) {
            std::vector<std::pair<std::vector<int>, Rat>> next;
            for (const auto& [prefix, c] : acc)
                for (int r = 0; r < R.dim(); ++r) {
                    if (block_val[bjj][r] == 0)
                        continue;
                    auto t = prefix;
                    t.push_back(r);
                    next.push_back({std::move(t), c * block_val[bjj][r]});
                }
            acc = std::move(next);
        }
        for (const auto& [t, c] : acc) {
            const int row = dst.pos.at(t);
            m.set(row, col, m.at(row, col) + c);
        }
    }
    return m;
}

} // namespace

// ---------------------------------------------------------------------------

void SupportModule::validate() const
{
    const GradedPoset& p = poset;
    if (static_cast<int>(space.size()) != p.size())
        throw SchemaError("support module: space count mismatch");
    for (const auto& [key, m] : cover) {
        const auto [y, x] = key;
        if (m.rows != space[y].dim() || m.cols != space[x].dim())
            throw SchemaError("support module: cover map size mismatch");
        for (const auto& [ij, v] : m.entries) {
            (void)v;
            if (space[y].deg[ij.first] != space[x].deg[ij.second])
                throw InvariantViolation("cover map " + p.ids[y] + "<:" + p.ids[x] +
                                         " is not degree-preserving");
        }
        bool found = false;
        for (int yy : p.covers_down[x])
            if (yy == y)
                found = true;
        if (!found)
            throw SchemaError("cover map on a non-cover pair");
    }
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x])
            if (!cover.count({y, x}))
                throw SchemaError("missing cover map " + p.ids[y] + "<:" + p.ids[x]);

    // square-commutation along length-2 paths
    for (int x = 0; x < p.size(); ++x) {
        std::map<int, std::vector<RatMatrix>> paths;
        for (int y : p.covers_down[x])
            for (int z : p.covers_down[y])
                paths[z].push_back(cover.at({z, y}) * cover.at({y, x}));
        for (const auto& [z, list] : paths)
            for (std::size_t i = 1; i < list.size(); ++i)
                if (!(list[i] == list[0]))
                    throw InvariantViolation("cover maps do not commute between " + p.ids[x] +
                                             " and " + p.ids[z]);
    }

    for (const auto& [key, tensor] : product) {
        const auto [x, y, t] = std::tuple(key[0], key[1], key[2]);
        if (p.rank(t) != p.rank(x) + p.rank(y))
            throw InvariantViolation("product triple not rank-additive");
        const auto mub = p.min_upper_bounds({x, y});
        if (std::find(mub.begin(), mub.end(), t) == mub.end())
            throw InvariantViolation("product target is not a minimal join");
        for (const auto& [ij, terms] : tensor) {
            for (const auto& [k, c] : terms) {
                (void)c;
                if (space[t].deg[k] != space[x].deg[ij.first] + space[y].deg[ij.second])
                    throw InvariantViolation("product does not add ambient degrees");
            }
        }
    }
}

SupportModule projective_support(int n, const GradedPoset& p,
                                 const std::map<std::string, int>& codim)
{
    SupportModule s;
    s.poset = p;
    std::vector<int> c(p.size(), -1);
    for (int x = 0; x < p.size(); ++x) {
        auto it = codim.find(p.ids[x]);
        if (it == codim.end())
            throw SchemaError("missing codim label for '" + p.ids[x] + "'");
        c[x] = it->second;
        if (c[x] < 0 || c[x] > n + 1)
            throw SchemaError("codim out of range for '" + p.ids[x] + "'");
    }
    if (c[p.bottom] != 0)
        throw SchemaError("ambient element must have codim 0");
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x])
            if (c[y] >= c[x])
                throw CodimMonotonicityViolation("codim does not increase along " + p.ids[y] +
                                                 " <: " + p.ids[x]);
    s.space.resize(p.size());
    s.weight_offset.assign(p.size(), 0);
    for (int x = 0; x < p.size(); ++x) {
        for (int k = c[x]; k <= n; ++k) {
            s.space[x].deg.push_back(2 * k);
            s.space[x].label.push_back(k == 0 ? "1" : "t^" + std::to_string(k));
        }
        s.weight_offset[x] = 2 * c[x];
    }
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x]) {
            RatMatrix m(s.space[y].dim(), s.space[x].dim());
            for (int k = c[x]; k <= n; ++k)
                m.set(k - c[y], k - c[x], 1);
            s.cover[{y, x}] = std::move(m);
        }
    for (int x = 0; x < p.size(); ++x)
        for (int y = 0; y < p.size(); ++y) {
            for (int t : p.min_upper_bounds({x, y})) {
                if (p.rank(t) != p.rank(x) + p.rank(y))
                    continue;
                ProductTensor tensor;
                for (int i = 0; i < s.space[x].dim(); ++i)
                    for (int j = 0; j < s.space[y].dim(); ++j) {
                        const int a = c[x] + i, b = c[y] + j;
                        if (a + b > n)
                            continue;
                        if (a + b < c[t])
                            throw InvariantViolation("projective product drops below codim");
                        tensor[{i, j}] = {{a + b - c[t], Rat(1)}};
                    }
                s.product[{x, y, t}] = std::move(tensor);
            }
        }
    s.validate();
    return s;
}

SupportModule affine_support(int n, const GradedPoset& p)
{
    SupportModule s;
    s.poset = p;
    s.space.resize(p.size());
    s.weight_offset.assign(p.size(), 0);
    for (int x = 0; x < p.size(); ++x) {
        if (p.rank(x) > n)
            throw SchemaError("rank exceeds ambient dimension");
        s.space[x].deg.push_back(2 * p.rank(x));
        s.space[x].label.push_back("tau");
        s.weight_offset[x] = 2 * p.rank(x);
    }
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x])
            s.cover[{y, x}] = RatMatrix(1, 1); // zero by degree mismatch
    for (int x = 0; x < p.size(); ++x)
        for (int y = 0; y < p.size(); ++y)
            for (int t : p.min_upper_bounds({x, y})) {
                if (p.rank(t) != p.rank(x) + p.rank(y))
                    continue;
                ProductTensor tensor;
                tensor[{0, 0}] = {{0, Rat(1)}};
                s.product[{x, y, t}] = std::move(tensor);
            }
    s.validate();
    return s;
}

SupportModule diagonal_support(const GradedRing& hM, const Graph& g)
{
    if (!hM.has_pairing)
        throw NoPairing("diagonal_support needs a Poincare pairing on H*(M)");
    if (hM.top_degree % 2 != 0)
        throw OddTopDegree("odd-dimensional M is not supported by this constructor");
    hM.validate();
    const int m2 = hM.top_degree; // 2 dim_C M

    SupportModule s;
    s.poset = partition_lattice(g);
    const GradedPoset& p = s.poset;
    const int n = g.vertices;

    std::vector<std::vector<std::vector<int>>> blocks(p.size());
    for (int x = 0; x < p.size(); ++x)
        blocks[x] = parse_partition_id(p.ids[x]);

    std::map<int, Kunneth> kun; // #blocks -> Kunneth power
    for (int x = 0; x < p.size(); ++x) {
        const int k = static_cast<int>(blocks[x].size());
        if (!kun.count(k))
            kun.emplace(k, Kunneth::make(hM, k));
    }
    (void)n;

    s.space.resize(p.size());
    s.weight_offset.assign(p.size(), 0);
    for (int x = 0; x < p.size(); ++x) {
        const int k = static_cast<int>(blocks[x].size());
        const int shift = m2 * p.rank(x);
        const Kunneth& K = kun.at(k);
        for (int i = 0; i < K.dim(); ++i) {
            s.space[x].deg.push_back(K.deg[i] + shift);
            std::string lbl;
            for (int f = 0; f < k; ++f) {
                if (f)
                    lbl += "*";
                lbl += hM.label[K.basis[i][f]];
            }
            s.space[x].label.push_back(lbl);
        }
        s.weight_offset[x] = shift;
    }

    auto target_map = [&](int fine, int coarse) {
        std::vector<int> target(blocks[fine].size(), -1);
        for (std::size_t i = 0; i < blocks[fine].size(); ++i) {
            const int v = blocks[fine][i][0];
            for (std::size_t j = 0; j < blocks[coarse].size(); ++j)
                if (std::find(blocks[coarse][j].begin(), blocks[coarse][j].end(), v) !=
                    blocks[coarse][j].end())
                    target[i] = static_cast<int>(j);
            if (target[i] < 0)
                throw InvariantViolation("partition blocks do not refine");
        }
        return target;
    };

    // cover maps: Gysin of the block-merging diagonal, via the pairing adjoint
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x]) {
            const Kunneth& Kx = kun.at(static_cast<int>(blocks[x].size()));
            const Kunneth& Ky = kun.at(static_cast<int>(blocks[y].size()));
            const RatMatrix restr = merge_restriction(Ky, Kx, hM, target_map(y, x));
            const int dx = m2 * Kx.k; // top internal degree on the x side
            const int dy = m2 * Ky.k;
            RatMatrix full(s.space[y].dim(), s.space[x].dim());
            for (int sdeg = 0; sdeg <= dx; ++sdeg) {
                const auto rows_x = Kx.basis_of_degree(sdeg);
                if (rows_x.empty())
                    continue;
                const auto rows_y = Ky.basis_of_degree(sdeg + m2);
                const auto cols_x = Kx.basis_of_degree(dx - sdeg);
                const auto cols_y = Ky.basis_of_degree(dy - sdeg - m2);
                // restriction block: from y-side degree dy-s-m2 to x-side degree dx-s
                RatMatrix mblock(static_cast<int>(cols_x.size()),
                                 static_cast<int>(cols_y.size()));
                for (std::size_t i = 0; i < cols_x.size(); ++i)
                    for (std::size_t j = 0; j < cols_y.size(); ++j)
                        mblock.set(static_cast<int>(i), static_cast<int>(j),
                                   restr.at(cols_x[i], cols_y[j]));
                const RatMatrix psrc = Kx.pairing_matrix(sdeg);
                const RatMatrix pdst = Ky.pairing_matrix(sdeg + m2);
                const RatMatrix gblock =
                    pairing_adjoint(mblock, psrc.transpose(), pdst.transpose());
                for (std::size_t i = 0; i < rows_y.size(); ++i)
                    for (std::size_t j = 0; j < rows_x.size(); ++j) {
                        const Rat& v = gblock.at(static_cast<int>(i), static_cast<int>(j));
                        if (v != 0)
                            full.set(rows_y[i], rows_x[j], v);
                    }
            }
            s.cover[{y, x}] = std::move(full);
        }

    // products: restrict both factors to the join and multiply
    for (int x = 0; x < p.size(); ++x)
        for (int y = 0; y < p.size(); ++y)
            for (int t : p.min_upper_bounds({x, y})) {
                if (p.rank(t) != p.rank(x) + p.rank(y))
                    continue;
                const Kunneth& Kx = kun.at(static_cast<int>(blocks[x].size()));
                const Kunneth& Ky = kun.at(static_cast<int>(blocks[y].size()));
                const Kunneth& Kt = kun.at(static_cast<int>(blocks[t].size()));
                const RatMatrix rx = merge_restriction(Kx, Kt, hM, target_map(x, t));
                const RatMatrix ry = merge_restriction(Ky, Kt, hM, target_map(y, t));
                ProductTensor tensor;
                for (int i = 0; i < Kx.dim(); ++i) {
                    // sparse column of rx
                    std::vector<std::pair<int, Rat>> xi;
                    for (int r = 0; r < Kt.dim(); ++r)
                        if (rx.at(r, i) != 0)
                            xi.push_back({r, rx.at(r, i)});
                    if (xi.empty())
                        continue;
                    for (int j = 0; j < Ky.dim(); ++j) {
                        std::map<int, Rat> acc;
                        for (const auto& [ri, ci] : xi)
                            for (int r2 = 0; r2 < Kt.dim(); ++r2) {
                                const Rat& cj = ry.at(r2, j);
                                if (cj == 0)
                                    continue;
                                for (const auto& [kk, w] : Kt.mul_basis(ri, r2))
                                    acc[kk] += ci * cj * w;
                            }
                        std::vector<std::pair<int, Rat>> terms;
                        for (const auto& [kk, c] : acc)
                            if (c != 0)
                                terms.push_back({kk, c});
                        if (!terms.empty())
                            tensor[{i, j}] = std::move(terms);
                    }
                }
                s.product[{x, y, t}] = std::move(tensor);
            }
    s.validate();
    return s;
}

SupportModule varieties_support(const GradedPoset& p, const std::vector<VarietyStratum>& strata,
                                const std::map<std::pair<int, int>, RatMatrix>& restrictions)
{
    if (static_cast<int>(strata.size()) != p.size())
        throw SchemaError("varieties_support: stratum count mismatch");
    for (const auto& st : strata)
        st.ring.validate();
    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x])
            if (!restrictions.count({y, x}))
                throw SchemaError("missing restriction for cover " + p.ids[y] + "<:" + p.ids[x]);

    // composed restrictions for all y <= x (checked consistent)
    std::map<std::pair<int, int>, RatMatrix> restr;
    for (int x = 0; x < p.size(); ++x)
        restr[{x, x}] = RatMatrix::identity(strata[x].ring.dim());
    std::vector<int> order(p.size());
    for (int i = 0; i < p.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&p](int a, int b) { return p.rank(a) < p.rank(b); });
    for (int x : order)
        for (int y = 0; y < p.size(); ++y) {
            if (y == x || !p.leq(y, x))
                continue;
            // build via any lower cover of x above y
            for (int z : p.covers_down[x]) {
                if (!p.leq(y, z))
                    continue;
                const RatMatrix cand = restrictions.at({z, x}) * restr.at({y, z});
                auto it = restr.find({y, x});
                if (it == restr.end())
                    restr[{y, x}] = cand;
                else if (!(it->second == cand))
                    throw InvariantViolation("restrictions do not commute between " + p.ids[y] +
                                             " and " + p.ids[x]);
            }
        }

    SupportModule s;
    s.poset = p;
    s.space.resize(p.size());
    s.weight_offset.assign(p.size(), 0);
    for (int x = 0; x < p.size(); ++x) {
        const GradedRing& r = strata[x].ring;
        const int shift = 2 * strata[x].codim;
        for (int i = 0; i < r.dim(); ++i) {
            s.space[x].deg.push_back(r.deg[i] + shift);
            s.space[x].label.push_back(r.label[i]);
        }
        s.weight_offset[x] = shift;
    }

    auto ring_pairing = [](const GradedRing& r, int d) {
        const auto rows = r.basis_of_degree(d);
        const auto cols = r.basis_of_degree(r.top_degree - d);
        RatMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) {
                RatVec a(r.dim(), Rat(0)), b(r.dim(), Rat(0));
                a[rows[i]] = 1;
                b[cols[j]] = 1;
                m.set(static_cast<int>(i), static_cast<int>(j), r.pair(a, b));
            }
        return m;
    };

    for (int x = 0; x < p.size(); ++x)
        for (int y : p.covers_down[x]) {
            const GradedRing& rx = strata[x].ring;
            const GradedRing& ry = strata[y].ring;
            const int m2 = 2 * (strata[x].codim - strata[y].codim);
            const RatMatrix& rho = restrictions.at({y, x});
            RatMatrix full(s.space[y].dim(), s.space[x].dim());
            for (int sdeg = 0; sdeg <= rx.top_degree; ++sdeg) {
                const auto rows_x = rx.basis_of_degree(sdeg);
                if (rows_x.empty())
                    continue;
                const auto rows_y = ry.basis_of_degree(sdeg + m2);
                const auto cols_x = rx.basis_of_degree(rx.top_degree - sdeg);
                const auto cols_y = ry.basis_of_degree(ry.top_degree - sdeg - m2);
                RatMatrix mblock(static_cast<int>(cols_x.size()),
                                 static_cast<int>(cols_y.size()));
                for (std::size_t i = 0; i < cols_x.size(); ++i)
                    for (std::size_t j = 0; j < cols_y.size(); ++j)
                        mblock.set(static_cast<int>(i), static_cast<int>(j),
                                   rho.at(cols_x[i], cols_y[j]));
                const RatMatrix psrc = ring_pairing(rx, sdeg);
                const RatMatrix pdst = ring_pairing(ry, sdeg + m2);
                const RatMatrix gblock =
                    pairing_adjoint(mblock, psrc.transpose(), pdst.transpose());
                for (std::size_t i = 0; i < rows_y.size(); ++i)
                    for (std::size_t j = 0; j < rows_x.size(); ++j) {
                        const Rat& v = gblock.at(static_cast<int>(i), static_cast<int>(j));
                        if (v != 0)
                            full.set(rows_y[i], rows_x[j], v);
                    }
            }
            s.cover[{y, x}] = std::move(full);
        }

    for (int x = 0; x < p.size(); ++x)
        for (int y = 0; y < p.size(); ++y)
            for (int t : p.min_upper_bounds({x, y})) {
                if (p.rank(t) != p.rank(x) + p.rank(y))
                    continue;
                const int excess = strata[x].codim + strata[y].codim - strata[t].codim;
                ProductTensor tensor;
                if (excess == 0) {
                    const GradedRing& rt = strata[t].ring;
                    const RatMatrix& rho_x = restr.at({x, t});
                    const RatMatrix& rho_y = restr.at({y, t});
                    for (int i = 0; i < strata[x].ring.dim(); ++i)
                        for (int j = 0; j < strata[y].ring.dim(); ++j) {
                            RatVec a(rt.dim(), Rat(0)), b(rt.dim(), Rat(0));
                            for (int r = 0; r < rt.dim(); ++r) {
                                a[r] = rho_x.at(r, i);
                                b[r] = rho_y.at(r, j);
                            }
                            const RatVec prod = rt.mul(a, b);
                            std::vector<std::pair<int, Rat>> terms;
                            for (int r = 0; r < rt.dim(); ++r)
                                if (prod[r] != 0)
                                    terms.push_back({r, prod[r]});
                            if (!terms.empty())
                                tensor[{i, j}] = std::move(terms);
                        }
                } else if (excess > 0) {
                    // excess intersection: supported only when every target
                    // degree that could receive a product vanishes
                    for (int i = 0; i < s.space[x].dim(); ++i)
                        for (int j = 0; j < s.space[y].dim(); ++j) {
                            const int q = s.space[x].deg[i] + s.space[y].deg[j];
                            for (int kk = 0; kk < s.space[t].dim(); ++kk)
                                if (s.space[t].deg[kk] == q)
                                    throw InvariantViolation(
                                        "excess intersection with nonzero target needs explicit "
                                        "product data (element " +
                                        p.ids[t] + ")");
                        }
                } else {
                    throw InvariantViolation("codimension drops below additivity");
                }
                s.product[{x, y, t}] = std::move(tensor);
            }
    s.validate();
    return s;
}

SupportModule custom_support(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("bad support JSON: ") + e.what());
    }
    if (!j.contains("poset") || !j.contains("spaces"))
        throw SchemaError("support JSON needs 'poset' and 'spaces'");
    SupportModule s;
    s.poset = poset_from_json(j["poset"].dump());
    const GradedPoset& p = s.poset;
    s.space.resize(p.size());
    s.weight_offset.assign(p.size(), 0);
    for (int x = 0; x < p.size(); ++x) {
        const std::string& id = p.ids[x];
        if (!j["spaces"].contains(id))
            throw SchemaError("missing space for element '" + id + "'");
        const auto& sp = j["spaces"][id];
        std::map<int, int> dims;
        for (auto it = sp.begin(); it != sp.end(); ++it)
            dims[std::stoi(it.key())] = it.value().get<int>();
        for (const auto& [q, d] : dims)
            for (int i = 0; i < d; ++i) {
                s.space[x].deg.push_back(q);
                s.space[x].label.push_back("q" + std::to_string(q) + "_" + std::to_string(i));
            }
    }
    if (j.contains("weight_offset"))
        for (int x = 0; x < p.size(); ++x)
            if (j["weight_offset"].contains(p.ids[x]))
                s.weight_offset[x] = j["weight_offset"][p.ids[x]].get<int>();

    auto parse_matrix = [](const nlohmann::json& mj, int rows, int cols) {
        if (static_cast<int>(mj.size()) != rows)
            throw SchemaError("matrix row count mismatch");
        RatMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i) {
            if (static_cast<int>(mj[i].size()) != cols)
                throw SchemaError("matrix col count mismatch");
            for (int c = 0; c < cols; ++c) {
                const Rat v = rat_parse(mj[i][c].get<std::string>());
                if (v != 0)
                    m.set(i, c, v);
            }
        }
        return m;
    };

    if (j.contains("cover_maps"))
        for (auto it = j["cover_maps"].begin(); it != j["cover_maps"].end(); ++it) {
            const std::string key = it.key();
            const auto sep = key.find("<:");
            if (sep == std::string::npos)
                throw SchemaError("cover key must be 'y<:x'");
            const int y = p.idx(key.substr(0, sep));
            const int x = p.idx(key.substr(sep + 2));
            // per-degree blocks
            RatMatrix full(s.space[y].dim(), s.space[x].dim());
            for (auto bit = it.value().begin(); bit != it.value().end(); ++bit) {
                const int q = std::stoi(bit.key());
                std::vector<int> rows_y, cols_x;
                for (int i = 0; i < s.space[y].dim(); ++i)
                    if (s.space[y].deg[i] == q)
                        rows_y.push_back(i);
                for (int i = 0; i < s.space[x].dim(); ++i)
                    if (s.space[x].deg[i] == q)
                        cols_x.push_back(i);
                const RatMatrix block = parse_matrix(bit.value(), static_cast<int>(rows_y.size()),
                                                     static_cast<int>(cols_x.size()));
                for (const auto& [ij, v] : block.entries)
                    full.set(rows_y[ij.first], cols_x[ij.second], v);
            }
            s.cover[{y, x}] = std::move(full);
        }

    if (j.contains("products"))
        for (auto it = j["products"].begin(); it != j["products"].end(); ++it) {
            const std::string key = it.key();
            const auto s1 = key.find('|');
            const auto s2 = key.find('|', s1 + 1);
            if (s1 == std::string::npos || s2 == std::string::npos)
                throw SchemaError("product key must be 'x|y|t'");
            const int x = p.idx(key.substr(0, s1));
            const int y = p.idx(key.substr(s1 + 1, s2 - s1 - 1));
            const int t = p.idx(key.substr(s2 + 1));
            ProductTensor tensor;
            for (const auto& e : it.value()) {
                std::vector<std::pair<int, Rat>> terms;
                for (const auto& tm : e.at("terms"))
                    terms.push_back({tm[0].get<int>(), rat_parse(tm[1].get<std::string>())});
                tensor[{e.at("i").get<int>(), e.at("j").get<int>()}] = std::move(terms);
            }
            s.product[{x, y, t}] = std::move(tensor);
        }
    s.validate();
    return s;
}

std::string support_to_json(const SupportModule& s)
{
    const GradedPoset& p = s.poset;
    nlohmann::json j;
    j["poset"] = nlohmann::json::parse(poset_to_json(p));
    for (int x = 0; x < p.size(); ++x) {
        std::map<int, int> dims;
        for (int d : s.space[x].deg)
            dims[d]++;
        nlohmann::json sp = nlohmann::json::object();
        for (const auto& [q, d] : dims)
            sp[std::to_string(q)] = d;
        j["spaces"][p.ids[x]] = sp;
        j["weight_offset"][p.ids[x]] = s.weight_offset[x];
    }
    for (const auto& [key, m] : s.cover) {
        const auto [y, x] = key;
        std::map<int, std::pair<std::vector<int>, std::vector<int>>> blocks;
        for (int i = 0; i < s.space[y].dim(); ++i)
            blocks[s.space[y].deg[i]].first.push_back(i);
        for (int i = 0; i < s.space[x].dim(); ++i)
            blocks[s.space[x].deg[i]].second.push_back(i);
        nlohmann::json per_q = nlohmann::json::object();
        for (const auto& [q, rc] : blocks) {
            const auto& [rows, cols] = rc;
            if (rows.empty() || cols.empty())
                continue;
            nlohmann::json mj = nlohmann::json::array();
            for (int i : rows) {
                nlohmann::json row = nlohmann::json::array();
                for (int c : cols)
                    row.push_back(rat_str(m.at(i, c)));
                mj.push_back(row);
            }
            per_q[std::to_string(q)] = mj;
        }
        j["cover_maps"][p.ids[y] + "<:" + p.ids[x]] = per_q;
    }
    for (const auto& [key, tensor] : s.product) {
        nlohmann::json tj = nlohmann::json::array();
        for (const auto& [ij, terms] : tensor) {
            nlohmann::json termj = nlohmann::json::array();
            for (const auto& [k, c] : terms)
                termj.push_back({k, rat_str(c)});
            tj.push_back({{"i", ij.first}, {"j", ij.second}, {"terms", termj}});
        }
        j["products"][p.ids[key[0]] + "|" + p.ids[key[1]] + "|" + p.ids[key[2]]] = tj;
    }
    return j.dump(2);
}

SupportAction diagonal_action(const GradedRing& hM, const Graph& g,
                              const std::vector<int>& vertex_perm, const SupportModule& supp)
{
    const GradedPoset& p = supp.poset;
    const int n = g.vertices;
    if (static_cast<int>(vertex_perm.size()) != n + 1)
        throw SchemaError("vertex_perm must map 1..n (index 0 unused)");
    // must be a graph automorphism
    for (auto [a, b] : g.edges)
        if (!g.has_edge(vertex_perm[a], vertex_perm[b]))
            throw NotAutomorphism("vertex permutation is not a graph automorphism");

    SupportAction act;
    act.element_perm.assign(p.size(), -1);
    std::vector<std::vector<std::vector<int>>> blocks(p.size());
    for (int x = 0; x < p.size(); ++x)
        blocks[x] = parse_partition_id(p.ids[x]);
    auto partition_id_of = [](std::vector<std::vector<int>> bl) {
        for (auto& b : bl)
            std::sort(b.begin(), b.end());
        std::sort(bl.begin(), bl.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        std::string s;
        for (std::size_t i = 0; i < bl.size(); ++i) {
            if (i)
                s += "|";
            s += "{";
            for (std::size_t jj = 0; jj < bl[i].size(); ++jj) {
                if (jj)
                    s += ",";
                s += std::to_string(bl[i][jj]);
            }
            s += "}";
        }
        return s;
    };
    for (int x = 0; x < p.size(); ++x) {
        auto bl = blocks[x];
        for (auto& b : bl)
            for (auto& v : b)
                v = vertex_perm[v];
        act.element_perm[x] = p.idx(partition_id_of(bl));
    }
    act.atom_perm.assign(p.atoms.size(), -1);
    for (std::size_t i = 0; i < p.atoms.size(); ++i)
        act.atom_perm[i] = p.atom_pos(act.element_perm[p.atoms[i]]);

    // space maps: permute Kunneth factors according to the block relabelling
    act.space_maps.assign(p.size(), RatMatrix());
    for (int x = 0; x < p.size(); ++x) {
        const int sx = act.element_perm[x];
        const int k = static_cast<int>(blocks[x].size());
        // where does source block i land among target's blocks
        std::vector<int> dest(k, -1);
        for (int i = 0; i < k; ++i) {
            const int v = vertex_perm[blocks[x][i][0]];
            for (std::size_t jj = 0; jj < blocks[sx].size(); ++jj)
                if (std::find(blocks[sx][jj].begin(), blocks[sx][jj].end(), v) !=
                    blocks[sx][jj].end())
                    dest[i] = static_cast<int>(jj);
        }
        const Kunneth K = Kunneth::make(hM, k);
        RatMatrix m(supp.space[sx].dim(), supp.space[x].dim());
        for (int col = 0; col < K.dim(); ++col) {
            const auto& tuple = K.basis[col];
            std::vector<int> image(k, -1);
            long long sign_exp = 0;
            for (int i = 0; i < k; ++i)
                for (int jj = i + 1; jj < k; ++jj)
                    if (dest[i] > dest[jj])
                        sign_exp +=
                            static_cast<long long>(hM.deg[tuple[i]]) * hM.deg[tuple[jj]];
            for (int i = 0; i < k; ++i)
                image[dest[i]] = tuple[i];
            const int row = K.pos.at(image);
            m.set(row, col, (sign_exp % 2 == 0) ? 1 : -1);
        }
        act.space_maps[x] = std::move(m);
    }
    return act;
}

SupportAction projective_action(const SupportModule& supp, const std::vector<int>& atom_perm,
                                const std::vector<int>& element_perm)
{
    SupportAction act;
    act.atom_perm = atom_perm;
    act.element_perm = element_perm;
    act.space_maps.assign(supp.poset.size(), RatMatrix());
    for (int x = 0; x < supp.poset.size(); ++x) {
        const int sx = element_perm[x];
        if (supp.space[x].deg != supp.space[sx].deg)
            throw NotAutomorphism("permutation does not preserve support spaces");
        act.space_maps[x] = RatMatrix::identity(supp.space[x].dim());
    }
    return act;
}

} // namespace arrkit
