#include "arrkit/ratmatrix.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace arrkit {

static const Rat kZero = 0;

RatMatrix RatMatrix::identity(int n)
{
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m.entries[{i, i}] = 1;
    return m;
}

const Rat& RatMatrix::at(int i, int j) const
{
    if (i < 0 || i >= rows || j < 0 || j >= cols)
        throw InvariantViolation("matrix index out of bounds");
    auto it = entries.find({i, j});
    return it == entries.end() ? kZero : it->second;
}

void RatMatrix::set(int i, int j, const Rat& v)
{
    if (i < 0 || i >= rows || j < 0 || j >= cols)
        throw InvariantViolation("matrix index out of bounds");
    if (v == 0)
        entries.erase({i, j});
    else
        entries[{i, j}] = v;
}

RatMatrix RatMatrix::transpose() const
{
    RatMatrix t(cols, rows);
    for (const auto& [ij, v] : entries)
        t.entries[{ij.second, ij.first}] = v;
    return t;
}

RatVec RatMatrix::apply(const RatVec& v) const
{
    if (static_cast<int>(v.size()) != cols)
        throw InvariantViolation("matrix/vector size mismatch");
    RatVec out(rows, Rat(0));
    for (const auto& [ij, c] : entries)
        out[ij.first] += c * v[ij.second];
    return out;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b)
{
    if (a.cols != b.rows)
        throw InvariantViolation("matrix product size mismatch");
    RatMatrix out(a.rows, b.cols);
    // group b by row for the sparse product
    std::map<int, std::vector<std::pair<int, Rat>>> brow;
    for (const auto& [ij, v] : b.entries)
        brow[ij.first].emplace_back(ij.second, v);
    for (const auto& [ij, v] : a.entries) {
        auto it = brow.find(ij.second);
        if (it == brow.end())
            continue;
        for (const auto& [k, w] : it->second) {
            Rat& cell = out.entries[{ij.first, k}];
            cell += v * w;
        }
    }
    for (auto it = out.entries.begin(); it != out.entries.end();)
        it = (it->second == 0) ? out.entries.erase(it) : std::next(it);
    return out;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b)
{
    if (a.rows != b.rows || a.cols != b.cols)
        throw InvariantViolation("matrix sum size mismatch");
    RatMatrix out = a;
    for (const auto& [ij, v] : b.entries) {
        Rat s = out.at(ij.first, ij.second) + v;
        out.set(ij.first, ij.second, s);
    }
    return out;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b)
{
    if (a.rows != b.rows || a.cols != b.cols)
        throw InvariantViolation("matrix diff size mismatch");
    RatMatrix out = a;
    for (const auto& [ij, v] : b.entries) {
        Rat s = out.at(ij.first, ij.second) - v;
        out.set(ij.first, ij.second, s);
    }
    return out;
}

bool RatMatrix::operator==(const RatMatrix& o) const
{
    return rows == o.rows && cols == o.cols && entries == o.entries;
}

std::vector<RatVec> RatMatrix::dense() const
{
    std::vector<RatVec> d(rows, RatVec(cols, Rat(0)));
    for (const auto& [ij, v] : entries)
        d[ij.first][ij.second] = v;
    return d;
}

RatMatrix RatMatrix::from_dense(const std::vector<RatVec>& d)
{
    RatMatrix m(static_cast<int>(d.size()), d.empty() ? 0 : static_cast<int>(d[0].size()));
    for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(d[i].size()) != m.cols)
            throw InvariantViolation("ragged dense matrix");
        for (int j = 0; j < m.cols; ++j)
            if (d[i][j] != 0)
                m.entries[{i, j}] = d[i][j];
    }
    return m;
}

RatMatrix RatMatrix::from_columns(int rows, const std::vector<RatVec>& cols)
{
    RatMatrix m(rows, static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols; ++j) {
        if (static_cast<int>(cols[j].size()) != rows)
            throw InvariantViolation("column size mismatch");
        for (int i = 0; i < rows; ++i)
            if (cols[j][i] != 0)
                m.entries[{i, j}] = cols[j][i];
    }
    return m;
}

bool is_zero_vec(const RatVec& v)
{
    for (const auto& x : v)
        if (x != 0)
            return false;
    return true;
}

RatVec scaled(const RatVec& v, const Rat& c)
{
    RatVec out = v;
    for (auto& x : out)
        x *= c;
    return out;
}

void add_scaled(RatVec& v, const Rat& c, const RatVec& w)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] += c * w[i];
}

// Bareiss fraction-free elimination on the denominator-cleared integer image
// of m. Pivot = first nonzero entry in row-major order.
int rank(const RatMatrix& m)
{
    if (m.rows == 0 || m.cols == 0)
        return 0;
    std::vector<std::vector<Int>> a(m.rows, std::vector<Int>(m.cols, 0));
    for (int i = 0; i < m.rows; ++i) {
        Int lcm = 1;
        for (int j = 0; j < m.cols; ++j) {
            const Rat& v = m.at(i, j);
            if (v != 0)
                lcm = boost::multiprecision::lcm(lcm, denominator(v));
        }
        for (int j = 0; j < m.cols; ++j) {
            const Rat& v = m.at(i, j);
            if (v != 0)
                a[i][j] = numerator(v) * (lcm / denominator(v));
        }
    }
    int r = 0;
    Int prev = 1;
    for (int col = 0; col < m.cols && r < m.rows; ++col) {
        int piv = -1;
        for (int i = r; i < m.rows; ++i)
            if (a[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(a[r], a[piv]);
        for (int i = r + 1; i < m.rows; ++i) {
            for (int j = col + 1; j < m.cols; ++j)
                a[i][j] = (a[r][col] * a[i][j] - a[i][col] * a[r][j]) / prev;
            a[i][col] = 0;
        }
        prev = a[r][col];
        ++r;
    }
    return r;
}

std::vector<int> rref_inplace(std::vector<RatVec>& a)
{
    std::vector<int> pivots;
    if (a.empty())
        return pivots;
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(a[0].size());
    int r = 0;
    for (int col = 0; col < cols && r < rows; ++col) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(a[r], a[piv]);
        const Rat inv = Rat(1) / a[r][col];
        for (int j = col; j < cols; ++j)
            a[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][col] == 0)
                continue;
            const Rat f = a[i][col];
            for (int j = col; j < cols; ++j)
                a[i][j] -= f * a[r][j];
        }
        pivots.push_back(col);
        ++r;
    }
    return pivots;
}

Subspace kernel_basis(const RatMatrix& m)
{
    Subspace out;
    out.ambient_dim = m.cols;
    if (m.cols == 0)
        return out;
    auto a = m.dense();
    if (a.empty())
        a.emplace_back(RatVec(m.cols, Rat(0)));
    const auto pivots = rref_inplace(a);
    std::vector<bool> is_pivot(m.cols, false);
    for (int p : pivots)
        is_pivot[p] = true;
    for (int col = 0; col < m.cols; ++col) {
        if (is_pivot[col])
            continue;
        RatVec v(m.cols, Rat(0));
        v[col] = 1;
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            v[pivots[pi]] = -a[pi][col];
        out.basis.push_back(std::move(v));
    }
    return out;
}

Subspace image_basis(const RatMatrix& m)
{
    Subspace out;
    out.ambient_dim = m.rows;
    auto a = m.dense();
    if (a.empty())
        return out;
    const auto pivots = rref_inplace(a);
    for (int p : pivots) {
        RatVec col(m.rows, Rat(0));
        for (int i = 0; i < m.rows; ++i)
            col[i] = m.at(i, p);
        out.basis.push_back(std::move(col));
    }
    return out;
}

std::optional<RatVec> coords_in_span(const std::vector<RatVec>& span, const RatVec& v)
{
    const int n = static_cast<int>(v.size());
    const int k = static_cast<int>(span.size());
    // solve [span columns | v]
    std::vector<RatVec> aug(n, RatVec(k + 1, Rat(0)));
    for (int j = 0; j < k; ++j) {
        if (static_cast<int>(span[j].size()) != n)
            throw InvariantViolation("span vector size mismatch");
        for (int i = 0; i < n; ++i)
            aug[i][j] = span[j][i];
    }
    for (int i = 0; i < n; ++i)
        aug[i][k] = v[i];
    const auto pivots = rref_inplace(aug);
    for (int p : pivots)
        if (p == k)
            return std::nullopt; // inconsistent
    RatVec coeff(k, Rat(0));
    for (std::size_t pi = 0; pi < pivots.size(); ++pi)
        coeff[pivots[pi]] = aug[pi][k];
    return coeff;
}

Subspace quotient_basis(const Subspace& sub, const Subspace& total)
{
    if (sub.ambient_dim != total.ambient_dim)
        throw ContainmentViolation("ambient dimension mismatch");
    for (const auto& v : sub.basis)
        if (!coords_in_span(total.basis, v))
            throw ContainmentViolation("sub vector not contained in total");

    Subspace out;
    out.ambient_dim = total.ambient_dim;
    std::vector<RatVec> acc;
    auto indep = [&acc](const RatVec& v) {
        std::vector<RatVec> trial = acc;
        trial.push_back(v);
        RatMatrix m = RatMatrix::from_columns(static_cast<int>(v.size()), trial);
        return rank(m) == static_cast<int>(trial.size());
    };
    for (const auto& v : sub.basis)
        acc.push_back(v);
    const std::size_t sub_dim = acc.size();
    for (const auto& v : total.basis) {
        if (indep(v)) {
            acc.push_back(v);
            out.basis.push_back(v);
        }
    }
    if (acc.size() - sub_dim != static_cast<std::size_t>(total.dim() - static_cast<int>(sub_dim)))
        throw ContainmentViolation("total basis is not independent");
    return out;
}

std::optional<RatMatrix> inverse(const RatMatrix& m)
{
    if (m.rows != m.cols)
        return std::nullopt;
    const int n = m.rows;
    std::vector<RatVec> aug(n, RatVec(2 * n, Rat(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            aug[i][j] = m.at(i, j);
        aug[i][n + i] = 1;
    }
    const auto pivots = rref_inplace(aug);
    if (static_cast<int>(pivots.size()) != n || (n > 0 && pivots.back() != n - 1))
        return std::nullopt;
    RatMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (aug[i][n + j] != 0)
                inv.entries[{i, j}] = aug[i][n + j];
    return inv;
}

RatMatrix pairing_adjoint(const RatMatrix& m, const RatMatrix& pairing_src,
                          const RatMatrix& pairing_dst)
{
    if (pairing_src.rows != pairing_src.cols || pairing_dst.rows != pairing_dst.cols)
        throw SingularPairing("pairing matrices must be square");
    auto dst_inv = inverse(pairing_dst);
    if (!dst_inv)
        throw SingularPairing("destination pairing is singular");
    if (!inverse(pairing_src))
        throw SingularPairing("source pairing is singular");
    return (*dst_inv) * m.transpose() * pairing_src;
}

} // namespace arrkit
