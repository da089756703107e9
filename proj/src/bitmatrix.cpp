#include "eprldpc/bitmatrix.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace eprldpc {

BitMatrix::BitMatrix(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols), rows_(n_rows) {
    if (n_rows < 0 || n_cols < 0) throw std::invalid_argument("BitMatrix: negative dimension");
}

BitMatrix BitMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows.begin()->size()) : 0;
    BitMatrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw std::invalid_argument("from_rows: ragged rows");
        int j = 0;
        for (int v : row) {
            if (v) m.set(i, j);
            ++j;
        }
        ++i;
    }
    return m;
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i);
    return m;
}

void BitMatrix::set(int r, int c) {
    auto& row = rows_.at(r);
    if (c < 0 || c >= n_cols_) throw std::out_of_range("BitMatrix::set");
    auto it = std::lower_bound(row.begin(), row.end(), c);
    if (it == row.end() || *it != c) row.insert(it, c);
}

void BitMatrix::flip(int r, int c) {
    auto& row = rows_.at(r);
    if (c < 0 || c >= n_cols_) throw std::out_of_range("BitMatrix::flip");
    auto it = std::lower_bound(row.begin(), row.end(), c);
    if (it != row.end() && *it == c)
        row.erase(it);
    else
        row.insert(it, c);
}

bool BitMatrix::get(int r, int c) const {
    const auto& row = rows_.at(r);
    return std::binary_search(row.begin(), row.end(), c);
}

void BitMatrix::set_row(int r, std::vector<int> cols) {
    for (size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] < 0 || cols[k] >= n_cols_) throw std::out_of_range("BitMatrix::set_row");
        if (k && cols[k] <= cols[k - 1]) throw std::invalid_argument("set_row: indices not strictly increasing");
    }
    rows_.at(r) = std::move(cols);
}

void BitMatrix::add_row(int r, const std::vector<int>& cols) {
    const auto& a = rows_.at(r);
    std::vector<int> out;
    out.reserve(a.size() + cols.size());
    std::set_symmetric_difference(a.begin(), a.end(), cols.begin(), cols.end(), std::back_inserter(out));
    rows_[r] = std::move(out);
}

long long BitMatrix::nnz() const {
    long long n = 0;
    for (const auto& r : rows_) n += static_cast<long long>(r.size());
    return n;
}

std::vector<int> BitMatrix::row_weights() const {
    std::vector<int> w(n_rows_);
    for (int i = 0; i < n_rows_; ++i) w[i] = static_cast<int>(rows_[i].size());
    return w;
}

std::vector<int> BitMatrix::col_weights() const {
    std::vector<int> w(n_cols_, 0);
    for (const auto& r : rows_)
        for (int c : r) ++w[c];
    return w;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(n_cols_, n_rows_);
    for (int i = 0; i < n_rows_; ++i)
        for (int c : rows_[i]) t.rows_[c].push_back(i);
    return t;  // column order of pushes is already ascending in i
}

std::vector<int> BitMatrix::column(int c) const {
    std::vector<int> out;
    for (int i = 0; i < n_rows_; ++i)
        if (get(i, c)) out.push_back(i);
    return out;
}

bool BitMatrix::operator==(const BitMatrix& other) const {
    return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && rows_ == other.rows_;
}

std::vector<uint8_t> BitMatrix::mul_vec(std::span<const uint8_t> x) const {
    if (static_cast<int>(x.size()) != n_cols_) throw std::invalid_argument("mul_vec: length mismatch");
    std::vector<uint8_t> y(n_rows_, 0);
    for (int i = 0; i < n_rows_; ++i) {
        uint8_t acc = 0;
        for (int c : rows_[i]) acc ^= x[c];
        y[i] = acc;
    }
    return y;
}

std::string BitMatrix::to_string() const {
    std::string s;
    s.reserve(static_cast<size_t>(n_rows_) * (n_cols_ + 1));
    for (int i = 0; i < n_rows_; ++i) {
        size_t k = 0;
        for (int c = 0; c < n_cols_; ++c) {
            bool on = k < rows_[i].size() && rows_[i][k] == c;
            if (on) ++k;
            s += on ? '1' : '0';
        }
        s += '\n';
    }
    return s;
}

namespace {

std::vector<std::vector<uint64_t>> pack_rows(const BitMatrix& m) {
    const int words = (m.n_cols() + 63) / 64;
    std::vector<std::vector<uint64_t>> packed(m.n_rows(), std::vector<uint64_t>(words, 0));
    for (int i = 0; i < m.n_rows(); ++i)
        for (int c : m.row(i)) packed[i][c >> 6] |= uint64_t(1) << (c & 63);
    return packed;
}

} // namespace

int rank_f2(const BitMatrix& m) {
    auto rows = pack_rows(m);
    const int words = (m.n_cols() + 63) / 64;
    int rank = 0;
    for (int c = 0; c < m.n_cols() && rank < m.n_rows(); ++c) {
        const int w = c >> 6;
        const uint64_t bit = uint64_t(1) << (c & 63);
        int pivot = -1;
        for (int i = rank; i < m.n_rows(); ++i)
            if (rows[i][w] & bit) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int i = 0; i < m.n_rows(); ++i) {
            if (i != rank && (rows[i][w] & bit))
                for (int k = 0; k < words; ++k) rows[i][k] ^= rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

int rank_int(const BitMatrix& m) {
    // Fraction-free (Bareiss) elimination on small matrices.
    const int r = m.n_rows(), c = m.n_cols();
    std::vector<std::vector<long long>> a(r, std::vector<long long>(c, 0));
    for (int i = 0; i < r; ++i)
        for (int j : m.row(i)) a[i][j] = 1;
    int rank = 0;
    long long prev = 1;
    for (int col = 0; col < c && rank < r; ++col) {
        int pivot = -1;
        for (int i = rank; i < r; ++i)
            if (a[i][col] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        for (int i = rank + 1; i < r; ++i) {
            for (int j = col + 1; j < c; ++j)
                a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

BitMatrix gf2_mul(const BitMatrix& a, const BitMatrix& b) {
    if (a.n_cols() != b.n_rows()) throw std::invalid_argument("gf2_mul: inner dimension mismatch");
    const int words = (b.n_cols() + 63) / 64;
    auto brows = pack_rows(b);
    BitMatrix out(a.n_rows(), b.n_cols());
    std::vector<uint64_t> acc(words);
    for (int i = 0; i < a.n_rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (int k : a.row(i))
            for (int w = 0; w < words; ++w) acc[w] ^= brows[k][w];
        std::vector<int> cols;
        for (int w = 0; w < words; ++w) {
            uint64_t bits = acc[w];
            while (bits) {
                int b0 = __builtin_ctzll(bits);
                cols.push_back(w * 64 + b0);
                bits &= bits - 1;
            }
        }
        out.set_row(i, std::move(cols));
    }
    return out;
}

BitMatrix kron(const BitMatrix& a, const BitMatrix& b) {
    BitMatrix out(a.n_rows() * b.n_rows(), a.n_cols() * b.n_cols());
    for (int i = 0; i < a.n_rows(); ++i) {
        for (int bi = 0; bi < b.n_rows(); ++bi) {
            std::vector<int> cols;
            for (int j : a.row(i))
                for (int bj : b.row(bi)) cols.push_back(j * b.n_cols() + bj);
            std::sort(cols.begin(), cols.end());
            out.set_row(i * b.n_rows() + bi, std::move(cols));
        }
    }
    return out;
}

BitMatrix block_diag(std::span<const BitMatrix> blocks) {
    int rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.n_rows();
        cols += b.n_cols();
    }
    BitMatrix out(rows, cols);
    int r0 = 0, c0 = 0;
    for (const auto& b : blocks) {
        for (int i = 0; i < b.n_rows(); ++i) {
            std::vector<int> shifted;
            shifted.reserve(b.row(i).size());
            for (int c : b.row(i)) shifted.push_back(c0 + c);
            out.set_row(r0 + i, std::move(shifted));
        }
        r0 += b.n_rows();
        c0 += b.n_cols();
    }
    return out;
}

int wt_columns(const BitMatrix& m) {
    auto w = m.col_weights();
    return static_cast<int>(std::count_if(w.begin(), w.end(), [](int x) { return x > 0; }));
}

int wt_vector(std::span<const uint8_t> v) {
    int n = 0;
    for (uint8_t x : v) n += (x != 0);
    return n;
}

bool precedes(const BitMatrix& a, const BitMatrix& b, bool strict) {
    if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols())
        throw std::invalid_argument("precedes: dimension mismatch");
    auto at = a.transposed();
    auto bt = b.transposed();
    for (int c = 0; c < at.n_rows(); ++c) {
        if (!at.row(c).empty() && at.row(c) != bt.row(c)) return false;
    }
    if (strict && wt_columns(a) >= wt_columns(b)) return false;
    return true;
}

MotherExtraction extract_mother(const BitMatrix& m, int p) {
    if (p <= 0 || m.n_rows() % p != 0 || m.n_cols() % p != 0)
        throw std::invalid_argument("extract_mother: p must divide both dimensions");
    const int br = m.n_rows() / p, bc = m.n_cols() / p;
    MotherExtraction out{BitMatrix(br, bc), true};
    std::vector<std::vector<BitMatrix>> blocks(br, std::vector<BitMatrix>(bc));
    for (int i = 0; i < m.n_rows(); ++i) {
        for (int c : m.row(i)) {
            auto& blk = blocks[i / p][c / p];
            if (blk.n_rows() == 0) blk = BitMatrix(p, p);
            blk.set(i % p, c % p);
        }
    }
    for (int bi = 0; bi < br; ++bi) {
        for (int bj = 0; bj < bc; ++bj) {
            if (blocks[bi][bj].n_rows() == 0) continue;
            out.mother.set(bi, bj);
            if (rank_f2(blocks[bi][bj]) != p) out.p_reducible = false;
        }
    }
    return out;
}

BitMatrix expand_mother(const BitMatrix& mother, const std::vector<std::vector<BitMatrix>>& blocks) {
    if (mother.n_rows() == 0) return BitMatrix();
    int p = 0;
    for (int i = 0; i < mother.n_rows() && !p; ++i)
        if (!mother.row(i).empty()) p = blocks[i][mother.row(i)[0]].n_rows();
    if (!p) throw std::invalid_argument("expand_mother: all-zero occupancy");
    BitMatrix out(mother.n_rows() * p, mother.n_cols() * p);
    for (int bi = 0; bi < mother.n_rows(); ++bi) {
        for (int bj : mother.row(bi)) {
            const auto& blk = blocks[bi][bj];
            if (blk.n_rows() != p || blk.n_cols() != p) throw std::invalid_argument("expand_mother: block size");
            for (int i = 0; i < p; ++i)
                for (int c : blk.row(i)) out.set(bi * p + i, bj * p + c);
        }
    }
    return out;
}

} // namespace eprldpc
