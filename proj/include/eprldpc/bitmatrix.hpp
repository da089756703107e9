#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace eprldpc {

/// Sparse binary matrix over GF(2). Rows hold sorted column indices.
/// Logically immutable once built; all operations below are pure.
class BitMatrix {
public:
    BitMatrix() : n_rows_(0), n_cols_(0) {}
    BitMatrix(int n_rows, int n_cols);

    /// Build from 0/1 row literals, e.g. {{1,1,0},{0,1,1}}.
    static BitMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);
    static BitMatrix identity(int n);

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }

    void set(int r, int c);       // idempotent insert
    void flip(int r, int c);      // toggle
    bool get(int r, int c) const;

    const std::vector<int>& row(int r) const { return rows_[r]; }
    void set_row(int r, std::vector<int> cols);  // takes sorted, deduped indices

    /// XOR another row's support into row r.
    void add_row(int r, const std::vector<int>& cols);

    long long nnz() const;
    std::vector<int> row_weights() const;
    std::vector<int> col_weights() const;
    BitMatrix transposed() const;
    std::vector<int> column(int c) const;

    bool operator==(const BitMatrix& other) const;
    bool operator!=(const BitMatrix& other) const { return !(*this == other); }

    /// y = M x over GF(2); x indexed by column.
    std::vector<uint8_t> mul_vec(std::span<const uint8_t> x) const;

    std::string to_string() const;

private:
    int n_rows_, n_cols_;
    std::vector<std::vector<int>> rows_;
};

/// Uniform block partition metadata for a host matrix.
struct BlockStructure {
    int block_rows = 0;
    int block_cols = 0;
    int row_size = 0;
    int col_size = 0;

    int host_rows() const { return block_rows * row_size; }
    int host_cols() const { return block_cols * col_size; }
};

/// GF(2) rank by bit-packed Gaussian elimination.
int rank_f2(const BitMatrix& m);

/// Rank over the integers (exact, fraction-free elimination). Used for the
/// permutation-sum label condition, where the GF(2) rank is degenerate.
int rank_int(const BitMatrix& m);

/// Standard GF(2) matrix product. Throws on dimension mismatch.
BitMatrix gf2_mul(const BitMatrix& a, const BitMatrix& b);

/// Kronecker product.
BitMatrix kron(const BitMatrix& a, const BitMatrix& b);

/// Block-diagonal composition; blocks need not be square.
BitMatrix block_diag(std::span<const BitMatrix> blocks);

/// Number of nonzero columns.
int wt_columns(const BitMatrix& m);

/// Number of nonzero entries of a vector.
int wt_vector(std::span<const uint8_t> v);

/// a <= b in the column-zeroing order: every nonzero column of a equals the
/// same-index column of b. strict additionally requires wt(a) < wt(b).
bool precedes(const BitMatrix& a, const BitMatrix& b, bool strict = false);

struct MotherExtraction {
    BitMatrix mother;      // 0/1 block occupancy
    bool p_reducible;      // every nonzero p x p block has full rank
};

/// Partition m into p x p blocks in place (no permutation search) and return
/// the occupancy matrix plus the reducibility verdict.
MotherExtraction extract_mother(const BitMatrix& m, int p);

/// Rebuild the host matrix from an occupancy pattern and per-position blocks
/// (indexed [i][j], ignored where mother is zero).
BitMatrix expand_mother(const BitMatrix& mother,
                        const std::vector<std::vector<BitMatrix>>& blocks);

} // namespace eprldpc
