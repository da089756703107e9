#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "eprldpc/bitmatrix.hpp"
#include "eprldpc/field.hpp"

namespace eprldpc {

/// Parity-check matrix over GF(2^p), sparse by row.
struct NonBinaryMatrix {
    std::shared_ptr<const FieldContext> ctx;
    int n_chk = 0;
    int n_sym = 0;
    std::vector<std::vector<std::pair<int, uint16_t>>> rows;  // (symbol, value), sorted by symbol

    uint16_t at(int i, int j) const;
    void set(int i, int j, uint16_t v);
    std::vector<uint8_t> syndrome(std::span<const uint16_t> x) const;  // H x over F_q, nonzero flags per value
    std::vector<uint16_t> syndrome_values(std::span<const uint16_t> x) const;
};

/// Bit expansion of a symbol vector, LSB-first per symbol.
std::vector<uint8_t> to_bits(const FieldContext& ctx, std::span<const uint16_t> x);
std::vector<uint16_t> to_symbols(const FieldContext& ctx, std::span<const uint8_t> bits);

/// Equivalent binary parity-check matrix: each field coefficient replaced by
/// its companion-matrix label. Every nonzero block is full rank.
struct BinaryImage {
    int p = 0;
    BitMatrix matrix;       // Mp x Np
    BlockStructure blocks;  // p x p blocks
    // Sparse labels per block row: (block col, label); companions of source
    // entries when built from a NonBinaryMatrix.
    std::vector<std::vector<std::pair<int, MatrixLabel>>> labels;
    std::vector<std::vector<std::pair<int, uint16_t>>> source_entries;  // optional field elements

    MatrixLabel label_at(int i, int j) const;
    BitMatrix mother() const;  // 0/1 occupancy
};

BinaryImage binary_image(const NonBinaryMatrix& h);

/// Per-symbol extended generator: which of the q-1 simplex coordinates are
/// active. Active column j' of the generator equals bits(j').
struct GeneratorMatrix {
    int symbol = 0;
    std::vector<uint8_t> active;  // length q-1; active[c] for value c+1

    int weight() const { return wt_vector(active); }
    bool is_active_value(int value) const { return active[value - 1] != 0; }
    int rank(int p) const;  // rank of the active bit patterns
};

/// Generators for all symbols plus the row selections defining the extended
/// parity matrix. Kept rows are stored per check: a kept row participates in
/// every symbol block of its check, which is what keeps the row a valid
/// parity equation.
struct GeneratorSet {
    int q = 0;
    std::vector<GeneratorMatrix> gens;       // size N
    std::vector<std::vector<int>> kept_rows; // per check, sorted local rows in [0, q-2]

    static GeneratorSet full(const FieldContext& ctx, int n_chk, int n_sym);
    int n_sym() const { return static_cast<int>(gens.size()); }
    int n_chk() const { return static_cast<int>(kept_rows.size()); }
    long long m_s() const;
    /// Row selection for (check, symbol); identical across a check's support.
    const std::vector<int>& selector(int check, int /*symbol*/) const { return kept_rows[check]; }
};

/// Extended binary parity-check matrix: every nonzero label block replaced by
/// its (q-1) x (q-1) permutation image.
struct ExtendedMatrix {
    int q = 0;
    BitMatrix matrix;
    BlockStructure blocks;
    // perms[i][j]: local row r -> local col, empty when the block is zero.
    std::vector<std::vector<std::vector<int16_t>>> perms;
};

/// Extended parity matrix after cycle surgery: surviving permutation rows,
/// row-addition rows, and cycle-free replacement rows, with inactive columns
/// masked out.
struct EPRMatrix {
    enum class RowKind : uint8_t { omega, addition, replacement };
    struct RowTag {
        RowKind kind;
        int check = -1, row = -1;    // origin for omega/addition rows
        int check2 = -1, row2 = -1;  // added-in row for addition rows
        int block_id = -1;           // replacement block index
    };

    int q = 0;
    BitMatrix matrix;            // n_rows x (q-1)*N
    BlockStructure col_blocks;   // (q-1)-wide column blocks, one per symbol
    std::vector<uint8_t> active; // per extended column
    std::vector<RowTag> tags;    // per matrix row
    // Partial permutations of surviving omega rows (dead rows -1); used by
    // block-level cycle analysis.
    std::vector<std::vector<std::vector<int16_t>>> perms;

    int n_sym() const { return col_blocks.block_cols; }
    long long active_count() const { return wt_vector(active); }
};

/// Length-sum_j (q-1) expansion of a bit codeword; inactive positions zero.
struct ExtendedCodeword {
    int q = 0;
    std::vector<uint8_t> bits;  // (q-1) per symbol
    long long m_s = 0;

    int n_sym() const { return static_cast<int>(bits.size()) / (q - 1); }
    uint8_t at(int sym, int value) const { return bits[static_cast<size_t>(sym) * (q - 1) + value - 1]; }
};

/// The defining map: entry (i', j') set iff column j' of basis_sel equals
/// label^T * bits(i') and is nonzero. basis_sel must be a column-zeroed copy
/// of the extender basis. Zero label gives the zero matrix; a full-rank label
/// with the full basis gives a permutation matrix.
BitMatrix f_omega(const BitMatrix& basis_sel, const MatrixLabel& label);

/// Fast path: the permutation (q-1 entries, 0-based) of f_omega with the full
/// basis. label must be full rank.
std::vector<int16_t> f_omega_perm(const MatrixLabel& label, int q);

ExtendedMatrix build_omega(const BinaryImage& img);

ExtendedCodeword extend_codeword(std::span<const uint8_t> xbar, const GeneratorSet& gens, int p);
/// Full-basis case (all coordinates active).
ExtendedCodeword extend_codeword(const FieldContext& ctx, std::span<const uint8_t> xbar);

enum class ResolveStatus { ok, rank_deficient, inconsistent };

struct ResolveResult {
    ResolveStatus status;
    uint32_t x_bits = 0;  // LSB-first mask, valid when status == ok
};

/// Recover the p source bits of one symbol from its extended bits.
/// Checks consistency of every active equation; an inconsistent input signals
/// an undetected decoding failure upstream.
ResolveResult resolve_symbol(std::span<const uint8_t> vj, const GeneratorMatrix& gen, int p);

struct ProbabilityFraction {
    unsigned long long favorable = 0;
    unsigned long long total = 0;
    bool exact = true;

    double value() const { return total ? static_cast<double>(favorable) / static_cast<double>(total) : 0.0; }
};

/// Probability that a uniformly random w-subset of the nonzero p-bit vectors
/// has rank p (i.e. a random generator of weight w resolves its symbol).
/// Exact for w >= q/2 - 1 and whenever C(q-1, w) <= 10^6; Monte Carlo
/// otherwise.
ProbabilityFraction resolvability_probability(const FieldContext& ctx, int w,
                                              long long mc_trials = 100000, uint64_t seed = 1);

/// Assemble the extended parity matrix from kept rows. Every kept row must
/// touch only active generator columns; a selection with no kept rows at all
/// is rejected as degenerate.
EPRMatrix apply_f_e(const BinaryImage& img, const GeneratorSet& gens);

} // namespace eprldpc
