#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "eprldpc/bitmatrix.hpp"
#include "eprldpc/field.hpp"
#include "eprldpc/representation.hpp"

namespace eprldpc {

/// Bipartite check/variable adjacency of a parity-check matrix.
struct TannerGraph {
    int n_chk = 0, n_var = 0;
    std::vector<std::vector<int>> chk_adj;  // per check, sorted variables
    std::vector<std::vector<int>> var_adj;  // per variable, sorted checks
    long long n_edges = 0;

    static TannerGraph from(const BitMatrix& m);
    std::vector<int> chk_degrees() const;
    std::vector<int> var_degrees() const;
};

struct GirthReport {
    int cap = 0;
    bool cycle_free = false;
    int girth = 0;  // 0 when cycle-free or when no cycle of length <= cap exists
    std::map<int, long long> counts;  // exact cycle counts per even length <= cap
    std::set<std::pair<int, int>> girth_edges;  // (check, var) edges on shortest cycles

    bool exceeds_cap() const { return !cycle_free && girth == 0; }
    std::string summary() const;
};

/// Exact short-cycle census by canonical path enumeration: each cycle is
/// counted once (anchored at its minimal node, direction-normalized).
GirthReport girth(const TannerGraph& g, int cap = 12);
GirthReport girth(const BitMatrix& m, int cap = 12);

/// Visit every cycle of length <= cap exactly once. The callback receives the
/// node sequence with checks in [0, n_chk) and variables offset by n_chk.
void for_each_cycle(const TannerGraph& g, int cap,
                    const std::function<void(const std::vector<int>&)>& sink);

/// Same, but abandon the enumeration once the DFS exceeds step_budget steps.
/// Returns false when truncated.
bool for_each_cycle_budgeted(const TannerGraph& g, int cap,
                             const std::function<void(const std::vector<int>&)>& sink,
                             long long step_budget);

/// One symbol-level cycle of the mother matrix together with its bit-level
/// content in the expanded matrix.
struct MatrixCycle {
    std::vector<std::pair<int, int>> positions;  // (check, symbol) blocks in cycle order
    bool bit_cycle_present = false;
    std::vector<int> crossing_rows;  // global extended rows on same-length bit cycles
};

/// Enumerate symbol-level cycles of length <= max_len and test each induced
/// block submatrix for bit-level cycles of the same length.
std::vector<MatrixCycle> matrix_cycles(const BitMatrix& mother, const ExtendedMatrix& ext, int max_len);
std::vector<MatrixCycle> matrix_cycles(const BitMatrix& mother, const EPRMatrix& ext, int max_len);

struct CycleProbabilityEstimate {
    int q = 0;
    int cycle_length = 4;
    long long trials = 0;
    long long hits = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    bool exhaustive = false;
};

/// Probability that one length-4 symbol cycle with i.i.d. uniform nonzero
/// field labels contains a length-4 bit cycle. Expected value 1/(q-1).
CycleProbabilityEstimate estimate_p4(const FieldContext& ctx, long long trials, uint64_t seed);

/// Exhaustive version over all (q-1)^4 label assignments.
CycleProbabilityEstimate estimate_p4_exhaustive(const FieldContext& ctx);

/// Same experiment with labels drawn uniformly from a restricted set and an
/// arbitrary even cycle length.
CycleProbabilityEstimate estimate_cycle_prob(const FieldContext& ctx, const std::vector<MatrixLabel>& label_set,
                                             int g_c, long long trials, uint64_t seed);

/// Non-colliding pair condition on two full-basis images: the relative
/// permutation has no fixed point and no even cycle (equivalently, the
/// integer rank of the XOR of the two permutation matrices is q-1).
bool label_pair_compatible(const std::vector<int16_t>& perm_a, const std::vector<int16_t>& perm_b);

/// Size of a large pairwise-compatible subset (greedy; exact for the
/// companion family where all pairs qualify).
int compatible_label_count(const FieldContext& ctx, const std::vector<MatrixLabel>& label_set);

struct DegreeDistributions {
    std::map<int, double> lambda;  // edge fraction on degree-d variables
    std::map<int, double> rho;     // edge fraction on degree-d checks
};

/// Edge-perspective degree distributions. Throws on empty rows or columns.
DegreeDistributions degree_distributions(const BitMatrix& m);

} // namespace eprldpc
