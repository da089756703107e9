#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "eprldpc/bitmatrix.hpp"
#include "eprldpc/field.hpp"
#include "eprldpc/graph.hpp"
#include "eprldpc/representation.hpp"

namespace eprldpc {

struct ConstructionConfig {
    int p = 3;
    int n_sym = 120;       // mother columns
    int n_chk = 60;        // mother rows
    int target_girth = 6;  // even
    int dv = 3;
    int dc = 6;
    std::vector<int> var_degrees;  // optional per-node targets; override dv/dc
    std::vector<int> chk_degrees;
    int psi = -1;  // min active columns per symbol; -1 means q/2 (guaranteed resolvability)
    int phi = 1;   // min kept rows per check; reported, not enforced
    double t_b_db = std::numeric_limits<double>::quiet_NaN();  // optional threshold ceiling
    uint64_t seed = 1;
    int block_width = 1;  // replacement rows span 1 or 2 symbol blocks
    int max_p = 16;
};

/// Girth target unreachable with the available replacement blocks; the outer
/// optimization reacts by growing p.
class GirthInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Candidate 2-row replacement blocks. Each row's support is an index set of
/// extended-bit values with XOR closure zero, so the row annihilates every
/// valid extended symbol; pairs used together share at most one column.
struct BlockSet {
    int q = 0;
    std::vector<std::vector<int>> rows;  // sorted value triples {a, b, a^b}

    static bool cycle_free_pair(const std::vector<int>& r1, const std::vector<int>& r2);
    /// 2 x (q-1) form of the pair (rows indexed by value-1 columns).
    BitMatrix materialize(int r1, int r2) const;
};

BlockSet build_block_set(const FieldContext& ctx);

/// Progressive edge growth on the mother graph: place each variable's edges
/// one at a time, connecting to the check that maximizes the local tree depth
/// (capacity-respecting, degree- then seed-tie-broken). Deterministic per seed.
BitMatrix peg_mother(const ConstructionConfig& cfg);

/// Node-degree sequences realizing edge-perspective polynomials at roughly
/// target_edges edges (largest-remainder rounding; the check side absorbs the
/// rounding slack one edge at a time).
std::pair<std::vector<int>, std::vector<int>> degree_sequences_from_profile(
    const std::map<int, double>& lambda, const std::map<int, double>& rho, long long target_edges);

/// Fill a mother pattern with companion labels drawn per seed, then re-draw
/// labels on short symbol-level cycles until no label product collision
/// remains (a colliding loop product is exactly what turns a matrix cycle
/// into bit cycles). max_cycle_len bounds which cycles are constrained.
BinaryImage optimize_labels(const BitMatrix& mother, const FieldContext& ctx, uint64_t seed,
                            int max_cycle_len = 4);

/// Same, with labels restricted to a caller-provided full-rank set. Rejects
/// degenerate sets in which every pair collides.
BinaryImage optimize_labels_from_set(const BitMatrix& mother, const FieldContext& ctx,
                                     const std::vector<MatrixLabel>& label_set, uint64_t seed);

struct ConstructionReport {
    int p = 0;
    int q = 0;
    int target_girth = 0;
    int achieved_girth = 0;  // 0 when no cycle up to the census cap
    bool girth_exceeds_cap = false;
    long long m_s = 0;
    int rows_emitted = 0;
    int rows_zeroed = 0;
    int row_additions = 0;
    int replacement_rows = 0;
    int selector_swaps = 0;
    int phi_violations = 0;
    std::vector<std::string> log;

    std::string to_string() const;
};

struct EprConstruction {
    EPRMatrix omega_e;
    GeneratorSet gens;
    ConstructionReport report;
};

/// Cycle surgery: weight-3 row additions on length-4 bit cycles, zeroing of
/// rows crossing bit cycles shorter than the target girth, and cycle-checked
/// placement of replacement blocks until every symbol reaches its active
/// floor. Verifies the resulting girth; throws GirthInfeasible otherwise.
EprConstruction epr_construct(const BinaryImage& img, const ConstructionConfig& cfg, const BlockSet& blocks);

struct OptimizedCode {
    std::shared_ptr<const FieldContext> ctx;
    BitMatrix mother;
    NonBinaryMatrix h;
    BinaryImage img;
    ExtendedMatrix omega;
    EPRMatrix omega_e;
    GeneratorSet gens;
    ConstructionReport report;
};

/// Full construction loop: PEG mother, label optimization, extended
/// construction at the target girth, growing p on girth failure, and a final
/// selector-swap pass on residual cycles.
OptimizedCode optimize_code(const ConstructionConfig& cfg);

} // namespace eprldpc
