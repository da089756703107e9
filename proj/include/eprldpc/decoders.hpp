#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eprldpc/channel.hpp"
#include "eprldpc/representation.hpp"

namespace eprldpc {

/// One decoding round = mu flooding BP iterations followed by nu hard
/// bit-flipping iterations; rounds of them, syndrome-checked throughout.
struct HybridSchedule {
    int mu = 16;
    int nu = 4;
    int rounds = 2;
    int flip_threshold = 0;  // 0: per-column majority ceil(d/2)
    int k_max = 2;           // flip-combination search width (2 or 3)
};

enum class DecodeStatus { converged, max_iter, inconsistent };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::max_iter;
    std::vector<uint8_t> xbar_hat;
    std::vector<uint16_t> x_hat;
    std::vector<uint8_t> ve_hat;
    int iterations = 0;
    std::vector<int> syndrome_trace;  // weight after each iteration
    std::vector<int> flip_trace;      // hard-decision flips per iteration
    bool oscillation = false;
    long long residual_erasures = 0;
    long long max_check_ops = 0;  // peak per-check work in one update
};

/// Symbol-level sum-product over F_q (reference decoder, direct O(q^2)
/// check convolution). priors[j][v] is the channel likelihood of symbol j
/// being v, any positive scale.
DecodeResult decode_qspa(const NonBinaryMatrix& h, const std::vector<std::vector<double>>& priors, int max_iter);

std::vector<std::vector<double>> symbol_priors(const FieldContext& ctx, const ChannelModel& ch, const Received& rx);

/// Binary tanh-rule BP on any parity-check matrix.
DecodeResult decode_binary_bp(const BitMatrix& hbar, const LLRVector& llr, int max_iter);

/// Shared machinery for the extended decoders; build once per code, decode
/// many frames.
class EprDecoder {
public:
    EprDecoder(const EPRMatrix& m, const GeneratorSet& gens, int p, HybridSchedule sched = {});

    /// Hard-decision bit flipping: flip an extended bit when enough of its
    /// checks fail and some active index combination disagrees with it.
    DecodeResult decode_hard(std::span<const uint8_t> v_init, int max_iters) const;

    /// Hybrid parallel decoding: BP rounds interleaved with hard-decision
    /// rounds that re-pin the message signs.
    DecodeResult decode_awgn(const LLRVector& channel_llr) const;

    /// Erasure peeling plus xor-index completion to the (order-independent)
    /// fixpoint. Known bits are never altered.
    DecodeResult decode_bec(std::span<const uint8_t> values, std::span<const uint8_t> erased,
                            uint64_t order_seed = 0) const;

    const HybridSchedule& schedule() const { return sched_; }
    long long m_s_bound() const { return m_s_bound_; }

private:
    void resolve_all(DecodeResult& res) const;

    const EPRMatrix* m_;
    const GeneratorSet* gens_;
    int p_, q_, qm1_, n_sym_;
    HybridSchedule sched_;
    long long m_s_bound_ = 0;  // max(phi_e, psi_e)
    std::vector<std::vector<int>> chk_cols_;
    std::vector<std::vector<int>> col_rows_;
    std::vector<int> threshold_;
    // per symbol, per active value: active index pairs (a, b) with a^b = value
    std::vector<std::vector<std::vector<std::pair<int, int>>>> pairs_;
};

DecodeResult decode_hard_epr(const EPRMatrix& m, const GeneratorSet& gens, int p,
                             std::span<const uint8_t> v_init, const HybridSchedule& sched);
DecodeResult decode_hybrid_sepr(const EPRMatrix& m, const GeneratorSet& gens, int p, const LLRVector& llr,
                                const HybridSchedule& sched);
DecodeResult decode_bec_hybrid(const EPRMatrix& m, const GeneratorSet& gens, int p,
                               std::span<const uint8_t> values, std::span<const uint8_t> erased,
                               const HybridSchedule& sched = {});

} // namespace eprldpc
