#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eprldpc/sim.hpp"

namespace eprldpc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

/// Lazily built fixtures shared across the verification suite.
struct VerifyContext {
    CodeSpec& girth6_q8();          // (3,6), 120 symbols, q=8, girth 6
    CodeSpec& girth8_q16();         // (3,6), 120 symbols, q=16, girth 8
    CodeSpec& ordering_fixture();   // (3,6), 400 symbols, q=8 (1200 bits)

private:
    std::unique_ptr<CodeSpec> q8_, q16_, ordering_;
};

CriterionResult verify_length4_cycle_probability(VerifyContext& ctx);  // 1
CriterionResult verify_resolvability_enumeration(VerifyContext& ctx); // 2
CriterionResult verify_permutation_and_order(VerifyContext& ctx);     // 3
CriterionResult verify_structure(VerifyContext& ctx);                 // 4
CriterionResult verify_kernel_equivalence(VerifyContext& ctx);        // 5
CriterionResult verify_construction_girth(VerifyContext& ctx);        // 6
CriterionResult verify_decoder_identity(VerifyContext& ctx);          // 7
CriterionResult verify_decoder_ordering(VerifyContext& ctx);          // 8
CriterionResult verify_bec_scaling(VerifyContext& ctx);               // 9
CriterionResult verify_complexity_contract(VerifyContext& ctx);       // 10
CriterionResult verify_reproducibility(VerifyContext& ctx);           // 11

/// Run the selected criteria (all when ids is empty), printing one line per
/// criterion through `print`. Returns true when everything passed.
bool run_verification(const std::vector<int>& ids, const std::function<void(const CriterionResult&)>& print);

} // namespace eprldpc
