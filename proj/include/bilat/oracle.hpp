#pragma once

#include <utility>
#include <vector>

#include "bilat/pricing.hpp"

namespace bilat::oracle {

enum class Side { Hedger, Counterparty };

// Exact: true one-step portfolio accounting (exponential accrual, hedge
// ratio from the two-state spread, implicit piecewise-linear wealth solve);
// an independent discretization of the same continuum prices.
// Matched: the same cash decomposition with the solver's explicit
// linearization, so the two code paths agree to round-off.
enum class AccrualMode { Matched, Exact };

struct ReplicationResult {
    std::vector<std::vector<double>> wealth;      // pre-flow wealth per node
    std::vector<std::vector<double>> price;       // pre-flow price per node
    std::vector<std::vector<double>> xi;          // shares held, levels 0..n-1
    std::vector<std::vector<double>> cash;        // residual cash (lent>0, borrowed<0)
    std::vector<std::vector<double>> funded_long; // asset-funded long value (PN)
    std::vector<std::vector<double>> collateral;  // margin amount seen by the hedger
    double price0 = 0.0;
    double max_self_financing_residual = 0.0;
};

// Replication-recursion price, never touching the generator code path. The
// counterparty side replicates (-A, -C) with its own endowment; under the
// hedger's-collateral convention it consumes the hedger-side grids.
ReplicationResult replicate(const pricing::PricingRequest& request, Side side,
                            AccrualMode mode = AccrualMode::Exact);

// Negotiated collateral couples both wealth equations; this solves them
// jointly and returns (hedger, counterparty).
std::pair<ReplicationResult, ReplicationResult> replicate_pair(
    const pricing::PricingRequest& request, AccrualMode mode = AccrualMode::Exact);

}  // namespace bilat::oracle
