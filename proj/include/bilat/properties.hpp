#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bilat/pricing.hpp"

namespace bilat::properties {

struct Witness {
    double t = 0.0;
    double s = 0.0;
    double value = 0.0;  // the offending quantity
    std::string note;
};

struct PropertyVerdict {
    std::string id;
    bool applicable = true;
    bool pass = false;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    std::optional<Witness> witness;
    double detail = 0.0;  // check-specific scalar (e.g. sampled viability constant)
};

// P^c <= P^h + tol at every node and time.
PropertyVerdict check_ordering(const pricing::PricingOutcome& outcome, double tol);

// Component-wise comparison condition for a coupled pair: samples the box,
// evaluates LHS = -4 y1^- [h1 - h2] at the projected point against
// RHS = M |y1^-|^2 + 2 |z1|^2 and reports the smallest sampled constant that
// would pass.
struct BsvpBox {
    double t_max = 1.0;
    double s_lo = 25.0, s_hi = 400.0;
    double y_scale = 3.0;  // y, z sampled uniformly in [-y_scale, y_scale]
};

PropertyVerdict check_bsvp(const generators::GeneratorSpec& coupled,
                           const market::AssetDynamics& asset, const BsvpBox& box,
                           std::size_t n_samples, double M, std::uint64_t seed);

// |P^h(lambda x1, lambda A) - lambda P^h(x1, A)| <= tol * lambda * scale per
// lambda, with the counterparty checked against the coupled margin made from
// the scaled hedger solve.
PropertyVerdict check_homogeneity(const pricing::PricingRequest& request,
                                  const std::vector<double>& lambdas, double tol);

// Partial netting, decreasing contract, non-overcollateralizing q: the
// hedger's price grids are identical across x1 values.
PropertyVerdict check_endowment_independence(const pricing::PricingRequest& request,
                                             const std::vector<double>& x1_values,
                                             double tol);

// Monotone contract class under opposite-sign endowments: ordering plus
// nonnegativity of the hedger's price.
PropertyVerdict check_monotone_ordering(const pricing::PricingRequest& request,
                                        double tol);

// Benchmark sandwich P^c(0) <= P_r <= P^h(0) for each money-market rate.
PropertyVerdict check_sandwich(const pricing::PricingRequest& request,
                               const std::vector<double>& r_mid_values, double tol);

// Grid search over two-flow contracts (one early flow, one at maturity) for
// a fair-range violation P^c_0 > P^h_0 + tol under opposite-sign endowments.
struct SearchConfig {
    double t1 = 0.5;          // early flow time (fraction of T when <= 1)
    double amount_lo = -5.0;  // amount grid, scaled by max(1, |x1|, |x2|)
    double amount_hi = 5.0;
    std::size_t grid_points = 41;
    std::size_t n_steps = 200;     // lattice used during the scan
    std::size_t n_confirm = 1000;  // lattice used for the emitted witness
};

struct ViolationWitness {
    bool found = false;
    double t1 = 0.0, amount1 = 0.0, amount2 = 0.0;
    double p_h0 = 0.0, p_c0 = 0.0;
};

ViolationWitness search_range_violation(const pricing::PricingRequest& request,
                                        const SearchConfig& config, double tol);

}  // namespace bilat::properties
