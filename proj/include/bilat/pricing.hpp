#pragma once

#include <memory>
#include <optional>

#include "bilat/bsde.hpp"
#include "bilat/contracts.hpp"
#include "bilat/generators.hpp"
#include "bilat/lattice.hpp"
#include "bilat/market.hpp"

namespace bilat::pricing {

enum class Model { Bergman, PartialNetting, SingleRate };

struct PricingRequest {
    Model model = Model::Bergman;
    market::RateEnvironment rates;
    market::AssetDynamics asset;
    contracts::ContractSpec contract;
    contracts::CollateralConvention collateral = contracts::HedgerQ::none();
    double x1 = 0.0;
    double x2 = 0.0;
    double r_mid = 0.0;  // single-rate benchmark rate
    std::size_t n_steps = 1000;
    bool use_richardson = false;
    bool coupled_fixed_point = false;
};

struct RegimeSelection {
    market::Regime regime = market::Regime::LendingMeasure;
    bsde::Coupling coupling = bsde::Coupling::Scalar;
    generators::Family f_family = generators::Family::BergmanHedgerLending;
    std::optional<generators::Family> g_family;
    bool exogenous_path = false;
};

// Maps (model, collateral kind, endowment signs) onto measure, generator
// families and coupling mode; throws naming the violated constraint on
// every inadmissible combination.
RegimeSelection select_regime(const PricingRequest& request);

struct PricingOutcome {
    RegimeSelection regime;
    std::size_t n_steps = 0;
    double dt = 0.0;
    bool richardson = false;
    double p_h0 = 0.0;  // extrapolated when richardson is set
    double p_c0 = 0.0;
    bsde::BsdeSolution hedger;  // price-level grids, pre-jump convention
    bsde::BsdeSolution cpty;
    // Wealth-level grids of the exogenous-collateral path (account-discounted
    // portfolio value for the lending regime, margin-adjusted value for the
    // beta regime); empty elsewhere.
    std::vector<std::vector<double>> wealth_h, wealth_c;
    std::shared_ptr<const lattice::Lattice> lat;
    double x1 = 0.0, x2 = 0.0;  // the endowment pair that produced the prices
};

PricingOutcome evaluate(const PricingRequest& request);

double price_hedger(const PricingRequest& request);        // t = 0 value
double price_counterparty(const PricingRequest& request);  // t = 0 value

struct SingleRateOutcome {
    bsde::BsdeSolution sol;
    double p0 = 0.0;
    std::shared_ptr<const lattice::Lattice> lat;
};

// Benchmark price in the single-uncertain-rate market; request.model picks
// the funding flavour.
SingleRateOutcome price_single_rate(const PricingRequest& request);

struct RangeRow {
    double t = 0.0;
    double lo = 0.0;        // counterparty price at the worst node
    double hi = 0.0;        // hedger price at the worst node
    double min_gap = 0.0;   // min over nodes of P^h - P^c
    bool empty = false;
};

// Fair bilateral price range [P^c, P^h] at the requested times (nearest grid
// times); flagged empty when the worst node violates the ordering beyond the
// reporting tolerance.
std::vector<RangeRow> fair_range(const PricingOutcome& outcome,
                                 const std::vector<double>& times);
std::vector<RangeRow> fair_range(const PricingRequest& request,
                                 const std::vector<double>& times);

double range_tolerance(const PricingOutcome& outcome);

}  // namespace bilat::pricing
