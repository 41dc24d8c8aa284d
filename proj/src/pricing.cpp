#include "bilat/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bilat::pricing {

namespace {

using generators::Family;
using generators::GeneratorSpec;

GeneratorSpec make_spec(Family family, const PricingRequest& req) {
    GeneratorSpec s;
    s.family = family;
    s.rates = req.rates;
    s.x1 = req.x1;
    s.x2 = req.x2;
    s.collateral = req.collateral;
    s.r_mid = req.r_mid;
    s.d = 1;
    s.validate();
    return s;
}

lattice::Lattice build_lattice(const PricingRequest& req, market::Regime regime,
                               std::size_t n) {
    lattice::LatticeConfig cfg;
    cfg.n_steps = n;
    cfg.horizon = req.contract.maturity;
    cfg.measure = market::make_measure(regime, req.asset, req.rates);
    return lattice::build(req.asset, req.rates, cfg);
}

// Exogenous-collateral path. The wealth-level generators are evaluated at
// the exactly transformed point, so the recursion in the price variable is
// the discrete integrating-factor form of the wealth-level BSDE:
//   hedger, lending:  f = B^l G_l((y+C)/B^l + x1, z_W/sigma) + r_l(y+C) - r_c C
//   cpty,   lending:  f = -B^l G_l(x2 - (y+C)/B^l, -z_W/sigma) + r_l(y+C) - r_c C
//   hedger, beta:     f = G^h(t, x1, y+C, z_W/sigma) - r_c C
//   cpty,   beta:     f = G^c(t, x2, y+C, z_W/sigma) - r_c C
struct ExogenousPath {
    const PricingRequest& req;
    const contracts::Exogenous& c;
    bool pn;

    bsde::ScalarDriver hedger_driver(const lattice::Lattice& lat,
                                     market::Regime regime) const {
        const auto rates = req.rates;
        double x1 = req.x1;
        if (regime == market::Regime::LendingMeasure) {
            GeneratorSpec g = wealth_spec(pn ? Family::PnWealthLending
                                             : Family::BergmanWealthLending);
            return [this, g, rates, x1, &lat](std::size_t i, std::size_t, double t,
                                              double s, double y, double z_w) {
                double C = margin(i, lat, t, s);
                double Bl = market::account_value(rates.r_l, t);
                auto p = generators::DriverPoint::scalar(
                    t, s, (y + C) / Bl + x1, z_w / (req.asset.sigma_bar * s));
                return Bl * generators::eval(g, p).g1 + rates.r_l * (y + C) -
                       rates.r_c * C;
            };
        }
        GeneratorSpec g = wealth_spec(Family::BergmanWealthHedgerBeta);
        return [this, g, rates, &lat](std::size_t i, std::size_t, double t, double s,
                                      double y, double z_w) {
            double C = margin(i, lat, t, s);
            auto p = generators::DriverPoint::scalar(t, s, y + C,
                                                     z_w / (req.asset.sigma_bar * s));
            return generators::eval(g, p).g1 - rates.r_c * C;
        };
    }

    bsde::ScalarDriver cpty_driver(const lattice::Lattice& lat,
                                   market::Regime regime) const {
        const auto rates = req.rates;
        double x2 = req.x2;
        if (regime == market::Regime::LendingMeasure) {
            GeneratorSpec g = wealth_spec(pn ? Family::PnWealthLending
                                             : Family::BergmanWealthLending);
            return [this, g, rates, x2, &lat](std::size_t i, std::size_t, double t,
                                              double s, double y, double z_w) {
                double C = margin(i, lat, t, s);
                double Bl = market::account_value(rates.r_l, t);
                auto p = generators::DriverPoint::scalar(
                    t, s, x2 - (y + C) / Bl, -z_w / (req.asset.sigma_bar * s));
                return -Bl * generators::eval(g, p).g1 + rates.r_l * (y + C) -
                       rates.r_c * C;
            };
        }
        GeneratorSpec g = wealth_spec(Family::BergmanWealthCptyBeta);
        return [this, g, rates, &lat](std::size_t i, std::size_t, double t, double s,
                                      double y, double z_w) {
            double C = margin(i, lat, t, s);
            auto p = generators::DriverPoint::scalar(t, s, y + C,
                                                     z_w / (req.asset.sigma_bar * s));
            return generators::eval(g, p).g1 - rates.r_c * C;
        };
    }

    double margin(std::size_t i, const lattice::Lattice& lat, double t,
                  double s) const {
        return i + 1 >= lat.times().size() ? 0.0 : c(t, s);  // C_T = 0
    }

    GeneratorSpec wealth_spec(Family f) const {
        GeneratorSpec g;
        g.family = f;
        g.rates = req.rates;
        g.x1 = req.x1;
        g.x2 = req.x2;
        g.d = 1;
        g.validate();
        return g;
    }
};

struct RawResult {
    bsde::BsdeSolution hedger, cpty;
    std::vector<std::vector<double>> wealth_h, wealth_c;
};

RawResult evaluate_raw(const PricingRequest& req, const RegimeSelection& sel,
                       const lattice::Lattice& lat) {
    auto flows = contracts::cash_flow_increments(req.contract, lat.times());

    RawResult out;
    if (req.model == Model::SingleRate) {
        bsde::BsdeProblem pr;
        pr.gen = make_spec(sel.f_family, req);
        pr.flows = flows;
        out.hedger = bsde::solve_scalar(pr, lat);
        out.cpty = out.hedger;
        return out;
    }

    if (sel.exogenous_path) {
        ExogenousPath path{req, std::get<contracts::Exogenous>(req.collateral),
                           req.model == Model::PartialNetting};
        out.hedger = bsde::solve_scalar_custom(path.hedger_driver(lat, sel.regime),
                                               flows, {}, lat);
        out.cpty = bsde::solve_scalar_custom(path.cpty_driver(lat, sel.regime), flows,
                                             {}, lat);
        // Wealth-level reconstruction: lending Y = x +- (P + C)/B^l,
        // beta Ytilde = P + C.
        auto reconstruct = [&](const bsde::BsdeSolution& sol, bool hedger_side) {
            std::vector<std::vector<double>> w(sol.y.size());
            for (std::size_t i = 0; i < sol.y.size(); ++i) {
                w[i].resize(sol.y[i].size());
                double t = lat.time(i);
                double Bl = market::account_value(req.rates.r_l, t);
                for (std::size_t j = 0; j < sol.y[i].size(); ++j) {
                    double C = path.margin(i, lat, t, lat.node(i, j));
                    double pc = sol.y[i][j] + C;
                    if (sel.regime == market::Regime::LendingMeasure)
                        w[i][j] = hedger_side ? req.x1 + pc / Bl : req.x2 - pc / Bl;
                    else
                        w[i][j] = pc;
                }
            }
            return w;
        };
        out.wealth_h = reconstruct(out.hedger, true);
        out.wealth_c = reconstruct(out.cpty, false);
        return out;
    }

    if (sel.coupling == bsde::Coupling::SequentialPair) {
        bsde::BsdeProblem pr;
        pr.gen = make_spec(sel.f_family, req);
        pr.gen_cpty = make_spec(*sel.g_family, req);
        pr.flows = flows;
        pr.coupling = bsde::Coupling::SequentialPair;
        auto [h, c] = bsde::solve_sequential_pair(pr, lat);
        out.hedger = std::move(h);
        out.cpty = std::move(c);
        return out;
    }

    bsde::BsdeProblem pr;
    pr.gen = make_spec(sel.f_family, req);
    pr.flows = flows;
    pr.coupling = bsde::Coupling::SimultaneousPair;
    pr.coupled_fixed_point = req.coupled_fixed_point;
    auto [h, c] = bsde::solve_simultaneous_pair(pr, lat);
    out.hedger = std::move(h);
    out.cpty = std::move(c);
    return out;
}

}  // namespace

RegimeSelection select_regime(const PricingRequest& req) {
    req.rates.validate();
    req.asset.validate();
    req.contract.validate();
    if (req.x1 < 0.0)
        throw std::invalid_argument("select_regime: x1 >= 0 is assumed throughout");

    RegimeSelection sel;
    bool pn = req.model == Model::PartialNetting;

    if (req.model == Model::SingleRate) {
        if (!std::holds_alternative<contracts::HedgerQ>(req.collateral))
            throw std::invalid_argument("select_regime: single-rate model needs a hedger map q");
        if (!(req.rates.r_l <= req.r_mid && req.r_mid <= req.rates.r_b))
            throw std::invalid_argument("select_regime: r_mid must lie in [r_l, r_b]");
        sel.f_family = Family::SingleRate;
        return sel;
    }

    bool equal_signs = req.x2 >= 0.0;
    sel.regime =
        equal_signs ? market::Regime::LendingMeasure : market::Regime::BetaMeasure;

    if (std::holds_alternative<contracts::HedgerQ>(req.collateral)) {
        sel.coupling = bsde::Coupling::SequentialPair;
        if (equal_signs) {
            sel.f_family = pn ? Family::PnHedgerLending : Family::BergmanHedgerLending;
            sel.g_family = pn ? Family::PnCptyLending : Family::BergmanCptyLending;
        } else {
            sel.f_family = pn ? Family::PnHedgerBeta : Family::BergmanHedgerBeta;
            sel.g_family = pn ? Family::PnCptyBeta : Family::BergmanCptyBeta;
        }
    } else if (std::holds_alternative<contracts::Negotiated>(req.collateral)) {
        sel.coupling = bsde::Coupling::SimultaneousPair;
        if (equal_signs)
            sel.f_family = pn ? Family::CoupledPnLending : Family::CoupledBergmanLending;
        else
            sel.f_family = pn ? Family::CoupledPnBeta : Family::CoupledBergmanBeta;
    } else {
        sel.exogenous_path = true;
        if (equal_signs) {
            sel.f_family = pn ? Family::PnWealthLending : Family::BergmanWealthLending;
        } else if (!pn) {
            sel.f_family = Family::BergmanWealthHedgerBeta;
            sel.g_family = Family::BergmanWealthCptyBeta;
        } else {
            throw std::invalid_argument(
                "select_regime: partial netting with exogenous collateral requires "
                "x2 >= 0 (no beta-measure wealth generators exist for this model)");
        }
    }

    // Beta-regime admissibility of the auxiliary drift.
    if (sel.regime == market::Regime::BetaMeasure) {
        double b = req.rates.beta_at(0);
        if (b < req.rates.r_b)
            throw std::invalid_argument("select_regime: beta regime needs r_b <= beta");
        if (pn && b > req.rates.r_ib_at(0))
            throw std::invalid_argument(
                "select_regime: partial-netting beta regime needs beta <= r_ib");
    }
    return sel;
}

PricingOutcome evaluate(const PricingRequest& req) {
    RegimeSelection sel = select_regime(req);

    auto lat = std::make_shared<lattice::Lattice>(
        build_lattice(req, sel.regime, req.n_steps));
    RawResult raw = evaluate_raw(req, sel, *lat);

    PricingOutcome out;
    out.regime = sel;
    out.n_steps = req.n_steps;
    out.dt = lat->dt();
    out.richardson = req.use_richardson;
    out.hedger = std::move(raw.hedger);
    out.cpty = std::move(raw.cpty);
    out.wealth_h = std::move(raw.wealth_h);
    out.wealth_c = std::move(raw.wealth_c);
    out.lat = lat;
    out.x1 = req.x1;
    out.x2 = req.x2;
    out.p_h0 = out.hedger.y0();
    out.p_c0 = out.cpty.y0();

    if (req.use_richardson) {
        lattice::Lattice fine = build_lattice(req, sel.regime, 2 * req.n_steps);
        RawResult raw2 = evaluate_raw(req, sel, fine);
        out.p_h0 = bsde::richardson(out.hedger.y0(), raw2.hedger.y0());
        out.p_c0 = bsde::richardson(out.cpty.y0(), raw2.cpty.y0());
    }
    return out;
}

double price_hedger(const PricingRequest& req) { return evaluate(req).p_h0; }
double price_counterparty(const PricingRequest& req) { return evaluate(req).p_c0; }

SingleRateOutcome price_single_rate(const PricingRequest& req) {
    if (!(req.rates.r_l <= req.r_mid && req.r_mid <= req.rates.r_b))
        throw std::invalid_argument("price_single_rate: r_mid must lie in [r_l, r_b]");
    if (!std::holds_alternative<contracts::HedgerQ>(req.collateral))
        throw std::invalid_argument("price_single_rate: needs a hedger map q");

    Family fam = req.model == Model::PartialNetting ? Family::PnSingleRate
                                                    : Family::SingleRate;
    auto lat = std::make_shared<lattice::Lattice>(
        build_lattice(req, market::Regime::LendingMeasure, req.n_steps));

    bsde::BsdeProblem pr;
    pr.gen = make_spec(fam, req);
    pr.flows = contracts::cash_flow_increments(req.contract, lat->times());

    SingleRateOutcome out;
    out.sol = bsde::solve_scalar(pr, *lat);
    out.p0 = out.sol.y0();
    out.lat = lat;

    if (req.use_richardson) {
        lattice::Lattice fine =
            build_lattice(req, market::Regime::LendingMeasure, 2 * req.n_steps);
        bsde::BsdeProblem pr2 = pr;
        pr2.flows = contracts::cash_flow_increments(req.contract, fine.times());
        out.p0 = bsde::richardson(out.p0, bsde::solve_scalar(pr2, fine).y0());
    }
    return out;
}

double range_tolerance(const PricingOutcome& out) {
    double scale = std::max(std::fabs(out.p_h0), std::fabs(out.p_c0));
    if (out.richardson) return 1e-8 * (1.0 + scale);
    return (1.0 + scale) * out.dt;  // raw-grid slack, first-order in dt
}

std::vector<RangeRow> fair_range(const PricingOutcome& out,
                                 const std::vector<double>& times) {
    double tol = range_tolerance(out);
    std::vector<RangeRow> rows;
    rows.reserve(times.size());
    const auto& grid_times = out.lat->times();
    for (double t : times) {
        auto it = std::lower_bound(grid_times.begin(), grid_times.end(),
                                   t - 1e-12 * (1.0 + t));
        if (it == grid_times.end())
            throw std::invalid_argument("fair_range: time beyond horizon");
        std::size_t i = static_cast<std::size_t>(it - grid_times.begin());
        RangeRow row;
        row.t = grid_times[i];
        row.min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < out.hedger.y[i].size(); ++j) {
            double gap = out.hedger.y[i][j] - out.cpty.y[i][j];
            if (gap < row.min_gap) {
                row.min_gap = gap;
                row.hi = out.hedger.y[i][j];
                row.lo = out.cpty.y[i][j];
            }
        }
        row.empty = row.min_gap < -tol;
        rows.push_back(row);
    }
    return rows;
}

std::vector<RangeRow> fair_range(const PricingRequest& req,
                                 const std::vector<double>& times) {
    return fair_range(evaluate(req), times);
}

}  // namespace bilat::pricing
