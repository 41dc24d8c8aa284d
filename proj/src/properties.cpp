#include "bilat/properties.hpp"

#include <cmath>
#include <random>
#include <tuple>

namespace bilat::properties {

namespace {

using generators::DriverPoint;
using generators::GeneratorSpec;
using pricing::PricingOutcome;
using pricing::PricingRequest;

contracts::ContractSpec scale_contract(const contracts::ContractSpec& c,
                                       double lambda) {
    contracts::ContractSpec out = c;
    struct Visitor {
        double lambda;
        void operator()(contracts::EuropeanClaim& e) const {
            e.payoff = e.payoff.scaled(lambda);
        }
        void operator()(contracts::DiscreteFlows& d) const {
            for (auto& f : d.flows) f.amount = f.amount.scaled(lambda);
        }
        void operator()(contracts::ContinuousFee& f) const { f.rate *= lambda; }
        void operator()(contracts::Mixed& m) const {
            for (auto& leg : m.legs) std::visit(*this, leg);
        }
    };
    std::visit(Visitor{lambda}, out.flows);
    return out;
}

}  // namespace

PropertyVerdict check_ordering(const PricingOutcome& out, double tol) {
    PropertyVerdict v;
    v.id = "ordering";
    v.tolerance = tol;
    v.worst_violation = 0.0;
    const auto& lat = *out.lat;
    for (std::size_t i = 0; i < out.hedger.y.size(); ++i) {
        for (std::size_t j = 0; j < out.hedger.y[i].size(); ++j) {
            double viol = out.cpty.y[i][j] - out.hedger.y[i][j];
            if (viol > v.worst_violation) {
                v.worst_violation = viol;
                v.witness = Witness{lat.time(i), lat.node(i, j), viol, "P^c - P^h"};
            }
        }
    }
    v.pass = v.worst_violation <= tol;
    return v;
}

PropertyVerdict check_bsvp(const GeneratorSpec& coupled,
                           const market::AssetDynamics& asset, const BsvpBox& box,
                           std::size_t n_samples, double M, std::uint64_t seed) {
    if (!generators::is_pair_family(coupled.family))
        throw std::invalid_argument("check_bsvp: coupled family required");
    coupled.validate();

    PropertyVerdict v;
    v.id = "bsvp";
    v.seed = seed;
    v.tolerance = 0.0;
    v.worst_violation = 0.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, box.t_max);
    std::uniform_real_distribution<double> us(box.s_lo, box.s_hi);
    std::uniform_real_distribution<double> usym(-box.y_scale, box.y_scale);
    std::uniform_real_distribution<double> uneg(-box.y_scale, 0.0);

    double m_hat = 0.0;  // smallest constant that would make every sample pass
    DriverPoint p;
    p.s.assign(1, 0.0);
    p.z1.assign(1, 0.0);
    p.z2.assign(1, 0.0);

    for (std::size_t k = 0; k < n_samples; ++k) {
        double t = ut(rng);
        double s = us(rng);
        double y1 = uneg(rng);  // only y1 < 0 constrains the condition
        double y2 = usym(rng);
        double z1 = usym(rng);
        double z2 = usym(rng);

        double sigma = asset.sigma_bar * s;
        double y1m = -y1;  // y1^- > 0
        // projected point: (y1^+ + y2, y2, z1 + z2, z2), sigma-composed
        p.t = t;
        p.s[0] = s;
        p.y1 = y2;  // y1^+ = 0 here
        p.y2 = y2;
        p.z1[0] = (z1 + z2) / sigma;
        p.z2[0] = z2 / sigma;
        auto gv = generators::eval(coupled, p);
        // h1 - h2 = -g1 + g2
        double lhs = -4.0 * y1m * (gv.g2 - gv.g1);
        double rhs = M * y1m * y1m + 2.0 * z1 * z1;
        double viol = lhs - rhs;
        if (viol > v.worst_violation) {
            v.worst_violation = viol;
            v.witness = Witness{t, s, viol, "LHS - RHS"};
        }
        double needed = (lhs - 2.0 * z1 * z1) / (y1m * y1m);
        if (needed > m_hat) m_hat = needed;
    }
    v.detail = m_hat;
    v.pass = v.worst_violation <= 0.0;
    return v;
}

PropertyVerdict check_homogeneity(const PricingRequest& request,
                                  const std::vector<double>& lambdas, double tol) {
    PropertyVerdict v;
    v.id = "homogeneity";
    v.tolerance = tol;

    const auto* hq = std::get_if<contracts::HedgerQ>(&request.collateral);
    if (!hq || !hq->q.positively_homogeneous()) {
        v.applicable = false;
        v.pass = true;
        return v;
    }

    PricingOutcome base = pricing::evaluate(request);
    double scale = 1.0 + std::max(std::fabs(base.p_h0), std::fabs(base.p_c0));

    v.pass = true;
    for (double lambda : lambdas) {
        PricingRequest scaled = request;
        scaled.x1 = lambda * request.x1;
        scaled.x2 = lambda * request.x2;
        scaled.contract = scale_contract(request.contract, lambda);
        PricingOutcome s = pricing::evaluate(scaled);
        double bound = lambda == 0.0 ? tol : tol * lambda * scale;
        double dh = std::fabs(s.p_h0 - lambda * base.p_h0);
        double dc = std::fabs(s.p_c0 - lambda * base.p_c0);
        double worst = std::max(dh, dc);
        if (worst > v.worst_violation) {
            v.worst_violation = worst;
            v.witness =
                Witness{0.0, lambda, worst, "|P(lambda x, lambda A) - lambda P|"};
        }
        if (worst > bound) v.pass = false;
    }
    return v;
}

PropertyVerdict check_endowment_independence(const PricingRequest& request,
                                             const std::vector<double>& x1_values,
                                             double tol) {
    PropertyVerdict v;
    v.id = "endowment_independence";
    v.tolerance = tol;

    const auto* hq = std::get_if<contracts::HedgerQ>(&request.collateral);
    bool ok = request.model == pricing::Model::PartialNetting &&
              request.contract.decreasing() && hq &&
              contracts::check_q_predicates(request.collateral)
                  .no_overcollateralization &&
              request.x2 <= 0.0;
    if (!ok) {
        v.applicable = false;
        v.pass = true;
        return v;
    }

    std::optional<PricingOutcome> base;
    for (double x1 : x1_values) {
        PricingRequest r = request;
        r.x1 = x1;
        PricingOutcome out = pricing::evaluate(r);
        if (!base) {
            base = std::move(out);
            continue;
        }
        for (std::size_t i = 0; i < out.hedger.y.size(); ++i)
            for (std::size_t j = 0; j < out.hedger.y[i].size(); ++j) {
                double d = std::fabs(out.hedger.y[i][j] - base->hedger.y[i][j]);
                if (d > v.worst_violation) {
                    v.worst_violation = d;
                    v.witness = Witness{base->lat->time(i), base->lat->node(i, j), d,
                                        "|P^h(x1) - P^h(x1')|"};
                }
            }
    }
    v.pass = v.worst_violation <= tol;
    return v;
}

PropertyVerdict check_monotone_ordering(const PricingRequest& request, double tol) {
    PropertyVerdict v;
    v.id = "monotone_ordering";
    v.tolerance = tol;

    const auto* hq = std::get_if<contracts::HedgerQ>(&request.collateral);
    bool ok = request.model == pricing::Model::PartialNetting &&
              request.contract.decreasing() && hq && request.x1 >= 0.0 &&
              request.x2 <= 0.0 &&
              contracts::check_q_predicates(request.collateral)
                  .no_overcollateralization;
    if (!ok) {
        v.applicable = false;
        v.pass = true;
        return v;
    }

    PricingOutcome out = pricing::evaluate(request);
    PropertyVerdict ord = check_ordering(out, tol);
    v.worst_violation = ord.worst_violation;
    v.witness = ord.witness;
    // hedger price must also be nonnegative node-wise
    for (std::size_t i = 0; i < out.hedger.y.size(); ++i)
        for (std::size_t j = 0; j < out.hedger.y[i].size(); ++j) {
            double d = -out.hedger.y[i][j];
            if (d > v.worst_violation) {
                v.worst_violation = d;
                v.witness =
                    Witness{out.lat->time(i), out.lat->node(i, j), d, "-P^h"};
            }
        }
    v.pass = v.worst_violation <= tol;
    return v;
}

PropertyVerdict check_sandwich(const PricingRequest& request,
                               const std::vector<double>& r_mid_values, double tol) {
    PropertyVerdict v;
    v.id = "sandwich";
    v.tolerance = tol;
    if (request.x1 != 0.0 || request.x2 != 0.0) {
        v.applicable = false;
        v.pass = true;
        return v;
    }

    PricingOutcome out = pricing::evaluate(request);
    for (double r_mid : r_mid_values) {
        PricingRequest r = request;
        r.r_mid = r_mid;
        double pr = pricing::price_single_rate(r).p0;
        double upper = pr - out.p_h0;   // must be <= tol
        double lower = out.p_c0 - pr;   // must be <= tol
        double worst = std::max(upper, lower);
        if (worst > v.worst_violation) {
            v.worst_violation = worst;
            v.witness = Witness{0.0, r_mid, worst, "sandwich slack"};
        }
    }
    v.pass = v.worst_violation <= tol;
    return v;
}

ViolationWitness search_range_violation(const PricingRequest& request,
                                        const SearchConfig& cfg, double tol) {
    const auto* hq = std::get_if<contracts::HedgerQ>(&request.collateral);
    if (!hq || !hq->q.is_zero())
        throw std::invalid_argument("search_range_violation: q must be zero");

    double T = request.contract.maturity;
    double t1 = cfg.t1 <= 1.0 ? cfg.t1 * T : cfg.t1;
    double scale = std::max({1.0, std::fabs(request.x1), std::fabs(request.x2)});

    ViolationWitness best;
    double best_gap = tol;

    auto price_gap = [&](double a1, double a2, std::size_t n) {
        PricingRequest r = request;
        r.n_steps = n;
        contracts::DiscreteFlows d;
        d.flows.push_back({t1, PiecewiseLinear::constant(a1)});
        d.flows.push_back({T, PiecewiseLinear::constant(a2)});
        r.contract.flows = d;
        pricing::PricingOutcome out = pricing::evaluate(r);
        return std::tuple<double, double>(out.p_h0, out.p_c0);
    };

    for (std::size_t ia = 0; ia < cfg.grid_points; ++ia) {
        double a1 = cfg.amount_lo +
                    (cfg.amount_hi - cfg.amount_lo) * static_cast<double>(ia) /
                        static_cast<double>(cfg.grid_points - 1);
        for (std::size_t ib = 0; ib < cfg.grid_points; ++ib) {
            double a2 = cfg.amount_lo +
                        (cfg.amount_hi - cfg.amount_lo) * static_cast<double>(ib) /
                            static_cast<double>(cfg.grid_points - 1);
            auto [ph, pc] = price_gap(a1 * scale, a2 * scale, cfg.n_steps);
            double gap = pc - ph;
            if (gap > best_gap) {
                best_gap = gap;
                best.found = true;
                best.t1 = t1;
                best.amount1 = a1 * scale;
                best.amount2 = a2 * scale;
            }
        }
    }

    if (best.found) {
        auto [ph, pc] = price_gap(best.amount1, best.amount2, cfg.n_confirm);
        best.p_h0 = ph;
        best.p_c0 = pc;
        best.found = pc > ph + tol;
    }
    return best;
}

}  // namespace bilat::properties
