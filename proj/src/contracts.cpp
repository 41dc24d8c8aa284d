#include "bilat/contracts.hpp"

#include <cmath>

namespace bilat::contracts {

namespace {

constexpr double kTimeTol = 1e-12;

bool pwl_nonpositive_constant(const PiecewiseLinear& f) {
    if (f.max_abs_slope() != 0.0) return false;
    return f(0.0) <= 0.0;
}

void validate_leg_times(const DiscreteFlows& d, double maturity) {
    for (const auto& fl : d.flows) {
        if (fl.t <= 0.0 || fl.t > maturity + kTimeTol)
            throw std::invalid_argument("ContractSpec: flow time outside (0, T]");
    }
}

}  // namespace

void ContractSpec::validate() const {
    if (!(maturity > 0.0))
        throw std::invalid_argument("ContractSpec: maturity must be > 0");
    if (const auto* d = std::get_if<DiscreteFlows>(&flows)) {
        validate_leg_times(*d, maturity);
    } else if (const auto* fee = std::get_if<ContinuousFee>(&flows)) {
        if (fee->start < 0.0 || fee->start >= maturity)
            throw std::invalid_argument("ContractSpec: fee start outside [0, T)");
    } else if (const auto* m = std::get_if<Mixed>(&flows)) {
        for (const auto& leg : m->legs) {
            if (const auto* d = std::get_if<DiscreteFlows>(&leg)) {
                validate_leg_times(*d, maturity);
            } else if (const auto* f = std::get_if<ContinuousFee>(&leg)) {
                if (f->start < 0.0 || f->start >= maturity)
                    throw std::invalid_argument("ContractSpec: fee start outside [0, T)");
            }
        }
    }
}

bool ContractSpec::decreasing() const {
    auto flows_ok = [](const DiscreteFlows& d) {
        for (const auto& fl : d.flows)
            if (!pwl_nonpositive_constant(fl.amount)) return false;
        return true;
    };
    if (const auto* e = std::get_if<EuropeanClaim>(&flows)) return e->payoff.is_zero();
    if (const auto* d = std::get_if<DiscreteFlows>(&flows)) return flows_ok(*d);
    if (const auto* f = std::get_if<ContinuousFee>(&flows)) return f->rate >= 0.0;
    for (const auto& leg : std::get<Mixed>(flows).legs) {
        if (const auto* d = std::get_if<DiscreteFlows>(&leg)) {
            if (!flows_ok(*d)) return false;
        } else if (std::get<ContinuousFee>(leg).rate < 0.0) {
            return false;
        }
    }
    return true;
}

double eval_q(const CollateralConvention& conv, double y) {
    const auto* h = std::get_if<HedgerQ>(&conv);
    if (!h) throw std::invalid_argument("eval_q: convention is not a hedger map");
    return h->q(y);
}

double eval_negotiated(const CollateralConvention& conv, double y1, double y2) {
    const auto* n = std::get_if<Negotiated>(&conv);
    if (!n) throw std::invalid_argument("eval_negotiated: convention is not negotiated");
    return (*n)(y1, y2);
}

QPredicateReport check_q_predicates(const CollateralConvention& conv) {
    const auto* h = std::get_if<HedgerQ>(&conv);
    if (!h)
        throw std::invalid_argument("check_q_predicates: convention is not a hedger map");
    const PiecewiseLinear& q = h->q;

    QPredicateReport rep;
    rep.monotone_increasing = q.monotone_increasing();
    rep.positively_homogeneous = q.positively_homogeneous();

    // r(y) = y + q(-y) on [0, inf) is piecewise linear with kinks at 0 and at
    // -k for the negative kinks of q; it is nonnegative everywhere iff it is
    // nonnegative at every kink and its terminal slope 1 - q'(-inf) is >= 0.
    rep.no_overcollateralization = true;
    auto r = [&q](double y) { return y + q(-y); };
    if (r(0.0) < 0.0) rep.no_overcollateralization = false;
    for (double k : q.kinks()) {
        if (k < 0.0 && r(-k) < 0.0) rep.no_overcollateralization = false;
    }
    if (1.0 - q.left_slope() < 0.0) rep.no_overcollateralization = false;
    return rep;
}

namespace {

std::size_t grid_index_from_above(const std::vector<double>& times, double t) {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= t - kTimeTol) return k;
    throw std::invalid_argument("cash_flow_increments: flow time beyond horizon");
}

void add_discrete(FlowSchedule& sched, const DiscreteFlows& d,
                  const std::vector<double>& times, bool discount, double rate) {
    for (const auto& fl : d.flows) {
        std::size_t k = grid_index_from_above(times, fl.t);
        if (k == 0)
            throw std::invalid_argument("cash_flow_increments: flow at time 0");
        double w = discount ? std::exp(-rate * times[k]) : 1.0;
        sched.jump_at[k] += fl.amount.scaled(w);
    }
}

void add_fee(FlowSchedule& sched, const ContinuousFee& fee,
             const std::vector<double>& times, bool discount, double rate) {
    if (fee.rate == 0.0) return;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        double a = std::max(times[k], fee.start);
        double b = times[k + 1];
        if (b <= a) continue;
        double weight;
        if (!discount) {
            weight = b - a;
        } else if (rate == 0.0) {
            weight = b - a;
        } else {
            weight = (std::exp(-rate * a) - std::exp(-rate * b)) / rate;
        }
        sched.step_fee[k] += PiecewiseLinear::constant(-fee.rate * weight);
    }
}

}  // namespace

FlowSchedule cash_flow_increments(const ContractSpec& contract,
                                  const std::vector<double>& times) {
    contract.validate();
    if (times.size() < 2)
        throw std::invalid_argument("cash_flow_increments: need at least one step");
    if (std::fabs(times.back() - contract.maturity) > kTimeTol * (1.0 + contract.maturity))
        throw std::invalid_argument("cash_flow_increments: grid horizon != maturity");

    FlowSchedule sched;
    sched.jump_at.assign(times.size(), PiecewiseLinear::zero());
    sched.step_fee.assign(times.size() - 1, PiecewiseLinear::zero());

    struct Visitor {
        FlowSchedule& s;
        const std::vector<double>& times;
        void operator()(const EuropeanClaim& e) const {
            s.jump_at.back() += e.payoff;
        }
        void operator()(const DiscreteFlows& d) const {
            add_discrete(s, d, times, false, 0.0);
        }
        void operator()(const ContinuousFee& f) const {
            add_fee(s, f, times, false, 0.0);
        }
        void operator()(const Mixed& m) const {
            for (const auto& leg : m.legs) std::visit(*this, leg);
        }
    };
    std::visit(Visitor{sched, times}, contract.flows);
    return sched;
}

FlowSchedule discounted_flows(const ContractSpec& contract,
                              const market::RateEnvironment& rates, Account account,
                              const std::vector<double>& times,
                              const std::optional<Exogenous>& collateral) {
    contract.validate();
    double r = account == Account::Lending ? rates.r_l : rates.r_b;

    FlowSchedule sched;
    sched.jump_at.assign(times.size(), PiecewiseLinear::zero());
    sched.step_fee.assign(times.size() - 1, PiecewiseLinear::zero());

    struct Visitor {
        FlowSchedule& s;
        const std::vector<double>& times;
        double r;
        void operator()(const EuropeanClaim& e) const {
            s.jump_at.back() += e.payoff.scaled(std::exp(-r * times.back()));
        }
        void operator()(const DiscreteFlows& d) const {
            add_discrete(s, d, times, true, r);
        }
        void operator()(const ContinuousFee& f) const { add_fee(s, f, times, true, r); }
        void operator()(const Mixed& m) const {
            for (const auto& leg : m.legs) std::visit(*this, leg);
        }
    };
    std::visit(Visitor{sched, times, r}, contract.flows);

    if (collateral && !collateral->space.is_zero()) {
        const Exogenous& c = *collateral;
        std::size_t n = times.size() - 1;
        // Margin interest F^C: -r_c C dt, discounted exactly over each step
        // with C frozen at the step start. The dC part of A^C telescopes into
        // the inception jump -C_0 plus a per-step principal drag
        // (disc(t_k) - disc(t_{k+1})) C_k; C_T = 0 by construction.
        sched.jump_at[0] += c.space.scaled(-c.time_weight(0.0));
        for (std::size_t k = 0; k < n; ++k) {
            double a = times[k], b = times[k + 1];
            double discint = r == 0.0 ? (b - a) : (std::exp(-r * a) - std::exp(-r * b)) / r;
            double w = c.time_weight(a);
            sched.step_fee[k] += c.space.scaled(-rates.r_c * w * discint);
            sched.step_fee[k] +=
                c.space.scaled(w * (std::exp(-r * a) - std::exp(-r * b)));
        }
    }
    return sched;
}

}  // namespace bilat::contracts
