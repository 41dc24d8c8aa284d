#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "bilat/market.hpp"
#include "bilat/piecewise.hpp"

namespace bilat::contracts {

// ---------------------------------------------------------------------------
// Contract cash flows. Sign convention: a positive increment of A is cash
// received by the hedger, so a claim paying H_T > 0 to the hedger has value
// -H_T just before maturity.
// ---------------------------------------------------------------------------

struct EuropeanClaim {
    PiecewiseLinear payoff;  // hedger receives payoff(S_T) at T
};

struct DiscreteFlow {
    double t;                // flow time, in (0, T]
    PiecewiseLinear amount;  // hedger receives amount(S_t) at t
};

struct DiscreteFlows {
    std::vector<DiscreteFlow> flows;
};

// A_t - A_0 = -rate * (t - start) for t >= start: the hedger pays a running
// fee. rate >= 0 gives the decreasing (monotone) contract class.
struct ContinuousFee {
    double rate = 0.0;
    double start = 0.0;
};

using Leg = std::variant<DiscreteFlows, ContinuousFee>;

struct Mixed {
    std::vector<Leg> legs;
};

struct ContractSpec {
    double maturity = 1.0;
    std::variant<EuropeanClaim, DiscreteFlows, ContinuousFee, Mixed> flows =
        EuropeanClaim{};

    void validate() const;
    bool decreasing() const;  // is A - A_0 a decreasing process?
};

// ---------------------------------------------------------------------------
// Collateral conventions.
// ---------------------------------------------------------------------------

// C_t = q(V0_t(x1) - V^h_t) = q(-P^h_t); q uniformly Lipschitz, q(0) = 0.
struct HedgerQ {
    PiecewiseLinear q;

    HedgerQ() : q(PiecewiseLinear::zero()) {}
    explicit HedgerQ(PiecewiseLinear q_) : q(std::move(q_)) {
        if (q(0.0) != 0.0) throw std::invalid_argument("HedgerQ: q(0) must be 0");
    }
    static HedgerQ haircut(double alpha1, double alpha2) {
        return HedgerQ(PiecewiseLinear::haircut(alpha1, alpha2));
    }
    static HedgerQ full() { return haircut(0.0, 0.0); }
    static HedgerQ none() { return HedgerQ(); }
};

// C_t = Chat(-P^h_t, -P^c_t); Chat uniformly Lipschitz, Chat(0,0) = 0.
// Either the convex-weight form alpha*y1 + (1-alpha)*y2 or a separable
// piecewise-linear form q1(y1) + q2(y2).
struct Negotiated {
    enum class Form { ConvexWeight, Separable };
    Form form = Form::ConvexWeight;
    double alpha = 0.5;
    PiecewiseLinear q1, q2;

    static Negotiated convex(double alpha) {
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("Negotiated: alpha must be in [0,1]");
        Negotiated n;
        n.form = Form::ConvexWeight;
        n.alpha = alpha;
        return n;
    }
    static Negotiated separable(PiecewiseLinear q1, PiecewiseLinear q2) {
        if (q1(0.0) != 0.0 || q2(0.0) != 0.0)
            throw std::invalid_argument("Negotiated: maps must vanish at 0");
        Negotiated n;
        n.form = Form::Separable;
        n.q1 = std::move(q1);
        n.q2 = std::move(q2);
        return n;
    }

    double operator()(double y1, double y2) const {
        return form == Form::ConvexWeight ? alpha * y1 + (1.0 - alpha) * y2
                                          : q1(y1) + q2(y2);
    }
    double max_abs_slope() const {
        return form == Form::ConvexWeight
                   ? 1.0
                   : q1.max_abs_slope() + q2.max_abs_slope();
    }
};

// Exogenous margin c(t,s) = space(s) * time_weight(t). The margin account is
// closed at maturity: c(T, .) is treated as 0 regardless of the factors.
struct Exogenous {
    PiecewiseLinear space = PiecewiseLinear::zero();
    PiecewiseLinear time_weight = PiecewiseLinear::constant(1.0);

    double operator()(double t, double s) const { return space(s) * time_weight(t); }
};

using CollateralConvention = std::variant<HedgerQ, Negotiated, Exogenous>;

double eval_q(const CollateralConvention& conv, double y);
double eval_negotiated(const CollateralConvention& conv, double y1, double y2);

// Structural predicates of a hedger map q, decided exactly on the
// piecewise-linear representation.
struct QPredicateReport {
    bool no_overcollateralization = false;  // y + q(-y) >= 0 for all y >= 0
    bool monotone_increasing = false;
    bool positively_homogeneous = false;
};

QPredicateReport check_q_predicates(const CollateralConvention& conv);

// ---------------------------------------------------------------------------
// Flow schedules on a time grid.
// ---------------------------------------------------------------------------

// Per-grid-time flow decomposition used by the solvers and the oracle.
// jump_at[k] is the lump flow assigned to grid time k (a function of S at
// that node; the nearest grid time from above receives off-grid flows) and
// step_fee[k] is the flow accrued over (t_k, t_{k+1}], evaluated at the
// step-start node.
struct FlowSchedule {
    std::vector<PiecewiseLinear> jump_at;
    std::vector<PiecewiseLinear> step_fee;

    double jump(std::size_t k, double s) const {
        return jump_at[k].is_zero() ? 0.0 : jump_at[k](s);
    }
    double fee(std::size_t k, double s) const {
        return step_fee[k].is_zero() ? 0.0 : step_fee[k](s);
    }
};

// Raw contract increments delta A on the grid. The terminal European payoff
// is carried as the jump at the last grid time.
FlowSchedule cash_flow_increments(const ContractSpec& contract,
                                  const std::vector<double>& times);

enum class Account { Lending, Borrowing };

// Increments of A^{C} = A + C + F^C discounted by the chosen cash account at
// their occurrence times; the exogenous-collateral pricing path consumes
// this. The dC part telescopes into a time-0 jump plus a per-step principal
// drag, both exact for the product form of c.
FlowSchedule discounted_flows(const ContractSpec& contract,
                              const market::RateEnvironment& rates,
                              Account account, const std::vector<double>& times,
                              const std::optional<Exogenous>& collateral = {});

}  // namespace bilat::contracts
