#include "bilat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace bilat::oracle {

namespace {

using bilat::PiecewiseLinear;
using contracts::FlowSchedule;
using lattice::Lattice;
using pricing::Model;
using pricing::PricingRequest;

inline double pos(double v) { return v > 0.0 ? v : 0.0; }
inline double neg(double v) { return v < 0.0 ? -v : 0.0; }

// Solves h(V) = target for a monotone increasing piecewise-linear h whose
// kinks lie near the supplied candidates. Closed form between kinks, slope
// extrapolation on the tails, bisection fallback verified by re-evaluation.
double solve_monotone_pwl(const std::function<double(double)>& h,
                          std::vector<double> bps, double target) {
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    if (bps.empty()) bps.push_back(0.0);

    double v = bps.front();
    bool found = false;
    if (target < h(bps.front())) {
        double span = 1.0 + std::fabs(target) + std::fabs(bps.front());
        double lo = bps.front();
        double slope = (h(lo) - h(lo - span)) / span;
        if (slope > 0.0) {
            v = lo + (target - h(lo)) / slope;
            found = true;
        }
    } else if (target > h(bps.back())) {
        double span = 1.0 + std::fabs(target) + std::fabs(bps.back());
        double hi = bps.back();
        double slope = (h(hi + span) - h(hi)) / span;
        if (slope > 0.0) {
            v = hi + (target - h(hi)) / slope;
            found = true;
        }
    } else {
        for (std::size_t i = 0; i + 1 < bps.size() && !found; ++i) {
            double a = bps[i], b = bps[i + 1];
            double ha = h(a), hb = h(b);
            if (target >= ha && target <= hb) {
                v = hb == ha ? a : a + (target - ha) * (b - a) / (hb - ha);
                found = true;
            }
        }
        if (!found) {
            v = bps.back();
            found = true;
        }
    }

    double tol = 1e-12 * (1.0 + std::fabs(target));
    if (found && std::fabs(h(v) - target) <= tol) return v;

    // Fallback: expand a bracket and bisect down to an affine segment.
    double lo = bps.front(), hi = bps.back();
    double step = 1.0 + std::fabs(target) + (hi - lo);
    for (int k = 0; k < 200 && h(lo) > target; ++k) lo -= step, step *= 2.0;
    step = 1.0 + std::fabs(target) + (hi - lo);
    for (int k = 0; k < 200 && h(hi) < target; ++k) hi += step, step *= 2.0;
    if (h(lo) > target || h(hi) < target)
        throw std::runtime_error("oracle: wealth equation has no solution");
    for (int k = 0; k < 200; ++k) {
        double mid = 0.5 * (lo + hi);
        double hm = h(mid);
        if (std::fabs(hm - target) <= tol) return mid;
        (hm < target ? lo : hi) = mid;
        double ha = h(lo), hb = h(hi);
        if (hb > ha) {
            double lin = lo + (target - ha) * (hi - lo) / (hb - ha);
            if (lin >= lo && lin <= hi && std::fabs(h(lin) - target) <= tol) return lin;
        }
    }
    return 0.5 * (lo + hi);
}

struct Env {
    const PricingRequest& req;
    const Lattice& lat;
    bool pn;           // long positions funded asset-by-asset
    bool single_rate;  // one money-market rate for cash both ways

    double gl, gb, gc, gib;  // per-step growth factors

    Env(const PricingRequest& r, const Lattice& l)
        : req(r), lat(l), pn(r.model == Model::PartialNetting),
          single_rate(r.model == Model::SingleRate) {
        double dt = l.dt();
        double rl = single_rate ? r.r_mid : r.rates.r_l;
        double rb = single_rate ? r.r_mid : r.rates.r_b;
        gl = std::exp(rl * dt);
        gb = std::exp(rb * dt);
        gc = std::exp(r.rates.r_c * dt);
        gib = std::exp(r.rates.r_ib_at(0) * dt);
    }

    double grow(double psi) const { return pos(psi) * gl - neg(psi) * gb; }

    double endow_rate(double x) const {
        if (single_rate) return req.r_mid;
        return x >= 0.0 ? req.rates.r_l : req.rates.r_b;
    }
    double endow_account(double x, double t) const {
        return x * market::account_value(endow_rate(x), t);
    }
};

struct Grids {
    std::vector<std::vector<double>> wealth, price, xi, cash, funded, coll;
    void init(std::size_t n) {
        auto tri = [](std::vector<std::vector<double>>& g, std::size_t levels) {
            g.resize(levels);
            for (std::size_t i = 0; i < levels; ++i) g[i].assign(i + 1, 0.0);
        };
        tri(wealth, n + 1);
        tri(price, n + 1);
        tri(coll, n + 1);
        tri(xi, n);
        tri(cash, n);
        tri(funded, n);
    }
};

ReplicationResult pack(Grids&& g, double max_resid) {
    ReplicationResult r;
    r.wealth = std::move(g.wealth);
    r.price = std::move(g.price);
    r.xi = std::move(g.xi);
    r.cash = std::move(g.cash);
    r.funded_long = std::move(g.funded);
    r.collateral = std::move(g.coll);
    r.price0 = r.price[0][0];
    r.max_self_financing_residual = max_resid;
    return r;
}

// How the margin amount is obtained inside a scalar pass.
struct MarginSource {
    const PiecewiseLinear* q = nullptr;  // self-referential C = q(a_own - V)
    const std::vector<std::vector<double>>* fed = nullptr;  // per-node amounts
    const contracts::Exogenous* exo = nullptr;
};

// ---------------------------------------------------------------------------
// Exact accrual: per-node implicit piecewise-linear wealth solve with hedge
// ratio taken from the two-state spread of the cum-dividend move.
// ---------------------------------------------------------------------------

ReplicationResult exact_pass(const Env& env, const FlowSchedule& flows,
                             double side_sign, double x, const MarginSource& ms) {
    const Lattice& lat = env.lat;
    std::size_t n = lat.n_steps();
    Grids g;
    g.init(n);

    double BT = env.endow_account(x, lat.horizon());
    for (std::size_t j = 0; j <= n; ++j) {
        double jump = flows.jump(n, lat.node(n, j));
        g.wealth[n][j] = BT - side_sign * jump;
        g.price[n][j] = side_sign * (g.wealth[n][j] - BT);
    }

    double theta = lat.div_factor();
    double max_resid = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        double t = lat.time(i);
        double a_own = env.endow_account(x, t);
        for (std::size_t j = 0; j <= i; ++j) {
            double s = lat.node(i, j);
            double su = lat.node(i + 1, j + 1), sd = lat.node(i + 1, j);
            double wu = g.wealth[i + 1][j + 1], wd = g.wealth[i + 1][j];
            double xi = (wu - wd) / ((1.0 + theta) * (su - sd));
            double fee = side_sign * flows.fee(i, s);
            double target = wu - xi * (1.0 + theta) * su - fee;

            double xs = xi * s;
            double shift = env.pn ? neg(xs) : -xs;
            double fund = env.pn ? pos(xs) * env.gib : 0.0;

            double V, C;
            if (ms.q) {
                const PiecewiseLinear& q = *ms.q;
                auto h = [&](double v) {
                    double cv = q(a_own - v);
                    return env.grow(v + cv + shift) - env.gc * cv - fund;
                };
                auto psi = [&](double v) { return v + q(a_own - v) + shift; };
                std::vector<double> bps;
                for (double k : q.kinks()) bps.push_back(a_own - k);
                // cash-sign kinks: roots of psi between the collateral kinks
                std::vector<double> corners = bps;
                double pad = (1.0 + q.max_abs_slope()) *
                                 (1.0 + std::fabs(a_own) + std::fabs(shift)) +
                             std::fabs(target) + 1.0;
                corners.push_back(0.0);
                std::sort(corners.begin(), corners.end());
                corners.insert(corners.begin(), corners.front() - pad);
                corners.push_back(corners.back() + pad);
                for (std::size_t m = 0; m + 1 < corners.size(); ++m) {
                    double pa = psi(corners[m]), pb = psi(corners[m + 1]);
                    if ((pa <= 0.0) != (pb <= 0.0) && pb != pa)
                        bps.push_back(corners[m] -
                                      pa * (corners[m + 1] - corners[m]) / (pb - pa));
                }
                V = solve_monotone_pwl(h, std::move(bps), target);
                C = q(a_own - V);
            } else {
                C = ms.exo ? (*ms.exo)(t, s) : (*ms.fed)[i][j];
                double colTerm = side_sign * C;
                auto h = [&](double v) {
                    return env.grow(v + colTerm + shift) - side_sign * env.gc * C - fund;
                };
                V = solve_monotone_pwl(h, {-colTerm - shift}, target);
            }

            double colTerm = side_sign * C;
            double psi_v = V + colTerm + shift;
            double carry = env.grow(psi_v) - side_sign * env.gc * C - fund + fee;
            max_resid = std::max(
                {max_resid, std::fabs(xi * (1.0 + theta) * su + carry - wu),
                 std::fabs(xi * (1.0 + theta) * sd + carry - wd)});

            g.wealth[i][j] = V - side_sign * flows.jump(i, s);
            g.price[i][j] = side_sign * (g.wealth[i][j] - a_own);
            g.xi[i][j] = xi;
            g.cash[i][j] = psi_v;
            g.funded[i][j] = env.pn ? pos(xs) : 0.0;
            g.coll[i][j] = C;
        }
    }
    return pack(std::move(g), max_resid);
}

// ---------------------------------------------------------------------------
// Matched accrual: the solver's explicit linearization written in portfolio
// terms (dollar delta, cash split, margin interest).
// ---------------------------------------------------------------------------

ReplicationResult matched_pass(const Env& env, const FlowSchedule& flows,
                               double side_sign, double x, const MarginSource& ms,
                               const std::vector<std::vector<double>>* hedger_price,
                               market::Regime regime) {
    const Lattice& lat = env.lat;
    const auto& r = env.req.rates;
    std::size_t n = lat.n_steps();
    double dt = lat.dt();
    double sigma_bar = env.req.asset.sigma_bar;
    Grids g;
    g.init(n);

    double BT = env.endow_account(x, lat.horizon());
    for (std::size_t j = 0; j <= n; ++j) {
        double jump = flows.jump(n, lat.node(n, j));
        g.wealth[n][j] = BT - side_sign * jump;
        g.price[n][j] = side_sign * (g.wealth[n][j] - BT);
    }

    bool beta = regime == market::Regime::BetaMeasure;
    for (std::size_t i = n; i-- > 0;) {
        double t = lat.time(i);
        double a_own = env.endow_account(x, t);
        double r_own = env.endow_rate(x);
        double a_next = env.endow_account(x, lat.time(i + 1));
        for (std::size_t j = 0; j <= i; ++j) {
            double s = lat.node(i, j);
            double wu = g.wealth[i + 1][j + 1], wd = g.wealth[i + 1][j];
            double m_w = 0.5 * (wu + wd);
            double z_w = (wu - wd) / (2.0 * lat.sqrt_dt());
            double m_p = side_sign * (m_w - a_next);
            double zeta = side_sign * z_w / sigma_bar;  // price-level dollar delta

            double C;
            if (ms.q) {
                C = side_sign > 0
                        ? (*ms.q)(-m_p)
                        : (*ms.q)(-0.5 * ((*hedger_price)[i + 1][j + 1] +
                                          (*hedger_price)[i + 1][j]));
            } else if (ms.exo) {
                C = (*ms.exo)(t, s);
            } else {
                C = 0.5 * ((*ms.fed)[i + 1][j + 1] + (*ms.fed)[i + 1][j]);
            }

            double F, psi;
            if (env.single_rate) {
                double rr = env.req.r_mid;
                double fund = env.pn ? -r.r_ib_at(0) * pos(zeta) + rr * neg(zeta) : 0.0;
                F = (r.r_l - rr) * zeta + fund - r.r_c * C + rr * (m_p + C);
                psi = m_p + C + (env.pn ? neg(zeta) : -zeta);
            } else if (side_sign > 0) {
                double carry = beta ? r.beta_at(0) * zeta : r.r_l * zeta;
                double fund = env.pn ? -r.r_ib_at(0) * pos(zeta) : 0.0;
                psi = m_p + C + a_own + (env.pn ? neg(zeta) : -zeta);
                F = carry + fund - r_own * a_own - r.r_c * C + r.r_l * pos(psi) -
                    r.r_b * neg(psi);
            } else {
                double carry = beta ? r.beta_at(0) * zeta : r.r_l * zeta;
                double fund = env.pn ? r.r_ib_at(0) * neg(zeta) : 0.0;
                psi = -m_p - C + a_own + (env.pn ? pos(zeta) : zeta);
                F = carry + fund + r_own * a_own - r.r_c * C - r.r_l * pos(psi) +
                    r.r_b * neg(psi);
            }

            double p = m_p - F * dt - flows.fee(i, s) - flows.jump(i, s);
            g.price[i][j] = p;
            g.wealth[i][j] = side_sign > 0 ? p + a_own : a_own - p;
            g.xi[i][j] = side_sign * zeta / s;
            g.cash[i][j] = psi;
            g.funded[i][j] = env.pn ? pos(zeta) : 0.0;
            g.coll[i][j] = C;
        }
    }
    return pack(std::move(g), 0.0);
}

Lattice make_lattice(const PricingRequest& req, market::Regime regime) {
    lattice::LatticeConfig cfg;
    cfg.n_steps = req.n_steps;
    cfg.horizon = req.contract.maturity;
    cfg.measure = market::make_measure(regime, req.asset, req.rates);
    return lattice::build(req.asset, req.rates, cfg);
}

}  // namespace

ReplicationResult replicate(const PricingRequest& req, Side side, AccrualMode mode) {
    if (std::holds_alternative<contracts::Negotiated>(req.collateral)) {
        auto both = replicate_pair(req, mode);
        return side == Side::Hedger ? std::move(both.first) : std::move(both.second);
    }

    pricing::RegimeSelection sel = pricing::select_regime(req);
    Lattice lat = make_lattice(req, sel.regime);
    FlowSchedule flows = contracts::cash_flow_increments(req.contract, lat.times());
    Env env(req, lat);

    const auto* hq = std::get_if<contracts::HedgerQ>(&req.collateral);
    const auto* exo = std::get_if<contracts::Exogenous>(&req.collateral);

    MarginSource ms_h;
    if (hq)
        ms_h.q = &hq->q;
    else
        ms_h.exo = exo;

    double x_h = env.single_rate ? 0.0 : req.x1;
    ReplicationResult hedger =
        mode == AccrualMode::Exact
            ? exact_pass(env, flows, +1.0, x_h, ms_h)
            : matched_pass(env, flows, +1.0, x_h, ms_h, nullptr, sel.regime);
    if (side == Side::Hedger || env.single_rate) return hedger;

    MarginSource ms_c;
    std::vector<std::vector<double>> fed;
    if (!hq) {
        ms_c.exo = exo;
    } else if (mode == AccrualMode::Exact) {
        // margin over step i is q(-P^h) at the post-flow hedger price
        fed.resize(hedger.price.size());
        for (std::size_t i = 0; i < fed.size(); ++i) {
            fed[i].resize(hedger.price[i].size());
            for (std::size_t j = 0; j < fed[i].size(); ++j)
                fed[i][j] =
                    hq->q(-(hedger.price[i][j] + flows.jump(i, lat.node(i, j))));
        }
        ms_c.fed = &fed;
    } else {
        ms_c.q = &hq->q;
    }

    return mode == AccrualMode::Exact
               ? exact_pass(env, flows, -1.0, req.x2, ms_c)
               : matched_pass(env, flows, -1.0, req.x2, ms_c, &hedger.price,
                              sel.regime);
}

std::pair<ReplicationResult, ReplicationResult> replicate_pair(
    const PricingRequest& req, AccrualMode mode) {
    const auto* ng = std::get_if<contracts::Negotiated>(&req.collateral);
    if (!ng)
        throw std::invalid_argument("replicate_pair: negotiated collateral required");

    pricing::RegimeSelection sel = pricing::select_regime(req);
    Lattice lat = make_lattice(req, sel.regime);
    FlowSchedule flows = contracts::cash_flow_increments(req.contract, lat.times());
    Env env(req, lat);
    const auto& r = req.rates;
    std::size_t n = lat.n_steps();
    double dt = lat.dt();
    double theta = lat.div_factor();
    double sigma_bar = req.asset.sigma_bar;
    bool beta = sel.regime == market::Regime::BetaMeasure;

    Grids gh, gc;
    gh.init(n);
    gc.init(n);

    double BhT = env.endow_account(req.x1, lat.horizon());
    double BcT = env.endow_account(req.x2, lat.horizon());
    for (std::size_t j = 0; j <= n; ++j) {
        double jump = flows.jump(n, lat.node(n, j));
        gh.wealth[n][j] = BhT - jump;
        gc.wealth[n][j] = BcT + jump;
        gh.price[n][j] = gh.wealth[n][j] - BhT;
        gc.price[n][j] = BcT - gc.wealth[n][j];
    }

    double max_resid = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        double t = lat.time(i);
        double a_h = env.endow_account(req.x1, t);
        double a_c = env.endow_account(req.x2, t);
        double r_own_c = env.endow_rate(req.x2);
        double a_h_next = env.endow_account(req.x1, lat.time(i + 1));
        double a_c_next = env.endow_account(req.x2, lat.time(i + 1));
        for (std::size_t j = 0; j <= i; ++j) {
            double s = lat.node(i, j);
            double su = lat.node(i + 1, j + 1), sd = lat.node(i + 1, j);
            double fee = flows.fee(i, s);
            double jump = flows.jump(i, s);
            double whu = gh.wealth[i + 1][j + 1], whd = gh.wealth[i + 1][j];
            double wcu = gc.wealth[i + 1][j + 1], wcd = gc.wealth[i + 1][j];

            if (mode == AccrualMode::Matched) {
                double m1 = 0.5 * (whu + whd) - a_h_next;
                double m2 = a_c_next - 0.5 * (wcu + wcd);
                double z1 = (whu - whd) / (2.0 * lat.sqrt_dt()) / sigma_bar;
                double z2 = -(wcu - wcd) / (2.0 * lat.sqrt_dt()) / sigma_bar;
                double C = (*ng)(-m1, -m2);

                double carry1 = beta ? r.beta_at(0) * z1 : r.r_l * z1;
                double fund1 = env.pn ? -r.r_ib_at(0) * pos(z1) : 0.0;
                double psi1 = m1 + C + a_h + (env.pn ? neg(z1) : -z1);
                double F1 = carry1 + fund1 - r.r_l * a_h - r.r_c * C +
                            r.r_l * pos(psi1) - r.r_b * neg(psi1);

                double carry2 = beta ? r.beta_at(0) * z2 : r.r_l * z2;
                double fund2 = env.pn ? r.r_ib_at(0) * neg(z2) : 0.0;
                double psi2 = -m2 - C + a_c + (env.pn ? pos(z2) : z2);
                double F2 = carry2 + fund2 + r_own_c * a_c - r.r_c * C -
                            r.r_l * pos(psi2) + r.r_b * neg(psi2);

                double p1 = m1 - F1 * dt - fee - jump;
                double p2 = m2 - F2 * dt - fee - jump;
                gh.price[i][j] = p1;
                gc.price[i][j] = p2;
                gh.wealth[i][j] = p1 + a_h;
                gc.wealth[i][j] = a_c - p2;
                gh.xi[i][j] = z1 / s;
                gc.xi[i][j] = -z2 / s;
                gh.coll[i][j] = C;
                gc.coll[i][j] = C;
                gh.cash[i][j] = psi1;
                gc.cash[i][j] = psi2;
                gh.funded[i][j] = env.pn ? pos(z1) : 0.0;
                gc.funded[i][j] = env.pn ? pos(z2) : 0.0;
                continue;
            }

            // Exact accrual: joint piecewise-linear system in (V_h, V_c).
            double xih = (whu - whd) / ((1.0 + theta) * (su - sd));
            double xic = (wcu - wcd) / ((1.0 + theta) * (su - sd));
            double Rh = whu - xih * (1.0 + theta) * su - fee;
            double Rc = wcu - xic * (1.0 + theta) * su + fee;

            double xsh = xih * s, xsc = xic * s;
            double shift_h = env.pn ? neg(xsh) : -xsh;
            double shift_c = env.pn ? neg(xsc) : -xsc;
            double fund_h = env.pn ? pos(xsh) * env.gib : 0.0;
            double fund_c = env.pn ? pos(xsc) * env.gib : 0.0;

            // Margin amount as an affine function of (V_h, V_c) on the piece
            // containing the current iterate: C = c0 + ca V_h + cb V_c with
            // arguments -P^h = a_h - V_h and -P^c = V_c - a_c.
            auto chat_coeffs = [&](double vh, double vc, double& c0, double& ca,
                                   double& cb) {
                if (ng->form == contracts::Negotiated::Form::ConvexWeight) {
                    c0 = ng->alpha * a_h - (1.0 - ng->alpha) * a_c;
                    ca = -ng->alpha;
                    cb = 1.0 - ng->alpha;
                } else {
                    double u1 = a_h - vh, u2 = vc - a_c;
                    double s1 = ng->q1.slope_right_of(u1);
                    double s2 = ng->q2.slope_right_of(u2);
                    c0 = (ng->q1(u1) - s1 * u1) + s1 * a_h + (ng->q2(u2) - s2 * u2) -
                         s2 * a_c;
                    ca = -s1;
                    cb = s2;
                }
            };

            double Vh = whu - 0.0, Vc = wcu - 0.0;  // seeds
            bool solved = false;
            double best_violation = std::numeric_limits<double>::infinity();
            double bVh = Vh, bVc = Vc;
            for (int sh = 0; sh < 2 && !solved; ++sh) {
                for (int sc = 0; sc < 2 && !solved; ++sc) {
                    double eh = sh == 0 ? env.gl : env.gb;
                    double ecg = sc == 0 ? env.gl : env.gb;
                    double vh_it = Vh, vc_it = Vc;
                    for (int iter = 0; iter < 6; ++iter) {
                        double c0, ca, cb;
                        chat_coeffs(vh_it, vc_it, c0, ca, cb);
                        double m11 = eh * (1.0 + ca) - env.gc * ca;
                        double m12 = (eh - env.gc) * cb;
                        double m21 = -(ecg - env.gc) * ca;
                        double m22 = ecg * (1.0 - cb) + env.gc * cb;
                        double b1 = Rh + fund_h - eh * shift_h - (eh - env.gc) * c0;
                        double b2 = Rc + fund_c - ecg * shift_c + (ecg - env.gc) * c0;
                        double det = m11 * m22 - m12 * m21;
                        if (std::fabs(det) < 1e-14) break;
                        double vh = (b1 * m22 - m12 * b2) / det;
                        double vc = (m11 * b2 - m21 * b1) / det;
                        double c0n, can, cbn;
                        chat_coeffs(vh, vc, c0n, can, cbn);
                        bool same_piece = c0n == c0 && can == ca && cbn == cb;
                        if (!same_piece) {
                            vh_it = vh;
                            vc_it = vc;
                            continue;
                        }
                        double C = c0n + can * vh + cbn * vc;
                        double ph = vh + C + shift_h;
                        double pc = vc - C + shift_c;
                        double viol = (sh == 0 ? pos(-ph) : pos(ph)) +
                                      (sc == 0 ? pos(-pc) : pos(pc));
                        if (viol <= 1e-9 * (1.0 + std::fabs(vh) + std::fabs(vc))) {
                            Vh = vh;
                            Vc = vc;
                            solved = true;
                        } else if (viol < best_violation) {
                            best_violation = viol;
                            bVh = vh;
                            bVc = vc;
                        }
                        break;
                    }
                }
            }
            if (!solved) {
                if (!std::isfinite(best_violation))
                    throw std::runtime_error("oracle: coupled wealth system unsolved");
                Vh = bVh;
                Vc = bVc;
            }

            double c0, ca, cb;
            chat_coeffs(Vh, Vc, c0, ca, cb);
            double C = c0 + ca * Vh + cb * Vc;
            double psih = Vh + C + shift_h;
            double psic = Vc - C + shift_c;
            double carryh = env.grow(psih) - env.gc * C - fund_h + fee;
            double carryc = env.grow(psic) + env.gc * C - fund_c - fee;
            max_resid = std::max(
                {max_resid, std::fabs(xih * (1.0 + theta) * su + carryh - whu),
                 std::fabs(xih * (1.0 + theta) * sd + carryh - whd),
                 std::fabs(xic * (1.0 + theta) * su + carryc - wcu),
                 std::fabs(xic * (1.0 + theta) * sd + carryc - wcd)});

            gh.wealth[i][j] = Vh - jump;
            gc.wealth[i][j] = Vc + jump;
            gh.price[i][j] = gh.wealth[i][j] - a_h;
            gc.price[i][j] = a_c - gc.wealth[i][j];
            gh.xi[i][j] = xih;
            gc.xi[i][j] = xic;
            gh.cash[i][j] = psih;
            gc.cash[i][j] = psic;
            gh.funded[i][j] = env.pn ? pos(xsh) : 0.0;
            gc.funded[i][j] = env.pn ? pos(xsc) : 0.0;
            gh.coll[i][j] = C;
            gc.coll[i][j] = C;
        }
    }

    ReplicationResult rh = pack(std::move(gh), max_resid);
    ReplicationResult rc = pack(std::move(gc), max_resid);
    return {std::move(rh), std::move(rc)};
}

}  // namespace bilat::oracle
