#include "bilat/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace bilat::generators {

namespace {

inline double pos(double v) { return v > 0.0 ? v : 0.0; }
inline double neg(double v) { return v < 0.0 ? -v : 0.0; }

struct Ctx {
    const GeneratorSpec& spec;
    const DriverPoint& p;
    double Bl, Bb, inv_Bl, inv_Bb;

    Ctx(const GeneratorSpec& s, const DriverPoint& pt) : spec(s), p(pt) {
        Bl = market::account_value(s.rates.r_l, pt.t);
        Bb = market::account_value(s.rates.r_b, pt.t);
        inv_Bl = 1.0 / Bl;
        inv_Bb = 1.0 / Bb;
    }

    double sum_zs(const std::vector<double>& z) const {
        double v = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) v += z[i] * p.s[i];
        return v;
    }
    double sum_z_beta_s(const std::vector<double>& z) const {
        double v = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            v += z[i] * spec.rates.beta_at(i) * p.s[i];
        return v;
    }
    double sum_funding(const std::vector<double>& z) const {  // sum r_ib (z S)^+
        double v = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            v += spec.rates.r_ib_at(i) * pos(z[i] * p.s[i]);
        return v;
    }
    double sum_short(const std::vector<double>& z) const {  // sum (z S)^-
        double v = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) v += neg(z[i] * p.s[i]);
        return v;
    }
    std::vector<double> negated(const std::vector<double>& z) const {
        std::vector<double> r(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) r[i] = -z[i];
        return r;
    }

    double q(double y) const { return contracts::eval_q(spec.collateral, y); }
    double chat(double y1, double y2) const {
        return contracts::eval_negotiated(spec.collateral, y1, y2);
    }
};

void check_shape(const GeneratorSpec& spec, const DriverPoint& p) {
    if (p.s.size() != static_cast<std::size_t>(spec.d) ||
        p.z1.size() != static_cast<std::size_t>(spec.d))
        throw std::invalid_argument("eval: point shape does not match asset count");
    if (is_pair_family(spec.family) && p.z2.size() != static_cast<std::size_t>(spec.d))
        throw std::invalid_argument("eval: pair family needs z2 of length d");
    for (double s : p.s)
        if (!(s > 0.0)) throw std::invalid_argument("eval: asset prices must be > 0");
    if (is_pair_family(spec.family)) {
        if (!std::holds_alternative<contracts::Negotiated>(spec.collateral))
            throw std::invalid_argument("eval: coupled family needs negotiated collateral");
    } else {
        switch (spec.family) {
            case Family::BergmanHedgerLending:
            case Family::BergmanCptyLending:
            case Family::BergmanHedgerBeta:
            case Family::BergmanCptyBeta:
            case Family::PnHedgerLending:
            case Family::PnCptyLending:
            case Family::PnHedgerBeta:
            case Family::PnCptyBeta:
            case Family::SingleRate:
            case Family::PnSingleRate:
                if (!std::holds_alternative<contracts::HedgerQ>(spec.collateral))
                    throw std::invalid_argument("eval: family needs a hedger map q");
                break;
            default:
                break;  // wealth families never read the convention
        }
    }
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::BergmanHedgerLending: return "bergman_hedger_lending";
        case Family::BergmanCptyLending: return "bergman_cpty_lending";
        case Family::BergmanHedgerBeta: return "bergman_hedger_beta";
        case Family::BergmanCptyBeta: return "bergman_cpty_beta";
        case Family::BergmanWealthLending: return "bergman_wealth_lending";
        case Family::BergmanWealthBorrowing: return "bergman_wealth_borrowing";
        case Family::BergmanWealthHedgerBeta: return "bergman_wealth_hedger_beta";
        case Family::BergmanWealthCptyBeta: return "bergman_wealth_cpty_beta";
        case Family::SingleRate: return "single_rate";
        case Family::PnSingleRate: return "pn_single_rate";
        case Family::PnHedgerLending: return "pn_hedger_lending";
        case Family::PnCptyLending: return "pn_cpty_lending";
        case Family::PnHedgerBeta: return "pn_hedger_beta";
        case Family::PnCptyBeta: return "pn_cpty_beta";
        case Family::PnWealthLending: return "pn_wealth_lending";
        case Family::PnWealthBorrowing: return "pn_wealth_borrowing";
        case Family::CoupledBergmanLending: return "coupled_bergman_lending";
        case Family::CoupledBergmanBeta: return "coupled_bergman_beta";
        case Family::CoupledPnLending: return "coupled_pn_lending";
        case Family::CoupledPnBeta: return "coupled_pn_beta";
    }
    return "?";
}

bool is_pair_family(Family f) {
    return f == Family::CoupledBergmanLending || f == Family::CoupledBergmanBeta ||
           f == Family::CoupledPnLending || f == Family::CoupledPnBeta;
}

bool is_beta_family(Family f) {
    return f == Family::BergmanHedgerBeta || f == Family::BergmanCptyBeta ||
           f == Family::BergmanWealthHedgerBeta || f == Family::BergmanWealthCptyBeta ||
           f == Family::PnHedgerBeta || f == Family::PnCptyBeta ||
           f == Family::CoupledBergmanBeta || f == Family::CoupledPnBeta;
}

bool is_cpty_family(Family f) {
    return f == Family::BergmanCptyLending || f == Family::BergmanCptyBeta ||
           f == Family::PnCptyLending || f == Family::PnCptyBeta;
}

bool is_pn_family(Family f) {
    switch (f) {
        case Family::PnSingleRate:
        case Family::PnHedgerLending:
        case Family::PnCptyLending:
        case Family::PnHedgerBeta:
        case Family::PnCptyBeta:
        case Family::PnWealthLending:
        case Family::PnWealthBorrowing:
        case Family::CoupledPnLending:
        case Family::CoupledPnBeta:
            return true;
        default:
            return false;
    }
}

void GeneratorSpec::validate() const {
    rates.validate();
    if (d < 1) throw std::invalid_argument("GeneratorSpec: d must be >= 1");
    if (family == Family::SingleRate || family == Family::PnSingleRate) {
        if (!(rates.r_l <= r_mid && r_mid <= rates.r_b))
            throw std::invalid_argument("GeneratorSpec: r_mid must lie in [r_l, r_b]");
    }
    if (is_beta_family(family)) {
        for (int i = 0; i < d; ++i) {
            double b = rates.beta_at(static_cast<std::size_t>(i));
            if (b < rates.r_b)
                throw std::invalid_argument("GeneratorSpec: beta regime needs r_b <= beta");
            if (is_pn_family(family) &&
                b > rates.r_ib_at(static_cast<std::size_t>(i)))
                throw std::invalid_argument(
                    "GeneratorSpec: partial-netting beta regime needs beta <= r_ib");
        }
    }
}

DriverValue eval(const GeneratorSpec& spec, const DriverPoint& p) {
    check_shape(spec, p);
    Ctx c(spec, p);
    const auto& r = spec.rates;
    DriverValue out;

    switch (spec.family) {
        case Family::BergmanHedgerLending: {
            double zsd = c.inv_Bl * c.sum_zs(p.z1);
            double qv = c.q(-p.y1);
            double br = p.y1 + qv + spec.x1 * c.Bl - zsd;
            out.g1 = r.r_l * zsd - spec.x1 * c.Bl * r.r_l - r.r_c * qv +
                     r.r_l * pos(br) - r.r_b * neg(br);
            break;
        }
        case Family::BergmanCptyLending: {
            double zsd = c.inv_Bl * c.sum_zs(p.z1);
            double qv = c.q(-p.y1_external);
            double br = -p.y1 - qv + spec.x2 * c.Bl + zsd;
            out.g1 = r.r_l * zsd + spec.x2 * c.Bl * r.r_l - r.r_c * qv -
                     r.r_l * pos(br) + r.r_b * neg(br);
            break;
        }
        case Family::BergmanHedgerBeta: {
            double zs = c.sum_zs(p.z1);
            double qv = c.q(-p.y1);
            double br = p.y1 + qv + spec.x1 * c.Bl - zs;
            out.g1 = c.sum_z_beta_s(p.z1) - spec.x1 * r.r_l * c.Bl - r.r_c * qv +
                     r.r_l * pos(br) - r.r_b * neg(br);
            break;
        }
        case Family::BergmanCptyBeta: {
            double zs = c.sum_zs(p.z1);
            double qv = c.q(-p.y1_external);
            double br = -p.y1 - qv + spec.x2 * c.Bb + zs;
            out.g1 = c.sum_z_beta_s(p.z1) + spec.x2 * r.r_b * c.Bb - r.r_c * qv -
                     r.r_l * pos(br) + r.r_b * neg(br);
            break;
        }
        case Family::BergmanWealthLending: {
            double zs = c.sum_zs(p.z1);
            double br = p.y1 * c.Bl - zs;
            out.g1 = r.r_l * c.inv_Bl * zs +
                     c.inv_Bl * (r.r_l * pos(br) - r.r_b * neg(br)) - r.r_l * p.y1;
            break;
        }
        case Family::BergmanWealthBorrowing: {
            double zs = c.sum_zs(p.z1);
            double br = p.y1 * c.Bb - zs;
            out.g1 = r.r_b * c.inv_Bb * zs +
                     c.inv_Bb * (r.r_l * pos(br) - r.r_b * neg(br)) - r.r_b * p.y1;
            break;
        }
        case Family::BergmanWealthHedgerBeta: {
            double zs = c.sum_zs(p.z1);
            double br = p.y1 + spec.x1 * c.Bl - zs;
            out.g1 = c.sum_z_beta_s(p.z1) - spec.x1 * r.r_l * c.Bl + r.r_l * pos(br) -
                     r.r_b * neg(br);
            break;
        }
        case Family::BergmanWealthCptyBeta: {
            double zs = c.sum_zs(p.z1);
            double br = -p.y1 + spec.x2 * c.Bb + zs;
            out.g1 = c.sum_z_beta_s(p.z1) + spec.x2 * r.r_b * c.Bb - r.r_l * pos(br) +
                     r.r_b * neg(br);
            break;
        }
        case Family::SingleRate: {
            double zsd = c.inv_Bl * c.sum_zs(p.z1);
            double qv = c.q(-p.y1);
            out.g1 = (r.r_l - spec.r_mid) * zsd - r.r_c * qv +
                     spec.r_mid * (p.y1 + qv);
            break;
        }
        case Family::PnSingleRate: {
            double zsd = c.inv_Bl * c.sum_zs(p.z1);
            double qv = c.q(-p.y1);
            out.g1 = r.r_l * zsd - c.inv_Bl * c.sum_funding(p.z1) +
                     spec.r_mid * c.inv_Bl * c.sum_short(p.z1) - r.r_c * qv +
                     spec.r_mid * (p.y1 + qv);
            break;
        }
        case Family::PnHedgerLending: {
            double zsd = c.inv_Bl * c.sum_zs(p.z1);
            double qv = c.q(-p.y1);
            double br = p.y1 + qv + spec.x1 * c.Bl + c.inv_Bl * c.sum_short(p.z1);
            out.g1 = r.r_l * zsd - c.inv_Bl * c.sum_funding(p.z1) -
                     spec.x1 * c.Bl * r.r_l - r.r_c * qv + r.r_l * pos(br) -
                     r.r_b * neg(br);
            break;
        }
        case Family::PnCptyLending: {
            double zsd = c.inv_Bl * c.sum_zs(p.z1);
            double qv = c.q(-p.y1_external);
            auto mz = c.negated(p.z1);
            double br = -p.y1 - qv + spec.x2 * c.Bl + c.inv_Bl * c.sum_short(mz);
            out.g1 = r.r_l * zsd + c.inv_Bl * c.sum_funding(mz) +
                     spec.x2 * c.Bl * r.r_l - r.r_c * qv - r.r_l * pos(br) +
                     r.r_b * neg(br);
            break;
        }
        case Family::PnHedgerBeta: {
            double qv = c.q(-p.y1);
            double br = p.y1 + qv + spec.x1 * c.Bl + c.sum_short(p.z1);
            out.g1 = c.sum_z_beta_s(p.z1) - c.sum_funding(p.z1) -
                     spec.x1 * r.r_l * c.Bl - r.r_c * qv + r.r_l * pos(br) -
                     r.r_b * neg(br);
            break;
        }
        case Family::PnCptyBeta: {
            double qv = c.q(-p.y1_external);
            auto mz = c.negated(p.z1);
            double br = -p.y1 - qv + spec.x2 * c.Bb + c.sum_short(mz);
            out.g1 = c.sum_z_beta_s(p.z1) + c.sum_funding(mz) +
                     spec.x2 * r.r_b * c.Bb - r.r_c * qv - r.r_l * pos(br) +
                     r.r_b * neg(br);
            break;
        }
        case Family::PnWealthLending: {
            double zs = c.sum_zs(p.z1);
            double br = p.y1 * c.Bl + c.sum_short(p.z1);
            out.g1 = c.inv_Bl * (r.r_l * zs - c.sum_funding(p.z1)) - r.r_l * p.y1 +
                     c.inv_Bl * (r.r_l * pos(br) - r.r_b * neg(br));
            break;
        }
        case Family::PnWealthBorrowing: {
            double zs = c.sum_zs(p.z1);
            double br = p.y1 * c.Bb + c.sum_short(p.z1);
            out.g1 = c.inv_Bb * (r.r_b * zs - c.sum_funding(p.z1)) - r.r_b * p.y1 +
                     c.inv_Bb * (r.r_l * pos(br) - r.r_b * neg(br));
            break;
        }
        case Family::CoupledBergmanLending: {
            double ch = c.chat(-p.y1, -p.y2);
            double zsd1 = c.inv_Bl * c.sum_zs(p.z1);
            double br1 = p.y1 + ch + spec.x1 * c.Bl - zsd1;
            out.g1 = r.r_l * zsd1 - spec.x1 * c.Bl * r.r_l - r.r_c * ch +
                     r.r_l * pos(br1) - r.r_b * neg(br1);
            double zsd2 = c.inv_Bl * c.sum_zs(p.z2);
            double br2 = -p.y2 - ch + spec.x2 * c.Bl + zsd2;
            out.g2 = r.r_l * zsd2 + spec.x2 * c.Bl * r.r_l - r.r_c * ch -
                     r.r_l * pos(br2) + r.r_b * neg(br2);
            break;
        }
        case Family::CoupledBergmanBeta: {
            double ch = c.chat(-p.y1, -p.y2);
            double zs1 = c.sum_zs(p.z1);
            double br1 = p.y1 + ch + spec.x1 * c.Bl - zs1;
            out.g1 = c.sum_z_beta_s(p.z1) - spec.x1 * c.Bl * r.r_l - r.r_c * ch +
                     r.r_l * pos(br1) - r.r_b * neg(br1);
            double zs2 = c.sum_zs(p.z2);
            double br2 = -p.y2 - ch + spec.x2 * c.Bb + zs2;
            out.g2 = c.sum_z_beta_s(p.z2) + spec.x2 * c.Bb * r.r_b - r.r_c * ch -
                     r.r_l * pos(br2) + r.r_b * neg(br2);
            break;
        }
        case Family::CoupledPnLending: {
            double ch = c.chat(-p.y1, -p.y2);
            double zsd1 = c.inv_Bl * c.sum_zs(p.z1);
            double br1 = p.y1 + ch + spec.x1 * c.Bl + c.inv_Bl * c.sum_short(p.z1);
            out.g1 = r.r_l * zsd1 - c.inv_Bl * c.sum_funding(p.z1) -
                     spec.x1 * c.Bl * r.r_l - r.r_c * ch + r.r_l * pos(br1) -
                     r.r_b * neg(br1);
            auto mz2 = c.negated(p.z2);
            double zsd2 = c.inv_Bl * c.sum_zs(p.z2);
            double br2 = -p.y2 - ch + spec.x2 * c.Bl + c.inv_Bl * c.sum_short(mz2);
            out.g2 = r.r_l * zsd2 + c.inv_Bl * c.sum_funding(mz2) +
                     spec.x2 * c.Bl * r.r_l - r.r_c * ch - r.r_l * pos(br2) +
                     r.r_b * neg(br2);
            break;
        }
        case Family::CoupledPnBeta: {
            double ch = c.chat(-p.y1, -p.y2);
            double br1 = p.y1 + ch + spec.x1 * c.Bl + c.sum_short(p.z1);
            out.g1 = c.sum_z_beta_s(p.z1) - c.sum_funding(p.z1) -
                     spec.x1 * c.Bl * r.r_l - r.r_c * ch + r.r_l * pos(br1) -
                     r.r_b * neg(br1);
            auto mz2 = c.negated(p.z2);
            double br2 = -p.y2 - ch + spec.x2 * c.Bb + c.sum_short(mz2);
            out.g2 = c.sum_z_beta_s(p.z2) + c.sum_funding(mz2) +
                     spec.x2 * c.Bb * r.r_b - r.r_c * ch - r.r_l * pos(br2) +
                     r.r_b * neg(br2);
            break;
        }
    }
    return out;
}

GapResult eval_gap(const GeneratorSpec& g_side, const GeneratorSpec& f_side,
                   const DriverPoint& p) {
    if (is_pn_family(g_side.family) != is_pn_family(f_side.family) ||
        is_beta_family(g_side.family) != is_beta_family(f_side.family) ||
        !is_cpty_family(g_side.family) || is_cpty_family(f_side.family))
        throw std::invalid_argument("eval_gap: incompatible family pair");

    DriverPoint pf = p;
    DriverPoint pg = p;
    pg.y1_external = p.y1;  // the g-side sees the f-side solution

    GapResult res;
    res.gap = eval(g_side, pg).g1 - eval(f_side, pf).g1;

    const auto& r = f_side.rates;
    double Bl = market::account_value(r.r_l, p.t);
    double Bb = market::account_value(r.r_b, p.t);
    double abs_zs = 0.0, rib_minus_rb = 0.0, rib_minus_rl = 0.0;
    for (std::size_t i = 0; i < p.z1.size(); ++i) {
        double a = std::fabs(p.z1[i] * p.s[i]);
        abs_zs += a;
        rib_minus_rb += (r.r_ib_at(i) - r.r_b) * a;
        rib_minus_rl += (r.r_ib_at(i) - r.r_l) * a;
    }
    (void)abs_zs;

    bool beta = is_beta_family(f_side.family);
    bool pn = is_pn_family(f_side.family);
    if (!beta) {
        res.lower_bound = pn ? (1.0 / Bl) * rib_minus_rl : 0.0;
    } else if (!pn) {
        res.lower_bound = std::max(-(r.r_b - r.r_l) * f_side.x1 * Bl,
                                   (r.r_b - r.r_l) * g_side.x2 * Bb);
    } else {
        res.lower_bound =
            std::max(-(r.r_b - r.r_l) * f_side.x1 * Bl + rib_minus_rb,
                     (r.r_b - r.r_l) * g_side.x2 * Bb + rib_minus_rl);
    }
    return res;
}

double homogeneity_identity_check(const GeneratorSpec& spec, const DriverPoint& p,
                                  double lambda) {
    switch (spec.family) {
        case Family::BergmanHedgerBeta:
        case Family::BergmanCptyBeta:
        case Family::PnHedgerBeta:
        case Family::PnCptyBeta:
            break;
        default:
            throw std::invalid_argument(
                "homogeneity_identity_check: beta-measure price families only");
    }
    if (lambda < 0.0)
        throw std::invalid_argument("homogeneity_identity_check: lambda must be >= 0");

    GeneratorSpec scaled = spec;
    scaled.x1 = lambda * spec.x1;
    scaled.x2 = lambda * spec.x2;

    if (lambda == 0.0) {
        DriverPoint origin = p;
        origin.y1 = 0.0;
        origin.y1_external = 0.0;
        for (double& z : origin.z1) z = 0.0;
        return eval(scaled, origin).g1;
    }

    DriverPoint shrunk = p;
    shrunk.y1 = p.y1 / lambda;
    shrunk.y1_external = p.y1_external / lambda;
    for (double& z : shrunk.z1) z /= lambda;
    return lambda * eval(spec, shrunk).g1 - eval(scaled, p).g1;
}

double lipschitz_bound(const GeneratorSpec& spec, double s_max, double horizon) {
    const auto& r = spec.rates;
    double q_slope = 1.0;
    if (const auto* h = std::get_if<contracts::HedgerQ>(&spec.collateral))
        q_slope = h->q.max_abs_slope();
    else if (const auto* n = std::get_if<contracts::Negotiated>(&spec.collateral))
        q_slope = n->max_abs_slope();

    double rib_max = r.r_b;
    for (int i = 0; i < spec.d; ++i)
        rib_max = std::max(rib_max, r.r_ib_at(static_cast<std::size_t>(i)));
    double beta_max = 0.0;
    for (double b : r.beta) beta_max = std::max(beta_max, std::fabs(b));
    double rate_max = std::max({r.r_l, r.r_b, r.r_c, rib_max, beta_max,
                                std::fabs(spec.r_mid)});

    // y-slope: the collateral enters the bracket and the r_c term; z-slope:
    // every z appears through z*S, never discounted by more than 1.
    double ly = rate_max * (2.0 + 2.0 * q_slope);
    double lz = s_max * rate_max * 4.0 * static_cast<double>(spec.d);
    (void)horizon;
    return ly + lz;
}

}  // namespace bilat::generators
