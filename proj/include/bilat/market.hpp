#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bilat::market {

// Funding and collateral rates, all constant per year. Account values are
// closed-form exponentials, so Novikov-type conditions are automatic.
struct RateEnvironment {
    double r_l = 0.0;             // cash lending rate
    double r_b = 0.0;             // cash borrowing rate
    double r_c = 0.0;             // collateral (margin) rate
    std::vector<double> r_ib;     // per-asset funding rates (partial netting)
    std::vector<double> beta;     // per-asset auxiliary drifts (beta measure)

    RateEnvironment() = default;
    RateEnvironment(double rl, double rb, double rc,
                    std::vector<double> rib = {}, std::vector<double> b = {})
        : r_l(rl), r_b(rb), r_c(rc), r_ib(std::move(rib)), beta(std::move(b)) {
        validate();
    }

    void validate() const {
        if (!(0.0 <= r_l && r_l <= r_b))
            throw std::invalid_argument("RateEnvironment: need 0 <= r_l <= r_b");
        for (double r : r_ib)
            if (r < r_l)
                throw std::invalid_argument("RateEnvironment: need r_l <= r_ib[i]");
    }

    double r_ib_at(std::size_t i) const {
        return i < r_ib.size() ? r_ib[i] : r_b;
    }
    double beta_at(std::size_t i) const {
        if (i >= beta.size())
            throw std::invalid_argument("RateEnvironment: beta[" + std::to_string(i) +
                                        "] not set");
        return beta[i];
    }
};

// Geometric Brownian motion with a proportional dividend yield:
// mu(t,s) = mu_bar s, sigma(t,s) = sigma_bar s, kappa(t,s) = kappa_bar s.
struct AssetDynamics {
    double s0 = 100.0;
    double mu_bar = 0.0;
    double sigma_bar = 0.2;
    double kappa_bar = 0.0;

    AssetDynamics() = default;
    AssetDynamics(double s0_, double mu, double sigma, double kappa = 0.0)
        : s0(s0_), mu_bar(mu), sigma_bar(sigma), kappa_bar(kappa) {
        validate();
    }

    void validate() const {
        if (!(s0 > 0.0)) throw std::invalid_argument("AssetDynamics: s0 must be > 0");
        if (!(sigma_bar > 0.0))
            throw std::invalid_argument("AssetDynamics: sigma_bar must be > 0");
        if (kappa_bar < 0.0)
            throw std::invalid_argument("AssetDynamics: kappa_bar must be >= 0");
    }

    double sigma(double, double s) const { return sigma_bar * s; }
};

enum class Regime { LendingMeasure, BetaMeasure };

// Measure choice plus the proportional asset drift it implies.
struct MeasureSelection {
    Regime regime = Regime::LendingMeasure;
    double drift = 0.0;  // per-year proportional drift of S under the measure
};

// Growth factor of an account with constant rate: B_t = exp(r t), B_0 = 1.
inline double account_value(double rate, double t) {
    if (t < 0.0) throw std::invalid_argument("account_value: negative time");
    return std::exp(rate * t);
}

// Proportional drift of S under the selected martingale measure. The
// discounted (lending) or beta-adjusted cum-dividend asset built from this
// drift is a martingale on the lattice.
inline double driver_asset_drift(const AssetDynamics& asset,
                                 const RateEnvironment& rates,
                                 const MeasureSelection& m) {
    switch (m.regime) {
        case Regime::LendingMeasure: return rates.r_l - asset.kappa_bar;
        case Regime::BetaMeasure: return rates.beta_at(0) - asset.kappa_bar;
    }
    throw std::invalid_argument("driver_asset_drift: bad regime");
}

inline MeasureSelection make_measure(Regime regime, const AssetDynamics& asset,
                                     const RateEnvironment& rates) {
    MeasureSelection m;
    m.regime = regime;
    m.drift = driver_asset_drift(asset, rates, MeasureSelection{regime, 0.0});
    return m;
}

// Constant market price of risk of the Girsanov change; constant, so
// Novikov's condition holds automatically.
inline double market_price_of_risk(const AssetDynamics& asset,
                                   const RateEnvironment& rates,
                                   const MeasureSelection& m) {
    if (!(asset.sigma_bar > 0.0))
        throw std::invalid_argument("market_price_of_risk: zero volatility");
    double target = m.regime == Regime::LendingMeasure ? rates.r_l : rates.beta_at(0);
    return (asset.mu_bar + asset.kappa_bar - target) / asset.sigma_bar;
}

}  // namespace bilat::market
