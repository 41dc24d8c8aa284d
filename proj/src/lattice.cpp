#include "bilat/lattice.hpp"

#include <cmath>

namespace bilat::lattice {

Lattice::Lattice(const market::AssetDynamics& asset,
                 const market::RateEnvironment& rates, const LatticeConfig& config)
    : asset_(asset), measure_(config.measure) {
    config.validate();
    asset.validate();
    n_ = config.n_steps;
    horizon_ = config.horizon;
    dt_ = horizon_ / static_cast<double>(n_);
    sqrt_dt_ = std::sqrt(dt_);
    drift_ = market::driver_asset_drift(asset, rates, measure_);

    // One-step mean of S'/S without dividends is e^{drift dt} m(dt) with
    // m(dt) = cosh(sigma sqrt(dt)) e^{-sigma^2 dt / 2} = 1 + O(dt^2). Paying
    // theta S' per share at step end with theta = e^{kappa dt}/m - 1 makes
    // E[(1+theta) S'] = S e^{(drift + kappa) dt} exact, i.e. the funding-rate
    // compensated cum-dividend asset is an exact martingale.
    double m = std::cosh(asset.sigma_bar * sqrt_dt_) *
               std::exp(-0.5 * asset.sigma_bar * asset.sigma_bar * dt_);
    div_factor_ = std::exp(asset.kappa_bar * dt_) / m - 1.0;

    times_.resize(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) times_[i] = static_cast<double>(i) * dt_;
    times_.back() = horizon_;

    s_.resize(n_ + 1);
    double log_s0 = std::log(asset.s0);
    double nu = drift_ - 0.5 * asset.sigma_bar * asset.sigma_bar;
    for (std::size_t i = 0; i <= n_; ++i) {
        s_[i].resize(i + 1);
        for (std::size_t j = 0; j <= i; ++j) {
            double w = static_cast<double>(2 * j) - static_cast<double>(i);
            s_[i][j] = std::exp(log_s0 + nu * times_[i] + asset.sigma_bar * w * sqrt_dt_);
        }
    }
}

Lattice build(const market::AssetDynamics& asset, const market::RateEnvironment& rates,
              const LatticeConfig& config) {
    return Lattice(asset, rates, config);
}

}  // namespace bilat::lattice
