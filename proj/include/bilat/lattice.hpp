#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "bilat/market.hpp"

namespace bilat::lattice {

struct LatticeConfig {
    std::size_t n_steps = 100;
    double horizon = 1.0;
    market::MeasureSelection measure;

    void validate() const {
        if (n_steps < 1) throw std::invalid_argument("LatticeConfig: n_steps >= 1");
        if (!(horizon > 0.0)) throw std::invalid_argument("LatticeConfig: horizon > 0");
    }
};

// Recombining binomial discretization of the driving Brownian motion under
// the selected measure, with the asset as a log-Euler function of the walk:
//   S[i][j] = s0 exp((drift - sigma^2/2) i dt + sigma (2j - i) sqrt(dt)).
// Branches are equally likely. div_factor is the per-step proportional
// dividend paid at step end per share held, chosen so that the discounted
// (resp. beta-adjusted) cum-dividend asset is an exact one-step martingale.
class Lattice {
public:
    Lattice(const market::AssetDynamics& asset, const market::RateEnvironment& rates,
            const LatticeConfig& config);

    std::size_t n_steps() const { return n_; }
    double horizon() const { return horizon_; }
    double dt() const { return dt_; }
    double sqrt_dt() const { return sqrt_dt_; }
    double time(std::size_t i) const { return static_cast<double>(i) * dt_; }
    const std::vector<double>& times() const { return times_; }
    double drift() const { return drift_; }
    double div_factor() const { return div_factor_; }
    const market::MeasureSelection& measure() const { return measure_; }
    const market::AssetDynamics& asset() const { return asset_; }

    double node(std::size_t i, std::size_t j) const { return s_[i][j]; }
    const std::vector<double>& level(std::size_t i) const { return s_[i]; }

    // sigma(t, S) at a node.
    double sigma_at(std::size_t i, std::size_t j) const {
        return asset_.sigma_bar * s_[i][j];
    }

    // Discrete conditional expectation and martingale-representation
    // coefficient for a value field at step i+1 seen from node (i, j):
    // mean = (v_up + v_down)/2, Z_W = (v_up - v_down)/(2 sqrt(dt)).
    std::pair<double, double> step_expectation(const std::vector<double>& values,
                                               std::size_t j) const {
        double up = values[j + 1], down = values[j];
        return {0.5 * (up + down), (up - down) / (2.0 * sqrt_dt_)};
    }

private:
    market::AssetDynamics asset_;
    market::MeasureSelection measure_;
    std::size_t n_;
    double horizon_, dt_, sqrt_dt_, drift_, div_factor_;
    std::vector<double> times_;
    std::vector<std::vector<double>> s_;
};

Lattice build(const market::AssetDynamics& asset, const market::RateEnvironment& rates,
              const LatticeConfig& config);

}  // namespace bilat::lattice
