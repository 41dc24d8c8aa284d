#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bilat/contracts.hpp"
#include "bilat/generators.hpp"
#include "bilat/lattice.hpp"

namespace bilat::bsde {

enum class Coupling { Scalar, SequentialPair, SimultaneousPair };

// Thrown when a driver evaluates to a non-finite value; carries the node.
struct SolverError : std::runtime_error {
    std::size_t step, node;
    SolverError(std::size_t i, std::size_t j, const std::string& what)
        : std::runtime_error(what), step(i), node(j) {}
};

struct BsdeProblem {
    generators::GeneratorSpec gen;
    std::optional<generators::GeneratorSpec> gen_cpty;  // g-side of a sequential pair
    contracts::FlowSchedule flows;   // common dA schedule (both components of a pair)
    std::vector<double> terminal;    // post-jump terminal data; empty means zero
    std::vector<double> terminal2;   // second component of a coupled pair
    Coupling coupling = Coupling::Scalar;
    bool coupled_fixed_point = false;
};

// Backward solution on the lattice. y[i][j] is the pre-jump value at node
// (i, j): the flow assigned to grid time i is already subtracted, and the
// terminal entries equal the supplied terminal data minus the terminal jump.
struct BsdeSolution {
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> z_w;   // coefficient against dW, levels 0..n-1
    std::vector<std::vector<double>> xi;    // z_w / sigma(t, S), per node

    double y0() const { return y[0][0]; }
};

BsdeSolution solve_scalar(const BsdeProblem& problem, const lattice::Lattice& lat);

// Hedger leg first, then the counterparty leg fed the hedger's continuation
// mean at each node (the same y-argument the hedger's own explicit step
// used, which makes the rate-collapse identities exact).
std::pair<BsdeSolution, BsdeSolution> solve_sequential_pair(
    const BsdeProblem& problem, const lattice::Lattice& lat);

// One backward sweep computing both components per node; the negotiated
// collateral term is shared and evaluated at the continuation means.
std::pair<BsdeSolution, BsdeSolution> solve_simultaneous_pair(
    const BsdeProblem& problem, const lattice::Lattice& lat);

inline double richardson(double price_n, double price_2n) {
    return 2.0 * price_2n - price_n;
}

// Scalar backward recursion with a caller-supplied driver g(t, s, y, z_W)
// (currency/year); the exogenous-collateral wealth path composes its
// transformed generator through this.
using ScalarDriver =
    std::function<double(std::size_t i, std::size_t j, double t, double s,
                         double y_mean, double z_w)>;

BsdeSolution solve_scalar_custom(const ScalarDriver& driver,
                                 const contracts::FlowSchedule& flows,
                                 const std::vector<double>& terminal,
                                 const lattice::Lattice& lat);

// z in the paper's convention (coefficient against the cum-dividend driver)
// from the Brownian coefficient z_W, for the family's driving process.
double paper_z(generators::Family family, const market::RateEnvironment& rates,
               const market::AssetDynamics& asset, double t, double s, double z_w);

}  // namespace bilat::bsde
