#include "bilat/bsde.hpp"

#include <cmath>
#include <string>

namespace bilat::bsde {

namespace {

using generators::DriverPoint;
using generators::Family;
using generators::GeneratorSpec;

void check_problem(const BsdeProblem& pr) {
    pr.gen.validate();
    if (pr.gen_cpty) pr.gen_cpty->validate();
    bool pair = generators::is_pair_family(pr.gen.family);
    switch (pr.coupling) {
        case Coupling::Scalar:
            if (pair || generators::is_cpty_family(pr.gen.family))
                throw std::invalid_argument("solve: scalar mode needs an f-family");
            break;
        case Coupling::SequentialPair:
            if (pair || !pr.gen_cpty || !generators::is_cpty_family(pr.gen_cpty->family))
                throw std::invalid_argument(
                    "solve: sequential mode needs an (f, g) family pair");
            break;
        case Coupling::SimultaneousPair:
            if (!pair)
                throw std::invalid_argument(
                    "solve: simultaneous mode needs a coupled family");
            break;
    }
}

double terminal_value(const std::vector<double>& data, std::size_t j) {
    return data.empty() ? 0.0 : data[j];
}

[[noreturn]] void throw_nonfinite(std::size_t i, std::size_t j, double t, double s) {
    throw SolverError(i, j, "non-finite driver value at step " + std::to_string(i) +
                                ", node " + std::to_string(j) + " (t=" +
                                std::to_string(t) + ", S=" + std::to_string(s) + ")");
}

struct Grids {
    std::vector<std::vector<double>> y, z_w, xi;
    void init(std::size_t n) {
        y.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) y[i].assign(i + 1, 0.0);
        z_w.resize(n);
        xi.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            z_w[i].assign(i + 1, 0.0);
            xi[i].assign(i + 1, 0.0);
        }
    }
    BsdeSolution take() {
        BsdeSolution s;
        s.y = std::move(y);
        s.z_w = std::move(z_w);
        s.xi = std::move(xi);
        return s;
    }
};

}  // namespace

double paper_z(Family family, const market::RateEnvironment& rates,
               const market::AssetDynamics& asset, double t, double s, double z_w) {
    double sigma = asset.sigma_bar * s;
    if (generators::is_beta_family(family)) return z_w / sigma;
    // lending-discounted driver: dS~ = (B^l)^{-1} sigma dW
    return z_w * market::account_value(rates.r_l, t) / sigma;
}

BsdeSolution solve_scalar_custom(const ScalarDriver& driver,
                                 const contracts::FlowSchedule& flows,
                                 const std::vector<double>& terminal,
                                 const lattice::Lattice& lat) {
    std::size_t n = lat.n_steps();
    Grids g;
    g.init(n);

    for (std::size_t j = 0; j <= n; ++j)
        g.y[n][j] = terminal_value(terminal, j) - flows.jump(n, lat.node(n, j));

    double dt = lat.dt();
    for (std::size_t i = n; i-- > 0;) {
        double t = lat.time(i);
        for (std::size_t j = 0; j <= i; ++j) {
            auto [mean, z_w] = lat.step_expectation(g.y[i + 1], j);
            double s = lat.node(i, j);
            double gv = driver(i, j, t, s, mean, z_w);
            if (!std::isfinite(gv)) throw_nonfinite(i, j, t, s);
            g.y[i][j] = mean - gv * dt - flows.fee(i, s) - flows.jump(i, s);
            g.z_w[i][j] = z_w;
            g.xi[i][j] = z_w / lat.sigma_at(i, j);
        }
    }
    return g.take();
}

BsdeSolution solve_scalar(const BsdeProblem& problem, const lattice::Lattice& lat) {
    check_problem(problem);
    const GeneratorSpec& spec = problem.gen;
    DriverPoint p;
    p.s.assign(1, 0.0);
    p.z1.assign(1, 0.0);
    auto driver = [&](std::size_t, std::size_t, double t, double s, double y_mean,
                      double z_w) {
        p.t = t;
        p.s[0] = s;
        p.y1 = y_mean;
        p.z1[0] = paper_z(spec.family, spec.rates, lat.asset(), t, s, z_w);
        return generators::eval(spec, p).g1;
    };
    return solve_scalar_custom(driver, problem.flows, problem.terminal, lat);
}

std::pair<BsdeSolution, BsdeSolution> solve_sequential_pair(
    const BsdeProblem& problem, const lattice::Lattice& lat) {
    check_problem(problem);
    if (problem.coupling != Coupling::SequentialPair)
        throw std::invalid_argument("solve_sequential_pair: wrong coupling mode");

    BsdeProblem hedger = problem;
    hedger.coupling = Coupling::Scalar;
    hedger.gen_cpty.reset();
    BsdeSolution sol_h = solve_scalar(hedger, lat);

    const GeneratorSpec& spec = *problem.gen_cpty;
    DriverPoint p;
    p.s.assign(1, 0.0);
    p.z1.assign(1, 0.0);
    auto driver = [&](std::size_t i, std::size_t j, double t, double s, double y_mean,
                      double z_w) {
        p.t = t;
        p.s[0] = s;
        p.y1 = y_mean;
        p.z1[0] = paper_z(spec.family, spec.rates, lat.asset(), t, s, z_w);
        p.y1_external = 0.5 * (sol_h.y[i + 1][j + 1] + sol_h.y[i + 1][j]);
        return generators::eval(spec, p).g1;
    };
    BsdeSolution sol_c =
        solve_scalar_custom(driver, problem.flows, problem.terminal, lat);
    return {std::move(sol_h), std::move(sol_c)};
}

std::pair<BsdeSolution, BsdeSolution> solve_simultaneous_pair(
    const BsdeProblem& problem, const lattice::Lattice& lat) {
    check_problem(problem);
    if (problem.coupling != Coupling::SimultaneousPair)
        throw std::invalid_argument("solve_simultaneous_pair: wrong coupling mode");

    const GeneratorSpec& spec = problem.gen;
    std::size_t n = lat.n_steps();
    Grids g1, g2;
    g1.init(n);
    g2.init(n);

    for (std::size_t j = 0; j <= n; ++j) {
        double jump = problem.flows.jump(n, lat.node(n, j));
        g1.y[n][j] = terminal_value(problem.terminal, j) - jump;
        g2.y[n][j] = terminal_value(problem.terminal2, j) - jump;
    }

    double dt = lat.dt();
    DriverPoint p;
    p.s.assign(1, 0.0);
    p.z1.assign(1, 0.0);
    p.z2.assign(1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double t = lat.time(i);
        for (std::size_t j = 0; j <= i; ++j) {
            auto [m1, zw1] = lat.step_expectation(g1.y[i + 1], j);
            auto [m2, zw2] = lat.step_expectation(g2.y[i + 1], j);
            double s = lat.node(i, j);
            p.t = t;
            p.s[0] = s;
            p.z1[0] = paper_z(spec.family, spec.rates, lat.asset(), t, s, zw1);
            p.z2[0] = paper_z(spec.family, spec.rates, lat.asset(), t, s, zw2);
            p.y1 = m1;
            p.y2 = m2;
            double fee = problem.flows.fee(i, s);
            double jump = problem.flows.jump(i, s);
            auto gv = generators::eval(spec, p);
            double y1 = m1 - gv.g1 * dt - fee - jump;
            double y2 = m2 - gv.g2 * dt - fee - jump;
            if (problem.coupled_fixed_point) {
                for (int it = 0; it < 5; ++it) {
                    p.y1 = y1 + jump;  // driver sees post-jump level at this node
                    p.y2 = y2 + jump;
                    gv = generators::eval(spec, p);
                    double n1 = m1 - gv.g1 * dt - fee - jump;
                    double n2 = m2 - gv.g2 * dt - fee - jump;
                    double delta = std::fabs(n1 - y1) + std::fabs(n2 - y2);
                    y1 = n1;
                    y2 = n2;
                    if (delta <= 1e-12 * (1.0 + std::fabs(y1) + std::fabs(y2))) break;
                }
            }
            if (!std::isfinite(gv.g1) || !std::isfinite(gv.g2))
                throw_nonfinite(i, j, t, s);
            g1.y[i][j] = y1;
            g2.y[i][j] = y2;
            g1.z_w[i][j] = zw1;
            g2.z_w[i][j] = zw2;
            double sig = lat.sigma_at(i, j);
            g1.xi[i][j] = zw1 / sig;
            g2.xi[i][j] = zw2 / sig;
        }
    }
    return {g1.take(), g2.take()};
}

}  // namespace bilat::bsde
