// Batch front-end: scenario config in, priced grids / property verdicts /
// convergence tables / violation searches out. Exit codes: 0 ok, 2 config
// error, 3 numeric error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bilat/oracle.hpp"
#include "bilat/pricing.hpp"
#include "bilat/properties.hpp"
#include "bilat/scenario.hpp"

namespace {

using bilat::scenario::ScenarioConfig;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

double checked(double v) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value in report");
    return v;
}

std::string out_path(const ScenarioConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

int run_price(const ScenarioConfig& cfg) {
    auto outcome = bilat::pricing::evaluate(cfg.request);

    bool want_json = cfg.format != "csv";
    bool want_csv = cfg.format != "json";

    if (want_json) {
        ordered_json j;
        j["config_hash"] = bilat::scenario::config_hash(cfg);
        j["n_steps"] = outcome.n_steps;
        j["dt"] = outcome.dt;
        j["richardson"] = outcome.richardson;
        j["x1"] = outcome.x1;
        j["x2"] = outcome.x2;
        j["P_h0"] = checked(outcome.p_h0);
        j["P_c0"] = checked(outcome.p_c0);
        if (cfg.request.model == bilat::pricing::Model::SingleRate)
            j["P_r0"] = checked(outcome.p_h0);

        std::vector<double> times;
        double T = cfg.request.contract.maturity;
        for (int k = 0; k <= 10; ++k) times.push_back(T * k / 10.0);
        ordered_json curves = ordered_json::array();
        for (const auto& row : bilat::pricing::fair_range(outcome, times)) {
            ordered_json rj;
            rj["t"] = row.t;
            rj["P_c"] = checked(row.lo);
            rj["P_h"] = checked(row.hi);
            rj["min_gap"] = checked(row.min_gap);
            rj["empty"] = row.empty;
            curves.push_back(rj);
        }
        j["range"] = curves;
        bilat::scenario::write_file_atomic(out_path(cfg, "price_report.json"),
                                           j.dump(2) + "\n");
    }

    if (want_csv) {
        std::ostringstream csv;
        csv << "t,node,S,P_h,P_c,xi_h,xi_c\n";
        const auto& lat = *outcome.lat;
        for (std::size_t i = 0; i < outcome.hedger.y.size(); ++i) {
            for (std::size_t j = 0; j < outcome.hedger.y[i].size(); ++j) {
                double xih = i < outcome.hedger.xi.size() ? outcome.hedger.xi[i][j] : 0.0;
                double xic = i < outcome.cpty.xi.size() ? outcome.cpty.xi[i][j] : 0.0;
                csv << bilat::scenario::format_double(lat.time(i)) << ',' << j << ','
                    << bilat::scenario::format_double(checked(lat.node(i, j))) << ','
                    << bilat::scenario::format_double(checked(outcome.hedger.y[i][j]))
                    << ','
                    << bilat::scenario::format_double(checked(outcome.cpty.y[i][j]))
                    << ',' << bilat::scenario::format_double(checked(xih)) << ','
                    << bilat::scenario::format_double(checked(xic)) << '\n';
            }
        }
        bilat::scenario::write_file_atomic(out_path(cfg, "price_surface.csv"),
                                           csv.str());
    }
    return kExitOk;
}

ordered_json verdict_to_json(const bilat::properties::PropertyVerdict& v) {
    ordered_json j;
    j["id"] = v.id;
    j["applicable"] = v.applicable;
    j["pass"] = v.pass;
    j["worst_violation"] = checked(v.worst_violation);
    j["tolerance"] = v.tolerance;
    j["seed"] = v.seed;
    if (v.witness) {
        j["witness"] = {{"t", v.witness->t},
                        {"s", v.witness->s},
                        {"value", checked(v.witness->value)},
                        {"note", v.witness->note}};
    }
    if (v.id == "bsvp") j["M_hat"] = checked(v.detail);
    return j;
}

int run_properties(const ScenarioConfig& cfg) {
    ordered_json verdicts = ordered_json::array();
    bool all_pass = true;

    for (const auto& p : cfg.properties) {
        bilat::properties::PropertyVerdict v;
        if (p.id == "ordering") {
            v = bilat::properties::check_ordering(bilat::pricing::evaluate(cfg.request),
                                                  p.tol);
        } else if (p.id == "bsvp") {
            auto sel = bilat::pricing::select_regime(cfg.request);
            bilat::generators::GeneratorSpec spec;
            spec.family = sel.f_family;
            spec.rates = cfg.request.rates;
            spec.x1 = cfg.request.x1;
            spec.x2 = cfg.request.x2;
            spec.collateral = cfg.request.collateral;
            bilat::properties::BsvpBox box;
            box.t_max = cfg.request.contract.maturity;
            box.s_lo = cfg.request.asset.s0 / 4.0;
            box.s_hi = cfg.request.asset.s0 * 4.0;
            box.y_scale = 3.0 * (1.0 + std::fabs(cfg.request.x1) +
                                 std::fabs(cfg.request.x2) +
                                 cfg.request.asset.s0 / 10.0);
            v = bilat::properties::check_bsvp(spec, cfg.request.asset, box,
                                              p.n_samples, p.M, cfg.seed);
        } else if (p.id == "homogeneity") {
            auto lambdas = p.lambdas.empty() ? std::vector<double>{0.5, 2.0, 10.0}
                                             : p.lambdas;
            v = bilat::properties::check_homogeneity(cfg.request, lambdas, p.tol);
        } else if (p.id == "endowment_independence") {
            auto xs = p.x1_values.empty() ? std::vector<double>{0.0, 1.0, 5.0}
                                          : p.x1_values;
            v = bilat::properties::check_endowment_independence(cfg.request, xs, p.tol);
        } else if (p.id == "monotone_ordering") {
            v = bilat::properties::check_monotone_ordering(cfg.request, p.tol);
        } else if (p.id == "sandwich") {
            auto rs = p.r_mid_values.empty()
                          ? std::vector<double>{cfg.request.rates.r_l,
                                                cfg.request.rates.r_b}
                          : p.r_mid_values;
            v = bilat::properties::check_sandwich(cfg.request, rs, p.tol);
        } else {
            throw std::invalid_argument("unknown property id '" + p.id + "'");
        }
        if (v.applicable && !v.pass) all_pass = false;
        verdicts.push_back(verdict_to_json(v));
    }

    ordered_json j;
    j["config_hash"] = bilat::scenario::config_hash(cfg);
    j["verdicts"] = verdicts;
    bilat::scenario::write_file_atomic(out_path(cfg, "verdicts.json"),
                                       j.dump(2) + "\n");
    return all_pass ? kExitOk : 1;
}

int run_convergence(const ScenarioConfig& cfg) {
    auto price_at = [&](std::size_t n) {
        bilat::pricing::PricingRequest r = cfg.request;
        r.n_steps = n;
        r.use_richardson = false;
        if (r.model == bilat::pricing::Model::SingleRate)
            return bilat::pricing::price_single_rate(r).p0;
        return bilat::pricing::evaluate(r).p_h0;
    };

    std::vector<std::size_t> ns = cfg.convergence_n;
    if (ns.empty()) throw std::invalid_argument("convergence: empty n list");
    std::size_t n_ref = ns.back() * 2;
    double ref = bilat::bsde::richardson(price_at(ns.back()), price_at(n_ref));

    std::ostringstream csv;
    csv << "n,price,error_vs_extrapolated,ratio\n";
    double prev_err = 0.0;
    bool first = true;
    for (std::size_t n : ns) {
        double p = checked(price_at(n));
        double err = std::fabs(p - ref);
        csv << n << ',' << bilat::scenario::format_double(p) << ','
            << bilat::scenario::format_double(err) << ',';
        if (first || err == 0.0)
            csv << "";
        else
            csv << bilat::scenario::format_double(prev_err / err);
        csv << '\n';
        prev_err = err;
        first = false;
    }
    bilat::scenario::write_file_atomic(out_path(cfg, "convergence.csv"), csv.str());
    return kExitOk;
}

int run_search(const ScenarioConfig& cfg) {
    auto w = bilat::properties::search_range_violation(cfg.request, cfg.search,
                                                       cfg.search_tol);
    ordered_json j;
    j["config_hash"] = bilat::scenario::config_hash(cfg);
    j["found"] = w.found;
    if (w.found) {
        j["contract"] = {{"t1", w.t1},
                         {"amount1", checked(w.amount1)},
                         {"maturity", cfg.request.contract.maturity},
                         {"amount2", checked(w.amount2)}};
        j["P_h0"] = checked(w.p_h0);
        j["P_c0"] = checked(w.p_c0);
        j["gap"] = checked(w.p_c0 - w.p_h0);
    }
    bilat::scenario::write_file_atomic(out_path(cfg, "violation.json"),
                                       j.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bilateral derivative pricing engine"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    bool seed_set = false, steps_set = false;

    for (const char* name : {"price", "properties", "convergence", "search"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario config (json)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--steps", steps, "override lattice steps")
            ->each([&](const std::string&) { steps_set = true; });
        sub->add_option("--seed", seed, "override sampling seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--format", format, "json|csv|both");
    }

    CLI11_PARSE(app, argc, argv);

    ScenarioConfig cfg;
    try {
        cfg = bilat::scenario::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;
        if (steps_set) cfg.request.n_steps = steps;
        if (seed_set) cfg.seed = seed;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (app.got_subcommand("price")) return run_price(cfg);
        if (app.got_subcommand("properties")) return run_properties(cfg);
        if (app.got_subcommand("convergence")) return run_convergence(cfg);
        return run_search(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
