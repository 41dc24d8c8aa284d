#include "bilat/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bilat::scenario {

namespace {

using nlohmann::ordered_json;

ordered_json pwl_to_json(const PiecewiseLinear& f) {
    ordered_json j;
    j["kinks"] = f.kinks();
    j["values"] = f.values();
    j["left_slope"] = f.left_slope();
    j["right_slope"] = f.right_slope();
    return j;
}

PiecewiseLinear pwl_from_json(const ordered_json& j) {
    return PiecewiseLinear(j.at("kinks").get<std::vector<double>>(),
                           j.at("values").get<std::vector<double>>(),
                           j.at("left_slope").get<double>(),
                           j.at("right_slope").get<double>());
}

ordered_json contract_to_json(const contracts::ContractSpec& c) {
    ordered_json j;
    j["maturity"] = c.maturity;
    struct Visitor {
        ordered_json& j;
        void operator()(const contracts::EuropeanClaim& e) const {
            j["kind"] = "european";
            j["payoff"] = pwl_to_json(e.payoff);
        }
        void operator()(const contracts::DiscreteFlows& d) const {
            j["kind"] = "discrete";
            ordered_json arr = ordered_json::array();
            for (const auto& f : d.flows) {
                ordered_json e;
                e["t"] = f.t;
                e["amount"] = pwl_to_json(f.amount);
                arr.push_back(e);
            }
            j["flows"] = arr;
        }
        void operator()(const contracts::ContinuousFee& f) const {
            j["kind"] = "fee";
            j["rate"] = f.rate;
            j["start"] = f.start;
        }
        void operator()(const contracts::Mixed& m) const {
            j["kind"] = "mixed";
            ordered_json legs = ordered_json::array();
            for (const auto& leg : m.legs) {
                ordered_json lj;
                Visitor lv{lj};
                std::visit(lv, leg);
                legs.push_back(lj);
            }
            j["legs"] = legs;
        }
    };
    std::visit(Visitor{j}, c.flows);
    return j;
}

std::variant<contracts::DiscreteFlows, contracts::ContinuousFee> leg_from_json(
    const ordered_json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "discrete") {
        contracts::DiscreteFlows d;
        for (const auto& e : j.at("flows"))
            d.flows.push_back(
                {e.at("t").get<double>(), pwl_from_json(e.at("amount"))});
        return d;
    }
    if (kind == "fee")
        return contracts::ContinuousFee{j.at("rate").get<double>(),
                                        j.value("start", 0.0)};
    throw std::invalid_argument("config: mixed legs must be discrete or fee");
}

contracts::ContractSpec contract_from_json(const ordered_json& j) {
    contracts::ContractSpec c;
    c.maturity = j.at("maturity").get<double>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "european") {
        c.flows = contracts::EuropeanClaim{pwl_from_json(j.at("payoff"))};
    } else if (kind == "european_call") {
        c.flows =
            contracts::EuropeanClaim{PiecewiseLinear::call_payoff(j.at("strike"))};
    } else if (kind == "european_put") {
        c.flows =
            contracts::EuropeanClaim{PiecewiseLinear::put_payoff(j.at("strike"))};
    } else if (kind == "discrete") {
        contracts::DiscreteFlows d;
        for (const auto& e : j.at("flows")) {
            if (e.contains("amount_const"))
                d.flows.push_back(
                    {e.at("t").get<double>(),
                     PiecewiseLinear::constant(e.at("amount_const").get<double>())});
            else
                d.flows.push_back(
                    {e.at("t").get<double>(), pwl_from_json(e.at("amount"))});
        }
        c.flows = d;
    } else if (kind == "fee") {
        c.flows = contracts::ContinuousFee{j.at("rate").get<double>(),
                                           j.value("start", 0.0)};
    } else if (kind == "mixed") {
        contracts::Mixed m;
        for (const auto& lj : j.at("legs")) m.legs.push_back(leg_from_json(lj));
        c.flows = m;
    } else {
        throw std::invalid_argument("config: unknown contract kind '" + kind + "'");
    }
    c.validate();
    return c;
}

ordered_json collateral_to_json(const contracts::CollateralConvention& c) {
    ordered_json j;
    if (const auto* h = std::get_if<contracts::HedgerQ>(&c)) {
        j["kind"] = "hedger_q";
        j["q"] = pwl_to_json(h->q);
    } else if (const auto* n = std::get_if<contracts::Negotiated>(&c)) {
        if (n->form == contracts::Negotiated::Form::ConvexWeight) {
            j["kind"] = "negotiated";
            j["alpha"] = n->alpha;
        } else {
            j["kind"] = "negotiated_separable";
            j["q1"] = pwl_to_json(n->q1);
            j["q2"] = pwl_to_json(n->q2);
        }
    } else {
        const auto& e = std::get<contracts::Exogenous>(c);
        j["kind"] = "exogenous";
        j["space"] = pwl_to_json(e.space);
        j["time_weight"] = pwl_to_json(e.time_weight);
    }
    return j;
}

contracts::CollateralConvention collateral_from_json(const ordered_json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return contracts::HedgerQ::none();
    if (kind == "hedger_q") {
        if (j.contains("alpha1") || j.contains("alpha2"))
            return contracts::HedgerQ::haircut(j.value("alpha1", 0.0),
                                               j.value("alpha2", 0.0));
        return contracts::HedgerQ(pwl_from_json(j.at("q")));
    }
    if (kind == "negotiated")
        return contracts::Negotiated::convex(j.at("alpha").get<double>());
    if (kind == "negotiated_separable")
        return contracts::Negotiated::separable(pwl_from_json(j.at("q1")),
                                                pwl_from_json(j.at("q2")));
    if (kind == "exogenous") {
        contracts::Exogenous e;
        e.space = pwl_from_json(j.at("space"));
        if (j.contains("time_weight")) e.time_weight = pwl_from_json(j.at("time_weight"));
        return e;
    }
    throw std::invalid_argument("config: unknown collateral kind '" + kind + "'");
}

pricing::Model model_from_string(const std::string& s) {
    if (s == "bergman") return pricing::Model::Bergman;
    if (s == "partial_netting") return pricing::Model::PartialNetting;
    if (s == "single_rate") return pricing::Model::SingleRate;
    throw std::invalid_argument("config: unknown model '" + s + "'");
}

std::string model_to_string(pricing::Model m) {
    switch (m) {
        case pricing::Model::Bergman: return "bergman";
        case pricing::Model::PartialNetting: return "partial_netting";
        case pricing::Model::SingleRate: return "single_rate";
    }
    return "?";
}

}  // namespace

std::string dump_config(const ScenarioConfig& cfg) {
    const auto& r = cfg.request;
    ordered_json j;
    j["model"] = model_to_string(r.model);
    j["rates"] = {{"r_l", r.rates.r_l},
                  {"r_b", r.rates.r_b},
                  {"r_c", r.rates.r_c},
                  {"r_ib", r.rates.r_ib},
                  {"beta", r.rates.beta}};
    j["asset"] = {{"s0", r.asset.s0},
                  {"mu", r.asset.mu_bar},
                  {"sigma", r.asset.sigma_bar},
                  {"kappa", r.asset.kappa_bar}};
    j["contract"] = contract_to_json(r.contract);
    j["collateral"] = collateral_to_json(r.collateral);
    j["endowments"] = {{"x1", r.x1}, {"x2", r.x2}};
    j["r_mid"] = r.r_mid;
    j["solver"] = {{"n_steps", r.n_steps},
                   {"richardson", r.use_richardson},
                   {"coupled_fixed_point", r.coupled_fixed_point}};

    ordered_json props = ordered_json::array();
    for (const auto& p : cfg.properties) {
        ordered_json pj;
        pj["id"] = p.id;
        pj["tol"] = p.tol;
        if (p.id == "bsvp") {
            pj["M"] = p.M;
            pj["n_samples"] = p.n_samples;
        }
        if (!p.lambdas.empty()) pj["lambdas"] = p.lambdas;
        if (!p.x1_values.empty()) pj["x1_values"] = p.x1_values;
        if (!p.r_mid_values.empty()) pj["r_mid_values"] = p.r_mid_values;
        props.push_back(pj);
    }
    j["properties"] = props;
    j["search"] = {{"t1", cfg.search.t1},
                   {"amount_lo", cfg.search.amount_lo},
                   {"amount_hi", cfg.search.amount_hi},
                   {"grid_points", cfg.search.grid_points},
                   {"n_steps", cfg.search.n_steps},
                   {"n_confirm", cfg.search.n_confirm},
                   {"tol", cfg.search_tol}};
    j["convergence_n"] = cfg.convergence_n;
    j["seed"] = cfg.seed;
    j["output"] = {{"dir", cfg.out_dir}, {"format", cfg.format}};
    return j.dump(2);
}

ScenarioConfig parse_config(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    ScenarioConfig cfg;
    auto& r = cfg.request;

    r.model = model_from_string(j.at("model").get<std::string>());
    const auto& rates = j.at("rates");
    r.rates.r_l = rates.at("r_l").get<double>();
    r.rates.r_b = rates.at("r_b").get<double>();
    r.rates.r_c = rates.at("r_c").get<double>();
    if (rates.contains("r_ib")) r.rates.r_ib = rates.at("r_ib").get<std::vector<double>>();
    if (rates.contains("beta")) r.rates.beta = rates.at("beta").get<std::vector<double>>();
    r.rates.validate();

    const auto& asset = j.at("asset");
    r.asset = market::AssetDynamics(asset.at("s0").get<double>(),
                                    asset.at("mu").get<double>(),
                                    asset.at("sigma").get<double>(),
                                    asset.value("kappa", 0.0));
    r.contract = contract_from_json(j.at("contract"));
    r.collateral = collateral_from_json(j.at("collateral"));

    const auto& endow = j.at("endowments");
    r.x1 = endow.at("x1").get<double>();
    r.x2 = endow.at("x2").get<double>();
    r.r_mid = j.value("r_mid", 0.0);

    const auto& solver = j.at("solver");
    r.n_steps = solver.at("n_steps").get<std::size_t>();
    r.use_richardson = solver.value("richardson", false);
    r.coupled_fixed_point = solver.value("coupled_fixed_point", false);

    if (j.contains("properties")) {
        for (const auto& pj : j.at("properties")) {
            PropertyRequest p;
            p.id = pj.at("id").get<std::string>();
            p.tol = pj.value("tol", 1e-6);
            p.M = pj.value("M", 0.0);
            p.n_samples = pj.value("n_samples", std::size_t{10000});
            if (pj.contains("lambdas")) p.lambdas = pj.at("lambdas").get<std::vector<double>>();
            if (pj.contains("x1_values"))
                p.x1_values = pj.at("x1_values").get<std::vector<double>>();
            if (pj.contains("r_mid_values"))
                p.r_mid_values = pj.at("r_mid_values").get<std::vector<double>>();
            cfg.properties.push_back(std::move(p));
        }
    }
    if (j.contains("search")) {
        const auto& s = j.at("search");
        cfg.search.t1 = s.value("t1", 0.5);
        cfg.search.amount_lo = s.value("amount_lo", -5.0);
        cfg.search.amount_hi = s.value("amount_hi", 5.0);
        cfg.search.grid_points = s.value("grid_points", std::size_t{41});
        cfg.search.n_steps = s.value("n_steps", std::size_t{200});
        cfg.search.n_confirm = s.value("n_confirm", std::size_t{1000});
        cfg.search_tol = s.value("tol", 1e-4);
    }
    if (j.contains("convergence_n"))
        cfg.convergence_n = j.at("convergence_n").get<std::vector<std::size_t>>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("output")) {
        cfg.out_dir = j.at("output").value("dir", "out");
        cfg.format = j.at("output").value("format", "both");
    }

    // validate the full request against the dispatch table
    pricing::select_regime(r);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_hash(const ScenarioConfig& cfg) {
    std::string text = dump_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " -> " + path);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace bilat::scenario
