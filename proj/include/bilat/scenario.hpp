#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bilat/pricing.hpp"
#include "bilat/properties.hpp"

namespace bilat::scenario {

struct PropertyRequest {
    std::string id;  // ordering | bsvp | homogeneity | endowment_independence |
                     // monotone_ordering | sandwich
    double tol = 1e-6;
    double M = 0.0;                    // bsvp
    std::size_t n_samples = 10000;     // bsvp
    std::vector<double> lambdas;       // homogeneity
    std::vector<double> x1_values;     // endowment_independence
    std::vector<double> r_mid_values;  // sandwich
};

struct ScenarioConfig {
    pricing::PricingRequest request;
    std::vector<PropertyRequest> properties;
    properties::SearchConfig search;
    double search_tol = 1e-4;
    std::vector<std::size_t> convergence_n{250, 500, 1000, 2000};
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::string format = "both";  // json | csv | both
};

// Lossless JSON round-trip; every module-level invariant is re-validated on
// load and reported with the violated constraint named.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);
std::string dump_config(const ScenarioConfig& config);

// FNV-1a hash of the canonical serialized form, for report provenance.
std::string config_hash(const ScenarioConfig& config);

// Atomic write (temp + rename) of UTF-8 text.
void write_file_atomic(const std::string& path, const std::string& content);

// Doubles formatted with max_digits10 so identical configs give
// byte-identical reports.
std::string format_double(double v);

}  // namespace bilat::scenario
