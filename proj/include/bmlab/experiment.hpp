#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmlab/hermite.hpp"
#include "bmlab/paths.hpp"
#include "bmlab/rates.hpp"

namespace bmlab::cli {

struct ExperimentConfig {
    std::map<std::string, std::string> kv;  // flat key=value pairs

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_string(const std::string& text);

    std::string get(const std::string& key, const std::string& fallback = "") const;
    bool has(const std::string& key) const;

    // Canonical serialization (sorted keys) and its FNV-1a hash.
    std::string canonical() const;
    std::uint64_t hash() const;

    // Typed accessors over the common keys; throw ConfigInvalid on bad values.
    std::string experiment() const;
    paths::CovarianceModel model() const;
    hermite::FunctionSpec function() const;
    std::vector<std::size_t> n_values() const;
    std::size_t mc_paths() const;
    std::uint64_t mc_seed() const;
    std::string output_dir() const;
};

// Non-throwing structural validation; returns human-readable diagnostics
// (empty when the config is runnable). Warnings are prefixed "warning:".
std::vector<std::string> validate(const ExperimentConfig& config);

// Executes the configured experiment, writing CSV and JSON reports into the
// output directory. Returns 0 on success, 2 when a convergence/sandwich check
// fails, and lets errors propagate as exceptions.
int run(const ExperimentConfig& config);

// Smoothness tag used for bound_value when the config does not pin one.
rates::Smoothness infer_smoothness(const hermite::FunctionSpec& g,
                                   const hermite::HermiteExpansion& e);

}  // namespace bmlab::cli
