#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmr/network.hpp"
#include "mmr/reach.hpp"

namespace mmr {

struct BenchRecord {
    int network_id = 0;
    std::uint64_t seed = 0;
    int depth = 0;
    int input_dim = 0;
    int output_dim = 0;
    int total_neurons = 0;
    std::string method;
    bool ok = true;
    std::string error;  // set when ok == false
    double width = 0.0;  // 2-norm width of the output box
    double elapsed_s = 0.0;
    double elapsed_per_neuron_s = 0.0;
};

struct MethodPairStats {
    int pairs = 0;
    double tighter_or_equal = 0.0;  // fraction, first method vs second
    double strictly_tighter = 0.0;
};

struct ComparisonSummary {
    // Keyed by (method_a, method_b), a != b.
    std::map<std::pair<std::string, std::string>, MethodPairStats> pairs;
    std::map<std::string, double> mean_time_per_neuron_s;
    std::map<std::string, int> record_counts;
};

// Runs each method on count (network, box) instances generated from
// cfg. Width columns are deterministic in (cfg, base_seed); engine errors
// become failure rows instead of aborting the suite. threads > 1 runs
// instances on a worker pool; records keep instance order either way.
std::vector<BenchRecord> run_suite(const RandomNetConfig& cfg,
                                   const std::vector<std::string>& methods, int threads = 1);

// Pairwise width comparison over matching network ids; equality within
// relative tolerance 1e-9. Throws MissingPairs when fewer than two
// methods share instances.
ComparisonSummary summarize(const std::vector<BenchRecord>& records);

std::string records_to_csv(const std::vector<BenchRecord>& records);
std::string summary_to_json(const ComparisonSummary& summary, const RandomNetConfig& cfg);

}  // namespace mmr
