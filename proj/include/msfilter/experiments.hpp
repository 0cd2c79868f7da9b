#pragma once

#include <map>
#include <string>
#include <vector>

#include "msfilter/config.hpp"

namespace msf {

struct ExperimentInfo {
    std::string id;
    std::string description;       // one-line summary of what the experiment measures
    std::string runtime_estimate;  // with default (desk-scale) settings
};

// Catalog of the nine named experiments.
std::vector<ExperimentInfo> list_experiments();

// Shipped default configuration text for an experiment id.
std::string default_config(const std::string& experiment_id);

struct ExperimentReport {
    std::string experiment_id;
    std::vector<std::pair<std::string, double>> metrics;  // ordered scalar results
    std::vector<std::string> files;                       // emitted artifacts
    std::string config_echo;                              // canonical key=value list
    std::string content_hash;                             // hash of the canonical config
    bool diverged = false;

    double metric(const std::string& key) const;
};

// Structural checks only; never runs a simulation. Returns problems (entries
// starting with "warning:" are non-fatal).
std::vector<std::string> validate_config(const Config& cfg);

// Executes the named pipeline, writing CSVs, a plot script, and a report file
// into out_dir. Identical config (including jobs) gives byte-identical CSVs.
ExperimentReport run_experiment(const Config& cfg, const std::string& out_dir, int jobs = 0);

}  // namespace msf
