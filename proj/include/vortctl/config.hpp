#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortctl/sim.hpp"

namespace vortctl {

/// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat dotted-key config text: one `key = value` per line, '#' comments.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues load_config_file(const std::string& path);

struct RunSetup {
    SimConfig sim;
    std::vector<int> sweep_M;          // nonempty: fan out over M
    std::vector<double> sweep_lambda;  // nonempty: fan out over lambda
};

/// Builds the run setup: preset defaults (example1/example2/custom) with
/// key overrides. Unknown keys are rejected.
RunSetup run_setup_from_config(const KeyValues& kv);

struct XiSetup {
    bool rectangle = true;
    double L1 = 1.0, L2 = 1.0;
    double r = 0.45;
    TriangleDomain tri{{0, 0}, {1, 0}, {1.0 / 3, 2.0 / 3}};
    double support_scale = 0.8;
    int mesh_level = 1;
    double target_h0 = 0.125;
    std::vector<int> m_list{0, 1, 2};
};

XiSetup xi_setup_from_config(const KeyValues& kv);

}  // namespace vortctl
