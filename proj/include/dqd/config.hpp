// config.hpp: run configuration in a flat, sectioned key = value format.
//
//   # comment
//   [hamiltonian]
//   epsilon = 1
//   h_tunnel = 1
//   hbar = 1                 ; optional, default 1
//   [detector]
//   i1 = 10
//   i2 = 11
//   s_i = 0.333              ; or: transparency = 0 (Schottky, S_I = 2 e I0 (1 - T))
//   e = 0.0159               ; optional, default 1
//   gamma_d_extra = 0        ; optional, default 0
//   [initial]
//   s11 = 1
//   s12_re = 0               ; optional
//   s12_im = 0               ; optional
//   [grid]
//   dt = 0.001
//   t_final = 20
//   window = 0.01            ; optional, default dt
//   seed = 1                 ; optional, default 0
//   [run]
//   mode = trajectory        ; trajectory | ensemble:N | master | reconstruct:FILE | steer
//   output = out             ; optional, default "."
//   record_model = langevin  ; optional, langevin | bayes_mixture

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqd/core.hpp"
#include "dqd/trajectory.hpp"

namespace dqd {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RunMode { kTrajectory, kEnsemble, kMaster, kReconstruct, kSteer };

struct RunConfig {
    QubitHamiltonian hamiltonian;
    DetectorModel detector;
    // Set when S_I came from the Schottky helper rather than an explicit s_i.
    std::optional<double> transparency;
    ConditionedState initial;
    SimulationGrid grid;
    RunMode mode{RunMode::kTrajectory};
    std::size_t ensemble_size{0};
    std::string record_file;
    std::string output_dir{"."};
    RecordModel record_model{RecordModel::kLangevin};

    bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError naming the offending key or line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string to_config_text(const RunConfig& config);

std::string mode_to_string(const RunConfig& config);

// Presets: fig1, fig2a, fig2b, fig2c, purify, steer-demo.
RunConfig scenario(const std::string& name);
std::vector<std::string> scenario_names();

// Physical parameters of the coupling-sweep family for a given 𝒞.
RunConfig zeno_scenario(double coupling);

}  // namespace dqd
