// trajectory.hpp: stochastic evolution of the conditioned state.
//
// One step of length dt is an operator split:
//   (a) measurement: exact Bayes update with the window outcome
//       ⟨I⟩ = I0 + ΔI (σ22 − σ11)/2 + ξ,  ξ ~ N(0, S_I/(2 dt));
//   (b) free evolution: exact propagator of
//       σ̇11 = −(2H/ħ) Im σ12,
//       σ̇12 = (iε/ħ) σ12 + (iH/ħ)(σ11 − σ22) − γ_d σ12.
// In Bloch coordinates (b) reads ṙ = ω × r − γ_d (x, y, 0) with
// ω = (−2H, 0, ε)/ħ, so for γ_d = 0 it is a rotation by Ω dt about ω/|ω|.
//
// The detector record stores window averages of the per-step ⟨I⟩. Replaying
// those outcomes through the same split reproduces the state path.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dqd/bayes.hpp"
#include "dqd/core.hpp"
#include "dqd/rng.hpp"

namespace dqd {

struct MeasurementRecord {
    double t0{0.0};
    double window{1.0};
    std::vector<double> samples;

    double duration() const { return window * static_cast<double>(samples.size()); }
    double time_of(std::size_t k) const { return t0 + window * static_cast<double>(k); }
};

// How the per-step outcome ⟨I⟩ is generated.
enum class RecordModel {
    // Gaussian around the state-weighted mean current (Langevin form).
    kLangevin,
    // Exact mixture σ11 P1 + σ22 P2: pick a dot, then a Gaussian around I_i.
    kBayesMixture,
};

struct TrajectoryOptions {
    RecordModel record_model{RecordModel::kLangevin};
    // Keep the per-dt outcomes in TrajectoryResult::fine_record.
    bool keep_fine_record{false};
    std::uint64_t stream_index{0};
};

struct TrajectoryResult {
    SimulationGrid grid;
    // State at t = k·window, k = 0..n_windows.
    std::vector<ConditionedState> states;
    MeasurementRecord record;
    std::optional<MeasurementRecord> fine_record;
    std::uint64_t seed{0};
    std::uint64_t stream_index{0};
    std::vector<std::string> warnings;
    // Per-step outcomes below zero; the Gaussians are not truncated.
    std::size_t negative_samples{0};

    double time_of(std::size_t k) const { return grid.window * static_cast<double>(k); }
};

// 3x3 Bloch-space propagator of the deterministic part over one step.
class FreePropagator {
public:
    FreePropagator(const QubitHamiltonian& ham, double gamma_d, double dt);

    ConditionedState apply(const ConditionedState& state) const;
    Bloch apply(const Bloch& r) const;
    bool is_identity() const { return identity_; }

private:
    std::array<double, 9> m_{};
    bool identity_{false};
    // H = 0: σ11 is untouched and σ12 picks up exp((iε/ħ − γ_d) dt).
    bool phase_only_{false};
    Complex phase_factor_{1.0, 0.0};
};

// ξ̄ ~ N(0, S_I/(2 dt)): white noise of density S_I averaged over dt.
double noise_increment(const DetectorModel& det, double dt, RngStream& rng);

// I = I0 + ΔI (σ22 − σ11)/2 + ξ
double detector_sample(const ConditionedState& state, const DetectorModel& det, double xi);

// dt ≤ 0.05 min(τ_loc, 1/Ω, 1/γ_d); reported, not enforced.
ValidityReport check_step_size(const QubitHamiltonian& ham, const DetectorModel& det, double dt);

// One split step driven by the noise value ξ.
ConditionedState step(const ConditionedState& state, const QubitHamiltonian& ham,
                      const DetectorModel& det, double dt, double xi);

// Same split step driven by a given window outcome ⟨I⟩.
ConditionedState step_with_outcome(const ConditionedState& state, const QubitHamiltonian& ham,
                                   const DetectorModel& det, double dt, double i_avg);

TrajectoryResult run_trajectory(const ConditionedState& initial, const QubitHamiltonian& ham,
                                const DetectorModel& det, const SimulationGrid& grid,
                                const TrajectoryOptions& options = {});

// Replays the split step driven by the recorded window averages. Each record
// window is split into `substeps` equal steps that all see the window mean.
// Returns the states at the window boundaries (record.samples.size() + 1).
std::vector<ConditionedState> reconstruct_from_record(const ConditionedState& initial,
                                                      const QubitHamiltonian& ham,
                                                      const DetectorModel& det,
                                                      const MeasurementRecord& record,
                                                      std::size_t substeps = 1);

// run_trajectory from σ11 = 1/2, σ12 = 0. Throws for γ_d > 0: a nonideal
// detector caps the attainable purity below one.
TrajectoryResult purify_from_mixed(const DetectorModel& det, const QubitHamiltonian& ham,
                                   const SimulationGrid& grid, const TrajectoryOptions& options = {});

}  // namespace dqd
