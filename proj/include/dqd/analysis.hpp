// analysis.hpp: ensemble statistics, record filters, localization and Zeno
// metrics, and pulses that steer a known pure state to a chosen target.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dqd/core.hpp"
#include "dqd/trajectory.hpp"

namespace dqd {

// Welford accumulator; merge() combines partial results (Chan et al.).
struct Moments {
    std::size_t n{0};
    double mean{0.0};
    double m2{0.0};

    void add(double x);
    void merge(const Moments& other);
    // Population variance; 0 for n < 2.
    double variance() const;
    double standard_error() const;
};

struct EnsembleOptions {
    RecordModel record_model{RecordModel::kLangevin};
    // max(σ11, σ22) at t_final needed to count a trajectory as localized.
    double localization_threshold{0.95};
    // Hysteresis thresholds for transition counting.
    double zeno_low{0.25};
    double zeno_high{0.75};
    // 0 selects worker_count().
    std::size_t workers{0};
};

struct CheckpointStats {
    double t{0.0};
    Moments s11;
    Moments s12_re;
    Moments s12_im;
    Moments purity;
    Moments s11_s22;  // σ11 σ22, used by the localization-time fit
};

struct EnsembleSummary {
    std::size_t n_traj{0};
    std::uint64_t master_seed{0};
    // One entry per record window boundary, t = 0 .. t_final.
    std::vector<CheckpointStats> checkpoints;
    double localization_threshold{0.95};
    double localized_dot1{0.0};
    double localized_dot2{0.0};
    double unresolved{0.0};
    std::vector<ConditionedState> final_states;
    // Hysteresis transitions per trajectory, counted on the checkpoint path.
    std::vector<std::size_t> transition_counts;
    double duration{0.0};
};

// Trajectory i uses the stream (master_seed, i). Partial statistics are
// merged in trajectory order, so the summary is independent of the number
// of workers.
EnsembleSummary ensemble(const ConditionedState& initial, const QubitHamiltonian& ham,
                         const DetectorModel& det, const SimulationGrid& grid, std::size_t n_traj,
                         std::uint64_t master_seed, const EnsembleOptions& options = {});

// Sliding mean over window_out (an integer multiple m of record.window):
// sample j is the mean of input samples j .. j+m-1. Output has n-m+1 samples.
MeasurementRecord running_window_average(const MeasurementRecord& record, double window_out);

// Prefix means; the last sample is the global mean.
MeasurementRecord cumulative_average(const MeasurementRecord& record);

struct LocalizationFit {
    bool ok{false};
    double tau{0.0};
    std::size_t points{0};
    std::string message;
};

// Fits the ensemble mean of σ11 σ22 to an exponential over its first e-fold
// of decay and returns the decay time. Failures are reported, not thrown.
LocalizationFit localization_time_estimate(const EnsembleSummary& summary);

// Hysteresis crossings of σ11: below `low` to above `high` or back.
std::size_t zeno_transition_count(std::span<const double> s11_path, double low = 0.25,
                                  double high = 0.75);
std::size_t zeno_transition_count(const TrajectoryResult& trajectory, double low = 0.25,
                                  double high = 0.75);

struct SteeringPulse {
    double epsilon_pulse{0.0};
    double h_pulse{0.0};
    double duration{0.0};

    QubitHamiltonian hamiltonian(double hbar = 1.0) const { return {epsilon_pulse, h_pulse, hbar}; }
};

// Bloch direction of the lowest-energy stationary state of the free evolution
// generated by `ham`: (−2H, 0, ε)/sqrt(4H² + ε²). Throws when H = ε = 0.
Bloch ground_state_bloch(const QubitHamiltonian& ham);

// Pulse (detector off) mapping the pure `state` onto `target` (unit Bloch
// vector with zero y component). The rotation axis lies in the x–z plane;
// |H'| is fixed to 1 and the duration carries the rotation angle.
// Throws std::invalid_argument for mixed states.
SteeringPulse steer_to(const ConditionedState& state, const Bloch& target, double hbar = 1.0);

// Moves the electron to dot 1 with certainty.
SteeringPulse steering_pulse(const ConditionedState& state, double hbar = 1.0);

// Prepares the ground state of `target`.
SteeringPulse ground_state_pulse(const ConditionedState& state, const QubitHamiltonian& target);

// Exact unitary propagation under the pulse (no detector, no dephasing).
ConditionedState apply_pulse(const ConditionedState& state, const SteeringPulse& pulse,
                             double hbar = 1.0);

struct Histogram {
    double lo{0.0};
    double hi{1.0};
    std::vector<std::size_t> counts;

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double bin_lo(std::size_t k) const { return lo + bin_width() * static_cast<double>(k); }
    std::size_t total() const;
};

// Histogram of non-overlapping window averages (window = m · record.window)
// taken from every record, starting at the first window with t ≥ t_from.
// Range defaults to the data extent.
Histogram current_distribution(std::span<const MeasurementRecord> records, double window,
                               std::size_t bins, double t_from = 0.0,
                               std::optional<std::pair<double, double>> range = std::nullopt);

// The window averages that feed current_distribution.
std::vector<double> window_averages(const MeasurementRecord& record, double window,
                                    double t_from = 0.0);

}  // namespace dqd
