// bayes.hpp: finite-window Bayesian update of the conditioned state.
//
// A window of length τ yields the averaged current ⟨I⟩, distributed as a
// Gaussian of variance D = S_I/(2τ) around I1 or I2. The diagonal update is
// Bayes' rule; the off-diagonal element is rescaled so that the ratio
// |σ12|/sqrt(σ11 σ22) is conserved.

#pragma once

#include "dqd/core.hpp"
#include "dqd/rng.hpp"

namespace dqd {

struct WindowOutcome {
    double i_avg{0.0};
    double tau{1.0};
};

// D = S_I/(2τ)
double outcome_variance(const DetectorModel& det, double tau);

// P_i(⟨I⟩, τ) = (2πD)^(-1/2) exp(-(⟨I⟩ - I_i)²/2D)
double gaussian_likelihood(const WindowOutcome& outcome, Dot which, const DetectorModel& det);

// Density of ⟨I⟩ for a given state: σ11 P1 + σ22 P2. Independent of σ12.
struct OutcomeDistribution {
    double weight1{1.0};
    double mean1{0.0};
    double mean2{0.0};
    double variance{1.0};  // D, common to both components

    double pdf(double i_avg) const;
    double mean() const;
    double total_variance() const;
};

OutcomeDistribution outcome_distribution(const ConditionedState& state, double tau,
                                         const DetectorModel& det);

// Draws the occupied dot with probability σ11 / σ22, then ⟨I⟩ ~ N(I_i, D).
// Gaussians are not truncated at negative currents.
WindowOutcome sample_outcome(const ConditionedState& state, double tau, const DetectorModel& det,
                             RngStream& rng);

// ln(P1/P2) for the given outcome: -(⟨I⟩ - I0) ΔI 2τ / S_I.
double log_likelihood_ratio(const WindowOutcome& outcome, const DetectorModel& det);

// Bayes rule for σ11 in log-odds form. σ11 ∈ {0, 1} are fixed points.
double bayes_diagonal(double s11, const WindowOutcome& outcome, const DetectorModel& det);
double bayes_diagonal(const ConditionedState& state, const WindowOutcome& outcome,
                      const DetectorModel& det);

// σ12' = σ12 sqrt(σ11' σ22') / sqrt(σ11 σ22). Throws std::invalid_argument for
// σ11 ∈ {0, 1} with σ12 ≠ 0.
Complex update_offdiagonal(const ConditionedState& before, double s11_after);

ConditionedState bayes_step(const ConditionedState& state, const WindowOutcome& outcome,
                            const DetectorModel& det);

// Same update given the log-likelihood ratio directly. Used by the trajectory
// engine so that the hot loop avoids recomputing the detector constants.
ConditionedState bayes_step_llr(const ConditionedState& state, double llr);

}  // namespace dqd
