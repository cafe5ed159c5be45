#include "dqd/bayes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dqd {

namespace {

constexpr double kFixedPointTol = 1e-12;

bool at_fixed_point(double s11) { return s11 <= 0.0 || s11 >= 1.0; }

}  // namespace

double outcome_variance(const DetectorModel& det, double tau) { return det.s_i / (2.0 * tau); }

double gaussian_likelihood(const WindowOutcome& outcome, Dot which, const DetectorModel& det) {
    const double d = outcome_variance(det, outcome.tau);
    const double mean = which == Dot::kFirst ? det.i1 : det.i2;
    const double dev = outcome.i_avg - mean;
    return std::exp(-dev * dev / (2.0 * d)) / std::sqrt(2.0 * std::numbers::pi * d);
}

double OutcomeDistribution::pdf(double i_avg) const {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
    const double d1 = i_avg - mean1;
    const double d2 = i_avg - mean2;
    return norm * (weight1 * std::exp(-d1 * d1 / (2.0 * variance)) +
                   (1.0 - weight1) * std::exp(-d2 * d2 / (2.0 * variance)));
}

double OutcomeDistribution::mean() const { return weight1 * mean1 + (1.0 - weight1) * mean2; }

double OutcomeDistribution::total_variance() const {
    const double gap = mean2 - mean1;
    return variance + weight1 * (1.0 - weight1) * gap * gap;
}

OutcomeDistribution outcome_distribution(const ConditionedState& state, double tau,
                                         const DetectorModel& det) {
    return {state.s11, det.i1, det.i2, outcome_variance(det, tau)};
}

WindowOutcome sample_outcome(const ConditionedState& state, double tau, const DetectorModel& det,
                             RngStream& rng) {
    const double mean = rng.uniform() < state.s11 ? det.i1 : det.i2;
    return {mean + std::sqrt(outcome_variance(det, tau)) * rng.normal(), tau};
}

double log_likelihood_ratio(const WindowOutcome& outcome, const DetectorModel& det) {
    return -(outcome.i_avg - det.i0()) * det.delta_i() * 2.0 * outcome.tau / det.s_i;
}

double bayes_diagonal(double s11, const WindowOutcome& outcome, const DetectorModel& det) {
    if (at_fixed_point(s11)) return s11;
    const double logit = std::log(s11) - std::log1p(-s11) + log_likelihood_ratio(outcome, det);
    return 1.0 / (1.0 + std::exp(-logit));
}

double bayes_diagonal(const ConditionedState& state, const WindowOutcome& outcome,
                      const DetectorModel& det) {
    return bayes_diagonal(state.s11, outcome, det);
}

Complex update_offdiagonal(const ConditionedState& before, double s11_after) {
    if (at_fixed_point(before.s11)) {
        if (std::norm(before.s12) > kFixedPointTol)
            throw std::invalid_argument("off-diagonal element must vanish when s11 is 0 or 1");
        return before.s12;
    }
    if (before.s12 == Complex{0.0, 0.0}) return before.s12;
    const double scale = std::sqrt(s11_after * (1.0 - s11_after) / (before.s11 * before.s22()));
    return before.s12 * scale;
}

ConditionedState bayes_step(const ConditionedState& state, const WindowOutcome& outcome,
                            const DetectorModel& det) {
    if (at_fixed_point(state.s11)) {
        update_offdiagonal(state, state.s11);  // validates
        return state;
    }
    return bayes_step_llr(state, log_likelihood_ratio(outcome, det));
}

ConditionedState bayes_step_llr(const ConditionedState& state, double llr) {
    if (at_fixed_point(state.s11) || llr == 0.0) return state;
    const double s22 = state.s22();
    const double logit = std::log(state.s11) - std::log(s22) + llr;
    const double p1 = 1.0 / (1.0 + std::exp(-logit));
    // σ22 is read back as 1 − σ11, so scale with that value to keep the
    // purity fraction and the positivity bound exact for the stored state.
    const double scale = std::sqrt((p1 * (1.0 - p1)) / (state.s11 * s22));
    return {p1, state.s12 * scale};
}

}  // namespace dqd
