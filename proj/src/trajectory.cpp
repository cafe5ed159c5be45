#include "dqd/trajectory.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dqd {

namespace {

// Per-step measurement constants: ln(P1/P2) = −(⟨I⟩ − I0)·coeff.
struct MeasurementKernel {
    double i0;
    double delta_i;
    double coeff;

    MeasurementKernel(const DetectorModel& det, double dt)
        : i0(det.i0()), delta_i(det.delta_i()), coeff(det.delta_i() * 2.0 * dt / det.s_i) {}

    double mean_current(const ConditionedState& s) const {
        return i0 + 0.5 * delta_i * (s.s22() - s.s11);
    }
    double llr(double i_avg) const { return -(i_avg - i0) * coeff; }
};

ConditionedState split_step(const ConditionedState& state, const MeasurementKernel& kernel,
                            const FreePropagator& free, double i_avg) {
    const ConditionedState measured = bayes_step_llr(state, kernel.llr(i_avg));
    return free.apply(measured);
}

void require_valid(const ConditionedState& s) {
    if (!is_valid(s, 1e-9)) throw std::invalid_argument("trajectory: invalid initial state");
}

}  // namespace

FreePropagator::FreePropagator(const QubitHamiltonian& ham, double gamma_d, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(gamma_d >= 0.0)) throw std::invalid_argument("gamma_d must be non-negative");
    const double wx = -2.0 * ham.h_tunnel / ham.hbar;
    const double wz = ham.epsilon / ham.hbar;
    identity_ = wx == 0.0 && wz == 0.0 && gamma_d == 0.0;
    phase_only_ = wx == 0.0;
    phase_factor_ = std::exp(Complex{-gamma_d * dt, wz * dt});

    Eigen::Matrix3d gen;
    // ω × r with ω = (wx, 0, wz), plus dephasing of the transverse components.
    gen << -gamma_d, -wz, 0.0,
           wz, -gamma_d, -wx,
           0.0, wx, 0.0;
    const Eigen::Matrix3d prop = (gen * dt).exp();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m_[static_cast<std::size_t>(3 * i + j)] = prop(i, j);
}

Bloch FreePropagator::apply(const Bloch& r) const {
    if (identity_) return r;
    return {m_[0] * r[0] + m_[1] * r[1] + m_[2] * r[2],
            m_[3] * r[0] + m_[4] * r[1] + m_[5] * r[2],
            m_[6] * r[0] + m_[7] * r[1] + m_[8] * r[2]};
}

ConditionedState FreePropagator::apply(const ConditionedState& state) const {
    if (identity_) return state;
    if (phase_only_) return {state.s11, state.s12 * phase_factor_};
    const Bloch r = apply(bloch(state));
    // Rotations preserve |r| only up to rounding; clamp onto the ball.
    double s11 = 0.5 * (1.0 + r[2]);
    s11 = std::clamp(s11, 0.0, 1.0);
    Complex s12{0.5 * r[0], 0.5 * r[1]};
    const double bound = s11 * (1.0 - s11);
    const double n2 = std::norm(s12);
    if (n2 > bound) s12 *= std::sqrt(bound / n2);
    return {s11, s12};
}

double noise_increment(const DetectorModel& det, double dt, RngStream& rng) {
    return std::sqrt(det.s_i / (2.0 * dt)) * rng.normal();
}

double detector_sample(const ConditionedState& state, const DetectorModel& det, double xi) {
    return det.i0() + 0.5 * det.delta_i() * (state.s22() - state.s11) + xi;
}

ValidityReport check_step_size(const QubitHamiltonian& ham, const DetectorModel& det, double dt) {
    double limit = std::numeric_limits<double>::infinity();
    limit = std::min(limit, det.tau_loc());
    const double omega = ham.rabi_frequency();
    if (omega > 0.0) limit = std::min(limit, 1.0 / omega);
    if (det.gamma_d_extra > 0.0) limit = std::min(limit, 1.0 / det.gamma_d_extra);

    ValidityReport r;
    r.check = "step_size";
    r.value = dt;
    r.threshold = 0.05 * limit;
    r.pass = dt <= r.threshold;
    std::ostringstream os;
    os << "dt = " << dt << (r.pass ? " <= " : " > ") << "0.05 min(tau_loc, 1/Omega, 1/gamma_d) = "
       << r.threshold;
    r.message = os.str();
    return r;
}

ConditionedState step(const ConditionedState& state, const QubitHamiltonian& ham,
                      const DetectorModel& det, double dt, double xi) {
    return step_with_outcome(state, ham, det, dt, detector_sample(state, det, xi));
}

ConditionedState step_with_outcome(const ConditionedState& state, const QubitHamiltonian& ham,
                                   const DetectorModel& det, double dt, double i_avg) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    require_valid(state);
    const MeasurementKernel kernel(det, dt);
    const FreePropagator free(ham, det.gamma_d_extra, dt);
    return split_step(state, kernel, free, i_avg);
}

TrajectoryResult run_trajectory(const ConditionedState& initial, const QubitHamiltonian& ham,
                                const DetectorModel& det, const SimulationGrid& grid,
                                const TrajectoryOptions& options) {
    grid.validate();
    ham.validate();
    det.validate();
    require_valid(initial);

    TrajectoryResult out;
    out.grid = grid;
    out.seed = grid.seed;
    out.stream_index = options.stream_index;
    for (const auto& report : {validate_weak_coupling(det), validate_low_frequency(ham, det),
                               check_step_size(ham, det, grid.dt)}) {
        if (!report.pass) out.warnings.push_back(report.check + ": " + report.message);
    }

    const std::size_t n_windows = grid.n_windows();
    const std::size_t per_window = grid.steps_per_window();
    const double dt = grid.window / static_cast<double>(per_window);
    const MeasurementKernel kernel(det, dt);
    const FreePropagator free(ham, det.gamma_d_extra, dt);
    const double noise_sd = std::sqrt(det.s_i / (2.0 * dt));
    RngStream rng(grid.seed, options.stream_index);

    out.states.reserve(n_windows + 1);
    out.record.t0 = 0.0;
    out.record.window = grid.window;
    out.record.samples.reserve(n_windows);
    if (options.keep_fine_record) {
        out.fine_record = MeasurementRecord{0.0, dt, {}};
        out.fine_record->samples.reserve(n_windows * per_window);
    }

    ConditionedState state = initial;
    out.states.push_back(state);
    for (std::size_t w = 0; w < n_windows; ++w) {
        double current_sum = 0.0;
        for (std::size_t k = 0; k < per_window; ++k) {
            double i_avg;
            if (options.record_model == RecordModel::kLangevin) {
                i_avg = kernel.mean_current(state) + noise_sd * rng.normal();
            } else {
                i_avg = sample_outcome(state, dt, det, rng).i_avg;
            }
            state = split_step(state, kernel, free, i_avg);
            current_sum += i_avg;
            if (i_avg < 0.0) ++out.negative_samples;
            if (options.keep_fine_record) out.fine_record->samples.push_back(i_avg);
        }
        out.record.samples.push_back(current_sum / static_cast<double>(per_window));
        out.states.push_back(state);
    }
    return out;
}

std::vector<ConditionedState> reconstruct_from_record(const ConditionedState& initial,
                                                      const QubitHamiltonian& ham,
                                                      const DetectorModel& det,
                                                      const MeasurementRecord& record,
                                                      std::size_t substeps) {
    if (substeps == 0) throw std::invalid_argument("reconstruct: substeps must be >= 1");
    if (!(record.window > 0.0)) throw std::invalid_argument("reconstruct: record window must be positive");
    ham.validate();
    det.validate();
    require_valid(initial);

    const double dt = record.window / static_cast<double>(substeps);
    const MeasurementKernel kernel(det, dt);
    const FreePropagator free(ham, det.gamma_d_extra, dt);

    std::vector<ConditionedState> path;
    path.reserve(record.samples.size() + 1);
    ConditionedState state = initial;
    path.push_back(state);
    for (double i_avg : record.samples) {
        if (!std::isfinite(i_avg)) throw std::invalid_argument("reconstruct: non-finite record sample");
        for (std::size_t k = 0; k < substeps; ++k) state = split_step(state, kernel, free, i_avg);
        path.push_back(state);
    }
    return path;
}

TrajectoryResult purify_from_mixed(const DetectorModel& det, const QubitHamiltonian& ham,
                                   const SimulationGrid& grid, const TrajectoryOptions& options) {
    if (det.gamma_d_extra > 0.0)
        throw std::invalid_argument(
            "purify_from_mixed: gamma_d_extra > 0 discards information, so the conditioned state "
            "cannot become pure");
    return run_trajectory(ConditionedState::maximally_mixed(), ham, det, grid, options);
}

}  // namespace dqd
