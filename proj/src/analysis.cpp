#include "dqd/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dqd/parallel.hpp"

namespace dqd {

void Moments::add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void Moments::merge(const Moments& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double total = na + nb;
    const double delta = other.mean - mean;
    mean += delta * nb / total;
    m2 += other.m2 + delta * delta * na * nb / total;
    n += other.n;
}

double Moments::variance() const { return n < 2 ? 0.0 : m2 / static_cast<double>(n); }

double Moments::standard_error() const {
    return n < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
}

namespace {

constexpr std::size_t kBlockSize = 64;

struct BlockResult {
    std::vector<CheckpointStats> checkpoints;
    std::size_t dot1{0};
    std::size_t dot2{0};
    std::vector<ConditionedState> finals;
    std::vector<std::size_t> transitions;
};

}  // namespace

EnsembleSummary ensemble(const ConditionedState& initial, const QubitHamiltonian& ham,
                         const DetectorModel& det, const SimulationGrid& grid, std::size_t n_traj,
                         std::uint64_t master_seed, const EnsembleOptions& options) {
    if (n_traj == 0) throw std::invalid_argument("ensemble: n_traj must be >= 1");
    grid.validate();
    const std::size_t n_checkpoints = grid.n_windows() + 1;
    const std::size_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
    SimulationGrid traj_grid = grid;
    traj_grid.seed = master_seed;

    std::vector<BlockResult> blocks(n_blocks);
    parallel_for(
        n_blocks,
        [&](std::size_t b) {
            BlockResult& block = blocks[b];
            block.checkpoints.resize(n_checkpoints);
            const std::size_t begin = b * kBlockSize;
            const std::size_t end = std::min(n_traj, begin + kBlockSize);
            for (std::size_t i = begin; i < end; ++i) {
                TrajectoryOptions topts;
                topts.record_model = options.record_model;
                topts.stream_index = i;
                const TrajectoryResult traj = run_trajectory(initial, ham, det, traj_grid, topts);
                for (std::size_t k = 0; k < n_checkpoints; ++k) {
                    const ConditionedState& s = traj.states[k];
                    CheckpointStats& c = block.checkpoints[k];
                    c.s11.add(s.s11);
                    c.s12_re.add(s.s12.real());
                    c.s12_im.add(s.s12.imag());
                    c.purity.add(purity(s));
                    c.s11_s22.add(s.s11 * s.s22());
                }
                const ConditionedState& last = traj.states.back();
                if (last.s11 >= options.localization_threshold) ++block.dot1;
                else if (last.s22() >= options.localization_threshold) ++block.dot2;
                block.finals.push_back(last);
                block.transitions.push_back(
                    zeno_transition_count(traj, options.zeno_low, options.zeno_high));
            }
        },
        options.workers);

    EnsembleSummary summary;
    summary.n_traj = n_traj;
    summary.master_seed = master_seed;
    summary.localization_threshold = options.localization_threshold;
    summary.duration = grid.window * static_cast<double>(grid.n_windows());
    summary.checkpoints.resize(n_checkpoints);
    for (std::size_t k = 0; k < n_checkpoints; ++k)
        summary.checkpoints[k].t = grid.window * static_cast<double>(k);
    std::size_t dot1 = 0, dot2 = 0;
    summary.final_states.reserve(n_traj);
    summary.transition_counts.reserve(n_traj);
    for (const BlockResult& block : blocks) {
        for (std::size_t k = 0; k < n_checkpoints; ++k) {
            CheckpointStats& c = summary.checkpoints[k];
            const CheckpointStats& p = block.checkpoints[k];
            c.s11.merge(p.s11);
            c.s12_re.merge(p.s12_re);
            c.s12_im.merge(p.s12_im);
            c.purity.merge(p.purity);
            c.s11_s22.merge(p.s11_s22);
        }
        dot1 += block.dot1;
        dot2 += block.dot2;
        summary.final_states.insert(summary.final_states.end(), block.finals.begin(), block.finals.end());
        summary.transition_counts.insert(summary.transition_counts.end(), block.transitions.begin(),
                                         block.transitions.end());
    }
    const double n = static_cast<double>(n_traj);
    summary.localized_dot1 = static_cast<double>(dot1) / n;
    summary.localized_dot2 = static_cast<double>(dot2) / n;
    summary.unresolved = static_cast<double>(n_traj - dot1 - dot2) / n;
    return summary;
}

MeasurementRecord running_window_average(const MeasurementRecord& record, double window_out) {
    if (!(record.window > 0.0)) throw std::invalid_argument("running average: record window must be > 0");
    const double ratio = window_out / record.window;
    const double m_real = std::round(ratio);
    if (m_real < 1.0 || std::abs(ratio - m_real) > 1e-9 * m_real)
        throw std::invalid_argument("running average: window must be an integer multiple of the record window");
    const auto m = static_cast<std::size_t>(m_real);
    if (m > record.samples.size())
        throw std::invalid_argument("running average: window longer than the record");

    MeasurementRecord out{record.t0, window_out, {}};
    out.samples.reserve(record.samples.size() - m + 1);
    for (std::size_t j = 0; j + m <= record.samples.size(); ++j) {
        double sum = 0.0;
        for (std::size_t k = j; k < j + m; ++k) sum += record.samples[k];
        out.samples.push_back(sum / static_cast<double>(m));
    }
    return out;
}

MeasurementRecord cumulative_average(const MeasurementRecord& record) {
    if (record.samples.empty()) throw std::invalid_argument("cumulative average: empty record");
    MeasurementRecord out{record.t0, record.window, {}};
    out.samples.reserve(record.samples.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < record.samples.size(); ++k) {
        sum += record.samples[k];
        out.samples.push_back(sum / static_cast<double>(k + 1));
    }
    return out;
}

LocalizationFit localization_time_estimate(const EnsembleSummary& summary) {
    LocalizationFit fit;
    if (summary.checkpoints.empty()) {
        fit.message = "empty summary";
        return fit;
    }
    const double y0 = summary.checkpoints.front().s11_s22.mean;
    if (!(y0 > 0.0)) {
        fit.message = "initial s11*s22 is zero; nothing to localize";
        return fit;
    }
    // Points over the first e-fold; a quadratic in ln y captures the slowing
    // decay, and its linear coefficient is the exponential factor at t0.
    std::vector<double> ts, ys;
    const double t0 = summary.checkpoints.front().t;
    for (const auto& c : summary.checkpoints) {
        const double y = c.s11_s22.mean;
        if (!(y > 0.0) || y < y0 * std::exp(-1.0)) break;
        ts.push_back(c.t - t0);
        ys.push_back(std::log(y));
    }
    fit.points = ts.size();
    if (ts.size() < 4) {
        fit.message = "fewer than 4 checkpoints before the first e-fold; refine the window";
        return fit;
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(ts.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        a(r, 0) = 1.0;
        a(r, 1) = ts[i];
        a(r, 2) = ts[i] * ts[i];
        b(r) = ys[i];
    }
    const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
    if (!(coef(1) < 0.0)) {
        fit.message = "mean s11*s22 is not decaying";
        return fit;
    }
    fit.ok = true;
    fit.tau = -1.0 / coef(1);
    fit.message = "ok";
    return fit;
}

std::size_t zeno_transition_count(std::span<const double> s11_path, double low, double high) {
    if (!(low > 0.0 && low < high && high < 1.0))
        throw std::invalid_argument("transition count: need 0 < low < high < 1");
    enum class Side { kUnknown, kLow, kHigh };
    Side side = Side::kUnknown;
    std::size_t count = 0;
    for (double s : s11_path) {
        if (s <= low) {
            if (side == Side::kHigh) ++count;
            side = Side::kLow;
        } else if (s >= high) {
            if (side == Side::kLow) ++count;
            side = Side::kHigh;
        }
    }
    return count;
}

std::size_t zeno_transition_count(const TrajectoryResult& trajectory, double low, double high) {
    std::vector<double> path;
    path.reserve(trajectory.states.size());
    for (const auto& s : trajectory.states) path.push_back(s.s11);
    return zeno_transition_count(path, low, high);
}

Bloch ground_state_bloch(const QubitHamiltonian& ham) {
    const double norm = std::hypot(2.0 * ham.h_tunnel, ham.epsilon);
    if (norm == 0.0) throw std::invalid_argument("ground state undefined for H = epsilon = 0");
    return {-2.0 * ham.h_tunnel / norm, 0.0, ham.epsilon / norm};
}

namespace {

double dot(const Bloch& a, const Bloch& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Bloch cross(const Bloch& a, const Bloch& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Bloch unit(const Bloch& v) {
    const double n = std::sqrt(dot(v, v));
    return {v[0] / n, v[1] / n, v[2] / n};
}

constexpr double kPureTol = 1e-6;

}  // namespace

SteeringPulse steer_to(const ConditionedState& state, const Bloch& target, double hbar) {
    if (!(hbar > 0.0)) throw std::invalid_argument("steering: hbar must be positive");
    if (purity(state) < 1.0 - kPureTol)
        throw std::invalid_argument("steering requires a pure state (purity >= 1 - 1e-6)");
    if (std::abs(target[1]) > 1e-12 || std::abs(std::sqrt(dot(target, target)) - 1.0) > 1e-9)
        throw std::invalid_argument("steering target must be a unit vector in the x-z plane");

    const Bloch r = unit(bloch(state));
    const Bloch g = unit(target);
    const Bloch d{r[0] - g[0], r[1] - g[1], r[2] - g[2]};
    if (std::sqrt(dot(d, d)) < 1e-12) return {0.0, 1.0, 0.0};

    // Axis in the x–z plane, orthogonal to r − g: both vectors then have the
    // same projection on it and one rotation about it maps r onto g.
    Bloch axis{d[2], 0.0, -d[0]};
    const double axis_norm = std::sqrt(dot(axis, axis));
    if (axis_norm < 1e-14) throw std::logic_error("steering: no x-z axis maps the state onto the target");
    axis = unit(axis);

    // Rotation axis of the free evolution is (−2H', 0, ε')/ħ; orienting the
    // axis with a negative x component gives H' > 0.
    if (axis[0] > 0.0 || (axis[0] == 0.0 && axis[2] < 0.0)) axis = {-axis[0], 0.0, -axis[2]};

    const double ar = dot(axis, r);
    const double ag = dot(axis, g);
    const Bloch u{r[0] - ar * axis[0], r[1] - ar * axis[1], r[2] - ar * axis[2]};
    const Bloch v{g[0] - ag * axis[0], g[1] - ag * axis[1], g[2] - ag * axis[2]};
    double angle = std::atan2(dot(axis, cross(u, v)), dot(u, v));
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;

    SteeringPulse pulse;
    double omega;
    if (std::abs(axis[0]) > 1e-15) {
        pulse.h_pulse = 1.0;
        omega = 2.0 * pulse.h_pulse / (hbar * std::abs(axis[0]));
        pulse.epsilon_pulse = hbar * omega * axis[2];
    } else {
        pulse.h_pulse = 0.0;
        pulse.epsilon_pulse = 1.0;
        omega = 1.0 / hbar;
    }
    pulse.duration = angle / omega;
    return pulse;
}

SteeringPulse steering_pulse(const ConditionedState& state, double hbar) {
    return steer_to(state, {0.0, 0.0, 1.0}, hbar);
}

SteeringPulse ground_state_pulse(const ConditionedState& state, const QubitHamiltonian& target) {
    target.validate();
    return steer_to(state, ground_state_bloch(target), target.hbar);
}

ConditionedState apply_pulse(const ConditionedState& state, const SteeringPulse& pulse, double hbar) {
    if (pulse.duration == 0.0) return state;
    return FreePropagator(pulse.hamiltonian(hbar), 0.0, pulse.duration).apply(state);
}

std::size_t Histogram::total() const {
    std::size_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

std::vector<double> window_averages(const MeasurementRecord& record, double window, double t_from) {
    const double ratio = window / record.window;
    const double m_real = std::round(ratio);
    if (m_real < 1.0 || std::abs(ratio - m_real) > 1e-9 * m_real)
        throw std::invalid_argument("window must be an integer multiple of the record window");
    const auto m = static_cast<std::size_t>(m_real);
    std::size_t start = 0;
    while (start < record.samples.size() && record.time_of(start) < t_from - 1e-12 * record.window) ++start;
    std::vector<double> out;
    for (std::size_t j = start; j + m <= record.samples.size(); j += m) {
        double sum = 0.0;
        for (std::size_t k = j; k < j + m; ++k) sum += record.samples[k];
        out.push_back(sum / static_cast<double>(m));
    }
    return out;
}

Histogram current_distribution(std::span<const MeasurementRecord> records, double window,
                               std::size_t bins, double t_from,
                               std::optional<std::pair<double, double>> range) {
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    std::vector<double> values;
    for (const auto& rec : records) {
        const auto w = window_averages(rec, window, t_from);
        values.insert(values.end(), w.begin(), w.end());
    }
    Histogram h;
    h.counts.assign(bins, 0);
    if (range) {
        h.lo = range->first;
        h.hi = range->second;
    } else if (!values.empty()) {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        h.lo = *mn;
        h.hi = *mx;
        if (h.hi == h.lo) h.hi = h.lo + 1.0;
    }
    if (!(h.hi > h.lo)) throw std::invalid_argument("histogram range must be non-empty");
    for (double v : values) {
        if (v < h.lo || v > h.hi) continue;
        auto k = static_cast<std::size_t>((v - h.lo) / h.bin_width());
        if (k >= bins) k = bins - 1;
        ++h.counts[k];
    }
    return h;
}

}  // namespace dqd
