#include "dqd/runner.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

#include "dqd/analysis.hpp"
#include "dqd/csv.hpp"
#include "dqd/master_equation.hpp"
#include "dqd/trajectory.hpp"

namespace dqd {

namespace {

namespace fs = std::filesystem;

std::vector<double> window_times(const SimulationGrid& grid, std::size_t n) {
    std::vector<double> t;
    t.reserve(n);
    for (std::size_t k = 0; k < n; ++k) t.push_back(grid.window * static_cast<double>(k));
    return t;
}

struct OutputDir {
    fs::path dir;
    RunOutcome* outcome;

    void write(const std::string& name, const std::string& contents) const {
        const fs::path p = dir / name;
        csv::write_file(p.string(), contents);
        outcome->files.push_back(p.string());
    }
};

void report_trajectory(const TrajectoryResult& traj, std::ostream& diag) {
    for (const auto& w : traj.warnings) diag << "warning: " << w << '\n';
    const double steps = static_cast<double>(traj.grid.total_steps());
    diag << "negative per-step current samples: " << traj.negative_samples << " ("
         << static_cast<double>(traj.negative_samples) / steps << " of " << traj.grid.total_steps() << ")\n";
}

TrajectoryOptions trajectory_options(const RunConfig& c) {
    TrajectoryOptions o;
    o.record_model = c.record_model;
    return o;
}

void run_trajectory_mode(const RunConfig& c, const OutputDir& out, std::ostream& diag) {
    const TrajectoryResult traj =
        run_trajectory(c.initial, c.hamiltonian, c.detector, c.grid, trajectory_options(c));
    report_trajectory(traj, diag);
    out.write("states.csv", csv::states_to_csv(window_times(c.grid, traj.states.size()), traj.states));
    out.write("record.csv", csv::record_to_csv(traj.record));

    // Running window S_I/(ΔI)², rounded to whole record windows.
    const double di = c.detector.delta_i();
    std::size_t m = 1;
    if (di != 0.0) m = static_cast<std::size_t>(std::max(1.0, std::round(c.detector.s_i / (di * di) / c.grid.window)));
    if (m <= traj.record.samples.size()) {
        out.write("record_running.csv",
                  csv::record_to_csv(running_window_average(traj.record, c.grid.window * static_cast<double>(m))));
    }
    out.write("record_cumulative.csv", csv::record_to_csv(cumulative_average(traj.record)));
}

void run_ensemble_mode(const RunConfig& c, const OutputDir& out, std::ostream& diag) {
    EnsembleOptions opts;
    opts.record_model = c.record_model;
    const EnsembleSummary summary =
        ensemble(c.initial, c.hamiltonian, c.detector, c.grid, c.ensemble_size, c.grid.seed, opts);
    out.write("summary.csv", csv::summary_to_csv(summary));
    out.write("localization.csv", csv::localization_to_csv(summary));
    diag << "ensemble: n=" << summary.n_traj << " localized dot1=" << summary.localized_dot1
         << " dot2=" << summary.localized_dot2 << " unresolved=" << summary.unresolved << '\n';
}

void run_master_mode(const RunConfig& c, const OutputDir& out, std::ostream& diag) {
    const MasterSolution sol = solve(c.initial, c.hamiltonian, c.detector.decoherence_rate(), c.grid);
    out.write("states.csv", csv::states_to_csv(sol.times, sol.states));
    diag << "master: step-halving error estimate " << sol.error_estimate << '\n';
}

void run_reconstruct_mode(const RunConfig& c, const OutputDir& out, std::ostream&) {
    const MeasurementRecord record = csv::parse_record(csv::read_file(c.record_file));
    const double ratio = record.window / c.grid.dt;
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::round(ratio)));
    const auto path = reconstruct_from_record(c.initial, c.hamiltonian, c.detector, record, substeps);
    std::vector<double> times;
    times.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) times.push_back(record.time_of(k));
    out.write("states.csv", csv::states_to_csv(times, path));
}

void run_steer_mode(const RunConfig& c, const OutputDir& out, std::ostream& diag) {
    const TrajectoryResult traj =
        run_trajectory(c.initial, c.hamiltonian, c.detector, c.grid, trajectory_options(c));
    report_trajectory(traj, diag);
    out.write("states.csv", csv::states_to_csv(window_times(c.grid, traj.states.size()), traj.states));
    out.write("record.csv", csv::record_to_csv(traj.record));

    const ConditionedState before = traj.states.back();
    const SteeringPulse pulse = steering_pulse(before, c.hamiltonian.hbar);
    const ConditionedState after = apply_pulse(before, pulse, c.hamiltonian.hbar);

    // Detector back on with the dots decoupled, for about one localization time.
    SimulationGrid recheck = c.grid;
    const double tau = std::isfinite(c.detector.tau_loc()) ? c.detector.tau_loc() : c.grid.t_final;
    recheck.t_final = c.grid.window * std::max(1.0, std::ceil(tau / c.grid.window - 1e-9));
    TrajectoryOptions ropts = trajectory_options(c);
    ropts.stream_index = 1;
    const TrajectoryResult check =
        run_trajectory(after, QubitHamiltonian{0.0, 0.0, c.hamiltonian.hbar}, c.detector, recheck, ropts);
    double mean_current = 0.0;
    for (double v : check.record.samples) mean_current += v;
    mean_current /= static_cast<double>(check.record.samples.size());

    using csv::format_number;
    std::string text = kSteerHeader;
    text += '\n';
    text += format_number(c.grid.t_final) + ',' + format_number(before.s11) + ',' + format_number(before.s12.real()) +
            ',' + format_number(before.s12.imag()) + ',' + format_number(purity(before)) + ',' +
            format_number(pulse.epsilon_pulse) + ',' + format_number(pulse.h_pulse) + ',' +
            format_number(pulse.duration) + ',' + format_number(after.s11) + ',' + format_number(mean_current) +
            ',' + format_number(check.states.back().s11) + '\n';
    out.write("steer.csv", text);
    diag << "steer: s11 " << before.s11 << " -> " << after.s11 << " after pulse of duration " << pulse.duration
         << "; detector recheck mean current " << mean_current << '\n';
}

}  // namespace

std::vector<ValidityReport> validity_reports(const RunConfig& config) {
    return {validate_weak_coupling(config.detector), validate_low_frequency(config.hamiltonian, config.detector),
            check_step_size(config.hamiltonian, config.detector, config.grid.dt)};
}

RunOutcome run(const RunConfig& config, std::ostream& diag) {
    RunOutcome outcome;
    outcome.reports = validity_reports(config);
    for (const auto& r : outcome.reports)
        diag << (r.pass ? "ok      " : "warning ") << r.check << ": " << r.message << '\n';

    if (config.mode == RunMode::kReconstruct && !fs::exists(config.record_file))
        throw ConfigError("record file '" + config.record_file + "' does not exist");

    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    const OutputDir out{dir, &outcome};
    switch (config.mode) {
        case RunMode::kTrajectory: run_trajectory_mode(config, out, diag); break;
        case RunMode::kEnsemble: run_ensemble_mode(config, out, diag); break;
        case RunMode::kMaster: run_master_mode(config, out, diag); break;
        case RunMode::kReconstruct: run_reconstruct_mode(config, out, diag); break;
        case RunMode::kSteer: run_steer_mode(config, out, diag); break;
    }
    return outcome;
}

}  // namespace dqd
