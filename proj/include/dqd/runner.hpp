// runner.hpp: executes a RunConfig and writes its CSV outputs.
//
// Files per mode (schemas in csv.hpp and docs/FORMATS.md):
//   trajectory   states.csv, record.csv, record_running.csv, record_cumulative.csv
//   ensemble:N   summary.csv, localization.csv
//   master       states.csv
//   reconstruct  states.csv
//   steer        states.csv, record.csv, steer.csv

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dqd/config.hpp"

namespace dqd {

inline constexpr const char* kSteerHeader =
    "t_measure,s11_before,s12_re_before,s12_im_before,purity_before,epsilon_pulse,h_pulse,duration,"
    "s11_after,recheck_i_avg,recheck_s11";

struct RunOutcome {
    int exit_code{0};
    std::vector<std::string> files;
    std::vector<ValidityReport> reports;
};

// Validity checks (weak coupling, low frequency, step size) for a config.
std::vector<ValidityReport> validity_reports(const RunConfig& config);

// Writes outputs into config.output_dir (created if needed). Validity
// failures go to `diag` as warnings; errors propagate as exceptions.
RunOutcome run(const RunConfig& config, std::ostream& diag);

}  // namespace dqd
