// csv.hpp: fixed CSV schemas for state paths, detector records, ensemble
// summaries and histograms. Numbers use the shortest round-trip decimal form,
// so every file re-parses into the exact values that produced it.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dqd/analysis.hpp"
#include "dqd/core.hpp"
#include "dqd/trajectory.hpp"

namespace dqd::csv {

inline constexpr const char* kStatesHeader = "t,s11,s12_re,s12_im,purity";
inline constexpr const char* kRecordHeader = "t_window_start,i_avg";
inline constexpr const char* kSummaryHeader =
    "t,n_traj,mean_s11,var_s11,mean_s12_re,var_s12_re,mean_s12_im,var_s12_im,mean_purity,mean_s11_s22";
inline constexpr const char* kLocalizationHeader =
    "n_traj,threshold,dot1_fraction,dot2_fraction,unresolved_fraction,mean_transitions";
inline constexpr const char* kHistogramHeader = "bin_lo,bin_hi,count";

std::string format_number(double v);

struct StateRow {
    double t{0.0};
    ConditionedState state;
};

std::string states_to_csv(const std::vector<double>& times, const std::vector<ConditionedState>& states);
std::string record_to_csv(const MeasurementRecord& record);
std::string summary_to_csv(const EnsembleSummary& summary);
std::string localization_to_csv(const EnsembleSummary& summary);
std::string histogram_to_csv(const Histogram& histogram);

std::vector<StateRow> parse_states(const std::string& text);
// The window is taken from consecutive rows unless given explicitly; a single
// row without an explicit window is rejected.
MeasurementRecord parse_record(const std::string& text, std::optional<double> window = std::nullopt);
EnsembleSummary parse_summary(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dqd::csv
