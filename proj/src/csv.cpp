#include "dqd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dqd::csv {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("csv: cannot parse number '" + s + "'");
    return v;
}

// Rows of the body after checking the header; blank lines are skipped.
std::vector<std::vector<double>> parse_table(const std::string& text, const char* header) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw std::runtime_error("csv: expected header '" + std::string(header) + "', got '" + line + "'");
    const std::size_t columns = split(line, ',').size();
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != columns) throw std::runtime_error("csv: wrong column count in '" + line + "'");
        std::vector<double> row;
        row.reserve(columns);
        for (const auto& f : fields) row.push_back(parse_double(f));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
    return std::string(buf, ptr);
}

std::string states_to_csv(const std::vector<double>& times, const std::vector<ConditionedState>& states) {
    if (times.size() != states.size()) throw std::invalid_argument("csv: times and states differ in length");
    std::string out = kStatesHeader;
    out += '\n';
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        out += format_number(times[k]) + ',' + format_number(s.s11) + ',' + format_number(s.s12.real()) + ',' +
               format_number(s.s12.imag()) + ',' + format_number(purity(s)) + '\n';
    }
    return out;
}

std::string record_to_csv(const MeasurementRecord& record) {
    std::string out = kRecordHeader;
    out += '\n';
    for (std::size_t k = 0; k < record.samples.size(); ++k)
        out += format_number(record.time_of(k)) + ',' + format_number(record.samples[k]) + '\n';
    return out;
}

std::string summary_to_csv(const EnsembleSummary& summary) {
    std::string out = kSummaryHeader;
    out += '\n';
    const std::string n = std::to_string(summary.n_traj);
    for (const auto& c : summary.checkpoints) {
        out += format_number(c.t) + ',' + n + ',' + format_number(c.s11.mean) + ',' + format_number(c.s11.variance()) +
               ',' + format_number(c.s12_re.mean) + ',' + format_number(c.s12_re.variance()) + ',' +
               format_number(c.s12_im.mean) + ',' + format_number(c.s12_im.variance()) + ',' +
               format_number(c.purity.mean) + ',' + format_number(c.s11_s22.mean) + '\n';
    }
    return out;
}

std::string localization_to_csv(const EnsembleSummary& summary) {
    double mean_transitions = 0.0;
    for (auto c : summary.transition_counts) mean_transitions += static_cast<double>(c);
    if (!summary.transition_counts.empty())
        mean_transitions /= static_cast<double>(summary.transition_counts.size());
    std::string out = kLocalizationHeader;
    out += '\n';
    out += std::to_string(summary.n_traj) + ',' + format_number(summary.localization_threshold) + ',' +
           format_number(summary.localized_dot1) + ',' + format_number(summary.localized_dot2) + ',' +
           format_number(summary.unresolved) + ',' + format_number(mean_transitions) + '\n';
    return out;
}

std::string histogram_to_csv(const Histogram& histogram) {
    std::string out = kHistogramHeader;
    out += '\n';
    for (std::size_t k = 0; k < histogram.counts.size(); ++k) {
        out += format_number(histogram.bin_lo(k)) + ',' + format_number(histogram.bin_lo(k + 1)) + ',' +
               std::to_string(histogram.counts[k]) + '\n';
    }
    return out;
}

std::vector<StateRow> parse_states(const std::string& text) {
    std::vector<StateRow> out;
    for (const auto& row : parse_table(text, kStatesHeader)) {
        const ConditionedState s{row[1], Complex{row[2], row[3]}};
        if (!is_valid(s, 1e-9)) throw std::runtime_error("csv: state row violates positivity");
        out.push_back({row[0], s});
    }
    return out;
}

MeasurementRecord parse_record(const std::string& text, std::optional<double> window) {
    const auto rows = parse_table(text, kRecordHeader);
    if (rows.empty()) throw std::runtime_error("csv: record has no samples");
    MeasurementRecord rec;
    rec.t0 = rows.front()[0];
    if (window) {
        rec.window = *window;
    } else if (rows.size() >= 2) {
        rec.window = rows[1][0] - rows[0][0];
    } else {
        throw std::runtime_error("csv: single-sample record needs an explicit window");
    }
    if (!(rec.window > 0.0)) throw std::runtime_error("csv: record window must be positive");
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double expected = rec.time_of(k);
        if (std::abs(rows[k][0] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
            throw std::runtime_error("csv: record rows are not evenly spaced by the window");
        if (!std::isfinite(rows[k][1])) throw std::runtime_error("csv: non-finite current sample");
        rec.samples.push_back(rows[k][1]);
    }
    return rec;
}

EnsembleSummary parse_summary(const std::string& text) {
    EnsembleSummary summary;
    for (const auto& row : parse_table(text, kSummaryHeader)) {
        CheckpointStats c;
        c.t = row[0];
        const auto n = static_cast<std::size_t>(row[1]);
        summary.n_traj = n;
        auto moments = [n](double mean, double var) {
            return Moments{n, mean, var * static_cast<double>(n)};
        };
        c.s11 = moments(row[2], row[3]);
        c.s12_re = moments(row[4], row[5]);
        c.s12_im = moments(row[6], row[7]);
        c.purity = moments(row[8], 0.0);
        c.s11_s22 = moments(row[9], 0.0);
        summary.checkpoints.push_back(c);
    }
    if (!summary.checkpoints.empty()) summary.duration = summary.checkpoints.back().t;
    return summary;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace dqd::csv
