#include "dqd/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dqd {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Returns n when value ≈ n·unit for a positive integer n, else 0.
std::size_t integer_ratio(double value, double unit) {
    const double ratio = value / unit;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) return 0;
    return static_cast<std::size_t>(n);
}

}  // namespace

ConditionedState ConditionedState::make(double s11, Complex s12, double tol) {
    ConditionedState s{s11, s12};
    if (!is_valid(s, tol)) {
        std::ostringstream os;
        os << "invalid two-level state: s11=" << s11 << ", s12=" << s12;
        throw std::invalid_argument(os.str());
    }
    return s;
}

bool is_valid(const ConditionedState& state, double tol) {
    if (!finite(state.s11) || !finite(state.s12.real()) || !finite(state.s12.imag())) return false;
    if (state.s11 < -tol || state.s11 > 1.0 + tol) return false;
    return std::norm(state.s12) <= state.s11 * state.s22() + tol;
}

double purity(const ConditionedState& state) {
    const double s22 = state.s22();
    return state.s11 * state.s11 + s22 * s22 + 2.0 * std::norm(state.s12);
}

Bloch bloch(const ConditionedState& state) {
    return {2.0 * state.s12.real(), 2.0 * state.s12.imag(), 2.0 * state.s11 - 1.0};
}

ConditionedState state_from_bloch(const Bloch& r, double tol) {
    const double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (!(len <= 1.0 + tol)) {
        std::ostringstream os;
        os << "Bloch vector length " << len << " exceeds 1";
        throw std::invalid_argument(os.str());
    }
    return {0.5 * (1.0 + r[2]), Complex{0.5 * r[0], 0.5 * r[1]}};
}

double QubitHamiltonian::rabi_frequency() const {
    return std::sqrt(4.0 * h_tunnel * h_tunnel + epsilon * epsilon) / hbar;
}

void QubitHamiltonian::validate() const {
    if (!(hbar > 0.0) || !finite(hbar)) throw std::invalid_argument("hbar must be positive and finite");
    if (!finite(epsilon) || !finite(h_tunnel))
        throw std::invalid_argument("epsilon and h_tunnel must be finite");
}

double DetectorModel::ideal_decoherence_rate() const {
    const double di = delta_i();
    return di * di / (4.0 * s_i);
}

double DetectorModel::decoherence_rate() const { return ideal_decoherence_rate() + gamma_d_extra; }

double DetectorModel::tau_loc() const {
    const double di = delta_i();
    if (di == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * s_i / (di * di);
}

double DetectorModel::tau_dis() const { return tau_loc(); }

double DetectorModel::tau_d() const {
    const double rate = decoherence_rate();
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rate;
}

void DetectorModel::validate() const {
    if (!finite(i1) || !finite(i2) || !(i1 > 0.0) || !(i2 > 0.0))
        throw std::invalid_argument("detector currents i1, i2 must be positive and finite");
    if (!(s_i > 0.0) || !finite(s_i)) throw std::invalid_argument("s_i must be positive and finite");
    if (!(e_charge > 0.0) || !finite(e_charge)) throw std::invalid_argument("e_charge must be positive");
    if (!(gamma_d_extra >= 0.0) || !finite(gamma_d_extra))
        throw std::invalid_argument("gamma_d_extra must be non-negative");
}

std::size_t SimulationGrid::total_steps() const { return n_windows() * steps_per_window(); }

std::size_t SimulationGrid::steps_per_window() const { return integer_ratio(window, dt); }

std::size_t SimulationGrid::n_windows() const { return integer_ratio(t_final, window); }

void SimulationGrid::validate() const {
    if (!(dt > 0.0) || !finite(dt)) throw std::invalid_argument("grid: dt must be positive");
    if (!(t_final >= dt)) throw std::invalid_argument("grid: t_final must be >= dt");
    if (!(window >= dt)) throw std::invalid_argument("grid: window must be >= dt");
    if (steps_per_window() == 0) throw std::invalid_argument("grid: window must be an integer multiple of dt");
    if (n_windows() == 0) throw std::invalid_argument("grid: t_final must be an integer multiple of window");
}

ValidityReport validate_weak_coupling(const DetectorModel& det) {
    ValidityReport r;
    r.check = "weak_coupling";
    r.value = std::abs(det.delta_i()) / det.i0();
    r.threshold = kMuchLessFactor;
    r.pass = r.value <= r.threshold;
    std::ostringstream os;
    os << "|dI|/I0 = " << r.value << (r.pass ? " <= " : " > ") << r.threshold;
    r.message = os.str();
    return r;
}

ValidityReport validate_low_frequency(const QubitHamiltonian& ham, const DetectorModel& det) {
    ValidityReport r;
    r.check = "low_frequency";
    r.value = ham.rabi_frequency();
    r.threshold = kMuchLessFactor * det.s_i / (det.e_charge * det.e_charge);
    r.pass = r.value <= r.threshold;
    std::ostringstream os;
    os << "Omega = " << r.value << (r.pass ? " <= " : " > ") << "0.1 S_I/e^2 = " << r.threshold;
    r.message = os.str();
    return r;
}

double schottky_s_i(double i0, double e_charge, double transparency) {
    if (!(transparency >= 0.0 && transparency < 1.0))
        throw std::invalid_argument("transparency must lie in [0, 1)");
    if (!(i0 > 0.0)) throw std::invalid_argument("i0 must be positive");
    if (transparency == 0.0) return 2.0 * e_charge * i0;
    return 2.0 * e_charge * i0 * (1.0 - transparency);
}

double decoherence_rate(const DetectorModel& det) { return det.decoherence_rate(); }

double coupling_strength(const QubitHamiltonian& ham, const DetectorModel& det) {
    if (ham.h_tunnel == 0.0) throw std::domain_error("coupling parameter undefined for H = 0");
    const double di = det.delta_i();
    return ham.hbar * di * di / (det.s_i * ham.h_tunnel);
}

}  // namespace dqd
