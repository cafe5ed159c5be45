// core.hpp: domain types, derived rates and validity checks for a double
// quantum dot measured by a weakly coupled point-contact detector.
//
// Unit conventions: hbar is carried by QubitHamiltonian (default 1). Detector
// currents and the shot-noise density S_I are in arbitrary but consistent
// user units. The charge e only enters the validity checks and the Schottky
// helper; the conditioned dynamics depend on (ΔI)^2/S_I, ε/ħ, H/ħ and γ_d.
//
// Bloch convention (shared by every module):
//   x = 2 Re σ12,  y = 2 Im σ12,  z = σ11 − σ22 = 2 σ11 − 1.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>

namespace dqd {

using Complex = std::complex<double>;
using Bloch = std::array<double, 3>;

enum class Dot { kFirst = 1, kSecond = 2 };

// Observer's density matrix of the two-level system. σ22 is never stored.
struct ConditionedState {
    double s11{1.0};
    Complex s12{0.0, 0.0};

    double s22() const { return 1.0 - s11; }
    double s12_re() const { return s12.real(); }
    double s12_im() const { return s12.imag(); }

    // Throws std::invalid_argument unless 0 ≤ s11 ≤ 1 and |σ12|² ≤ s11 s22 + tol.
    static ConditionedState make(double s11, Complex s12, double tol = 1e-12);
    static ConditionedState pure_symmetric() { return {0.5, {0.5, 0.0}}; }
    static ConditionedState maximally_mixed() { return {0.5, {0.0, 0.0}}; }

    bool operator==(const ConditionedState&) const = default;
};

// The ensemble-averaged state of the master equation uses the same layout.
using MasterState = ConditionedState;

bool is_valid(const ConditionedState& state, double tol = 1e-12);

double purity(const ConditionedState& state);
Bloch bloch(const ConditionedState& state);
// Rejects |r| > 1 + tol.
ConditionedState state_from_bloch(const Bloch& r, double tol = 1e-12);

struct QubitHamiltonian {
    double epsilon{0.0};   // energy asymmetry between the dots
    double h_tunnel{0.0};  // tunnel coupling (real)
    double hbar{1.0};

    // Ω = sqrt(4H² + ε²)/ħ
    double rabi_frequency() const;
    void validate() const;

    bool operator==(const QubitHamiltonian&) const = default;
};

struct DetectorModel {
    double i1{1.0};             // current with dot 1 occupied
    double i2{1.0};             // current with dot 2 occupied
    double s_i{1.0};            // low-frequency shot-noise spectral density
    double e_charge{1.0};
    double gamma_d_extra{0.0};  // extra dephasing of a nonideal detector

    double delta_i() const { return i2 - i1; }
    double i0() const { return 0.5 * (i1 + i2); }

    // (ΔI)²/(4 S_I): the dephasing an ideal detector must cause.
    double ideal_decoherence_rate() const;
    // Γ_d = (ΔI)²/(4 S_I) + γ_d
    double decoherence_rate() const;
    // τ_loc = τ_dis = 2 S_I/(ΔI)²; infinite when ΔI = 0.
    double tau_loc() const;
    double tau_dis() const;
    // τ_d = 1/Γ_d
    double tau_d() const;

    void validate() const;

    bool operator==(const DetectorModel&) const = default;
};

struct SimulationGrid {
    double dt{1e-3};
    double t_final{1.0};
    double window{1e-3};
    std::uint64_t seed{0};

    std::size_t total_steps() const;
    std::size_t steps_per_window() const;
    std::size_t n_windows() const;
    // Throws std::invalid_argument when dt, window and t_final do not tile.
    void validate() const;

    bool operator==(const SimulationGrid&) const = default;
};

struct ValidityReport {
    std::string check;
    bool pass{true};
    double value{0.0};      // left-hand side of the condition
    double threshold{0.0};  // right-hand side
    std::string message;
};

// Factor standing in for "≪" in every asymptotic condition.
inline constexpr double kMuchLessFactor = 0.1;

// |ΔI|/I0 ≤ 0.1
ValidityReport validate_weak_coupling(const DetectorModel& det);
// Ω ≤ 0.1 S_I/e²
ValidityReport validate_low_frequency(const QubitHamiltonian& ham, const DetectorModel& det);

// S_I = 2 e I0 (1 − 𝒯); rejects 𝒯 outside [0, 1) and i0 ≤ 0.
double schottky_s_i(double i0, double e_charge, double transparency = 0.0);

double decoherence_rate(const DetectorModel& det);

// 𝒞 = ħ (ΔI)² / (S_I H); throws std::domain_error when H = 0.
double coupling_strength(const QubitHamiltonian& ham, const DetectorModel& det);

}  // namespace dqd
