// master_equation.hpp: ensemble-averaged evolution with dephasing rate Γ_d:
//   σ̇11 = (iH/ħ)(σ12 − σ21),
//   σ̇12 = (iε/ħ) σ12 + (iH/ħ)(σ11 − σ22) − Γ_d σ12.
// Real components: σ̇11 = −(2H/ħ) Im σ12,
//   Re σ̇12 = −(ε/ħ) Im σ12 − Γ_d Re σ12,
//   Im σ̇12 = (ε/ħ) Re σ12 + (H/ħ)(2σ11 − 1) − Γ_d Im σ12.

#pragma once

#include <vector>

#include "dqd/core.hpp"

namespace dqd {

struct MasterDerivative {
    double ds11{0.0};
    Complex ds12{0.0, 0.0};
};

MasterDerivative rhs(const MasterState& state, const QubitHamiltonian& ham, double gamma_d);

struct MasterSolution {
    std::vector<double> times;
    std::vector<MasterState> states;
    // Max componentwise difference against a run with half the step.
    double error_estimate{0.0};
};

// Classical fixed-step RK4 with step grid.dt; output at multiples of grid.window.
MasterSolution solve(const MasterState& initial, const QubitHamiltonian& ham, double gamma_d,
                     const SimulationGrid& grid);

// H = 0: σ11 constant, σ12(t) = σ12(0) exp(iεt/ħ − Γ_d t).
MasterState closed_form_h0(const MasterState& initial, double epsilon, double gamma_d, double t,
                           double hbar = 1.0);

}  // namespace dqd
