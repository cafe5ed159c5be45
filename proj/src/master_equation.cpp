#include "dqd/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqd {

namespace {

constexpr Complex kI{0.0, 1.0};

MasterState advance(const MasterState& s, const MasterDerivative& d, double h) {
    return {s.s11 + h * d.ds11, s.s12 + h * d.ds12};
}

MasterState rk4_step(const MasterState& s, const QubitHamiltonian& ham, double gamma_d, double h) {
    const MasterDerivative k1 = rhs(s, ham, gamma_d);
    const MasterDerivative k2 = rhs(advance(s, k1, 0.5 * h), ham, gamma_d);
    const MasterDerivative k3 = rhs(advance(s, k2, 0.5 * h), ham, gamma_d);
    const MasterDerivative k4 = rhs(advance(s, k3, h), ham, gamma_d);
    return {s.s11 + h / 6.0 * (k1.ds11 + 2.0 * k2.ds11 + 2.0 * k3.ds11 + k4.ds11),
            s.s12 + h / 6.0 * (k1.ds12 + 2.0 * k2.ds12 + 2.0 * k3.ds12 + k4.ds12)};
}

std::vector<MasterState> integrate(const MasterState& initial, const QubitHamiltonian& ham,
                                   double gamma_d, double h, std::size_t steps_per_output,
                                   std::size_t n_outputs) {
    std::vector<MasterState> out;
    out.reserve(n_outputs + 1);
    MasterState s = initial;
    out.push_back(s);
    for (std::size_t k = 0; k < n_outputs; ++k) {
        for (std::size_t j = 0; j < steps_per_output; ++j) s = rk4_step(s, ham, gamma_d, h);
        out.push_back(s);
    }
    return out;
}

}  // namespace

MasterDerivative rhs(const MasterState& state, const QubitHamiltonian& ham, double gamma_d) {
    const double h = ham.h_tunnel / ham.hbar;
    const double eps = ham.epsilon / ham.hbar;
    const Complex s21 = std::conj(state.s12);
    MasterDerivative d;
    d.ds11 = (kI * h * (state.s12 - s21)).real();
    d.ds12 = kI * eps * state.s12 + kI * h * (state.s11 - state.s22()) - gamma_d * state.s12;
    return d;
}

MasterSolution solve(const MasterState& initial, const QubitHamiltonian& ham, double gamma_d,
                     const SimulationGrid& grid) {
    grid.validate();
    ham.validate();
    if (!(gamma_d >= 0.0)) throw std::invalid_argument("master equation: gamma_d must be >= 0");
    if (!is_valid(initial, 1e-9)) throw std::invalid_argument("master equation: invalid initial state");

    const std::size_t per_window = grid.steps_per_window();
    const std::size_t n_windows = grid.n_windows();
    const double h = grid.window / static_cast<double>(per_window);

    MasterSolution sol;
    sol.states = integrate(initial, ham, gamma_d, h, per_window, n_windows);
    sol.times.reserve(n_windows + 1);
    for (std::size_t k = 0; k <= n_windows; ++k) sol.times.push_back(grid.window * static_cast<double>(k));

    const auto fine = integrate(initial, ham, gamma_d, 0.5 * h, 2 * per_window, n_windows);
    for (std::size_t k = 0; k < fine.size(); ++k) {
        const MasterState& a = sol.states[k];
        const MasterState& b = fine[k];
        sol.error_estimate = std::max({sol.error_estimate, std::abs(a.s11 - b.s11),
                                       std::abs(a.s12.real() - b.s12.real()),
                                       std::abs(a.s12.imag() - b.s12.imag())});
    }
    return sol;
}

MasterState closed_form_h0(const MasterState& initial, double epsilon, double gamma_d, double t,
                           double hbar) {
    return {initial.s11, initial.s12 * std::exp(Complex{-gamma_d * t, epsilon * t / hbar})};
}

}  // namespace dqd
