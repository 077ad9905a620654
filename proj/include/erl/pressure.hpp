#pragma once

#include <cmath>
#include <stdexcept>

namespace erl {

/// Isentropic constitutive pair p(rho) = a rho^gamma and its potential
/// P(rho) = a rho^gamma / (gamma - 1), which satisfies P'(rho) rho - P(rho) = p(rho).
struct PressureLaw {
    double a = 1.0;
    double gamma = 2.0;

    PressureLaw() = default;
    PressureLaw(double a_, double gamma_) : a(a_), gamma(gamma_) {
        if (a <= 0.0) throw std::invalid_argument("pressure law requires a > 0");
        if (gamma <= 1.0) throw std::invalid_argument("pressure law requires gamma > 1");
    }

    double pressure(double rho) const {
        require_nonnegative(rho);
        return rho == 0.0 ? 0.0 : a * std::pow(rho, gamma);
    }

    double pressure_prime(double rho) const {
        require_nonnegative(rho);
        return rho == 0.0 ? 0.0 : a * gamma * std::pow(rho, gamma - 1.0);
    }

    double potential(double rho) const {
        require_nonnegative(rho);
        return rho == 0.0 ? 0.0 : a / (gamma - 1.0) * std::pow(rho, gamma);
    }

    double potential_prime(double rho) const {
        require_nonnegative(rho);
        return rho == 0.0 ? 0.0 : a * gamma / (gamma - 1.0) * std::pow(rho, gamma - 1.0);
    }

    double potential_second(double rho) const {
        require_nonnegative(rho);
        return rho == 0.0 ? 0.0 : a * gamma * std::pow(rho, gamma - 2.0);
    }

    /// c(rho) = sqrt(p'(rho)) = sqrt(a gamma) rho^((gamma-1)/2).
    double sound_speed(double rho) const {
        require_nonnegative(rho);
        return std::sqrt(a * gamma) * std::pow(rho, 0.5 * (gamma - 1.0));
    }

    bool operator==(const PressureLaw&) const = default;

  private:
    static void require_nonnegative(double rho) {
        if (rho < 0.0) throw std::domain_error("pressure law evaluated at negative density");
    }
};

inline double pressure(const PressureLaw& law, double rho) { return law.pressure(rho); }
inline double pressure_potential(const PressureLaw& law, double rho) { return law.potential(rho); }
inline double pressure_potential_prime(const PressureLaw& law, double rho) {
    return law.potential_prime(rho);
}

}  // namespace erl
