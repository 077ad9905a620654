#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "erl/state.hpp"
#include "erl/test_functions.hpp"

namespace erl {

/// Defect of the integral identities for one test function: the space-time
/// integral side minus the boundary-term side, for the mass equation and for
/// the momentum equation tested against phi e_d per direction d.
struct WeakResidual {
    double continuity = 0.0;
    std::array<double, 3> momentum{0.0, 0.0, 0.0};

    double momentum_max(int dim) const {
        double m = 0.0;
        for (int a = 0; a < dim; ++a) m = std::max(m, std::abs(momentum[a]));
        return m;
    }
};

/// Evaluates the weak-form defects at time tau (snapped to the nearest stored
/// snapshot). Time integrals use the trapezoid rule over stored snapshots.
inline std::vector<WeakResidual> weak_residual(const Trajectory& traj,
                                               const TestFunctionBasis& basis, double tau) {
    if (traj.states.size() < 2) throw std::invalid_argument("trajectory too short");
    if (!traj.covers(tau)) throw std::out_of_range("tau outside trajectory span");

    const TorusGrid& grid = traj.grid;
    const PressureLaw& law = traj.law;
    const std::size_t n = grid.num_cells();
    const double vol = grid.cell_volume();

    std::size_t i_tau = 0;
    for (std::size_t i = 1; i < traj.states.size(); ++i)
        if (std::abs(traj.states[i].time - tau) < std::abs(traj.states[i_tau].time - tau)) i_tau = i;

    std::vector<WeakResidual> out(basis.members.size());
    std::vector<double> phi(n), grad[3];
    for (int a = 0; a < grid.dim; ++a) grad[a].resize(n);

    for (std::size_t b = 0; b < basis.members.size(); ++b) {
        const auto& tf = basis.members[b];
        for (std::size_t c = 0; c < n; ++c) {
            phi[c] = tf.spatial(grid, c);
            for (int a = 0; a < grid.dim; ++a) grad[a][c] = tf.spatial_grad(grid, c, a);
        }

        // per-snapshot spatial integrands
        auto mass_row = [&](const FluidState& s, double& d_dt_part, double& grad_part) {
            double acc_t = 0.0, acc_g = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                acc_t += s.rho[c] * phi[c];
                for (int a = 0; a < grid.dim; ++a) acc_g += s.m[a][c] * grad[a][c];
            }
            d_dt_part = acc_t * vol;
            grad_part = acc_g * vol;
        };
        auto momentum_row = [&](const FluidState& s, int d, double& d_dt_part, double& grad_part) {
            double acc_t = 0.0, acc_g = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                acc_t += s.m[d][c] * phi[c];
                double u_d = velocity_at(s, c, d);
                for (int a = 0; a < grid.dim; ++a) acc_g += s.m[a][c] * u_d * grad[a][c];
                acc_g += law.pressure(s.rho[c]) * grad[d][c];
            }
            d_dt_part = acc_t * vol;
            grad_part = acc_g * vol;
        };

        double integral_mass = 0.0;
        std::array<double, 3> integral_mom{0.0, 0.0, 0.0};
        double prev_mass = 0.0, prev_mom[3] = {0, 0, 0};
        double rho_phi_tau = 0.0, rho_phi_0 = 0.0;
        double m_phi_tau[3] = {0, 0, 0}, m_phi_0[3] = {0, 0, 0};

        for (std::size_t i = 0; i <= i_tau; ++i) {
            const FluidState& s = traj.states[i];
            double psi = tf.temporal(s.time);
            double dpsi = tf.temporal_prime(s.time);

            double mt, mg;
            mass_row(s, mt, mg);
            double mass_val = mt * dpsi + mg * psi;

            double mom_val[3] = {0, 0, 0};
            for (int d = 0; d < grid.dim; ++d) {
                double qt, qg;
                momentum_row(s, d, qt, qg);
                mom_val[d] = qt * dpsi + qg * psi;
            }

            if (i > 0) {
                double dt = s.time - traj.states[i - 1].time;
                integral_mass += 0.5 * dt * (prev_mass + mass_val);
                for (int d = 0; d < grid.dim; ++d)
                    integral_mom[d] += 0.5 * dt * (prev_mom[d] + mom_val[d]);
            }
            prev_mass = mass_val;
            for (int d = 0; d < grid.dim; ++d) prev_mom[d] = mom_val[d];

            if (i == 0) {
                for (std::size_t c = 0; c < n; ++c) {
                    rho_phi_0 += s.rho[c] * phi[c];
                    for (int d = 0; d < grid.dim; ++d) m_phi_0[d] += s.m[d][c] * phi[c];
                }
                rho_phi_0 *= vol * psi;
                for (int d = 0; d < grid.dim; ++d) m_phi_0[d] *= vol * psi;
            }
            if (i == i_tau) {
                for (std::size_t c = 0; c < n; ++c) {
                    rho_phi_tau += s.rho[c] * phi[c];
                    for (int d = 0; d < grid.dim; ++d) m_phi_tau[d] += s.m[d][c] * phi[c];
                }
                rho_phi_tau *= vol * psi;
                for (int d = 0; d < grid.dim; ++d) m_phi_tau[d] *= vol * psi;
            }
        }

        out[b].continuity = integral_mass - (rho_phi_tau - rho_phi_0);
        for (int d = 0; d < grid.dim; ++d)
            out[b].momentum[d] = integral_mom[d] - (m_phi_tau[d] - m_phi_0[d]);
    }
    return out;
}

/// Largest defect magnitude over the basis (mass and momentum combined).
inline double max_weak_residual(const Trajectory& traj, const TestFunctionBasis& basis,
                                double tau) {
    double m = 0.0;
    for (const auto& r : weak_residual(traj, basis, tau))
        m = std::max({m, std::abs(r.continuity), r.momentum_max(traj.grid.dim)});
    return m;
}

struct EnergySeries {
    std::vector<double> t;
    std::vector<double> energy;
    bool admissible = false;
    double tolerance = 0.0;
};

/// Total-energy series E(t_i) with the admissibility verdict: PASS iff the
/// series is non-increasing up to tol_E = 1e-10 E(0) and never exceeds E(0).
inline EnergySeries energy_monitor(const Trajectory& traj) {
    EnergySeries es;
    for (const auto& s : traj.states) {
        es.t.push_back(s.time);
        es.energy.push_back(total_energy(traj.grid, traj.law, s));
    }
    es.tolerance = 1e-10 * es.energy.front();
    es.admissible = true;
    for (std::size_t i = 0; i + 1 < es.energy.size(); ++i)
        if (es.energy[i + 1] > es.energy[i] + es.tolerance) es.admissible = false;
    for (double e : es.energy)
        if (e > es.energy.front() + es.tolerance || std::isinf(e)) es.admissible = false;
    return es;
}

}  // namespace erl
