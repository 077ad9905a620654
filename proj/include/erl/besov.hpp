#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "erl/sampled_field.hpp"

namespace erl {

/// Window and exponents for the finite-difference Besov seminorm: Lp norm on Q
/// plus the sup over all lattice shifts 0 < |eta| <= eta_max of the alpha-scaled
/// difference quotient. Shifts must keep Q + eta inside the data domain on
/// non-periodic axes.
struct BesovWindow {
    IndexBox q;
    double alpha = 0.5;
    double p = 2.0;
    double eta_max = 0.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("besov alpha must lie in (0,1)");
        if (p < 1.0) throw std::invalid_argument("besov p must be >= 1");
        if (eta_max <= 0.0) throw std::invalid_argument("besov eta_max must be positive");
    }
};

/// Default window for a field: shift budget eta_max = (min axis extent) / 4,
/// window shrunk on non-periodic axes so every admitted shift stays inside.
inline BesovWindow default_besov_window(const SampledField& f, double alpha, double p) {
    BesovWindow w;
    w.alpha = alpha;
    w.p = p;
    double min_extent = 1e300;
    for (int a = 0; a < f.dims(); ++a)
        min_extent = std::min(min_extent, f.axis(a).n * f.axis(a).spacing);
    w.eta_max = min_extent / 4.0;
    w.q = IndexBox::full(f);
    std::array<int, 4> margin{0, 0, 0, 0};
    for (int a = 0; a < f.dims(); ++a)
        if (!f.axis(a).periodic)
            margin[a] = static_cast<int>(std::floor(w.eta_max / f.axis(a).spacing)) + 1;
    w.q = w.q.shrunk(margin);
    return w;
}

struct BesovParts {
    double lp = 0.0;
    double seminorm = 0.0;
    std::array<int, 4> argmax_shift{0, 0, 0, 0};
    long shift_count = 0;

    double norm() const { return lp + seminorm; }
};

inline BesovParts besov_norm_parts(const SampledField& f, const BesovWindow& w) {
    w.validate();
    const int d = f.dims();
    std::array<int, 4> radius{0, 0, 0, 0};
    for (int a = 0; a < d; ++a)
        radius[a] = static_cast<int>(std::floor(w.eta_max / f.axis(a).spacing + 1e-12));

    BesovParts parts;
    parts.lp = lp_norm(f, w.q, w.p);

    // enumerate lattice shifts in the eta_max ball
    std::array<int, 4> s{};
    for (int a = 0; a < d; ++a) s[a] = -radius[a];
    const double meas = f.cell_measure();
    for (;;) {
        double eta2 = 0.0;
        bool zero = true;
        for (int a = 0; a < d; ++a) {
            double y = s[a] * f.axis(a).spacing;
            eta2 += y * y;
            zero = zero && s[a] == 0;
        }
        bool admissible = !zero && eta2 <= w.eta_max * w.eta_max + 1e-15;
        if (admissible)
            for (int a = 0; a < d; ++a)
                if (!f.axis(a).periodic &&
                    (w.q.lo[a] + s[a] < 0 || w.q.hi[a] + s[a] > f.axis(a).n))
                    admissible = false;
        if (admissible) {
            ++parts.shift_count;
            double sum = 0.0;
            w.q.for_each([&](const std::array<int, 4>& idx) {
                std::array<int, 4> j = idx;
                for (int a = 0; a < d; ++a) {
                    j[a] += s[a];
                    if (f.axis(a).periodic) {
                        int n = f.axis(a).n;
                        j[a] = ((j[a] % n) + n) % n;
                    }
                }
                sum += std::pow(std::abs(f.at(j) - f.at(idx)), w.p);
            });
            double quotient = std::pow(sum * meas, 1.0 / w.p) / std::pow(std::sqrt(eta2), w.alpha);
            if (quotient > parts.seminorm) {
                parts.seminorm = quotient;
                parts.argmax_shift = s;
            }
        }
        int a = d - 1;
        while (a >= 0) {
            if (++s[a] <= radius[a]) break;
            s[a] = -radius[a];
            --a;
        }
        if (a < 0) break;
    }
    if (parts.shift_count == 0) throw std::invalid_argument("besov window admits no shift");
    return parts;
}

inline double besov_norm(const SampledField& f, const BesovWindow& w) {
    return besov_norm_parts(f, w).norm();
}

}  // namespace erl
