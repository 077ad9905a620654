#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "erl/parallel.hpp"
#include "erl/sampled_field.hpp"

namespace erl {

/// Smooth radial bump exp(-1 / (1 - |y|^2)) supported on the open unit ball.
inline double bump_profile(double r2) {
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

/// Discrete regularizing kernel at scale epsilon, sampled on the lattice of a
/// target field. Holds the value stencil (renormalized so that its lattice sum
/// times the cell measure is exactly 1) together with per-axis derivative
/// stencils. Derivatives are half-offset differences of the same renormalized
/// profile, i.e. the exact derivative of the mollification of piecewise
/// constant data; each derivative stencil telescopes to an exact zero sum.
class Mollifier {
  public:
    Mollifier(double epsilon, const std::vector<FieldAxis>& axes) : eps_(epsilon) {
        dims_ = static_cast<int>(axes.size());
        if (dims_ < 1 || dims_ > 4) throw std::invalid_argument("mollifier supports 1..4 axes");
        double meas = 1.0;
        for (int a = 0; a < dims_; ++a) {
            spacing_[a] = axes[a].spacing;
            if (epsilon < 2.0 * spacing_[a] - 1e-12)
                throw std::invalid_argument("mollifier scale below 2 grid spacings");
            radius_[a] = static_cast<int>(std::floor(epsilon / spacing_[a] + 1e-12)) + 1;
            extent_[a] = 2 * radius_[a] + 1;
            meas *= spacing_[a];
        }
        std::size_t count = 1;
        for (int a = 0; a < dims_; ++a) count *= static_cast<std::size_t>(extent_[a]);
        weight_.assign(count, 0.0);
        for (int a = 0; a < dims_; ++a) dweight_[a].assign(count, 0.0);

        double z = 0.0;
        for_each_offset([&](const std::array<int, 4>& off, std::size_t e) {
            weight_[e] = profile_at(off, {0, 0, 0, 0});
            z += weight_[e];
        });
        z *= meas;  // discrete normalization constant
        if (z <= 0.0) throw std::invalid_argument("degenerate mollifier stencil");
        for (double& w : weight_) w /= z;

        for (int a = 0; a < dims_; ++a) {
            std::array<int, 4> half{0, 0, 0, 0};
            for_each_offset([&](const std::array<int, 4>& off, std::size_t e) {
                half[a] = +1;
                double up = profile_at(off, half);
                half[a] = -1;
                double dn = profile_at(off, half);
                half[a] = 0;
                dweight_[a][e] = (up - dn) / (z * spacing_[a]);
            });
        }
    }

    double epsilon() const { return eps_; }
    int dims() const { return dims_; }
    int radius(int a) const { return radius_[a]; }

    /// Lattice sum of the value stencil times the cell measure (should be 1).
    double discrete_mass() const {
        double s = 0.0;
        for (double w : weight_) s += w;
        double meas = 1.0;
        for (int a = 0; a < dims_; ++a) meas *= spacing_[a];
        return s * meas;
    }

    template <typename F>
    void for_each_offset(F&& f) const {
        std::array<int, 4> off{};
        std::size_t e = 0;
        for (int a = 0; a < dims_; ++a) off[a] = -radius_[a];
        for (;;) {
            f(off, e);
            ++e;
            int a = dims_ - 1;
            while (a >= 0) {
                if (++off[a] <= radius_[a]) break;
                off[a] = -radius_[a];
                --a;
            }
            if (a < 0) break;
        }
    }

    const std::vector<double>& weights() const { return weight_; }
    const std::vector<double>& dweights(int a) const { return dweight_[a]; }

  private:
    double profile_at(const std::array<int, 4>& off, const std::array<int, 4>& half) const {
        double r2 = 0.0;
        for (int a = 0; a < dims_; ++a) {
            double y = (off[a] + 0.5 * half[a]) * spacing_[a] / eps_;
            r2 += y * y;
        }
        double scale = 1.0;
        for (int a = 0; a < dims_; ++a) scale /= eps_;
        return bump_profile(r2) * scale;
    }

    double eps_ = 0.0;
    int dims_ = 0;
    std::array<double, 4> spacing_{};
    std::array<int, 4> radius_{};
    std::array<int, 4> extent_{};
    std::vector<double> weight_;
    std::array<std::vector<double>, 4> dweight_;
};

namespace detail {

/// Copies a field into a buffer with wrap halo of the stencil radius on
/// periodic axes (non-periodic axes get no halo; outputs shrink instead).
struct PaddedField {
    std::vector<double> data;
    std::array<int, 4> n{}, pad{};
    std::array<std::size_t, 4> stride{};
    int dims = 0;

    PaddedField(const SampledField& f, const Mollifier& mol) {
        dims = f.dims();
        std::size_t total = 1;
        for (int a = 0; a < dims; ++a) {
            pad[a] = f.axis(a).periodic ? mol.radius(a) : 0;
            n[a] = f.axis(a).n + 2 * pad[a];
            total *= static_cast<std::size_t>(n[a]);
        }
        stride[dims - 1] = 1;
        for (int a = dims - 2; a >= 0; --a)
            stride[a] = stride[a + 1] * static_cast<std::size_t>(n[a + 1]);
        data.assign(total, 0.0);

        IndexBox box = IndexBox::full(f);
        box.for_each([&](const std::array<int, 4>& idx) {
            std::size_t l = 0;
            for (int a = 0; a < dims; ++a) l += (idx[a] + pad[a]) * stride[a];
            data[l] = f.at(idx);
        });
        // wrap copies along periodic axes, one axis at a time
        for (int a = 0; a < dims; ++a) {
            if (pad[a] == 0) continue;
            int na = f.axis(a).n;
            IndexBox whole;
            whole.dims = dims;
            for (int b = 0; b < dims; ++b) whole.hi[b] = n[b];
            whole.for_each([&](const std::array<int, 4>& idx) {
                if (idx[a] >= pad[a] && idx[a] < pad[a] + na) return;
                std::array<int, 4> src = idx;
                int i = idx[a] - pad[a];
                int w = ((i % na) + na) % na;
                src[a] = w + pad[a];
                std::size_t lsrc = 0, ldst = 0;
                for (int b = 0; b < dims; ++b) {
                    lsrc += src[b] * stride[b];
                    ldst += idx[b] * stride[b];
                }
                data[ldst] = data[lsrc];
            });
        }
    }

    std::size_t lin_of_output(const std::array<int, 4>& out_idx,
                              const std::array<int, 4>& out_base) const {
        std::size_t l = 0;
        for (int a = 0; a < dims; ++a) l += (out_idx[a] + out_base[a] + pad[a]) * stride[a];
        return l;
    }
};

}  // namespace detail

struct MollifyResult {
    SampledField value;
    std::array<SampledField, 4> derivative;  // per axis
};

/// Discrete convolution with the kernel (and, when requested, with its
/// derivative stencils) in a single pass. Output geometry: periodic axes keep
/// their extent; non-periodic axes shrink by the stencil radius per side.
inline MollifyResult mollify_with_derivatives(const SampledField& f, const Mollifier& mol,
                                              bool want_derivatives = true) {
    if (f.dims() != mol.dims()) throw std::invalid_argument("field/mollifier dimension mismatch");

    std::vector<FieldAxis> out_axes;
    std::array<int, 4> base{};
    for (int a = 0; a < f.dims(); ++a) {
        FieldAxis ax = f.axis(a);
        if (!ax.periodic) {
            int r = mol.radius(a);
            if (ax.n <= 2 * r) throw std::invalid_argument("field too small for mollifier scale");
            ax.n -= 2 * r;
            ax.origin += r * ax.spacing;
            base[a] = r;
        }
        out_axes.push_back(ax);
    }

    MollifyResult res{SampledField(out_axes), {}};
    if (want_derivatives)
        for (int a = 0; a < f.dims(); ++a) res.derivative[a] = SampledField(out_axes);

    detail::PaddedField padded(f, mol);

    // compress stencil entries: relative linear offset + weights
    struct Entry {
        std::ptrdiff_t off;
        double w;
        std::array<double, 4> dw;
    };
    std::vector<Entry> entries;
    mol.for_each_offset([&](const std::array<int, 4>& off, std::size_t e) {
        Entry en{};
        en.w = mol.weights()[e];
        bool nonzero = en.w != 0.0;
        for (int a = 0; a < f.dims(); ++a) {
            en.dw[a] = mol.dweights(a)[e];
            nonzero = nonzero || en.dw[a] != 0.0;
        }
        if (!nonzero) return;
        std::ptrdiff_t l = 0;
        for (int a = 0; a < f.dims(); ++a) l += off[a] * static_cast<std::ptrdiff_t>(padded.stride[a]);
        en.off = l;
        entries.push_back(en);
    });

    const double meas = f.cell_measure();
    const int d = f.dims();
    IndexBox out_box = IndexBox::full(res.value);

    // collect output multi-indices once, then fill cells independently
    std::vector<std::array<int, 4>> cells;
    cells.reserve(out_box.count());
    out_box.for_each([&](const std::array<int, 4>& idx) { cells.push_back(idx); });

    parallel_for(cells.size(), [&](std::size_t ci) {
        const auto& idx = cells[ci];
        std::size_t center = padded.lin_of_output(idx, base);
        double acc = 0.0;
        std::array<double, 4> dacc{};
        for (const Entry& en : entries) {
            double v = padded.data[center - en.off];  // value at x - y
            acc += en.w * v;
            if (want_derivatives)
                for (int a = 0; a < d; ++a) dacc[a] += en.dw[a] * v;
        }
        std::size_t l = res.value.lin(idx);
        res.value.data()[l] = acc * meas;
        if (want_derivatives)
            for (int a = 0; a < d; ++a) res.derivative[a].data()[l] = dacc[a] * meas;
    });
    return res;
}

/// Convolution with the value stencil only.
inline SampledField mollify(const SampledField& f, const Mollifier& mol) {
    return mollify_with_derivatives(f, mol, false).value;
}

/// Convolution with the derivative stencil along one axis, i.e. the exact
/// lattice derivative of the mollified field.
inline SampledField mollify_derivative(const SampledField& f, const Mollifier& mol, int axis) {
    return mollify_with_derivatives(f, mol, true).derivative[axis];
}

inline Mollifier make_mollifier(const SampledField& f, double epsilon) {
    std::vector<FieldAxis> axes;
    for (int a = 0; a < f.dims(); ++a) axes.push_back(f.axis(a));
    return Mollifier(epsilon, axes);
}

}  // namespace erl
