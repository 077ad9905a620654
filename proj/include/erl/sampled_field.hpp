#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "erl/grid.hpp"
#include "erl/state.hpp"

namespace erl {

/// One lattice axis of a sampled field. Periodic axes wrap; non-periodic axes
/// are interval data (kernel translates must stay inside, no padding and no
/// reflection).
struct FieldAxis {
    int n = 1;
    double spacing = 1.0;
    double origin = 0.0;  // coordinate of sample 0
    bool periodic = false;
};

/// Uniformly sampled field on up to 4 axes, row-major with axis 0 slowest.
class SampledField {
  public:
    SampledField() = default;
    explicit SampledField(std::vector<FieldAxis> axes) : axes_(std::move(axes)) {
        if (axes_.empty() || axes_.size() > 4)
            throw std::invalid_argument("sampled field supports 1..4 axes");
        std::size_t n = 1;
        for (const auto& ax : axes_) {
            if (ax.n < 1 || ax.spacing <= 0.0) throw std::invalid_argument("bad field axis");
            n *= static_cast<std::size_t>(ax.n);
        }
        data_.assign(n, 0.0);
    }

    int dims() const { return static_cast<int>(axes_.size()); }
    const FieldAxis& axis(int a) const { return axes_[a]; }
    std::size_t size() const { return data_.size(); }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double cell_measure() const {
        double v = 1.0;
        for (const auto& ax : axes_) v *= ax.spacing;
        return v;
    }

    std::size_t stride(int a) const {
        std::size_t s = 1;
        for (int b = dims() - 1; b > a; --b) s *= static_cast<std::size_t>(axes_[b].n);
        return s;
    }

    std::size_t lin(const std::array<int, 4>& idx) const {
        std::size_t l = 0;
        for (int a = 0; a < dims(); ++a) l = l * axes_[a].n + idx[a];
        return l;
    }

    double& at(const std::array<int, 4>& idx) { return data_[lin(idx)]; }
    double at(const std::array<int, 4>& idx) const { return data_[lin(idx)]; }

    double coordinate(int a, int i) const { return axes_[a].origin + i * axes_[a].spacing; }

  private:
    std::vector<FieldAxis> axes_;
    std::vector<double> data_;
};

/// Half-open index box (window) inside a field.
struct IndexBox {
    std::array<int, 4> lo{0, 0, 0, 0};
    std::array<int, 4> hi{0, 0, 0, 0};
    int dims = 0;

    static IndexBox full(const SampledField& f) {
        IndexBox b;
        b.dims = f.dims();
        for (int a = 0; a < b.dims; ++a) b.hi[a] = f.axis(a).n;
        return b;
    }

    /// Shrinks by the given margin (in cells) per axis; throws if empty.
    IndexBox shrunk(const std::array<int, 4>& margin) const {
        IndexBox b = *this;
        for (int a = 0; a < dims; ++a) {
            b.lo[a] += margin[a];
            b.hi[a] -= margin[a];
            if (b.lo[a] >= b.hi[a]) throw std::invalid_argument("window too small for margin");
        }
        return b;
    }

    std::size_t count() const {
        std::size_t c = 1;
        for (int a = 0; a < dims; ++a) c *= static_cast<std::size_t>(hi[a] - lo[a]);
        return c;
    }

    /// Visits every multi-index in the box.
    template <typename F>
    void for_each(F&& f) const {
        std::array<int, 4> idx = lo;
        for (;;) {
            f(idx);
            int a = dims - 1;
            while (a >= 0) {
                if (++idx[a] < hi[a]) break;
                idx[a] = lo[a];
                --a;
            }
            if (a < 0) break;
        }
    }
};

/// L^p norm over a window with the lattice measure (midpoint quadrature).
inline double lp_norm(const SampledField& f, const IndexBox& box, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm needs p >= 1");
    double sum = 0.0;
    box.for_each([&](const std::array<int, 4>& idx) { sum += std::pow(std::abs(f.at(idx)), p); });
    return std::pow(sum * f.cell_measure(), 1.0 / p);
}

inline double lp_norm(const SampledField& f, double p) { return lp_norm(f, IndexBox::full(f), p); }

/// Sum over the whole lattice times the cell measure.
inline double integral(const SampledField& f) {
    double s = 0.0;
    for (double v : f.data()) s += v;
    return s * f.cell_measure();
}

/// Purely spatial field from per-cell values of a torus grid (periodic axes).
/// The grid's fastest axis (x) becomes the last field axis.
inline SampledField spatial_field(const TorusGrid& grid, const std::vector<double>& cells,
                                  bool periodic = true) {
    std::vector<FieldAxis> axes;
    for (int a = grid.dim - 1; a >= 0; --a)
        axes.push_back({grid.cells[a], grid.spacing(a), grid.center(a, 0), periodic});
    SampledField f(axes);
    if (cells.size() != f.size()) throw std::invalid_argument("cell count mismatch");
    // torus linear index has axis 0 fastest; field has last axis fastest -> same order reversed
    const std::size_t n = f.size();
    for (std::size_t c = 0; c < n; ++c) {
        auto mi = grid.multi_index(c);
        std::array<int, 4> idx{0, 0, 0, 0};
        for (int a = 0; a < grid.dim; ++a) idx[grid.dim - 1 - a] = mi[a];
        f.at(idx) = cells[c];
    }
    return f;
}

/// Space-time field from a trajectory component, resampled to uniform stamps.
/// Axis 0 is time (non-periodic); spatial axes follow with the given
/// periodicity.
template <typename Extract>
SampledField space_time_field(const Trajectory& traj, Extract&& value, int n_stamps, double t0,
                              double t1, bool spatial_periodic) {
    auto states = traj.resample_uniform(n_stamps, t0, t1);
    std::vector<FieldAxis> axes;
    axes.push_back({n_stamps, (t1 - t0) / (n_stamps - 1), t0, false});
    const TorusGrid& grid = traj.grid;
    for (int a = grid.dim - 1; a >= 0; --a)
        axes.push_back({grid.cells[a], grid.spacing(a), grid.center(a, 0), spatial_periodic});
    SampledField f(axes);
    const std::size_t nc = grid.num_cells();
    for (int i = 0; i < n_stamps; ++i)
        for (std::size_t c = 0; c < nc; ++c) {
            auto mi = grid.multi_index(c);
            std::array<int, 4> idx{i, 0, 0, 0};
            for (int a = 0; a < grid.dim; ++a) idx[1 + grid.dim - 1 - a] = mi[a];
            f.at(idx) = value(states[i], c);
        }
    return f;
}

}  // namespace erl
