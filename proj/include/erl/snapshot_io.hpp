#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "erl/errors.hpp"
#include "erl/state.hpp"
#include "erl/young_measure.hpp"

namespace erl {

/// Fixed little-endian binary snapshot: magic "ERL1", format version, grid
/// geometry and law in the header, then row-major per-cell (rho, m_1..m_N)
/// records; optionally trailing Young-measure atom blocks. The header and the
/// atom counts determine the payload length exactly; the round trip is
/// bit-exact.
namespace snapshot {

inline constexpr char magic[4] = {'E', 'R', 'L', '1'};
inline constexpr std::uint32_t format_version = 1;
inline constexpr std::uint32_t flag_young_atoms = 1u;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    std::uint32_t u32() {
        if (pos + 4 > buf.size()) throw TruncatedPayload("snapshot ends inside a u32 field");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }

    double f64() {
        if (pos + 8 > buf.size()) throw TruncatedPayload("snapshot ends inside a f64 field");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(v);
    }
};

}  // namespace detail

struct Snapshot {
    TorusGrid grid;
    PressureLaw law;
    FluidState state;
    // atoms[cell], present when the file carries a Young-measure block
    std::optional<std::vector<std::vector<YoungAtom>>> atoms;
};

inline std::string encode(const TorusGrid& grid, const PressureLaw& law, const FluidState& state,
                          const std::vector<std::vector<YoungAtom>>* atoms = nullptr) {
    std::string out;
    out.append(magic, 4);
    detail::put_u32(out, format_version);
    detail::put_u32(out, atoms ? flag_young_atoms : 0u);
    detail::put_u32(out, static_cast<std::uint32_t>(grid.dim));
    for (int a = 0; a < grid.dim; ++a) detail::put_u32(out, static_cast<std::uint32_t>(grid.cells[a]));
    for (int a = 0; a < grid.dim; ++a) detail::put_f64(out, grid.half_period[a]);
    detail::put_f64(out, state.time);
    detail::put_f64(out, law.a);
    detail::put_f64(out, law.gamma);
    const std::size_t n = grid.num_cells();
    for (std::size_t c = 0; c < n; ++c) {
        detail::put_f64(out, state.rho[c]);
        for (int a = 0; a < grid.dim; ++a) detail::put_f64(out, state.m[a][c]);
    }
    if (atoms) {
        for (std::size_t c = 0; c < n; ++c) {
            detail::put_u32(out, static_cast<std::uint32_t>((*atoms)[c].size()));
            for (const auto& at : (*atoms)[c]) {
                detail::put_f64(out, at.weight);
                detail::put_f64(out, at.rho);
                for (int a = 0; a < grid.dim; ++a) detail::put_f64(out, at.m[a]);
            }
        }
    }
    return out;
}

inline Snapshot decode(const std::string& buf) {
    if (buf.size() < 4 || std::memcmp(buf.data(), magic, 4) != 0)
        throw MagicMismatch("not a snapshot file (bad magic)");
    detail::Reader in{buf, 4};
    std::uint32_t version = in.u32();
    if (version != format_version)
        throw VersionMismatch("snapshot format version " + std::to_string(version) +
                              " is not supported");
    std::uint32_t flags = in.u32();
    std::uint32_t dim = in.u32();
    if (dim < 1 || dim > 3) throw SnapshotError("snapshot dimension out of range");
    std::array<int, 3> cells{1, 1, 1};
    std::array<double, 3> half{1.0, 1.0, 1.0};
    for (std::uint32_t a = 0; a < dim; ++a) cells[a] = static_cast<int>(in.u32());
    for (std::uint32_t a = 0; a < dim; ++a) half[a] = in.f64();
    double time = in.f64();
    double law_a = in.f64();
    double law_gamma = in.f64();

    Snapshot snap{TorusGrid(static_cast<int>(dim), cells, half), PressureLaw(law_a, law_gamma),
                  FluidState{}, std::nullopt};
    snap.state = FluidState::zero(snap.grid, time);
    const std::size_t n = snap.grid.num_cells();
    for (std::size_t c = 0; c < n; ++c) {
        double rho = in.f64();
        if (std::isnan(rho)) throw NanDensity("NaN density at cell " + std::to_string(c));
        snap.state.rho[c] = rho;
        for (std::uint32_t a = 0; a < dim; ++a) snap.state.m[a][c] = in.f64();
    }
    if (flags & flag_young_atoms) {
        std::vector<std::vector<YoungAtom>> atoms(n);
        for (std::size_t c = 0; c < n; ++c) {
            std::uint32_t count = in.u32();
            atoms[c].resize(count);
            for (auto& at : atoms[c]) {
                at.weight = in.f64();
                at.rho = in.f64();
                if (std::isnan(at.rho)) throw NanDensity("NaN atom density");
                for (std::uint32_t a = 0; a < dim; ++a) at.m[a] = in.f64();
            }
        }
        snap.atoms = std::move(atoms);
    }
    if (in.pos != buf.size()) throw TruncatedPayload("snapshot has trailing bytes");
    return snap;
}

}  // namespace snapshot

inline void write_snapshot(const std::string& path, const TorusGrid& grid, const PressureLaw& law,
                           const FluidState& state,
                           const std::vector<std::vector<YoungAtom>>* atoms = nullptr) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::string buf = snapshot::encode(grid, law, state, atoms);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline snapshot::Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return snapshot::decode(buf);
}

}  // namespace erl
