// disklab/lqg.hpp — free-boundary Gaussian free field on a strip grid,
// subcritical and critical multiplicative-chaos measures (bulk and boundary),
// quantum-disk field assembly with unit-boundary-length normalization and
// importance weight, and the conformal embedding of the strip onto the disk
// with the Q_gamma = 2/gamma + gamma/2 coordinate-change correction.
//
// Grid model: the strip is [-K, K] x [0, pi], nodes (i, j), i = 0..nx-1
// horizontally and j = 0..ny-1 vertically.  The discrete free-boundary GFF
// has density exp(-1/2 * E(f)) with
//   E(f) = (1/2pi) * [ sum (Df_x)^2 * dy/dx + sum (Df_y)^2 * dx/dy ],
// i.e. the graph Laplacian quadratic form matching (1/2pi) int |grad f|^2.
// Neumann (free) boundary on all four sides gives separable cosine eigenmodes
// (DCT-II), so sampling is two dense matrix products.  The constant mode is
// dropped, pinning the field's additive constant by zero spatial mean; all
// downstream quantities are shift-covariant, not shift-invariant.
//
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "disklab/common.hpp"

namespace disklab {

inline double q_gamma(double gamma) { return 2.0 / gamma + 0.5 * gamma; }

enum class DomainTag { strip, disk };

struct GridField {
    DomainTag domain_tag = DomainTag::strip;
    int nx = 0, ny = 0;
    double K = 0.0;               // horizontal half-extent (strip)
    double x0 = 0.0, y0 = 0.0;    // lower-left corner
    double dx = 0.0, dy = 0.0;
    double delta = 0.0;           // circle-average radius == regularization scale
    std::vector<double> values;   // row-major: values[i * ny + j]
    std::vector<std::uint8_t> mask;  // 1 = inside domain (empty => all inside)

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * ny + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * ny + j]; }
    bool inside(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
        return mask.empty() || mask[static_cast<std::size_t>(i) * ny + j] != 0;
    }
    double x_of(int i) const { return x0 + dx * i; }
    double y_of(int j) const { return y0 + dy * j; }
};

namespace detail {

// Orthonormal DCT-II basis value: mode k at node i of an n-point grid.
inline double cos_mode(int k, int i, int n) {
    const double norm = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    return norm * std::cos(pi * k * (i + 0.5) / n);
}
// Neumann path-graph eigenvalue for mode k of n nodes.
inline double cos_eig(int k, int n) { return 2.0 * (1.0 - std::cos(pi * k / n)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// sample_strip_gff: lateral component h2 of the free-boundary GFF (vertical
// line averages projected out; with cosine modes this is exactly dropping the
// j-constant modes l = 0).
// ---------------------------------------------------------------------------
inline GridField sample_strip_gff(int nx, int ny, double K, std::uint64_t seed) {
    if (nx < 8 || ny < 8) throw ConfigError("sample_strip_gff needs nx, ny >= 8");
    if (K <= 0.0) throw ConfigError("K must be positive");

    GridField f;
    f.domain_tag = DomainTag::strip;
    f.nx = nx;
    f.ny = ny;
    f.K = K;
    f.x0 = -K;
    f.y0 = 0.0;
    f.dx = 2.0 * K / (nx - 1);
    f.dy = pi / (ny - 1);
    f.delta = std::max(f.dx, f.dy);
    f.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);

    const double wx = f.dy / f.dx;  // horizontal edge weight
    const double wy = f.dx / f.dy;  // vertical edge weight
    if (!(wx > 0.0) || !(wy > 0.0)) throw LinearAlgebraError("degenerate grid weights");

    Rng rng(seed);
    // coefficient matrix: c[k][l] = g * sqrt(2pi / lambda_{kl}), l >= 1 only
    std::vector<double> coef(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int k = 0; k < nx; ++k)
        for (int l = 1; l < ny; ++l) {
            const double lam = wx * detail::cos_eig(k, nx) + wy * detail::cos_eig(l, ny);
            coef[static_cast<std::size_t>(k) * ny + l] = rng.normal() * std::sqrt(two_pi / lam);
        }
    // field = U * coef * V^T with U, V the DCT-II bases (two matrix products)
    std::vector<double> tmp(static_cast<std::size_t>(nx) * ny, 0.0);  // U * coef
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < nx; ++k) {
            const double u = detail::cos_mode(k, i, nx);
            if (u == 0.0) continue;
            const double* ck = &coef[static_cast<std::size_t>(k) * ny];
            double* ti = &tmp[static_cast<std::size_t>(i) * ny];
            for (int l = 1; l < ny; ++l) ti[l] += u * ck[l];
        }
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double s = 0.0;
            const double* ti = &tmp[static_cast<std::size_t>(i) * ny];
            for (int l = 1; l < ny; ++l) s += ti[l] * detail::cos_mode(l, j, ny);
            f.at(i, j) = s;
        }
    // exact projection: remove residual column means (numerical guard; the
    // l = 0 modes are already absent)
    for (int i = 0; i < nx; ++i) {
        double m = 0.0;
        for (int j = 0; j < ny; ++j) m += f.at(i, j);
        m /= ny;
        for (int j = 0; j < ny; ++j) f.at(i, j) -= m;
    }
    return f;
}

// Exact variance of the lateral field at node (i, j) (mode-sum oracle).
inline double strip_gff_variance_oracle(int nx, int ny, double K, int i, int j) {
    const double dx = 2.0 * K / (nx - 1), dy = pi / (ny - 1);
    const double wx = dy / dx, wy = dx / dy;
    double var = 0.0;
    for (int k = 0; k < nx; ++k)
        for (int l = 1; l < ny; ++l) {
            const double lam = wx * detail::cos_eig(k, nx) + wy * detail::cos_eig(l, ny);
            var += (two_pi / lam) * sq(detail::cos_mode(k, i, nx) * detail::cos_mode(l, j, ny));
        }
    return var;
}

// ---------------------------------------------------------------------------
// sample_disk_profile: the horizontal (vertical-average) profile component.
//   gamma < 2: B_{2s} - (2/gamma - gamma/2)s conditioned negative via the
//     Doob h-transform, h(x) = 1 - e^{ax}, a = 2/gamma - gamma/2, sigma^2 = 2,
//     entrance at -iota; two independent sides glued at 0.
//   gamma = 2: -sqrt(2) * |3-dimensional Brownian motion| exactly.
// ---------------------------------------------------------------------------
struct DiskProfile {
    std::vector<double> values;  // at s = -K + i * step, i = 0..2m
    double step = 0.0;
    double K = 0.0;

    double at_s(double s) const {
        const double u = (s + K) / step;
        const auto i = static_cast<std::size_t>(std::clamp(
            u, 0.0, static_cast<double>(values.size() - 1)));
        return values[i];
    }
};

struct ProfileConfig {
    double iota = 1e-3;    // entrance level for the conditioned sampler
    double dt = 2.5e-4;    // internal Euler step (refined vs the output grid)
    double drift_cap_rel = 10.0;  // |drift| <= cap_rel / sqrt(dt)
};

namespace detail {

inline std::vector<double> conditioned_negative_side(double a, double K, double step,
                                                     Rng& rng, const ProfileConfig& pc) {
    const auto m = static_cast<std::size_t>(std::ceil(K / step));
    std::vector<double> side(m + 1);
    side[0] = 0.0;
    double y = -pc.iota;
    const double cap = pc.drift_cap_rel / std::sqrt(pc.dt);
    const double vol = std::sqrt(2.0 * pc.dt);
    const auto sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(step / pc.dt)));
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t q = 0; q < sub; ++q) {
            const double e = std::exp(a * y);  // y < 0 => e in (0,1)
            double drift = -a - 2.0 * a * e / std::max(1.0 - e, 1e-300);
            drift = std::clamp(drift, -cap, cap);
            y += drift * pc.dt + vol * rng.normal();
            if (y > -1e-12) y = -std::max(1e-12, -y);  // reflect the discretization
        }
        side[i] = y;
    }
    return side;
}

}  // namespace detail

inline DiskProfile sample_disk_profile(double gamma, double step, double K, std::uint64_t seed,
                                       const ProfileConfig& pc = {}) {
    if (!(gamma > std::sqrt(2.0) && gamma <= 2.0))
        throw ConfigError("gamma must lie in (sqrt(2), 2]");
    DiskProfile prof;
    prof.step = step;
    prof.K = K;
    Rng rng(seed);
    const auto m = static_cast<std::size_t>(std::ceil(K / step));

    std::vector<double> plus, minus;
    if (gamma < 2.0) {
        const double a = 2.0 / gamma - 0.5 * gamma;
        plus = detail::conditioned_negative_side(a, K, step, rng, pc);
        minus = detail::conditioned_negative_side(a, K, step, rng, pc);
    } else {
        auto bm3_radius = [&](std::size_t n) {
            std::vector<double> side(n + 1);
            double b1 = 0.0, b2 = 0.0, b3 = 0.0;
            const double vol = std::sqrt(step);
            side[0] = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
                b1 += vol * rng.normal();
                b2 += vol * rng.normal();
                b3 += vol * rng.normal();
                side[i] = -std::sqrt(2.0 * (b1 * b1 + b2 * b2 + b3 * b3));
            }
            return side;
        };
        plus = bm3_radius(m);
        minus = bm3_radius(m);
    }
    prof.values.resize(2 * m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        prof.values[m + i] = plus[i];
        prof.values[m - i] = minus[i];
    }
    return prof;
}

// ---------------------------------------------------------------------------
// Chaos measures.
// ---------------------------------------------------------------------------
enum class ChaosKind { bulk_subcritical, bulk_critical, boundary_subcritical, boundary_critical };

struct ChaosMeasure {
    double gamma = 0.0;
    ChaosKind kind = ChaosKind::bulk_subcritical;
    std::vector<double> cell_masses;   // row-major for bulk; [2*nx] for boundary
    std::vector<int> cell_i, cell_j;   // grid location per mass entry
    double total = 0.0;
};

namespace detail {

inline void check_kind(double gamma, ChaosKind kind) {
    const bool critical =
        kind == ChaosKind::bulk_critical || kind == ChaosKind::boundary_critical;
    if (critical && gamma != 2.0) throw ConfigError("critical kinds require gamma = 2");
    if (!critical && !(gamma > std::sqrt(2.0) && gamma < 2.0))
        throw ConfigError("subcritical kinds require gamma in (sqrt(2), 2)");
}

// Grid circle average at radius delta around node (i, j); sample points
// falling outside the domain are clipped to it (boundary cells average over
// the in-domain part).
inline double circle_average(const GridField& f, int i, int j, int n_pts = 16) {
    double sum = 0.0;
    int cnt = 0;
    for (int q = 0; q < n_pts; ++q) {
        const double ang = two_pi * q / n_pts;
        const double x = f.x_of(i) + f.delta * std::cos(ang);
        const double y = f.y_of(j) + f.delta * std::sin(ang);
        // bilinear interpolation with clamping to the rectangle
        double u = std::clamp((x - f.x0) / f.dx, 0.0, static_cast<double>(f.nx - 1));
        double v = std::clamp((y - f.y0) / f.dy, 0.0, static_cast<double>(f.ny - 1));
        const int i0 = std::min(static_cast<int>(u), f.nx - 2);
        const int j0 = std::min(static_cast<int>(v), f.ny - 2);
        const double fu = u - i0, fv = v - j0;
        if (!f.inside(i0, j0) || !f.inside(i0 + 1, j0 + 1) || !f.inside(i0 + 1, j0) ||
            !f.inside(i0, j0 + 1))
            continue;
        sum += (1 - fu) * (1 - fv) * f.at(i0, j0) + fu * (1 - fv) * f.at(i0 + 1, j0) +
               (1 - fu) * fv * f.at(i0, j0 + 1) + fu * fv * f.at(i0 + 1, j0 + 1);
        ++cnt;
    }
    if (cnt == 0) return 0.0;
    return sum / cnt;
}

}  // namespace detail

inline ChaosMeasure bulk_measure(const GridField& f, double gamma, ChaosKind kind) {
    detail::check_kind(gamma, kind);
    if (kind != ChaosKind::bulk_subcritical && kind != ChaosKind::bulk_critical)
        throw ConfigError("bulk_measure needs a bulk kind");
    if (f.delta < std::min(f.dx, f.dy))
        throw ResolutionError("delta below the grid resolution");

    ChaosMeasure mu;
    mu.gamma = gamma;
    mu.kind = kind;
    const double cell = f.dx * f.dy;
    const double eps = 2.0 - gamma;
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j) {
            if (!f.inside(i, j)) continue;
            const double hd = detail::circle_average(f, i, j);
            double m;
            if (kind == ChaosKind::bulk_subcritical)
                m = std::exp(gamma * hd) * std::pow(f.delta, 0.5 * sq(gamma)) / (2.0 * eps);
            else
                m = std::max(0.0, (-hd + std::log(1.0 / f.delta)) * std::exp(2.0 * hd) * f.delta);
            mu.cell_masses.push_back(m * cell);
            mu.cell_i.push_back(i);
            mu.cell_j.push_back(j);
            mu.total += m * cell;
        }
    return mu;
}

inline ChaosMeasure boundary_measure(const GridField& f, double gamma, ChaosKind kind,
                                     double shift = 0.0) {
    detail::check_kind(gamma, kind);
    if (kind != ChaosKind::boundary_subcritical && kind != ChaosKind::boundary_critical)
        throw ConfigError("boundary_measure needs a boundary kind");
    if (f.delta < std::min(f.dx, f.dy))
        throw ResolutionError("delta below the grid resolution");

    ChaosMeasure nu;
    nu.gamma = gamma;
    nu.kind = kind;
    const double eps = 2.0 - gamma;
    for (int side = 0; side < 2; ++side) {
        const int j = side == 0 ? 0 : f.ny - 1;
        for (int i = 0; i < f.nx; ++i) {
            if (!f.inside(i, j)) continue;
            const double hd = detail::circle_average(f, i, j) + shift;
            double m;
            if (kind == ChaosKind::boundary_subcritical)
                m = std::exp(0.5 * gamma * hd) * std::pow(f.delta, 0.25 * sq(gamma)) /
                    (2.0 * eps);
            else
                m = std::max(0.0, (-0.5 * hd + std::log(1.0 / f.delta)) * std::exp(hd) * f.delta);
            nu.cell_masses.push_back(m * f.dx);
            nu.cell_i.push_back(i);
            nu.cell_j.push_back(j);
            nu.total += m * f.dx;
        }
    }
    return nu;
}

// ---------------------------------------------------------------------------
// Quantum disk sampling.
// ---------------------------------------------------------------------------
struct QuantumDiskConfig {
    int nx = 256;
    int ny = 21;
    double K = 20.0;
};

struct QuantumDiskSample {
    GridField field;  // normalized field (unit boundary length)
    double gamma = 0.0;
    double boundary_length = 0.0;  // recomputed after normalization
    double area = 0.0;
    double importance_weight = 1.0;
    double raw_boundary_length = 0.0;  // nu(dS) before normalization
    ChaosMeasure bulk;                 // bulk measure of the normalized field
    std::optional<GridField> embedding;
};

namespace detail {

// Solve for the constant shift c with nu(h + c) = 1 by bisection (exact in
// one step for the subcritical exponential form; the critical derivative
// measure needs the solve).
inline double unit_boundary_shift(const GridField& f, double gamma, ChaosKind kind) {
    auto total = [&](double c) { return boundary_measure(f, gamma, kind, c).total; };
    if (kind == ChaosKind::boundary_subcritical) {
        const double t0 = total(0.0);
        if (t0 <= 0.0) throw DegenerateSample("zero boundary mass");
        return -(2.0 / gamma) * std::log(t0);
    }
    // The critical total nu(h + c) is unimodal in c (each cell mass is
    // (A - c/2) e^c up to positives), so locate the peak by coarse scan and
    // bisect on the increasing branch, taking the smallest solution.
    double c_peak = -200.0, t_peak = 0.0;
    for (double c = -200.0; c <= 200.0; c += 1.0) {
        const double t = total(c);
        if (t > t_peak) {
            t_peak = t;
            c_peak = c;
        }
    }
    if (t_peak < 1.0) throw DegenerateSample("critical boundary mass cannot reach one");
    double lo = c_peak - 1.0;
    while (total(lo) >= 1.0 && lo > -700.0) lo -= 40.0;
    double hi = c_peak;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline QuantumDiskSample sample_quantum_disk(double gamma, const QuantumDiskConfig& cfg,
                                             std::uint64_t seed) {
    if (!(gamma > std::sqrt(2.0) && gamma <= 2.0))
        throw ConfigError("gamma must lie in (sqrt(2), 2]");
    GridField lat = sample_strip_gff(cfg.nx, cfg.ny, cfg.K, mix_seed(seed, 0));
    const DiskProfile prof =
        sample_disk_profile(gamma, lat.dx, cfg.K, mix_seed(seed, 1));
    for (int i = 0; i < lat.nx; ++i) {
        const double b = prof.at_s(lat.x_of(i));
        for (int j = 0; j < lat.ny; ++j) lat.at(i, j) += b;
    }

    const bool critical = (gamma == 2.0);
    const ChaosKind bkind =
        critical ? ChaosKind::boundary_critical : ChaosKind::boundary_subcritical;
    const ChaosKind mkind = critical ? ChaosKind::bulk_critical : ChaosKind::bulk_subcritical;

    QuantumDiskSample out;
    out.gamma = gamma;
    out.raw_boundary_length = boundary_measure(lat, gamma, bkind).total;
    if (!(out.raw_boundary_length > 0.0)) throw DegenerateSample("zero boundary mass");

    const double shift = detail::unit_boundary_shift(lat, gamma, bkind);
    for (double& v : lat.values) v += shift;
    out.field = std::move(lat);
    out.boundary_length = boundary_measure(out.field, gamma, bkind).total;
    out.bulk = bulk_measure(out.field, gamma, mkind);
    out.area = out.bulk.total;
    out.importance_weight =
        critical ? 1.0 : std::pow(out.raw_boundary_length, 4.0 / sq(gamma) - 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// embed_disk: strip -> disk with the Q_gamma log-derivative correction.
// phi(w) = rot * (e^w - z0) / (e^w - conj(z0)) sends the strip R x (0, pi) to
// the unit disk with the sampled bulk point w0 -> 0, phi'(w0) > 0.
// ---------------------------------------------------------------------------
struct DiskEmbedding {
    GridField field;                                  // disk grid field
    std::vector<std::pair<complex, double>> masses;   // exact pushforward cells
    complex center_preimage;                          // w0 in strip coordinates
    int resamples = 0;
};

inline DiskEmbedding embed_disk(const QuantumDiskSample& sample, std::uint64_t seed,
                                int disk_res = 129) {
    if (sample.bulk.cell_masses.empty()) throw ConfigError("sample needs a bulk measure");
    const auto& f = sample.field;
    Rng rng(seed);

    // draw an interior cell proportionally to bulk mass, away from the strip edge
    std::size_t pick = 0;
    int resamples = 0;
    for (;;) {
        const double u = rng.uniform() * sample.bulk.total;
        double acc = 0.0;
        pick = sample.bulk.cell_masses.size() - 1;
        for (std::size_t c = 0; c < sample.bulk.cell_masses.size(); ++c) {
            acc += sample.bulk.cell_masses[c];
            if (acc >= u) {
                pick = c;
                break;
            }
        }
        const int i = sample.bulk.cell_i[pick], j = sample.bulk.cell_j[pick];
        if (i >= 2 && i < f.nx - 2 && j >= 2 && j < f.ny - 2) break;
        if (++resamples > 10000) throw DegenerateSample("all bulk mass at the strip edge");
    }
    const complex w0(f.x_of(sample.bulk.cell_i[pick]), f.y_of(sample.bulk.cell_j[pick]));
    const complex z0 = std::exp(w0);  // in the upper half plane

    // phi(w) = rot * (e^w - z0)/(e^w - conj z0); fix rot so phi'(w0) > 0
    const complex dphi0_unrot = z0 / (z0 - std::conj(z0));
    const complex rot = std::abs(dphi0_unrot) / dphi0_unrot;
    auto phi = [&](complex w) { return rot * (std::exp(w) - z0) / (std::exp(w) - std::conj(z0)); };
    auto phi_inv = [&](complex z) {
        const complex zeta = (z0 - std::conj(z0) * z / rot) / (1.0 - z / rot);
        return std::log(zeta);  // principal branch: Im in (0, pi) for zeta in H
    };
    auto dphi_inv_abs = [&](complex z) {
        const complex zr = z / rot;
        const complex zeta = (z0 - std::conj(z0) * zr) / (1.0 - zr);
        const complex one_minus = 1.0 - zr;
        const complex dzeta = (z0 - std::conj(z0)) / (one_minus * one_minus * rot);
        return std::abs(dzeta / zeta);  // |d(log zeta)/dz|
    };

    const double Q = q_gamma(sample.gamma);
    DiskEmbedding emb;
    emb.center_preimage = w0;
    emb.resamples = resamples;

    GridField d;
    d.domain_tag = DomainTag::disk;
    d.nx = d.ny = disk_res;
    d.x0 = d.y0 = -1.0;
    d.dx = d.dy = 2.0 / (disk_res - 1);
    d.delta = f.delta;  // masses are transported, not re-evaluated
    d.values.assign(static_cast<std::size_t>(disk_res) * disk_res, 0.0);
    d.mask.assign(d.values.size(), 0);
    for (int i = 0; i < disk_res; ++i)
        for (int j = 0; j < disk_res; ++j) {
            const complex z(d.x_of(i), d.y_of(j));
            if (std::abs(z) >= 0.995) continue;
            const complex w = phi_inv(z);
            if (w.real() <= f.x0 || w.real() >= f.x0 + f.dx * (f.nx - 1)) continue;
            // bilinear field lookup + coordinate-change correction
            const double u = (w.real() - f.x0) / f.dx;
            const double v = std::clamp(w.imag() / f.dy, 0.0, static_cast<double>(f.ny - 1));
            const int i0 = std::min(static_cast<int>(u), f.nx - 2);
            const int j0 = std::min(static_cast<int>(v), f.ny - 2);
            const double fu = u - i0, fv = v - j0;
            const double hval = (1 - fu) * (1 - fv) * f.at(i0, j0) +
                                fu * (1 - fv) * f.at(i0 + 1, j0) +
                                (1 - fu) * fv * f.at(i0, j0 + 1) + fu * fv * f.at(i0 + 1, j0 + 1);
            d.at(i, j) = hval + Q * std::log(dphi_inv_abs(z));
            d.mask[static_cast<std::size_t>(i) * d.ny + j] = 1;
        }
    emb.field = std::move(d);

    emb.masses.reserve(sample.bulk.cell_masses.size());
    for (std::size_t c = 0; c < sample.bulk.cell_masses.size(); ++c) {
        const complex w(f.x_of(sample.bulk.cell_i[c]), f.y_of(sample.bulk.cell_j[c]));
        emb.masses.emplace_back(phi(w), sample.bulk.cell_masses[c]);
    }
    return emb;
}

}  // namespace disklab
