#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "channel_series.hpp"
#include "flow_eval.hpp"
#include "goursat.hpp"
#include "halfplane_closed.hpp"
#include "model.hpp"
#include "parametric.hpp"
#include "transform_oracle.hpp"

namespace stokes_lattice {

struct ValidationReport {
    std::string name;
    double max_residual = 0;
    std::size_t samples = 0;
    double tolerance = 0;
    bool pass = false;
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t default_seed = 20240229;

inline ValidationReport make_report(std::string name, double res, std::size_t n, double tol, std::uint64_t seed = 0) {
    ValidationReport r{std::move(name), res, n, tol, false, seed};
    r.pass = std::isfinite(res) && res <= tol;
    return r;
}

namespace detail {

// seeded interior points of the principal window, kept `clear` away from
// singularity images and (for the channel) inside the walls
template <class T>
std::vector<cplx<T>> interior_points(const GoursatParts<T>& p, std::size_t n, std::uint64_t seed, T clear,
                                     T wall_margin = T(0.05)) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    const T y1 = p.is_channel() ? p.top - wall_margin : T(4);
    std::vector<cplx<T>> out;
    std::size_t guard = 0;
    while (out.size() < n && guard++ < 1000 * n) {
        const cplx<T> z(two_pi_v<T> * T(ux(rng)), wall_margin + (y1 - wall_margin) * T(ux(rng)));
        if (image_distance(p, z) < clear) continue;
        out.push_back(z);
    }
    return out;
}

template <class T>
cplx<T> w_at(const GoursatParts<T>& p, T x, T y) {
    return evaluate_goursat(p, cplx<T>(x, y)).w;
}

}  // namespace detail

template <class S>
ValidationReport noslip_residual(const S& src, int samples_per_wall = 512, double tol = -1) {
    const auto& p = parts_of(src);
    if (tol < 0) tol = p.is_channel() ? 1e-11 : 1e-13;
    const double res = double(wall_residual(p, samples_per_wall));
    return make_report("noslip", res, std::size_t(samples_per_wall) * (p.is_channel() ? 2 : 1), tol);
}

// max |w(z + 2 pi) - w(z)| over seeded interior points.  Abscissae are
// snapped to multiples of 2^-47 (2 pi in double is one), so z + 2 pi is
// exactly representable and the check sees the representation rather than
// the rounding of the shifted input.
template <class S>
std::vector<ValidationReport> periodicity_residual(const S& src, std::size_t n = 200,
                                                   std::uint64_t seed = default_seed) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    auto pts = detail::interior_points<T>(p, n, seed, T(0.05));
    const T q = std::ldexp(T(1), -47);
    double rw = 0, rp = 0;
    for (auto& z : pts) {
        z = cplx<T>(std::round(z.real() / q) * q, z.imag());
        const auto a = evaluate_goursat(p, z);
        const auto b = evaluate_goursat(p, z + cplx<T>(two_pi_v<T>, 0));
        rw = std::max(rw, double(std::abs(b.w - a.w)));
        rp = std::max(rp, double(T(4) * std::abs(b.W - a.W)));
    }
    return {make_report("periodicity_velocity", rw, pts.size(), 1e-14, seed),
            make_report("periodicity_pressure_vorticity", rp, pts.size(), 1e-13, seed)};
}

namespace detail {

// Growth exponent of the remainder w - local.  The remainder is pooled
// (max over 8 rays) per radius, and growth is measured from the 1e-3 shell
// inward: log10(P(r) / P(1e-3)) / log10(1e-3 / r), maximised over r.
// Pooling keeps rays through a zero of the regular part from reading
// rounding noise as growth; each remainder is first reduced by a rounding
// bound proportional to the singular magnitude.
template <class P>
double growth_exponent(const P& parts, Kind kind, cplx<long double> mu, cplx<long double> z0) {
    using LD = long double;
    const LD radii[3] = {1e-3L, 1e-4L, 1e-5L};
    LD pooled[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 8; ++j) {
            const cplx<LD> e = std::polar(LD(1), two_pi_v<LD> * j / 8 + LD(0.1));
            const cplx<LD> z = z0 + radii[i] * e;
            const cplx<LD> d = z - z0;  // the offset actually evaluated
            const cplx<LD> loc = local_velocity(kind, mu, d);
            const cplx<LD> rem = evaluate_goursat(parts, z).w - loc;
            // discount the rounding bound of the cancellation w - loc
            const LD noise = 16 * std::numeric_limits<LD>::epsilon() * std::abs(loc);
            pooled[i] = std::max(pooled[i], std::max(std::abs(rem) - noise, LD(0)));
        }
    const LD floor = LD(1e-15);
    double worst = -1e300;
    for (int i = 1; i < 3; ++i)
        worst = std::max(worst, double(std::log10((pooled[i] + floor) / (pooled[0] + floor)) /
                                       std::log10(radii[0] / radii[i])));
    return worst;
}

}  // namespace detail

// Rebuilt in long double: near z0 the singular part is ~1e15 times the
// regular remainder for the cubic poles.
template <class T>
ValidationReport local_singularity_residual(const ChannelSolution<T>& s, double tol = 0.05) {
    using LD = long double;
    const auto g = canonical_channel(LD(s.geometry.canonical_h));
    const cplx<LD> mu(s.spec.mu.real(), s.spec.mu.imag()), z0(s.spec.z0.real(), s.spec.z0.imag());
    const auto sl = build_channel_solution<LD>(s.spec.kind, mu, z0, g, LD(1e-13));
    return make_report("local_form", detail::growth_exponent(sl.parts, s.spec.kind, mu, z0), 24, tol);
}

template <class T>
ValidationReport local_singularity_residual(const HalfPlaneSolution<T>& s, double tol = 0.05) {
    using LD = long double;
    const cplx<LD> mu(s.spec.mu.real(), s.spec.mu.imag()), z0(s.spec.z0.real(), s.spec.z0.imag());
    const auto sl = build_halfplane_solution<LD>(s.spec.kind, mu, z0);
    return make_report("local_form", detail::growth_exponent(sl.parts, s.spec.kind, mu, z0), 24, tol);
}

// Stokeslet: relative error of force against -8 pi eta mu; other kinds: |force|.
// Mass flux is always checked absolutely.
template <class S>
std::vector<ValidationReport> force_flux_check(const S& s, double eta = 1, double tol = 1e-10) {
    using T = decltype(parts_of(s).rho);
    const auto& p = parts_of(s);
    const cplx<T> z0 = s.spec.z0;
    T r = std::min(z0.imag(), T(1));
    if (p.is_channel()) r = std::min(r, p.top - z0.imag());
    r *= T(0.5);
    const auto c = contour_diagnostics(s, z0, r, 256, T(eta));
    double fres;
    if (s.spec.kind == Kind::stokeslet && s.spec.mu != cplx<T>(0)) {
        const cplx<T> expect = -T(8) * pi_v<T> * T(eta) * s.spec.mu;
        fres = double(std::abs(c.force - expect) / std::abs(expect));
    } else {
        fres = double(std::abs(c.force));
    }
    return {make_report("force", fres, 256, tol), make_report("mass_flux", double(std::abs(c.mass_flux)), 256, tol)};
}

template <class S>
std::vector<ValidationReport> pde_residuals(const S& src, std::size_t n = 100, std::uint64_t seed = default_seed) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    const auto pts = detail::interior_points<T>(p, n, seed, T(0.2));
    auto uv = [&](T x, T y) {
        const cplx<T> w = detail::w_at(p, x, y);
        return cplx<T>(w.real(), -w.imag());  // u + i v
    };
    auto pw = [&](T x, T y) {
        const cplx<T> q = T(4) * evaluate_goursat(p, cplx<T>(x, y)).W;
        return cplx<T>(q.real(), -q.imag());  // p/eta + i omega
    };
    double rdiv = 0, rmom = 0, rvort = 0;
    const T h1 = T(1e-5), h2 = T(5e-4), hp = T(1e-4);
    for (const auto& z : pts) {
        const T x = z.real(), y = z.imag();
        const cplx<T> dx = (uv(x + h1, y) - uv(x - h1, y)) / (2 * h1);
        const cplx<T> dy = (uv(x, y + h1) - uv(x, y - h1)) / (2 * h1);
        const T gscale = std::max({std::abs(dx.real()), std::abs(dx.imag()), std::abs(dy.real()),
                                   std::abs(dy.imag()), T(1e-12)});
        rdiv = std::max(rdiv, double(std::abs(dx.real() + dy.imag()) / gscale));
        const T omega_fd = dx.imag() - dy.real();
        rvort = std::max(rvort, double(std::abs(omega_fd - pw(x, y).imag()) / gscale));
        const cplx<T> c0 = uv(x, y);
        const cplx<T> dxx = (uv(x + h2, y) + uv(x - h2, y) - T(2) * c0) / (h2 * h2);
        const cplx<T> dyy = (uv(x, y + h2) + uv(x, y - h2) - T(2) * c0) / (h2 * h2);
        const cplx<T> lap = dxx + dyy;
        const T px = (pw(x + hp, y).real() - pw(x - hp, y).real()) / (2 * hp);
        const T py = (pw(x, y + hp).real() - pw(x, y - hp).real()) / (2 * hp);
        // scaled by the individual second derivatives: for nearly harmonic
        // fields the Laplacian itself is a cancellation
        const T mscale = std::max({std::abs(px), std::abs(py), std::abs(dxx.real()), std::abs(dxx.imag()),
                                   std::abs(dyy.real()), std::abs(dyy.imag()), T(1e-12)});
        rmom = std::max(rmom, double(std::max(std::abs(px - lap.real()), std::abs(py - lap.imag())) / mscale));
    }
    return {make_report("incompressibility", rdiv, pts.size(), 1e-6, seed),
            make_report("momentum", rmom, pts.size(), 1e-4, seed),
            make_report("vorticity", rvort, pts.size(), 1e-6, seed)};
}

// FD parametric derivative against the closed-form target on a 10x10 grid,
// relative to the largest target magnitude (floored at 1e-12).
template <class T>
double derivative_deviation(const GoursatParts<T>& fd, const GoursatParts<T>& target, cplx<T> z0) {
    const T y1 = fd.is_channel() ? fd.top : T(2) * z0.imag() + 1;
    T err = 0, scale = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const cplx<T> z(T(0.3) + (two_pi_v<T> - T(0.6)) * i / 9, y1 * (T(0.05) + T(0.9) * j / 9));
            if (image_distance(target, z) < T(0.3)) continue;
            const cplx<T> a = evaluate_goursat(fd, z).w, b = evaluate_goursat(target, z).w;
            err = std::max(err, std::abs(a - b));
            scale = std::max(scale, std::abs(b));
        }
    return double(err / std::max(scale, T(1e-12)));
}

inline double derivative_tolerance(DerivativePair pair) {
    return pair == DerivativePair::stresslet_to_force_quadrupole ? 1e-6 : 1e-5;
}

inline const char* derivative_pair_name(DerivativePair pair) {
    switch (pair) {
        case DerivativePair::stokeslet_to_source_dipole: return "stokeslet->source_dipole";
        case DerivativePair::stresslet_to_force_quadrupole: return "stresslet->force_quadrupole";
        case DerivativePair::stresslet_to_source_quadrupole: return "stresslet->source_quadrupole";
    }
    return "?";
}

template <class T>
ValidationReport derivative_identity_check(DerivativePair pair, T delta, cplx<T> mu, cplx<T> z0,
                                           const ChannelGeometry<T>& g) {
    const auto fd = parametric_derivative_build(pair_base(pair), pair_target(pair), mu, z0, g, delta);
    const auto tg = build_channel_solution(pair_target(pair), mu, z0, g, T(1e-13));
    return make_report(std::string("derivative_channel ") + derivative_pair_name(pair),
                       derivative_deviation(fd, tg.parts, z0), 100, derivative_tolerance(pair));
}

template <class T>
ValidationReport derivative_identity_check(DerivativePair pair, T delta, cplx<T> mu, cplx<T> z0,
                                           const HalfPlaneGeometry<T>& g) {
    const auto fd = parametric_derivative_build(pair_base(pair), pair_target(pair), mu, z0, g, delta);
    const auto tg = build_halfplane_solution(pair_target(pair), mu, z0);
    return make_report(std::string("derivative_halfplane ") + derivative_pair_name(pair),
                       derivative_deviation(fd, tg.parts, z0), 100, derivative_tolerance(pair));
}

// Default comparison grid: nx x ny nodes covering the oracle cell minus its clearance.
template <class T>
GridSpec<T> oracle_grid(const oracle::SpectralSystem& sys, int nx = 20, int ny = 10) {
    const T c = T(sys.clearance);
    const T xc = T(sys.shift) + pi_v<T>;  // cell centre
    return {xc - pi_v<T> + c, xc + pi_v<T> - c, nx, c, T(sys.h) - c, ny};
}

template <class T>
ValidationReport cross_method_compare(const ChannelSolution<T>& cs, const oracle::SpectralSystem& sys,
                                      const GridSpec<T>& g, double tol = 1e-6) {
    double worst = 0;
    std::size_t n = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const T x = g.nx == 1 ? g.x0 : g.x0 + (g.x1 - g.x0) * i / (g.nx - 1);
            const T y = g.ny == 1 ? g.y0 : g.y0 + (g.y1 - g.y0) * j / (g.ny - 1);
            if (image_distance(cs.parts, cplx<T>(x, y)) < T(1e-3)) continue;
            const cplx<T> a = evaluate_goursat(cs.parts, cplx<T>(x, y)).w;
            const auto b = sys.eval_w(oracle::CL(x, y));
            worst = std::max(worst, double(std::abs(cplx<long double>(a.real(), a.imag()) - b)));
            ++n;
        }
    return make_report("cross_method", worst, n, tol);
}

inline ValidationReport root_residual_report(const oracle::SpectralSystem& sys, double tol = 1e-12) {
    double worst = 0;
    for (const auto& r : sys.roots) worst = std::max(worst, double(r.residual));
    return make_report("pf_root_residual", worst, sys.roots.size(), tol);
}

// |sum rho_j| and |sum hat-rho_j| relative to the largest term, at seeded k.
// Tolerance is the system-residual scale with a floor of 1e-10.
inline std::vector<ValidationReport> global_relation_check(const oracle::SpectralSystem& sys, std::size_t n = 20,
                                                           std::uint64_t seed = default_seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // stay inside |Im k| < first root, away from k = 0
    const double lim = 0.8 * double(sys.roots.front().k.imag());
    double r1 = 0, r2 = 0;
    std::size_t got = 0;
    while (got < n) {
        const oracle::CL k(lim * u(rng), lim * u(rng));
        if (std::abs(k) < 0.3) continue;
        const auto g = sys.global_relation_residual(k);
        r1 = std::max(r1, double(g.first));
        r2 = std::max(r2, double(g.second));
        ++got;
    }
    const double tol = std::max(1e-10, 100 * double(sys.residual));
    return {make_report("global_relation_rho", r1, n, tol, seed),
            make_report("global_relation_rhohat", r2, n, tol, seed)};
}

// Standard battery for one built single-singularity solution.
template <class S>
std::vector<ValidationReport> validation_battery(const S& s, double eta = 1, std::uint64_t seed = default_seed) {
    std::vector<ValidationReport> out;
    out.push_back(noslip_residual(s));
    for (auto& r : periodicity_residual(s, 200, seed)) out.push_back(r);
    out.push_back(local_singularity_residual(s));
    for (auto& r : force_flux_check(s, eta)) out.push_back(r);
    for (auto& r : pde_residuals(s, 100, seed)) out.push_back(r);
    return out;
}

inline bool all_pass(const std::vector<ValidationReport>& v) {
    return std::all_of(v.begin(), v.end(), [](const ValidationReport& r) { return r.pass; });
}

}  // namespace stokes_lattice
