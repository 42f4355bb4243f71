#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "channel_series.hpp"
#include "goursat.hpp"
#include "halfplane_closed.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace stokes_lattice {

template <class T>
const GoursatParts<T>& parts_of(const GoursatParts<T>& p) {
    return p;
}
template <class T>
const GoursatParts<T>& parts_of(const ChannelSolution<T>& s) {
    return s.parts;
}
template <class T>
const GoursatParts<T>& parts_of(const HalfPlaneSolution<T>& s) {
    return s.parts;
}

template <class T>
struct Velocity {
    T u = 0, v = 0;
};

template <class T>
struct PressureVorticity {
    T p_over_eta = 0, omega = 0;
};

inline constexpr double default_exclusion = 1e-8;

// distance from z to the nearest periodic image of any singularity
template <class T>
T image_distance(const GoursatParts<T>& p, cplx<T> z) {
    T best = std::numeric_limits<T>::infinity();
    for (const auto& c : p.centers) {
        T dx = std::remainder(z.real() - c.real(), two_pi_v<T>);
        best = std::min(best, std::hypot(dx, z.imag() - c.imag()));
    }
    return best;
}

template <class T>
bool in_domain(const GoursatParts<T>& p, cplx<T> z) {
    const T eps = T(1e-12) * (p.is_channel() ? std::max(T(1), p.top) : T(1));
    if (!finite(z)) return false;
    if (z.imag() < -eps) return false;
    if (p.is_channel() && z.imag() > p.top + eps) return false;
    return true;
}

template <class T>
void check_point(const GoursatParts<T>& p, cplx<T> z, T r_excl) {
    if (!in_domain(p, z)) throw domain_error("evaluation point outside the fluid domain");
    if (image_distance(p, z) < r_excl) throw proximity_error("evaluation point within the exclusion radius of a singularity");
}

template <class S>
auto eval_velocity(const S& src, decltype(parts_of(src).rho) x, decltype(parts_of(src).rho) y,
                   decltype(parts_of(src).rho) r_excl = decltype(parts_of(src).rho)(default_exclusion)) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    check_point(p, cplx<T>(x, y), r_excl);
    cplx<T> w = evaluate_goursat(p, cplx<T>(x, y)).w;
    return Velocity<T>{w.real(), -w.imag()};
}

template <class S>
auto eval_pressure_vorticity(const S& src, decltype(parts_of(src).rho) x, decltype(parts_of(src).rho) y,
                             decltype(parts_of(src).rho) r_excl = decltype(parts_of(src).rho)(default_exclusion)) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    check_point(p, cplx<T>(x, y), r_excl);
    cplx<T> q = T(4) * evaluate_goursat(p, cplx<T>(x, y)).W;
    return PressureVorticity<T>{q.real(), -q.imag()};
}

template <class S>
auto eval_sample(const S& src, decltype(parts_of(src).rho) x, decltype(parts_of(src).rho) y,
                 decltype(parts_of(src).rho) r_excl = decltype(parts_of(src).rho)(default_exclusion)) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    check_point(p, cplx<T>(x, y), r_excl);
    auto g = evaluate_goursat(p, cplx<T>(x, y));
    cplx<T> q = T(4) * g.W;
    return FlowSample<T>{g.w.real(), -g.w.imag(), q.real(), -q.imag()};
}

template <class T>
struct ContourResult {
    cplx<T> force;
    T mass_flux;
};

// Force from the change of 2 eta i H around the circle, H = f + z conj(f') + conj(g').
// The log parts of H are 2 i c arg(.), tracked by unwrapping between samples.
template <class S>
auto contour_diagnostics(const S& src, cplx<decltype(parts_of(src).rho)> center, decltype(parts_of(src).rho) radius,
                         int m_samples = 256, decltype(parts_of(src).rho) eta = 1) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    if (m_samples < 64) throw validation_error("contour_diagnostics: need at least 64 samples");
    if (!(radius > 0)) throw validation_error("contour_diagnostics: radius must be positive");
    if (center.imag() - radius <= 0 || (p.is_channel() && center.imag() + radius >= p.top))
        throw domain_error("contour touches a wall");
    for (const auto& c : p.centers) {
        T dx = std::remainder(center.real() - c.real(), two_pi_v<T>);
        T d = std::hypot(dx, center.imag() - c.imag());
        if (std::abs(d - radius) < T(1e-6) * radius) throw domain_error("contour passes through a singularity");
    }
    const cplx<T> I(0, 1);
    std::vector<cplx<T>> Hs(m_samples);
    std::vector<std::vector<cplx<T>>> lw(m_samples, std::vector<cplx<T>>(p.flog.size()));
    cplx<T> flux{};
    for (int j = 0; j < m_samples; ++j) {
        const T th = two_pi_v<T> * T(j) / T(m_samples);
        const cplx<T> e = std::polar(T(1), th);
        const cplx<T> z = center + radius * e;
        const auto g = evaluate_goursat(p, z);
        Hs[j] = g.Frat + T(2) * I * z.imag() * std::conj(g.W) + std::conj(g.Grat);
        const cplx<T> zeta = zeta_of_z(cplx<T>(wrap_period(z.real()), z.imag()));
        for (std::size_t t = 0; t < p.flog.size(); ++t) lw[j][t] = p.flog[t].alpha * zeta + p.flog[t].beta;
        flux += g.w * I * radius * e;
    }
    flux *= two_pi_v<T> / T(m_samples);
    cplx<T> dH{};
    for (int j = 0; j < m_samples; ++j) {
        const int k = (j + 1) % m_samples;
        dH += Hs[k] - Hs[j];
        for (std::size_t t = 0; t < p.flog.size(); ++t) {
            const T darg = std::arg(lw[k][t] / lw[j][t]);
            dH += T(2) * I * p.flog[t].c * darg;
        }
    }
    return ContourResult<T>{T(2) * eta * I * dH, flux.imag()};
}

template <class T>
struct GridSpec {
    T x0, x1;
    int nx;
    T y0, y1;
    int ny;
};

template <class T>
struct GridNode {
    T x, y;
    FlowSample<T> sample;
    bool masked;
};

template <class S>
auto sample_grid(const S& src, const GridSpec<decltype(parts_of(src).rho)>& g,
                 decltype(parts_of(src).rho) exclusion = decltype(parts_of(src).rho)(default_exclusion),
                 unsigned threads = 1) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    if (g.nx < 1 || g.ny < 1) throw validation_error("sample_grid: empty grid");
    std::vector<GridNode<T>> out(std::size_t(g.nx) * g.ny);
    auto coord = [](T a, T b, int n, int i) { return n == 1 ? a : a + (b - a) * T(i) / T(n - 1); };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            T x = coord(g.x0, g.x1, g.nx, i), y = coord(g.y0, g.y1, g.ny, j);
            if (!in_domain(p, cplx<T>(x, y))) throw domain_error("sample_grid: grid leaves the fluid domain");
            out[std::size_t(j) * g.nx + i] = {x, y, {}, false};
        }
    parallel_for(out.size(), threads, [&](std::size_t k) {
        auto& n = out[k];
        if (image_distance(p, cplx<T>(n.x, n.y)) < exclusion) {
            n.masked = true;
            return;
        }
        auto gv = evaluate_goursat(p, cplx<T>(n.x, n.y));
        cplx<T> q = T(4) * gv.W;
        n.sample = {gv.w.real(), -gv.w.imag(), q.real(), -q.imag()};
    });
    return out;
}

enum class StopReason { wall, singularity, step_budget, closed, outside };

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::wall: return "wall";
        case StopReason::singularity: return "singularity";
        case StopReason::step_budget: return "step_budget";
        case StopReason::closed: return "closed";
        case StopReason::outside: return "outside";
    }
    return "unknown";
}

template <class T>
struct Streamline {
    std::vector<cplx<T>> points;
    StopReason reason;
};

inline constexpr double wall_stop = 1e-6;

// Classical RK4 on dx/dt = (u, v).  Closure: the path crosses the line through
// the seed (or a periodic copy) normal to the starting velocity, in the starting
// direction, within one step length of the seed.  The crossing point is
// interpolated and appended, so the last point measures the orbit mismatch.
template <class S>
auto trace_streamline(const S& src, cplx<decltype(parts_of(src).rho)> seed,
                      decltype(parts_of(src).rho) step_h = decltype(parts_of(src).rho)(1e-2),
                      int max_steps = 20000,
                      decltype(parts_of(src).rho) exclusion = decltype(parts_of(src).rho)(default_exclusion)) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    if (!in_domain(p, seed)) throw domain_error("trace_streamline: seed outside the fluid domain");
    Streamline<T> sl{{}, StopReason::step_budget};
    auto near_wall = [&](cplx<T> z) {
        return z.imag() < T(wall_stop) || (p.is_channel() && z.imag() > p.top - T(wall_stop));
    };
    const T sing_stop = std::max(exclusion, step_h);
    if (near_wall(seed)) {
        sl.reason = StopReason::wall;
        return sl;
    }
    if (image_distance(p, seed) < sing_stop) {
        sl.reason = StopReason::singularity;
        return sl;
    }
    auto vel = [&](cplx<T> z) {
        cplx<T> w = evaluate_goursat(p, z).w;
        return std::conj(w);  // u + i v
    };
    sl.points.push_back(seed);
    cplx<T> z = seed;
    T travelled = 0;
    cplx<T> dir = vel(seed);
    if (std::abs(dir) == T(0)) return sl;  // stagnation point
    dir /= std::abs(dir);
    for (int s = 0; s < max_steps; ++s) {
        const cplx<T> k1 = vel(z);
        const cplx<T> k2 = vel(z + step_h / 2 * k1);
        const cplx<T> k3 = vel(z + step_h / 2 * k2);
        const cplx<T> k4 = vel(z + step_h * k3);
        const cplx<T> zn = z + step_h / 6 * (k1 + T(2) * k2 + T(2) * k3 + k4);
        if (!finite(zn)) {
            sl.reason = StopReason::outside;
            return sl;
        }
        const cplx<T> seg = zn - z;
        travelled += std::abs(seg);
        if (travelled > 10 * std::abs(seg)) {
            const T shift = std::round((zn.real() - seed.real()) / two_pi_v<T>) * two_pi_v<T>;
            const cplx<T> target = seed + shift;
            const T s0 = std::real((z - target) * std::conj(dir));
            const T s1 = std::real((zn - target) * std::conj(dir));
            if (s0 < 0 && s1 >= 0) {
                const cplx<T> cross = z + (s0 / (s0 - s1)) * seg;
                if (std::abs(cross - target) < std::abs(seg)) {
                    sl.points.push_back(cross);
                    sl.reason = StopReason::closed;
                    return sl;
                }
            }
        }
        z = zn;
        if (!in_domain(p, z)) {
            sl.reason = StopReason::outside;
            return sl;
        }
        sl.points.push_back(z);
        if (near_wall(z)) {
            sl.reason = StopReason::wall;
            return sl;
        }
        if (image_distance(p, z) < sing_stop) {
            sl.reason = StopReason::singularity;
            return sl;
        }
    }
    return sl;
}

// Sign changes of v along the vertical line x = xm, sampled at interior
// points of (y0, y1); endpoints on a wall only carry rounding noise.  For an
// array symmetric about its singularities u vanishes on the line midway between
// images, so each change marks a stagnation point.  Values below
// 1e-12 of the line maximum count as zero and never start a change.
template <class S>
int midline_sign_changes(const S& src, decltype(parts_of(src).rho) xm, decltype(parts_of(src).rho) y0,
                         decltype(parts_of(src).rho) y1, int samples = 2001) {
    using T = decltype(parts_of(src).rho);
    const auto& p = parts_of(src);
    if (samples < 3 || !(y1 > y0)) throw validation_error("midline_sign_changes: bad sampling interval");
    std::vector<T> v(samples);
    T vmax = 0;
    for (int j = 0; j < samples; ++j) {
        const T y = y0 + (y1 - y0) * T(j + 1) / T(samples + 1);
        v[j] = -evaluate_goursat(p, cplx<T>(xm, y)).w.imag();
        vmax = std::max(vmax, std::abs(v[j]));
    }
    const T floor = T(1e-12) * vmax;
    int changes = 0, last = 0;
    for (T x : v) {
        const int sgn = x > floor ? 1 : (x < -floor ? -1 : 0);
        if (sgn == 0) continue;
        if (last != 0 && sgn != last) ++changes;
        last = sgn;
    }
    return changes;
}

}  // namespace stokes_lattice
