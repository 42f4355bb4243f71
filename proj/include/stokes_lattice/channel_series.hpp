#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "goursat.hpp"
#include "model.hpp"
#include "parametric.hpp"

namespace stokes_lattice {

template <class T>
struct ForcingCoefficients {
    // index k holds n = k + 1
    std::vector<cplx<T>> d_plus, d_minus, e_plus, e_minus;
    cplx<T> d0{}, e0{};
};

template <class T>
struct CoefficientSolution {
    T a = 0;
    cplx<T> G0{};
    std::vector<cplx<T>> F, G, H, K;
    std::vector<T> denominators;
};

template <class T>
struct ChannelSolution {
    ChannelGeometry<T> geometry;
    SingularitySpec<T> spec;
    T a = 0;
    cplx<T> G0{};
    std::vector<NamedConstant<T>> singular_constants;
    std::vector<cplx<T>> F, G, H, K;
    int N = 0;
    T built_tolerance = 0;   // measured wall residual
    T system_residual = 0;   // worst relative residual of the four coefficient relations
    GoursatParts<T> parts;
};

namespace detail {

// sinh(x) - x without cancellation for small x
template <class T>
T sinh_minus_x(T x) {
    if (std::abs(x) >= T(1)) return std::sinh(x) - x;
    T x2 = x * x, term = x * x2 / 6, sum = 0;
    for (int k = 1; k < 40 && std::abs(term) > std::numeric_limits<T>::epsilon() * std::abs(sum) / 4; ++k) {
        sum += term;
        term *= x2 / T((2 * k + 2) * (2 * k + 3));
    }
    return sum;
}

}  // namespace detail

// (1 - rho^{2n})^2 - n^2 rho^{2n} (log rho^2)^2, with h = -log rho
template <class T>
T channel_denominator(int n, T h) {
    T x = n * h;
    if (x < 2) {
        T e = std::exp(-2 * x);
        return 4 * e * detail::sinh_minus_x(x) * (std::sinh(x) + x);
    }
    T r2 = std::exp(-2 * x);
    T om = -std::expm1(-2 * x);
    T L = -2 * h;
    return om * om - T(n) * T(n) * r2 * L * L;
}

template <class T>
ForcingCoefficients<T> forcing_coefficients(Kind kind, cplx<T> mu, cplx<T> zeta0, T rho, int N) {
    if (N < 1) throw validation_error("forcing_coefficients: N must be >= 1");
    ForcingCoefficients<T> fc;
    fc.d_plus.resize(N);
    fc.d_minus.resize(N);
    fc.e_plus.resize(N);
    fc.e_minus.resize(N);
    const cplx<T> I(0, 1), mb = std::conj(mu), zb = std::conj(zeta0);
    const T lz = std::log(std::norm(zeta0));
    const T y0 = -lz / 2;
    const T L = 2 * std::log(rho);
    const cplx<T> q = rho / zeta0, qb = rho / zb;
    cplx<T> zbn(1), ztn(1), qn(1), qbn(1);
    for (int k = 0; k < N; ++k) {
        const T n = T(k + 1);
        zbn *= zb;
        ztn *= zeta0;
        qn *= q;
        qbn *= qb;
        switch (kind) {
            case Kind::stokeslet:
                fc.d_plus[k] = -mb * zbn / n;
                fc.d_minus[k] = -ztn * (mb / n + mu * lz);
                fc.e_plus[k] = qn * (mu * (lz - L) - mb / n);
                fc.e_minus[k] = -mb * qbn / n;
                break;
            case Kind::stresslet:
                fc.d_plus[k] = -I * mb * zbn;
                fc.d_minus[k] = I * mu * ztn * (1 - 2 * n * y0);
                fc.e_plus[k] = -I * mu * qn * (1 + n * (2 * y0 + L));
                fc.e_minus[k] = I * mb * qbn;
                break;
            case Kind::force_quadrupole:
                fc.d_plus[k] = -n * mb * zbn;
                fc.d_minus[k] = 2 * n * mu * ztn * (n * y0 - 1);
                fc.e_plus[k] = -n * mu * qn * (2 + n * (2 * y0 + L));
                fc.e_minus[k] = -n * mb * qbn;
                break;
            case Kind::source_dipole:
                fc.d_plus[k] = 0;
                fc.d_minus[k] = -n * mu * ztn;
                fc.e_plus[k] = -n * mu * qn;
                fc.e_minus[k] = 0;
                break;
            case Kind::source_quadrupole:
                fc.d_plus[k] = 0;
                fc.d_minus[k] = -I * n * n * mu * ztn;
                fc.e_plus[k] = I * n * n * mu * qn;
                fc.e_minus[k] = 0;
                break;
        }
    }
    fc.d0 = 0;
    if (kind == Kind::stokeslet)
        fc.e0 = 2 * mu.real() * lz;
    else if (kind == Kind::stresslet)
        fc.e0 = 2 * mu.imag();
    else
        fc.e0 = 0;
    return fc;
}

template <class T>
std::vector<NamedConstant<T>> singular_constants(Kind kind, cplx<T> mu, cplx<T> z0, cplx<T> zeta0) {
    const cplx<T> I(0, 1);
    const T y0 = z0.imag();
    const cplx<T> z1 = zeta0, z2 = zeta0 * zeta0, z3 = z2 * zeta0;
    switch (kind) {
        case Kind::stokeslet: return {{"lambda", mu * z1 * std::log(std::norm(zeta0))}};
        case Kind::stresslet:
            return {{"f_pole", I * mu * z1}, {"chi", I * mu * z1 * (2 * y0 - 1)}, {"nu", T(2) * I * mu * z2 * y0}};
        case Kind::force_quadrupole:
            return {{"beta", -mu * z1},
                    {"gamma", -mu * z2},
                    {"delta", T(2) * mu * z1 * (1 - y0)},
                    {"epsilon", T(2) * mu * z2 * (1 - 3 * y0)},
                    {"kappa", T(-4) * mu * z3 * y0}};
        case Kind::source_dipole: return {{"g_pole1", mu * z1}, {"g_pole2", mu * z2}};
        case Kind::source_quadrupole:
            return {{"g_pole1", I * mu * z1}, {"g_pole2", T(3) * I * mu * z2}, {"g_pole3", T(2) * I * mu * z3}};
    }
    return {};
}

// residual of the four coefficient relations, relative to the largest term in each
template <class T>
T coefficient_system_residual(const ForcingCoefficients<T>& fc, const CoefficientSolution<T>& s, T rho) {
    const T L = 2 * std::log(rho);
    T worst = 0;
    auto rel = [&](cplx<T> lhs_minus_rhs, std::initializer_list<T> mags) {
        T m = 0;
        for (T v : mags) m = std::max(m, v);
        if (m == 0) return T(0);
        return std::abs(lhs_minus_rhs) / m;
    };
    cplx<T> rn(1);
    for (std::size_t k = 0; k < s.F.size(); ++k) {
        const T n = T(k + 1);
        rn *= rho;
        const T r = rn.real();
        const cplx<T> F = s.F[k], G = s.G[k], H = s.H[k], K = s.K[k];
        const cplx<T> t1 = -r * std::conj(H), t2 = -std::conj(F), t3 = r * K, t4 = -n * r * L * F, t5 = n * L * H;
        worst = std::max(worst, rel(t1 + G - fc.d_plus[k], {std::abs(t1), std::abs(G), std::abs(fc.d_plus[k])}));
        worst = std::max(worst, rel(t2 + t3 - fc.d_minus[k], {std::abs(t2), std::abs(t3), std::abs(fc.d_minus[k])}));
        worst = std::max(worst, rel(-std::conj(H) + r * G + t4 - fc.e_plus[k],
                                    {std::abs(H), r * std::abs(G), std::abs(t4), std::abs(fc.e_plus[k])}));
        worst = std::max(worst, rel(-r * std::conj(F) + K + t5 - fc.e_minus[k],
                                    {r * std::abs(F), std::abs(K), std::abs(t5), std::abs(fc.e_minus[k])}));
    }
    return worst;
}

template <class T>
CoefficientSolution<T> solve_coefficient_system(const ForcingCoefficients<T>& fc, T rho, int N) {
    if (!(rho > 0 && rho < 1)) throw validation_error("solve_coefficient_system: rho must lie in (0,1)");
    if (N < 1 || std::size_t(N) > fc.d_plus.size()) throw validation_error("solve_coefficient_system: bad N");
    CoefficientSolution<T> s;
    const T h = -std::log(rho);
    const T L = -2 * h;
    s.a = ((fc.d0 - fc.e0) / (4 * std::log(rho))).real();
    s.G0 = fc.d0;
    s.F.resize(N);
    s.G.resize(N);
    s.H.resize(N);
    s.K.resize(N);
    s.denominators.resize(N);
    for (int k = 0; k < N; ++k) {
        const int n = k + 1;
        const T rn = std::exp(-n * h), r2 = rn * rn, om = -std::expm1(-2 * n * h);
        const T den = channel_denominator<T>(n, h);
        if (!(den > 0))
            throw std::logic_error("channel denominator not positive at n=" + std::to_string(n));
        s.denominators[k] = den;
        const cplx<T> dp = fc.d_plus[k], dm = fc.d_minus[k], ep = fc.e_plus[k], em = fc.e_minus[k];
        const cplx<T> F =
            (T(n) * rn * L * ep + rn * om * std::conj(em) - T(n) * r2 * L * dp - om * std::conj(dm)) / den;
        s.F[k] = F;
        s.G[k] = (-T(n) * r2 * L * F - rn * ep + dp) / om;
        s.H[k] = std::conj((-T(n) * rn * L * F - ep + rn * dp) / om);
        s.K[k] = (T(n) * L * std::conj(ep) + om * em - T(n) * rn * L * std::conj(dp) -
                  dm * rn * (om + T(n) * T(n) * L * L)) /
                 den;
    }
    return s;
}

// polynomial growth in n of the forcing coefficients, per kind
inline int forcing_growth(Kind k) {
    switch (k) {
        case Kind::stokeslet: return 0;
        case Kind::stresslet: return 1;
        case Kind::force_quadrupole: return 2;
        case Kind::source_dipole: return 1;
        case Kind::source_quadrupole: return 2;
    }
    return 0;
}

inline constexpr int min_truncation = 8;
inline constexpr int max_truncation = 4096;

template <class T>
int choose_truncation(T rho, T abs_zeta0, T tol, T scale = 1, int growth = 0) {
    if (!(tol > 0 && tol < 1)) throw validation_error("choose_truncation: tol must lie in (0,1)");
    if (!(rho > 0 && rho < abs_zeta0 && abs_zeta0 < 1))
        throw validation_error("choose_truncation: need 0 < rho < |zeta0| < 1");
    const T q = std::max(abs_zeta0, rho / abs_zeta0);
    const T C = std::max(scale, T(1));
    for (int N = min_truncation; N <= max_truncation; ++N) {
        T bound = C * std::pow(T(N), T(growth + 1)) * std::pow(q, T(N));
        if (bound <= tol) return N;
    }
    return max_truncation;
}

template <class T>
GoursatParts<T> channel_singular_parts(const SingularitySpec<T>& sp) {
    GoursatParts<T> p;
    const cplx<T> one(1), mz = -sp.zeta0;
    p.centers.push_back(sp.z0);
    auto c = singular_constants(sp.kind, sp.mu, sp.z0, sp.zeta0);
    switch (sp.kind) {
        case Kind::stokeslet:
            p.flog.push_back({sp.mu, one, mz});
            p.gpole.push_back({c[0].value, one, mz, 1});
            break;
        case Kind::stresslet:
            p.fpole.push_back({c[0].value, one, mz, 1});
            p.gpole.push_back({c[1].value, one, mz, 1});
            p.gpole.push_back({c[2].value, one, mz, 2});
            break;
        case Kind::force_quadrupole:
            p.fpole.push_back({c[0].value, one, mz, 1});
            p.fpole.push_back({c[1].value, one, mz, 2});
            p.gpole.push_back({c[2].value, one, mz, 1});
            p.gpole.push_back({c[3].value, one, mz, 2});
            p.gpole.push_back({c[4].value, one, mz, 3});
            break;
        case Kind::source_dipole:
            p.gpole.push_back({c[0].value, one, mz, 1});
            p.gpole.push_back({c[1].value, one, mz, 2});
            break;
        case Kind::source_quadrupole:
            p.gpole.push_back({c[0].value, one, mz, 1});
            p.gpole.push_back({c[1].value, one, mz, 2});
            p.gpole.push_back({c[2].value, one, mz, 3});
            break;
    }
    anchor_at(p, sp.z0, sp.zeta0);
    return p;
}

// Build with a fixed truncation; no residual-driven retry.
template <class T>
ChannelSolution<T> build_channel_solution_fixed(const SingularitySpec<T>& sp, const ChannelGeometry<T>& g, int N) {
    ChannelSolution<T> s;
    s.geometry = g;
    s.spec = sp;
    s.N = N;
    s.singular_constants = singular_constants(sp.kind, sp.mu, sp.z0, sp.zeta0);
    auto fc = forcing_coefficients(sp.kind, sp.mu, sp.zeta0, g.rho, N);
    auto cs = solve_coefficient_system(fc, g.rho, N);
    s.system_residual = coefficient_system_residual(fc, cs, g.rho);
    s.a = cs.a;
    s.G0 = cs.G0;
    s.F = cs.F;
    s.G = cs.G;
    s.H = cs.H;
    s.K = cs.K;
    GoursatParts<T> p = channel_singular_parts(sp);
    p.rho = g.rho;
    p.top = g.canonical_h;
    if (s.a != 0) p.flog.push_back({cplx<T>(s.a), cplx<T>(1), cplx<T>(0)});
    p.Gc += s.G0;
    p.F = s.F;
    p.G = s.G;
    p.H = s.H;
    p.K = s.K;
    s.parts = std::move(p);
    return s;
}

inline constexpr int noslip_samples = 256;

template <class T>
ChannelSolution<T> build_channel_solution(Kind kind, cplx<T> mu, cplx<T> z0, const ChannelGeometry<T>& g,
                                          T tol = T(1e-12)) {
    if (!(tol > 0)) throw validation_error("build_channel_solution: tol must be positive");
    const SingularitySpec<T> sp = make_channel_spec(kind, mu, z0, g.canonical_h);
    const T az = std::abs(sp.zeta0);
    if (mu == cplx<T>(0)) {
        auto s = build_channel_solution_fixed(sp, g, min_truncation);
        s.built_tolerance = wall_residual(s.parts, noslip_samples);
        return s;
    }
    const T scale = std::abs(mu) * (1 + std::abs(std::log(az)) + 1 / (1 - az));
    int N = choose_truncation(g.rho, az, std::min(tol, T(0.5)), scale, forcing_growth(kind));
    for (;;) {
        auto s = build_channel_solution_fixed(sp, g, N);
        const T res = wall_residual(s.parts, noslip_samples);
        s.built_tolerance = res;
        if (res <= 10 * tol) return s;
        if (N >= max_truncation)
            throw accuracy_error("channel build: wall residual " + std::to_string(double(res)) +
                                     " exceeds 10*tol at the truncation clamp",
                                 double(res));
        N = std::min(2 * N, max_truncation);
    }
}

template <class T>
GoursatParts<T> parametric_derivative_build(Kind base_kind, Kind target_kind, cplx<T> mu, cplx<T> z0,
                                            const ChannelGeometry<T>& g, T delta, T tol = T(1e-13)) {
    // stencil strengths reach |mu| / delta^2, so the absolute wall tolerance scales with them
    auto builder = [&](cplx<T> m, cplx<T> z) {
        return build_channel_solution(base_kind, m, z, g, tol * std::max(T(1), std::abs(m))).parts;
    };
    auto inside = [&](cplx<T> z) { return z.imag() > 0 && z.imag() < g.canonical_h; };
    return derivative_combination<T>(base_kind, target_kind, mu, z0, delta, builder, inside);
}

}  // namespace stokes_lattice
