#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "goursat.hpp"
#include "model.hpp"

namespace stokes_lattice {

enum class DerivativePair { stokeslet_to_source_dipole, stresslet_to_force_quadrupole, stresslet_to_source_quadrupole };

inline DerivativePair derivative_pair(Kind base, Kind target) {
    if (base == Kind::stokeslet && target == Kind::source_dipole) return DerivativePair::stokeslet_to_source_dipole;
    if (base == Kind::stresslet && target == Kind::force_quadrupole)
        return DerivativePair::stresslet_to_force_quadrupole;
    if (base == Kind::stresslet && target == Kind::source_quadrupole)
        return DerivativePair::stresslet_to_source_quadrupole;
    throw validation_error(std::string("unsupported parametric derivative ") + kind_name(base) + " -> " +
                           kind_name(target));
}

inline Kind pair_base(DerivativePair p) {
    return p == DerivativePair::stokeslet_to_source_dipole ? Kind::stokeslet : Kind::stresslet;
}

inline Kind pair_target(DerivativePair p) {
    switch (p) {
        case DerivativePair::stokeslet_to_source_dipole: return Kind::source_dipole;
        case DerivativePair::stresslet_to_force_quadrupole: return Kind::force_quadrupole;
        case DerivativePair::stresslet_to_source_quadrupole: return Kind::source_quadrupole;
    }
    return Kind::stokeslet;
}

// Finite-difference stencil in (x0, y0) as (strength, position) pairs.
// The map (f, g') -> u - i v is only real-linear, so the Wirtinger derivative
// d/dz0 of f is taken at velocity level: 1/2 [d/dx0 w(mu) + d/dy0 w(-i mu)].
// The mixed derivative d^2/dz0 dz0bar = Laplacian/4 uses the fourth-order
// five-point stencil per axis.
template <class T>
std::vector<std::pair<cplx<T>, cplx<T>>> derivative_stencil(DerivativePair pair, cplx<T> mu, cplx<T> z0, T delta) {
    const cplx<T> I(0, 1);
    std::vector<std::pair<cplx<T>, cplx<T>>> st;
    if (pair == DerivativePair::stresslet_to_force_quadrupole) {
        const T w = 1 / (4 * delta);
        st.push_back({mu * w, z0 + delta});
        st.push_back({-mu * w, z0 - delta});
        st.push_back({-I * mu * w, z0 + I * delta});
        st.push_back({I * mu * w, z0 - I * delta});
        return st;
    }
    const T sign = pair == DerivativePair::stokeslet_to_source_dipole ? T(1) : T(-1);
    const T s = sign / (4 * 12 * delta * delta);
    st.push_back({mu * (s * T(-60)), z0});
    for (cplx<T> e : {cplx<T>(1), I}) {
        st.push_back({mu * (s * T(16)), z0 + e * delta});
        st.push_back({mu * (s * T(16)), z0 - e * delta});
        st.push_back({mu * (s * T(-1)), z0 + e * (2 * delta)});
        st.push_back({mu * (s * T(-1)), z0 - e * (2 * delta)});
    }
    return st;
}

template <class T, class Builder, class Inside>
GoursatParts<T> derivative_combination(Kind base, Kind target, cplx<T> mu, cplx<T> z0, T delta, Builder&& build,
                                       Inside&& inside) {
    const DerivativePair pair = derivative_pair(base, target);
    if (!(delta > 0)) throw validation_error("derivative step must be positive");
    const auto st = derivative_stencil(pair, mu, z0, delta);
    for (const auto& [m, z] : st)
        if (!inside(z)) throw validation_error("derivative stencil leaves the fluid domain");
    GoursatParts<T> acc;
    bool first = true;
    for (const auto& [m, z] : st) {
        GoursatParts<T> p = build(m, z);
        acc = first ? p : superpose(acc, p);
        first = false;
    }
    return acc;
}

}  // namespace stokes_lattice
