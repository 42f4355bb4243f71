#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "goursat.hpp"
#include "model.hpp"
#include "parametric.hpp"

namespace stokes_lattice {

template <class T>
struct HalfPlaneSolution {
    SingularitySpec<T> spec;
    std::vector<NamedConstant<T>> constants;
    GoursatParts<T> parts;
};

template <class T>
std::vector<NamedConstant<T>> halfplane_constants(Kind kind, cplx<T> mu, cplx<T> z0, cplx<T> zeta0) {
    const cplx<T> I(0, 1), mb = std::conj(mu);
    const T y0 = z0.imag();
    const cplx<T> z1 = zeta0, z2 = zeta0 * zeta0, z3 = z2 * zeta0;
    switch (kind) {
        case Kind::stokeslet: {
            const cplx<T> kap = mb * std::log(std::norm(zeta0));
            return {{"kappa", kap}, {"epsilon", -mu}, {"lambda", -kap}};
        }
        case Kind::stresslet:
            return {{"beta", I * mb * (2 * y0 + 1)},
                    {"gamma", T(-2) * I * mb * y0},
                    {"chi", I * mu * z1 * (2 * y0 - 1)},
                    {"nu", T(2) * I * mu * z2 * y0}};
        case Kind::force_quadrupole:
            return {{"beta", T(-2) * mb * (1 + y0)},
                    {"gamma", T(2) * mb * (1 + 3 * y0)},
                    {"delta", T(-4) * mb * y0},
                    {"epsilon", T(2) * mu * z1 * (1 - y0)},
                    {"kappa", T(2) * mu * z2 * (1 - 3 * y0)},
                    {"lambda", T(-4) * mu * z3 * y0}};
        case Kind::source_dipole:
            return {{"f_image1", -mb}, {"f_image2", mb}, {"g_pole1", mu * z1}, {"g_pole2", mu * z2}};
        case Kind::source_quadrupole:
            return {{"f_image1", -I * mb},
                    {"f_image2", T(3) * I * mb},
                    {"f_image3", T(-2) * I * mb},
                    {"g_pole1", I * mu * z1},
                    {"g_pole2", T(3) * I * mu * z2},
                    {"g_pole3", T(2) * I * mu * z3}};
    }
    return {};
}

template <class T>
HalfPlaneSolution<T> build_halfplane_solution(Kind kind, cplx<T> mu, cplx<T> z0) {
    HalfPlaneSolution<T> s;
    s.spec = make_halfplane_spec(kind, mu, z0);
    const cplx<T> zeta0 = s.spec.zeta0, I(0, 1), mb = std::conj(mu), one(1), mz = -zeta0;
    const cplx<T> ia = -std::conj(zeta0);  // image factor 1 - conj(zeta0) zeta
    s.constants = halfplane_constants(kind, mu, z0, zeta0);
    GoursatParts<T> p;
    p.centers.push_back(z0);
    auto img = [&](cplx<T> c, int o) { return PoleTerm<T>{c, ia, one, o}; };
    const cplx<T> z1 = zeta0, z2 = zeta0 * zeta0, z3 = z2 * zeta0;
    switch (kind) {
        case Kind::stokeslet: {
            const cplx<T> kap = s.constants[0].value;
            p.flog.push_back({mu, one, mz});
            p.flog.push_back({-mu, ia, one});
            p.fpole.push_back(img(kap, 1));
            p.Fc = -kap;
            p.gpole.push_back({std::conj(kap) * zeta0, one, mz, 1});
            break;
        }
        case Kind::stresslet:
            p.fpole.push_back({I * mu * z1, one, mz, 1});
            p.fpole.push_back(img(s.constants[0].value, 1));
            p.fpole.push_back(img(s.constants[1].value, 2));
            p.Fc = -I * mb;
            p.gpole.push_back({s.constants[2].value, one, mz, 1});
            p.gpole.push_back({s.constants[3].value, one, mz, 2});
            p.gpole.push_back(img(-I * mb, 1));
            p.Gc = I * mb;
            break;
        case Kind::force_quadrupole:
            p.fpole.push_back({-mu * z1, one, mz, 1});
            p.fpole.push_back({-mu * z2, one, mz, 2});
            p.fpole.push_back(img(s.constants[0].value, 1));
            p.fpole.push_back(img(s.constants[1].value, 2));
            p.fpole.push_back(img(s.constants[2].value, 3));
            p.gpole.push_back({s.constants[3].value, one, mz, 1});
            p.gpole.push_back({s.constants[4].value, one, mz, 2});
            p.gpole.push_back({s.constants[5].value, one, mz, 3});
            p.gpole.push_back(img(mb, 1));
            p.gpole.push_back(img(-mb, 2));
            break;
        case Kind::source_dipole:
            p.fpole.push_back(img(-mb, 1));
            p.fpole.push_back(img(mb, 2));
            p.gpole.push_back({mu * z1, one, mz, 1});
            p.gpole.push_back({mu * z2, one, mz, 2});
            break;
        case Kind::source_quadrupole:
            p.fpole.push_back(img(-I * mb, 1));
            p.fpole.push_back(img(T(3) * I * mb, 2));
            p.fpole.push_back(img(T(-2) * I * mb, 3));
            p.gpole.push_back({I * mu * z1, one, mz, 1});
            p.gpole.push_back({T(3) * I * mu * z2, one, mz, 2});
            p.gpole.push_back({T(2) * I * mu * z3, one, mz, 3});
            break;
    }
    anchor_at(p, s.spec.z0, zeta0);
    s.parts = std::move(p);
    return s;
}

template <class T>
GoursatParts<T> parametric_derivative_build(Kind base_kind, Kind target_kind, cplx<T> mu, cplx<T> z0,
                                            const HalfPlaneGeometry<T>&, T delta) {
    auto builder = [&](cplx<T> m, cplx<T> z) { return build_halfplane_solution(base_kind, m, z).parts; };
    auto inside = [](cplx<T> z) { return z.imag() > 0; };
    return derivative_combination<T>(base_kind, target_kind, mu, z0, delta, builder, inside);
}

}  // namespace stokes_lattice
