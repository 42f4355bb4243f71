#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stokes_lattice {

template <class T>
using cplx = std::complex<T>;

template <class T>
inline constexpr T pi_v = std::numbers::pi_v<T>;

template <class T>
inline constexpr T two_pi_v = 2 * std::numbers::pi_v<T>;

// error types

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct proximity_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct accuracy_error : std::runtime_error {
    double achieved;
    accuracy_error(const std::string& what, double achieved_residual)
        : std::runtime_error(what), achieved(achieved_residual) {}
};

enum class Kind { stokeslet, stresslet, force_quadrupole, source_dipole, source_quadrupole };

inline constexpr std::array<Kind, 5> all_kinds{Kind::stokeslet, Kind::stresslet, Kind::force_quadrupole,
                                               Kind::source_dipole, Kind::source_quadrupole};

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::stokeslet: return "stokeslet";
        case Kind::stresslet: return "stresslet";
        case Kind::force_quadrupole: return "force_quadrupole";
        case Kind::source_dipole: return "source_dipole";
        case Kind::source_quadrupole: return "source_quadrupole";
    }
    return "unknown";
}

inline Kind parse_kind(std::string_view s) {
    for (Kind k : all_kinds)
        if (s == kind_name(k)) return k;
    throw validation_error("unknown singularity kind '" + std::string(s) + "'");
}

// Homogeneity degree of the local velocity in |z - z0|^-1.  Rescaling lengths
// by c multiplies the strength by c^m to keep the physical field unchanged.
inline int scaling_order(Kind k) {
    switch (k) {
        case Kind::stokeslet: return 0;
        case Kind::stresslet: return 1;
        case Kind::force_quadrupole: return 2;
        case Kind::source_dipole: return 2;
        case Kind::source_quadrupole: return 3;
    }
    return 0;
}

template <class T>
struct ChannelGeometry {
    T period_l;
    T height_h;
    T canonical_h;
    T rho;
    T scale_c;
};

template <class T>
struct HalfPlaneGeometry {
    T period_l;
    T scale_c;
};

template <class T>
ChannelGeometry<T> make_channel_geometry(T period_l, T height_h) {
    if (!(std::isfinite(period_l) && period_l > 0)) throw validation_error("period_l must be positive and finite");
    if (!(std::isfinite(height_h) && height_h > 0)) throw validation_error("height_h must be positive and finite");
    ChannelGeometry<T> g;
    g.period_l = period_l;
    g.height_h = height_h;
    g.scale_c = two_pi_v<T> / period_l;
    g.canonical_h = g.scale_c * height_h;
    g.rho = std::exp(-g.canonical_h);
    return g;
}

// canonical channel of height h and period 2 pi
template <class T>
ChannelGeometry<T> canonical_channel(T h) {
    return make_channel_geometry<T>(two_pi_v<T>, h);
}

template <class T>
HalfPlaneGeometry<T> make_halfplane_geometry(T period_l) {
    if (!(std::isfinite(period_l) && period_l > 0)) throw validation_error("period_l must be positive and finite");
    return {period_l, two_pi_v<T> / period_l};
}

template <class T>
struct SingularitySpec {
    Kind kind;
    cplx<T> mu;
    cplx<T> z0;
    cplx<T> zeta0;
};

template <class T>
struct FlowSample {
    T u = 0;
    T v = 0;
    T p_over_eta = 0;
    T omega = 0;
};

template <class T>
cplx<T> zeta_of_z(cplx<T> z) {
    return std::polar(std::exp(-z.imag()), z.real());
}

template <class T>
cplx<T> z_of_zeta(cplx<T> zeta) {
    if (zeta == cplx<T>(0)) throw domain_error("z_of_zeta: zeta = 0 has no preimage");
    T x = std::arg(zeta);
    if (x < 0) x += two_pi_v<T>;
    if (x >= two_pi_v<T>) x -= two_pi_v<T>;
    return {x, -std::log(std::abs(zeta))};
}

// real part folded into [0, 2 pi)
template <class T>
T wrap_period(T x) {
    T r = std::fmod(x, two_pi_v<T>);
    if (r < 0) r += two_pi_v<T>;
    if (r >= two_pi_v<T>) r -= two_pi_v<T>;
    return r;
}

template <class T>
bool finite(cplx<T> z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <class T>
void check_finite(cplx<T> z, const char* what) {
    if (!finite(z)) throw validation_error(std::string(what) + " is not finite");
}

inline constexpr double wall_clearance = 1e-8;

template <class T>
SingularitySpec<T> make_channel_spec(Kind kind, cplx<T> mu, cplx<T> z0, T canonical_h) {
    check_finite(mu, "mu");
    check_finite(z0, "z0");
    T y = z0.imag();
    T rho = std::exp(-canonical_h);
    T az = std::exp(-y);
    if (!(az >= rho * (1 + T(wall_clearance)) && az <= 1 - T(wall_clearance)))
        throw validation_error("singularity at y=" + std::to_string(double(y)) + " is not strictly inside the channel");
    return {kind, mu, z0, zeta_of_z(z0)};
}

template <class T>
SingularitySpec<T> make_halfplane_spec(Kind kind, cplx<T> mu, cplx<T> z0) {
    check_finite(mu, "mu");
    check_finite(z0, "z0");
    if (!(std::exp(-z0.imag()) <= 1 - T(wall_clearance)))
        throw validation_error("singularity at y=" + std::to_string(double(z0.imag())) + " is not above the wall");
    return {kind, mu, z0, zeta_of_z(z0)};
}

// free-space local singular velocity u - i v at offset d = z - z0
template <class T>
cplx<T> local_velocity(Kind kind, cplx<T> mu, cplx<T> d) {
    cplx<T> mb = std::conj(mu), db = std::conj(d);
    switch (kind) {
        case Kind::stokeslet: return -mb * std::log(std::norm(d)) + mu * db / d;
        case Kind::stresslet: return -mb / db - mu * db / (d * d);
        case Kind::force_quadrupole: return -mb / (db * db) - T(2) * mu * db / (d * d * d);
        case Kind::source_dipole: return -mu / (d * d);
        case Kind::source_quadrupole: return -T(2) * mu / (d * d * d);
    }
    return {};
}

template <class T>
struct PhysicalSingularity {
    Kind kind;
    cplx<T> mu;
    cplx<T> z;
};

template <class T>
struct CanonicalChannelProblem {
    ChannelGeometry<T> geometry;
    std::vector<SingularitySpec<T>> specs;
    std::vector<T> strength_factors;
};

template <class T>
struct CanonicalHalfPlaneProblem {
    HalfPlaneGeometry<T> geometry;
    std::vector<SingularitySpec<T>> specs;
    std::vector<T> strength_factors;
};

template <class T>
T strength_factor(Kind kind, T c) {
    T f = 1;
    for (int i = 0; i < scaling_order(kind); ++i) f *= c;
    return f;
}

template <class T>
CanonicalChannelProblem<T> canonicalize(T period_l, T height_h, const std::vector<PhysicalSingularity<T>>& sings) {
    CanonicalChannelProblem<T> out;
    out.geometry = make_channel_geometry(period_l, height_h);
    T c = out.geometry.scale_c;
    for (std::size_t i = 0; i < sings.size(); ++i) {
        const auto& s = sings[i];
        T f = strength_factor(s.kind, c);
        try {
            out.specs.push_back(make_channel_spec<T>(s.kind, s.mu * f, s.z * c, out.geometry.canonical_h));
        } catch (const validation_error& e) {
            throw validation_error("singularity " + std::to_string(i) + ": " + e.what());
        }
        out.strength_factors.push_back(f);
    }
    return out;
}

template <class T>
CanonicalHalfPlaneProblem<T> canonicalize_halfplane(T period_l, const std::vector<PhysicalSingularity<T>>& sings) {
    CanonicalHalfPlaneProblem<T> out;
    out.geometry = make_halfplane_geometry(period_l);
    T c = out.geometry.scale_c;
    for (std::size_t i = 0; i < sings.size(); ++i) {
        const auto& s = sings[i];
        T f = strength_factor(s.kind, c);
        try {
            out.specs.push_back(make_halfplane_spec<T>(s.kind, s.mu * f, s.z * c));
        } catch (const validation_error& e) {
            throw validation_error("singularity " + std::to_string(i) + ": " + e.what());
        }
        out.strength_factors.push_back(f);
    }
    return out;
}

}  // namespace stokes_lattice
