#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "model.hpp"

namespace stokes_lattice {

// c * log(alpha zeta + beta)
// Anchored terms vanish at zeta(zc) and evaluate alpha zeta + beta as
// -beta expm1(i (z - zc)), which keeps full relative accuracy near zc.
template <class T>
struct LogTerm {
    cplx<T> c, alpha, beta;
    cplx<T> zc{};
    bool anchored = false;
};

// c / (alpha zeta + beta)^order
template <class T>
struct PoleTerm {
    cplx<T> c, alpha, beta;
    int order;
    cplx<T> zc{};
    bool anchored = false;
};

// Goursat pair in the zeta plane:
//   F = sum logs + Fc + sum poles + sum F_n zeta^n + H_n (rho/zeta)^n
//   G = Gc + sum poles + sum G_n zeta^n + K_n (rho/zeta)^n     (G excludes i log(zeta) W)
// Each log term in F carries the partner -conj(c) log(...) in g', so only
// log-moduli reach the velocity.
template <class T>
struct GoursatParts {
    T rho = 0;                                          // 0 for the half-plane
    T top = std::numeric_limits<T>::infinity();         // canonical y of the upper wall
    std::vector<LogTerm<T>> flog;
    std::vector<PoleTerm<T>> fpole, gpole;
    cplx<T> Fc{}, Gc{};
    std::vector<cplx<T>> F, H, G, K;
    std::vector<cplx<T>> centers;                       // singularity positions in the window

    bool is_channel() const { return std::isfinite(top); }
};

template <class T>
struct NamedConstant {
    const char* name;
    cplx<T> value;
};

template <class T>
struct GoursatValue {
    cplx<T> w;     // u - i v
    cplx<T> W;     // f'(z) = i zeta F'(zeta)
    cplx<T> Frat;  // F without log terms
    cplx<T> Grat;  // G without the i log(zeta) W term
};

// e^w - 1
template <class T>
cplx<T> expm1_c(cplx<T> w) {
    const T a = w.real(), b = w.imag();
    const T sh = std::sin(b / 2);
    return {std::expm1(a) * std::cos(b) - 2 * sh * sh, std::exp(a) * std::sin(b)};
}

// mark the terms vanishing at zeta0 = zeta(z0) as anchored at z0
template <class T>
void anchor_at(GoursatParts<T>& p, cplx<T> z0, cplx<T> zeta0) {
    auto mark = [&](auto& t) {
        if (t.alpha == cplx<T>(1) && t.beta == -zeta0) {
            t.zc = z0;
            t.anchored = true;
        }
    };
    for (auto& t : p.flog) mark(t);
    for (auto& t : p.fpole) mark(t);
    for (auto& t : p.gpole) mark(t);
}

template <class T>
GoursatValue<T> evaluate_goursat(const GoursatParts<T>& p, cplx<T> z) {
    const T y = z.imag();
    const cplx<T> zeta = zeta_of_z(cplx<T>(wrap_period(z.real()), y));
    const cplx<T> I(0, 1);
    auto base = [&](const auto& t) -> cplx<T> {
        if (!t.anchored) return t.alpha * zeta + t.beta;
        const cplx<T> d(std::remainder(z.real() - t.zc.real(), two_pi_v<T>), y - t.zc.imag());
        return -t.beta * expm1_c(I * d);
    };
    cplx<T> Frat = p.Fc, Grat = p.Gc;
    cplx<T> zFp{};  // zeta F'(zeta)
    T ylog = -2 * y;  // log|zeta|^2
    cplx<T> lm{};
    for (const auto& t : p.flog) {
        cplx<T> w = base(t);
        zFp += t.c * t.alpha * zeta / w;
        T lmod;
        if (t.beta == cplx<T>(0))
            lmod = std::log(std::norm(t.alpha)) + ylog;
        else
            lmod = std::log(std::norm(w));
        lm -= std::conj(t.c) * lmod;
    }
    for (const auto& t : p.fpole) {
        cplx<T> w = base(t);
        cplx<T> ip = T(1) / w;
        cplx<T> pw = std::pow(ip, t.order);
        Frat += t.c * pw;
        zFp -= T(t.order) * t.c * t.alpha * zeta * pw * ip;
    }
    for (const auto& t : p.gpole) {
        cplx<T> ip = T(1) / base(t);
        Grat += t.c * std::pow(ip, t.order);
    }
    const std::size_t N = std::max({p.F.size(), p.H.size(), p.G.size(), p.K.size()});
    if (N > 0) {
        cplx<T> tn(1), un(1);
        const cplx<T> q = p.rho / zeta;
        for (std::size_t k = 0; k < N; ++k) {
            tn *= zeta;
            un *= q;
            T n = T(k + 1);
            if (k < p.F.size()) {
                cplx<T> a = p.F[k] * tn;
                Frat += a;
                zFp += n * a;
            }
            if (k < p.H.size()) {
                cplx<T> b = p.H[k] * un;
                Frat += b;
                zFp -= n * b;
            }
            if (k < p.G.size()) Grat += p.G[k] * tn;
            if (k < p.K.size()) Grat += p.K[k] * un;
        }
    }
    GoursatValue<T> r;
    r.W = I * zFp;
    r.w = lm + I * ylog * r.W - std::conj(Frat) + Grat;
    r.Frat = Frat;
    r.Grat = Grat;
    return r;
}

template <class T>
GoursatParts<T> superpose(const GoursatParts<T>& a, const GoursatParts<T>& b) {
    if (a.rho != b.rho || a.top != b.top) throw validation_error("superpose: solutions do not share one geometry");
    GoursatParts<T> r = a;
    r.flog.insert(r.flog.end(), b.flog.begin(), b.flog.end());
    r.fpole.insert(r.fpole.end(), b.fpole.begin(), b.fpole.end());
    r.gpole.insert(r.gpole.end(), b.gpole.begin(), b.gpole.end());
    r.Fc += b.Fc;
    r.Gc += b.Gc;
    auto add = [](std::vector<cplx<T>>& x, const std::vector<cplx<T>>& y) {
        if (x.size() < y.size()) x.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x[i] += y[i];
    };
    add(r.F, b.F);
    add(r.H, b.H);
    add(r.G, b.G);
    add(r.K, b.K);
    r.centers.insert(r.centers.end(), b.centers.begin(), b.centers.end());
    return r;
}

// multiply every term by a real weight (real-linear scaling of the field)
template <class T>
GoursatParts<T> scaled(GoursatParts<T> p, T s) {
    for (auto& t : p.flog) t.c *= s;
    for (auto& t : p.fpole) t.c *= s;
    for (auto& t : p.gpole) t.c *= s;
    p.Fc *= s;
    p.Gc *= s;
    for (auto* v : {&p.F, &p.H, &p.G, &p.K})
        for (auto& c : *v) c *= s;
    return p;
}

// max |u - i v| over equispaced samples of every wall
template <class T>
T wall_residual(const GoursatParts<T>& p, int samples_per_wall) {
    T worst = 0;
    for (int j = 0; j < samples_per_wall; ++j) {
        T x = two_pi_v<T> * T(j) / T(samples_per_wall);
        worst = std::max(worst, std::abs(evaluate_goursat(p, cplx<T>(x, 0)).w));
        if (p.is_channel()) worst = std::max(worst, std::abs(evaluate_goursat(p, cplx<T>(x, p.top)).w));
    }
    return worst;
}

}  // namespace stokes_lattice
