#pragma once

// Independent channel solver by the unified transform method.  Everything here
// runs in long double: e^{2kh} factors at the Papkovich-Fadle roots overflow
// the double range for modest h.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "model.hpp"
#include "parallel.hpp"

namespace stokes_lattice::oracle {

using LD = long double;
using CL = std::complex<LD>;

inline constexpr LD pi_ld = std::numbers::pi_v<long double>;
inline const CL I_ld(0, 1);

// ---------------------------------------------------------------- roots

struct PFRoot {
    CL s;  // s = k h, first quadrant
    CL k;
    int family;  // +1: sinh s = s, -1: sinh s = -s
    LD residual;  // |sinh^2 s - s^2|
    int iterations;
    bool converged;
};

inline LD pf_residual(CL s) {
    const CL sh = std::sinh(s);
    return std::abs((sh - s) * (sh + s));
}

inline PFRoot refine_pf_root(CL s, int family, LD h) {
    const LD sg = LD(family);
    PFRoot r{s, s / h, family, 0, 0, false};
    for (int it = 1; it <= 80; ++it) {
        const CL ds = (std::sinh(s) - sg * s) / (std::cosh(s) - sg);
        s -= ds;
        r.iterations = it;
        if (!(std::isfinite(s.real()) && std::isfinite(s.imag()))) break;
        if (std::abs(ds) <= LD(1e-17) * std::abs(s)) {
            r.converged = true;
            break;
        }
    }
    r.s = s;
    r.k = s / h;
    r.residual = pf_residual(s);
    if (r.residual > LD(1e-12)) r.converged = false;
    return r;
}

// First `count` first-quadrant roots of sinh^2 s = s^2, ordered by modulus.
inline std::vector<PFRoot> pf_roots(LD h, int count) {
    if (count < 1) throw validation_error("pf_roots: count must be at least 1");
    if (!(h > 0)) throw validation_error("pf_roots: h must be positive");
    std::vector<PFRoot> out;
    for (int n = 1; n <= count; ++n) {
        out.push_back(refine_pf_root(CL(std::log((4 * n + 1) * pi_ld), (2 * n + LD(0.5)) * pi_ld), +1, h));
        out.push_back(refine_pf_root(CL(std::log((4 * n - 1) * pi_ld), (2 * n - LD(0.5)) * pi_ld), -1, h));
    }
    std::sort(out.begin(), out.end(), [](const PFRoot& a, const PFRoot& b) { return std::abs(a.s) < std::abs(b.s); });
    out.resize(count);
    return out;
}

// ------------------------------------------------------------ quadrature

// Composite 16-point Gauss-Legendre, stored panel by panel so that
// e^{alpha x} at all nodes costs two exponentials per panel offset.
struct Nodes {
    std::vector<LD> x, w;
    std::vector<LD> off;  // node offsets from the panel midpoint
    LD mid0 = 0, width = 0;
    int panels = 0;
};

inline Nodes composite_gl(LD a, LD b, int panels) {
    using G = boost::math::quadrature::gauss<LD, 16>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    Nodes n;
    n.panels = panels;
    n.width = (b - a) / panels;
    n.mid0 = a + n.width / 2;
    const LD half = n.width / 2;
    std::vector<LD> pw;
    for (std::size_t i = 0; i < ab.size(); ++i) {
        if (ab[i] == 0) {
            n.off.push_back(0);
            pw.push_back(half * wt[i]);
            continue;
        }
        n.off.push_back(-half * ab[i]);
        pw.push_back(half * wt[i]);
        n.off.push_back(half * ab[i]);
        pw.push_back(half * wt[i]);
    }
    for (int p = 0; p < panels; ++p) {
        const LD mid = n.mid0 + p * n.width;
        for (std::size_t i = 0; i < n.off.size(); ++i) {
            n.x.push_back(mid + n.off[i]);
            n.w.push_back(pw[i]);
        }
    }
    return n;
}

// e^{alpha x_j} times w_j for every node
inline void exp_weights(CL alpha, const Nodes& n, std::vector<CL>& out) {
    const std::size_t q = n.off.size();
    out.resize(n.x.size());
    std::vector<CL> eo(q);
    for (std::size_t i = 0; i < q; ++i) eo[i] = std::exp(alpha * n.off[i]);
    const CL step = std::exp(alpha * n.width);
    // restart the midpoint recurrence every few panels to bound drift
    CL em;
    for (int p = 0; p < n.panels; ++p) {
        if (p % 16 == 0)
            em = std::exp(alpha * (n.mid0 + p * n.width));
        else
            em *= step;
        for (std::size_t i = 0; i < q; ++i) out[p * q + i] = em * eo[i] * n.w[p * q + i];
    }
}

// ------------------------------------------------------------ forcing

// Singular part of the Goursat pair inside one cell.  The Stokeslet log has
// its cut running straight down to the bottom wall.
struct OracleForcing {
    Kind kind;
    CL mu, z0;

    static CL logdown(CL w) { return std::log(-I_ld * w) + I_ld * (pi_ld / 2); }

    CL f(CL z) const {
        const CL w = z - z0;
        return kind == Kind::stokeslet ? mu * logdown(w) : mu / w;
    }
    CL fp(CL z) const {
        const CL w = z - z0;
        return kind == Kind::stokeslet ? mu / w : -mu / (w * w);
    }
    CL gp(CL z) const {
        const CL w = z - z0;
        if (kind == Kind::stokeslet) return -std::conj(mu) * logdown(w) - mu * std::conj(z0) / w;
        return mu * std::conj(z0) / (w * w);
    }
};

// ------------------------------------------------------------ affine forms

// c + v . x over the real unknown vector x
struct Form {
    CL c{};
    std::vector<CL> v;
};

inline Form operator+(const Form& a, const Form& b) {
    Form r;
    r.c = a.c + b.c;
    r.v = a.v.size() >= b.v.size() ? a.v : b.v;
    const auto& o = a.v.size() >= b.v.size() ? b.v : a.v;
    for (std::size_t i = 0; i < o.size(); ++i) r.v[i] += o[i];
    return r;
}
inline Form operator*(CL s, const Form& a) {
    Form r{s * a.c, a.v};
    for (auto& e : r.v) e *= s;
    return r;
}
inline Form conj_a(const Form& a) {
    Form r{std::conj(a.c), a.v};
    for (auto& e : r.v) e = std::conj(e);
    return r;
}
inline CL conj_a(CL a) { return std::conj(a); }

template <class A>
A cst(CL c) {
    if constexpr (std::is_same_v<A, CL>)
        return c;
    else
        return Form{c, {}};
}

// quantities depending linearly on the unknowns
template <class A>
struct Basic {
    A rho4, rho4p, rhoh4, fR0, fRh, d, db;
};

struct Knowns {
    CL R1, R2, R2p, R3, R4, q, qp;
};

template <class A>
struct PForms {
    CL R1, R2, R3, R4, q, E;
    A P, Pp, Ph, fRl, r, rho4, rhoh4, fR0, fRh, d, db;
};

struct SpectralPoint {
    CL k;
    CL r1, r2, r3, r4, rh2, rh4;
    CL A1, A3;  // hat-rho_1, hat-rho_3 without their (k rho)' terms
};

struct OracleOptions {
    int M = 24;
    int n_roots = 0;  // 0: 2M
    int cauchy_points = 32;
    LD clearance = LD(0.25);  // minimum distance from the cell sides for evaluation
    LD quad_factor = 1;       // panel refinement of the boundary quadratures
    unsigned threads = 1;
};

struct RayData {
    CL dir;
    std::vector<CL> k, wdir;       // nodes and weights times direction
    std::vector<CL> v0, v1, v2;    // rho, hat-rho part, k rho (for integration by parts)
};

class SpectralSystem {
public:
    Kind kind;
    CL mu;
    CL z0;        // as given (canonical coordinates)
    LD shift;     // cell shift putting the singularity at x = l/2
    LD h, l;
    int M;
    std::vector<PFRoot> roots;
    std::vector<LD> x;  // solved real unknowns: Re a, Im a, Re b, Im b, Re d, Im d
    LD residual = 0;
    LD cond = 0;
    int rank = 0;
    bool ill_conditioned = false;
    std::size_t equations = 0;
    LD clearance = 0, T = 0;
    CL kstar;

    int unknowns() const { return 4 * M + 2; }
    CL a_coef(int m) const { return CL(x[m], x[M + m]); }
    CL b_coef(int m) const { return CL(x[2 * M + m], x[3 * M + m]); }
    CL d_value() const { return CL(x[4 * M], x[4 * M + 1]); }

    const OracleForcing& forcing() const { return fs_; }

    // boundary transforms of the singular forcing at k
    Knowns knowns(CL k) const {
        Knowns kn;
        std::vector<CL> eb, el;
        exp_weights(-I_ld * k, nb_, eb);
        exp_weights(k, nl_, el);
        CL s1{}, s3{};
        for (std::size_t j = 0; j < xb_.size(); ++j) {
            s1 += phi1_[j] * eb[j];
            s3 += phi3_[j] * eb[j];
        }
        kn.R1 = s1;
        kn.R3 = -std::exp(k * h) * s3;
        CL r2{}, r2p{}, r4{};
        for (std::size_t j = 0; j < yl_.size(); ++j) {
            const CL e = el[j];
            r2 += psi2_[j] * e;
            r2p += psi2_[j] * e * yl_[j];
            r4 += psi4_[j] * e;
        }
        kn.R2 = -I_ld * r2;
        kn.R2p = -I_ld * r2p;
        kn.R4 = -I_ld * r4;
        q_closed(k, kn.q, kn.qp);
        return kn;
    }

    // q(k) = int_{ih}^{0} e^{-ikz} dz and its k-derivative
    void q_closed(CL k, CL& q, CL& qp) const {
        const CL kh = k * h;
        if (std::abs(kh) < LD(0.5)) {
            CL sq{}, sqp{}, t(1);
            LD fact = 1;
            for (int n = 0; n < 40; ++n) {
                if (n > 0) {
                    t *= kh;
                    fact *= n;
                }
                sq += t / (fact * (n + 1));
                sqp += t / (fact * (n + 2));
            }
            q = -I_ld * h * sq;
            qp = -I_ld * h * h * sqp;
            return;
        }
        const CL e = std::exp(kh);
        q = -I_ld * (e - LD(1)) / k;
        qp = -I_ld * (h * e / k - (e - LD(1)) / (k * k));
    }

    template <class A>
    PForms<A> pforms(CL k, const Knowns& kn, const Basic<A>& b) const {
        PForms<A> p;
        p.R1 = kn.R1;
        p.R2 = kn.R2;
        p.R3 = kn.R3;
        p.R4 = kn.R4;
        p.q = kn.q;
        const CL E = std::exp(-I_ld * k * l);
        p.E = E;
        const CL one(1), ehk = std::exp(k * h);
        const A bracket = cst<A>(kn.R2) + (-kn.q) * b.d;
        p.P = (one - E) * b.rho4 + E * bracket;
        p.Pp = (one - E) * b.rho4p + (I_ld * l * E) * b.rho4 + (-I_ld * l * E) * bracket +
               E * (cst<A>(kn.R2p) + (-kn.qp) * b.d);
        p.Ph = (one - E) * b.rhoh4 + E * (cst<A>(kn.R4) + (-kn.q) * b.db + (I_ld * k * l) * b.rho4 +
                                          CL(l) * b.fR0 + (-l * ehk) * b.fRh);
        p.fRl = b.fR0 + b.d + cst<A>(-dfs0_);
        const A fRlh = b.fRh + b.d + cst<A>(-dfsh_);
        p.r = (-I_ld * h * ehk) * b.fRh + (-(l - I_ld * h) * std::exp(-I_ld * k * (l + I_ld * h))) * fRlh;
        p.rho4 = b.rho4;
        p.rhoh4 = b.rhoh4;
        p.fR0 = b.fR0;
        p.fRh = b.fRh;
        p.d = b.d;
        p.db = b.db;
        return p;
    }

    // which = 1 or 3; pm holds the forms at -conj(k)
    template <class A>
    A V(CL k, const PForms<A>& p, const PForms<A>& pm, int which) const {
        const A Pb = conj_a(pm.P);
        const CL m1(-1);
        A base = cst<A>(p.R1 + p.R3) + m1 * p.P + (-k) * p.Pp + p.Ph + (-l * p.E) * p.fRl + m1 * p.r;
        if (which == 1) return base + (-std::exp(LD(2) * k * h)) * Pb + (LD(2) * k * h) * p.P;
        return base + m1 * Pb;
    }

    // numerator of rho_1; vanishes at the roots and to fourth order at k = 0
    template <class A>
    A N(CL k, const PForms<A>& p, const PForms<A>& pm) const {
        const CL km = -std::conj(k);
        return (LD(2) * k * h) * V(k, p, pm, 1) + (-(std::exp(LD(2) * k * h) - LD(1))) * conj_a(V(km, pm, p, 1));
    }

    Basic<Form> basic_forms(CL k) const {
        const int nU = unknowns();
        std::vector<CL> C(M), Cp(M), el;
        exp_weights(k, nl_, el);
        for (int m = 0; m < M; ++m) {
            CL s{}, sp{};
            for (std::size_t j = 0; j < yl_.size(); ++j) {
                const CL e = el[j] * cheb_[m][j];
                s += e;
                sp += e * yl_[j];
            }
            C[m] = -I_ld * s;
            Cp[m] = -I_ld * sp;
        }
        auto a_of = [&](const std::vector<CL>& c, int which) {
            Form f{CL{}, std::vector<CL>(nU)};
            const int o = 2 * M * which;
            for (int m = 0; m < M; ++m) {
                f.v[o + m] = c[m];
                f.v[o + M + m] = I_ld * c[m];
            }
            return f;
        };
        std::vector<CL> sgn(M), ones(M, CL(1));
        for (int m = 0; m < M; ++m) sgn[m] = (m % 2) ? CL(-1) : CL(1);
        Form d{CL{}, std::vector<CL>(nU)}, db{CL{}, std::vector<CL>(nU)};
        d.v[4 * M] = 1;
        d.v[4 * M + 1] = I_ld;
        db.v[4 * M] = 1;
        db.v[4 * M + 1] = -I_ld;
        return {a_of(C, 0), a_of(Cp, 0), a_of(C, 1), a_of(sgn, 0), a_of(ones, 0), d, db};
    }

    Basic<CL> basic_solved(CL k) const {
        CL r4{}, r4p{}, rh4{};
        std::vector<CL> el;
        exp_weights(k, nl_, el);
        for (std::size_t j = 0; j < yl_.size(); ++j) {
            const CL e = el[j];
            r4 += fR_left_[j] * e;
            r4p += fR_left_[j] * e * yl_[j];
            rh4 += gR_left_[j] * e;
        }
        CL f0{}, fh{};
        for (int m = 0; m < M; ++m) {
            f0 += (m % 2 ? LD(-1) : LD(1)) * a_coef(m);
            fh += a_coef(m);
        }
        const CL d = d_value();
        return {-I_ld * r4, -I_ld * r4p, -I_ld * rh4, f0, fh, d, std::conj(d)};
    }

    PForms<CL> pforms_solved(CL k) const { return pforms<CL>(k, knowns(k), basic_solved(k)); }

    static CL pf_den(CL kh) {
        const CL sh = std::sinh(kh);
        return sh * sh - kh * kh;
    }

    SpectralPoint spectral(CL k) const {
        const CL km = -std::conj(k);
        const auto p = pforms_solved(k);
        const auto pm = pforms_solved(km);
        const CL V1 = V(k, p, pm, 1), V1m = V(km, pm, p, 1);
        const CL V3 = V(k, p, pm, 3), V3m = V(km, pm, p, 3);
        auto rho1 = [&](CL kk, CL v, CL vm) {
            return (LD(2) * kk * h * v - (std::exp(LD(2) * kk * h) - LD(1)) * std::conj(vm)) / (LD(4) * pf_den(kk * h));
        };
        auto rho3 = [&](CL kk, CL v, CL vm) {
            return (LD(2) * kk * h * v + (LD(1) - std::exp(LD(2) * kk * h)) * std::conj(vm)) / (LD(-4) * pf_den(kk * h));
        };
        SpectralPoint sp;
        sp.k = k;
        sp.r1 = rho1(k, V1, V1m);
        sp.r3 = rho3(k, V3, V3m);
        const CL r1m = rho1(km, V1m, V1), r3m = rho3(km, V3m, V3);
        sp.r4 = p.rho4;
        sp.rh4 = p.rhoh4;
        const CL E = p.E, d = p.d;
        sp.r2 = E * (p.R2 - d * p.q - sp.r4);
        sp.rh2 = E * (p.R4 - std::conj(d) * p.q + I_ld * k * l * sp.r4 + l * p.fR0 - l * p.fRh * std::exp(k * h) -
                      sp.rh4);
        sp.A1 = p.R1 + std::conj(r1m) - l * p.fRl * E;
        sp.A3 = p.R3 + std::exp(LD(2) * k * h) * std::conj(r3m) - LD(2) * k * h * sp.r3 - p.r;
        return sp;
    }

    // f_R, f_R', g'_R at z (cell coordinates)
    void reconstruct(CL z, CL& f, CL& fp, CL& g) const {
        f = fp = g = CL{};
        for (std::size_t j = 0; j < rays_.size(); ++j) {
            const auto& R = rays_[j];
            CL sf{}, sfp{}, sg{}, sk{};
            for (std::size_t i = 0; i < R.k.size(); ++i) {
                const CL ex = std::exp(I_ld * R.k[i] * z) * R.wdir[i];
                sf += R.v0[i] * ex;
                sfp += I_ld * R.k[i] * R.v0[i] * ex;
                sg += R.v1[i] * ex;
                sk += R.v2[i] * ex;
            }
            f += sf;
            fp += sfp;
            g += sg - I_ld * z * sk;
        }
        g -= (kr1_ + kr3_) * std::exp(I_ld * kstar * z);
        f /= 2 * pi_ld;
        fp /= 2 * pi_ld;
        g /= 2 * pi_ld;
    }

    // map a canonical point into the cell and return its clearance from the cell sides
    CL to_cell(CL z, LD& clr) const {
        LD xs = std::fmod(z.real() - shift, l);
        if (xs < 0) xs += l;
        const CL zc(xs, z.imag());
        clr = std::min({zc.imag(), h - zc.imag(), zc.real(), l - zc.real()});
        return zc;
    }

    // u - i v at canonical z
    CL eval_w(CL z) const {
        LD clr;
        const CL zc = to_cell(z, clr);
        if (clr < clearance * (1 - LD(1e-12)))
            throw domain_error("oracle evaluation point closer to the cell boundary than the prepared clearance");
        if (std::abs(zc - fs_.z0) < LD(1e-8)) throw proximity_error("oracle evaluation point at the singularity");
        CL fR, fRp, gR;
        reconstruct(zc, fR, fRp, gR);
        const CL f = fs_.f(zc) + fR, fp = fs_.fp(zc) + fRp, gp = fs_.gp(zc) + gR;
        return -std::conj(f) + std::conj(zc) * fp + gp;
    }

    // relative global-relation residuals at k: |sum rho| and |sum hat-rho|
    std::pair<LD, LD> global_relation_residual(CL k) const {
        const auto sp = spectral(k);
        auto kr = [&](CL kk, int which) {
            const auto s = spectral(kk);
            return kk * (which == 1 ? s.r1 : s.r3);
        };
        const int n = 32;
        const LD rad = LD(0.05);
        CL d1{}, d3{};
        for (int i = 0; i < n; ++i) {
            const CL e = std::polar(LD(1), 2 * pi_ld * i / n);
            d1 += kr(k + rad * e, 1) / e;
            d3 += kr(k + rad * e, 3) / e;
        }
        d1 /= LD(n) * rad;
        d3 /= LD(n) * rad;
        const CL rh1 = sp.A1 + d1, rh3 = sp.A3 + d3;
        const LD s1 = std::max({std::abs(sp.r1), std::abs(sp.r2), std::abs(sp.r3), std::abs(sp.r4), LD(1e-300)});
        const LD s2 = std::max({std::abs(rh1), std::abs(sp.rh2), std::abs(rh3), std::abs(sp.rh4), LD(1e-300)});
        return {std::abs(sp.r1 + sp.r2 + sp.r3 + sp.r4) / s1, std::abs(rh1 + sp.rh2 + rh3 + sp.rh4) / s2};
    }

    const std::vector<RayData>& rays() const { return rays_; }

    // ---- construction (used by assemble_and_solve)
    void setup(Kind kd, CL mu_, CL z0_, LD h_, const OracleOptions& opt) {
        kind = kd;
        mu = mu_;
        z0 = z0_;
        h = h_;
        l = 2 * pi_ld;
        M = opt.M;
        LD x0 = std::fmod(z0.real(), l);
        if (x0 < 0) x0 += l;
        shift = x0 - l / 2;
        fs_ = OracleForcing{kind, mu, CL(l / 2, z0.imag())};
        clearance = opt.clearance;
        T = LD(34) / clearance;
        const int nr = opt.n_roots > 0 ? opt.n_roots : 2 * M;
        roots = pf_roots(h, nr);
        LD kq = T;
        for (const auto& r : roots) kq = std::max(kq, std::abs(r.k));
        kq = (LD(1.1) * kq + 10) * opt.quad_factor;
        const int pb = std::max(8, int(kq * l / 6) + 1), pl = std::max(4, int(kq * h / 6) + 1);
        nb_ = composite_gl(0, l, pb);
        nl_ = composite_gl(0, h, pl);
        xb_ = nb_.x;
        yl_ = nl_.x;
        phi1_.resize(xb_.size());
        phi3_.resize(xb_.size());
        for (std::size_t j = 0; j < xb_.size(); ++j) {
            const CL zb(xb_[j], 0), zt(xb_[j], h);
            phi1_[j] = std::conj(fs_.f(zb)) - zb * fs_.fp(zb) - fs_.gp(zb);
            phi3_[j] = std::conj(fs_.f(zt)) - (zt - LD(2) * I_ld * h) * fs_.fp(zt) - fs_.gp(zt);
        }
        psi2_.resize(yl_.size());
        psi4_.resize(yl_.size());
        cheb_.assign(M, std::vector<LD>(yl_.size()));
        for (std::size_t j = 0; j < yl_.size(); ++j) {
            const CL zl(0, yl_[j]);
            psi2_[j] = fs_.f(zl + l) - fs_.f(zl);
            psi4_[j] = l * fs_.fp(zl) + fs_.gp(zl + l) - fs_.gp(zl);
            const LD t = 2 * yl_[j] / h - 1;
            LD t0 = 1, t1 = t;
            for (int m = 0; m < M; ++m) {
                cheb_[m][j] = m == 0 ? t0 : (m == 1 ? t1 : 0);
                if (m >= 2) {
                    const LD t2 = 2 * t * t1 - t0;
                    t0 = t1;
                    t1 = t2;
                    cheb_[m][j] = t2;
                }
            }
        }
        dfs0_ = fs_.f(CL(l, 0)) - fs_.f(CL(0, 0));
        dfsh_ = fs_.f(CL(l, h)) - fs_.f(CL(0, h));
    }

    void solve(const OracleOptions& opt) {
        const int nU = unknowns();
        std::vector<std::vector<LD>> rows;
        std::vector<LD> rhs;
        auto addc = [&](const Form& f) {
            for (int part = 0; part < 2; ++part) {
                std::vector<LD> v(nU);
                LD sc = 0;
                for (int i = 0; i < nU; ++i) {
                    v[i] = part == 0 ? f.v[i].real() : f.v[i].imag();
                    sc = std::max(sc, std::abs(v[i]));
                }
                sc = std::max(sc, LD(1e-300));
                for (auto& e : v) e /= sc;
                rows.push_back(std::move(v));
                rhs.push_back(-(part == 0 ? f.c.real() : f.c.imag()) / sc);
            }
        };
        auto Nform = [&](CL k) {
            const CL km = -std::conj(k);
            const auto p = pforms<Form>(k, knowns(k), basic_forms(k));
            const auto pm = pforms<Form>(km, knowns(km), basic_forms(km));
            Form n = N(k, p, pm);
            n.v.resize(nU);
            return n;
        };
        std::vector<CL> ks;
        for (const auto& r : roots) {
            if (!r.converged) throw accuracy_error("Papkovich-Fadle root failed to converge", double(r.residual));
            ks.push_back(r.k);
            ks.push_back(std::conj(r.k));
        }
        const int nc = opt.cauchy_points;
        const LD r0 = LD(0.5) / h;
        for (int i = 0; i < nc; ++i) ks.push_back(r0 * std::polar(LD(1), 2 * pi_ld * i / nc));
        std::vector<Form> Ns(ks.size());
        parallel_for(ks.size(), opt.threads, [&](std::size_t i) { Ns[i] = Nform(ks[i]); });
        const std::size_t nroot_rows = 2 * roots.size();
        for (std::size_t i = 0; i < nroot_rows; ++i) addc(Ns[i]);
        // Taylor coefficients k^2, k^3 of the numerator at k = 0 (k^0, k^1 vanish identically)
        for (int j : {2, 3}) {
            Form c{CL{}, std::vector<CL>(nU)};
            for (int i = 0; i < nc; ++i) {
                const CL kk = ks[nroot_rows + i];
                const CL w = std::pow(kk, -j) / LD(nc);
                c = c + w * Ns[nroot_rows + i];
            }
            addc(c);
        }
        // gauge: Re d = 0
        {
            std::vector<LD> v(nU);
            v[4 * M] = 1;
            rows.push_back(v);
            rhs.push_back(0);
        }
        using Mat = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
        using Vec = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
        Mat A(rows.size(), nU);
        Vec b(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (int j = 0; j < nU; ++j) A(i, j) = rows[i][j];
            b(i) = rhs[i];
        }
        equations = rows.size();
        Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vec& sv = svd.singularValues();
        const LD smax = sv(0);
        // one structural null direction (constant shift of f_R balanced in g'_R)
        int r = nU;
        while (r > 0 && sv(r - 1) <= LD(1e-13) * smax) --r;
        rank = r;
        if (smax == 0) {
            x.assign(nU, 0);
            residual = b.norm();
            cond = 1;
        } else {
            if (r < nU - 1) throw accuracy_error("transform system is rank deficient", double(sv(nU - 2) / smax));
            const int keep = nU - 1;
            Vec utb = svd.matrixU().leftCols(keep).transpose() * b;
            for (int i = 0; i < keep; ++i) utb(i) /= sv(i);
            Vec xs = svd.matrixV().leftCols(keep) * utb;
            x.assign(xs.data(), xs.data() + nU);
            residual = (A * xs - b).norm();
            cond = smax / sv(keep - 1);
        }
        ill_conditioned = cond > LD(1e12);
        fR_left_.assign(yl_.size(), CL{});
        gR_left_.assign(yl_.size(), CL{});
        for (std::size_t j = 0; j < yl_.size(); ++j)
            for (int m = 0; m < M; ++m) {
                fR_left_[j] += a_coef(m) * cheb_[m][j];
                gR_left_[j] += b_coef(m) * cheb_[m][j];
            }
    }

    void prepare_rays(const OracleOptions& opt) {
        const LD c = std::min(LD(0.5), LD(0.6) / h);
        kstar = CL(c, c);
        const int panels = std::max(8, int(std::ceil(T)));
        const auto nodes = composite_gl(0, T, panels);
        const CL dirs[4] = {CL(1), CL(0, -1), CL(-1), CL(0, 1)};
        rays_.assign(4, {});
        struct Job {
            int ray;
            std::size_t i;
        };
        std::vector<Job> jobs;
        for (int j = 0; j < 4; ++j) {
            auto& R = rays_[j];
            R.dir = dirs[j];
            const std::size_t n = nodes.x.size();
            R.k.resize(n);
            R.wdir.resize(n);
            R.v0.assign(n, {});
            R.v1.assign(n, {});
            R.v2.assign(n, {});
            for (std::size_t i = 0; i < n; ++i) {
                R.k[i] = kstar + dirs[j] * nodes.x[i];
                R.wdir[i] = nodes.w[i] * dirs[j];
                jobs.push_back({j, i});
            }
        }
        parallel_for(jobs.size(), opt.threads, [&](std::size_t t) {
            auto& R = rays_[jobs[t].ray];
            const std::size_t i = jobs[t].i;
            const auto sp = spectral(R.k[i]);
            switch (jobs[t].ray) {
                case 0:
                    R.v0[i] = sp.r1;
                    R.v1[i] = sp.A1;
                    R.v2[i] = R.k[i] * sp.r1;
                    break;
                case 1:
                    R.v0[i] = sp.r2;
                    R.v1[i] = sp.rh2;
                    break;
                case 2:
                    R.v0[i] = sp.r3;
                    R.v1[i] = sp.A3;
                    R.v2[i] = R.k[i] * sp.r3;
                    break;
                default:
                    R.v0[i] = sp.r4;
                    R.v1[i] = sp.rh4;
            }
        });
        const auto s0 = spectral(kstar);
        kr1_ = kstar * s0.r1;
        kr3_ = kstar * s0.r3;
    }

private:
    OracleForcing fs_{};
    Nodes nb_, nl_;
    std::vector<LD> xb_, yl_;
    std::vector<CL> phi1_, phi3_, psi2_, psi4_;
    std::vector<std::vector<LD>> cheb_;
    CL dfs0_{}, dfsh_{};
    std::vector<CL> fR_left_, gR_left_;
    std::vector<RayData> rays_;
    CL kr1_{}, kr3_{};
};

// Solve the transform system for a Stokeslet or stresslet in the canonical
// channel (period 2 pi, height h) and prepare the inverse-transform rays.
inline SpectralSystem assemble_and_solve(Kind kind, CL mu, CL z0, LD h, const OracleOptions& opt = {}) {
    if (kind != Kind::stokeslet && kind != Kind::stresslet)
        throw validation_error(std::string("transform oracle supports stokeslet and stresslet only, got ") +
                               kind_name(kind));
    if (opt.M < 8) throw validation_error("transform oracle: M must be at least 8");
    if (!(h > 0)) throw validation_error("transform oracle: h must be positive");
    if (!(z0.imag() > 0 && z0.imag() < h)) throw validation_error("transform oracle: z0 must lie inside the channel");
    if (!(opt.clearance > 0) || opt.clearance >= h / 2)
        throw validation_error("transform oracle: clearance must be in (0, h/2)");
    const int nr = opt.n_roots > 0 ? opt.n_roots : 2 * opt.M;
    if (4 * nr + 3 < 4 * opt.M + 2) throw validation_error("transform oracle: too few roots for the unknown count");
    SpectralSystem s;
    s.setup(kind, mu, z0, h, opt);
    s.solve(opt);
    s.prepare_rays(opt);
    return s;
}

}  // namespace stokes_lattice::oracle
