#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "stokes_lattice/channel_series.hpp"
#include "stokes_lattice/transform_oracle.hpp"
#include "stokes_lattice/validation.hpp"

using namespace stokes_lattice;
using namespace stokes_lattice::oracle;
using cd = std::complex<double>;

namespace {
const LD pi = pi_ld;

struct Systems {
    SpectralSystem stokeslet, stresslet, stokeslet_m12;
};

// built once: each solve takes a few seconds
const Systems& systems() {
    static const Systems s = [] {
        OracleOptions o;
        o.M = 24;
        Systems r{assemble_and_solve(Kind::stokeslet, CL(1, 0), CL(pi, 1), 2.0L, o),
                  assemble_and_solve(Kind::stresslet, CL(1, 0), CL(pi, 1), 2.0L, o), {}};
        o.M = 12;
        r.stokeslet_m12 = assemble_and_solve(Kind::stokeslet, CL(1, 0), CL(pi, 1), 2.0L, o);
        return r;
    }();
    return s;
}

// adaptive Gauss-Kronrod on real and imaginary parts separately
template <class F>
CL gk(F f, LD a, LD b) {
    using boost::math::quadrature::gauss_kronrod;
    const LD re = gauss_kronrod<LD, 61>::integrate([&](LD t) { return f(t).real(); }, a, b, 15, 1e-14L);
    const LD im = gauss_kronrod<LD, 61>::integrate([&](LD t) { return f(t).imag(); }, a, b, 15, 1e-14L);
    return {re, im};
}
}  // namespace

TEST(PFRoots, FirstPlusFamilyRoot) {
    const auto r = pf_roots(2.0L, 6);
    bool found = false;
    for (const auto& x : r)
        if (x.family == 1 && std::abs(x.s - CL(2.768678L, 7.497676L)) < 1e-5L) found = true;
    EXPECT_TRUE(found);
}

TEST(PFRoots, ResidualsAndSymmetry) {
    for (LD h : {0.5L, 2.0L, 5.0L}) {
        const auto r = pf_roots(h, 40);
        ASSERT_EQ(r.size(), 40u);
        for (const auto& x : r) {
            EXPECT_TRUE(x.converged);
            EXPECT_LE(double(x.residual), 1e-12);
            EXPECT_GT(x.s.real(), 0);
            EXPECT_GT(x.s.imag(), 0);
            EXPECT_GT(std::abs(x.s), 1e-6L);  // s = 0 never returned
            EXPECT_LE(std::abs(x.k * h - x.s), 1e-15L * std::abs(x.s));
            for (CL t : {-x.s, std::conj(x.s), -std::conj(x.s)}) EXPECT_LE(double(pf_residual(t)), 1e-12);
        }
    }
}

TEST(PFRoots, DistinctAndOrdered) {
    const auto r = pf_roots(1.0L, 30);
    for (std::size_t i = 1; i < r.size(); ++i) {
        EXPECT_GT(r[i].s.imag(), r[i - 1].s.imag());
        EXPECT_NE(r[i].family, r[i - 1].family);
    }
}

TEST(Knowns, QAtZeroIsMinusIH) {
    const auto& s = systems().stokeslet;
    CL q, qp;
    s.q_closed(CL(0), q, qp);
    EXPECT_LE(std::abs(q - CL(0, -2)), 1e-18L);
    // q(k) = int_{ih}^{0} e^{-ikz} dz
    for (CL k : {CL(0.3, -0.2), CL(1e-4, 2e-4), CL(-2, 1)}) {
        s.q_closed(k, q, qp);
        const CL ref = -I_ld * gk([&](LD y) { return std::exp(k * y); }, 0, s.h);
        EXPECT_LE(std::abs(q - ref), 1e-15L * std::max(LD(1), std::abs(ref)));
    }
}

TEST(Knowns, BoundaryTransformsMatchAdaptiveQuadrature) {
    for (const SpectralSystem* sys : {&systems().stokeslet, &systems().stresslet}) {
        const auto& fs = sys->forcing();
        const LD h = sys->h, l = sys->l;
        for (CL k : {CL(0.4, 0.1), CL(-1.3, 0.7), CL(2.5, -0.5)}) {
            const auto kn = sys->knowns(k);
            const CL r2 = -I_ld * gk([&](LD y) {
                const CL z(0, y);
                return (fs.f(z + l) - fs.f(z)) * std::exp(k * y);
            }, 0, h);
            const CL r1 = gk([&](LD x) {
                const CL z(x, 0);
                return (std::conj(fs.f(z)) - z * fs.fp(z) - fs.gp(z)) * std::exp(-I_ld * k * x);
            }, 0, l);
            EXPECT_LE(std::abs(kn.R2 - r2), 1e-10L * std::max(LD(1), std::abs(r2))) << kind_name(sys->kind);
            EXPECT_LE(std::abs(kn.R1 - r1), 1e-10L * std::max(LD(1), std::abs(r1))) << kind_name(sys->kind);
            EXPECT_GT(std::abs(kn.R2), 1e-3L);  // the Stokeslet log is not periodic-difference-free
        }
    }
}

TEST(Knowns, ZeroStrengthGivesZeroSolution) {
    OracleOptions o;
    o.M = 12;
    const auto s = assemble_and_solve(Kind::stokeslet, CL(0), CL(pi, 1), 2.0L, o);
    for (LD v : s.x) EXPECT_EQ(v, 0);
    EXPECT_EQ(s.residual, 0);
    const auto kn = s.knowns(CL(0.7, 0.2));
    EXPECT_EQ(kn.R1, CL(0));
    EXPECT_EQ(kn.R2, CL(0));
    EXPECT_EQ(kn.R3, CL(0));
    EXPECT_EQ(kn.R4, CL(0));
    EXPECT_EQ(s.eval_w(CL(1.0, 0.7)), CL(0));
}

TEST(Solve, ResidualDoesNotGrowWithM) {
    const LD r12 = systems().stokeslet_m12.residual, r24 = systems().stokeslet.residual;
    EXPECT_LE(r24, LD(1.1) * r12);
    EXPECT_FALSE(systems().stokeslet.ill_conditioned);
    EXPECT_GE(systems().stokeslet.equations, systems().stokeslet.unknowns());
}

TEST(Solve, ScopeAndArgumentErrors) {
    EXPECT_THROW(assemble_and_solve(Kind::force_quadrupole, CL(1), CL(pi, 1), 2.0L), validation_error);
    OracleOptions o;
    o.M = 4;
    EXPECT_THROW(assemble_and_solve(Kind::stokeslet, CL(1), CL(pi, 1), 2.0L, o), validation_error);
    EXPECT_THROW(assemble_and_solve(Kind::stokeslet, CL(1), CL(pi, 2.5), 2.0L), validation_error);
    o.M = 12;
    o.n_roots = 3;
    EXPECT_THROW(assemble_and_solve(Kind::stokeslet, CL(1), CL(pi, 1), 2.0L, o), validation_error);
}

// Walls lie outside the prepared clearance, so no-slip is covered by the
// comparison grid, whose outer rows sit at the clearance.
TEST(Eval, PeriodicAndRestrictedToClearance) {
    for (const SpectralSystem* sys : {&systems().stokeslet, &systems().stresslet}) {
        for (LD x : {1.0L, 2.5L, 4.0L}) {
            const CL a = sys->eval_w(CL(x, 1.3L)), b = sys->eval_w(CL(x + 2 * pi, 1.3L));
            EXPECT_LE(std::abs(a - b), 1e-6L);
        }
        EXPECT_THROW(sys->eval_w(CL(2.0L, 0.1L)), domain_error);
        EXPECT_THROW(sys->eval_w(CL(pi, 1)), proximity_error);
    }
}

TEST(Eval, MatchesChannelSeries) {
    for (const SpectralSystem* sys : {&systems().stokeslet, &systems().stresslet}) {
        const auto cs = build_channel_solution<double>(sys->kind, cd(1, 0), cd(std::numbers::pi, 1.0),
                                                       canonical_channel(2.0));
        const auto r = cross_method_compare(cs, *sys, oracle_grid<double>(*sys));
        EXPECT_LE(r.max_residual, 1e-6) << kind_name(sys->kind);
        EXPECT_EQ(r.samples, 200u);
    }
}

TEST(Eval, ShiftedSingularityMatchesSeries) {
    // the cell is re-centred on the singularity; results must not depend on x0
    OracleOptions o;
    o.M = 16;
    const auto sys = assemble_and_solve(Kind::stokeslet, CL(0.5, -1), CL(1.0, 0.8), 1.6L, o);
    const auto cs = build_channel_solution<double>(Kind::stokeslet, cd(0.5, -1), cd(1.0, 0.8), canonical_channel(1.6));
    EXPECT_LE(cross_method_compare(cs, sys, oracle_grid<double>(sys, 12, 6)).max_residual, 1e-6);
}

TEST(GlobalRelations, HoldAtRandomK) {
    for (const SpectralSystem* sys : {&systems().stokeslet, &systems().stresslet})
        for (const auto& r : global_relation_check(*sys, 20)) EXPECT_TRUE(r.pass) << r.name << " " << r.max_residual;
}

TEST(Quadrature, RefinementChangesLessThanResidualScale) {
    OracleOptions o;
    o.M = 12;
    const auto a = assemble_and_solve(Kind::stresslet, CL(1, 0.5), CL(pi, 1), 2.0L, o);
    o.quad_factor = 2;
    const auto b = assemble_and_solve(Kind::stresslet, CL(1, 0.5), CL(pi, 1), 2.0L, o);
    LD worst = 0;
    for (LD x : {1.0L, 2.0L, 4.5L})
        for (LD y : {0.5L, 1.0L, 1.5L}) worst = std::max(worst, std::abs(a.eval_w(CL(x, y)) - b.eval_w(CL(x, y))));
    EXPECT_LE(worst, std::max(LD(1e-9), 10 * a.residual));
}
