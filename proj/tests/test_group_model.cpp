#include <gtest/gtest.h>

#include <cstring>
#include <limits>

#include "oracles.hpp"
#include "toeplab/symbol.hpp"

using namespace toeplab;

namespace {

std::vector<GroupModel> fuzz_models()
{
    return {GroupModel::circle(64), GroupModel::circle(16, 50), GroupModel::line(256, 0.1),
            GroupModel::line(64, 0.7), GroupModel::line(1024, 0.05)};
}

/// Band-limited on an oversampled circle, arbitrary otherwise.
GridFunction random_function(const GroupModel& m, std::mt19937_64& rng)
{
    if (m.is_circle() && m.samples() > 2 * m.modes() + 1) {
        return inverse_fourier(DualGridFunction(m, oracle::random_vector(rng, m.dual_size())));
    }
    return {m, oracle::random_vector(rng, m.samples())};
}

} // namespace

TEST(GroupModel, CircleDefaultsToCriticalSampling)
{
    const auto m = GroupModel::circle(5);
    EXPECT_EQ(m.samples(), 11);
    EXPECT_EQ(m.dual_size(), 11);
    EXPECT_EQ(m.hardy_size(), 6);
    EXPECT_DOUBLE_EQ(m.group_weight(), 1.0 / 11);
    EXPECT_DOUBLE_EQ(m.dual_weight(), 1.0);
}

TEST(GroupModel, LineGridAndNyquistBin)
{
    const auto m = GroupModel::line(8, 0.5);
    EXPECT_DOUBLE_EQ(m.period(), 4.0);
    EXPECT_DOUBLE_EQ(m.dual_spacing(), 2.0 * oracle::pi / 4.0);
    EXPECT_DOUBLE_EQ(m.group_point(0), -2.0);
    EXPECT_DOUBLE_EQ(m.group_point(4), 0.0);
    // Nyquist bin -pi/h is on the negative side; Hardy bins are 0..N/2-1.
    EXPECT_DOUBLE_EQ(m.dual_point(0), -oracle::pi / 0.5);
    EXPECT_FALSE(m.in_positive_cone(0));
    EXPECT_EQ(m.min_frequency(), -4);
    EXPECT_EQ(m.max_frequency(), 3);
    EXPECT_EQ(m.hardy_size(), 4);
    EXPECT_DOUBLE_EQ(m.dual_weight(), m.dual_spacing() / (2.0 * oracle::pi));
}

TEST(GroupModel, RejectsInvalidParameters)
{
    EXPECT_THROW(GroupModel::circle(1), ParseError);
    EXPECT_THROW(GroupModel::circle(4, 8), ParseError);
    EXPECT_THROW(GroupModel::line(7, 0.1), ParseError);
    EXPECT_THROW(GroupModel::line(6, 0.1), ParseError);
    EXPECT_THROW(GroupModel::line(8, 0.0), ParseError);
    EXPECT_THROW(GroupModel::line(8, -1.0), ParseError);
    EXPECT_THROW(GroupModel::parse("torus:M=3"), ParseError);
    EXPECT_THROW(GroupModel::parse("circle:N=9"), ParseError);
    EXPECT_THROW(GroupModel::parse("line:N=8"), ParseError);
    EXPECT_THROW(GroupModel::parse("line:N=8,h=0.1,x=2"), ParseError);
    EXPECT_THROW(GroupModel::parse("line:N=8,h=abc"), ParseError);
    EXPECT_THROW(GroupModel::parse("line:N=8,h=0.1,h=0.2"), ParseError);
}

TEST(GroupModel, TextRoundTripIsBitExact)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-6, 10.0);
    for (int i = 0; i < 200; ++i) {
        const auto m = GroupModel::line(2 * (4 + i), u(rng));
        const auto back = GroupModel::parse(m.to_string());
        EXPECT_EQ(back, m);
        const double h1 = m.spacing();
        const double h2 = back.spacing();
        EXPECT_EQ(std::memcmp(&h1, &h2, sizeof(double)), 0);
    }
    EXPECT_EQ(GroupModel::parse("circle:M=3").to_string(), "circle:M=3,N=7");
    EXPECT_EQ(GroupModel::parse(" circle : M = 3 , N = 9 ").to_string(), "circle:M=3,N=9");
}

TEST(GroupModel, NearestGroupIndex)
{
    const auto l = GroupModel::line(16, 0.5);
    EXPECT_EQ(l.nearest_group_index(0.0), 8);
    EXPECT_EQ(l.nearest_group_index(0.74), 9);
    EXPECT_EQ(l.nearest_group_index(-4.0), 0);
    EXPECT_EQ(l.nearest_group_index(-4.2), 0);
    EXPECT_EQ(l.nearest_group_index(-4.3), -1);
    EXPECT_EQ(l.nearest_group_index(100.0), -1);
    const auto c = GroupModel::circle(4);
    EXPECT_EQ(c.nearest_group_index(2.0 * oracle::pi), 0);
    EXPECT_EQ(c.nearest_group_index(-2.0 * oracle::pi / 9), 8);
}

TEST(GroupFunctions, RejectLengthMismatchAndNonFinite)
{
    const auto m = GroupModel::line(8, 0.5);
    EXPECT_THROW(GridFunction(m, CVector::Zero(7)), ModelMismatch);
    EXPECT_THROW(DualGridFunction(GroupModel::circle(3, 9), CVector::Zero(9)), ModelMismatch);
    CVector bad = CVector::Zero(8);
    bad(3) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(GridFunction(m, bad), PreconditionError);
}

TEST(Fourier, MatchesDirectQuadrature)
{
    std::mt19937_64 rng(11);
    for (const auto& m : {GroupModel::circle(7), GroupModel::circle(5, 16), GroupModel::line(32, 0.3),
                          GroupModel::line(30, 1.1)}) {
        const CVector f = oracle::random_vector(rng, m.samples());
        const auto fast = forward_fourier(GridFunction(m, f)).values();
        const CVector slow = oracle::forward(m, f, oracle::dual_points(m));
        EXPECT_LT((fast - slow).norm(), 1e-12 * slow.norm()) << m.to_string();
    }
}

TEST(Fourier, InverseMatchesDirectSum)
{
    std::mt19937_64 rng(12);
    for (const auto& m : {GroupModel::circle(6), GroupModel::circle(6, 20), GroupModel::line(40, 0.25)}) {
        const CVector g = oracle::random_vector(rng, m.dual_size());
        const auto xi = oracle::dual_points(m);
        const double w = m.is_circle() ? 1.0 : m.dual_spacing() / (2.0 * oracle::pi);
        CVector expected = CVector::Zero(m.samples());
        for (int j = 0; j < m.samples(); ++j) {
            for (int d = 0; d < m.dual_size(); ++d) {
                expected(j) += w * oracle::expi(xi(d) * oracle::group_point(m, j)) * g(d);
            }
        }
        const auto f = inverse_fourier(DualGridFunction(m, g)).values();
        EXPECT_LT((f - expected).norm(), 1e-12 * expected.norm()) << m.to_string();
    }
}

TEST(Fourier, ConstantOnCircleIsUnitMassAtZero)
{
    const auto m = GroupModel::circle(8);
    const auto g = forward_fourier(GridFunction(m, CVector::Ones(m.samples())));
    for (int d = 0; d < m.dual_size(); ++d) {
        const double expected = m.dual_frequency(d) == 0 ? 1.0 : 0.0;
        EXPECT_NEAR(std::abs(g.values()(d) - expected), 0.0, 1e-15);
    }
}

TEST(Fourier, GaussianTransformOnLine)
{
    const auto m = GroupModel::line(256, 0.1);
    CVector f(m.samples());
    for (int j = 0; j < m.samples(); ++j) {
        const double t = m.group_point(j);
        f(j) = std::exp(-t * t / 2);
    }
    const auto g = forward_fourier(GridFunction(m, f));
    double worst = 0.0;
    for (int d = 0; d < m.dual_size(); ++d) {
        const double xi = m.dual_point(d);
        worst = std::max(worst, std::abs(g.values()(d) - std::sqrt(2 * oracle::pi) * std::exp(-xi * xi / 2)));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Fourier, SingleCharactersOnCircle)
{
    const auto m = GroupModel::circle(4);
    CVector g = CVector::Zero(m.dual_size());
    g(m.dual_index_of_frequency(1)) = 1.0;
    const auto f = inverse_fourier(DualGridFunction(m, g));
    g(m.dual_index_of_frequency(-1)) = 1.0;
    const auto c = inverse_fourier(DualGridFunction(m, g));
    for (int j = 0; j < m.samples(); ++j) {
        const double th = oracle::group_point(m, j);
        EXPECT_NEAR(std::abs(f.values()(j) - oracle::expi(th)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(c.values()(j) - 2.0 * std::cos(th)), 0.0, 1e-14);
    }
}

TEST(Fourier, PlancherelAndRoundTripFuzz)
{
    std::mt19937_64 rng(1);
    for (const auto& m : fuzz_models()) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_function(m, rng);
            const auto g = forward_fourier(f);
            EXPECT_LT(std::abs(g.l2_norm() - f.l2_norm()), 1e-10 * f.l2_norm()) << m.to_string();
            const auto back = inverse_fourier(g);
            EXPECT_LT((back.values() - f.values()).norm(), 1e-12 * f.values().norm()) << m.to_string();
        }
    }
}

TEST(Fourier, CharactersAreOrthonormalOnCircle)
{
    for (const auto& m : {GroupModel::circle(6), GroupModel::circle(6, 31)}) {
        for (int a = -m.modes(); a <= m.modes(); ++a) {
            for (int b = -m.modes(); b <= m.modes(); ++b) {
                cplx ip = 0.0;
                for (int j = 0; j < m.samples(); ++j) {
                    ip += m.group_weight() * m.character(a, j) * std::conj(m.character(b, j));
                }
                EXPECT_NEAR(std::abs(ip - cplx(a == b ? 1.0 : 0.0)), 0.0, 1e-12);
            }
        }
    }
}

TEST(Fourier, UnitaryMatrixMatchesOracle)
{
    for (const auto& m : {GroupModel::circle(5), GroupModel::line(16, 0.4)}) {
        const CMatrix u = unitary_fourier_matrix(m);
        EXPECT_LT((u - oracle::unitary(m)).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_LT((u * u.adjoint() - CMatrix::Identity(m.samples(), m.samples())).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Fourier, ModelMismatchIsRejected)
{
    const auto a = GroupModel::line(16, 0.4);
    const auto b = GroupModel::line(16, 0.5);
    EXPECT_THROW(DualGridFunction(a, CVector::Zero(15)), ModelMismatch);
    EXPECT_NO_THROW(forward_fourier(GridFunction(b, CVector::Zero(16))));
}

TEST(Fourier, RefinementAtFixedPeriodConvergesOnCommonPoints)
{
    // Doubling N at fixed L keeps the group points of the coarse grid and
    // doubles the dual range. Samples agree exactly on common points; the
    // transforms agree on the coarse dual grid up to the coarse grid's
    // aliasing, exp(-(pi w / 2h)^2) ~ 1e-11 here.
    const double period = 40.0;
    const auto coarse = GroupModel::line_with_period(128, period);
    const auto fine = GroupModel::line_with_period(256, period);
    const auto phi = SymbolSpec::gauss(0.0, 1.0);
    const auto gc = forward_fourier(evaluate_on_group(phi, coarse));
    const auto gf = forward_fourier(evaluate_on_group(phi, fine));
    for (int d = 0; d < coarse.dual_size(); ++d) {
        const int df = fine.dual_index_of_frequency(coarse.dual_frequency(d));
        EXPECT_DOUBLE_EQ(coarse.dual_point(d), fine.dual_point(df));
        EXPECT_NEAR(std::abs(gc.values()(d) - gf.values()(df)), 0.0, 1e-10);
    }
    const auto sc = evaluate_on_group(phi, coarse);
    const auto sf = evaluate_on_group(phi, fine);
    for (int j = 0; j < coarse.samples(); ++j) {
        EXPECT_DOUBLE_EQ(coarse.group_point(j), fine.group_point(2 * j));
        EXPECT_EQ(sc.values()(j), sf.values()(2 * j));
    }
}

// --- symbols ---------------------------------------------------------------

TEST(Symbol, TextRoundTripIsBitExact)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_real_distribution<double> w(1e-3, 20.0);
    for (int i = 0; i < 200; ++i) {
        const std::vector<SymbolSpec> specs{
            SymbolSpec::constant(u(rng)),
            SymbolSpec::gauss(u(rng), w(rng), u(rng)),
            SymbolSpec::tail(w(rng)),
            SymbolSpec::dual_constant(u(rng)),
            SymbolSpec::dual_gauss(u(rng), w(rng)),
            SymbolSpec::dual_tail(w(rng)),
            SymbolSpec::trig({{-2, cplx(u(rng), u(rng))}, {0, u(rng)}, {3, cplx(0.0, u(rng))}})};
        for (const auto& s : specs) {
            const auto back = SymbolSpec::parse(s.to_string());
            EXPECT_EQ(back, s) << s.to_string();
            EXPECT_EQ(back.to_string(), s.to_string());
        }
    }
    EXPECT_EQ(SymbolSpec::parse("gauss:center=0,width=1").to_string(), "gauss:center=0,width=1");
}

TEST(Symbol, ParseErrors)
{
    EXPECT_THROW(SymbolSpec::parse("gauss:center=0"), ParseError);
    EXPECT_THROW(SymbolSpec::parse("gauss:center=0,width=-1"), ParseError);
    EXPECT_THROW(SymbolSpec::parse("gauss:center=0,width=1,depth=2"), ParseError);
    EXPECT_THROW(SymbolSpec::parse("bump:center=0,width=1"), ParseError);
    EXPECT_THROW(SymbolSpec::parse("trig:c1=1"), ParseError);
    EXPECT_THROW(SymbolSpec::parse("tail:width=inf"), ParseError);
    EXPECT_THROW(SymbolSpec::parse("tail:width=1,width=2"), ParseError);
}

TEST(Symbol, GaussianBumpOnLine)
{
    const auto m = GroupModel::line(64, 0.25);
    const auto s = SymbolSpec::gauss(0.0, 1.0);
    const auto v = evaluate_on_group(s, m);
    for (int j = 0; j < m.samples(); ++j) {
        const double t = m.group_point(j);
        const double e = std::exp(-t * t);
        EXPECT_EQ(v.values()(j), cplx(e < 1e-12 ? 0.0 : e));
    }
    ASSERT_TRUE(s.value_at_infinity(m).has_value());
    EXPECT_EQ(*s.value_at_infinity(m), cplx(0.0));
}

TEST(Symbol, TailToOneOnBothSides)
{
    const auto m = GroupModel::line(128, 0.5);
    const auto phi = SymbolSpec::tail(2.0);
    const auto g = evaluate_on_group(phi, m);
    for (int j = 0; j < m.samples(); ++j) {
        const double z = m.group_point(j) / 2.0;
        EXPECT_NEAR(std::abs(g.values()(j) - (1.0 - 1.0 / (1.0 + z * z))), 0.0, 1e-15);
        EXPECT_LT(g.values()(j).real(), 1.0);
    }
    EXPECT_EQ(*phi.value_at_infinity(m), cplx(1.0));
    // Limit toward the window edge is within the tail bound of the value at infinity.
    EXPECT_LE(std::abs(g.values()(0) - 1.0), phi.tail_bound(m) + 1e-15);

    const auto theta = SymbolSpec::dual_tail(1.0);
    const auto d = evaluate_on_dual(theta, m);
    for (int k = 0; k < m.dual_size(); ++k) {
        const double xi = m.dual_point(k);
        const double expected = xi >= 0 ? xi / (xi + 1.0) : 0.0;
        EXPECT_NEAR(std::abs(d.values()(k) - expected), 0.0, 1e-15);
    }
    EXPECT_EQ(*theta.value_at_infinity(m), cplx(1.0));
}

TEST(Symbol, DualSymbolsVanishOnNegativeHalf)
{
    const auto m = GroupModel::circle(8);
    const auto d = evaluate_on_dual(SymbolSpec::dual_constant(2.5), m);
    for (int k = 0; k < m.dual_size(); ++k) {
        EXPECT_EQ(d.values()(k), cplx(m.dual_frequency(k) >= 0 ? 2.5 : 0.0));
    }
}

TEST(Symbol, SideAndModelErrors)
{
    const auto line = GroupModel::line(64, 0.25);
    const auto circle = GroupModel::circle(8);
    EXPECT_THROW(evaluate_on_group(SymbolSpec::dual_tail(1.0), line), SideError);
    EXPECT_THROW(evaluate_on_dual(SymbolSpec::gauss(0, 1), line), SideError);
    EXPECT_THROW(evaluate_on_group(SymbolSpec::trig({{1, 1.0}}), line), UnsupportedModel);
    EXPECT_THROW(evaluate_on_group(SymbolSpec::tail(1.0), circle), UnsupportedModel);
    const auto v = evaluate_symbol(SymbolSpec::gauss(0, 1), SymbolSide::group, line);
    EXPECT_TRUE(std::holds_alternative<GridFunction>(v));
    EXPECT_THROW(evaluate_symbol(SymbolSpec::gauss(0, 1), SymbolSide::dual, line), SideError);
}

TEST(Symbol, TrigEvaluatesAsCharacterSum)
{
    const auto m = GroupModel::circle(6);
    const auto s = SymbolSpec::trig({{-1, 1.0}, {1, 1.0}, {2, cplx(0.0, 0.5)}});
    const auto v = evaluate_on_group(s, m);
    for (int j = 0; j < m.samples(); ++j) {
        const double th = oracle::group_point(m, j);
        const cplx expected = 2.0 * std::cos(th) + cplx(0.0, 0.5) * oracle::expi(2 * th);
        EXPECT_NEAR(std::abs(v.values()(j) - expected), 0.0, 1e-14);
    }
}

TEST(Symbol, AliasingRejection)
{
    const auto m = GroupModel::line(64, 0.5);
    // Too narrow for the step.
    EXPECT_THROW(check_representable(SymbolSpec::gauss(0.0, 0.1), m), AliasingError);
    // Too close to the window edge.
    EXPECT_THROW(check_representable(SymbolSpec::gauss(15.0, 1.0), m), AliasingError);
    EXPECT_NO_THROW(check_representable(SymbolSpec::gauss(0.0, 1.0), GroupModel::line(128, 0.25)));
    // Dual bump reaching past the top frequency.
    EXPECT_THROW(check_representable(SymbolSpec::dual_gauss(6.0, 1.0), m), AliasingError);
    // Trig degree beyond what the samples resolve.
    EXPECT_THROW(check_representable(SymbolSpec::trig({{12, 1.0}}), GroupModel::circle(8, 20)), AliasingError);
    try {
        check_representable(SymbolSpec::gauss(0.0, 0.1), m);
    } catch (const AliasingError& e) {
        EXPECT_EQ(e.symbol(), "gauss:center=0,width=0.1");
    }
}

TEST(Symbol, ExactProducts)
{
    const auto a = SymbolSpec::trig({{1, 1.0}});
    const auto b = SymbolSpec::trig({{1, 1.0}, {-1, 2.0}});
    const auto p = exact_product(a, b);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(*p, SymbolSpec::trig({{2, 1.0}, {0, 2.0}}));
    EXPECT_EQ(*exact_product(SymbolSpec::constant(2.0), SymbolSpec::constant(3.0)), SymbolSpec::constant(6.0));
    EXPECT_FALSE(exact_product(SymbolSpec::gauss(0, 1), SymbolSpec::gauss(1, 1)).has_value());
}
