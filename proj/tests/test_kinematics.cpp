#include "mfp/error.hpp"
#include "mfp/kinematics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace mfp;

namespace {

// Roots of det(A - x I) by sign-change scanning plus bisection; no closed
// form, so it is independent of the trigonometric solver.
std::array<double, 3> cubic_roots_by_bisection(const Mat3& A)
{
    const double c2 = A.trace();
    const double c1 = 0.5 * (c2 * c2 - (A * A).trace());
    const double c0 = A.determinant();
    auto p = [&](double x) { return ((x - c2) * x + c1) * x - c0; };
    const double hi = A.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    const int samples = 200000;
    std::vector<double> roots;
    double x_prev = -hi;
    double p_prev = p(x_prev);
    for (int k = 1; k <= samples && roots.size() < 3; ++k) {
        const double x = -hi + 2.0 * hi * k / samples;
        const double px = p(x);
        if (px == 0.0) {
            roots.push_back(x);
        } else if ((p_prev < 0.0) != (px < 0.0) && p_prev != 0.0) {
            double a = x_prev;
            double b = x;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if ((p(a) < 0.0) == (p(m) < 0.0)) {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x;
        p_prev = px;
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3 && i < roots.size(); ++i) {
        out[i] = roots[i];
    }
    return out;
}

} // namespace

TEST(Condense, IdentityStaysIdentity)
{
    const auto F = condense_plane_stress(Mat2::Identity());
    EXPECT_TRUE(F.F.isApprox(Mat3::Identity()));
    EXPECT_EQ(F.F(2, 2), 1.0);
}

TEST(Condense, ThicknessStretchForcesUnitDeterminant)
{
    Mat2 a;
    a << 2.0, 0.0, 0.0, 1.0;
    const auto F = condense_plane_stress(a);
    EXPECT_DOUBLE_EQ(F.F(2, 2), 0.5);
    Mat2 b;
    b << 1.2, 0.0, 0.0, 0.8;
    EXPECT_NEAR(condense_plane_stress(b).F(2, 2), 1.0 / 0.96, 1e-15);
    EXPECT_EQ(condense_plane_stress(b).F(0, 2), 0.0);
    EXPECT_EQ(condense_plane_stress(b).F(2, 1), 0.0);
}

TEST(Condense, RejectsInvertedPlane)
{
    Mat2 a;
    a << 1.0, 0.0, 0.0, -0.5;
    EXPECT_THROW(condense_plane_stress(a), KinematicsError);
    EXPECT_THROW(condense_plane_stress(Mat2::Zero()), KinematicsError);
}

TEST(Condense, DeterminantIsOneForRandomGradients)
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 1000; ++k) {
        const auto F = condense_plane_stress(test::random_inplane(rng, 0.5));
        EXPECT_LT(std::abs(F.determinant() - 1.0), 1e-14);
    }
}

TEST(Invariants, ReferenceConfiguration)
{
    const auto inv = invariants(DeformationGradient3::identity());
    EXPECT_DOUBLE_EQ(inv.I1, 3.0);
    EXPECT_DOUBLE_EQ(inv.I2, 3.0);
    EXPECT_DOUBLE_EQ(inv.J, 1.0);
}

TEST(Invariants, DiagonalHandCase)
{
    const double s = 1.0 / std::sqrt(2.0);
    const auto inv = invariants(DeformationGradient3::from(Eigen::Vector3d(2.0, s, s).asDiagonal()));
    EXPECT_NEAR(inv.I1, 5.0, 1e-14);
    EXPECT_NEAR(inv.I2, 4.25, 1e-14);
    EXPECT_NEAR(inv.J, 1.0, 1e-14);
    EXPECT_NEAR(inv.I1bar, 5.0, 1e-14);
    EXPECT_NEAR(inv.I2bar, 4.25, 1e-14);
}

TEST(Invariants, IsochoricPartIgnoresDilation)
{
    std::mt19937_64 rng(12);
    for (int k = 0; k < 200; ++k) {
        const Mat3 F = test::random_gradient(rng, 0.5);
        const auto a = invariants(DeformationGradient3::from(F));
        const auto b = invariants(DeformationGradient3::from(1.7 * F));
        EXPECT_LT(test::rel_diff(a.I1bar, b.I1bar), 1e-13);
        EXPECT_LT(test::rel_diff(a.I2bar, b.I2bar), 1e-13);
        EXPECT_LT(test::rel_diff(a.I1bar, std::pow(a.J, -2.0 / 3.0) * a.I1), 1e-14);
        EXPECT_LT(test::rel_diff(a.I2bar, std::pow(a.J, -4.0 / 3.0) * a.I2), 1e-14);
    }
}

TEST(Invariants, RejectsNonPositiveJacobian)
{
    Mat3 F = Mat3::Identity();
    F(0, 0) = -1.0;
    EXPECT_THROW(invariants(DeformationGradient3::from(F)), KinematicsError);
    EXPECT_THROW(principal_stretches(DeformationGradient3::from(F)), KinematicsError);
}

TEST(Stretches, IdentityAndDiagonal)
{
    const auto one = principal_stretches(DeformationGradient3::identity());
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(one[i], 1.0, 1e-15);
    }
    const double s = 1.0 / std::sqrt(2.0);
    const auto st = principal_stretches(DeformationGradient3::from(Eigen::Vector3d(s, 2.0, s).asDiagonal()));
    EXPECT_NEAR(st[0], 2.0, 1e-14);
    EXPECT_NEAR(st[1], 0.70710678118654752, 1e-14);
    EXPECT_NEAR(st[2], 0.70710678118654752, 1e-14);
}

TEST(Stretches, ProductAndInvariantsOnRandomSet)
{
    std::mt19937_64 rng(13);
    for (int k = 0; k < 1000; ++k) {
        const Mat3 F = test::random_gradient(rng, 0.5);
        const auto g = DeformationGradient3::from(F);
        const auto st = principal_stretches(g);
        const auto inv = invariants(g);
        EXPECT_GE(st[0], st[1]);
        EXPECT_GE(st[1], st[2]);
        EXPECT_GT(st[2], 0.0);
        EXPECT_LT(test::rel_diff(st[0] * st[1] * st[2], inv.J), 1e-10);
        const double l0 = st[0] * st[0], l1 = st[1] * st[1], l2 = st[2] * st[2];
        EXPECT_LT(test::rel_diff(l0 + l1 + l2, inv.I1), 1e-9);
        EXPECT_LT(test::rel_diff(l0 * l1 + l1 * l2 + l2 * l0, inv.I2), 1e-9);
    }
}

TEST(Eigenvalues, MatchBisectionOracle)
{
    std::mt19937_64 rng(14);
    for (int k = 0; k < 100; ++k) {
        const Mat3 F = test::random_gradient(rng, 0.5);
        const Mat3 C = F.transpose() * F;
        const auto closed = symmetric_eigenvalues(C);
        const auto oracle = cubic_roots_by_bisection(C);
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(std::sqrt(closed[i]), std::sqrt(oracle[i]), 1e-9);
        }
    }
}

TEST(Eigenvalues, RepeatedRootsAreAllowed)
{
    Mat3 A = Mat3::Identity() * 2.0;
    A(0, 0) = 5.0;
    const auto ev = symmetric_eigenvalues(A);
    EXPECT_NEAR(ev[0], 5.0, 1e-12);
    EXPECT_NEAR(ev[1], 2.0, 1e-8);
    EXPECT_NEAR(ev[2], 2.0, 1e-8);
    const auto triple = symmetric_eigenvalues(Mat3::Identity() * 3.0);
    for (const double v : triple) {
        EXPECT_DOUBLE_EQ(v, 3.0);
    }
}

TEST(Eigenvalues, SymmetrizesInput)
{
    Mat3 A;
    A << 4, 1, 0, 0, 3, 0, 0, 0, 1;
    Mat3 S = 0.5 * (A + A.transpose());
    const auto a = symmetric_eigenvalues(A);
    const auto s = symmetric_eigenvalues(S);
    for (int i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(a[i], s[i]);
    }
}
