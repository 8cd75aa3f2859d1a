#include "mfp/kinematics.hpp"

#include "mfp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mfp {

DeformationGradient3 condense_plane_stress(const Mat2& inplane)
{
    const double det = inplane.determinant();
    if (!(det > 0.0)) {
        throw KinematicsError("condense_plane_stress: non-positive in-plane determinant " + std::to_string(det));
    }
    DeformationGradient3 out;
    out.F.setZero();
    out.F.topLeftCorner<2, 2>() = inplane;
    out.F(2, 2) = 1.0 / det;
    return out;
}

InvariantSet invariants(const DeformationGradient3& def)
{
    const double J = def.determinant();
    if (!(J > 0.0)) {
        throw KinematicsError("invariants: non-positive Jacobian " + std::to_string(J));
    }
    const Mat3 C = def.F.transpose() * def.F;
    const double trC = C.trace();
    const double trC2 = (C * C).trace();
    InvariantSet out;
    out.I1 = trC;
    out.I2 = 0.5 * (trC * trC - trC2);
    out.J = J;
    out.I1bar = std::pow(J, -2.0 / 3.0) * out.I1;
    out.I2bar = std::pow(J, -4.0 / 3.0) * out.I2;
    return out;
}

std::array<double, 3> symmetric_eigenvalues(const Mat3& A)
{
    const Mat3 S = 0.5 * (A + A.transpose());
    const double off = S(0, 1) * S(0, 1) + S(0, 2) * S(0, 2) + S(1, 2) * S(1, 2);
    std::array<double, 3> e{};
    if (off == 0.0) {
        e = {S(0, 0), S(1, 1), S(2, 2)};
    } else {
        const double q = S.trace() / 3.0;
        const double d0 = S(0, 0) - q;
        const double d1 = S(1, 1) - q;
        const double d2 = S(2, 2) - q;
        const double p = std::sqrt((d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off) / 6.0);
        const Mat3 B = (S - q * Mat3::Identity()) / p;
        const double r = std::clamp(0.5 * B.determinant(), -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        e[0] = q + 2.0 * p * std::cos(phi);
        e[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        e[1] = 3.0 * q - e[0] - e[2];
    }
    std::sort(e.begin(), e.end(), std::greater<>());
    // Smallest eigenvalue through the determinant keeps its relative accuracy
    // when it is far below the others.
    const double det = S.determinant();
    if (e[0] > 0.0 && e[1] > 0.0 && det > 0.0) {
        e[2] = det / (e[0] * e[1]);
        if (e[2] > e[1]) {
            std::swap(e[1], e[2]);
        }
    }
    return e;
}

PrincipalStretches principal_stretches(const DeformationGradient3& def)
{
    const double J = def.determinant();
    if (!(J > 0.0)) {
        throw KinematicsError("principal_stretches: non-positive Jacobian " + std::to_string(J));
    }
    const auto eig = symmetric_eigenvalues(def.F.transpose() * def.F);
    PrincipalStretches out;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(eig[i] > 0.0) || !std::isfinite(eig[i])) {
            throw NumericError("principal_stretches: degenerate right Cauchy-Green tensor");
        }
        out.values[i] = std::sqrt(eig[i]);
    }
    return out;
}

} // namespace mfp
