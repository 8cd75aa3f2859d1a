#pragma once

#include <Eigen/Dense>

#include <array>

namespace mfp {

using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

/// Full 3x3 deformation gradient F = I + grad u (dimensionless).
struct DeformationGradient3 {
    Mat3 F = Mat3::Identity();

    static DeformationGradient3 identity() { return {}; }
    static DeformationGradient3 from(const Mat3& m) { return DeformationGradient3{m}; }
    double determinant() const { return F.determinant(); }
};

/// Invariants of the right Cauchy-Green tensor C = F^T F and their
/// isochoric counterparts.
struct InvariantSet {
    double I1 = 3.0;
    double I2 = 3.0;
    double J = 1.0;
    double I1bar = 3.0;
    double I2bar = 3.0;
};

/// Principal stretches sorted in descending order.
struct PrincipalStretches {
    std::array<double, 3> values{1.0, 1.0, 1.0};

    double operator[](std::size_t i) const { return values[i]; }
};

/// Embeds an in-plane deformation gradient into 3D with the thickness stretch
/// chosen so that det F = 1. Throws KinematicsError if det(inplane) <= 0.
DeformationGradient3 condense_plane_stress(const Mat2& inplane);

/// Throws KinematicsError if det F <= 0.
InvariantSet invariants(const DeformationGradient3& F);

/// Throws KinematicsError if det F <= 0 and NumericError if the eigenvalue
/// solve produces a non-positive or non-finite eigenvalue of C.
PrincipalStretches principal_stretches(const DeformationGradient3& F);

/// Eigenvalues of a symmetric 3x3 matrix in descending order, closed form
/// (trigonometric solution of the characteristic cubic). The input is
/// symmetrized before solving.
std::array<double, 3> symmetric_eigenvalues(const Mat3& A);

} // namespace mfp
