#pragma once

#include "mfp/kinematics.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace mfp {

/// The incompressible isotropic hyperelastic models of the database, in
/// database row order.
enum class ModelId {
    Carroll,
    LopezPamies,
    MooneyRivlin,
    NeoHookean,
    GenNeoHookean,
    Ogden,
    Yeoh,
};

inline constexpr std::array<ModelId, 7> all_models{
    ModelId::Carroll, ModelId::LopezPamies, ModelId::MooneyRivlin, ModelId::NeoHookean,
    ModelId::GenNeoHookean, ModelId::Ogden, ModelId::Yeoh,
};

/// Number of homogeneity (theta) and non-homogeneity (alpha) parameters.
struct ModelSignature {
    std::size_t n_theta = 0;
    std::size_t n_alpha = 0;
};

ModelSignature signature(ModelId model);

/// Serialized lowercase token, e.g. "gen-neo-hookean".
std::string_view to_token(ModelId model);

/// Inverse of to_token. Throws ArgumentError for unknown tokens.
ModelId model_from_token(std::string_view token);

/// Material parameters split per the homogeneity property: the energy is
/// linear in theta (N/mm^2) and nonlinear in alpha (dimensionless).
struct Params {
    std::vector<double> theta;
    std::vector<double> alpha;

    bool operator==(const Params&) const = default;
};

/// Throws ParameterError if the parameter lengths do not match the model.
void check_signature(ModelId model, const Params& params);

/// Strain energy density W(F; theta, alpha) in N/mm^2, evaluated on the
/// isochoric invariants (or the principal stretches for Ogden).
double energy(ModelId model, const DeformationGradient3& F, const Params& params);

/// Basis Q(F; alpha) with energy = theta . Q.
std::vector<double> homogeneity_basis(ModelId model, const DeformationGradient3& F, std::span<const double> alpha);

/// Energy of the condensed plane-stress state, W(condense_plane_stress(F)).
double energy_condensed_2d(ModelId model, const Mat2& inplane, const Params& params);

/// In-plane first Piola-Kirchhoff stress dW/dF of the condensed energy,
/// per unit reference volume (N/mm^2). Throws KinematicsError for
/// det(inplane) <= 0.
Mat2 piola_condensed_2d(ModelId model, const Mat2& inplane, const Params& params);

} // namespace mfp
