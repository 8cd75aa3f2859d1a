#include "mfp/constitutive.hpp"

#include "mfp/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace mfp {

namespace {

struct TokenEntry {
    ModelId model;
    std::string_view token;
};

constexpr std::array<TokenEntry, 7> tokens{{
    {ModelId::Carroll, "carroll"},
    {ModelId::LopezPamies, "lopez-pamies"},
    {ModelId::MooneyRivlin, "mooney-rivlin"},
    {ModelId::NeoHookean, "neo-hookean"},
    {ModelId::GenNeoHookean, "gen-neo-hookean"},
    {ModelId::Ogden, "ogden"},
    {ModelId::Yeoh, "yeoh"},
}};

double gen_neo_hookean_base(double I1, double a2)
{
    const double base = 1.0 + a2 * (I1 - 3.0);
    if (!(base > 0.0)) {
        throw DomainError("gen-neo-hookean: 1 + alpha2 (I1 - 3) = " + std::to_string(base) + " is not positive");
    }
    return base;
}

// dQ/dI1 and dQ/dI2 for the invariant-based models, evaluated at J = 1.
struct InvariantDerivatives {
    double dI1 = 0.0;
    double dI2 = 0.0;
};

InvariantDerivatives invariant_derivatives(ModelId model, double I1, double I2, const Params& p)
{
    const auto& th = p.theta;
    const auto& al = p.alpha;
    switch (model) {
    case ModelId::Carroll:
        return {th[0] + 4.0 * th[1] * I1 * I1 * I1, th[2] / (2.0 * std::sqrt(I2))};
    case ModelId::LopezPamies:
        return {th[0] * al[0] * std::pow(I1, al[0] - 1.0), 0.0};
    case ModelId::MooneyRivlin:
        return {th[0], th[1]};
    case ModelId::NeoHookean:
        return {th[0], 0.0};
    case ModelId::GenNeoHookean: {
        const double base = gen_neo_hookean_base(I1, al[0]);
        return {th[0] * al[1] * al[0] * std::pow(base, al[1] - 1.0), 0.0};
    }
    case ModelId::Yeoh: {
        const double x = I1 - 3.0;
        return {th[0] + 2.0 * th[1] * x + 3.0 * th[2] * x * x, 0.0};
    }
    case ModelId::Ogden:
        break;
    }
    throw ParameterError("invariant_derivatives: model is not invariant based");
}

// dW/dC of the condensed Ogden energy
//   W = theta (mu1^b + mu2^b + (mu1 mu2)^-b - 3),  b = alpha / 2,
// with mu_a the eigenvalues of the in-plane C. Written as
//   dW/dC = wbar I + D (C - tr(C)/2 I)
// so that coincident eigenvalues need no eigenvectors.
Mat2 ogden_condensed_dW_dC(const Mat2& C, double theta, double alpha)
{
    const double b = 0.5 * alpha;
    const double half_trace = 0.5 * C.trace();
    const double radius = std::hypot(0.5 * (C(0, 0) - C(1, 1)), 0.5 * (C(0, 1) + C(1, 0)));
    const double mu1 = half_trace + radius;
    const double det = C.determinant();
    const double mu2 = det / mu1;
    const double K = std::pow(det, -b);

    const double w1 = theta * b * (std::pow(mu1, b - 1.0) - K / mu1);
    const double w2 = theta * b * (std::pow(mu2, b - 1.0) - K / mu2);
    const double wbar = 0.5 * (w1 + w2);

    double divided = 0.0;
    const double gap = mu1 - mu2;
    if (gap > 1e-5 * mu1) {
        divided = (std::pow(mu1, b - 1.0) - std::pow(mu2, b - 1.0)) / gap;
    } else {
        const double mean = 0.5 * (mu1 + mu2);
        divided = (b - 1.0) * std::pow(mean, b - 2.0);
    }
    const double D = theta * b * (divided + K / det);
    return wbar * Mat2::Identity() + D * (C - half_trace * Mat2::Identity());
}

} // namespace

ModelSignature signature(ModelId model)
{
    switch (model) {
    case ModelId::Carroll: return {3, 0};
    case ModelId::LopezPamies: return {1, 1};
    case ModelId::MooneyRivlin: return {2, 0};
    case ModelId::NeoHookean: return {1, 0};
    case ModelId::GenNeoHookean: return {1, 2};
    case ModelId::Ogden: return {1, 1};
    case ModelId::Yeoh: return {3, 0};
    }
    throw ArgumentError("signature: unknown model id");
}

std::string_view to_token(ModelId model)
{
    for (const auto& entry : tokens) {
        if (entry.model == model) {
            return entry.token;
        }
    }
    throw ArgumentError("to_token: unknown model id");
}

ModelId model_from_token(std::string_view token)
{
    for (const auto& entry : tokens) {
        if (entry.token == token) {
            return entry.model;
        }
    }
    throw ArgumentError("unknown model token '" + std::string(token) + "'");
}

void check_signature(ModelId model, const Params& params)
{
    const auto sig = signature(model);
    if (params.theta.size() != sig.n_theta || params.alpha.size() != sig.n_alpha) {
        throw ParameterError(std::string(to_token(model)) + " expects " + std::to_string(sig.n_theta) + " theta and " +
                             std::to_string(sig.n_alpha) + " alpha values, got " +
                             std::to_string(params.theta.size()) + " and " + std::to_string(params.alpha.size()));
    }
}

std::vector<double> homogeneity_basis(ModelId model, const DeformationGradient3& F, std::span<const double> alpha)
{
    if (alpha.size() != signature(model).n_alpha) {
        throw ParameterError(std::string(to_token(model)) + ": wrong number of alpha values");
    }
    if (model == ModelId::Ogden) {
        const auto s = principal_stretches(F);
        const double a = alpha[0];
        return {std::pow(s[0], a) + std::pow(s[1], a) + std::pow(s[2], a) - 3.0};
    }
    const auto inv = invariants(F);
    const double I1 = inv.I1bar;
    const double I2 = inv.I2bar;
    switch (model) {
    case ModelId::Carroll:
        return {I1, I1 * I1 * I1 * I1, std::sqrt(I2)};
    case ModelId::LopezPamies:
        return {std::pow(I1, alpha[0]) - std::pow(3.0, alpha[0])};
    case ModelId::MooneyRivlin:
        return {I1 - 3.0, I2 - 3.0};
    case ModelId::NeoHookean:
        return {I1 - 3.0};
    case ModelId::GenNeoHookean:
        return {std::pow(gen_neo_hookean_base(I1, alpha[0]), alpha[1]) - 1.0};
    case ModelId::Yeoh: {
        const double x = I1 - 3.0;
        return {x, x * x, x * x * x};
    }
    case ModelId::Ogden:
        break;
    }
    throw ArgumentError("homogeneity_basis: unknown model id");
}

double energy(ModelId model, const DeformationGradient3& F, const Params& params)
{
    check_signature(model, params);
    const auto Q = homogeneity_basis(model, F, params.alpha);
    return std::inner_product(params.theta.begin(), params.theta.end(), Q.begin(), 0.0);
}

double energy_condensed_2d(ModelId model, const Mat2& inplane, const Params& params)
{
    return energy(model, condense_plane_stress(inplane), params);
}

Mat2 piola_condensed_2d(ModelId model, const Mat2& inplane, const Params& params)
{
    check_signature(model, params);
    const double det_F = inplane.determinant();
    if (!(det_F > 0.0)) {
        throw KinematicsError("piola_condensed_2d: non-positive in-plane determinant " + std::to_string(det_F));
    }
    const Mat2 C = inplane.transpose() * inplane;

    Mat2 dW_dC;
    if (model == ModelId::Ogden) {
        dW_dC = ogden_condensed_dW_dC(C, params.theta[0], params.alpha[0]);
    } else {
        // With the thickness stretch eliminated, I1 = tr C + 1/det C and
        // I2 = det C + tr C / det C in terms of the in-plane C.
        const double t = C.trace();
        const double d = C.determinant();
        const Mat2 Cinv = C.inverse();
        const Mat2 I = Mat2::Identity();
        const double I1 = t + 1.0 / d;
        const double I2 = d + t / d;
        const auto w = invariant_derivatives(model, I1, I2, params);
        const Mat2 dI1 = I - Cinv / d;
        const Mat2 dI2 = d * Cinv + I / d - (t / d) * Cinv;
        dW_dC = w.dI1 * dI1 + w.dI2 * dI2;
    }
    return 2.0 * inplane * dW_dC;
}

} // namespace mfp
