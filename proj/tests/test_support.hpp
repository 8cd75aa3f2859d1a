#pragma once

#include "mfp/constitutive.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace mfp::test {

inline Mat2 random_inplane(std::mt19937_64& rng, double spread)
{
    std::uniform_real_distribution<double> d(-spread, spread);
    for (;;) {
        Mat2 F = Mat2::Identity();
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                F(i, j) += d(rng);
            }
        }
        if (F.determinant() > 0.2) {
            return F;
        }
    }
}

inline Mat3 random_gradient(std::mt19937_64& rng, double spread)
{
    std::uniform_real_distribution<double> d(-spread, spread);
    for (;;) {
        Mat3 F = Mat3::Identity();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                F(i, j) += d(rng);
            }
        }
        if (F.determinant() > 0.05) {
            return F;
        }
    }
}

/// Sweep-range parameters: first theta 1 scaled, others and alpha drawn
/// uniformly over the sweep ranges.
inline Params random_params(ModelId model, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> theta(0.1, 10.0);
    Params p;
    switch (model) {
    case ModelId::Carroll:
    case ModelId::Yeoh:
        p.theta = {theta(rng), theta(rng), theta(rng)};
        break;
    case ModelId::MooneyRivlin:
        p.theta = {theta(rng), theta(rng)};
        break;
    case ModelId::NeoHookean:
        p.theta = {theta(rng)};
        break;
    case ModelId::LopezPamies:
        p.theta = {theta(rng)};
        p.alpha = {std::uniform_real_distribution<double>(0.01, 10.0)(rng)};
        break;
    case ModelId::GenNeoHookean:
        p.theta = {theta(rng)};
        p.alpha = {std::uniform_real_distribution<double>(0.01, 10.0)(rng),
                   std::uniform_real_distribution<double>(0.5, 10.0)(rng)};
        break;
    case ModelId::Ogden:
        p.theta = {theta(rng)};
        p.alpha = {std::uniform_real_distribution<double>(1.0, 10.0)(rng)};
        break;
    }
    return p;
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("mfp_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace mfp::test
