#pragma once

#include "mfp/kinematics.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mfp {

/// The standardized experiment: specimen geometry, load program, and the
/// displacement sampling points. Lengths in mm, angles in degrees. The
/// specimen is centered at the origin with edges parallel to the axes.
struct ExperimentDescriptor {
    double side_length = 85.0;
    double thickness = 2.0;
    double notch_length = 10.0;
    double notch_angle = 45.0;
    double slot_half_width = 0.1;
    int n_t = 35;
    double u_max = 29.75;
    int n_u = 50;
    double ellipse_semi_major = 10.0;
    double ellipse_semi_minor = 6.0;
    double ellipse_angle = 45.0;
    std::vector<Vec2> sample_points;

    /// Clamp separation increment per load step.
    double step_increment() const { return u_max / n_t; }

    bool operator==(const ExperimentDescriptor&) const = default;
};

/// Canonical protocol: 85 mm square, 2 mm thick, 10 mm notch at 45 degrees,
/// 29.75 mm equibiaxial displacement in 35 steps, 50 points on an ellipse.
ExperimentDescriptor default_descriptor();

/// Points on the sampling ellipse at parameter angles t_j = 2 pi j / n_u,
/// rounded to 9 significant digits (their serialized form). Throws DescriptorError if a point falls inside the slot or outside the
/// specimen.
std::vector<Vec2> ellipse_points(const ExperimentDescriptor& desc);

/// Recomputes sample_points from the ellipse fields.
void refresh_sample_points(ExperimentDescriptor& desc);

/// Throws DescriptorError on inconsistent fields.
void validate(const ExperimentDescriptor& desc);

/// key = value lines of every descriptor field, reals with 9 significant
/// digits. This text is what the descriptor hash digests.
std::string descriptor_manifest(const ExperimentDescriptor& desc);

std::string descriptor_hash(const ExperimentDescriptor& desc);

/// Writes the manifest followed by a descriptor_hash line.
void write_descriptor(std::ostream& out, const ExperimentDescriptor& desc);

/// Rebuilds a descriptor from parsed key = value pairs. Verifies the stored
/// descriptor_hash when present; throws ParseError on missing keys or a
/// hash that does not match the content.
ExperimentDescriptor descriptor_from_manifest(const std::map<std::string, std::string>& kv);

/// Boundary stretch factors lambda_k = 1 + k u_max / (n_t side), k = 1..n_t.
struct LoadProgram {
    std::vector<double> stretches;
    std::vector<double> clamp_displacements;

    std::size_t size() const { return stretches.size(); }
};

LoadProgram load_program(const ExperimentDescriptor& desc);

/// Geometry of the slot cut out of the specimen center: a stadium of total
/// length notch_length and half width slot_half_width along the notch axis.
struct SlotGeometry {
    Vec2 axis = Vec2(1.0, 0.0);
    Vec2 normal = Vec2(0.0, 1.0);
    double half_length = 0.0;
    double half_width = 0.0;

    bool present() const { return half_length > 0.0; }
    /// Distance to the notch segment [-half_length, half_length] on the axis.
    double distance_to_notch(const Vec2& p) const;
    /// Strictly inside the stadium.
    bool contains(const Vec2& p) const;
};

SlotGeometry slot_geometry(const ExperimentDescriptor& desc);

enum EdgeTag : std::uint8_t {
    EdgeNone = 0,
    EdgeLeft = 1,
    EdgeRight = 2,
    EdgeBottom = 4,
    EdgeTop = 8,
};

/// Quadratic triangle mesh of the specimen. Element connectivity is
/// (c0, c1, c2, m01, m12, m20) with counter-clockwise corners and
/// straight edges.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 6>> elements;
    std::vector<std::uint8_t> boundary_tags;
    std::vector<int> slot_face_nodes;

    std::size_t node_count() const { return nodes.size(); }
    std::vector<int> nodes_on(EdgeTag edge) const;
    bool on_boundary(int node) const { return boundary_tags[static_cast<std::size_t>(node)] != EdgeNone; }
};

/// Meshes the square minus the slot with quadratic triangles. The element
/// size is target_edge_length away from the slot and graded down to at most
/// target_edge_length / 4 around the slot tips. A notch at 45 degrees is
/// meshed on one half and mirrored, so the mesh is exactly symmetric about
/// the notch axis. Throws ArgumentError for target_edge_length outside
/// [0.25, 10] and MeshError if refinement fails.
Mesh build_mesh(const ExperimentDescriptor& desc, double target_edge_length);

/// Signed area-weighted Jacobian check: smallest doubled corner-triangle area.
double min_element_jacobian(const Mesh& mesh);

} // namespace mfp
