#include "mfp/specimen.hpp"

#include "mfp/error.hpp"
#include "mfp/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mfp {

namespace {

Vec2 direction(double angle_deg)
{
    // Exact diagonal so that points on the notch axis satisfy x == y.
    if (angle_deg == 45.0) {
        const double s = std::sqrt(0.5);
        return {s, s};
    }
    const double rad = angle_deg * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key)
{
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw ParseError("descriptor manifest is missing key '" + key + "'");
    }
    return it->second;
}

} // namespace

ExperimentDescriptor default_descriptor()
{
    ExperimentDescriptor desc;
    refresh_sample_points(desc);
    return desc;
}

double SlotGeometry::distance_to_notch(const Vec2& p) const
{
    const double along = std::clamp(p.dot(axis), -half_length, half_length);
    return (p - along * axis).norm();
}

bool SlotGeometry::contains(const Vec2& p) const
{
    if (!present()) {
        return false;
    }
    const double core = half_length - half_width;
    const double along = std::clamp(p.dot(axis), -core, core);
    return (p - along * axis).norm() < half_width;
}

SlotGeometry slot_geometry(const ExperimentDescriptor& desc)
{
    SlotGeometry slot;
    slot.axis = direction(desc.notch_angle);
    slot.normal = Vec2(-slot.axis.y(), slot.axis.x());
    slot.half_length = 0.5 * desc.notch_length;
    slot.half_width = desc.notch_length > 0.0 ? desc.slot_half_width : 0.0;
    return slot;
}

std::vector<Vec2> ellipse_points(const ExperimentDescriptor& desc)
{
    if (desc.n_u < 1) {
        throw DescriptorError("ellipse_points: n_u must be positive");
    }
    const Vec2 major = direction(desc.ellipse_angle);
    const Vec2 minor(-major.y(), major.x());
    const SlotGeometry slot = slot_geometry(desc);
    const double half_side = 0.5 * desc.side_length;

    std::vector<Vec2> points;
    points.reserve(static_cast<std::size_t>(desc.n_u));
    for (int j = 0; j < desc.n_u; ++j) {
        const double t = 2.0 * std::numbers::pi * j / desc.n_u;
        const Vec2 p = desc.ellipse_semi_major * std::cos(t) * major + desc.ellipse_semi_minor * std::sin(t) * minor;
        if (slot.present() && slot.distance_to_notch(p) <= slot.half_width) {
            throw DescriptorError("ellipse point " + std::to_string(j) + " lies inside the slot");
        }
        if (!(std::abs(p.x()) < half_side && std::abs(p.y()) < half_side)) {
            throw DescriptorError("ellipse point " + std::to_string(j) + " lies outside the specimen");
        }
        points.emplace_back(quantize(p.x()), quantize(p.y()));
    }
    return points;
}

void refresh_sample_points(ExperimentDescriptor& desc)
{
    desc.sample_points = ellipse_points(desc);
}

void validate(const ExperimentDescriptor& desc)
{
    if (!(desc.side_length > 0.0) || !(desc.thickness > 0.0)) {
        throw DescriptorError("side_length and thickness must be positive");
    }
    if (desc.n_t < 1) {
        throw DescriptorError("the load program needs at least one step (n_t = " + std::to_string(desc.n_t) + ")");
    }
    if (!(desc.u_max > 0.0)) {
        throw DescriptorError("u_max must be positive");
    }
    if (desc.notch_length < 0.0 || desc.notch_length >= desc.side_length) {
        throw DescriptorError("notch_length must lie in [0, side_length)");
    }
    if (desc.notch_length > 0.0 && !(desc.slot_half_width > 0.0 && 2.0 * desc.slot_half_width < desc.notch_length)) {
        throw DescriptorError("slot_half_width must be positive and below notch_length / 2");
    }
    if (desc.sample_points.size() != static_cast<std::size_t>(desc.n_u)) {
        throw DescriptorError("sample_points does not hold n_u points");
    }
    const SlotGeometry slot = slot_geometry(desc);
    const double half_side = 0.5 * desc.side_length;
    for (std::size_t j = 0; j < desc.sample_points.size(); ++j) {
        const Vec2& p = desc.sample_points[j];
        if (slot.present() && slot.distance_to_notch(p) <= slot.half_width) {
            throw DescriptorError("sample point " + std::to_string(j) + " lies inside the slot");
        }
        if (!(std::abs(p.x()) < half_side && std::abs(p.y()) < half_side)) {
            throw DescriptorError("sample point " + std::to_string(j) + " lies outside the specimen");
        }
    }
}

std::string descriptor_manifest(const ExperimentDescriptor& desc)
{
    std::ostringstream out;
    out << "side_length = " << format_real(desc.side_length) << '\n'
        << "thickness = " << format_real(desc.thickness) << '\n'
        << "notch_length = " << format_real(desc.notch_length) << '\n'
        << "notch_angle = " << format_real(desc.notch_angle) << '\n'
        << "slot_half_width = " << format_real(desc.slot_half_width) << '\n'
        << "n_t = " << desc.n_t << '\n'
        << "u_max = " << format_real(desc.u_max) << '\n'
        << "n_u = " << desc.n_u << '\n'
        << "ellipse_semi_major = " << format_real(desc.ellipse_semi_major) << '\n'
        << "ellipse_semi_minor = " << format_real(desc.ellipse_semi_minor) << '\n'
        << "ellipse_angle = " << format_real(desc.ellipse_angle) << '\n';
    for (std::size_t j = 0; j < desc.sample_points.size(); ++j) {
        out << "sample_point." << j << " = " << format_real(desc.sample_points[j].x()) << ' '
            << format_real(desc.sample_points[j].y()) << '\n';
    }
    return out.str();
}

std::string descriptor_hash(const ExperimentDescriptor& desc)
{
    return fnv1a_hex(descriptor_manifest(desc));
}

void write_descriptor(std::ostream& out, const ExperimentDescriptor& desc)
{
    const std::string manifest = descriptor_manifest(desc);
    out << manifest << "descriptor_hash = " << fnv1a_hex(manifest) << '\n';
}

ExperimentDescriptor descriptor_from_manifest(const std::map<std::string, std::string>& kv)
{
    ExperimentDescriptor desc;
    desc.side_length = parse_real(require(kv, "side_length"));
    desc.thickness = parse_real(require(kv, "thickness"));
    desc.notch_length = parse_real(require(kv, "notch_length"));
    desc.notch_angle = parse_real(require(kv, "notch_angle"));
    desc.slot_half_width = parse_real(require(kv, "slot_half_width"));
    desc.n_t = static_cast<int>(parse_integer(require(kv, "n_t")));
    desc.u_max = parse_real(require(kv, "u_max"));
    desc.n_u = static_cast<int>(parse_integer(require(kv, "n_u")));
    desc.ellipse_semi_major = parse_real(require(kv, "ellipse_semi_major"));
    desc.ellipse_semi_minor = parse_real(require(kv, "ellipse_semi_minor"));
    desc.ellipse_angle = parse_real(require(kv, "ellipse_angle"));
    if (desc.n_u < 0) {
        throw ParseError("descriptor manifest: negative n_u");
    }
    for (int j = 0; j < desc.n_u; ++j) {
        const std::string& text = require(kv, "sample_point." + std::to_string(j));
        const auto fields = split_fields(text);
        if (fields.size() != 2) {
            throw ParseError("sample_point." + std::to_string(j) + " needs two coordinates");
        }
        desc.sample_points.emplace_back(parse_real(fields[0]), parse_real(fields[1]));
    }
    const auto stored = kv.find("descriptor_hash");
    if (stored != kv.end() && stored->second != descriptor_hash(desc)) {
        throw ParseError("descriptor_hash " + stored->second + " does not match the manifest content (" +
                         descriptor_hash(desc) + ")");
    }
    return desc;
}

LoadProgram load_program(const ExperimentDescriptor& desc)
{
    if (desc.n_t < 1) {
        throw DescriptorError("the load program needs at least one step");
    }
    LoadProgram program;
    program.stretches.reserve(static_cast<std::size_t>(desc.n_t));
    for (int k = 1; k <= desc.n_t; ++k) {
        const double clamp = k * desc.u_max / desc.n_t;
        program.clamp_displacements.push_back(clamp);
        program.stretches.push_back(1.0 + clamp / desc.side_length);
    }
    return program;
}

std::vector<int> Mesh::nodes_on(EdgeTag edge) const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < boundary_tags.size(); ++i) {
        if (boundary_tags[i] & edge) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

double min_element_jacobian(const Mesh& mesh)
{
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.elements) {
        const Vec2 a = mesh.nodes[static_cast<std::size_t>(e[1])] - mesh.nodes[static_cast<std::size_t>(e[0])];
        const Vec2 b = mesh.nodes[static_cast<std::size_t>(e[2])] - mesh.nodes[static_cast<std::size_t>(e[0])];
        lowest = std::min(lowest, a.x() * b.y() - a.y() * b.x());
    }
    return lowest;
}

} // namespace mfp
