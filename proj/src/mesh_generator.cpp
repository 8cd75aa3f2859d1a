// Conforming Delaunay refinement for the notched square.
//
// Boundary loops are discretized with a graded size field, triangulated with
// Bowyer-Watson insertion, and refined by circumcenter insertion until every
// in-domain triangle satisfies the size and radius-edge bounds. Segments are
// kept conforming by splitting any segment whose diametral circle holds a
// vertex. Domain membership is decided on the exact geometry (square, notch
// axis half-plane, stadium), not on the discretized loops.

#include "mfp/specimen.hpp"

#include "mfp/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>

namespace mfp {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

struct Triangle {
    std::array<int, 3> v{};
    Vec2 center;
    double radius2 = 0.0;
    bool alive = true;
    bool in_domain = false;
};

struct Curve {
    bool arc = false;
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

struct Segment {
    int a = 0;
    int b = 0;
    int curve = -1; // -1: straight line
    bool slot = false;
};

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

class Refiner {
public:
    using DomainFn = std::function<bool(const Vec2&)>;
    using SizeFn = std::function<double(const Vec2&)>;

    Refiner(DomainFn domain, SizeFn size, double radius_edge_bound, double size_factor, std::size_t max_vertices)
        : domain_(std::move(domain)), size_(std::move(size)), radius_edge_bound_(radius_edge_bound),
          size_factor_(size_factor), max_vertices_(max_vertices)
    {
    }

    void set_bounding_box(const Vec2& lo, const Vec2& hi)
    {
        const Vec2 c = 0.5 * (lo + hi);
        const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
        const double r = 20.0 * span;
        points_.push_back(c + Vec2(-r, -r));
        points_.push_back(c + Vec2(r, -r));
        points_.push_back(c + Vec2(0.0, r));
        add_triangle(0, 1, 2);
    }

    int add_curve(const Curve& curve)
    {
        curves_.push_back(curve);
        return static_cast<int>(curves_.size()) - 1;
    }

    int insert(const Vec2& p)
    {
        if (points_.size() >= max_vertices_ + 3) {
            throw MeshError("mesh refinement exceeded " + std::to_string(max_vertices_) + " vertices near (" +
                            std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")");
        }
        const int id = static_cast<int>(points_.size());
        points_.push_back(p);

        std::vector<std::size_t> cavity;
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const Triangle& tri = triangles_[t];
            if (tri.alive && (p - tri.center).squaredNorm() < tri.radius2) {
                cavity.push_back(t);
            }
        }
        // Shrink the cavity until it is star-shaped around p.
        std::vector<std::array<int, 2>> boundary;
        while (true) {
            std::unordered_map<std::uint64_t, int> count;
            for (const std::size_t t : cavity) {
                const auto& v = triangles_[t].v;
                for (int k = 0; k < 3; ++k) {
                    ++count[edge_key(v[k], v[(k + 1) % 3])];
                }
            }
            boundary.clear();
            std::optional<std::size_t> offending;
            for (std::size_t ci = 0; ci < cavity.size() && !offending; ++ci) {
                const auto& v = triangles_[cavity[ci]].v;
                for (int k = 0; k < 3; ++k) {
                    const int a = v[k];
                    const int b = v[(k + 1) % 3];
                    if (count[edge_key(a, b)] != 1) {
                        continue;
                    }
                    if (!(orient(points_[static_cast<std::size_t>(a)], points_[static_cast<std::size_t>(b)], p) > 0.0)) {
                        offending = ci;
                        break;
                    }
                    boundary.push_back({a, b});
                }
            }
            if (!offending) {
                break;
            }
            cavity.erase(cavity.begin() + static_cast<std::ptrdiff_t>(*offending));
            if (cavity.empty()) {
                throw MeshError("point insertion failed at (" + std::to_string(p.x()) + ", " +
                                std::to_string(p.y()) + ")");
            }
        }
        for (const std::size_t t : cavity) {
            triangles_[t].alive = false;
            ++dead_;
        }
        for (const auto& e : boundary) {
            add_triangle(e[0], e[1], id);
        }
        if (dead_ > triangles_.size() / 2 + 64) {
            compact();
        }
        return id;
    }

    int add_segment(int a, int b, int curve, bool slot)
    {
        segments_.push_back({a, b, curve, slot});
        return static_cast<int>(segments_.size()) - 1;
    }

    /// Splits segments until each is a Delaunay edge with an empty diametral
    /// circle.
    void recover_segments()
    {
        bool changed = true;
        while (changed) {
            changed = false;
            const auto apexes = edge_apexes();
            const std::size_t count = segments_.size();
            for (std::size_t s = 0; s < count; ++s) {
                const Segment seg = segments_[s];
                const auto it = apexes.find(edge_key(seg.a, seg.b));
                bool split = it == apexes.end();
                if (!split) {
                    for (const int apex : it->second) {
                        if (apex >= 3 && encroaches(points_[static_cast<std::size_t>(apex)], seg)) {
                            split = true;
                            break;
                        }
                    }
                }
                if (split) {
                    split_segment(s);
                    changed = true;
                }
            }
        }
    }

    void refine()
    {
        while (true) {
            std::optional<std::size_t> worst;
            double worst_ratio = 1.0;
            for (std::size_t t = 0; t < triangles_.size(); ++t) {
                const Triangle& tri = triangles_[t];
                if (!tri.alive || !tri.in_domain) {
                    continue;
                }
                const double ratio = badness(tri);
                if (ratio > worst_ratio) {
                    worst_ratio = ratio;
                    worst = t;
                }
            }
            if (!worst) {
                return;
            }
            const Vec2 c = triangles_[*worst].center;
            std::vector<std::size_t> encroached;
            for (std::size_t s = 0; s < segments_.size(); ++s) {
                if (encroaches(c, segments_[s])) {
                    encroached.push_back(s);
                }
            }
            if (!encroached.empty()) {
                for (const std::size_t s : encroached) {
                    split_segment(s);
                }
                recover_segments();
                continue;
            }
            if (!domain_(c)) {
                split_segment(nearest_segment(c));
                recover_segments();
                continue;
            }
            insert(c);
        }
    }

    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<Segment>& segments() const { return segments_; }

    std::vector<std::array<int, 3>> domain_triangles() const
    {
        std::vector<std::array<int, 3>> out;
        for (const auto& tri : triangles_) {
            if (tri.alive && tri.in_domain) {
                out.push_back(tri.v);
            }
        }
        return out;
    }

private:
    void add_triangle(int a, int b, int c)
    {
        Triangle tri;
        tri.v = {a, b, c};
        const Vec2& pa = points_[static_cast<std::size_t>(a)];
        const Vec2& pb = points_[static_cast<std::size_t>(b)];
        const Vec2& pc = points_[static_cast<std::size_t>(c)];
        const Vec2 ab = pb - pa;
        const Vec2 ac = pc - pa;
        const double d = 2.0 * cross(ab, ac);
        const Vec2 rel((ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d,
                       (ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / d);
        tri.center = pa + rel;
        tri.radius2 = rel.squaredNorm();
        tri.in_domain = a >= 3 && b >= 3 && c >= 3 && domain_((pa + pb + pc) / 3.0);
        triangles_.push_back(tri);
    }

    void compact()
    {
        std::erase_if(triangles_, [](const Triangle& t) { return !t.alive; });
        dead_ = 0;
    }

    double badness(const Triangle& tri) const
    {
        const Vec2& a = points_[static_cast<std::size_t>(tri.v[0])];
        const Vec2& b = points_[static_cast<std::size_t>(tri.v[1])];
        const Vec2& c = points_[static_cast<std::size_t>(tri.v[2])];
        const double shortest2 = std::min({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
        const double radius = std::sqrt(tri.radius2);
        const double quality = radius / std::sqrt(shortest2) / radius_edge_bound_;
        const double size = radius / (size_factor_ * size_((a + b + c) / 3.0));
        return std::max(quality, size);
    }

    bool encroaches(const Vec2& p, const Segment& seg) const
    {
        const Vec2& a = points_[static_cast<std::size_t>(seg.a)];
        const Vec2& b = points_[static_cast<std::size_t>(seg.b)];
        // Strictly inside the diametral circle: angle apb > 90 degrees.
        return (a - p).dot(b - p) < -1e-12 * (b - a).squaredNorm();
    }

    std::size_t nearest_segment(const Vec2& p) const
    {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < segments_.size(); ++s) {
            const Vec2& a = points_[static_cast<std::size_t>(segments_[s].a)];
            const Vec2& b = points_[static_cast<std::size_t>(segments_[s].b)];
            const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
            const double d = (a + t * (b - a) - p).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = s;
            }
        }
        return best;
    }

    void split_segment(std::size_t s)
    {
        const Segment seg = segments_[s];
        const Vec2& a = points_[static_cast<std::size_t>(seg.a)];
        const Vec2& b = points_[static_cast<std::size_t>(seg.b)];
        Vec2 mid = 0.5 * (a + b);
        if (seg.curve >= 0 && curves_[static_cast<std::size_t>(seg.curve)].arc) {
            const Curve& arc = curves_[static_cast<std::size_t>(seg.curve)];
            mid = arc.center + arc.radius * (mid - arc.center).normalized();
        }
        const int m = insert(mid);
        segments_[s].b = m;
        segments_.push_back({m, seg.b, seg.curve, seg.slot});
    }

    std::unordered_map<std::uint64_t, std::vector<int>> edge_apexes() const
    {
        std::unordered_map<std::uint64_t, std::vector<int>> apexes;
        for (const auto& tri : triangles_) {
            if (!tri.alive) {
                continue;
            }
            for (int k = 0; k < 3; ++k) {
                apexes[edge_key(tri.v[k], tri.v[(k + 1) % 3])].push_back(tri.v[(k + 2) % 3]);
            }
        }
        return apexes;
    }

    DomainFn domain_;
    SizeFn size_;
    double radius_edge_bound_;
    double size_factor_;
    std::size_t max_vertices_;
    std::vector<Vec2> points_;
    std::vector<Triangle> triangles_;
    std::size_t dead_ = 0;
    std::vector<Curve> curves_;
    std::vector<Segment> segments_;
};

// Boundary loop piece: a straight line or a circular arc traversed from
// `from` to `to`.
struct Piece {
    Vec2 from;
    Vec2 to;
    std::optional<Curve> arc;
    double arc_start = 0.0; // angles for arcs
    double arc_end = 0.0;
    bool slot = false;
};

Piece line(const Vec2& a, const Vec2& b, bool slot = false) { return Piece{a, b, std::nullopt, 0.0, 0.0, slot}; }

Piece arc(const Vec2& center, double radius, double start, double end, const Vec2& from, const Vec2& to)
{
    return Piece{from, to, Curve{true, center, radius}, start, end, true};
}

// Graded subdivision of a straight piece: interior stations follow the size
// field, then get rescaled to land exactly on the end point.
std::vector<Vec2> discretize(const Piece& piece, const std::function<double(const Vec2&)>& size)
{
    std::vector<Vec2> pts;
    if (piece.arc) {
        const double radius = piece.arc->radius;
        const double sweep = piece.arc_end - piece.arc_start;
        const Vec2 mid = piece.arc->center + radius * Vec2(std::cos(piece.arc_start + 0.5 * sweep),
                                                           std::sin(piece.arc_start + 0.5 * sweep));
        const double h = size(mid);
        const int n = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) * radius / h)));
        pts.push_back(piece.from);
        for (int k = 1; k < n; ++k) {
            const double t = piece.arc_start + sweep * k / n;
            pts.push_back(piece.arc->center + radius * Vec2(std::cos(t), std::sin(t)));
        }
        return pts;
    }
    const Vec2 d = piece.to - piece.from;
    const double length = d.norm();
    std::vector<double> stations{0.0};
    while (stations.back() < length) {
        const double s = stations.back();
        const Vec2 p = piece.from + (s / length) * d;
        double h = size(p);
        // Second pass at the tentative midpoint keeps spacing symmetric in grading.
        h = size(piece.from + (std::min(s + 0.5 * h, length) / length) * d);
        stations.push_back(s + h);
    }
    // Snap the last station: drop it if the remainder is short.
    if (stations.size() > 2 && stations.back() - length > 0.5 * (stations.back() - stations[stations.size() - 2])) {
        stations.pop_back();
    }
    const double scale = length / stations.back();
    for (std::size_t k = 0; k + 1 < stations.size(); ++k) {
        pts.push_back(piece.from + (stations[k] * scale / length) * d);
    }
    return pts;
}

struct HalfMesh {
    std::vector<Vec2> points;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Segment> segments;
};

HalfMesh triangulate_loops(const std::vector<std::vector<Piece>>& loops, const Refiner::DomainFn& domain,
                           const Refiner::SizeFn& size, const Vec2& lo, const Vec2& hi)
{
    Refiner refiner(domain, size, 1.25, 0.85, 400000);
    refiner.set_bounding_box(lo, hi);
    for (const auto& loop : loops) {
        std::vector<int> ids;
        std::vector<int> curve_of;
        std::vector<bool> slot_of;
        for (const Piece& piece : loop) {
            const int curve = piece.arc ? refiner.add_curve(*piece.arc) : -1;
            for (const Vec2& p : discretize(piece, size)) {
                ids.push_back(refiner.insert(p));
                curve_of.push_back(curve);
                slot_of.push_back(piece.slot);
            }
        }
        for (std::size_t k = 0; k < ids.size(); ++k) {
            refiner.add_segment(ids[k], ids[(k + 1) % ids.size()], curve_of[k], slot_of[k]);
        }
    }
    refiner.recover_segments();
    refiner.refine();

    HalfMesh out;
    out.points = refiner.points();
    out.triangles = refiner.domain_triangles();
    out.segments = refiner.segments();
    return out;
}

} // namespace

Mesh build_mesh(const ExperimentDescriptor& desc, double target_edge_length)
{
    if (!(target_edge_length >= 0.25 && target_edge_length <= 10.0)) {
        throw ArgumentError("build_mesh: target_edge_length must lie in [0.25, 10] mm");
    }
    const double a = 0.5 * desc.side_length;
    const SlotGeometry slot = slot_geometry(desc);
    const double H = target_edge_length;
    const double w = slot.half_width;
    const double half = slot.half_length;
    const double core = half - w;
    const Vec2 u = slot.axis;
    const Vec2 n = slot.normal;
    const Vec2 tip_lo = -half * u;
    const Vec2 tip_hi = half * u;

    const double h_tip = H / 8.0;
    const double h_side = 0.3 * H;
    const double grading = 0.3;
    // Uniform h_tip over a small disc so that edges leaving the tip stay short.
    const double tip_disc = 0.5;
    auto size = [=](const Vec2& p) {
        if (!slot.present()) {
            return H;
        }
        const double d_tip = std::min((p - tip_lo).norm(), (p - tip_hi).norm());
        const double d_slot = std::max(0.0, slot.distance_to_notch(p) - w);
        return std::min({H, h_tip + grading * std::max(0.0, d_tip - tip_disc), h_side + grading * d_slot});
    };

    const bool mirrored = !slot.present() || desc.notch_angle == 45.0;
    auto inside_square = [a](const Vec2& p) { return std::abs(p.x()) < a && std::abs(p.y()) < a; };
    auto domain = [=](const Vec2& p) {
        if (!inside_square(p) || slot.contains(p)) {
            return false;
        }
        return !mirrored || p.y() > p.x();
    };

    const Vec2 c00(-a, -a), c10(a, -a), c11(a, a), c01(-a, a);
    std::vector<std::vector<Piece>> loops;
    const double axis_angle = std::atan2(u.y(), u.x());
    if (mirrored) {
        std::vector<Piece> loop;
        if (slot.present()) {
            // Upper half of the slot, traversed with the material on the left.
            const Vec2 side_lo = -core * u + w * n;
            const Vec2 side_hi = core * u + w * n;
            loop.push_back(line(c00, tip_lo));
            loop.push_back(arc(-core * u, w, axis_angle + std::numbers::pi, axis_angle + 0.5 * std::numbers::pi,
                               tip_lo, side_lo));
            loop.push_back(line(side_lo, side_hi, true));
            loop.push_back(arc(core * u, w, axis_angle + 0.5 * std::numbers::pi, axis_angle, side_hi, tip_hi));
            loop.push_back(line(tip_hi, c11));
        } else {
            loop.push_back(line(c00, c11));
        }
        loop.push_back(line(c11, c01));
        loop.push_back(line(c01, c00));
        loops.push_back(std::move(loop));
    } else {
        loops.push_back({line(c00, c10), line(c10, c11), line(c11, c01), line(c01, c00)});
        const Vec2 s0 = -core * u - w * n;
        const Vec2 s1 = core * u - w * n;
        const Vec2 s2 = core * u + w * n;
        const Vec2 s3 = -core * u + w * n;
        const double pi = std::numbers::pi;
        loops.push_back({
            line(s0, s1, true),
            arc(core * u, w, axis_angle - 0.5 * pi, axis_angle + 0.5 * pi, s1, s2),
            line(s2, s3, true),
            arc(-core * u, w, axis_angle + 0.5 * pi, axis_angle + 1.5 * pi, s3, s0),
        });
    }

    const HalfMesh half_mesh = triangulate_loops(loops, domain, size, c00, c11);

    // Compact vertex numbering in order of first use.
    std::vector<int> remap(half_mesh.points.size(), -1);
    std::vector<Vec2> corners;
    std::vector<std::array<int, 3>> tris;
    auto vertex = [&](int v) {
        auto& slot_id = remap[static_cast<std::size_t>(v)];
        if (slot_id < 0) {
            slot_id = static_cast<int>(corners.size());
            corners.push_back(half_mesh.points[static_cast<std::size_t>(v)]);
        }
        return slot_id;
    };
    for (const auto& t : half_mesh.triangles) {
        tris.push_back({vertex(t[0]), vertex(t[1]), vertex(t[2])});
    }
    std::vector<std::uint64_t> slot_edges;
    for (const auto& seg : half_mesh.segments) {
        if (seg.slot && remap[static_cast<std::size_t>(seg.a)] >= 0 && remap[static_cast<std::size_t>(seg.b)] >= 0) {
            slot_edges.push_back(edge_key(remap[static_cast<std::size_t>(seg.a)], remap[static_cast<std::size_t>(seg.b)]));
        }
    }

    if (mirrored) {
        const std::size_t half_count = corners.size();
        std::vector<int> image(half_count);
        for (std::size_t v = 0; v < half_count; ++v) {
            const Vec2 p = corners[v];
            if (p.x() == p.y()) {
                image[v] = static_cast<int>(v);
            } else {
                image[v] = static_cast<int>(corners.size());
                corners.emplace_back(p.y(), p.x());
            }
        }
        const std::size_t half_tris = tris.size();
        for (std::size_t t = 0; t < half_tris; ++t) {
            const auto& tri = tris[t];
            tris.push_back({image[static_cast<std::size_t>(tri[0])], image[static_cast<std::size_t>(tri[2])],
                            image[static_cast<std::size_t>(tri[1])]});
        }
        const std::size_t half_edges = slot_edges.size();
        for (std::size_t e = 0; e < half_edges; ++e) {
            const int lo_v = static_cast<int>(slot_edges[e] & 0xffffffffULL);
            const int hi_v = static_cast<int>(slot_edges[e] >> 32);
            slot_edges.push_back(edge_key(image[static_cast<std::size_t>(lo_v)], image[static_cast<std::size_t>(hi_v)]));
        }
    }
    std::sort(slot_edges.begin(), slot_edges.end());

    Mesh mesh;
    mesh.nodes = corners;
    std::map<std::uint64_t, int> midside;
    std::vector<char> slot_node(corners.size(), 0);
    for (const auto& tri : tris) {
        std::array<int, 6> element{tri[0], tri[1], tri[2], 0, 0, 0};
        for (int k = 0; k < 3; ++k) {
            const int p = tri[static_cast<std::size_t>(k)];
            const int q = tri[static_cast<std::size_t>((k + 1) % 3)];
            const std::uint64_t key = edge_key(p, q);
            auto [it, inserted] = midside.try_emplace(key, static_cast<int>(mesh.nodes.size()));
            if (inserted) {
                mesh.nodes.push_back(0.5 * (mesh.nodes[static_cast<std::size_t>(p)] + mesh.nodes[static_cast<std::size_t>(q)]));
                const bool on_slot = std::binary_search(slot_edges.begin(), slot_edges.end(), key);
                slot_node.push_back(on_slot ? 1 : 0);
                if (on_slot) {
                    slot_node[static_cast<std::size_t>(p)] = 1;
                    slot_node[static_cast<std::size_t>(q)] = 1;
                }
            }
            element[static_cast<std::size_t>(3 + k)] = it->second;
        }
        mesh.elements.push_back(element);
    }

    mesh.boundary_tags.assign(mesh.nodes.size(), EdgeNone);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Vec2& p = mesh.nodes[i];
        std::uint8_t tag = EdgeNone;
        if (p.x() == -a) tag |= EdgeLeft;
        if (p.x() == a) tag |= EdgeRight;
        if (p.y() == -a) tag |= EdgeBottom;
        if (p.y() == a) tag |= EdgeTop;
        mesh.boundary_tags[i] = tag;
        if (slot_node[i]) {
            mesh.slot_face_nodes.push_back(static_cast<int>(i));
        }
    }

    if (!(min_element_jacobian(mesh) > 0.0)) {
        throw MeshError("build_mesh: produced an inverted or degenerate element");
    }
    return mesh;
}

} // namespace mfp
