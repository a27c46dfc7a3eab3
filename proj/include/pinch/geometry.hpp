// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Pinching-antenna block shapes: extruded 2D footprints with a rigid placement,
// and their uniform voxel discretization.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "pinch/constants.hpp"
#include "pinch/error.hpp"
#include "pinch/vector.hpp"

namespace pinch {

//---------------------------------------------------------------------------//
// Footprints. Each is defined in the shape's local frame: the footprint lies
// in the local xy plane and is extruded symmetrically along local z.
//---------------------------------------------------------------------------//

//! Axis-aligned square centered on the local origin.
struct Square
{
    double side;
};

//! Equilateral triangle centered on its centroid, one side parallel to local
//! x below the origin, the opposite vertex on +y.
struct Triangle
{
    double side;

    std::array<Vec2, 3> vertices() const
    {
        const double r = side / std::sqrt(3.0);
        std::array<Vec2, 3> v;
        for (int i = 0; i < 3; ++i)
        {
            const double a = pi / 2 + i * (2 * pi / 3);
            v[i] = {r * std::cos(a), r * std::sin(a)};
        }
        return v;
    }
};

//! Annular sector whose circle center is the local origin. The sector's
//! bisector points along local -y; `span` is the full opening angle.
struct ArcSector
{
    double outer_radius;
    double inner_radius;
    double span;

    static constexpr double bisector = -pi / 2;
};

//! Simple polygon, counter-clockwise after construction.
struct Polygon
{
    std::vector<Vec2> vertices;
};

using Footprint = std::variant<Square, Triangle, ArcSector, Polygon>;

//! Rotation about the global z axis followed by a translation.
struct RigidTransform
{
    double rotation = 0; // rad
    Vec3 translation{};

    Vec3 apply(Vec3 p) const
    {
        const Vec2 r = rotate({p.x, p.y}, rotation);
        return {r.x + translation.x, r.y + translation.y, p.z + translation.z};
    }

    //! The transform equivalent to applying `*this` first, then `after`.
    RigidTransform then(const RigidTransform& after) const
    {
        const Vec2 t = rotate({translation.x, translation.y}, after.rotation);
        return {rotation + after.rotation,
                {t.x + after.translation.x,
                 t.y + after.translation.y,
                 translation.z + after.translation.z}};
    }
};

struct Shape
{
    Footprint footprint;
    double thickness; // m, along local z
    RigidTransform transform;
};

struct Voxel
{
    Vec3 centroid; // global frame, m
    double volume; // m^3
};

struct Mesh
{
    std::vector<Voxel> voxels;
    double nominal_voxel_size = 0;

    std::size_t size() const { return voxels.size(); }
    bool empty() const { return voxels.empty(); }

    double total_volume() const
    {
        CompensatedSum s;
        for (const auto& v : voxels)
            s.add(v.volume);
        return s.value();
    }
};

namespace detail {

inline double polygon_signed_area(const std::vector<Vec2>& v)
{
    CompensatedSum s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s.add(cross(v[i], v[(i + 1) % v.size()]));
    return 0.5 * s.value();
}

inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        const double o = cross(b - a, c - a);
        return (o > 0) - (o < 0);
    };
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x)
               && std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2))
           || (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

inline bool polygon_is_simple(const std::vector<Vec2>& v)
{
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n; ++j)
        {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent)
            {
                // Adjacent edges may only share their common vertex; reject
                // exact reversals (zero-angle spikes).
                const Vec2 a = v[(i + 1) % n] - v[i];
                const Vec2 b = v[(j + 1) % n] - v[j];
                if (cross(a, b) == 0 && dot(a, b) < 0)
                    return false;
                continue;
            }
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

//! Even-odd crossing test; points exactly on an edge count as inside on
//! bottom/left edges only (half-open convention).
inline bool point_in_polygon(const std::vector<Vec2>& v, Vec2 p)
{
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
    {
        const Vec2 a = v[i];
        const Vec2 b = v[j];
        if ((a.y > p.y) != (b.y > p.y))
        {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

//! Angle of `a` relative to `ref`, wrapped to [-pi, pi).
inline double relative_angle(double a, double ref)
{
    double d = std::fmod(a - ref + pi, two_pi);
    if (d < 0)
        d += two_pi;
    return d - pi;
}

inline bool arc_angle_inside(const ArcSector& arc, double angle)
{
    if (arc.span >= two_pi)
        return true;
    return std::abs(relative_angle(angle, ArcSector::bisector)) <= 0.5 * arc.span;
}

template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace detail

//---------------------------------------------------------------------------//
// Construction
//---------------------------------------------------------------------------//

inline Shape make_square(double side, double thickness)
{
    detail::require(side > 0, "square side must be positive");
    detail::require(thickness > 0, "thickness must be positive");
    return {Square{side}, thickness, {}};
}

inline Shape make_triangle(double side, double thickness)
{
    detail::require(side > 0, "triangle side must be positive");
    detail::require(thickness > 0, "thickness must be positive");
    return {Triangle{side}, thickness, {}};
}

//! Annular sector rotated by `rotation` about its circle center.
inline Shape
make_arc(double outer_radius, double inner_radius, double span, double thickness, double rotation)
{
    detail::require(inner_radius > 0, "arc inner radius must be positive");
    detail::require(outer_radius > inner_radius, "arc outer radius must exceed inner radius");
    detail::require(span > 0 && span <= two_pi, "arc span must be in (0, 2*pi]");
    detail::require(thickness > 0, "thickness must be positive");
    return {ArcSector{outer_radius, inner_radius, span}, thickness, {rotation, {}}};
}

//! Simple polygon footprint (either winding; stored counter-clockwise).
inline Shape make_polygon(std::vector<Vec2> vertices, double thickness)
{
    detail::require(vertices.size() >= 3, "polygon needs at least 3 vertices");
    detail::require(thickness > 0, "thickness must be positive");
    for (const auto& v : vertices)
        detail::require(std::isfinite(v.x) && std::isfinite(v.y), "polygon vertex not finite");
    detail::require(detail::polygon_is_simple(vertices), "polygon is self-intersecting");
    const double area = detail::polygon_signed_area(vertices);
    detail::require(area != 0, "polygon has zero area");
    if (area < 0)
        std::reverse(vertices.begin(), vertices.end());
    return {Polygon{std::move(vertices)}, thickness, {}};
}

//! Compose a rotation about global z and a translation onto the placement.
inline Shape transform_shape(Shape shape, double rotation, Vec3 translation)
{
    shape.transform = shape.transform.then(RigidTransform{rotation, translation});
    return shape;
}

//---------------------------------------------------------------------------//
// Analytic properties
//---------------------------------------------------------------------------//

inline double footprint_area(const Footprint& fp)
{
    return std::visit(
        detail::overloaded{
            [](const Square& s) { return s.side * s.side; },
            [](const Triangle& t) { return std::sqrt(3.0) / 4 * t.side * t.side; },
            [](const ArcSector& a) {
                return 0.5 * a.span * (a.outer_radius * a.outer_radius - a.inner_radius * a.inner_radius);
            },
            [](const Polygon& p) { return std::abs(detail::polygon_signed_area(p.vertices)); }},
        fp);
}

inline double solid_volume(const Shape& shape)
{
    return footprint_area(shape.footprint) * shape.thickness;
}

//! Membership of a local-frame footprint point.
inline bool footprint_contains(const Footprint& fp, Vec2 p)
{
    return std::visit(
        detail::overloaded{
            [&](const Square& s) {
                return std::abs(p.x) <= 0.5 * s.side && std::abs(p.y) <= 0.5 * s.side;
            },
            [&](const Triangle& t) {
                const auto v = t.vertices();
                for (int i = 0; i < 3; ++i)
                {
                    if (cross(v[(i + 1) % 3] - v[i], p - v[i]) < 0)
                        return false;
                }
                return true;
            },
            [&](const ArcSector& a) {
                const double r = std::hypot(p.x, p.y);
                if (r < a.inner_radius || r > a.outer_radius)
                    return false;
                return detail::arc_angle_inside(a, std::atan2(p.y, p.x));
            },
            [&](const Polygon& poly) { return detail::point_in_polygon(poly.vertices, p); }},
        fp);
}

//! Membership of a global-frame point in the placed solid.
inline bool shape_contains(const Shape& shape, Vec3 p)
{
    const Vec3 t = shape.transform.translation;
    const Vec2 local = rotate({p.x - t.x, p.y - t.y}, -shape.transform.rotation);
    const double z = p.z - t.z;
    return std::abs(z) <= 0.5 * shape.thickness && footprint_contains(shape.footprint, local);
}

//! Points whose convex hull contains the footprint and whose extremes along
//! any direction bound it (vertices, plus the outer-arc axis extremes).
namespace detail {
inline std::vector<Vec2> footprint_hull_points(const Footprint& fp)
{
    return std::visit(
        overloaded{
            [](const Square& s) {
                const double h = 0.5 * s.side;
                return std::vector<Vec2>{{-h, -h}, {h, -h}, {h, h}, {-h, h}};
            },
            [](const Triangle& t) {
                const auto v = t.vertices();
                return std::vector<Vec2>(v.begin(), v.end());
            },
            [](const ArcSector& a) {
                std::vector<Vec2> pts;
                if (a.span < two_pi)
                {
                    for (double edge : {ArcSector::bisector - 0.5 * a.span, ArcSector::bisector + 0.5 * a.span})
                    {
                        for (double r : {a.inner_radius, a.outer_radius})
                            pts.push_back({r * std::cos(edge), r * std::sin(edge)});
                    }
                }
                for (int q = 0; q < 4; ++q)
                {
                    const double ang = q * (pi / 2);
                    if (arc_angle_inside(a, ang))
                        pts.push_back({a.outer_radius * std::cos(ang), a.outer_radius * std::sin(ang)});
                }
                return pts;
            },
            [](const Polygon& p) { return p.vertices; }},
        fp);
}
} // namespace detail

//! Minimum of dot(q, direction) over the placed footprint (global xy).
inline double footprint_support_min(const Shape& shape, Vec2 direction)
{
    double best = std::numeric_limits<double>::infinity();
    const Vec2 t{shape.transform.translation.x, shape.transform.translation.y};
    auto consider = [&](Vec2 local) {
        best = std::min(best, dot(rotate(local, shape.transform.rotation) + t, direction));
    };
    for (const Vec2& p : detail::footprint_hull_points(shape.footprint))
        consider(p);
    if (const auto* arc = std::get_if<ArcSector>(&shape.footprint))
    {
        // Interior extreme of the outer arc: the point facing -direction.
        const Vec2 local_dir = rotate(direction, -shape.transform.rotation);
        const double ang = std::atan2(-local_dir.y, -local_dir.x);
        if (detail::arc_angle_inside(*arc, ang))
            consider({arc->outer_radius * std::cos(ang), arc->outer_radius * std::sin(ang)});
    }
    return best;
}

//---------------------------------------------------------------------------//
// Meshing
//---------------------------------------------------------------------------//

namespace detail {
struct LocalBounds
{
    Vec2 lo;
    Vec2 hi;
};

inline LocalBounds footprint_bounds(const Footprint& fp)
{
    LocalBounds b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const Vec2& p : footprint_hull_points(fp))
    {
        b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
        b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
    }
    return b;
}

//! Cell count covering `extent`, tolerant of extents that are exact
//! multiples of the cell size up to rounding.
inline long cell_count(double extent, double h)
{
    return static_cast<long>(std::ceil(extent / h - 1e-9));
}
} // namespace detail

/*!
 * Uniform Cartesian voxelization in the shape's local frame.
 *
 * The grid is centered on the footprint's bounding box and the extrusion
 * range; a cell is kept iff its center lies inside the solid. Voxels are
 * ordered lexicographically by (ix, iy, iz) and carry global centroids, so
 * rigid placement never changes voxel count or volume.
 */
inline Mesh mesh_shape(const Shape& shape, double voxel_size)
{
    detail::require(voxel_size > 0 && std::isfinite(voxel_size), "voxel size must be positive");
    const auto b = detail::footprint_bounds(shape.footprint);
    const Vec2 extent = b.hi - b.lo;
    double smallest = std::min({extent.x, extent.y, shape.thickness});
    if (const auto* arc = std::get_if<ArcSector>(&shape.footprint))
        smallest = std::min(smallest, arc->outer_radius - arc->inner_radius);
    if (voxel_size > smallest)
    {
        throw InvalidArgument("voxel size " + std::to_string(voxel_size)
                              + " m exceeds the solid's smallest extent " + std::to_string(smallest) + " m");
    }

    const long nx = detail::cell_count(extent.x, voxel_size);
    const long ny = detail::cell_count(extent.y, voxel_size);
    const long nz = detail::cell_count(shape.thickness, voxel_size);
    const Vec2 center = 0.5 * (b.lo + b.hi);
    const double x0 = center.x - 0.5 * nx * voxel_size;
    const double y0 = center.y - 0.5 * ny * voxel_size;
    const double z0 = -0.5 * nz * voxel_size;
    const double cell_volume = voxel_size * voxel_size * voxel_size;

    Mesh mesh;
    mesh.nominal_voxel_size = voxel_size;
    for (long ix = 0; ix < nx; ++ix)
    {
        const double x = x0 + (ix + 0.5) * voxel_size;
        for (long iy = 0; iy < ny; ++iy)
        {
            const double y = y0 + (iy + 0.5) * voxel_size;
            if (!footprint_contains(shape.footprint, {x, y}))
                continue;
            for (long iz = 0; iz < nz; ++iz)
            {
                const double z = z0 + (iz + 0.5) * voxel_size;
                if (std::abs(z) > 0.5 * shape.thickness)
                    continue;
                mesh.voxels.push_back({shape.transform.apply({x, y, z}), cell_volume});
            }
        }
    }
    if (mesh.empty())
        throw InvalidArgument("voxel size too coarse: mesh is empty");
    return mesh;
}

} // namespace pinch
