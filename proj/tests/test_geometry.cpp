#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pinch/geometry.hpp"

using namespace pinch;

namespace {

constexpr double mm = 1e-3;
constexpr double mm3 = 1e-9;

double triangle_volume_error(double h)
{
    const Shape tri = make_triangle(12 * std::sqrt(3.0) * mm, 3 * mm);
    return std::abs(mesh_shape(tri, h).total_volume() - solid_volume(tri));
}

void expect_same_centroids(const Mesh& a, const Mesh& b, double tol)
{
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_NEAR(a.voxels[i].centroid.x, b.voxels[i].centroid.x, tol);
        EXPECT_NEAR(a.voxels[i].centroid.y, b.voxels[i].centroid.y, tol);
        EXPECT_NEAR(a.voxels[i].centroid.z, b.voxels[i].centroid.z, tol);
    }
}

} // namespace

TEST(Square, TwelveMillimeterPlateVolume)
{
    const Shape sq = make_square(12 * mm, 3 * mm);
    EXPECT_NEAR(solid_volume(sq) / mm3, 432.0, 1e-9);
}

TEST(Square, VolumeIsSideSquaredTimesThickness)
{
    for (double s : {0.5, 3.0, 7.25})
    {
        for (double t : {0.1, 2.0})
            EXPECT_DOUBLE_EQ(solid_volume(make_square(s, t)), s * s * t);
    }
}

TEST(Square, OneMillimeterMeshIsExact)
{
    const Mesh m = mesh_shape(make_square(12 * mm, 3 * mm), 1 * mm);
    EXPECT_EQ(m.size(), 432u);
    EXPECT_NEAR(m.total_volume() / mm3, 432.0, 1e-9);
    for (const auto& v : m.voxels)
        EXPECT_GT(v.volume, 0);
}

TEST(Square, RejectsNonPositiveDimensions)
{
    EXPECT_THROW(make_square(0, 1), InvalidArgument);
    EXPECT_THROW(make_square(1, -1), InvalidArgument);
}

TEST(Triangle, DefaultPlateAreaAndVolume)
{
    const Shape tri = make_triangle(12 * std::sqrt(3.0) * mm, 3 * mm);
    EXPECT_NEAR(footprint_area(tri.footprint) / (mm * mm), 108 * std::sqrt(3.0), 1e-9);
    EXPECT_NEAR(footprint_area(tri.footprint) / (mm * mm), 187.06, 0.01);
    EXPECT_NEAR(solid_volume(tri) / mm3, 561.18, 0.01);
}

TEST(Triangle, DegenerateSideRejected)
{
    EXPECT_THROW(make_triangle(0, 3 * mm), InvalidArgument);
}

TEST(Triangle, CentroidAtOrigin)
{
    const auto v = Triangle{2.0}.vertices();
    EXPECT_NEAR((v[0].x + v[1].x + v[2].x) / 3, 0, 1e-15);
    EXPECT_NEAR((v[0].y + v[1].y + v[2].y) / 3, 0, 1e-15);
    EXPECT_NEAR(v[1].y, v[2].y, 1e-15); // base parallel to x
    EXPECT_NEAR(std::hypot(v[1].x - v[2].x, v[1].y - v[2].y), 2.0, 1e-14);
}

TEST(Triangle, MeshVolumeErrorDecreasesMonotonically)
{
    const double e1 = triangle_volume_error(1 * mm);
    const double e05 = triangle_volume_error(0.5 * mm);
    const double e025 = triangle_volume_error(0.25 * mm);
    EXPECT_GT(e1, e05);
    EXPECT_GT(e05, e025);
}

TEST(Triangle, MeshVolumeErrorHalvesWithVoxelSize)
{
    // Error halves (within a factor 1.5) each time the voxel size halves.
    const std::vector<double> h{1 * mm, 0.5 * mm, 0.25 * mm};
    for (std::size_t i = 0; i + 1 < h.size(); ++i)
    {
        const double ratio = triangle_volume_error(h[i]) / triangle_volume_error(h[i + 1]);
        EXPECT_GE(ratio, 2.0 / 1.5) << "h = " << h[i];
        EXPECT_LE(ratio, 2.0 * 1.5) << "h = " << h[i];
    }
}

TEST(Mesh, VolumeErrorBoundedByBoundaryLayer)
{
    // Only cells straddling the lateral boundary can be misclassified, so
    // |error| <= perimeter * thickness * h (a first-order bound).
    const double s = 12 * std::sqrt(3.0) * mm;
    const double t = 3 * mm;
    const Shape tri = make_triangle(s, t);
    const Shape arc = make_arc(15 * mm, 9 * mm, deg_to_rad(120), t, 0.3);
    const double arc_perimeter = (15 + 9) * mm * deg_to_rad(120) + 2 * 6 * mm;
    for (double h : {1 * mm, 0.5 * mm, 0.25 * mm, 0.125 * mm})
    {
        EXPECT_LE(std::abs(mesh_shape(tri, h).total_volume() - solid_volume(tri)), 3 * s * t * h) << h;
        EXPECT_LE(std::abs(mesh_shape(arc, h).total_volume() - solid_volume(arc)), arc_perimeter * t * h) << h;
    }
}

TEST(Arc, HalfMillimeterVolumeWithinFivePercent)
{
    const Shape arc = make_arc(15 * mm, 9 * mm, deg_to_rad(120), 3 * mm, 0);
    const double analytic = (15.0 * 15.0 - 9.0 * 9.0) * deg_to_rad(120) / 2 * 3.0;
    EXPECT_NEAR(solid_volume(arc) / mm3, analytic, 1e-9);
    const double meshed = mesh_shape(arc, 0.5 * mm).total_volume() / mm3;
    EXPECT_LT(std::abs(meshed - analytic) / analytic, 0.05);
}

TEST(Arc, FullDiscLimit)
{
    const double r = 10 * mm;
    const double t = 2 * mm;
    const Shape disc = make_arc(r, 1e-6, two_pi, t, 0);
    const double analytic = pi * r * r * t;
    EXPECT_NEAR(solid_volume(disc), analytic, analytic * 1e-7);
    auto err = [&](double h) { return std::abs(mesh_shape(disc, h).total_volume() - analytic) / analytic; };
    EXPECT_LT(err(0.25 * mm), 1e-3);
    EXPECT_LT(err(0.125 * mm), 2e-4);
}

TEST(Arc, FullTurnRotationIsIdentity)
{
    const Mesh a = mesh_shape(make_arc(15 * mm, 9 * mm, deg_to_rad(120), 3 * mm, 0), 0.5 * mm);
    const Mesh b = mesh_shape(make_arc(15 * mm, 9 * mm, deg_to_rad(120), 3 * mm, two_pi), 0.5 * mm);
    expect_same_centroids(a, b, 1e-12);
}

TEST(Arc, InvalidParametersRejected)
{
    EXPECT_THROW(make_arc(9 * mm, 9 * mm, 1, 1 * mm, 0), InvalidArgument);
    EXPECT_THROW(make_arc(15 * mm, 0, 1, 1 * mm, 0), InvalidArgument);
    EXPECT_THROW(make_arc(15 * mm, 9 * mm, 0, 1 * mm, 0), InvalidArgument);
    EXPECT_THROW(make_arc(15 * mm, 9 * mm, two_pi + 0.1, 1 * mm, 0), InvalidArgument);
}

TEST(Arc, BisectorPointsDown)
{
    const Shape arc = make_arc(15 * mm, 9 * mm, deg_to_rad(120), 3 * mm, 0);
    EXPECT_TRUE(shape_contains(arc, {0, -12 * mm, 0}));
    EXPECT_FALSE(shape_contains(arc, {0, 12 * mm, 0}));
    const Shape rotated = make_arc(15 * mm, 9 * mm, deg_to_rad(120), 3 * mm, pi / 2);
    EXPECT_TRUE(shape_contains(rotated, {12 * mm, 0, 0}));
}

TEST(Polygon, MatchesSquare)
{
    const double h = 6 * mm;
    const Shape poly = make_polygon({{-h, -h}, {h, -h}, {h, h}, {-h, h}}, 3 * mm);
    const Mesh a = mesh_shape(poly, 1 * mm);
    const Mesh b = mesh_shape(make_square(12 * mm, 3 * mm), 1 * mm);
    expect_same_centroids(a, b, 0);
}

TEST(Polygon, ClockwiseInputAccepted)
{
    const Shape poly = make_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, 0.5);
    EXPECT_DOUBLE_EQ(footprint_area(poly.footprint), 1.0);
}

TEST(Polygon, SelfIntersectingRejected)
{
    EXPECT_THROW(make_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, 1), InvalidArgument);
    EXPECT_THROW(make_polygon({{0, 0}, {1, 0}, {2, 0}}, 1), InvalidArgument);
    EXPECT_THROW(make_polygon({{0, 0}, {1, 0}}, 1), InvalidArgument);
}

TEST(Transform, IdentityLeavesVoxelsUnchanged)
{
    const Shape tri = make_triangle(20 * mm, 3 * mm);
    expect_same_centroids(mesh_shape(tri, 0.5 * mm), mesh_shape(transform_shape(tri, 0, {}), 0.5 * mm), 0);
}

TEST(Transform, TranslationShiftsEveryCentroidExactly)
{
    const Shape sq = make_square(12 * mm, 3 * mm);
    const Vec3 t{0, 0, 4 * mm};
    const Mesh a = mesh_shape(sq, 1 * mm);
    const Mesh b = mesh_shape(transform_shape(sq, 0, t), 1 * mm);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(b.voxels[i].centroid.x, a.voxels[i].centroid.x);
        EXPECT_EQ(b.voxels[i].centroid.y, a.voxels[i].centroid.y);
        EXPECT_EQ(b.voxels[i].centroid.z, a.voxels[i].centroid.z + t.z);
    }
}

TEST(Transform, SuccessiveRotationsCompose)
{
    const Shape tri = make_triangle(20 * mm, 3 * mm);
    const double beta = 0.3;
    const double gamma = 1.1;
    const Mesh two = mesh_shape(transform_shape(transform_shape(tri, beta, {}), gamma, {}), 0.5 * mm);
    const Mesh one = mesh_shape(transform_shape(tri, beta + gamma, {}), 0.5 * mm);
    expect_same_centroids(two, one, 1e-12);
}

TEST(Transform, PreservesCountAndVolume)
{
    const Shape arc = make_arc(15 * mm, 9 * mm, deg_to_rad(120), 3 * mm, 0.4);
    const Mesh a = mesh_shape(arc, 0.5 * mm);
    const Mesh b = mesh_shape(transform_shape(arc, 2.2, {0.1, -0.3, 0.05}), 0.5 * mm);
    EXPECT_EQ(a.size(), b.size());
    EXPECT_EQ(a.total_volume(), b.total_volume());
    for (const auto& v : b.voxels)
        EXPECT_TRUE(shape_contains(transform_shape(arc, 2.2, {0.1, -0.3, 0.05}), v.centroid));
}

TEST(Mesh, DeterministicBitIdentical)
{
    const Shape tri = transform_shape(make_triangle(20 * mm, 3 * mm), 0.7, {1e-3, 2e-3, 3e-3});
    const Mesh a = mesh_shape(tri, 0.5 * mm);
    const Mesh b = mesh_shape(tri, 0.5 * mm);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a.voxels[i].centroid, b.voxels[i].centroid);
        EXPECT_EQ(a.voxels[i].volume, b.voxels[i].volume);
    }
}

TEST(Mesh, CentroidsInsideSolid)
{
    const Shape tri = make_triangle(20 * mm, 3 * mm);
    for (const auto& v : mesh_shape(tri, 0.5 * mm).voxels)
        EXPECT_TRUE(shape_contains(tri, v.centroid));
}

TEST(Mesh, OrderIsLexicographicByGridIndex)
{
    const Mesh m = mesh_shape(make_square(4 * mm, 2 * mm), 1 * mm);
    for (std::size_t i = 1; i < m.size(); ++i)
    {
        const Vec3 a = m.voxels[i - 1].centroid;
        const Vec3 b = m.voxels[i].centroid;
        EXPECT_TRUE(a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && a.z < b.z))));
    }
}

TEST(Mesh, RejectsOversizedVoxels)
{
    EXPECT_THROW(mesh_shape(make_square(12 * mm, 3 * mm), 4 * mm), InvalidArgument);
    EXPECT_THROW(mesh_shape(make_arc(15 * mm, 9 * mm, 1, 10 * mm, 0), 7 * mm), InvalidArgument);
    EXPECT_THROW(mesh_shape(make_square(12 * mm, 3 * mm), 0), InvalidArgument);
}

TEST(Support, SquareAndArcExtremes)
{
    const Shape sq = transform_shape(make_square(2, 1), 0, {5, 0, 0});
    EXPECT_DOUBLE_EQ(footprint_support_min(sq, {1, 0}), 4.0);
    const Shape arc = make_arc(15, 9, deg_to_rad(120), 1, 0);
    EXPECT_DOUBLE_EQ(footprint_support_min(arc, {0, 1}), -15.0);
    EXPECT_NEAR(footprint_support_min(arc, {0, -1}), 9 * std::cos(deg_to_rad(60)), 1e-12);
}
