#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pinch/waveguide.hpp"

using namespace pinch;

namespace {

constexpr double mm = 1e-3;

WaveguideModel x_rod(double n_g = 1.4)
{
    return make_waveguide({0, 0, 0}, {1, 0, 0}, 1.5 * mm, n_g);
}

} // namespace

TEST(ModeConstants, FreeSpaceLimit)
{
    const double lambda = 5 * mm;
    const auto mc = mode_constants(1.0, lambda);
    EXPECT_EQ(mc.alpha, 0.0);
    EXPECT_DOUBLE_EQ(mc.beta_g, two_pi / lambda);
    EXPECT_DOUBLE_EQ(mc.guided_wavelength, lambda);
}

TEST(ModeConstants, UpperBoundIndex)
{
    const auto mc = mode_constants(1.449, 5 * mm);
    EXPECT_NEAR(mc.alpha * mm, 1.318, 5e-4);
    EXPECT_NEAR(mc.alpha, two_pi / (5 * mm) * std::sqrt(1.449 * 1.449 - 1), 1e-9);
    EXPECT_NEAR(mc.guided_wavelength / mm, 3.451, 5e-4);
}

TEST(ModeConstants, PropagationConstant)
{
    EXPECT_NEAR(mode_constants(1.4, 5 * mm).beta_g * mm, 1.7593, 5e-5);
}

TEST(ModeConstants, UnguidedRejected)
{
    EXPECT_THROW(mode_constants(0.99, 5 * mm), InvalidArgument);
    EXPECT_THROW(mode_constants(1.2, 0), InvalidArgument);
}

TEST(Waveguide, ModelInvariants)
{
    const auto wg = make_waveguide({0, 0, 0}, {0, 3, 4}, 1 * mm, 1.2);
    EXPECT_NEAR(norm(wg.axis_direction), 1.0, 1e-15);
    EXPECT_THROW(make_waveguide({}, {0, 0, 0}, 1 * mm, 1.2), InvalidArgument);
    EXPECT_THROW(make_waveguide({}, {1, 0, 0}, 0, 1.2), InvalidArgument);
    EXPECT_THROW(make_waveguide({}, {1, 0, 0}, 1 * mm, 1.0), InvalidArgument);
}

TEST(Evanescent, SurfaceAtFeedIsA0)
{
    const auto sig = make_signal(60e9, {0.3, -0.7});
    const auto wg = x_rod();
    const complex v = evanescent_amplitude({0, 1.5 * mm, 0}, wg, sig);
    EXPECT_EQ(v, sig.amplitude);
    // Inside the rod the distance clamps to zero.
    EXPECT_EQ(evanescent_amplitude({0, 0.5 * mm, 0}, wg, sig), sig.amplitude);
}

TEST(Evanescent, OneDecayLength)
{
    const auto sig = make_signal(60e9);
    const auto wg = x_rod();
    const double alpha = mode_constants(wg.n_g, sig.wavelength()).alpha;
    const complex v = evanescent_amplitude({0, 1.5 * mm + 1 / alpha, 0}, wg, sig);
    EXPECT_NEAR(std::abs(v), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(std::abs(v), 0.3679, 1e-4);
}

TEST(Evanescent, OneGuidedWavelengthIsFullTurn)
{
    const auto sig = make_signal(60e9, {2, 1});
    const auto wg = x_rod();
    const double lg = mode_constants(wg.n_g, sig.wavelength()).guided_wavelength;
    const complex v = evanescent_amplitude({lg, 1.5 * mm, 0}, wg, sig);
    EXPECT_LT(std::abs(v - sig.amplitude) / std::abs(sig.amplitude), 1e-12);
}

TEST(Evanescent, StrictlyDecreasingInDistance)
{
    const auto sig = make_signal(60e9);
    const auto wg = x_rod(1.2);
    double prev = 2;
    for (int i = 0; i < 50; ++i)
    {
        const double m = std::abs(evanescent_amplitude({0, 1.5 * mm + i * 0.2 * mm, 0}, wg, sig));
        EXPECT_LT(m, prev);
        prev = m;
    }
}

TEST(Evanescent, ConstantInDistanceAtUnitIndex)
{
    const auto sig = make_signal(60e9);
    WaveguideModel wg = x_rod();
    wg.n_g = 1.0; // the limit case; make_waveguide itself insists on n_g > 1
    for (int i = 0; i < 10; ++i)
        EXPECT_EQ(std::abs(evanescent_amplitude({0, 1.5 * mm + i * mm, 0}, wg, sig)), 1.0);
}

TEST(Evanescent, PhaseFromArclengthMagnitudeFromDistance)
{
    const auto sig = make_signal(60e9);
    const auto wg = make_waveguide({1 * mm, -2 * mm, 0.5 * mm}, {1, 1, 0}, 1.5 * mm, 1.3, 0.7 * mm);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20 * mm, 20 * mm);
    for (int k = 0; k < 200; ++k)
    {
        const Vec3 p{u(rng), u(rng), u(rng)};
        // Same d, different s: equal magnitude.
        const Vec3 q = p + u(rng) * wg.axis_direction;
        const complex vp = evanescent_amplitude(p, wg, sig);
        const complex vq = evanescent_amplitude(q, wg, sig);
        EXPECT_NEAR(std::abs(vp), std::abs(vq), 1e-14);
        // Same s, different d: equal phase.
        const Vec3 c = cross(wg.axis_direction, Vec3{0, 0, 1});
        const Vec3 radial_dir = (1.0 / norm(c)) * c;
        const Vec3 r = p + (std::abs(u(rng)) + 1e-3) * radial_dir;
        const complex vr = evanescent_amplitude(r, wg, sig);
        if (std::abs(vr) > 1e-200 && std::abs(vp) > 1e-200)
        {
            EXPECT_NEAR(std::arg(vr / vp), 0.0, 1e-9);
        }
    }
}

TEST(IncidentField, UniformWhenDistanceAndArclengthEqual)
{
    // Voxels on a circle around the axis at one axial station.
    Mesh m;
    for (int k = 0; k < 8; ++k)
    {
        const double a = k * pi / 4;
        m.voxels.push_back({{2 * mm, 4 * mm * std::cos(a), 4 * mm * std::sin(a)}, 1e-9});
    }
    const auto f = incident_field(m, x_rod(), make_signal(60e9), {0, 1, 0});
    ASSERT_EQ(f.size(), m.size());
    for (std::size_t i = 1; i < f.size(); ++i)
    {
        for (int c = 0; c < 3; ++c)
            EXPECT_EQ(f.e_inc[i][c], f.e_inc[0][c]);
    }
}

TEST(IncidentField, DistanceRatio)
{
    const auto sig = make_signal(60e9);
    const auto wg = x_rod();
    const double alpha = mode_constants(wg.n_g, sig.wavelength()).alpha;
    Mesh m;
    m.voxels.push_back({{0, 2 * mm, 0}, 1e-9});
    m.voxels.push_back({{0, 3.5 * mm, 0}, 1e-9});
    const auto f = incident_field(m, wg, sig, {0, 0, 1});
    EXPECT_NEAR(std::abs(f.e_inc[0][2]) / std::abs(f.e_inc[1][2]), std::exp(alpha * 1.5 * mm), 1e-12);
}

TEST(IncidentField, HalfGuidedWavelengthFlipsSign)
{
    const auto sig = make_signal(60e9);
    const auto wg = x_rod();
    const double lg = mode_constants(wg.n_g, sig.wavelength()).guided_wavelength;
    Mesh m;
    m.voxels.push_back({{0.3 * mm, 2 * mm, 0}, 1e-9});
    m.voxels.push_back({{0.3 * mm + lg / 2, 2 * mm, 0}, 1e-9});
    const auto f = incident_field(m, wg, sig, {0, 1, 0});
    EXPECT_LT(std::abs(f.e_inc[1][1] + f.e_inc[0][1]) / std::abs(f.e_inc[0][1]), 1e-12);
}

TEST(IncidentField, LinearInAmplitude)
{
    const Mesh m = mesh_shape(transform_shape(make_square(12 * mm, 3 * mm), 0, {0, 0, 3 * mm}), 1 * mm);
    const auto wg = x_rod();
    const complex c{0.25, -1.5};
    const auto f1 = incident_field(m, wg, make_signal(60e9, {1, 0}), {0, 1, 0});
    const auto fc = incident_field(m, wg, make_signal(60e9, c), {0, 1, 0});
    for (std::size_t i = 0; i < m.size(); ++i)
        EXPECT_LE(std::abs(fc.e_inc[i][1] - c * f1.e_inc[i][1]), 1e-15 * std::abs(c * f1.e_inc[i][1]));
}

TEST(IncidentField, DepletionFromContactStart)
{
    const auto sig = make_signal(60e9);
    const auto wg = x_rod();
    Mesh m;
    for (int i = 0; i < 5; ++i)
        m.voxels.push_back({{(2 + i) * mm, 2 * mm, 0}, 1e-9});
    const double kappa = 100; // 1/m
    const auto f0 = incident_field(m, wg, sig, {0, 1, 0});
    const auto fk = incident_field(m, wg, sig, {0, 1, 0}, kappa);
    for (int i = 0; i < 5; ++i)
        EXPECT_NEAR(std::abs(fk.e_inc[i][1]) / std::abs(f0.e_inc[i][1]), std::exp(-kappa * i * mm), 1e-12);
}

TEST(IncidentField, Preconditions)
{
    const auto sig = make_signal(60e9);
    const auto wg = x_rod();
    Mesh m;
    EXPECT_THROW(incident_field(m, wg, sig, {0, 1, 0}), InvalidArgument);
    m.voxels.push_back({{0, 2 * mm, 0}, 1e-9});
    EXPECT_THROW(incident_field(m, wg, sig, {1, 0, 0}), InvalidArgument);
    EXPECT_THROW(incident_field(m, wg, sig, {1e-6, 1, 0}), InvalidArgument);
    EXPECT_NO_THROW(incident_field(m, wg, sig, {1e-12, 1, 0}));
    EXPECT_THROW(incident_field(m, wg, sig, {0, 0, 0}), InvalidArgument);
    EXPECT_THROW(incident_field(m, wg, sig, {0, 1, 0}, -1), InvalidArgument);
}

TEST(Signal, DerivedQuantities)
{
    const auto sig = make_signal(60e9);
    EXPECT_NEAR(sig.wavelength(), 4.99654e-3, 1e-8);
    EXPECT_DOUBLE_EQ(sig.angular_frequency(), two_pi * 60e9);
    EXPECT_THROW(make_signal(0), InvalidArgument);
}
