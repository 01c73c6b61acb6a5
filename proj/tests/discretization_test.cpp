#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace kms;

namespace {

Field random_field(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(mesh.size());
    for (double& v : u) v = dist(rng);
    return u;
}

}  // namespace

TEST(Mesh, IntervalNodes) {
    const Mesh mesh(DomainSpec::interval(M_PI, 4));
    ASSERT_EQ(mesh.size(), 3u);
    EXPECT_NEAR(mesh.h(), M_PI / 4, 1e-15);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(mesh.coordinate(i)[0], (i + 1) * M_PI / 4, 1e-15);
}

TEST(Mesh, SquareNodes) {
    const Mesh mesh(DomainSpec::rectangle(1.0, 1.0, 4, 4));
    EXPECT_EQ(mesh.size(), 9u);
    EXPECT_DOUBLE_EQ(mesh.cell_volume(), 1.0 / 16);
    EXPECT_DOUBLE_EQ(mesh.volume(), 1.0);
    const auto xy = mesh.coordinate(mesh.index(2, 1));
    EXPECT_DOUBLE_EQ(xy[0], 0.75);
    EXPECT_DOUBLE_EQ(xy[1], 0.5);
}

TEST(Mesh, RejectsTooFewCells) {
    EXPECT_THROW(Mesh(DomainSpec::interval(1.0, 3)), InvalidArgument);
    EXPECT_THROW(Mesh(DomainSpec::rectangle(1.0, 1.0, 8, 3)), InvalidArgument);
    EXPECT_THROW(Mesh(DomainSpec::interval(-1.0, 8)), InvalidArgument);
}

TEST(Laplacian, QuadraticIsExact) {
    const Mesh mesh(DomainSpec::interval(1.0, 4));
    const Field u = mesh.sample([](double x, double) { return x * (1 - x); });
    const Field lu = neg_laplacian(mesh, u);
    for (double v : lu) EXPECT_NEAR(v, 2.0, 1e-13);
}

TEST(Laplacian, QuadraticIsExactIn2D) {
    const Mesh mesh(DomainSpec::rectangle(1.0, 2.0, 6, 8));
    const Field u = mesh.sample([](double x, double y) { return x * (1 - x) * y * (2 - y); });
    const Field lu = neg_laplacian(mesh, u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto [x, y] = mesh.coordinate(i);
        EXPECT_NEAR(lu[i], 2 * y * (2 - y) + 2 * x * (1 - x), 1e-12);
    }
}

TEST(Laplacian, ZeroAndSine) {
    const Mesh mesh(DomainSpec::interval(M_PI, 512));
    for (double v : neg_laplacian(mesh, mesh.zeros())) EXPECT_EQ(v, 0.0);
    const Field u = mesh.sample([](double x, double) { return std::sin(x); });
    const Field lu = neg_laplacian(mesh, u);
    const double h = mesh.h();
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LE(std::abs(lu[i] - u[i]), h * h);
}

TEST(Laplacian, SizeMismatchThrows) {
    const Mesh mesh(DomainSpec::interval(1.0, 8));
    EXPECT_THROW(neg_laplacian(mesh, Field(3)), InvalidArgument);
    EXPECT_THROW(grad_norm_sq(mesh, Field(3)), InvalidArgument);
    EXPECT_THROW(integrate_power(mesh, Field(3), 1.0), InvalidArgument);
}

TEST(Laplacian, SymmetricAndPositive) {
    std::mt19937_64 rng(7);
    for (const auto& spec : {DomainSpec::interval(2.0, 40), DomainSpec::rectangle(1.0, 0.5, 12, 9)}) {
        const Mesh mesh(spec);
        for (int trial = 0; trial < 20; ++trial) {
            const Field u = random_field(mesh, rng);
            const Field v = random_field(mesh, rng);
            const double uv = inner_product(mesh, u, neg_laplacian(mesh, v));
            const double vu = inner_product(mesh, v, neg_laplacian(mesh, u));
            EXPECT_NEAR(uv, vu, 1e-12 * (std::abs(uv) + 1.0));
            EXPECT_GT(grad_norm_sq(mesh, u), 0.0);
        }
    }
}

TEST(Quadrature, SineIntegrals) {
    const Mesh mesh(DomainSpec::interval(M_PI, 512));
    const Field u = mesh.sample([](double x, double) { return std::sin(x); });
    EXPECT_NEAR(integrate_power(mesh, u, 1.0), 2.0, 1e-3);
    EXPECT_NEAR(integrate_power(mesh, u, 2.0), M_PI / 2, 1e-3);
    EXPECT_EQ(integrate_power(mesh, mesh.zeros(), 2.5), 0.0);
    EXPECT_NEAR(grad_norm_sq(mesh, u), M_PI / 2, 1e-2);
    EXPECT_NEAR(sup_norm(u), 1.0, 1e-4);
    EXPECT_EQ(sup_norm(mesh.zeros()), 0.0);
}

TEST(Quadrature, MatchesTrapezoidWithZeroEnds) {
    const Mesh mesh(DomainSpec::interval(3.0, 17));
    const Field u = mesh.sample([](double x, double) { return std::exp(x) * x * (3 - x); });
    // Trapezoid over all 18 grid points, boundary values 0.
    const double h = 3.0 / 17;
    double trap = 0.0;
    for (int i = 0; i <= 17; ++i) {
        const double x = i * h;
        const double w = (i == 0 || i == 17) ? 0.5 : 1.0;
        trap += w * std::exp(x) * x * (3 - x);
    }
    trap *= h;
    EXPECT_NEAR(integrate(mesh, u), trap, 1e-12 * std::abs(trap));
}

TEST(Quadrature, NegativeNodeWithFractionalPower) {
    const Mesh mesh(DomainSpec::interval(1.0, 8));
    Field u = mesh.constant(0.5);
    u[3] = -0.1;
    EXPECT_THROW(integrate_power(mesh, u, 1.5), InvalidArgument);
    EXPECT_NO_THROW(integrate_power(mesh, u, 2.0));
    EXPECT_THROW(integrate_power(mesh, mesh.constant(1.0), -1.0), InvalidArgument);
}

TEST(Norms, ScalingAndCauchySchwarz) {
    std::mt19937_64 rng(11);
    const Mesh mesh(DomainSpec::rectangle(2.0, 1.0, 10, 7));
    for (int trial = 0; trial < 50; ++trial) {
        const Field u = random_field(mesh, rng);
        Field cu = u;
        cu *= 3.0;
        EXPECT_NEAR(grad_norm_sq(mesh, cu), 9.0 * grad_norm_sq(mesh, u), 1e-12 * grad_norm_sq(mesh, cu));
        EXPECT_LE(lp_norm(mesh, u, 1.0), std::sqrt(mesh.volume()) * lp_norm(mesh, u, 2.0) * (1 + 1e-12));
    }
    EXPECT_EQ(lp_norm(mesh, mesh.zeros(), 2.0), 0.0);
}

TEST(FieldCsv, HeaderAndRows) {
    const Mesh mesh(DomainSpec::rectangle(1.0, 1.0, 4, 4));
    std::ostringstream os;
    write_field_csv(os, mesh, mesh.constant(2.0), "u");
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "x,y,u");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
}
