#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "corrviz/examples.hpp"
#include "corrviz/geometry.hpp"
#include "test_oracles.hpp"

using namespace corrviz::geometry;
using namespace corrviz::stats;
namespace linalg = corrviz::linalg;

namespace {

bool segments_cross_strictly(const std::array<Point2, 2>& a, const std::array<Point2, 2>& b,
                             double x_lo, double x_hi) {
    // both segments span [x_lo, x_hi]; intersect their line equations
    const double sa = (a[1].y - a[0].y) / (a[1].x - a[0].x);
    const double sb = (b[1].y - b[0].y) / (b[1].x - b[0].x);
    if (sa == sb) return false;
    const double xc = (b[0].y - a[0].y + sa * a[0].x - sb * b[0].x) / (sa - sb);
    return xc > x_lo + 1e-12 && xc < x_hi - 1e-12;
}

}  // namespace

TEST_CASE("correlation lines: rho = 0 collapses to the direct connector") {
    const auto p = correlation_line_endpoints(1.0, 2.0, 0.5, 3.0, 2.5, 0.7, 0.0);
    CHECK(p.segment_a[0].y == doctest::Approx(2.0));
    CHECK(p.segment_a[1].y == doctest::Approx(2.5));
    CHECK(p.segment_b[0].y == doctest::Approx(2.0));
    CHECK(p.segment_b[1].y == doctest::Approx(2.5));
}

TEST_CASE("correlation lines: rho = 1 attaches at the tips, same sides") {
    const auto p = correlation_line_endpoints(1.0, 2.0, 0.5, 3.0, 2.5, 0.7, 1.0);
    CHECK(p.segment_a[0].y == doctest::Approx(2.5));
    CHECK(p.segment_a[1].y == doctest::Approx(3.2));
    CHECK(p.segment_b[0].y == doctest::Approx(1.5));
    CHECK(p.segment_b[1].y == doctest::Approx(1.8));
}

TEST_CASE("correlation lines: negative rho crosses strictly inside") {
    const auto p = correlation_line_endpoints(1.0, 2.0, 2.0, 4.0, 1.0, 4.0, -0.5);
    CHECK(p.segment_a[0].y == doctest::Approx(3.0));   // yi + 1
    CHECK(p.segment_a[1].y == doctest::Approx(-1.0));  // yj - 2
    CHECK(segments_cross_strictly(p.segment_a, p.segment_b, 1.0, 4.0));
}

TEST_CASE("correlation lines: positive rho stays on one side each") {
    const auto p = correlation_line_endpoints(0.0, 0.0, 1.0, 2.0, 1.0, 1.0, 0.7);
    CHECK(p.segment_a[0].y > 0.0);
    CHECK(p.segment_a[1].y > 1.0);
    CHECK(p.segment_b[0].y < 0.0);
    CHECK(p.segment_b[1].y < 1.0);
    CHECK_FALSE(segments_cross_strictly(p.segment_a, p.segment_b, 0.0, 2.0));
}

TEST_CASE("correlation lines: (i,j) swap symmetry") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> us(0.1, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double yi = u(rng), yj = u(rng), si = us(rng), sj = us(rng), rho = u(rng);
        const auto fwd = correlation_line_endpoints(0.0, yi, si, 1.0, yj, sj, rho);
        const auto rev = correlation_line_endpoints(1.0, yj, sj, 0.0, yi, si, rho);
        // same two segments as unordered endpoint sets
        auto key = [](const std::array<Point2, 2>& seg) {
            Point2 lo = seg[0], hi = seg[1];
            if (lo.x > hi.x) std::swap(lo, hi);
            return std::array<double, 4>{lo.x, lo.y, hi.x, hi.y};
        };
        std::vector<std::array<double, 4>> a{key(fwd.segment_a), key(fwd.segment_b)};
        std::vector<std::array<double, 4>> b{key(rev.segment_a), key(rev.segment_b)};
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        for (int s = 0; s < 2; ++s) {
            for (int k = 0; k < 4; ++k) CHECK(std::abs(a[s][k] - b[s][k]) < 1e-12);
        }
    }
}

TEST_CASE("hatch bands degenerate for uncorrelated data") {
    const auto decomp = correlation_from_covariance(SymMatrix::diagonal({1.0, 4.0, 9.0}));
    const auto reduced = reduce_components(decomp, 1, TargetPolicy::median);
    const std::vector<double> y{0.0, 1.0, 2.0};
    const std::vector<double> sig{1.0, 2.0, 3.0};
    for (const auto& b : hatch_bands(y, sig, decomp, reduced)) CHECK(b.degenerate);
}

TEST_CASE("hatch bands 2x2, rho = 0.5, second policy") {
    const auto v = SymMatrix::from_rows({{1.0, 0.5}, {0.5, 1.0}});
    const auto decomp = correlation_from_covariance(v);
    const auto reduced = reduce_components(decomp, 1, TargetPolicy::second);
    const std::vector<double> y{0.0, 0.0};
    const std::vector<double> sig{1.0, 1.0};
    const auto bands = hatch_bands(y, sig, decomp, reduced);
    REQUIRE(bands.size() == 4);
    for (const auto& b : bands) {
        CHECK_FALSE(b.degenerate);
        const double inner = std::abs(b.inner_edge - y[b.point]);
        const double outer = std::abs(b.outer_edge - y[b.point]);
        CHECK(inner == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
        CHECK(outer == doctest::Approx(1.0).epsilon(1e-12));
        // u1 is proportional to (1,1): both 'above' bands are component_positive
        if (b.side == Side::above) CHECK(b.hatch_class == HatchClass::component_positive);
        if (b.side == Side::below) CHECK(b.hatch_class == HatchClass::component_negative);
    }
}

TEST_CASE("hatch bands: sign bookkeeping follows the eigenvector") {
    const auto demo = corrviz::examples::generate({corrviz::examples::Kind::three_point_demo, 3, 1});
    const auto decomp = correlation_from_covariance(demo.cov);
    const auto reduced = reduce_components(decomp, 1, TargetPolicy::median);
    const auto& u1 = decomp.eigen.vectors[0];
    std::vector<double> sig(3);
    for (std::size_t i = 0; i < 3; ++i) sig[i] = demo.sigma(i);
    for (const auto& b : hatch_bands(demo.y, sig, decomp, reduced)) {
        const bool positive = u1[b.point] > 0.0;
        if (b.side == Side::above) {
            CHECK(b.hatch_class == (positive ? HatchClass::component_positive
                                             : HatchClass::component_negative));
        } else {
            CHECK(b.hatch_class == (positive ? HatchClass::component_negative
                                             : HatchClass::component_positive));
        }
    }
}

TEST_CASE("hatch band telescoping reconstructs the marginal error") {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 4 + trial % 5;
        const auto v = oracles::random_covariance(n, rng);
        const auto decomp = correlation_from_covariance(v);
        std::vector<double> y(n, 0.0), sig(n);
        for (std::size_t i = 0; i < n; ++i) sig[i] = std::sqrt(v(i, i));
        for (std::size_t nc = 1; nc <= 2; ++nc) {
            const auto reduced = reduce_components(decomp, nc, TargetPolicy::smallest);
            const auto bands = hatch_bands(y, sig, decomp, reduced);
            for (std::size_t i = 0; i < n; ++i) {
                double widths = 0.0;
                double inner_err = sig[i] * std::sqrt(reduced.remaining(i, i));
                for (const auto& b : bands) {
                    if (b.point == i && b.side == Side::above) {
                        widths += std::abs(b.outer_edge - b.inner_edge);
                    }
                }
                CHECK(std::abs(widths + inner_err - sig[i]) < 1e-10 * sig[i]);
            }
        }
    }
}

TEST_CASE("conditional markers") {
    const auto diag = conditional_markers({1.0, 2.0}, {0.5, 0.25});
    CHECK(diag[0].apex_above == doctest::Approx(1.5));
    CHECK(diag[0].apex_below == doctest::Approx(0.5));
    CHECK(diag[1].apex_above == doctest::Approx(2.25));

    // sum-constrained covariance: conditional sigmas hug the centers
    const auto sum = corrviz::examples::generate({corrviz::examples::Kind::sum_constrained, 5, 1});
    const auto sc = conditional_sigmas(sum.cov);
    const auto markers = conditional_markers(sum.y, sc);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(markers[i].apex_above - sum.y[i] < 0.01 * sum.sigma(i));
    }
}

TEST_CASE("hinton cells") {
    SymMatrix c(2);
    c.set(0, 0, 1.0);
    c.set(1, 1, 1.0);
    c.set(0, 1, 0.25);
    const auto cells = hinton_cells(c);
    REQUIRE(cells.size() == 4);
    for (const auto& cell : cells) {
        if (cell.i == cell.j) {
            CHECK(cell.radius_fraction == doctest::Approx(1.0));
            CHECK(cell.sign == CellSign::positive);
        } else {
            CHECK(cell.radius_fraction == doctest::Approx(0.5));  // area ~ 1/4
        }
    }

    SymMatrix neg(2);
    neg.set(0, 0, 1.0);
    neg.set(1, 1, 1.0);
    neg.set(0, 1, -1.0);
    const auto nc = hinton_cells(neg);
    CHECK(nc[1].radius_fraction == doctest::Approx(1.0));
    CHECK(nc[1].sign == CellSign::negative);

    // area linearity
    std::mt19937 rng(71);
    const auto decomp = correlation_from_covariance(oracles::random_covariance(5, rng));
    for (const auto& cell : hinton_cells(decomp.correlation)) {
        const double area_ratio = cell.radius_fraction * cell.radius_fraction;
        CHECK(std::abs(area_ratio - std::abs(decomp.correlation(cell.i, cell.j))) < 1e-12);
    }
}

TEST_CASE("ellipse_from_cov2") {
    const auto circle = ellipse_from_cov2(SymMatrix::identity(2), EllipseStyle::full_marginal);
    CHECK(circle.semi_major == doctest::Approx(1.0));
    CHECK(circle.semi_minor == doctest::Approx(1.0));

    const auto axis = ellipse_from_cov2(SymMatrix::diagonal({4.0, 1.0}), EllipseStyle::remaining);
    CHECK(axis.semi_major == doctest::Approx(2.0));
    CHECK(axis.semi_minor == doctest::Approx(1.0));
    CHECK(std::abs(axis.angle) < 1e-12);

    const auto tilted = ellipse_from_cov2(SymMatrix::from_rows({{1.0, 0.9}, {0.9, 1.0}}),
                                          EllipseStyle::conditional_slice);
    CHECK(tilted.semi_major == doctest::Approx(std::sqrt(1.9)).epsilon(1e-12));
    CHECK(tilted.semi_minor == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));
    CHECK(std::abs(tilted.angle) == doctest::Approx(3.14159265358979 / 4.0).epsilon(1e-9));
    CHECK(tilted.angle >= -3.14159265358979 / 2.0);
    CHECK(tilted.angle < 3.14159265358979 / 2.0);
    CHECK(tilted.semi_major >= tilted.semi_minor);
}

TEST_CASE("ellipse boundary satisfies the unit quadratic form") {
    std::mt19937 rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const auto cov2 = oracles::random_spd(2, rng, 0.3);
        const auto e = ellipse_from_cov2(cov2, EllipseStyle::full_marginal);
        const double ca = std::cos(e.angle), sa = std::sin(e.angle);
        for (int k = 0; k < 360; ++k) {
            const double t = 2.0 * 3.14159265358979323846 * k / 360.0;
            const double ex = e.semi_major * std::cos(t);
            const double ey = e.semi_minor * std::sin(t);
            const std::vector<double> p{ca * ex - sa * ey, sa * ex + ca * ey};
            CHECK(std::abs(oracles::quadratic_form_inv(cov2, p) - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("pairwise_ellipse_grid") {
    const auto demo = corrviz::examples::generate({corrviz::examples::Kind::three_point_demo, 3, 1});
    const auto decomp = correlation_from_covariance(demo.cov);
    const auto reduced = reduce_components(decomp, 1, TargetPolicy::median);
    const auto grid = pairwise_ellipse_grid(demo, decomp, reduced);
    REQUIRE(grid.size() == 3);

    // containment: slice boundary inside the marginal quadratic form
    for (const auto& pe : grid) {
        SymMatrix full2(2);
        full2.set(0, 0, demo.cov(pe.i, pe.i));
        full2.set(0, 1, demo.cov(pe.i, pe.j));
        full2.set(1, 1, demo.cov(pe.j, pe.j));
        const auto& e = pe.conditional_slice;
        const double ca = std::cos(e.angle), sa = std::sin(e.angle);
        for (int k = 0; k < 360; ++k) {
            const double t = 2.0 * 3.14159265358979323846 * k / 360.0;
            const double ex = e.semi_major * std::cos(t);
            const double ey = e.semi_minor * std::sin(t);
            const std::vector<double> p{ca * ex - sa * ey, sa * ex + ca * ey};
            CHECK(oracles::quadratic_form_inv(full2, p) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("pairwise_ellipse_grid: N = 2 slice equals marginal") {
    DataSet d{{1.0, 2.0}, {0.0, 0.0}, SymMatrix::from_rows({{1.0, 0.3}, {0.3, 2.0}}), {}, "", ""};
    const auto decomp = correlation_from_covariance(d.cov);
    const auto reduced = reduce_components(decomp, 1, TargetPolicy::second);
    const auto grid = pairwise_ellipse_grid(d, decomp, reduced);
    REQUIRE(grid.size() == 1);
    CHECK(grid[0].conditional_slice.semi_major ==
          doctest::Approx(grid[0].full_marginal.semi_major).epsilon(1e-10));
    CHECK(grid[0].conditional_slice.semi_minor ==
          doctest::Approx(grid[0].full_marginal.semi_minor).epsilon(1e-10));
}

TEST_CASE("pairwise_ellipse_grid: diagonal covariance coincides") {
    DataSet d{{1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, SymMatrix::diagonal({1.0, 4.0, 9.0}), {}, "", ""};
    const auto decomp = correlation_from_covariance(d.cov);
    const auto reduced = reduce_components(decomp, 1, TargetPolicy::median);
    for (const auto& pe : pairwise_ellipse_grid(d, decomp, reduced)) {
        for (const auto* e : {&pe.remaining, &pe.conditional_slice}) {
            CHECK(e->semi_major == doctest::Approx(pe.full_marginal.semi_major).epsilon(1e-9));
            CHECK(e->semi_minor == doctest::Approx(pe.full_marginal.semi_minor).epsilon(1e-9));
        }
    }
}

TEST_CASE("ratio_view") {
    DataSet d{{1.0, 2.0},
              {2.0, 4.0},
              SymMatrix::identity(2),
              {{"flat", {2.0, 2.0}}},
              "",
              ""};
    const auto r = ratio_view(d, 0);
    CHECK(r.y[0] == doctest::Approx(1.0));
    CHECK(r.y[1] == doctest::Approx(2.0));
    CHECK(r.cov(0, 0) == doctest::Approx(0.25));
    CHECK(r.cov(1, 1) == doctest::Approx(0.25));
    CHECK(r.models[0].values[0] == doctest::Approx(1.0));
    const double d2_orig = mahalanobis_sq(d.y, d.models[0].values, d.cov);
    const double d2_ratio = mahalanobis_sq(r.y, r.models[0].values, r.cov);
    CHECK(d2_orig == doctest::Approx(4.0));
    CHECK(d2_ratio == doctest::Approx(d2_orig).epsilon(1e-12));
}

TEST_CASE("ratio_view: m = y gives flat data with d2 = 0") {
    DataSet d{{1.0, 2.0}, {1.5, 2.5}, SymMatrix::identity(2), {{"self", {1.5, 2.5}}}, "", ""};
    const auto r = ratio_view(d, 0);
    CHECK(r.y[0] == doctest::Approx(1.0));
    CHECK(r.y[1] == doctest::Approx(1.0));
    CHECK(mahalanobis_sq(r.y, r.models[0].values, r.cov) == doctest::Approx(0.0));
}

TEST_CASE("ratio_view rejects zero model values") {
    DataSet d{{1.0, 2.0}, {1.0, 1.0}, SymMatrix::identity(2), {{"bad", {1.0, 0.0}}}, "", ""};
    CHECK_THROWS_AS(ratio_view(d, 0), ZeroModelValue);
}

TEST_CASE("ratio_view d2 invariance and correlation preservation on random instances") {
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> um(0.5, 3.0);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 2 + trial % 6;
        DataSet d{{}, {}, oracles::random_covariance(n, rng), {}, "", ""};
        Model model{"m", {}};
        for (std::size_t i = 0; i < n; ++i) {
            d.x.push_back(static_cast<double>(i));
            d.y.push_back(2.0 + uy(rng));
            model.values.push_back(um(rng));
        }
        d.models.push_back(model);

        const auto r = ratio_view(d, 0);
        CHECK(mahalanobis_sq(r.y, r.models[0].values, r.cov) ==
              doctest::Approx(mahalanobis_sq(d.y, d.models[0].values, d.cov)).epsilon(1e-9));

        const auto corig = correlation_from_covariance(d.cov);
        const auto cratio = correlation_from_covariance(r.cov);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(std::abs(corig.correlation(i, j) - cratio.correlation(i, j)) < 1e-10);
            }
        }
    }
}
