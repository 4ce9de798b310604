#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vlad/error.hpp"
#include "vlad/graspx/graspx.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace vlad;
using namespace vlad::graspx;

namespace {

constexpr double kPi = std::numbers::pi;

// Horizontal rod on rows [row - half, row + half], columns [u0, u1], with
// the listed column ranges erased.
BinaryMask horizontal_rod(int w, int h, int row, int half, int u0, int u1,
                          std::vector<std::pair<int, int>> gaps = {}) {
    BinaryMask m(w, h);
    for (int v = row - half; v <= row + half; ++v) {
        for (int u = u0; u <= u1; ++u) {
            bool erased = false;
            for (const auto& [a, b] : gaps) {
                erased = erased || (u >= a && u <= b);
            }
            if (!erased) {
                m.set(u, v);
            }
        }
    }
    return m;
}

BinaryMask box(int w, int h, int u0, int v0, int u1, int v1) {
    BinaryMask m(w, h);
    for (int v = v0; v <= v1; ++v) {
        for (int u = u0; u <= u1; ++u) {
            m.set(u, v);
        }
    }
    return m;
}

BinaryMask rotate90(const BinaryMask& m) {
    // (u, v) -> (H - 1 - v, u): a quarter turn in image coordinates.
    BinaryMask out(m.height(), m.width());
    for (const auto& p : m.set_pixels()) {
        out.set(m.height() - 1 - p.v, p.u);
    }
    return out;
}

BinaryMask shifted(const BinaryMask& m, int du, int dv) {
    BinaryMask out(m.width(), m.height());
    for (const auto& p : m.set_pixels()) {
        out.set(p.u + du, p.v + dv);
    }
    return out;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("normalize_angle maps into (-pi/2, pi/2]") {
    CHECK(normalize_angle(kPi / 2) == doctest::Approx(kPi / 2));
    CHECK(normalize_angle(-kPi / 2) == doctest::Approx(kPi / 2));
    CHECK(normalize_angle(kPi) == doctest::Approx(0.0));
    CHECK(normalize_angle(3 * kPi / 4) == doctest::Approx(-kPi / 4));
    CHECK(angle_difference_mod_pi(0.1, kPi - 0.1) == doctest::Approx(0.2));
}

TEST_CASE("rectangle corners round-trip through from_corners") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        GraspRectangle r{{50 + 10 * u(rng), 40 + 10 * u(rng)}, u(rng) / 2, 5 + std::abs(u(rng)) * 5,
                         2 + std::abs(u(rng))};
        r.angle = normalize_angle(r.angle);
        const auto back = from_corners(r.corners());
        CHECK((back.center - r.center).norm() < 1e-9);
        CHECK(back.width == doctest::Approx(r.width));
        CHECK(back.height == doctest::Approx(r.height));
        CHECK(angle_difference_mod_pi(back.angle, r.angle) < 1e-9);
    }
    const GraspRectangle axis{{0, 0}, 0.0, 4.0, 2.0};
    const auto c = axis.corners();
    CHECK((c[0] - Vec2(-2, -1)).norm() < 1e-12);
    CHECK((c[1] - Vec2(2, -1)).norm() < 1e-12);
    CHECK((c[2] - Vec2(2, 1)).norm() < 1e-12);
}

TEST_CASE("rectangle JSON") {
    const GraspRectangle r{{3, 4}, 0.5, 10, 2};
    const auto j = to_json(r);
    CHECK(j.at("center") == nlohmann::json::array({3.0, 4.0}));
    CHECK(j.at("width_px") == 10.0);
    const auto back = rectangle_from_json(j);
    CHECK(back.angle == 0.5);
    CHECK(back.height == 2.0);
}

TEST_CASE("fit_rod_axis: strips and diagonals") {
    const auto strip = horizontal_rod(40, 10, 5, 0, 2, 37);
    const auto a = fit_rod_axis(strip);
    CHECK(a.angle == doctest::Approx(0.0));
    CHECK(std::abs(a.direction.x()) == doctest::Approx(1.0));
    CHECK(a.thickness == doctest::Approx(1.0));

    BinaryMask diag(30, 30);
    for (int i = 0; i < 30; ++i) {
        diag.set(i, i);
    }
    CHECK(std::abs(fit_rod_axis(diag).angle - kPi / 4) < 1e-6);

    BinaryMask vertical(10, 30);
    for (int v = 0; v < 30; ++v) {
        vertical.set(4, v);
    }
    CHECK(fit_rod_axis(vertical).angle == doctest::Approx(kPi / 2));
}

TEST_CASE("fit_rod_axis: noisy thick rod stays within 2 degrees") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
    std::bernoulli_distribution salt(0.05);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = ang(rng);
        const Vec2 d(std::cos(theta), std::sin(theta));
        const Vec2 c(100, 100);
        BinaryMask m(200, 200);
        for (int v = 0; v < 200; ++v) {
            for (int u = 0; u < 200; ++u) {
                const Vec2 q = Vec2(u, v) - c;
                const double t = q.dot(d);
                const double s = q.dot(Vec2(-d.y(), d.x()));
                if (std::abs(t) <= 80 && std::abs(s) <= 3) {
                    m.set(u, v, !salt(rng));
                } else if (std::abs(t) <= 80 && std::abs(s) <= 6 && salt(rng)) {
                    m.set(u, v);
                }
            }
        }
        CHECK(testing::oracle_angle_gap(fit_rod_axis(m).angle, theta) < 2.0 * kPi / 180.0);
    }
}

TEST_CASE("fit_rod_axis errors") {
    CHECK(code_of([] { fit_rod_axis(BinaryMask(5, 5)); }) == ErrorCode::EmptyMask);
    CHECK(code_of([] { fit_rod_axis(box(20, 20, 5, 5, 14, 14)); }) == ErrorCode::IsotropicMask);
}

TEST_CASE("single gap inside the object: run length and IoU against a pixel oracle") {
    const int w = 60, h = 20;
    const auto rod = horizontal_rod(w, h, 10, 1, 5, 54, {{25, 34}});
    const auto object = box(w, h, 22, 4, 37, 16);
    const auto axis = fit_rod_axis(rod);
    const auto gaps = find_discontinuities(rod, axis, object);
    REQUIRE(gaps.size() == 1);
    CHECK(std::abs(gaps[0].run_length - 10) <= 1);
    CHECK(gaps[0].end_t - gaps[0].start_t == doctest::Approx(gaps[0].run_length));

    // Oracle: gap band = columns 25..34 on rod rows; object restricted to the
    // rod rows over the full rod extent = columns 22..37 on rows 9..11.
    const double inter = 10 * 3;
    const double uni = 16 * 3;
    CHECK(gaps[0].iou_with_object == doctest::Approx(inter / uni));
    CHECK(axis.along(axis.point_at((gaps[0].start_t + gaps[0].end_t) / 2)) ==
          doctest::Approx((gaps[0].start_t + gaps[0].end_t) / 2));

    const auto rect = select_grasp(gaps, axis, object);
    CHECK(rect.center.x() == doctest::Approx(29.5));
    CHECK(rect.center.y() == doctest::Approx(10.0));
    CHECK(rect.width == gaps[0].run_length);
    CHECK(rect.height == doctest::Approx(3.0));
    CHECK(rect.angle == doctest::Approx(0.0));
}

TEST_CASE("unbroken rod has no discontinuities") {
    const auto rod = horizontal_rod(60, 20, 10, 1, 5, 54);
    const auto object = box(60, 20, 22, 4, 37, 16);
    const auto axis = fit_rod_axis(rod);
    CHECK(find_discontinuities(rod, axis, object).empty());
    CHECK(code_of([&] { select_grasp({}, axis, object); }) == ErrorCode::NoViableGrasp);
}

TEST_CASE("one-pixel gaps are closed, two-pixel gaps are kept") {
    const auto rod = horizontal_rod(60, 20, 10, 1, 5, 54, {{15, 15}, {40, 41}});
    const auto axis = fit_rod_axis(rod);
    const auto gaps = find_discontinuities(rod, axis, BinaryMask(60, 20));
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].run_length == 2);
}

TEST_CASE("two gaps: the one over the object wins despite a shorter run") {
    const int w = 100, h = 20;
    const auto rod = horizontal_rod(w, h, 10, 1, 2, 97, {{15, 34}, {60, 69}});
    const auto object = box(w, h, 57, 3, 72, 17);
    const auto axis = fit_rod_axis(rod);
    const auto gaps = find_discontinuities(rod, axis, object);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].start_t < gaps[1].start_t);
    CHECK(gaps[0].end_t <= gaps[1].start_t);
    CHECK(gaps[0].iou_with_object == 0.0);
    CHECK(gaps[1].iou_with_object > 0.5);
    const auto rect = select_grasp(gaps, axis, object);
    CHECK(rect.center.x() == doctest::Approx(64.5));
    CHECK(rect.width == 10);
}

TEST_CASE("delta and epsilon filters") {
    const int w = 60, h = 20;
    const auto rod = horizontal_rod(w, h, 10, 1, 5, 54, {{28, 30}});
    const auto object = box(w, h, 22, 4, 37, 16);  // area 208, sqrt ~ 14.4
    const auto axis = fit_rod_axis(rod);
    const auto gaps = find_discontinuities(rod, axis, object);
    REQUIRE(gaps.size() == 1);
    GraspOptions strict;
    strict.delta = 0.5;  // needs a 7.2 px run, the gap is 3
    CHECK(code_of([&] { select_grasp(gaps, axis, object, strict); }) == ErrorCode::NoViableGrasp);
    GraspOptions loose;
    loose.epsilon = 0.15;  // IoU is 9 / 48
    CHECK_NOTHROW(select_grasp(gaps, axis, object, loose));
    loose.epsilon = 0.2;
    CHECK(code_of([&] { select_grasp(gaps, axis, object, loose); }) == ErrorCode::NoViableGrasp);
    GraspOptions bad;
    bad.delta = 1.5;
    CHECK(code_of([&] { select_grasp(gaps, axis, object, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("jaw height override") {
    const auto rod = horizontal_rod(60, 20, 10, 1, 5, 54, {{25, 34}});
    const auto object = box(60, 20, 22, 4, 37, 16);
    GraspOptions opts;
    opts.jaw_height = 12.0;
    CHECK(extract_grasp(rod, object, opts).grasp.height == 12.0);
}

TEST_CASE("extraction is translation equivariant and quarter-turn covariant") {
    const int w = 80, h = 80;
    const auto rod = horizontal_rod(w, h, 30, 1, 5, 60, {{25, 36}});
    const auto object = box(w, h, 22, 20, 40, 40);
    const auto base = extract_grasp(rod, object).grasp;

    const auto moved = extract_grasp(shifted(rod, 7, 11), shifted(object, 7, 11)).grasp;
    CHECK((moved.center - base.center - Vec2(7, 11)).norm() < 1e-9);
    CHECK(moved.angle == doctest::Approx(base.angle));
    CHECK(moved.width == base.width);

    const auto turned = extract_grasp(rotate90(rod), rotate90(object)).grasp;
    CHECK(testing::oracle_angle_gap(turned.angle, base.angle + kPi / 2) < 1e-9);
    CHECK(std::abs(turned.width - base.width) <= 1.0);
}

TEST_CASE("mask size mismatch") {
    const auto rod = horizontal_rod(60, 20, 10, 1, 5, 54);
    const auto axis = fit_rod_axis(rod);
    CHECK(code_of([&] { find_discontinuities(rod, axis, BinaryMask(10, 10)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("band_mask covers the gap interval at rod thickness") {
    const auto rod = horizontal_rod(60, 20, 10, 1, 5, 54, {{25, 34}});
    const auto axis = fit_rod_axis(rod);
    const auto gaps = find_discontinuities(rod, axis, BinaryMask(60, 20));
    const auto band = band_mask(axis, gaps[0].start_t, gaps[0].end_t, 60, 20);
    CHECK(band.count() == 30);
    CHECK(band.intersect(rod).empty());
}
