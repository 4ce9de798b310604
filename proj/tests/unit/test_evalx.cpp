#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vlad/error.hpp"
#include "vlad/evalx/rect_iou.hpp"
#include "vlad/evalx/scoring.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace vlad;
using namespace vlad::evalx;
using datasets::GraspAnnotation;

namespace {

constexpr double kPi = std::numbers::pi;

GraspRectangle random_rect(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> c(lo, hi);
    std::uniform_real_distribution<double> s(2.0, 20.0);
    std::uniform_real_distribution<double> a(-kPi / 2, kPi / 2);
    return {{c(rng), c(rng)}, a(rng), s(rng), s(rng)};
}

}  // namespace

TEST_CASE("rect_iou: trivial and analytic cases") {
    const GraspRectangle a{{0, 0}, 0.0, 10, 10};
    CHECK(rect_iou(a, a) == doctest::Approx(1.0));
    CHECK(rect_iou(a, {{100, 0}, 0.0, 10, 10}) == 0.0);

    // 5x10 overlap strip: 50 / 150.
    CHECK(std::abs(rect_iou(a, {{5, 0}, 0.0, 10, 10}) - 1.0 / 3.0) < 1e-9);

    // Unit square against itself turned 45 degrees: the overlap is a regular
    // octagon of area 2(sqrt2 - 1); the union is 2 minus that, so IoU = 1/sqrt2.
    const GraspRectangle unit{{0, 0}, 0.0, 1, 1};
    const GraspRectangle turned{{0, 0}, kPi / 4, 1, 1};
    const auto cu = unit.corners();
    const auto ct = turned.corners();
    const double octagon = signed_area(clip_convex({cu.begin(), cu.end()}, {ct.begin(), ct.end()}));
    CHECK(std::abs(octagon - 2.0 * (std::sqrt(2.0) - 1.0)) < 1e-6);
    CHECK(std::abs(rect_iou(unit, turned) - 1.0 / std::sqrt(2.0)) < 1e-6);

    // Rectangles are symmetric under a half turn.
    CHECK(rect_iou(a, {{0, 0}, kPi / 2, 10, 10}) == doctest::Approx(1.0));
    CHECK(rect_iou(a, {{0, 0}, 0.0, 0.0, 10}) == 0.0);
}

TEST_CASE("rect_iou: symmetric, bounded, and within 1e-3 of a raster oracle") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 60; ++i) {
        const auto a = random_rect(rng, 20, 44);
        auto b = random_rect(rng, 20, 44);
        b.center = a.center + 0.3 * (b.center - a.center);
        const double iou = rect_iou(a, b);
        CHECK(iou >= 0.0);
        CHECK(iou <= 1.0);
        CHECK(iou == doctest::Approx(rect_iou(b, a)).epsilon(1e-12));
        CHECK(std::abs(iou - testing::oracle_raster_iou(a, b)) <= 1e-3);
    }
}

TEST_CASE("rect_iou: shared edges and containment") {
    const GraspRectangle a{{0, 0}, 0.0, 10, 10};
    CHECK(rect_iou(a, {{10, 0}, 0.0, 10, 10}) == doctest::Approx(0.0));
    CHECK(rect_iou(a, {{0, 0}, 0.0, 5, 5}) == doctest::Approx(0.25));
    CHECK(rect_iou(a, {{0, 0}, 0.0, 10, 5}) == doctest::Approx(0.5));
}

TEST_CASE("clip_convex and signed_area") {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(signed_area(sq) == doctest::Approx(1.0));
    const std::vector<Vec2> shifted{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
    CHECK(signed_area(clip_convex(sq, shifted)) == doctest::Approx(0.5));
}

TEST_CASE("score_sample: exact match, angle gate, iou-only") {
    const GraspRectangle truth{{50, 50}, 0.0, 20, 10};
    EvalConfig cfg;
    auto r = score_sample("a", truth, {{truth}}, cfg);
    CHECK(r.success);
    CHECK(r.best_iou == doctest::Approx(1.0));
    CHECK(r.matched_annotation == 0u);

    // A 60 degree turn of a long thin box: the overlap is still above 0.25.
    const GraspRectangle thin{{50, 50}, 0.0, 30, 30};
    const GraspRectangle turned{{50, 50}, kPi / 3, 30, 30};
    REQUIRE(rect_iou(thin, turned) >= 0.25);
    CHECK(!score_sample("b", turned, {{thin}}, cfg).success);
    CHECK(!score_sample("b", turned, {{thin}}, cfg).matched_annotation);
    cfg.angle_threshold.reset();
    CHECK(score_sample("b", turned, {{thin}}, cfg).success);

    CHECK_THROWS_AS(score_sample("c", truth, {}, cfg), Error);
}

TEST_CASE("score_sample against an exhaustive oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pred = random_rect(rng, 30, 70);
        std::vector<GraspAnnotation> anns;
        for (int i = 0; i < 100; ++i) {
            anns.push_back({random_rect(rng, 30, 70)});
        }
        for (const bool angle_on : {true, false}) {
            EvalConfig cfg;
            if (!angle_on) {
                cfg.angle_threshold.reset();
            }
            bool expected = false;
            for (const auto& a : anns) {
                const bool angle_ok = !angle_on || testing::oracle_angle_gap(pred.angle, a.rectangle.angle) <= kPi / 6;
                expected = expected || (angle_ok && rect_iou(pred, a.rectangle) >= 0.25);
            }
            CHECK(score_sample("x", pred, anns, cfg).success == expected);
        }
    }
}

TEST_CASE("score_sample is monotone in the threshold") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pred = random_rect(rng, 40, 60);
        std::vector<GraspAnnotation> anns{{random_rect(rng, 40, 60)}, {random_rect(rng, 40, 60)}};
        EvalConfig hi;
        hi.iou_threshold = 0.5;
        EvalConfig lo;
        lo.iou_threshold = 0.2;
        if (score_sample("m", pred, anns, hi).success) {
            CHECK(score_sample("m", pred, anns, lo).success);
        }
    }
}

TEST_CASE("aggregate: success rate and population std") {
    std::vector<SampleRecord> all(4);
    for (auto& r : all) {
        r.success = true;
    }
    auto rep = aggregate(all);
    CHECK(rep.success_rate == 100.0);
    CHECK(rep.success_rate_std == 0.0);

    std::vector<SampleRecord> half(2);
    half[0].success = true;
    rep = aggregate(half);
    CHECK(rep.success_rate == 50.0);
    CHECK(rep.success_rate_std == 50.0);

    std::vector<SampleRecord> table(70);
    for (int i = 0; i < 64; ++i) {
        table[static_cast<std::size_t>(i)].success = true;
    }
    rep = aggregate(table);
    // Indicator oracle: mean and population std of 0/100 values.
    double mean = 0.0;
    for (const auto& r : table) {
        mean += r.success ? 100.0 : 0.0;
    }
    mean /= 70.0;
    double var = 0.0;
    for (const auto& r : table) {
        const double x = r.success ? 100.0 : 0.0;
        var += (x - mean) * (x - mean);
    }
    var /= 70.0;
    CHECK(rep.success_rate == doctest::Approx(mean));
    CHECK(rep.success_rate_std == doctest::Approx(std::sqrt(var)));
    CHECK(std::round(rep.success_rate * 100) / 100 == doctest::Approx(91.43));
    CHECK(std::abs(rep.success_rate_std - 28.00) < 0.01);

    CHECK_THROWS_AS(aggregate({}), Error);
}

TEST_CASE("aggregate skips NaN alignment metrics") {
    std::vector<SampleRecord> recs(3);
    recs[0].cd = 1.0;
    recs[1].cd = 3.0;
    const auto rep = aggregate(recs);
    CHECK(rep.mean_cd == doctest::Approx(2.0));
    CHECK(rep.std_cd == doctest::Approx(1.0));
    CHECK(std::isnan(rep.mean_uhd));
    const auto j = to_json(rep);
    CHECK(j.at("mean_uhd").is_null());
    CHECK(j.at("per_sample").size() == 3);
    CHECK(format_table(rep, "PCA+Opt").find("0/3 samples") != std::string::npos);
}

TEST_CASE("EvalConfig validation") {
    EvalConfig cfg;
    cfg.iou_threshold = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.iou_threshold = 1.0;
    CHECK_NOTHROW(cfg.validate());
}
