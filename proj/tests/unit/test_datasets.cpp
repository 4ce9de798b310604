#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synthetic.hpp"
#include "vlad/datasets/datasets.hpp"
#include "vlad/error.hpp"
#include "vlad/lifting/image_io.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

using namespace vlad;
using namespace vlad::datasets;
namespace fs = std::filesystem;

namespace {

void write_images(const fs::path& dir, const std::string& rgb, const std::string& depth) {
    fs::create_directories(dir);
    lifting::write_rgb_png(dir / rgb, lifting::RgbImage(8, 6, 10, 20, 30));
    lifting::write_depth_png_mm(dir / depth, lifting::DepthMap(8, 6, 0.75f));
}

void jacquard_sample(const fs::path& dir, const std::string& id, int lines) {
    write_images(dir, id + "_RGB.png", id + "_depth.png");
    std::ofstream out(dir / (id + "_grasps.txt"));
    for (int i = 0; i < lines; ++i) {
        out << 100 + i % 7 << ';' << 200 - i % 5 << ';' << (i * 13) % 180 - 90 << ';' << 30 + i % 4 << ";12\n";
    }
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

TEST_CASE("Cornell corners to rectangle") {
    std::istringstream in("0 0\n10 0\n10 4\n0 4\n");
    std::size_t warnings = 0;
    const auto rects = parse_cornell_rectangles(in, warnings);
    REQUIRE(rects.size() == 1);
    CHECK(warnings == 0);
    CHECK(rects[0].center.isApprox(graspx::Vec2(5, 2)));
    CHECK(rects[0].angle == doctest::Approx(0.0));
    CHECK(rects[0].width == doctest::Approx(10.0));
    CHECK(rects[0].height == doctest::Approx(4.0));
}

TEST_CASE("Cornell: incomplete or malformed groups are dropped with a warning") {
    std::istringstream seven("0 0\n10 0\n10 4\n0 4\n1 1\n2 2\n3 3\n");
    std::size_t warnings = 0;
    CHECK(parse_cornell_rectangles(seven, warnings).size() == 1);
    CHECK(warnings == 1);

    std::istringstream nan("0 0\n10 0\nNaN NaN\n0 4\n0 0\n10 0\n10 4\n0 4\n");
    warnings = 0;
    CHECK(parse_cornell_rectangles(nan, warnings).size() == 1);
    CHECK(warnings == 1);
}

TEST_CASE("Jacquard line conversion") {
    const auto r = parse_jacquard_line("50;60;45;20;10");
    REQUIRE(r);
    CHECK(r->center.isApprox(graspx::Vec2(50, 60)));
    CHECK(r->angle == doctest::Approx(std::numbers::pi / 4));
    CHECK(r->width == 20);
    CHECK(r->height == 10);
    CHECK(!parse_jacquard_line("50;60;45;20"));
    CHECK(!parse_jacquard_line("50;60;45;0;10"));
    CHECK(!parse_jacquard_line("a;b;c;d;e"));

    const auto back = parse_jacquard_line(format_jacquard_line(*r));
    REQUIRE(back);
    CHECK(back->angle == doctest::Approx(r->angle));
    // Angles normalize into (-pi/2, pi/2].
    CHECK(parse_jacquard_line("1;1;135;5;5")->angle == doctest::Approx(-std::numbers::pi / 4));
}

TEST_CASE("Jacquard minimum-annotation boundary is inclusive") {
    testing::TempDir dir("jacquard");
    jacquard_sample(dir.path() / "a", "0_aaa", 99);
    jacquard_sample(dir.path() / "b", "1_bbb", 100);
    jacquard_sample(dir.path() / "b", "2_ccc", 0);
    const auto report = load_jacquard_report(dir.path());
    REQUIRE(report.samples.size() == 1);
    CHECK(report.samples[0].id == "1_bbb");
    CHECK(report.samples[0].annotations.size() == 100);
    CHECK(report.samples[0].annotations[0].source == AnnotationSource::Simulated);
    CHECK(report.excluded == 2);
    CHECK(report.files_seen == 3);
    CHECK(load_jacquard(dir.path(), 50).size() == 2);
}

TEST_CASE("Cornell loader: layout, ordering, camera, masks and negatives") {
    testing::TempDir dir("cornell");
    const auto root = dir.path();
    for (const std::string id : {"pcd0102", "pcd0100", "pcd0101"}) {
        write_images(root / "01", id + "r.png", id + "d.png");
        std::ofstream(root / "01" / (id + "cpos.txt")) << "0 0\n10 0\n10 4\n0 4\n";
        std::ofstream(root / "01" / (id + "cneg.txt")) << "1 1\n2 2\n";
    }
    std::ofstream(root / "01" / "pcd0103cpos.txt") << "";
    write_images(root / "01", "pcd0103r.png", "pcd0103d.png");
    lifting::write_mask_png(root / "01" / "pcd0100mask.png", lifting::BinaryMask(8, 6, true));
    std::ofstream(root / "camera.json") << R"({"fx": 500, "fy": 510, "cx": 4, "cy": 3})";

    const auto report = load_cornell_report(root);
    REQUIRE(report.samples.size() == 3);
    CHECK(report.excluded == 1);
    CHECK(report.samples[0].id == "pcd0100");
    CHECK(report.samples[2].id == "pcd0102");
    CHECK(report.samples[0].annotations[0].source == AnnotationSource::Human);
    REQUIRE(report.samples[0].intrinsics);
    CHECK(report.samples[0].intrinsics->fy == 510);
    CHECK(load_object_mask(report.samples[0])->count() == 48);
    CHECK(!load_object_mask(report.samples[1]));
    CHECK(load_depth(report.samples[1]).at(0, 0) == doctest::Approx(0.75f));
    CHECK(load_rgb(report.samples[1]).width() == 8);

    const auto picked = filter_by_ids(load_cornell(root), {"pcd0101"});
    REQUIRE(picked.size() == 1);
    std::ofstream(root / "ids.txt") << "# unseen\npcd0101\n\npcd0102\n";
    CHECK(read_id_list(root / "ids.txt") == std::set<std::string>{"pcd0101", "pcd0102"});
}

TEST_CASE("loader errors") {
    CHECK(code_of([] { load_cornell("/nonexistent/vlad"); }) == ErrorCode::MissingDirectory);
    testing::TempDir dir("empty");
    CHECK(code_of([&] { load_jacquard(dir.path()); }) == ErrorCode::NoSamples);
    CHECK(code_of([] { parse_dataset_kind("imagenet"); }) == ErrorCode::InvalidArgument);
    CHECK(parse_dataset_kind("jacquard") == DatasetKind::Jacquard);
}

TEST_CASE("Cornell rectangles round-trip through the corner format") {
    const std::vector<graspx::GraspRectangle> rects{{{10, 20}, 0.3, 15, 5}, {{40.25, 7.5}, -1.2, 30, 8}};
    std::istringstream in(format_cornell_rectangles(rects));
    std::size_t warnings = 0;
    const auto back = parse_cornell_rectangles(in, warnings);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK((back[i].center - rects[i].center).norm() < 1e-9);
        CHECK(back[i].angle == doctest::Approx(rects[i].angle));
        CHECK(back[i].width == doctest::Approx(rects[i].width));
        CHECK(back[i].height == doctest::Approx(rects[i].height));
    }
}
