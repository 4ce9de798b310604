// Writes a small synthetic Cornell-layout dataset with replay fixtures, plus
// loose cloud and mask files, for exercising the CLI end to end.
//
//   make_synthetic_dataset OUT_DIR [SAMPLES]

#include "synthetic.hpp"
#include "vlad/lifting/image_io.hpp"
#include "vlad/lifting/lifting.hpp"
#include "vlad/pcmath/cloud_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

using namespace vlad;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_synthetic_dataset OUT_DIR [SAMPLES]\n";
        return 2;
    }
    const fs::path out = argv[1];
    const int n = argc > 2 ? std::stoi(argv[2]) : 6;
    fs::remove_all(out);
    const fs::path data = out / "cornell";
    for (int i = 0; i < n; ++i) {
        const auto kind = i % 2 == 1 ? testing::FixtureKind::RotatedScaled : testing::FixtureKind::Identity;
        char id[16];
        std::snprintf(id, sizeof id, "pcd%04d", i);
        testing::write_cornell_sample(data, data / "fixtures", testing::make_case(kind, id, i));
    }
    const auto k = testing::synthetic_camera();
    std::ofstream(data / "camera.json") << nlohmann::json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}}.dump();

    const auto c = testing::make_case(testing::FixtureKind::RotatedScaled, "loose");
    pcmath::write_xyz(out / "scene.xyz",
                      lifting::backproject(c.scene_render.depth, c.scene_render.object, k, pcmath::Frame::Scene));
    pcmath::write_xyz(out / "generated.xyz",
                      lifting::backproject(c.outputs.depth_g, c.outputs.mask_object_g, k, pcmath::Frame::Generated));
    lifting::write_mask_png(out / "object.png", c.scene_render.object);
    const testing::RodSpec rod;
    lifting::write_mask_png(out / "rod.png", testing::render(c.scene, &rod).rod);
    std::cout << "wrote " << n << " samples to " << data << '\n';
    return 0;
}
