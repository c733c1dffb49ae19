#include <cstdio>
#include <fstream>

#include "discflow/render.hpp"
#include "doctest.h"

using namespace discflow;

TEST_CASE("roll designs show 2n azimuthal cells") {
    PolarGrid grid(128, 32, 2.0);
    for (const char* src : {"constant", "gaussian-center", "gaussian-ring",
                            "quadrupole"}) {
        Source s = make_source(src, grid);
        for (int n : {2, 3, 8}) {
            FlowDesign d = roll_flow(s, n);
            CHECK(azimuthal_sign_changes(d, 0.6) == 2 * n);
        }
    }
}

TEST_CASE("branching designs double their cell count across each ring") {
    PolarGrid grid(512, 512, 2.0);
    const BranchingPlan plan = branching_plan(1e4);
    for (const char* src : {"constant", "quadrupole"}) {
        Source s = make_source(src, grid);
        FlowDesign d = branching_flow(s, plan);
        for (int k = 0; k < plan.n; ++k) {
            CHECK(azimuthal_sign_changes(d, plan.r[k]) == 2 * plan.inv_l[k]);
        }
    }
}

TEST_CASE("svg output is valid, deterministic, and sign-colored") {
    PolarGrid grid(96, 24, 2.0);
    Source s = make_source("constant", grid);
    FlowDesign d = roll_flow(s, 2);
    const std::string svg1 = render_streamlines_svg(d);
    const std::string svg2 = render_streamlines_svg(d);
    CHECK(svg1 == svg2);
    CHECK(svg1.find("<svg") != std::string::npos);
    CHECK(svg1.find("</svg>") != std::string::npos);
    CHECK(svg1.find("#7b3294") != std::string::npos);  // counterclockwise
    CHECK(svg1.find("#0571b0") != std::string::npos);  // clockwise

    const std::string path = "/tmp/discflow_render_test.svg";
    render_streamlines(d, path);
    std::ifstream in(path, std::ios::binary);
    std::string on_disk((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(on_disk == svg1);
    std::remove(path.c_str());
}

TEST_CASE("zero streamfunction renders an empty but valid file") {
    PolarGrid grid(96, 24, 2.0);
    Source s = make_source("constant", grid);
    FlowDesign d = rescale_to_pe(roll_flow(s, 2), 0.0, false);
    const std::string svg = render_streamlines_svg(d);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<path") == std::string::npos);
    CHECK(azimuthal_sign_changes(d, 0.5) == 0);
}

TEST_CASE("unwritable paths are reported") {
    PolarGrid grid(96, 24, 2.0);
    Source s = make_source("constant", grid);
    FlowDesign d = roll_flow(s, 2);
    CHECK_THROWS_AS(render_streamlines(d, "/nonexistent-dir/x.svg"),
                    std::runtime_error);
}
