#include <cmath>

#include "discflow/flow.hpp"
#include "doctest.h"

using namespace discflow;

namespace {
constexpr double kPe4Ratio = 14.880609500146546;  // cbrt(1e4)/log(1e4)^{1/6}
}

TEST_CASE("roll streamfunction for the unit source") {
    PolarGrid grid(256, 16, 2.0);
    Source s = make_source("constant", grid);
    for (int n : {2, 5}) {
        FlowDesign d = roll_flow(s, n);
        // psi = r^2 cos(n t) / (sqrt2 n): pure cos mode n
        const auto& psi = d.psi();
        for (int i = 0; i < grid.nr(); i += 37) {
            const double r = grid.r(i);
            CHECK(psi.at(2 * n - 1, i) ==
                  doctest::Approx(r * r / (std::sqrt(2.0) * n)).epsilon(1e-10));
        }
        double off = 0.0;
        for (int c = 0; c < psi.ncomp(); ++c) {
            if (c == 2 * n - 1) continue;
            for (int i = 0; i < grid.nr(); ++i) off = std::max(off, std::abs(psi.at(c, i)));
        }
        CHECK(off <= 1e-13);
    }
}

TEST_CASE("roll energy and enstrophy match the symbolic values") {
    PolarGrid grid(256, 32, 2.0);
    Source s = make_source("constant", grid);
    for (int n : {2, 3, 8}) {
        FlowDesign d = roll_flow(s, n);
        const double energy = 0.125 + 0.5 / (n * n);
        const double enstrophy = 0.25 * n * n - 0.5 + 2.0 / (n * n);
        CHECK(d.energy() == doctest::Approx(energy).epsilon(1e-10));
        CHECK(d.enstrophy() == doctest::Approx(enstrophy).epsilon(1e-10));
    }
}

TEST_CASE("roll enstrophy grows fourfold under n doubling") {
    PolarGrid grid(256, 96, 2.0);
    Source s = make_source("gaussian-center", grid);
    double prev = roll_flow(s, 8).enstrophy();
    for (int n : {16, 32}) {
        const double e = roll_flow(s, n).enstrophy();
        CHECK(e / prev >= 3.0);
        CHECK(e / prev <= 5.0);
        prev = e;
    }
}

TEST_CASE("core taper makes grad_eta finite and smaller") {
    PolarGrid grid(256, 16, 2.0);
    Source s = make_source("constant", grid);
    FlowDesign bare = roll_flow(s, 4, 0.0);
    FlowDesign tapered = roll_flow(s, 4, 0.25);
    CHECK(std::isfinite(bare.grad_eta()));
    CHECK(tapered.grad_eta() < bare.grad_eta());
    CHECK_THROWS_AS(roll_flow(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(roll_flow(s, 4, 0.3), std::invalid_argument);
}

TEST_CASE("branching plan at pe = 1e4") {
    const BranchingPlan plan = branching_plan(1e4);
    CHECK(plan.n == 3);
    REQUIRE(plan.inv_l == std::vector<long>{30, 60, 120});

    // closed-form radii from the interpolation rule l_k = c sqrt(1 - r_k)
    const double expect_r[3] = {1.0 - std::pow(kPe4Ratio / 30.0, 2),
                                1.0 - std::pow(kPe4Ratio / 60.0, 2),
                                1.0 - std::pow(kPe4Ratio / 120.0, 2)};
    for (int k = 0; k < 3; ++k)
        CHECK(plan.r[k] == doctest::Approx(expect_r[k]).epsilon(1e-12));
    CHECK(plan.delta_bl == doctest::Approx(0.0153772).epsilon(1e-4));
    CHECK(plan.r[0] == doctest::Approx(0.75396).epsilon(1e-4));
    CHECK(plan.r[1] == doctest::Approx(0.93849).epsilon(1e-4));
    CHECK(plan.r[2] == doctest::Approx(0.98462).epsilon(1e-4));

    // interpolation rule holds to machine precision
    for (int k = 0; k < plan.n; ++k)
        CHECK(std::abs(plan.ell(plan.r[k]) - plan.l[k]) <= 1e-12);
}

TEST_CASE("branching plan satisfies the layer hypotheses") {
    for (double pe : {70.0, 316.0, 1e3, 1e4, 3.16e4, 1e5, 1e6}) {
        const BranchingPlan plan = branching_plan(pe);
        CHECK(plan.n >= 1);
        CHECK(plan.r.front() > 0.5);
        CHECK(plan.r.back() < 1.0);
        const double ratio = std::cbrt(pe) / std::pow(std::log(pe), 1.0 / 6.0);
        CHECK(plan.inv_l.front() >= 2.0 * ratio - 1e-9);
        CHECK(plan.inv_l.front() <= 4.0 * ratio + 1e-9);
        CHECK(plan.n == static_cast<int>(std::floor(std::log2(ratio))));
        for (int k = 0; k + 1 < plan.n; ++k) {
            CHECK(plan.r[k + 1] > plan.r[k]);
            CHECK(plan.l[k + 1] == 0.5 * plan.l[k]);            // |l_{k+1}-l_k| = l_{k+1}
            const double dr = plan.delta(k + 1) / plan.delta(k);
            CHECK(dr >= 1.0 / 8.0);
            CHECK(dr <= 8.0);
        }
        for (int k = 0; k < plan.n; ++k) CHECK(plan.l[k] <= 4.0 * plan.delta(k));
    }
    CHECK_THROWS_AS(branching_plan(50.0), std::invalid_argument);
}

TEST_CASE("cutoff family is a square partition of unity") {
    const BranchingPlan plan = branching_plan(1e4);
    const CutoffSet cuts = cutoff_family(plan);
    for (int q = 1; q <= 10000; ++q) {
        const double r = plan.r.back() * (q - 0.5) / 10000.0;
        double sum = 0.0;
        int active = 0;
        for (int k = 0; k < plan.n; ++k) {
            double chi, d1, d2;
            cuts.eval(k, r, chi, d1, d2);
            sum += chi * chi;
            if (chi != 0.0 || d1 != 0.0) {
                ++active;
                // support of chi_k is (r_{k-1}, r_{k+1})
                if (k > 0) CHECK(r > plan.r[k - 1]);
                if (k + 1 < plan.n) CHECK(r < plan.r[k + 1]);
            }
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(active <= 2);  // only adjacent layers overlap
    }
    // chi_1 = 1 on (0, r_1]
    for (double r : {0.01, 0.3, plan.r[0]}) {
        double chi, d1, d2;
        cuts.eval(0, r, chi, d1, d2);
        CHECK(chi == 1.0);
        CHECK(d1 == 0.0);
    }
    // boundary ramp: chi_n(1) = chi_n'(1) = 0 and |chi'| <= 8/delta
    double chi, d1, d2;
    cuts.eval(plan.n - 1, 1.0, chi, d1, d2);
    CHECK(chi == 0.0);
    CHECK(d1 == 0.0);
    for (int q = 0; q <= 1000; ++q) {
        const double r = plan.r.back() + (1.0 - plan.r.back()) * q / 1000.0;
        cuts.eval(plan.n - 1, r, chi, d1, d2);
        CHECK(std::abs(d1) <= 8.0 / plan.delta_bl);
        CHECK(std::abs(d2) <= 64.0 / (plan.delta_bl * plan.delta_bl));
    }
}

TEST_CASE("branching flow construction invariants at pe = 1e4") {
    PolarGrid grid(512, 512, 2.0);
    Source s = make_source("constant", grid);
    const BranchingPlan plan = branching_plan(1e4);
    FlowDesign d = branching_flow(s, plan);

    CHECK(max_abs(divergence(d.velocity())) <= 1e-8);
    const int last = grid.nr() - 1;
    for (int c = 0; c < d.velocity().r_comp.ncomp(); ++c) {
        CHECK(std::abs(d.velocity().r_comp.at(c, last)) <= 1e-10);
        CHECK(std::abs(d.velocity().theta_comp.at(c, last)) <= 1e-10);
        CHECK(std::abs(d.eta().at(c, last)) <= 1e-12);
    }
    CHECK(std::isfinite(d.enstrophy()));
    CHECK(std::isfinite(d.grad_eta()));
    CHECK(d.enstrophy() > 0.0);
}

TEST_CASE("branching diagnostics are stable under radial refinement") {
    const BranchingPlan plan = branching_plan(1e4);
    auto diag = [&](int nr) {
        PolarGrid grid(nr, 512, 2.0);
        Source s = make_source("constant", grid);
        FlowDesign d = branching_flow(s, plan);
        return std::pair<double, double>(d.enstrophy(), d.grad_eta());
    };
    const auto coarse = diag(256);
    const auto fine = diag(512);
    CHECK(std::abs(coarse.first - fine.first) <= 0.01 * fine.first);
    CHECK(std::abs(coarse.second - fine.second) <= 0.01 * fine.second);
}

TEST_CASE("under-resolved branching grids are rejected with the mode count") {
    PolarGrid grid(64, 64, 2.0);
    Source s = make_source("constant", grid);
    const BranchingPlan plan = branching_plan(1e4);  // needs 480 modes
    try {
        branching_flow(s, plan);
        FAIL("expected under-resolution error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("480") != std::string::npos);
    }
}

TEST_CASE("energy roll design") {
    PolarGrid grid(256, 64, 2.0);
    Source s = make_source("constant", grid);
    FlowDesign d = energy_roll_design(s, 100.0);
    REQUIRE(d.plan().has_value());
    CHECK(d.plan()->inv_l.front() == 10);
    // the streamlines turn inside a 1/pe layer (see the design note in
    // energy_roll_design)
    CHECK(d.plan()->delta_bl == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(d.energy() > 0.0);
    CHECK(d.energy() < 4.0);
    CHECK_THROWS_AS(energy_roll_design(s, 3.0), std::invalid_argument);

    // no-slip at the wall
    const int last = grid.nr() - 1;
    for (int c = 0; c < d.velocity().r_comp.ncomp(); ++c) {
        CHECK(std::abs(d.velocity().r_comp.at(c, last)) <= 1e-10);
        CHECK(std::abs(d.velocity().theta_comp.at(c, last)) <= 1e-10);
    }
}

TEST_CASE("rescaling to a Peclet number") {
    PolarGrid grid(128, 16, 2.0);
    Source s = make_source("constant", grid);
    FlowDesign d = roll_flow(s, 2);

    FlowDesign ens = rescale_to_pe(d, 10.0, false);
    CHECK(ens.u_scale() == doctest::Approx(10.0).epsilon(1e-10));  // enstrophy = 1
    CHECK(ens.enstrophy() == doctest::Approx(100.0).epsilon(1e-10));
    CHECK(ens.eta_scale() == doctest::Approx(0.1).epsilon(1e-10));

    FlowDesign ene = rescale_to_pe(d, 10.0, true);
    CHECK(ene.u_scale() == doctest::Approx(20.0).epsilon(1e-10));  // energy = 1/4
    CHECK(ene.energy() == doctest::Approx(100.0).epsilon(1e-10));

    FlowDesign twice = rescale_to_pe(ens, 10.0, false);
    CHECK(twice.u_scale() == doctest::Approx(ens.u_scale()).epsilon(1e-12));

    // the sampled fields scale consistently with the evaluator
    const auto fs = ens.eval(64, 3);
    const auto fs0 = d.eval(64, 3);
    CHECK(fs.u_r == doctest::Approx(10.0 * fs0.u_r).epsilon(1e-12));
    CHECK(fs.eta == doctest::Approx(0.1 * fs0.eta).epsilon(1e-12));
    CHECK(ens.psi().at(3, 64) == doctest::Approx(10.0 * d.psi().at(3, 64)).epsilon(1e-12));
}

TEST_CASE("quadratic diagnostics match independent spectral routes") {
    PolarGrid grid(384, 256, 2.0);
    Source s = make_source("gaussian-center", grid);
    FlowDesign d = branching_flow(s, branching_plan(1000.0));

    // energy from the sampled analytic velocity components
    std::vector<double> cur(static_cast<size_t>(grid.nr()) * grid.ntheta());
    std::vector<double> cut(cur.size()), ceta(cur.size());
    for (int i = 0; i < grid.nr(); ++i)
        for (int j = 0; j < grid.ntheta(); ++j) {
            const FlowSample fs = d.eval(i, j);
            const size_t k = static_cast<size_t>(i) * grid.ntheta() + j;
            cur[k] = fs.u_r;
            cut[k] = fs.u_t;
            ceta[k] = fs.eta;
        }
    SpectralScalar ur = from_collocation(grid, cur);
    SpectralScalar ut = from_collocation(grid, cut);
    const double energy = l2_mean_square(ur) + l2_mean_square(ut);
    CHECK(energy == doctest::Approx(d.energy()).epsilon(1e-8));

    // grad_eta from spectral differentiation of the sampled test function
    SpectralScalar eta = from_collocation(grid, ceta);
    CHECK(grad_mean_square(eta) == doctest::Approx(d.grad_eta()).epsilon(1e-5));
}
