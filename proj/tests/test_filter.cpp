#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <gradex/filter.hpp>
#include <gradex/rng.hpp>

#include "oracles.hpp"

using namespace gradex;

namespace {

SensorSpec spec_with(double r_max, double fov_deg) {
    SensorSpec s;
    s.r_max = r_max;
    s.fov = fov_deg * kPi / 180.0;
    s.angular_resolution = kPi / 180.0;
    s.beam_aperture = s.angular_resolution;
    s.range_noise_eps = 0.1 * r_max;
    return s;
}

Grid<double> random_bd(int n, double res, std::mt19937_64& rng, double zero_fraction = 0.3) {
    Grid<double> bd(n, n, res);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double r = uni(rng);
            bd.at(i, j) = r < zero_fraction ? 0.0 : uni(rng);
        }
    return bd;
}

}  // namespace

TEST_CASE("distance falloff values") {
    const double R = 3.0;
    CHECK(distance_discount(0.5 * R, R) == 1.0);
    CHECK(distance_discount(R, R) == 1.0);  // continuous at the range boundary
    CHECK(distance_discount(1.5 * R, R) == 0.5);
    CHECK(distance_discount(2.0 * R, R) == 0.0);
    CHECK(distance_discount(2.5 * R, R) == 0.0);
}

TEST_CASE("angular falloff values") {
    const double fov = kPi / 2.0;
    CHECK(angle_discount({1.0, 0.0}, {1.0, 0.0}, fov) == 1.0);
    CHECK(angle_discount({1.0, 0.0}, {-1.0, 0.0}, fov) == 0.0);
    double v = angle_discount({1.0, 0.0}, {0.0, 1.0}, fov);
    CHECK(std::abs(v - 1.0 / (1.0 + std::cos(kPi / 4.0))) <= 1e-12);
    // Continuous at the field-of-view edge.
    double edge = std::cos(fov / 2.0);
    CHECK(angle_discount_from_dot(edge, fov) == 1.0);
    CHECK(angle_discount_from_dot(edge - 1e-9, fov) == Catch::Approx(1.0).margin(1e-8));
    // Full circular field of view discounts nothing.
    CHECK(angle_discount({1.0, 0.0}, {-1.0, 0.0}, 2.0 * kPi) == 1.0);
}

TEST_CASE("view filter footprint and landmark cells") {
    SensorSpec spec = spec_with(3.0, 90.0);
    const double res = 0.5;
    const int n = 40;
    ViewPoint vp{10.25, 10.25, 0.0};  // center of cell (20, 20)
    FuzzyFilter f = build_view_filter(vp, spec, n, n, res);
    const int half = filter_half_width(spec.r_max, res);
    CHECK(half == 12);
    CHECK(f.box.i_min == 20 - half);
    CHECK(f.box.i_max == 20 + half);
    // Own cell carries full credit.
    CHECK(f.at(20, 20) == 1.0);
    // On-axis cell at exactly the sensor range: both factors are 1.
    CHECK(f.at(20 + 6, 20) == 1.0);
    // On-axis cell at 1.5x range: distance ramp only.
    CHECK(f.at(20 + 9, 20) == 0.5);
    // Directly behind at the same distance: angular factor kills it.
    CHECK(f.at(20 - 6, 20) == 0.0);
    for (double v : f.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(build_view_filter({-0.1, 1.0, 0.0}, spec, n, n, res),
                    std::invalid_argument);
}

TEST_CASE("view gain: zero boundariness gives zero; a single ramp cell gives its discount") {
    SensorSpec spec = spec_with(3.0, 90.0);
    Grid<double> bd(40, 40, 0.5);
    ViewPoint vp{10.25, 10.25, 0.0};
    CHECK(view_information_gain(vp, bd, spec) == 0.0);
    bd.at(20 + 9, 20) = 1.0;  // on-axis, delta = 4.5 = 1.5 * r_max
    CHECK(view_information_gain(vp, bd, spec) == 0.5);
}

TEST_CASE("view gain equals dense full-map recomputation exactly") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double res = 0.2 + 0.3 * uni(rng);
        int n = 16 + static_cast<int>(uni(rng) * 14);
        SensorSpec spec = spec_with((0.1 + 0.3 * uni(rng)) * n * res, 40.0 + 280.0 * uni(rng));
        Grid<double> bd = random_bd(n, res, rng);
        ViewPoint vp{uni(rng) * n * res, uni(rng) * n * res, (2.0 * uni(rng) - 1.0) * kPi};
        CHECK(view_information_gain(vp, bd, spec) == oracles::dense_view_gain(vp, bd, spec));
    }
}

TEST_CASE("sampling plan density follows path length") {
    std::mt19937_64 rng = make_stream(4, "path-sample");
    const double res = 0.3;
    // Two-vertex 3 m path: expects ceil(3 / 0.6) = 5 view-points, 1 existing
    // segment endpoint pair -> 4 samples.
    Path path{{1.0, 1.0, 0.0}, {4.0, 1.0, 0.0}};
    PathSamplingPlan plan = make_sampling_plan(path, res, rng);
    CHECK(plan.samples.size() == 4);
    double prev = -1.0;
    for (const auto& s : plan.samples) {
        CHECK(s.segment == 0);
        CHECK(s.t >= 0.0);
        CHECK(s.t < 1.0);
        CHECK(s.t > prev);  // stratified draws are ordered along the path
        prev = s.t;
    }
    // A path already denser than one view-point per two cells needs nothing.
    Path dense;
    for (int k = 0; k <= 10; ++k) dense.push_back({1.0 + 0.3 * k, 2.0, 0.0});
    CHECK(make_sampling_plan(dense, res, rng).samples.empty());
    // Degenerate paths need nothing.
    CHECK(make_sampling_plan({{1.0, 1.0, 0.0}}, res, rng).samples.empty());
    Path tiny{{1.0, 1.0, 0.0}, {1.1, 1.0, 0.0}};
    CHECK(make_sampling_plan(tiny, res, rng).samples.empty());
}

TEST_CASE("interior view-points inside the endpoint footprints contribute nothing") {
    SensorSpec spec = spec_with(1.5, 90.0);
    std::mt19937_64 rng = make_stream(5, "path-sample");
    Grid<double> bd(32, 32, 0.3);
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) bd.at(i, j) = 0.7;
    // Short path: every interior point lies well inside the start footprint.
    Path path{{4.8, 4.8, 0.0}, {5.1, 4.9, 0.2}, {5.4, 5.0, 0.1}};
    PathGainResult res = path_information_gain(path, bd, spec, make_sampling_plan(path, 0.3, rng));
    CHECK(res.gain == 0.0);
}

TEST_CASE("disjoint footprints add up; duplicates are idempotent") {
    SensorSpec spec = spec_with(0.6, 120.0);
    const double res = 0.3;
    Grid<double> bd(40, 40, res);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int j = 0; j < 40; ++j)
        for (int i = 0; i < 40; ++i) bd.at(i, j) = uni(rng);

    // Endpoints in opposite corners, two interior view-points far apart and
    // far from both endpoints (footprint half-width is 4 cells).
    Path path{{0.5, 0.5, 0.0},
              {3.2, 6.1, 1.0},
              {8.3, 6.2, -1.0},
              {11.5, 11.5, 0.0}};
    PathSamplingPlan no_aug;  // no interpolated points: isolate the two interiors
    PathGainResult both = path_information_gain(path, bd, spec, no_aug);

    // Single-interior gains with the same endpoint exclusions.
    Path only_a{path[0], path[1], path[3]};
    Path only_b{path[0], path[2], path[3]};
    double ga = path_information_gain(only_a, bd, spec, no_aug).gain;
    double gb = path_information_gain(only_b, bd, spec, no_aug).gain;
    CHECK(both.gain == Catch::Approx(ga + gb).epsilon(1e-12));
    CHECK(both.gain >= std::max(ga, gb));  // max-union dominance, lower side
    CHECK(both.gain <= ga + gb + 1e-12);   // and upper side

    Path duplicated{path[0], path[1], path[1], path[2], path[3]};
    PathGainResult dup = path_information_gain(duplicated, bd, spec, no_aug);
    CHECK(dup.gain == both.gain);
}

TEST_CASE("raising boundariness never lowers information gain") {
    SensorSpec spec = spec_with(1.2, 90.0);
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Grid<double> bd = random_bd(24, 0.3, rng);
    ViewPoint vp{3.1, 3.3, 0.7};
    Path path{{1.0, 1.0, 0.0}, {3.1, 3.3, 0.7}, {6.0, 6.0, 0.0}};
    std::mt19937_64 plan_rng = make_stream(2, "path-sample");
    PathSamplingPlan plan = make_sampling_plan(path, 0.3, plan_rng);
    for (int k = 0; k < 30; ++k) {
        double before_view = view_information_gain(vp, bd, spec);
        double before_path = path_information_gain(path, bd, spec, plan).gain;
        int i = static_cast<int>(uni(rng) * 24);
        int j = static_cast<int>(uni(rng) * 24);
        bd.at(i, j) = std::min(1.0, bd.at(i, j) + uni(rng) * 0.5);
        CHECK(view_information_gain(vp, bd, spec) >= before_view);
        CHECK(path_information_gain(path, bd, spec, plan).gain >= before_path);
    }
}

TEST_CASE("path gain equals the dense oracle bit-for-bit") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        double res = 0.2 + 0.2 * uni(rng);
        int n = 18 + static_cast<int>(uni(rng) * 10);
        SensorSpec spec = spec_with((2.0 + 4.0 * uni(rng)) * res, 60.0 + 240.0 * uni(rng));
        Grid<double> bd = random_bd(n, res, rng);
        int verts = 2 + static_cast<int>(uni(rng) * 4);
        Path path;
        for (int v = 0; v < verts; ++v)
            path.push_back({uni(rng) * n * res, uni(rng) * n * res, (2.0 * uni(rng) - 1.0) * kPi});
        std::mt19937_64 plan_rng = make_stream(trial, "path-sample");
        PathSamplingPlan plan = make_sampling_plan(path, res, plan_rng);
        PathGainResult got = path_information_gain(path, bd, spec, plan);
        double expected = oracles::dense_path_gain(path, plan, bd, spec);
        CHECK(got.gain == expected);
    }
}

TEST_CASE("filter CSV dump lists footprint cells") {
    SensorSpec spec = spec_with(1.0, 90.0);
    FuzzyFilter f = build_view_filter({2.0, 2.0, 0.0}, spec, 16, 16, 0.25);
    auto tmp = std::filesystem::temp_directory_path() / "gradex_test_filter.csv";
    f.write_csv(tmp);
    std::string text = read_text_file(tmp);
    CHECK(text.rfind("i,j,discount\n", 0) == 0);
    std::size_t rows = std::count(text.begin(), text.end(), '\n') - 1;
    CHECK(rows == f.footprint_size());
    std::filesystem::remove(tmp);
}
