#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include <gradex/occupancy.hpp>
#include <gradex/rng.hpp>

using namespace gradex;

namespace {

SensorSpec narrow_beam() {
    SensorSpec s;
    s.r_max = 3.0;
    s.fov = kPi / 2.0;
    s.angular_resolution = kPi / 180.0;
    s.beam_aperture = kPi / 180.0;
    s.range_noise_eps = 0.5;
    return s;
}

}  // namespace

TEST_CASE("inverse sensor model branch values") {
    SensorSpec spec = narrow_beam();
    InverseSensorModel model(spec);
    const double R = 2.0, eps = spec.range_noise_eps;

    // On-axis the angular factor is 1, so the distance factor decides.
    CHECK(model.occupancy_probability(0.0, 0.0, R) == 0.0);          // certainly free
    CHECK(model.occupancy_probability(R, 0.0, R) == 1.0);            // certainly occupied
    CHECK(model.occupancy_probability(R - eps, 0.0, R) == 0.5);      // branch boundary
    CHECK(model.occupancy_probability(R + eps, 0.0, R) == 0.5);      // band edge
    CHECK(model.occupancy_probability(R + eps + 0.1, 0.0, R) == 0.5);  // no information

    // At the beam edge the angular factor vanishes for any distance.
    double half_ap = spec.beam_aperture / 2.0;
    CHECK(model.occupancy_probability(0.3, half_ap, R) == 0.5);
    CHECK(model.occupancy_probability(R, -half_ap, R) == 0.5);

    CHECK_THROWS_AS(model.occupancy_probability(1.0, half_ap * 1.01, R), OutOfBeamError);
}

TEST_CASE("inverse sensor model stays a probability") {
    SensorSpec spec = narrow_beam();
    InverseSensorModel model(spec);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        double range = 0.1 + uni(rng) * (spec.r_max - 0.1);
        double delta = uni(rng) * (range + spec.range_noise_eps + 1.0);
        double theta = (2.0 * uni(rng) - 1.0) * spec.beam_aperture / 2.0;
        double p = model.occupancy_probability(delta, theta, range);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("a single on-axis hit saturates the cell to the upper clamp") {
    LogOddsMap map(20, 20, 0.3);
    SensorSpec spec = narrow_beam();
    InverseSensorModel model(spec);
    // One synthetic beam whose measured range lands exactly on a cell center.
    Scan scan;
    scan.origin = {0.45, 1.05, 0.0};  // center of cell (1, 3)
    double target = distance(Vec2{3.15, 1.05}, scan.origin.position());  // cell (10, 3)
    scan.beams.push_back({0.0, target, true});
    map.integrate_scan(scan, model);
    CHECK(map.value(10, 3) == map.l_max());
    // Cells well before the hit turned free.
    CHECK(map.value(5, 3) < 0.0);
}

TEST_CASE("clamping is idempotent at the bounds and updates converge") {
    LogOddsMap map(20, 20, 0.25);
    SensorSpec spec = narrow_beam();
    InverseSensorModel model(spec);
    Scan scan;
    scan.origin = {1.125, 1.125, 0.0};
    scan.beams.push_back({0.0, 2.5, true});
    for (int k = 0; k < 30; ++k) map.integrate_scan(scan, model);
    Grid<double> after30 = map.grid();
    map.integrate_scan(scan, model);
    CHECK(map.grid() == after30);  // values settled on the clamp bounds
    for (double v : map.grid().data()) {
        CHECK(v >= map.l_min());
        CHECK(v <= map.l_max());
    }
}

TEST_CASE("probability round trips") {
    BbfParams bbf;
    LogOddsMap map(4, 4, 1.0, bbf);
    CHECK(LogOddsMap::log_odds_to_probability(0.0) == 0.5);
    CHECK(LogOddsMap::log_odds_to_probability(bbf.l_max) == Catch::Approx(0.9).margin(1e-12));
    CHECK(LogOddsMap::log_odds_to_probability(bbf.l_min) == Catch::Approx(0.3).margin(1e-12));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.05, 0.95);
    for (int k = 0; k < 1000; ++k) {
        double p = uni(rng);
        double rt = LogOddsMap::log_odds_to_probability(LogOddsMap::probability_to_log_odds(p));
        CHECK(std::abs(rt - p) < 1e-12);
    }
}

TEST_CASE("update order commutes below saturation") {
    SensorSpec spec = narrow_beam();
    spec.range_noise_eps = 1.0;  // mild evidence per update
    InverseSensorModel model(spec);
    Scan a, b;
    a.origin = {1.05, 2.05, 0.0};
    a.beams.push_back({0.0, 2.9, true});
    b.origin = {1.05, 2.05, 0.3};
    b.beams.push_back({0.0, 2.9, true});

    LogOddsMap ab(24, 24, 0.25);
    ab.integrate_scan(a, model);
    ab.integrate_scan(b, model);
    LogOddsMap ba(24, 24, 0.25);
    ba.integrate_scan(b, model);
    ba.integrate_scan(a, model);
    for (int j = 0; j < 24; ++j)
        for (int i = 0; i < 24; ++i) {
            CHECK(ab.value(i, j) == ba.value(i, j));
            CHECK(ab.value(i, j) >= ab.l_min());
            CHECK(ab.value(i, j) <= ab.l_max());
        }
}

TEST_CASE("scanning an empty corridor carves free space along the beam") {
    WorldMap world(40, 8, 0.25);  // 10 m x 2 m corridor
    SensorSpec spec = narrow_beam();
    InverseSensorModel model(spec);
    LogOddsMap map(40, 8, 0.25);
    ViewPoint pose{0.625, 1.0, 0.0};
    Scan scan = cast_scan(world, pose, spec);
    map.integrate_scan(scan, model);
    // Every cell on the beam axis nearer than range - eps must read free.
    for (int i = 3; i < 40; ++i) {
        Vec2 c = map.grid().center(i, 4);
        double delta = distance(c, pose.position());
        if (delta < spec.r_max - spec.range_noise_eps && std::abs(c.y - pose.y) < 0.2)
            CHECK(map.value(i, 4) < 0.0);
    }
}

TEST_CASE("scan fusion respects clamp bounds under random scan sequences") {
    WorldMap world(30, 30, 0.3);
    Grid<std::uint8_t> cells = world.grid();
    cells.at(12, 14) = 1;
    cells.at(20, 8) = 1;
    world = WorldMap::from_grid(std::move(cells));
    SensorSpec spec = narrow_beam();
    InverseSensorModel model(spec);
    LogOddsMap map(30, 30, 0.3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int known_before = 0;
    for (int s = 0; s < 25; ++s) {
        ViewPoint pose;
        do {
            pose = {uni(rng) * world.width_m(), uni(rng) * world.height_m(),
                    (2.0 * uni(rng) - 1.0) * kPi};
        } while (!world.point_free(pose.x, pose.y));
        CellBox touched = map.integrate_scan(cast_scan(world, pose, spec), model);
        CHECK_FALSE(touched.empty());
        int known = 0;
        for (double v : map.grid().data()) {
            CHECK(v >= map.l_min());
            CHECK(v <= map.l_max());
            if (v != 0.0) ++known;
        }
        CHECK(known >= known_before);  // evidence never un-knows a cell
        known_before = known;
    }
}

TEST_CASE("log-odds CSV snapshot round trips exactly") {
    LogOddsMap map(9, 7, 0.5);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(-0.8, 2.1);
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 9; ++i) map.set_value(i, j, uni(rng));
    auto tmp = std::filesystem::temp_directory_path() / "gradex_test_odds.csv";
    map.write_csv(tmp);
    LogOddsMap loaded = LogOddsMap::load_csv(tmp);
    REQUIRE(loaded.width() == 9);
    REQUIRE(loaded.height() == 7);
    CHECK(loaded.resolution() == 0.5);
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 9; ++i) CHECK(loaded.value(i, j) == map.value(i, j));
    std::filesystem::remove(tmp);
}
