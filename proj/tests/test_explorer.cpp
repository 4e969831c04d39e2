#include <catch2/catch_amalgamated.hpp>

#include <gradex/collision.hpp>
#include <gradex/explorer.hpp>

using namespace gradex;

namespace {

ExplorationConfig base_config() {
    ExplorationConfig cfg;
    cfg.sensor.r_max = 1.5;
    cfg.sensor.fov = kPi / 2.0;
    cfg.sensor.angular_resolution = kPi / 180.0;
    cfg.sensor.beam_aperture = cfg.sensor.angular_resolution;
    cfg.sensor.range_noise_eps = 0.3;
    cfg.goal.sample_count = 120;
    cfg.rrt.max_iterations = 3000;
    cfg.seed = 1;
    return cfg;
}

}  // namespace

TEST_CASE("coverage metrics on canonical belief states") {
    WorldMap world(12, 12, 0.3);
    LogOddsMap odds(12, 12, 0.3);

    CoverageMetrics untouched = coverage_metrics(odds, world);
    CHECK(untouched.free_correct == 0.0);
    CHECK(untouched.occ_correct == 0.0);
    CHECK(untouched.unknown_fraction == 1.0);

    for (int j = 0; j < 12; ++j)
        for (int i = 0; i < 12; ++i)
            odds.set_value(i, j, world.occupied(i, j) ? odds.l_max() : odds.l_min());
    CoverageMetrics perfect = coverage_metrics(odds, world);
    CHECK(perfect.free_correct == 1.0);
    CHECK(perfect.occ_correct == 1.0);
    CHECK(perfect.unknown_fraction == 0.0);
}

TEST_CASE("coverage fractions partition per ground-truth class") {
    WorldMap world(16, 16, 0.3);
    Grid<std::uint8_t> cells = world.grid();
    cells.at(7, 7) = 1;
    cells.at(8, 7) = 1;
    world = WorldMap::from_grid(std::move(cells));
    LogOddsMap odds(16, 16, 0.3);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) {
            double r = uni(rng);
            if (std::abs(r) > 0.3) odds.set_value(i, j, r);
        }
    CoverageMetrics m = coverage_metrics(odds, world);
    CHECK(m.free_correct + m.free_wrong + m.free_unknown == Catch::Approx(1.0).margin(1e-12));
    CHECK(m.occ_correct + m.occ_wrong + m.occ_unknown == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("a room fully visible from the start needs no planning episodes") {
    WorldMap world(10, 10, 0.3);  // 3 m square, diagonal ~4.2 m
    ExplorationConfig cfg = base_config();
    cfg.sensor.r_max = 5.0;
    cfg.sensor.fov = 2.0 * kPi;
    cfg.sensor.range_noise_eps = 0.4;
    ExplorationResult result = run_exploration(world, {1.5, 1.5, 0.0}, cfg);
    CHECK(result.report.status == "terminated");
    CHECK(result.report.episodes_run <= 1);
    CHECK(result.report.final_coverage.free_correct > 0.95);
    CHECK(count_above(result.bd, cfg.termination.bd_threshold) <=
          cfg.termination.min_boundary_cells);
}

TEST_CASE("exploration explores: coverage grows, knowledge never shrinks, paths stay safe") {
    WorldMap world = WorldMap::load("scenarios/room32.txt");
    ExplorationConfig cfg = base_config();
    cfg.termination.max_episodes = 8;  // a short prefix of the run is enough here

    TraversabilityMap truth(world);
    int last_known = 0;
    double last_coverage = 0.0;
    int episodes_seen = 0;
    run_exploration(world, {1.5, 1.5, 0.0}, cfg, [&](const EpisodeSnapshot& ep) {
        ++episodes_seen;
        int known = 0;
        for (double v : ep.odds.grid().data())
            if (v != 0.0) ++known;
        CHECK(known >= last_known);
        last_known = known;
        CHECK(ep.record.coverage.free_correct >= last_coverage - 1e-12);
        last_coverage = ep.record.coverage.free_correct;
        // No executed segment may touch a ground-truth obstacle.
        REQUIRE(ep.record.executed.size() >= 1);
        for (std::size_t i = 1; i < ep.record.executed.size(); ++i)
            CHECK(truth.segment_free(ep.record.executed[i - 1].position(),
                                     ep.record.executed[i].position()));
        CHECK(ep.record.descent_monotone);
        CHECK(ep.record.endpoints_pinned);
    });
    CHECK(episodes_seen > 0);
    CHECK(last_coverage > 0.2);
}

TEST_CASE("the stagnation window stops the loop once recent paths see nothing") {
    TerminationCriteria criteria;
    Grid<double> bd(8, 8, 0.3);
    bd.at(3, 3) = 0.9;  // plenty of boundary cells remain
    bd.at(4, 3) = 0.9;
    bd.at(3, 4) = 0.9;
    bd.at(4, 4) = 0.9;
    bd.at(5, 4) = 0.9;
    bd.at(5, 5) = 0.9;
    criteria.min_boundary_cells = 5;

    std::deque<double> fresh{1.0, 1.0, 1.0};
    CHECK(exploration_should_continue(bd, fresh, criteria));
    std::deque<double> fading{0.0, 0.0, 0.7};
    CHECK(exploration_should_continue(bd, fading, criteria));
    std::deque<double> dead{0.0, 0.0, 0.0};
    CHECK_FALSE(exploration_should_continue(bd, dead, criteria));

    // The boundary-count condition also ends the loop on its own.
    Grid<double> sparse(8, 8, 0.3);
    sparse.at(2, 2) = 0.9;
    CHECK_FALSE(exploration_should_continue(sparse, fresh, criteria));
}

TEST_CASE("window gains track what paths can still see") {
    // In a closed room the executed paths keep some boundary in sight for
    // the whole run, so termination comes from the boundary count, with the
    // window as the stagnation backstop.
    WorldMap world = WorldMap::load("scenarios/room32.txt");
    ExplorationConfig cfg = base_config();
    cfg.termination.max_episodes = 6;
    ExplorationResult result = run_exploration(world, {1.5, 1.5, 0.0}, cfg);
    REQUIRE(result.report.episodes_run > 0);
    for (const EpisodeRecord& r : result.report.episodes) {
        CHECK(r.window_gain >= r.info_gain - 1e-12);  // exclusion only removes mass
        CHECK(r.window_gain > 0.0);
    }
}

TEST_CASE("same seed, same report") {
    WorldMap world = WorldMap::load("scenarios/room32.txt");
    ExplorationConfig cfg = base_config();
    cfg.termination.max_episodes = 4;
    cfg.seed = 33;
    ExplorationResult a = run_exploration(world, {1.5, 1.5, 0.0}, cfg);
    ExplorationResult b = run_exploration(world, {1.5, 1.5, 0.0}, cfg);
    CHECK(report_json_string(a.report) == report_json_string(b.report));
}
