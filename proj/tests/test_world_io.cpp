#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <gradex/boundariness.hpp>
#include <gradex/world.hpp>

using namespace gradex;
namespace fs = std::filesystem;

namespace {

fs::path write_tmp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("ASCII grid maps load with resolution and get a closed boundary") {
    auto p = write_tmp("gradex_test_map.txt",
                       "resolution 0.5\n"
                       "......\n"
                       ".#....\n"
                       "......\n"
                       "......\n");
    WorldMap w = WorldMap::load(p.string());
    CHECK(w.width() == 6);
    CHECK(w.height() == 4);
    CHECK(w.resolution() == 0.5);
    CHECK(w.occupied(1, 1));
    // The open border is forced closed.
    for (int i = 0; i < 6; ++i) {
        CHECK(w.occupied(i, 0));
        CHECK(w.occupied(i, 3));
    }
    for (int j = 0; j < 4; ++j) {
        CHECK(w.occupied(0, j));
        CHECK(w.occupied(5, j));
    }
    CHECK(w.free(2, 2));
    fs::remove(p);
}

TEST_CASE("ASCII maps without a resolution header or with ragged rows are rejected") {
    auto p1 = write_tmp("gradex_test_nores.txt", "....\n....\n....\n");
    CHECK_THROWS_WITH(WorldMap::load(p1.string()),
                      Catch::Matchers::ContainsSubstring("resolution"));
    fs::remove(p1);
    auto p2 = write_tmp("gradex_test_ragged.txt", "resolution 0.3\n....\n...\n");
    CHECK_THROWS_WITH(WorldMap::load(p2.string()),
                      Catch::Matchers::ContainsSubstring("ragged"));
    fs::remove(p2);
    auto p3 = write_tmp("gradex_test_badchar.txt", "resolution 0.3\n..x.\n....\n");
    CHECK_THROWS(WorldMap::load(p3.string()));
    fs::remove(p3);
}

TEST_CASE("PGM P2 maps load with the threshold convention") {
    auto p = write_tmp("gradex_test_map.pgm",
                       "P2\n# resolution 0.25\n4 3\n255\n"
                       "255 255 255 255\n"
                       "255 0 127 255\n"
                       "255 255 255 128\n");
    WorldMap w = WorldMap::load(p.string());
    CHECK(w.resolution() == 0.25);
    CHECK(w.occupied(1, 1));   // 0 < 128
    CHECK(w.occupied(2, 1));   // 127 < 128
    CHECK(w.free(1, 1) == false);
    // 128 itself reads free, though here it sits on the closed border.
    CHECK(w.occupied(3, 2));
    fs::remove(p);
}

TEST_CASE("PGM P5 maps load binary data") {
    std::string header = "P5\n# resolution 0.2\n3 3\n255\n";
    std::string data = {char(255), char(255), char(255),
                        char(255), char(10),  char(255),
                        char(255), char(255), char(255)};
    auto p = write_tmp("gradex_test_map_p5.pgm", header + data);
    WorldMap w = WorldMap::load(p.string());
    CHECK(w.occupied(1, 1));
    CHECK(w.resolution() == 0.2);
    fs::remove(p);
}

TEST_CASE("probability PGM snapshots scale occupancy to gray levels") {
    LogOddsMap m(3, 2, 0.3);
    m.set_value(0, 0, m.l_max());
    m.set_value(1, 0, m.l_min());
    auto p = fs::temp_directory_path() / "gradex_test_prob.pgm";
    m.write_pgm(p);
    std::string text = read_text_file(p);
    CHECK(text.rfind("P2\n3 2\n255\n", 0) == 0);
    std::istringstream in(text.substr(10));
    int v00, v10, v20;
    in >> v00 >> v10 >> v20;
    CHECK(v00 == 230);  // p = 0.9
    CHECK(v10 == 77);   // p = 0.3
    CHECK(v20 == 128);  // unknown: p = 0.5
    fs::remove(p);
}

TEST_CASE("boundariness PGM inverts gray so strong boundaries are dark") {
    Grid<double> bd(2, 1, 0.3);
    bd.at(0, 0) = 1.0;
    bd.at(1, 0) = 0.0;
    auto p = fs::temp_directory_path() / "gradex_test_bd.pgm";
    write_boundariness_pgm(p, bd);
    std::string text = read_text_file(p);
    std::istringstream in(text.substr(text.find("255\n") + 4));
    int a, b;
    in >> a >> b;
    CHECK(a == 0);
    CHECK(b == 255);
    fs::remove(p);
}

TEST_CASE("atomic writes leave no temporary and hold full content") {
    auto dir = fs::temp_directory_path() / "gradex_test_atomic";
    fs::create_directories(dir);
    auto target = dir / "artifact.txt";
    std::string payload(20000, 'x');
    payload += "\nend";
    atomic_write_text(target, payload);
    CHECK(read_text_file(target) == payload);
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    // Overwrite keeps the old file intact until the new one is complete.
    atomic_write_text(target, "second");
    CHECK(read_text_file(target) == "second");
    fs::remove_all(dir);
}
