#include <cmath>
#include <filesystem>
#include <fstream>
#include <queue>
#include <set>

#include "doctest.h"
#include "map_checks.hpp"
#include "nmmo/worldgen.hpp"

using namespace nmmo;
using namespace nmmo::test;

TEST_CASE("classify uses the threshold order water|grass|forest|stone") {
  WorldgenParams p;
  p.tile_thresholds = {-0.2, 0.1, 0.4};
  CHECK(classify(-1.0, p) == Material::Water);
  CHECK(classify(-0.2000001, p) == Material::Water);
  CHECK(classify(-0.2, p) == Material::Grass);
  CHECK(classify(0.1, p) == Material::Forest);
  CHECK(classify(0.39, p) == Material::Forest);
  CHECK(classify(0.4, p) == Material::Stone);
  CHECK(classify(1.0, p) == Material::Stone);
}

TEST_CASE("SmallMaps map has every terrain type and satisfies invariants") {
  const EnvConfig cfg = canonical("SmallMaps");
  const TileMap m = generate_map(cfg);
  CHECK(m.size() == 128);
  std::set<Material> kinds;
  for (const auto& t : m.tiles()) kinds.insert(t.material);
  for (Material k : {Material::Grass, Material::Forest, Material::Stone, Material::Water, Material::Lava})
    CHECK(kinds.count(k) == 1);
  CHECK(map_violation(m) == "");
}

TEST_CASE("invariants over 100 seeds, determinism, and marginal stability") {
  EnvConfig cfg = canonical("SmallMaps");
  std::array<std::vector<double>, kMaterialCount> freq;
  for (std::uint64_t s = 0; s < 100; ++s) {
    cfg.seed = s;
    const TileMap a = generate_map(cfg);
    CAPTURE(s);
    REQUIRE(map_violation(a) == "");
    CHECK(generate_map(cfg) == a);
    std::array<double, kMaterialCount> counts{};
    for (const auto& t : a.tiles()) counts[static_cast<int>(t.material)] += 1;
    for (int k = 0; k < kMaterialCount; ++k) freq[k].push_back(counts[k]);
  }
  for (Material k : {Material::Grass, Material::Forest, Material::Stone, Material::Water, Material::Lava}) {
    const auto& v = freq[static_cast<int>(k)];
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= v.size() - 1;
    CAPTURE(material_name(k));
    CHECK(std::sqrt(var) / mean < 0.5);
  }
}

TEST_CASE("distinct seeds give pairwise-distinct grids") {
  EnvConfig cfg = canonical("SmallMaps");
  std::vector<std::vector<TileState>> grids;
  for (std::uint64_t s = 1000; s < 1064; ++s) {
    cfg.seed = s;
    grids.push_back(generate_map(cfg).tiles());
  }
  for (std::size_t i = 0; i < grids.size(); ++i)
    for (std::size_t j = i + 1; j < grids.size(); ++j) CHECK(grids[i] != grids[j]);
}

TEST_CASE("pools") {
  EnvConfig cfg = canonical("SmallMaps");
  cfg.seed = 5;
  const auto one = generate_pool(cfg, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == generate_map(cfg));
  const auto pool = generate_pool(cfg, 32);
  CHECK(pool.size() == 32);
  CHECK(pool == generate_pool(cfg, 32));
  EnvConfig c7 = cfg;
  c7.seed = 12;
  CHECK(pool[7] == generate_map(c7));
  CHECK_THROWS_AS(generate_pool(cfg, 0), WorldgenError);
}

TEST_CASE("degenerate terrain exhausts the retry budget") {
  EnvConfig cfg = canonical("SmallMaps");
  cfg.worldgen_params.tile_thresholds = {-0.999, -0.998, -0.997};
  try {
    generate_map(cfg);
    FAIL("expected WorldgenError");
  } catch (const WorldgenError& e) {
    CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
  }
  try {
    generate_pool(cfg, 2);
    FAIL("expected WorldgenError");
  } catch (const WorldgenError& e) {
    CHECK(std::string(e.what()).find("pool index 0") != std::string::npos);
  }
}

TEST_CASE("map file round trip and validation") {
  EnvConfig cfg = canonical("SmallMaps");
  cfg.seed = 3;
  const TileMap m = generate_map(cfg);
  const auto bytes = encode_map(m);
  CHECK(bytes.size() == 32 + 128 * 128);
  CHECK(std::equal(kMapMagic, kMapMagic + 8, bytes.begin()));
  const TileMap back = decode_map(bytes);
  CHECK(back == m);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_map(bad), WorldgenError);
  bad = bytes;
  bad[8] = 9;
  CHECK_THROWS_AS(decode_map(bad), WorldgenError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_map(bad), WorldgenError);
  bad = bytes;
  bad[40] = 77;
  CHECK_THROWS_AS(decode_map(bad), WorldgenError);

  const auto dir = std::filesystem::temp_directory_path() / "nmmo_map_test";
  std::filesystem::create_directories(dir);
  write_map(m, dir / "m.map");
  CHECK(read_map(dir / "m.map") == m);
  write_map_pgm(m, dir / "m.pgm");
  std::ifstream pgm(dir / "m.pgm", std::ios::binary);
  std::string magic;
  int w = 0;
  int h = 0;
  int maxv = 0;
  pgm >> magic >> w >> h >> maxv;
  CHECK(magic == "P5");
  CHECK(w == 128);
  CHECK(h == 128);
  CHECK(maxv == 255);
  std::filesystem::remove_all(dir);
}
