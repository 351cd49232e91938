#include <cstdio>
#include <filesystem>
#include <fstream>

#include "c2p/data_io.hpp"
#include "doctest.h"

using namespace c2p;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("c2p_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

DepthMap random_map(int res, Rng& rng, double fill = 0.3) {
  DepthMap map(res, res);
  for (std::size_t i = 0; i < map.depth.size(); ++i) {
    if (rng.uniform() < fill) {
      map.depth[i] = rng.uniform(0.2, 2.0);
      map.occupied[i] = 1;
    }
  }
  return map;
}

ParamStore random_store(Rng& rng) {
  ParamStore store;
  int entries = 1 + static_cast<int>(rng.uniform_index(4));
  for (int e = 0; e < entries; ++e) {
    std::size_t rows = 1 + rng.uniform_index(5);
    std::size_t cols = 1 + rng.uniform_index(5);
    Tensor t({rows, cols});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal();
    store.add("entry." + std::to_string(e), t);
  }
  return store;
}

}  // namespace

TEST_CASE("xyz loader") {
  TempDir dir;
  std::string path = dir.file("cloud.xyz");
  write_file(path, "0 0 0\n1 0 0\n");
  PointCloud c = load_cloud(path, CloudFormat::xyz_ascii);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[1].x == 1.0);

  write_file(path, "0 0 0\n1 oops 0\n");
  CHECK_THROWS_WITH_AS(load_cloud(path, CloudFormat::xyz_ascii),
                       doctest::Contains(":2:"), ParseError);

  write_file(path, "\n\n");
  CHECK_THROWS_AS(load_cloud(path, CloudFormat::xyz_ascii), ParseError);

  CHECK_THROWS_AS(load_cloud(dir.file("missing.xyz"), CloudFormat::xyz_ascii),
                  ParseError);
}

TEST_CASE("off loader ignores faces and reports truncation") {
  TempDir dir;
  std::string path = dir.file("mesh.off");
  write_file(path, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  PointCloud c = load_cloud(path, CloudFormat::off);
  REQUIRE(c.points.size() == 3);
  CHECK(c.points[2].y == 1.0);

  // counts on the header line
  write_file(path, "OFF 2 0 0\n0 0 0\n1 1 1\n");
  CHECK(load_cloud(path, CloudFormat::off).points.size() == 2);

  write_file(path, "OFF\n5 0 0\n0 0 0\n1 0 0\n");
  CHECK_THROWS_WITH_AS(load_cloud(path, CloudFormat::off),
                       doctest::Contains("truncated"), ParseError);

  write_file(path, "PLY\n3 0 0\n");
  CHECK_THROWS_AS(load_cloud(path, CloudFormat::off), ParseError);

  write_file(path, "OFF\n0 0 0\n");
  CHECK_THROWS_AS(load_cloud(path, CloudFormat::off), ParseError);

  CHECK(cloud_format_for_path("model.OFF") == CloudFormat::off);
  CHECK(cloud_format_for_path("model.xyz") == CloudFormat::xyz_ascii);
}

TEST_CASE("pgm: empty map and the single-pixel mapping") {
  TempDir dir;
  std::string path = dir.file("map.pgm");

  DepthMap empty(4, 4);
  save_depth_pgm(empty, path);
  DepthMap loaded = load_depth_pgm(path);
  CHECK(loaded.occupied_count() == 0);
  for (double d : loaded.depth) CHECK(d == 0.0);

  DepthMap single(2, 2);
  single.depth[single.index(0, 0)] = 1.0;
  single.occupied[single.index(0, 0)] = 1;
  save_depth_pgm(single, path);
  std::string bytes = read_file(path);
  // Sample plane is the last 8 bytes: (0,0) maps to 65535, rest stay 0.
  REQUIRE(bytes.size() >= 8);
  std::string plane = bytes.substr(bytes.size() - 8);
  CHECK(static_cast<unsigned char>(plane[0]) == 0xFF);
  CHECK(static_cast<unsigned char>(plane[1]) == 0xFF);
  for (std::size_t i = 2; i < 8; ++i) {
    CHECK(static_cast<unsigned char>(plane[i]) == 0x00);
  }
}

TEST_CASE("pgm round trips: occupancy exact, depth within a step, bytes stable") {
  TempDir dir;
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    DepthMap map = random_map(16, rng);
    std::string path = dir.file("round.pgm");
    save_depth_pgm(map, path);
    DepthMap loaded = load_depth_pgm(path);

    REQUIRE(loaded.width == map.width);
    double zmin = 1e300, zmax = -1e300;
    for (std::size_t i = 0; i < map.depth.size(); ++i) {
      CHECK(loaded.occupied[i] == map.occupied[i]);
      if (map.occupied[i]) {
        zmin = std::min(zmin, map.depth[i]);
        zmax = std::max(zmax, map.depth[i]);
      }
    }
    double step = map.occupied_count() > 0 ? (zmax - zmin) / 65534.0 : 0.0;
    for (std::size_t i = 0; i < map.depth.size(); ++i) {
      if (map.occupied[i]) {
        CHECK(std::abs(loaded.depth[i] - map.depth[i]) <= step * 0.5 + 1e-15);
      }
    }

    std::string second = dir.file("round2.pgm");
    save_depth_pgm(loaded, second);
    CHECK(read_file(path) == read_file(second));
  }
}

TEST_CASE("pgm format errors") {
  TempDir dir;
  std::string path = dir.file("bad.pgm");
  write_file(path, "P2\n2 2\n65535\n0 0 0 0\n");
  CHECK_THROWS_AS(load_depth_pgm(path), ParseError);

  write_file(path, "P5\n2 2\n255\n\0\0\0\0");
  CHECK_THROWS_AS(load_depth_pgm(path), ParseError);

  write_file(path, std::string("P5\n2 2\n65535\nxx"));
  CHECK_THROWS_AS(load_depth_pgm(path), ParseError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  TempDir dir;
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    ParamStore store = random_store(rng);
    store.entry(store.entries()[0].name).grads[0] = 42.0;  // not persisted
    std::string path = dir.file("store.c2pt");
    save_checkpoint(store, path);
    ParamStore loaded = load_checkpoint(path);
    CHECK(loaded.same_values(store));
    for (const auto& e : loaded.entries()) {
      for (double g : e.grads) CHECK(g == 0.0);
    }
    // Saving the load reproduces the bytes.
    std::string again = dir.file("store2.c2pt");
    save_checkpoint(loaded, again);
    CHECK(read_file(path) == read_file(again));
  }
}

TEST_CASE("checkpoint error paths") {
  TempDir dir;
  std::string path = dir.file("ck.c2pt");

  ParamStore empty;
  save_checkpoint(empty, path);
  CHECK(load_checkpoint(path).size() == 0);

  ParamStore store;
  store.add("w", Tensor::from_vector({1.0, 2.0}));
  save_checkpoint(store, path);

  std::string bytes = read_file(path);
  std::string flipped = bytes;
  flipped[0] = 'X';
  write_file(path, flipped);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("magic"),
                       FormatError);

  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  write_file(path, wrong_version);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("version"),
                       FormatError);

  write_file(path, bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("short read"),
                       FormatError);

  CHECK_THROWS_AS(load_checkpoint(dir.file("absent.c2pt")), FormatError);
}
