#include <cstdio>
#include <fstream>

#include "c2p/commands.hpp"
#include "doctest.h"

using namespace c2p;

namespace {

std::string write_temp_config(const std::string& body) {
  std::string path = "/tmp/c2p_config_test.toml";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("config file round trip") {
  std::string path = write_temp_config(
      "# comment\n"
      "[render]\n"
      "resolution = 64\n"
      "dilation = 4\n"
      "rule = weighted\n"
      "focal = 28.0\n"
      "\n"
      "[train]\n"
      "epochs = 3\n"
      "batch_size = 8\n"
      "learning_rate = 0.1\n"
      "loss_schedule = alternating\n"
      "seed = 99\n"
      "\n"
      "[views]\n"
      "corner_elevation = 0.25\n"
      "\n"
      "[data]\n"
      "per_class = 12\n");
  RunConfig cfg = parse_config_file(path);
  CHECK(cfg.pipeline.sparse.resolution == 64);
  CHECK(cfg.pipeline.sparse.dilation == 4);
  CHECK(cfg.pipeline.sparse.rule == DepthRule::weighted);
  CHECK(cfg.pipeline.sparse.focal == 28.0);
  CHECK(cfg.pipeline.train.epochs == 3);
  CHECK(cfg.pipeline.train.batch_size == 8);
  CHECK(cfg.pipeline.train.learning_rate == 0.1);
  CHECK(cfg.pipeline.train.schedule == LossSchedule::alternating);
  CHECK(cfg.pipeline.train.seed == 99);
  CHECK(cfg.pipeline.corner_elevation == 0.25);
  CHECK(cfg.data_per_class == 12);
  // untouched sections keep their defaults
  CHECK(cfg.pipeline.dense.rule == DepthRule::weighted);
  CHECK(cfg.pipeline.dense.dilation == 4);
  CHECK(cfg.pipeline.encoder.out_dim == 64);
  std::remove(path.c_str());
}

TEST_CASE("config validation rejects unknown keys and bad values") {
  CHECK_THROWS_WITH_AS(
      parse_config_file(write_temp_config("[render]\nresolutionn = 64\n")),
      doctest::Contains("unknown key"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_config_file(write_temp_config("[rendering]\nresolution = 64\n")),
      doctest::Contains("unknown section"), ParseError);
  CHECK_THROWS_AS(
      parse_config_file(write_temp_config("resolution = 64\n")), ParseError);
  CHECK_THROWS_AS(
      parse_config_file(write_temp_config("[render]\nresolution = abc\n")),
      ParseError);
  CHECK_THROWS_AS(
      parse_config_file(write_temp_config("[train]\nepochs\n")), ParseError);
  CHECK_THROWS_AS(parse_config_file("/tmp/c2p_definitely_missing.toml"),
                  ParseError);
  std::remove("/tmp/c2p_config_test.toml");
}

TEST_CASE("view set names") {
  CHECK(view_set_from_name("orth6", 0.5).views.size() == 6);
  CHECK(view_set_from_name("sph10", 0.5).views.size() == 10);
  CHECK(view_set_from_name("sph10", 0.5).views[6].elevation == 0.5);
  CHECK_THROWS_AS(view_set_from_name("sph12", 0.5), ParseError);
}
