#include "c2p/config.hpp"

#include <fstream>
#include <sstream>

namespace c2p {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& where) {
  std::istringstream is(v);
  double d;
  std::string tail;
  if (!(is >> d) || (is >> tail)) {
    throw ParseError(where + ": expected a number, got '" + v + "'");
  }
  return d;
}

int to_int(const std::string& v, const std::string& where) {
  double d = to_double(v, where);
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) {
    throw ParseError(where + ": expected an integer, got '" + v + "'");
  }
  return i;
}

std::uint64_t to_u64(const std::string& v, const std::string& where) {
  std::istringstream is(v);
  std::uint64_t u;
  std::string tail;
  if (!(is >> u) || (is >> tail)) {
    throw ParseError(where + ": expected an unsigned integer, got '" + v + "'");
  }
  return u;
}

void apply_render(RenderConfig& r, const std::string& key,
                  const std::string& value, const std::string& where) {
  if (key == "resolution") {
    r.resolution = to_int(value, where);
  } else if (key == "dilation") {
    r.dilation = to_int(value, where);
  } else if (key == "rule") {
    r.rule = depth_rule_from_string(value);
  } else if (key == "focal") {
    r.focal = to_double(value, where);
  } else if (key == "epsilon") {
    r.epsilon = to_double(value, where);
  } else {
    throw ParseError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

DepthRule depth_rule_from_string(const std::string& name) {
  if (name == "min" || name == "minimum") return DepthRule::minimum;
  if (name == "weighted") return DepthRule::weighted;
  throw ParseError("unknown depth rule '" + name + "' (use min|weighted)");
}

std::string to_string(DepthRule rule) {
  return rule == DepthRule::minimum ? "min" : "weighted";
}

namespace {

void apply_config_value(RunConfig& cfg, const std::string& section,
                        const std::string& key, const std::string& value,
                        const std::string& where) {
  if (section == "render") {
    apply_render(cfg.pipeline.sparse, key, value, where);
  } else if (section == "dense") {
    apply_render(cfg.pipeline.dense, key, value, where);
  } else if (section == "encoder") {
    if (key == "patch_grid") {
      cfg.pipeline.encoder.patch_grid = to_int(value, where);
    } else if (key == "hidden") {
      cfg.pipeline.encoder.hidden = to_int(value, where);
    } else if (key == "out_dim") {
      cfg.pipeline.encoder.out_dim = to_int(value, where);
    } else if (key == "layers") {
      cfg.pipeline.encoder.layers = to_int(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else if (section == "train") {
    if (key == "epochs") {
      cfg.pipeline.train.epochs = to_int(value, where);
    } else if (key == "batch_size") {
      cfg.pipeline.train.batch_size = to_int(value, where);
    } else if (key == "learning_rate") {
      cfg.pipeline.train.learning_rate = to_double(value, where);
    } else if (key == "momentum") {
      cfg.pipeline.train.momentum = to_double(value, where);
    } else if (key == "seed") {
      cfg.pipeline.train.seed = to_u64(value, where);
    } else if (key == "loss_schedule") {
      if (value == "joint") {
        cfg.pipeline.train.schedule = LossSchedule::joint;
      } else if (value == "alternating") {
        cfg.pipeline.train.schedule = LossSchedule::alternating;
      } else {
        throw ParseError(where + ": loss_schedule must be joint|alternating");
      }
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else if (section == "head") {
    if (key == "epochs") {
      cfg.head.epochs = to_int(value, where);
    } else if (key == "batch_size") {
      cfg.head.batch_size = to_int(value, where);
    } else if (key == "learning_rate") {
      cfg.head.learning_rate = to_double(value, where);
    } else if (key == "momentum") {
      cfg.head.momentum = to_double(value, where);
    } else if (key == "seed") {
      cfg.head.seed = to_u64(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else if (section == "views") {
    if (key == "corner_elevation") {
      cfg.pipeline.corner_elevation = to_double(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else if (section == "loss") {
    if (key == "tau") {
      cfg.pipeline.tau = to_double(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else if (section == "data") {
    if (key == "seed") {
      cfg.data_seed = to_u64(value, where);
    } else if (key == "classes") {
      cfg.data_classes = to_int(value, where);
    } else if (key == "per_class") {
      cfg.data_per_class = to_int(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else if (section == "run") {
    if (key == "threads") {
      cfg.pipeline.threads = to_int(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  } else {
    throw ParseError(where + ": unknown section '" + section + "'");
  }
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config file");
  RunConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError(where + ": malformed section");
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError(where + ": expected key = value");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError(where + ": expected key = value");
    }
    if (section.empty()) {
      throw ParseError(where + ": key outside any [section]");
    }
    apply_config_value(cfg, section, key, value, where);
  }
  return cfg;
}

}  // namespace c2p
