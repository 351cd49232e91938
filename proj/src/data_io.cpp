#include "c2p/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace c2p {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

bool parse_triple(const std::string& text, Vec3* out) {
  std::istringstream is(text);
  double x, y, z;
  if (!(is >> x >> y >> z)) return false;
  std::string tail;
  if (is >> tail) return false;  // extra tokens
  *out = {x, y, z};
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

PointCloud load_xyz(const std::string& path, std::ifstream& in) {
  PointCloud cloud;
  cloud.id = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Vec3 p;
    if (!parse_triple(line, &p)) {
      parse_fail(path, lineno, "expected three numeric coordinates");
    }
    cloud.points.push_back(p);
  }
  if (cloud.points.empty()) parse_fail(path, lineno, "empty vertex list");
  return cloud;
}

PointCloud load_off(const std::string& path, std::ifstream& in) {
  PointCloud cloud;
  cloud.id = path;
  std::string line;
  std::size_t lineno = 0;

  auto next_content_line = [&](std::string* out) {
    while (std::getline(in, line)) {
      ++lineno;
      auto pos = line.find_first_not_of(" \t\r\n");
      if (pos == std::string::npos) continue;
      if (line[pos] == '#') continue;
      *out = line;
      return true;
    }
    return false;
  };

  std::string header;
  if (!next_content_line(&header)) parse_fail(path, lineno, "missing OFF header");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "OFF") parse_fail(path, lineno, "malformed header, expected OFF");

  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(hs >> nv >> nf >> ne)) {
    // counts on the following line
    std::string counts;
    if (!next_content_line(&counts)) {
      parse_fail(path, lineno, "missing vertex/face counts");
    }
    std::istringstream cs(counts);
    if (!(cs >> nv >> nf >> ne)) {
      parse_fail(path, lineno, "malformed vertex/face counts");
    }
  }
  if (nv == 0) parse_fail(path, lineno, "empty vertex list");

  cloud.points.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    std::string vline;
    if (!next_content_line(&vline)) {
      parse_fail(path, lineno + 1, "truncated file: expected " +
                                       std::to_string(nv) + " vertices, got " +
                                       std::to_string(i));
    }
    std::istringstream vs(vline);
    double x, y, z;
    if (!(vs >> x >> y >> z) || !std::isfinite(x) || !std::isfinite(y) ||
        !std::isfinite(z)) {
      parse_fail(path, lineno, "non-numeric vertex coordinates");
    }
    cloud.points.push_back({x, y, z});
  }
  // faces ignored: this loader produces clouds only
  return cloud;
}

// Exact at both ends so re-quantization reproduces the file bytes.
double dequantize(std::uint16_t v, double zmin, double zmax) {
  if (v == 65535) return zmin;
  if (v == 1) return zmax;
  double step = (zmax - zmin) / 65534.0;
  double z = zmax - (static_cast<double>(v) - 1.0) * step;
  return std::clamp(z, zmin, zmax);
}

std::uint16_t quantize(double z, double zmin, double zmax) {
  if (zmax <= zmin) return 65535;
  double t = (z - zmin) / (zmax - zmin);
  long v = 65535 - std::lround(t * 65534.0);
  return static_cast<std::uint16_t>(std::clamp(v, 1L, 65535L));
}

}  // namespace

CloudFormat cloud_format_for_path(const std::string& path) {
  auto dotpos = path.find_last_of('.');
  if (dotpos != std::string::npos) {
    std::string ext = path.substr(dotpos + 1);
    for (char& ch : ext) ch = static_cast<char>(std::tolower(ch));
    if (ext == "off") return CloudFormat::off;
  }
  return CloudFormat::xyz_ascii;
}

PointCloud load_cloud(const std::string& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  PointCloud cloud = format == CloudFormat::off ? load_off(path, in)
                                                : load_xyz(path, in);
  validate(cloud);
  return cloud;
}

void save_depth_pgm(const DepthMap& map, const std::string& path) {
  double zmin = 0.0, zmax = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < map.depth.size(); ++i) {
    if (!map.occupied[i]) continue;
    if (!any) {
      zmin = zmax = map.depth[i];
      any = true;
    } else {
      zmin = std::min(zmin, map.depth[i]);
      zmax = std::max(zmax, map.depth[i]);
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  char header[128];
  std::snprintf(header, sizeof header, "P5\n# zrange %.17g %.17g\n%d %d\n65535\n",
                zmin, zmax, map.width, map.height);
  out << header;
  std::vector<unsigned char> row(static_cast<std::size_t>(map.width) * 2);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      std::size_t idx = map.index(x, y);
      std::uint16_t v = 0;
      if (map.occupied[idx]) v = quantize(map.depth[idx], zmin, zmax);
      row[static_cast<std::size_t>(x) * 2] = static_cast<unsigned char>(v >> 8);
      row[static_cast<std::size_t>(x) * 2 + 1] = static_cast<unsigned char>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw ParseError(path + ": write failed");
}

DepthMap load_depth_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");

  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError(path + ": not a binary PGM (P5)");

  double zmin = 0.0, zmax = 0.0;
  bool have_range = false;
  // Skip whitespace/comments; pick up the zrange comment when present.
  auto skip_to_token = [&]() {
    while (true) {
      int c = in.peek();
      if (c == EOF) return;
      if (std::isspace(c)) {
        in.get();
        continue;
      }
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
        std::istringstream cs(comment);
        std::string hash, tag;
        cs >> hash >> tag;
        if (tag == "zrange" && (cs >> zmin >> zmax)) have_range = true;
        continue;
      }
      return;
    }
  };

  int width = 0, height = 0, maxval = 0;
  skip_to_token();
  in >> width;
  skip_to_token();
  in >> height;
  skip_to_token();
  in >> maxval;
  if (!in || width <= 0 || height <= 0) {
    throw ParseError(path + ": malformed PGM dimensions");
  }
  if (maxval != 65535) {
    throw ParseError(path + ": expected maxval 65535, got " +
                     std::to_string(maxval));
  }
  in.get();  // single whitespace before samples

  DepthMap map(width, height);
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * 2);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw ParseError(path + ": truncated sample data");
  }
  for (std::size_t i = 0; i < map.depth.size(); ++i) {
    std::uint16_t v = static_cast<std::uint16_t>((raw[i * 2] << 8) | raw[i * 2 + 1]);
    if (v == 0) continue;
    map.occupied[i] = 1;
    map.depth[i] = have_range ? dequantize(v, zmin, zmax) : static_cast<double>(v);
  }
  return map;
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  write_u64(out, bits);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw FormatError(path + ": short read");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in, const std::string& path) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (in.gcount() != 8) throw FormatError(path + ": short read");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in, const std::string& path) {
  std::uint64_t bits = read_u64(in, path);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

constexpr char kMagic[4] = {'C', '2', 'P', 'T'};

}  // namespace

void save_checkpoint(const ParamStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open file for writing");
  out.write(kMagic, 4);
  write_u32(out, kCheckpointVersion);
  write_u64(out, store.entries().size());
  for (const ParamEntry& e : store.entries()) {
    write_u64(out, e.name.size());
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_u64(out, e.shape.size());
    for (std::size_t d : e.shape) write_u64(out, d);
    for (double v : e.values) write_f64(out, v);
  }
  if (!out) throw FormatError(path + ": write failed");
}

ParamStore load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path + ": bad magic");
  }
  std::uint32_t version = read_u32(in, path);
  if (version != kCheckpointVersion) {
    throw FormatError(path + ": unknown checkpoint version " +
                      std::to_string(version));
  }
  std::uint64_t count = read_u64(in, path);
  ParamStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t name_len = read_u64(in, path);
    if (name_len > (1u << 20)) throw FormatError(path + ": absurd name length");
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    if (in.gcount() != static_cast<std::streamsize>(name_len)) {
      throw FormatError(path + ": short read");
    }
    std::uint64_t rank = read_u64(in, path);
    if (rank > 8) throw FormatError(path + ": absurd tensor rank");
    std::vector<std::size_t> shape(rank);
    std::uint64_t total = 1;
    for (std::uint64_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<std::size_t>(read_u64(in, path));
      total *= shape[d];
    }
    if (total > (1ull << 32)) throw FormatError(path + ": absurd tensor size");
    std::vector<double> values(total);
    for (std::uint64_t j = 0; j < total; ++j) values[j] = read_f64(in, path);
    store.add(name, Tensor(shape, std::move(values)));
  }
  return store;
}

}  // namespace c2p
