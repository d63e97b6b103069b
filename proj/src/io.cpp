#include "dynact/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dynact/errors.hpp"

namespace dynact {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void put_doubles(std::ostream& out, const double* v, std::size_t n) {
  std::vector<unsigned char> buf(8 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) buf[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void get_doubles(std::istream& in, double* v, std::size_t n, const std::filesystem::path& path) {
  std::vector<unsigned char> buf(8 * n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw IoError(path.string() + ": truncated payload");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[8 * i + b]) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
}

void expect_end(std::istream& in, const std::filesystem::path& path) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError(path.string() + ": trailing bytes after payload");
  }
}

/// Header tokens after checking the magic and version.
std::vector<std::string> read_header(std::istream& in, const std::string& magic,
                                     std::size_t fields, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
  std::istringstream ss(line);
  std::vector<std::string> tok;
  for (std::string t; ss >> t;) tok.push_back(t);
  if (tok.size() < 2 || tok[0] != magic) {
    throw IoError(path.string() + ": not a " + magic + " file");
  }
  if (tok[1] != "v1") throw IoError(path.string() + ": unsupported version " + tok[1]);
  if (tok.size() != fields + 2) throw IoError(path.string() + ": malformed header");
  return {tok.begin() + 2, tok.end()};
}

std::size_t to_size(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw IoError(path.string() + ": bad integer '" + s + "' in header");
  }
}

double to_double(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ": bad number '" + s + "' in header");
  }
}

constexpr std::size_t kMaxElements = std::size_t{1} << 32;

}  // namespace

void write_sinogram(const std::filesystem::path& path, const Sinogram& s) {
  const ScanGeometry& g = s.geometry;
  if (s.values.size() != g.num_angles * g.num_detectors) {
    throw MismatchError("sinogram size does not match its geometry");
  }
  auto out = open_out(path);
  out << "DYNACT-SINO v1 " << g.num_angles << ' ' << g.num_detectors << ' ' << fmt(g.angle_start)
      << ' ' << fmt(g.angle_end) << ' ' << fmt(g.detector_min) << ' ' << fmt(g.detector_max)
      << '\n';
  put_doubles(out, s.values.data(), s.values.size());
  finish(out, path);
}

Sinogram read_sinogram(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, "DYNACT-SINO", 6, path);
  ScanGeometry g;
  g.num_angles = to_size(h[0], path);
  g.num_detectors = to_size(h[1], path);
  g.angle_start = to_double(h[2], path);
  g.angle_end = to_double(h[3], path);
  g.detector_min = to_double(h[4], path);
  g.detector_max = to_double(h[5], path);
  g.time_step = 0.0;
  if (g.num_angles * g.num_detectors > kMaxElements) throw IoError(path.string() + ": implausible size");
  Sinogram s(g);
  get_doubles(in, s.values.data(), s.values.size(), path);
  expect_end(in, path);
  return s;
}

void write_image(const std::filesystem::path& path, const Image& img) {
  const ImageSpec& sp = img.spec;
  if (img.values.size() != sp.size()) throw MismatchError("image size does not match its spec");
  auto out = open_out(path);
  out << "DYNACT-IMG v1 " << sp.nx << ' ' << sp.ny << ' ' << fmt(sp.xmin) << ' ' << fmt(sp.xmax)
      << ' ' << fmt(sp.ymin) << ' ' << fmt(sp.ymax) << '\n';
  put_doubles(out, img.values.data(), img.values.size());
  finish(out, path);
}

Image read_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, "DYNACT-IMG", 6, path);
  ImageSpec sp;
  sp.nx = to_size(h[0], path);
  sp.ny = to_size(h[1], path);
  sp.xmin = to_double(h[2], path);
  sp.xmax = to_double(h[3], path);
  sp.ymin = to_double(h[4], path);
  sp.ymax = to_double(h[5], path);
  if (sp.nx < 2 || sp.ny < 2 || sp.size() > kMaxElements) {
    throw IoError(path.string() + ": implausible image size");
  }
  Image img(sp);
  get_doubles(in, img.values.data(), img.values.size(), path);
  expect_end(in, path);
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& img, double lo, double hi) {
  if (img.values.empty()) throw MismatchError("write_pgm: empty image");
  if (lo == hi) {
    const auto [mn, mx] = std::minmax_element(img.values.begin(), img.values.end());
    lo = *mn;
    hi = *mx;
  }
  const double range = hi > lo ? hi - lo : 1.0;
  auto out = open_out(path);
  out << "P5\n# window min=" << fmt(lo) << " max=" << fmt(hi) << '\n'
      << img.spec.nx << ' ' << img.spec.ny << "\n65535\n";
  std::vector<unsigned char> buf;
  buf.reserve(2 * img.values.size());
  for (std::size_t r = 0; r < img.spec.ny; ++r) {
    const std::size_t j = img.spec.ny - 1 - r;
    for (std::size_t i = 0; i < img.spec.nx; ++i) {
      const double t = std::clamp((img.at(i, j) - lo) / range, 0.0, 1.0);
      const auto v = static_cast<unsigned>(std::lround(t * 65535.0));
      buf.push_back(static_cast<unsigned char>(v >> 8));
      buf.push_back(static_cast<unsigned char>(v & 0xff));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

namespace {

void write_field_impl(const std::filesystem::path& path, const std::vector<double>& xs,
                      const std::vector<double>& ys, const std::vector<unsigned char>& classes,
                      const std::vector<const Snapshot*>& snaps, std::size_t count) {
  auto out = open_out(path);
  out << "DYNACT-FIELD v1 " << xs.size() << ' ' << ys.size() << ' ' << snaps.size() << '\n';
  put_doubles(out, xs.data(), xs.size());
  put_doubles(out, ys.data(), ys.size());
  out.write(reinterpret_cast<const char*>(classes.data()), static_cast<std::streamsize>(classes.size()));
  for (const Snapshot* s : snaps) {
    if (s->u.size() != count) throw MismatchError("snapshot size does not match the grid");
    put_doubles(out, &s->time, 1);
    put_doubles(out, s->u.u1.data(), count);
    put_doubles(out, s->u.u2.data(), count);
  }
  finish(out, path);
}

}  // namespace

void write_field(const std::filesystem::path& path, const Grid2D& grid,
                 const DisplacementHistory& history) {
  std::vector<unsigned char> classes(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    classes[k] = static_cast<unsigned char>(grid.classification(k));
  }
  std::vector<const Snapshot*> snaps;
  for (const auto& s : history.snapshots) snaps.push_back(&s);
  write_field_impl(path, grid.x_coords(), grid.y_coords(), classes, snaps, grid.size());
}

void write_boundary_field(const std::filesystem::path& path, const Grid2D& grid,
                          const BoundaryData& data) {
  const auto& nodes = grid.boundary_nodes();
  if (data.num_nodes != nodes.size()) throw MismatchError("boundary data does not match the grid");
  std::vector<double> xs(nodes.begin(), nodes.end());
  std::vector<double> ys{0.0};
  std::vector<unsigned char> classes(nodes.size(), static_cast<unsigned char>(NodeClass::Boundary));
  std::vector<Snapshot> snaps(data.times.size());
  std::vector<const Snapshot*> ptrs;
  for (std::size_t ti = 0; ti < data.times.size(); ++ti) {
    snaps[ti].time = data.times[ti];
    snaps[ti].u = FieldLevel(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q) snaps[ti].u.set(q, data.at(ti, q));
    ptrs.push_back(&snaps[ti]);
  }
  write_field_impl(path, xs, ys, classes, ptrs, nodes.size());
}

FieldFile read_field(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, "DYNACT-FIELD", 3, path);
  const std::size_t nx = to_size(h[0], path);
  const std::size_t ny = to_size(h[1], path);
  const std::size_t ns = to_size(h[2], path);
  if (nx == 0 || ny == 0 || nx * ny > kMaxElements || ns > kMaxElements) {
    throw IoError(path.string() + ": implausible field size");
  }
  FieldFile f;
  f.x_coords.resize(nx);
  f.y_coords.resize(ny);
  get_doubles(in, f.x_coords.data(), nx, path);
  get_doubles(in, f.y_coords.data(), ny, path);
  std::vector<unsigned char> classes(nx * ny);
  in.read(reinterpret_cast<char*>(classes.data()), static_cast<std::streamsize>(classes.size()));
  if (static_cast<std::size_t>(in.gcount()) != classes.size()) {
    throw IoError(path.string() + ": truncated classification");
  }
  f.classification.reserve(classes.size());
  for (const unsigned char c : classes) {
    if (c > 3) throw IoError(path.string() + ": invalid classification byte");
    f.classification.push_back(static_cast<NodeClass>(c));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    Snapshot snap;
    snap.u = FieldLevel(nx * ny);
    get_doubles(in, &snap.time, 1, path);
    get_doubles(in, snap.u.u1.data(), nx * ny, path);
    get_doubles(in, snap.u.u2.data(), nx * ny, path);
    f.history.snapshots.push_back(std::move(snap));
  }
  expect_end(in, path);
  return f;
}

void check_field_matches(const FieldFile& file, const Grid2D& grid) {
  if (file.x_coords != grid.x_coords() || file.y_coords != grid.y_coords()) {
    throw MismatchError("displacement field grid coordinates differ from the configured grid");
  }
  if (file.classification != grid.classifications()) {
    throw MismatchError("displacement field node classification differs from the configured grid");
  }
}

}  // namespace dynact
