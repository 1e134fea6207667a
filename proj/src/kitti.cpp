#include "hullpose/kitti.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hullpose/error.hpp"

namespace hullpose::kitti {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool parse_int(std::string_view tok, int& out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

float load_le_float(const std::byte* p) {
  std::uint32_t bits = 0;
  for (int k = 3; k >= 0; --k) bits = (bits << 8) | std::to_integer<std::uint32_t>(p[k]);
  return std::bit_cast<float>(bits);
}

void store_le_float(float v, std::byte* p) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  for (int k = 0; k < 4; ++k) {
    p[k] = static_cast<std::byte>(bits & 0xffu);
    bits >>= 8;
  }
}

// 3x3 inverse via adjugate; m is row-major.
std::array<double, 9> inverse3(const double* m) {
  const double a = m[0], b = m[1], c = m[2];
  const double d = m[3], e = m[4], f = m[5];
  const double g = m[6], h = m[7], i = m[8];
  const double A = e * i - f * h, B = -(d * i - f * g), C = d * h - e * g;
  const double det = a * A + b * B + c * C;
  if (std::abs(det) < 1e-12) throw Error(ErrorKind::FormatError, "singular calibration rotation");
  const double s = 1.0 / det;
  return {A * s, -(b * i - c * h) * s, (b * f - c * e) * s,
          B * s, (a * i - c * g) * s,  -(a * f - c * d) * s,
          C * s, -(a * h - b * g) * s, (a * e - b * d) * s};
}

}  // namespace

kernels::Affine3 CalibMatrices::velo_to_rect() const {
  kernels::Affine3 out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += rect_rotation[r * 3 + k] * velo_to_cam[k * 4 + c];
      out.m[r * 4 + c] = acc;
    }
  }
  return out;
}

RawScan read_scan(std::span<const std::byte> bytes) {
  if (bytes.size() % 16 != 0) {
    throw Error(ErrorKind::FormatError,
                "scan length " + std::to_string(bytes.size()) + " is not a multiple of 16");
  }
  RawScan scan;
  scan.points.resize(bytes.size() / 16);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const std::byte* p = bytes.data() + 16 * i;
    scan.points[i] = {load_le_float(p), load_le_float(p + 4), load_le_float(p + 8),
                      load_le_float(p + 12)};
  }
  return scan;
}

RawScan read_scan_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  try {
    return read_scan(bytes);
  } catch (const Error& e) {
    throw Error(ErrorKind::FormatError, path.string() + ": " + e.what());
  }
}

std::vector<std::byte> write_scan(const RawScan& scan) {
  std::vector<std::byte> bytes(scan.points.size() * 16);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    std::byte* p = bytes.data() + 16 * i;
    const ScanPoint& q = scan.points[i];
    store_le_float(q.x, p);
    store_le_float(q.y, p + 4);
    store_le_float(q.z, p + 8);
    store_le_float(q.reflectance, p + 12);
  }
  return bytes;
}

void write_scan_file(const RawScan& scan, const std::filesystem::path& path) {
  const auto bytes = write_scan(scan);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IOError, "write failed: " + path.string());
}

std::vector<LabelRecord> parse_labels(std::string_view text) {
  std::vector<LabelRecord> out;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto tok = split_ws(lines[n]);
    if (tok.empty()) continue;
    const std::string where = "label line " + std::to_string(n + 1);
    if (tok.size() != 15) {
      throw Error(ErrorKind::FormatError,
                  where + ": expected 15 fields, got " + std::to_string(tok.size()));
    }
    LabelRecord r;
    r.object_type = std::string(tok[0]);
    double v[14];
    bool ok = parse_double(tok[1], v[1]) && parse_int(tok[2], r.occluded);
    for (std::size_t k = 3; k < 15 && ok; ++k) ok = parse_double(tok[k], v[k - 1]);
    if (!ok) throw Error(ErrorKind::FormatError, where + ": malformed number");
    r.truncated = v[1];
    r.alpha = v[2];
    r.bbox2d = {v[3], v[4], v[5], v[6]};
    r.height = v[7];
    r.width = v[8];
    r.length = v[9];
    r.location = {v[10], v[11], v[12]};
    r.rotation_y = v[13];
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_label(const LabelRecord& r) {
  std::ostringstream os;
  os << r.object_type << ' ' << fmt(r.truncated) << ' ' << r.occluded << ' ' << fmt(r.alpha);
  for (double b : r.bbox2d) os << ' ' << fmt(b);
  os << ' ' << fmt(r.height) << ' ' << fmt(r.width) << ' ' << fmt(r.length);
  for (double l : r.location) os << ' ' << fmt(l);
  os << ' ' << fmt(r.rotation_y);
  return os.str();
}

CalibMatrices parse_calib(std::string_view text) {
  CalibMatrices calib;
  bool have_tr = false;
  bool have_r0 = false;
  for (std::string_view line : split_lines(text)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string_view key = line.substr(0, colon);
    const auto tok = split_ws(line.substr(colon + 1));
    auto fill = [&](double* dst, std::size_t n) {
      if (tok.size() != n) {
        throw Error(ErrorKind::FormatError, std::string(key) + ": expected " + std::to_string(n) +
                                                " values, got " + std::to_string(tok.size()));
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (!parse_double(tok[k], dst[k])) {
          throw Error(ErrorKind::FormatError, std::string(key) + ": malformed number");
        }
      }
    };
    if (key == "Tr_velo_to_cam") {
      fill(calib.velo_to_cam.data(), 12);
      have_tr = true;
    } else if (key == "R0_rect") {
      fill(calib.rect_rotation.data(), 9);
      have_r0 = true;
    }
  }
  if (!have_tr) throw Error(ErrorKind::FormatError, "calib is missing Tr_velo_to_cam");
  if (!have_r0) throw Error(ErrorKind::FormatError, "calib is missing R0_rect");
  return calib;
}

std::string format_calib(const CalibMatrices& calib) {
  std::ostringstream os;
  os << "R0_rect:";
  for (double v : calib.rect_rotation) os << ' ' << fmt(v);
  os << "\nTr_velo_to_cam:";
  for (double v : calib.velo_to_cam) os << ' ' << fmt(v);
  os << '\n';
  return os.str();
}

double canonicalize_yaw(double ry) {
  double r = std::fmod(ry, kHalfPi);
  if (r < 0.0) r += kHalfPi;
  if (r >= kHalfPi) r -= kHalfPi;
  return r;
}

double sensor_yaw(double rotation_y, const CalibMatrices& calib) {
  // Heading in the rectified camera frame, mapped back through the inverse of
  // the velodyne->camera rotation block.
  const kernels::Affine3 m = calib.velo_to_rect();
  const double rot[9] = {m.m[0], m.m[1], m.m[2], m.m[4], m.m[5], m.m[6], m.m[8], m.m[9], m.m[10]};
  const auto inv = inverse3(rot);
  const double hc[3] = {std::cos(rotation_y), 0.0, -std::sin(rotation_y)};
  const double hx = inv[0] * hc[0] + inv[1] * hc[1] + inv[2] * hc[2];
  const double hy = inv[3] * hc[0] + inv[4] * hc[1] + inv[5] * hc[2];
  return std::atan2(hy, hx);
}

ExtractionResult extract_clusters(const RawScan& scan, std::span<const LabelRecord> labels,
                                  const CalibMatrices& calib, const ExtractionOptions& options,
                                  std::string_view frame_id) {
  ExtractionResult result;
  const std::size_t n = scan.points.size();
  std::vector<double> vx(n), vy(n), vz(n);
  for (std::size_t i = 0; i < n; ++i) {
    vx[i] = scan.points[i].x;
    vy[i] = scan.points[i].y;
    vz[i] = scan.points[i].z;
  }
  std::vector<double> cx(n), cy(n), cz(n);
  kernels::affine_transform(vx, vy, vz, calib.velo_to_rect(), cx, cy, cz);
  std::vector<std::uint8_t> mask(n);

  for (std::size_t li = 0; li < labels.size(); ++li) {
    const LabelRecord& label = labels[li];
    if (std::find(options.classes.begin(), options.classes.end(), label.object_type) ==
        options.classes.end()) {
      continue;
    }
    ++result.considered;
    const kernels::BoxTest box{label.location[0],
                               label.location[1],
                               label.location[2],
                               std::cos(label.rotation_y),
                               std::sin(label.rotation_y),
                               0.5 * label.length,
                               0.5 * label.width,
                               label.height,
                               options.tolerance};
    kernels::box_mask(cx, cy, cz, box, mask);
    ClusterSample sample;
    sample.frame_id = std::string(frame_id);
    sample.object_index = static_cast<int>(li);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) sample.cluster.points.push_back({vx[i], vy[i], vz[i]});
    }
    if (sample.cluster.points.empty()) {
      ++result.dropped_empty;
      continue;
    }
    if (sample.cluster.points.size() < options.min_points) {
      ++result.skipped_sparse;
      continue;
    }
    sample.gt_yaw_canonical = canonicalize_yaw(sensor_yaw(label.rotation_y, calib));
    result.samples.push_back(std::move(sample));
  }
  return result;
}

std::vector<std::string> list_frames(const std::filesystem::path& root) {
  const auto dir = root / "label_2";
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::IOError, "missing directory " + dir.string());
  }
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string frame_id(int index) {
  std::string s = std::to_string(index);
  if (s.size() < 6) s.insert(0, 6 - s.size(), '0');
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IOError, "write failed: " + path.string());
}

Frame load_frame(const std::filesystem::path& root, const std::string& id) {
  Frame f;
  f.id = id;
  f.scan = read_scan_file(root / "velodyne" / (id + ".bin"));
  f.labels = parse_labels(read_text_file(root / "label_2" / (id + ".txt")));
  f.calib = parse_calib(read_text_file(root / "calib" / (id + ".txt")));
  return f;
}

}  // namespace hullpose::kitti
