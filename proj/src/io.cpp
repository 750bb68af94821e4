#include "vesselfuse/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <fmt/format.h>
#include "vesselfuse/pair_align.hpp"

namespace vesselfuse {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on tab or comma when present (keeping empty fields); otherwise on
// runs of spaces.
std::vector<std::string_view> split_numeric_row(std::string_view line) {
  std::vector<std::string_view> out;
  const char delim = line.find('\t') != std::string_view::npos ? '\t'
                     : line.find(',') != std::string_view::npos ? ','
                                                                : ' ';
  if (delim == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Record rows keep empty fields for single spaces too ("37 22.79 D  2.35").
std::vector<std::string_view> split_record_row(std::string_view line) {
  const char delim = line.find('\t') != std::string_view::npos ? '\t'
                     : line.find(',') != std::string_view::npos ? ','
                                                                : ' ';
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw InputError(fmt::format("{}:{}: {}", source, line, what));
}

bool try_parse(std::string_view field, double& value) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(value);
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
  double v = 0.0;
  if (!try_parse(field, v)) fail(source, line, fmt::format("invalid number '{}'", field));
  return v;
}

int parse_frame(std::string_view field, const std::string& source, std::size_t line) {
  const double v = parse_number(field, source, line);
  if (v < 0.0 || v != std::floor(v) || v > 2147483647.0) {
    fail(source, line, fmt::format("invalid frame index '{}'", field));
  }
  return static_cast<int>(v);
}

template <class RowFn>
void for_each_row(std::istream& in, RowFn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    fn(line, line_no);
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError(fmt::format("cannot write {}", path.string()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw OutputError(fmt::format("write failed for {}", path.string()));
}

std::optional<Phase> parse_phase(std::string_view field) {
  if (field == "D") return Phase::Diastole;
  if (field == "S") return Phase::Systole;
  return std::nullopt;
}

std::optional<double> optional_number(const std::vector<std::string_view>& fields, std::size_t i,
                                      const std::string& source, std::size_t line) {
  if (i >= fields.size() || fields[i].empty()) return std::nullopt;
  return parse_number(fields[i], source, line);
}

std::string fmt4(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

std::vector<ContourPoint> parse_contours_csv(std::istream& in, const std::string& source) {
  std::vector<ContourPoint> points;
  std::unordered_map<int, int> next_index;
  for_each_row(in, [&](std::string_view line, std::size_t no) {
    const auto fields = split_numeric_row(line);
    if (fields.size() != 4) fail(source, no, fmt::format("expected 4 fields, found {}", fields.size()));
    ContourPoint p;
    p.frame_index = parse_frame(fields[0], source, no);
    p.x = parse_number(fields[1], source, no);
    p.y = parse_number(fields[2], source, no);
    p.z = parse_number(fields[3], source, no);
    p.point_index = next_index[p.frame_index]++;
    points.push_back(p);
  });
  if (points.empty()) throw InputError(fmt::format("{}: no contour rows", source));
  return points;
}

std::vector<ContourPoint> read_contours_csv(const fs::path& path) {
  auto in = open_input(path);
  return parse_contours_csv(in, path.string());
}

ContourPoint parse_reference_csv(std::istream& in, const std::string& source) {
  auto points = parse_contours_csv(in, source);
  if (points.size() > 1) throw InputError(fmt::format("{}: multiple reference points", source));
  ContourPoint p = points.front();
  p.aortic = true;
  return p;
}

ContourPoint read_reference_csv(const fs::path& path) {
  auto in = open_input(path);
  return parse_reference_csv(in, path.string());
}

std::vector<Record> parse_records_csv(std::istream& in, const std::string& source) {
  std::vector<Record> records;
  bool first_row = true;
  for_each_row(in, [&](std::string_view line, std::size_t no) {
    const auto fields = split_record_row(line);
    double probe = 0.0;
    if (first_row && !fields.empty() && !try_parse(fields[0], probe)) {
      first_row = false;  // header
      return;
    }
    first_row = false;
    if (fields.size() < 2) fail(source, no, "record needs at least frame and phase");

    Record r;
    r.frame = parse_frame(fields[0], source, no);
    std::size_t phase_col = 1;
    if (!parse_phase(fields[1])) {
      phase_col = 2;
      r.position = optional_number(fields, 1, source, no);
    }
    if (phase_col >= fields.size()) fail(source, no, "missing phase");
    const auto phase = parse_phase(fields[phase_col]);
    if (!phase) fail(source, no, fmt::format("invalid phase '{}' (expected D or S)", fields[phase_col]));
    r.phase = *phase;
    r.measurement_1 = optional_number(fields, phase_col + 1, source, no);
    r.measurement_2 = optional_number(fields, phase_col + 2, source, no);
    if (fields.size() > phase_col + 3) fail(source, no, "too many fields");
    records.push_back(r);
  });
  return records;
}

std::vector<Record> read_records_csv(const fs::path& path) {
  auto in = open_input(path);
  return parse_records_csv(in, path.string());
}

Centerline parse_centerline_csv(std::istream& in, const std::string& source) {
  std::vector<Vec3> pts;
  for_each_row(in, [&](std::string_view line, std::size_t no) {
    const auto fields = split_numeric_row(line);
    if (fields.size() != 3) fail(source, no, fmt::format("expected 3 fields, found {}", fields.size()));
    pts.push_back({parse_number(fields[0], source, no), parse_number(fields[1], source, no),
                   parse_number(fields[2], source, no)});
  });
  if (pts.size() < 2) throw InputError(fmt::format("{}: centerline needs at least 2 points", source));
  try {
    return centerline_from_points(pts);
  } catch (const std::invalid_argument& e) {
    throw InputError(fmt::format("{}: {}", source, e.what()));
  }
}

Centerline read_centerline_csv(const fs::path& path) {
  auto in = open_input(path);
  return parse_centerline_csv(in, path.string());
}

void write_contours_csv(std::ostream& out, std::span<const ContourPoint> points) {
  for (const auto& p : points) out << p.frame_index << ',' << fmt4(p.x) << ',' << fmt4(p.y) << ',' << fmt4(p.z) << '\n';
}

void write_contours_csv(const fs::path& path, std::span<const ContourPoint> points) {
  auto out = open_output(path);
  write_contours_csv(out, points);
  finish(out, path);
}

void write_reference_csv(const fs::path& path, const ContourPoint& point) {
  write_contours_csv(path, std::span<const ContourPoint>(&point, 1));
}

void write_records_csv(const fs::path& path, const std::vector<Record>& records) {
  auto out = open_output(path);
  auto opt = [](const std::optional<double>& v) { return v ? fmt4(*v) : std::string(); };
  for (const auto& r : records) {
    out << r.frame << ',' << opt(r.position) << ',' << (r.phase == Phase::Diastole ? 'D' : 'S') << ','
        << opt(r.measurement_1) << ',' << opt(r.measurement_2) << '\n';
  }
  finish(out, path);
}

void write_centerline_csv(const fs::path& path, const Centerline& cl) {
  auto out = open_output(path);
  for (const auto& p : cl.points) {
    out << fmt4(p.contour_point.x) << ',' << fmt4(p.contour_point.y) << ',' << fmt4(p.contour_point.z) << '\n';
  }
  finish(out, path);
}

std::vector<ContourPoint> flatten(const std::vector<Contour>& layer) {
  std::vector<ContourPoint> out;
  for (const auto& c : layer) out.insert(out.end(), c.points().begin(), c.points().end());
  return out;
}

ObjMesh build_layer_mesh(const std::vector<Contour>& layer, const std::string& material_name) {
  ObjMesh mesh;
  mesh.material_name = material_name;
  if (layer.empty()) return mesh;

  const std::size_t n = layer.size();
  const std::size_t m = layer.front().size();
  for (const auto& c : layer) {
    if (c.size() != m) throw std::invalid_argument("mesh layer requires equal point counts per frame");
  }
  if (m == 0) return mesh;

  mesh.vertices.reserve(n * m);
  mesh.uvs.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      mesh.vertices.push_back(layer[i].points()[j].position());
      mesh.uvs.push_back({static_cast<double>(j) / static_cast<double>(m), v});
    }
  }
  auto idx = [m](std::size_t i, std::size_t j) { return static_cast<int>(i * m + (j % m) + 1); };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      mesh.faces.push_back({idx(i, j), idx(i, j + 1), idx(i + 1, j)});
      mesh.faces.push_back({idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)});
    }
  }
  return mesh;
}

void write_obj(const fs::path& path, const ObjMesh& mesh, const std::string& mtl_filename) {
  auto out = open_output(path);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "mtllib {}\no {}\n", mtl_filename, mesh.material_name);
  for (const auto& v : mesh.vertices) {
    fmt::format_to(std::back_inserter(buf), "v {:.6f} {:.6f} {:.6f}\n", v.x, v.y, v.z);
  }
  for (const auto& t : mesh.uvs) fmt::format_to(std::back_inserter(buf), "vt {:.6f} {:.6f}\n", t.x, t.y);
  fmt::format_to(std::back_inserter(buf), "usemtl {}\n", mesh.material_name);
  const bool uv = !mesh.uvs.empty();
  for (const auto& f : mesh.faces) {
    if (uv) {
      fmt::format_to(std::back_inserter(buf), "f {0}/{0} {1}/{1} {2}/{2}\n", f[0], f[1], f[2]);
    } else {
      fmt::format_to(std::back_inserter(buf), "f {} {} {}\n", f[0], f[1], f[2]);
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

void write_mtl(const fs::path& path, const std::string& material_name) {
  auto out = open_output(path);
  out << "newmtl " << material_name << "\n"
      << "Ka 0.200000 0.200000 0.200000\n"
      << "Kd 0.800000 0.800000 0.800000\n"
      << "Ks 0.000000 0.000000 0.000000\n"
      << "d 1.000000\n"
      << "illum 1\n";
  finish(out, path);
}

std::vector<fs::path> write_geometry_obj(const Geometry& geometry, const fs::path& dir, const ObjOptions& options) {
  if (geometry.empty()) throw std::invalid_argument("empty geometry");
  std::vector<fs::path> written;
  auto layer = [&](bool enabled, const std::vector<Contour>& contours, const std::string& obj, const std::string& mtl) {
    if (!enabled || contours.empty()) return;
    const std::string material = fs::path(obj).stem().string();
    write_obj(dir / obj, build_layer_mesh(contours, material), mtl);
    write_mtl(dir / mtl, material);
    written.push_back(dir / obj);
    written.push_back(dir / mtl);
  };
  layer(options.contours, geometry.contours, options.filename_contours, options.material_contours);
  layer(options.catheter, geometry.catheters, options.filename_catheter, options.material_catheter);
  layer(options.walls, geometry.walls, options.filename_walls, options.material_walls);
  return written;
}

std::vector<fs::path> write_pair_objs(const GeometryPair& pair, int steps, const fs::path& dir) {
  if (steps < 0) throw std::invalid_argument("interpolation steps must be non-negative");
  const auto& dia = pair.dia_geom.contours;
  const auto& sys = pair.sys_geom.contours;
  if (dia.size() != sys.size()) throw std::invalid_argument("pair frame counts differ");

  const std::string material = "mesh";
  const std::string mtl = "mesh.mtl";
  std::vector<fs::path> written;
  auto emit = [&](const std::vector<Contour>& layer, const std::string& name) {
    write_obj(dir / name, build_layer_mesh(layer, material), mtl);
    written.push_back(dir / name);
  };

  const GeometryPair lumen{Geometry{dia, {}, {}, {}, {}}, Geometry{sys, {}, {}, {}, {}}};
  const auto intermediates = interpolate_pair(lumen, steps);
  emit(dia, "mesh_000_dia.obj");
  for (std::size_t t = 0; t < intermediates.size(); ++t) {
    emit(intermediates[t].contours, fmt::format("mesh_{:03}.obj", t + 1));
  }
  emit(sys, fmt::format("mesh_{:03}_sys.obj", steps + 1));
  write_mtl(dir / mtl, material);
  written.push_back(dir / mtl);

  const fs::path sidecar = dir / "deformation.csv";
  auto out = open_output(sidecar);
  out << "frame,point,displacement_mm\n";
  for (std::size_t i = 0; i < dia.size(); ++i) {
    for (std::size_t j = 0; j < dia[i].size(); ++j) {
      const auto& a = dia[i].points()[j];
      const auto& b = sys[i].points()[j];
      out << dia[i].id() << ',' << a.point_index << ',' << fmt4(a.distance(b)) << '\n';
    }
  }
  finish(out, sidecar);
  written.push_back(sidecar);
  return written;
}

void write_centerline_obj(const Centerline& cl, const fs::path& path) {
  if (cl.size() < 2) throw std::invalid_argument("centerline requires at least 2 points");
  auto out = open_output(path);
  fmt::memory_buffer buf;
  for (const auto& p : cl.points) {
    fmt::format_to(std::back_inserter(buf), "v {:.6f} {:.6f} {:.6f}\n", p.contour_point.x, p.contour_point.y,
                   p.contour_point.z);
  }
  for (const auto& p : cl.points) {
    fmt::format_to(std::back_inserter(buf), "vn {:.6f} {:.6f} {:.6f}\n", p.normal.x, p.normal.y, p.normal.z);
  }
  fmt::format_to(std::back_inserter(buf), "l");
  for (std::size_t k = 1; k <= cl.size(); ++k) fmt::format_to(std::back_inserter(buf), " {}", k);
  fmt::format_to(std::back_inserter(buf), "\n");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

void write_logs_csv(const fs::path& path, const std::vector<AlignLog>& logs) {
  auto out = open_output(path);
  out << "id,matched_to,rel_rot_deg,total_rot_deg,tx,ty,centroid_x,centroid_y\n";
  for (const auto& l : logs) {
    out << l.id << ',' << l.matched_to << ',' << fmt4(l.rel_rot_deg) << ',' << fmt4(l.total_rot_deg) << ','
        << fmt4(l.tx) << ',' << fmt4(l.ty) << ',' << fmt4(l.centroid_x) << ',' << fmt4(l.centroid_y) << '\n';
  }
  finish(out, path);
}

void write_summary_csv(const fs::path& path, const PairSummary& summary) {
  auto out = open_output(path);
  out << "id,area_dia,ellip_dia,area_sys,ellip_sys,z\n";
  for (const auto& r : summary.rows) {
    out << r.contour_id << ',' << fmt4(r.area_dia) << ',' << fmt4(r.ellip_dia) << ',' << fmt4(r.area_sys) << ','
        << fmt4(r.ellip_sys) << ',' << fmt4(r.z) << '\n';
  }
  finish(out, path);
}

std::string format_summary(const std::string& name, const LumenSummary& summary) {
  return fmt::format("Geometry \"{}\":\nMLA [mm2]: {:.2f}\nMax. stenosis [%]: {:.0f}\nStenosis length [mm]: {:.2f}\n",
                     name, summary.mla, summary.max_stenosis * 100.0, summary.stenosis_length);
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  std::string out = "id\tarea_dia\tellip_dia\tarea_sys\tellip_sys\tz\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\n", r.contour_id, r.area_dia, r.ellip_dia, r.area_sys,
                       r.ellip_sys, r.z);
  }
  return out;
}

}  // namespace vesselfuse
