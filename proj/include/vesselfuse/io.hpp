#pragma once

// File formats: contour / reference / record / centerline CSV ingestion and
// OBJ, MTL and CSV export. Output formatting is fixed (4 decimals in CSV,
// 6 in OBJ, "\n" line endings) so identical inputs give identical bytes.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "vesselfuse/centerline.hpp"
#include "vesselfuse/frame_align.hpp"
#include "vesselfuse/geometry.hpp"
#include "vesselfuse/reorder.hpp"

namespace vesselfuse {

/// Malformed or missing input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure to write an output file.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace files {
inline constexpr const char* kDiastolicContours = "diastolic_contours.csv";
inline constexpr const char* kSystolicContours = "systolic_contours.csv";
inline constexpr const char* kDiastolicReference = "diastolic_reference_points.csv";
inline constexpr const char* kSystolicReference = "systolic_reference_points.csv";
inline constexpr const char* kRecords = "combined_sorted_manual.csv";
}  // namespace files

// Readers. The stream variants take a source name used in error messages.

std::vector<ContourPoint> parse_contours_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<ContourPoint> read_contours_csv(const std::filesystem::path& path);

ContourPoint parse_reference_csv(std::istream& in, const std::string& source = "<stream>");
ContourPoint read_reference_csv(const std::filesystem::path& path);

std::vector<Record> parse_records_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<Record> read_records_csv(const std::filesystem::path& path);

Centerline parse_centerline_csv(std::istream& in, const std::string& source = "<stream>");
Centerline read_centerline_csv(const std::filesystem::path& path);

// CSV writers (comma-delimited, no header, 4 decimals).

void write_contours_csv(std::ostream& out, std::span<const ContourPoint> points);
void write_contours_csv(const std::filesystem::path& path, std::span<const ContourPoint> points);
void write_reference_csv(const std::filesystem::path& path, const ContourPoint& point);
void write_records_csv(const std::filesystem::path& path, const std::vector<Record>& records);
void write_centerline_csv(const std::filesystem::path& path, const Centerline& cl);

/// All points of a layer in frame-major order.
std::vector<ContourPoint> flatten(const std::vector<Contour>& layer);

// Meshes.

struct ObjMesh {
  std::vector<Vec3> vertices;
  std::vector<Point2> uvs;
  std::vector<std::array<int, 3>> faces;  // 1-based
  std::string material_name;
};

/// Tube mesh over a stack of rings with m points each. Vertex (i, j) has
/// index i * m + j + 1; every quad between consecutive rings becomes two
/// triangles, wrapping j mod m. UVs are (j / m, i / (n - 1)).
ObjMesh build_layer_mesh(const std::vector<Contour>& layer, const std::string& material_name);

void write_obj(const std::filesystem::path& path, const ObjMesh& mesh, const std::string& mtl_filename);
void write_mtl(const std::filesystem::path& path, const std::string& material_name);

struct ObjOptions {
  bool contours = true;
  bool walls = true;
  bool catheter = true;
  std::string filename_contours = "contours.obj";
  std::string material_contours = "contours.mtl";
  std::string filename_catheter = "catheter.obj";
  std::string material_catheter = "catheter.mtl";
  std::string filename_walls = "walls.obj";
  std::string material_walls = "walls.mtl";
};

/// One OBJ + MTL per enabled, non-empty layer. Returns the written files.
std::vector<std::filesystem::path> write_geometry_obj(const Geometry& geometry, const std::filesystem::path& dir,
                                                      const ObjOptions& options = {});

/// mesh_000_dia.obj, `steps` interpolated meshes, mesh_{steps+1}_sys.obj,
/// a shared mesh.mtl and deformation.csv (frame, point, |p_sys - p_dia|).
std::vector<std::filesystem::path> write_pair_objs(const GeometryPair& pair, int steps,
                                                   const std::filesystem::path& dir);

/// "v" and "vn" lines followed by one polyline "l 1 2 ... N".
void write_centerline_obj(const Centerline& cl, const std::filesystem::path& path);

// Tables.

void write_logs_csv(const std::filesystem::path& path, const std::vector<AlignLog>& logs);
void write_summary_csv(const std::filesystem::path& path, const PairSummary& summary);

/// Three-line block: MLA, max stenosis in percent, stenosis length.
std::string format_summary(const std::string& name, const LumenSummary& summary);
std::string format_summary_table(const std::vector<SummaryRow>& rows);

}  // namespace vesselfuse
