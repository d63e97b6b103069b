#pragma once

#include <filesystem>
#include <vector>

#include "dynact/boundary.hpp"
#include "dynact/elastic.hpp"
#include "dynact/grid.hpp"
#include "dynact/image.hpp"
#include "dynact/projection.hpp"

namespace dynact {

// Binary payloads are little-endian IEEE-754 doubles; headers are one ASCII
// line with numbers printed to 17 significant digits. All readers throw
// IoError for unreadable or malformed files.

/// "DYNACT-SINO v1 <num_angles> <num_detectors> <angle_start> <angle_end> <det_min> <det_max>".
/// Time sampling is not part of the format; read_sinogram leaves it at zero.
void write_sinogram(const std::filesystem::path& path, const Sinogram& sinogram);
Sinogram read_sinogram(const std::filesystem::path& path);

/// "DYNACT-IMG v1 <nx> <ny> <xmin> <xmax> <ymin> <ymax>".
void write_image(const std::filesystem::path& path, const Image& image);
Image read_image(const std::filesystem::path& path);

/// 16-bit binary PGM, top row = largest y, grey levels spread over [lo, hi]
/// (recorded in the comment line). lo == hi selects the image's own range.
void write_pgm(const std::filesystem::path& path, const Image& image, double lo = 0.0,
               double hi = 0.0);

/// Contents of a DYNACT-FIELD file.
struct FieldFile {
  std::vector<double> x_coords, y_coords;
  std::vector<NodeClass> classification;
  DisplacementHistory history;
};

/// "DYNACT-FIELD v1 <nx> <ny> <num_snapshots>", then x_coords, y_coords, one
/// classification byte per node and per snapshot its time, u1 and u2.
void write_field(const std::filesystem::path& path, const Grid2D& grid,
                 const DisplacementHistory& history);
FieldFile read_field(const std::filesystem::path& path);

/// Boundary observations in the same container: nx = number of boundary
/// nodes, ny = 1, x_coords holds each node's flat grid index, y_coords = {0},
/// every classification byte is BOUNDARY.
void write_boundary_field(const std::filesystem::path& path, const Grid2D& grid,
                          const BoundaryData& data);

/// Throws MismatchError unless the file's coordinates and classification
/// equal the grid's.
void check_field_matches(const FieldFile& file, const Grid2D& grid);

}  // namespace dynact
