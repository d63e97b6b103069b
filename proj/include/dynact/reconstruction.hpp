#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynact/image.hpp"
#include "dynact/projection.hpp"
#include "dynact/provider.hpp"

namespace dynact {

/// Ramp filter |sigma| with Gaussian low-pass exp(-(gamma sigma)^2 / 2).
struct FilterSpec {
  double gamma = 0.0;          // <= 0 selects the detector spacing
  std::size_t dft_size = 4096;  // power of two, at least twice the detector count

  double effective_gamma(const ScanGeometry& g) const {
    return gamma > 0.0 ? gamma : g.detector_spacing();
  }
  /// Throws ConfigError when dft_size is not a power of two >= 2 num_detectors.
  void validate(const ScanGeometry& g) const;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

/// Scale applied to the angle sum. 1/(2 pi) is the value for an exact ramp
/// filter; the constant here is the unit-disk calibration of the discrete
/// pipeline (tools/dynact_calibrate).
extern const double kBackprojectionNorm;

/// Filter gain at each DFT bin k, sigma_k = 2 pi k' / (N dy) with k' the signed index.
std::vector<double> filter_response(std::size_t dft_size, double detector_spacing, double gamma);

/// Zero-pads, filters in the Fourier domain and truncates back to the row length.
std::vector<double> filter_projection(std::span<const double> row, const ScanGeometry& geometry,
                                      const FilterSpec& filter);

/// Magnitudes of the filtered, zero-padded row in the Fourier domain.
std::vector<double> filtered_spectrum(std::span<const double> row, const ScanGeometry& geometry,
                                      const FilterSpec& filter);

/// Filters every row of the sinogram.
Sinogram filter_sinogram(const Sinogram& sinogram, const FilterSpec& filter);

/// Linear interpolation of a detector row at offset y; zero outside the detector.
double sample_row(std::span<const double> row, const ScanGeometry& geometry, double y);

/// Motion-compensated backprojection of an already filtered sinogram. Row n is
/// read at (Phi_{t_n} x) . theta_n.
Image backproject(const Sinogram& filtered, const DeformationProvider& provider,
                  const ImageSpec& image, double norm = kBackprojectionNorm);

/// Classical backprojection, coded separately from the dynamic path.
Image static_backproject(const Sinogram& filtered, const ImageSpec& image,
                         double norm = kBackprojectionNorm);

Image reconstruct(const Sinogram& sinogram, const DeformationProvider& provider,
                  const FilterSpec& filter, const ImageSpec& image);
Image reconstruct_static(const Sinogram& sinogram, const FilterSpec& filter,
                         const ImageSpec& image);

}  // namespace dynact
