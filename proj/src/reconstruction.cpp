#include "dynact/reconstruction.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include "dynact/errors.hpp"
#include "dynact/parallel.hpp"

namespace dynact {

// From tools/dynact_calibrate (static disk of radius 0.5, default scan and
// filter). The exact-ramp value 1/(2 pi) = 0.15915494309189535 leaves the
// sampled-ramp DC deficit uncorrected (about 2% at dft_size 1024, 0.15% at 4096).
const double kBackprojectionNorm = 0.15939175103476083;

void FilterSpec::validate(const ScanGeometry& g) const {
  std::ostringstream err;
  if (!std::isfinite(gamma) || gamma < 0.0) err << "gamma must be >= 0 (0 selects the detector spacing); ";
  const std::size_t n = dft_size;
  if (n == 0 || (n & (n - 1)) != 0) err << "dft_size must be a power of two; ";
  if (n < 2 * g.num_detectors) {
    err << "dft_size " << n << " is smaller than twice the " << g.num_detectors << " detectors; ";
  }
  if (const auto msg = err.str(); !msg.empty()) throw ConfigError("filter: " + msg);
}

std::vector<double> filter_response(std::size_t dft_size, double detector_spacing, double gamma) {
  std::vector<double> h(dft_size);
  const auto n = static_cast<double>(dft_size);
  for (std::size_t k = 0; k < dft_size; ++k) {
    const double kk = k < dft_size / 2 ? static_cast<double>(k) : static_cast<double>(k) - n;
    const double sigma = 2.0 * std::numbers::pi * kk / (n * detector_spacing);
    const double gs = gamma * sigma;
    h[k] = std::abs(sigma) * std::exp(-0.5 * gs * gs);
  }
  return h;
}

namespace {

using Complex = std::complex<double>;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Unaligned FFTW plans for one transform length. Plans are created under a
/// lock; executing them on distinct arrays is thread-safe.
class FftPair {
 public:
  explicit FftPair(std::size_t n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    std::vector<Complex> buf(n);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    const int len = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(len, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_1d(len, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!forward_ || !backward_) throw Error("FFTW plan creation failed");
  }
  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  void forward(std::vector<Complex>& v) const {
    auto* p = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(forward_, p, p);
  }
  void backward(std::vector<Complex>& v) const {
    auto* p = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(backward_, p, p);
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

struct RowFilter {
  RowFilter(const ScanGeometry& g, const FilterSpec& f)
      : fft(f.dft_size), gain(filter_response(f.dft_size, g.detector_spacing(), f.effective_gamma(g))) {
    f.validate(g);
  }

  /// Spectrum of the filtered, zero-padded row.
  std::vector<Complex> spectrum(std::span<const double> row) const {
    std::vector<Complex> buf(fft.size(), Complex(0.0, 0.0));
    for (std::size_t m = 0; m < row.size(); ++m) buf[m] = Complex(row[m], 0.0);
    fft.forward(buf);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= gain[k];
    return buf;
  }

  void apply(std::span<const double> row, std::span<double> out) const {
    auto buf = spectrum(row);
    fft.backward(buf);
    const double inv_n = 1.0 / static_cast<double>(fft.size());
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t m = 0; m < out.size(); ++m) {
      out[m] = buf[m].real() * inv_n;
      max_re = std::max(max_re, std::abs(out[m]));
      max_im = std::max(max_im, std::abs(buf[m].imag() * inv_n));
    }
    if (max_im > 1e-10 * std::max(1.0, max_re)) {
      throw Error("filter_projection: imaginary residue " + std::to_string(max_im) +
                  " exceeds tolerance");
    }
  }

  FftPair fft;
  std::vector<double> gain;
};

void check_row(std::span<const double> row, const ScanGeometry& g) {
  if (row.size() != g.num_detectors) {
    throw MismatchError("projection row has " + std::to_string(row.size()) + " samples, geometry has " +
                        std::to_string(g.num_detectors) + " detectors");
  }
}

}  // namespace

std::vector<double> filter_projection(std::span<const double> row, const ScanGeometry& geometry,
                                      const FilterSpec& filter) {
  check_row(row, geometry);
  RowFilter f(geometry, filter);
  std::vector<double> out(row.size());
  f.apply(row, out);
  return out;
}

std::vector<double> filtered_spectrum(std::span<const double> row, const ScanGeometry& geometry,
                                      const FilterSpec& filter) {
  check_row(row, geometry);
  RowFilter f(geometry, filter);
  const auto spec = f.spectrum(row);
  std::vector<double> mag(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) mag[k] = std::abs(spec[k]);
  return mag;
}

Sinogram filter_sinogram(const Sinogram& sinogram, const FilterSpec& filter) {
  const ScanGeometry& g = sinogram.geometry;
  if (sinogram.values.size() != g.num_angles * g.num_detectors) {
    throw MismatchError("sinogram size does not match its geometry");
  }
  RowFilter f(g, filter);
  Sinogram out(g);
  const std::size_t m = g.num_detectors;
  parallel_for(0, g.num_angles, [&](std::size_t n) {
    f.apply(std::span<const double>(sinogram.values.data() + n * m, m),
            std::span<double>(out.values.data() + n * m, m));
  });
  return out;
}

double sample_row(std::span<const double> row, const ScanGeometry& geometry, double y) {
  const double pos = (y - geometry.detector_min) / geometry.detector_spacing();
  const double last = static_cast<double>(row.size() - 1);
  if (!(pos >= 0.0 && pos <= last)) return 0.0;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= row.size()) return row[row.size() - 1];
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * row[i] + w * row[i + 1];
}

namespace {

void check_filtered(const Sinogram& s) {
  if (s.values.size() != s.geometry.num_angles * s.geometry.num_detectors) {
    throw MismatchError("sinogram size does not match its geometry");
  }
  if (s.geometry.num_detectors < 2) throw ConfigError("backprojection needs at least two detectors");
}

}  // namespace

Image backproject(const Sinogram& filtered, const DeformationProvider& provider,
                  const ImageSpec& spec, double norm) {
  check_filtered(filtered);
  const ScanGeometry& g = filtered.geometry;
  const std::size_t m = g.num_detectors;
  Image img(spec);
  std::vector<Vec2> pixels(spec.size());
  for (std::size_t j = 0; j < spec.ny; ++j) {
    for (std::size_t i = 0; i < spec.nx; ++i) pixels[j * spec.nx + i] = spec.pixel_center(i, j);
  }
  for (std::size_t n = 0; n < g.num_angles; ++n) {
    const auto frame = provider.frame(g.time(n));
    const Vec2 theta = g.theta(n);
    const std::span<const double> row(filtered.values.data() + n * m, m);
    parallel_for_range(0, pixels.size(), [&](std::size_t first, std::size_t last) {
      for (std::size_t p = first; p < last; ++p) {
        img.values[p] += sample_row(row, g, dot(frame(pixels[p]), theta));
      }
    });
  }
  const double w = norm * g.angle_step();
  for (double& v : img.values) v *= w;
  return img;
}

Image static_backproject(const Sinogram& filtered, const ImageSpec& spec, double norm) {
  check_filtered(filtered);
  const ScanGeometry& g = filtered.geometry;
  const std::size_t m = g.num_detectors;
  Image img(spec);
  for (std::size_t n = 0; n < g.num_angles; ++n) {
    const Vec2 theta = g.theta(n);
    const std::span<const double> row(filtered.values.data() + n * m, m);
    parallel_for(0, spec.ny, [&](std::size_t j) {
      for (std::size_t i = 0; i < spec.nx; ++i) {
        const Vec2 x = spec.pixel_center(i, j);
        img.values[j * spec.nx + i] += sample_row(row, g, x.x * theta.x + x.y * theta.y);
      }
    });
  }
  const double w = norm * g.angle_step();
  for (double& v : img.values) v *= w;
  return img;
}

Image reconstruct(const Sinogram& sinogram, const DeformationProvider& provider,
                  const FilterSpec& filter, const ImageSpec& image) {
  return backproject(filter_sinogram(sinogram, filter), provider, image);
}

Image reconstruct_static(const Sinogram& sinogram, const FilterSpec& filter,
                         const ImageSpec& image) {
  return static_backproject(filter_sinogram(sinogram, filter), image);
}

}  // namespace dynact
