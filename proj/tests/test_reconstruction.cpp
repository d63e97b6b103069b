#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dynact/errors.hpp"
#include "dynact/phantom.hpp"
#include "dynact/projection.hpp"
#include "dynact/reconstruction.hpp"

using namespace dynact;

namespace {

constexpr double kPi = std::numbers::pi;

// Continuous kernel k(s) = (1/pi) int_0^inf sigma exp(-(gamma sigma)^2 / 2) cos(sigma s) dsigma,
// composite Simpson on [0, 12 / gamma].
double ramp_gauss_kernel(double s, double gamma) {
  const std::size_t n = 200000;
  const double upper = 12.0 / gamma;
  const double h = upper / static_cast<double>(n);
  auto f = [&](double sg) { return sg * std::exp(-0.5 * gamma * gamma * sg * sg) * std::cos(sg * s); };
  double sum = f(0.0) + f(upper);
  for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
  return sum * h / 3.0 / kPi;
}

ScanGeometry small_scan() {
  ScanGeometry g;
  g.num_angles = 90;
  g.num_detectors = 129;
  g.time_step = 1.0;
  return g;
}

ImageSpec small_image() {
  ImageSpec s;
  s.nx = s.ny = 65;
  return s;
}

Sinogram random_sinogram(const ScanGeometry& g, std::uint64_t seed) {
  Sinogram s(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : s.values) v = u(rng);
  return s;
}

}  // namespace

TEST_CASE("filter spec validation") {
  ScanGeometry g;
  FilterSpec f;
  CHECK_NOTHROW(f.validate(g));
  f.dft_size = 512;
  CHECK_THROWS_AS(f.validate(g), ConfigError);
  f.dft_size = 3000;
  CHECK_THROWS_AS(f.validate(g), ConfigError);
  f.dft_size = 1024;
  f.gamma = -1.0;
  CHECK_THROWS_AS(f.validate(g), ConfigError);
  CHECK(FilterSpec{}.effective_gamma(g) == g.detector_spacing());
}

TEST_CASE("zero row stays zero") {
  const ScanGeometry g;
  const std::vector<double> row(g.num_detectors, 0.0);
  for (double v : filter_projection(row, g, {})) CHECK(v == 0.0);
}

TEST_CASE("constant row loses its DC component") {
  const ScanGeometry g;
  const std::vector<double> row(g.num_detectors, 2.5);
  const auto spec = filtered_spectrum(row, g, {});
  CHECK(spec[0] == 0.0);
  CHECK(spec[1] > 0.0);
}

TEST_CASE("unit impulse reproduces the sampled ramp-Gaussian kernel") {
  const ScanGeometry g;
  const double dy = g.detector_spacing();
  FilterSpec f;
  f.dft_size = 65536;
  f.gamma = 3.0 * dy;
  std::vector<double> row(g.num_detectors, 0.0);
  const std::size_t m0 = g.num_detectors / 2;
  row[m0] = 1.0;
  const auto out = filter_projection(row, g, f);
  double err = 0.0;
  for (std::size_t m = m0 - 60; m <= m0 + 60; ++m) {
    const double s = (static_cast<double>(m) - static_cast<double>(m0)) * dy;
    err = std::max(err, std::abs(out[m] - dy * ramp_gauss_kernel(s, f.gamma)));
  }
  MESSAGE("impulse max error " << err);
  CHECK(err < 1e-6);
}

TEST_CASE("symmetric rows stay symmetric") {
  const ScanGeometry g;
  std::vector<double> row(g.num_detectors);
  for (std::size_t m = 0; m < row.size(); ++m) {
    const double y = g.detector(m);
    row[m] = std::abs(y) < 0.6 ? std::sqrt(0.36 - y * y) + 0.2 * std::cos(9.0 * y) : 0.0;
  }
  for (std::size_t m = 0; m < row.size(); ++m) row[m] = 0.5 * (row[m] + row[row.size() - 1 - m]);
  const auto out = filter_projection(row, g, {});
  for (std::size_t m = 0; m < out.size(); ++m) CHECK(std::abs(out[m] - out[out.size() - 1 - m]) < 1e-12);
}

TEST_CASE("wider Gaussian never adds high-frequency energy") {
  const ScanGeometry g;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> row(g.num_detectors);
  for (auto& v : row) v = u(rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma : {1e-4, 1e-3, 4e-3, 1e-2, 3e-2, 1e-1}) {
    FilterSpec f;
    f.gamma = gamma;
    const auto spec = filtered_spectrum(row, g, f);
    const std::size_t n = spec.size();
    double hf = 0.0;
    for (std::size_t k = n / 4; k < 3 * n / 4; ++k) hf += spec[k];
    CHECK(hf <= prev);
    prev = hf;
  }
}

TEST_CASE("detector rows are sampled linearly and vanish outside") {
  ScanGeometry g;
  g.num_detectors = 5;
  const std::vector<double> row{0.0, 1.0, 3.0, 2.0, 0.0};
  CHECK(sample_row(row, g, -0.5) == 1.0);
  CHECK(sample_row(row, g, -0.25) == doctest::Approx(2.0));
  CHECK(sample_row(row, g, 0.125) == doctest::Approx(2.75));
  CHECK(sample_row(row, g, 1.5) == 0.0);
  CHECK(sample_row(row, g, -1.0001) == 0.0);
}

TEST_CASE("zero sinogram reconstructs to zero") {
  const Sinogram s(small_scan());
  const Image img = reconstruct(s, DeformationProvider::identity(), {}, small_image());
  for (double v : img.values) CHECK(v == 0.0);
}

TEST_CASE("reconstruction is linear in the data") {
  const ScanGeometry g = small_scan();
  const Sinogram a = random_sinogram(g, 1), b = random_sinogram(g, 2);
  Sinogram sum(g);
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] = a.values[i] + b.values[i];
  const auto provider = DeformationProvider::analytic(AffineMotion::breathing());
  const Image ra = reconstruct(a, provider, {}, small_image());
  const Image rb = reconstruct(b, provider, {}, small_image());
  const Image rs = reconstruct(sum, provider, {}, small_image());
  for (std::size_t i = 0; i < rs.values.size(); ++i) {
    CHECK(std::abs(rs.values[i] - ra.values[i] - rb.values[i]) < 1e-10);
  }
}

TEST_CASE("identity provider collapses to the static path") {
  const ScanGeometry g = small_scan();
  const Sinogram s = random_sinogram(g, 5);
  const Image dyn = reconstruct(s, DeformationProvider::identity(), {}, small_image());
  const Image stat = reconstruct_static(s, {}, small_image());
  double diff = 0.0;
  for (std::size_t i = 0; i < dyn.values.size(); ++i) diff = std::max(diff, std::abs(dyn.values[i] - stat.values[i]));
  CHECK(diff < 1e-12);
}

TEST_CASE("static reconstruction edges lie within one pixel of the phantom") {
  PhantomSpec p;
  p.ellipses = {{{0.05, -0.1}, {0.7, 0.45}, 0.3, 1.0, "body"}};
  ScanGeometry g;
  g.time_step = 1.0;
  const Sinogram s = simulate_scan(p, AffineMotion::identity(), g);
  const ImageSpec spec;
  const Image img = reconstruct_static(s, {}, spec);
  std::size_t mismatched = 0;
  for (std::size_t j = 1; j + 1 < spec.ny; ++j) {
    for (std::size_t i = 1; i + 1 < spec.nx; ++i) {
      const bool truth = eval_f0(p, spec.pixel_center(i, j)) > 0.5;
      if ((img.at(i, j) > 0.5) == truth) continue;
      ++mismatched;
      bool near_edge = false;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
          near_edge |= (eval_f0(p, spec.pixel_center(i + di, j + dj)) > 0.5) != truth;
      CHECK(near_edge);
    }
  }
  MESSAGE("pixels on the wrong side of the threshold: " << mismatched);
}

TEST_CASE("calibrated norm recovers unit density on a disk") {
  PhantomSpec p;
  p.ellipses = {{{0.0, 0.0}, {0.5, 0.5}, 0.0, 1.0, ""}};
  ScanGeometry g;
  g.time_step = 1.0;
  const ImageSpec spec;
  const Image img = reconstruct_static(simulate_scan(p, AffineMotion::identity(), g), {}, spec);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < spec.ny; ++j)
    for (std::size_t i = 0; i < spec.nx; ++i)
      if (norm(spec.pixel_center(i, j)) < 0.5 - 3.0 * spec.dx()) {
        sum += img.at(i, j);
        ++n;
      }
  CHECK(sum / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.005));
  CHECK(kBackprojectionNorm == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(0.005));
}
