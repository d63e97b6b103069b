// Derives the backprojection normalisation from a static unit-disk scan:
// reconstructs with norm 1 and reports the factor that makes the mean over
// the disk interior (eroded by 3 pixels) equal to the true density 1.

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dynact/config.hpp"
#include "dynact/phantom.hpp"
#include "dynact/projection.hpp"
#include "dynact/reconstruction.hpp"

int main(int argc, char** argv) {
  using namespace dynact;
  PipelineConfig config = default_config();
  if (argc > 1) config.filter.dft_size = std::strtoull(argv[1], nullptr, 10);
  PhantomSpec disk;
  disk.ellipses = {{{0.0, 0.0}, {0.5, 0.5}, 0.0, 1.0, "disk"}};
  const Sinogram sino = simulate_scan(disk, AffineMotion::identity(), config.scan);
  const Image img = static_backproject(filter_sinogram(sino, config.filter), config.image, 1.0);

  const double limit = 0.5 - 3.0 * config.image.dx();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < img.spec.ny; ++j) {
    for (std::size_t i = 0; i < img.spec.nx; ++i) {
      if (norm(img.spec.pixel_center(i, j)) < limit) {
        sum += img.at(i, j);
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);
  std::printf("pixels in eroded disk: %zu\n", count);
  std::printf("mean with unit norm:   %.17g\n", mean);
  std::printf("calibrated norm:       %.17g\n", 1.0 / mean);
  std::printf("analytic 1/(2 pi):     %.17g\n", 1.0 / (2.0 * 3.14159265358979323846));
  return 0;
}
