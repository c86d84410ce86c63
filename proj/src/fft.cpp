#include "qiup/fft.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <vector>

#include "qiup/errors.hpp"

namespace qiup::fft {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

void transform(std::span<std::complex<double>> data, std::span<const int> extents,
               Direction dir) {
  if (extents.empty()) throw ValidationError("fft needs at least one dimension");
  std::size_t total = 1;
  for (int e : extents) {
    if (e <= 0) throw ValidationError("fft extents must be positive");
    total *= static_cast<std::size_t>(e);
  }
  if (total != data.size()) throw ValidationError("fft extents do not match data size");

  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft(static_cast<int>(extents.size()), extents.data(), buf, buf, sign,
                             FFTW_ESTIMATE));
  }
  if (!plan) throw Error("fftw planning failed");
  fftw_execute(plan.get());
}

void transform_2d(std::span<std::complex<double>> data, int rows, int cols, Direction dir) {
  const int extents[2] = {rows, cols};
  transform(data, extents, dir);
}

}  // namespace qiup::fft
