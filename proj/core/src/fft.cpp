#include "sdbp/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace sdbp::fft {
namespace {

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft on
// caller arrays is. Plans are created FFTW_ESTIMATE | FFTW_UNALIGNED so one
// cached plan serves any buffer and results are run-to-run deterministic.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 1) |
                              (sign == FFTW_FORWARD ? 0u : 1u);
    std::lock_guard lock(mu_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> probe(n);
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw_plan_dft_1d failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::uint64_t, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(std::vector<std::complex<double>>& v, int sign) {
  if (v.empty()) throw std::invalid_argument("fft: empty input");
  fftw_plan p = cache().get(v.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(p, buf, buf);
}

}  // namespace

void forward(std::vector<std::complex<double>>& v) { execute(v, FFTW_FORWARD); }

void inverse(std::vector<std::complex<double>>& v) {
  execute(v, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(v.size());
  for (auto& s : v) s *= scale;
}

}  // namespace sdbp::fft
