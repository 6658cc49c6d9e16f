#include "mlin/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace mlin {
namespace {

// fftw_execute_dft is thread-safe, plan creation is not.  Plans are created
// with FFTW_UNALIGNED so a cached plan can execute on any caller buffer.
struct PlanCache {
    std::mutex mu;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

    fftw_plan get(const std::vector<int>& shape, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(shape, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        std::size_t total = 1;
        for (int d : shape) total *= static_cast<std::size_t>(d);
        std::vector<std::complex<double>> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw_plan_dft failed");
        plans.emplace(std::move(key), p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

} // namespace

void fft_nd(std::complex<double>* data, const std::vector<int>& shape, int sign) {
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("fft_nd: nonpositive dimension");
    }
    fftw_plan p = cache().get(shape, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

} // namespace mlin
