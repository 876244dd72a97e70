#include "fnlslab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace fnls {
namespace {

// fftw plan creation is not thread safe; execution of a private plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class PlanPair {
public:
    explicit PlanPair(int n) : size_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!buf_) throw std::bad_alloc();
        std::lock_guard<std::mutex> lock(planner_mutex());
        // FFTW_ESTIMATE keeps plan selection independent of runtime measurement.
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    }

    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;

    ~PlanPair() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    void run(std::vector<std::complex<double>>& data, bool forward) {
        // std::complex<double> is layout-compatible with fftw_complex.
        std::memcpy(static_cast<void*>(buf_), data.data(), sizeof(fftw_complex) * size_);
        fftw_execute(forward ? fwd_ : bwd_);
        std::memcpy(static_cast<void*>(data.data()), buf_, sizeof(fftw_complex) * size_);
    }

private:
    int size_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

PlanPair& plan_for(int n) {
    thread_local std::map<int, std::unique_ptr<PlanPair>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<PlanPair>(n);
    return *slot;
}

} // namespace

void fft_forward(std::vector<std::complex<double>>& data) {
    if (data.empty()) throw std::invalid_argument("fft: empty buffer");
    plan_for(static_cast<int>(data.size())).run(data, true);
}

void fft_backward(std::vector<std::complex<double>>& data) {
    if (data.empty()) throw std::invalid_argument("fft: empty buffer");
    plan_for(static_cast<int>(data.size())).run(data, false);
}

} // namespace fnls
