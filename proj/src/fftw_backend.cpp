#include "hologen/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <tuple>

namespace hologen {
namespace {

int requested_threads() {
    const char* env = std::getenv("HOLOGEN_THREADS");
    if (!env || !*env) return 1;
    long n = std::strtol(env, nullptr, 10);
    if (n < 1) return 1;
    if (n > 64) return 64;
    return static_cast<int>(n);
}

// The FFTW planner is global state shared by every backend instance, so all
// planning (and thread-count selection, which is planner state) happens under
// one lock.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool& threads_initialized() {
    static bool flag = false;
    return flag;
}

// Traits mapping the scalar type onto the fftw/fftwf API.
template <typename T>
struct FftwApi;

template <>
struct FftwApi<double> {
    using plan = fftw_plan;
    using cplx = fftw_complex;
    static plan make(int ny, int nx, cplx* in, cplx* out, int sign) {
        return fftw_plan_dft_2d(ny, nx, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    static void execute(plan p, cplx* in, cplx* out) { fftw_execute_dft(p, in, out); }
    static void destroy(plan p) { fftw_destroy_plan(p); }
#ifdef HOLOGEN_FFTW_THREADS
    static void init_threads() { fftw_init_threads(); }
    static void plan_threads(int n) { fftw_plan_with_nthreads(n); }
#else
    static void init_threads() {}
    static void plan_threads(int) {}
#endif
};

template <>
struct FftwApi<float> {
    using plan = fftwf_plan;
    using cplx = fftwf_complex;
    static plan make(int ny, int nx, cplx* in, cplx* out, int sign) {
        return fftwf_plan_dft_2d(ny, nx, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    static void execute(plan p, cplx* in, cplx* out) { fftwf_execute_dft(p, in, out); }
    static void destroy(plan p) { fftwf_destroy_plan(p); }
#ifdef HOLOGEN_FFTW_THREADS
    static void init_threads() { fftwf_init_threads(); }
    static void plan_threads(int n) { fftwf_plan_with_nthreads(n); }
#else
    static void init_threads() {}
    static void plan_threads(int) {}
#endif
};

template <typename T>
class FftwBackend : public FftBackend<T> {
    using Api = FftwApi<T>;
    using Plan = typename Api::plan;
    using Cplx = typename Api::cplx;

public:
    explicit FftwBackend(int threads) : threads_(threads < 1 ? 1 : threads) {
        if (threads_ > 1) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            if (!threads_initialized()) {
                Api::init_threads();
                threads_initialized() = true;
            }
        }
    }

    ~FftwBackend() override {
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (auto& [key, p] : plans_) Api::destroy(p);
    }

    const char* name() const override { return "fftw"; }

    void forward(int nx, int ny, const std::complex<T>* in, std::complex<T>* out) override {
        run(nx, ny, in, out, FFTW_FORWARD);
    }

    void inverse(int nx, int ny, const std::complex<T>* in, std::complex<T>* out) override {
        run(nx, ny, in, out, FFTW_BACKWARD);
    }

    void warm(int nx, int ny) override {
        get_plan(nx, ny, FFTW_FORWARD, false);
        get_plan(nx, ny, FFTW_BACKWARD, false);
    }

private:
    void run(int nx, int ny, const std::complex<T>* in, std::complex<T>* out, int sign) {
        // New-array execution must match the plan's in-place-ness, so plans
        // are keyed on it. FFTW_UNALIGNED makes arbitrary buffers valid.
        Plan p = get_plan(nx, ny, sign, in == out);
        // FFTW computes an unnormalized sum; both directions are scaled here
        // to make the transform unitary.
        Api::execute(p, reinterpret_cast<Cplx*>(const_cast<std::complex<T>*>(in)),
                     reinterpret_cast<Cplx*>(out));
        T norm = static_cast<T>(1.0 / std::sqrt(static_cast<double>(nx) * ny));
        size_t n = static_cast<size_t>(nx) * ny;
        for (size_t i = 0; i < n; ++i) out[i] *= norm;
    }

    Plan get_plan(int nx, int ny, int sign, bool in_place) {
        std::lock_guard<std::mutex> cache_lock(cache_mutex_);
        auto key = std::make_tuple(nx, ny, sign, in_place);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Planning with FFTW_ESTIMATE does not touch the arrays, but passing
        // real scratch buffers keeps the call well-defined.
        std::vector<std::complex<T>> a(static_cast<size_t>(nx) * ny);
        std::vector<std::complex<T>> b(in_place ? 0 : a.size());
        Cplx* pa = reinterpret_cast<Cplx*>(a.data());
        Cplx* pb = in_place ? pa : reinterpret_cast<Cplx*>(b.data());
        Plan p;
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            if (threads_initialized()) Api::plan_threads(threads_);
            p = Api::make(ny, nx, pa, pb, sign);
        }
        if (!p) throw std::runtime_error("fftw planning failed");
        plans_.emplace(key, p);
        return p;
    }

    int threads_;
    std::mutex cache_mutex_;
    std::map<std::tuple<int, int, int, bool>, Plan> plans_;
};

} // namespace

template <typename T>
FftBackend<T>& default_fft_backend() {
    static FftwBackend<T> backend(requested_threads());
    return backend;
}

template FftBackend<float>& default_fft_backend<float>();
template FftBackend<double>& default_fft_backend<double>();

template <typename T>
std::unique_ptr<FftBackend<T>> make_fft_backend(int threads) {
    return std::make_unique<FftwBackend<T>>(threads);
}

template std::unique_ptr<FftBackend<float>> make_fft_backend<float>(int);
template std::unique_ptr<FftBackend<double>> make_fft_backend<double>(int);

} // namespace hologen
