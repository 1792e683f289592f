#include "kpist/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace kpist {

namespace {

std::mutex g_planner_mutex;

struct PlanKey {
    int Nx, Ny, kind, sign;
    bool operator<(const PlanKey& o) const {
        return std::tie(Nx, Ny, kind, sign) < std::tie(o.Nx, o.Ny, o.kind, o.sign);
    }
};

// Plans are created once per (size, direction) with FFTW_ESTIMATE|FFTW_UNALIGNED
// so they can be executed on any caller buffer via the new-array interface.
fftw_plan get_plan(const PlanKey& key) {
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> a(static_cast<std::size_t>(key.Nx) * key.Ny);
    std::vector<std::complex<double>> b(a.size());
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    if (key.kind == 0) {
        p = fftw_plan_dft_2d(key.Ny, key.Nx, in, out, key.sign, flags);
    } else if (key.kind == 1) { // along x: Ny transforms of length Nx, contiguous rows
        int n = key.Nx;
        p = fftw_plan_many_dft(1, &n, key.Ny, in, nullptr, 1, key.Nx, out, nullptr, 1, key.Nx, key.sign, flags);
    } else { // along y: Nx transforms of length Ny, stride Nx
        int n = key.Ny;
        p = fftw_plan_many_dft(1, &n, key.Nx, in, nullptr, key.Nx, 1, out, nullptr, key.Nx, 1, key.sign, flags);
    }
    cache.emplace(key, p);
    return p;
}

void run(const PlanKey& key, const Complex* in, Complex* out) {
    fftw_plan p = get_plan(key);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

namespace fft {

void dft2d(int Nx, int Ny, const Complex* in, Complex* out, bool inverse) {
    run({Nx, Ny, 0, inverse ? FFTW_BACKWARD : FFTW_FORWARD}, in, out);
}

void dft_x(int Nx, int Ny, const Complex* in, Complex* out, bool inverse) {
    run({Nx, Ny, 1, inverse ? FFTW_BACKWARD : FFTW_FORWARD}, in, out);
}

void dft_y(int Nx, int Ny, const Complex* in, Complex* out, bool inverse) {
    run({Nx, Ny, 2, inverse ? FFTW_BACKWARD : FFTW_FORWARD}, in, out);
}

} // namespace fft

} // namespace kpist
