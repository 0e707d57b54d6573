#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "hsvm/kernels.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using hsvm::kernels::Vec;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

}  // namespace

int main() {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    // sparse matrix-vector product
    {
        const int m = 200000, n = 50000, nnz_per_row = 12;
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < nnz_per_row; ++k) {
                trips.emplace_back(i, static_cast<int>(rng() % n), unif(rng));
            }
        }
        hsvm::kernels::SparseRM A(m, n);
        A.setFromTriplets(trips.begin(), trips.end());
        Vec x(n), y1(m), y2(m);
        for (int j = 0; j < n; ++j) x[j] = unif(rng);

        const double ts = time_best_of(5, [&] { hsvm::kernels::spmv_serial(A, x, y1); });
        const double tp = time_best_of(5, [&] { hsvm::kernels::spmv(A, x, y2); });
        const bool same = (y1 - y2).cwiseAbs().maxCoeff() == 0.0;
        std::printf("spmv            %8.2f ms serial  %8.2f ms parallel  x%.2f  bit-equal=%s\n",
                    ts * 1e3, tp * 1e3, ts / tp, same ? "yes" : "NO");
    }

    // block PSD projection (the dominant cost of the conic solver iteration)
    {
        const int blocks = 64, order = 40;
        const int len = order * (order + 1) / 2;
        std::vector<int> offsets(blocks), orders(blocks, order);
        for (int i = 0; i < blocks; ++i) offsets[i] = i * len;
        Vec v(blocks * len);
        for (int i = 0; i < v.size(); ++i) v[i] = unif(rng);
        Vec a = v, b = v;

        const double ts = time_best_of(5, [&] {
            a = v;
            hsvm::kernels::project_psd_blocks_serial(a.data(), offsets, orders);
        });
        const double tp = time_best_of(5, [&] {
            b = v;
            hsvm::kernels::project_psd_blocks(b.data(), offsets, orders);
        });
        const bool same = (a - b).cwiseAbs().maxCoeff() == 0.0;
        std::printf("psd projection  %8.2f ms serial  %8.2f ms parallel  x%.2f  bit-equal=%s\n",
                    ts * 1e3, tp * 1e3, ts / tp, same ? "yes" : "NO");
    }

    // nonnegative clamp
    {
        const int n = 5000000;
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = unif(rng);
        Vec a = v, b = v;
        const double ts = time_best_of(5, [&] {
            a = v;
            hsvm::kernels::clamp_nonneg_serial(a.data(), n);
        });
        const double tp = time_best_of(5, [&] {
            b = v;
            hsvm::kernels::clamp_nonneg(b.data(), n);
        });
        const bool same = (a - b).cwiseAbs().maxCoeff() == 0.0;
        std::printf("nonneg clamp    %8.2f ms serial  %8.2f ms parallel  x%.2f  bit-equal=%s\n",
                    ts * 1e3, tp * 1e3, ts / tp, same ? "yes" : "NO");
    }
    return 0;
}
