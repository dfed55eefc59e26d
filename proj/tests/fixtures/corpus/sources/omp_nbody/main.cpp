#include <cmath>
#include <omp.h>

void nbody_kernel(const float* px, const float* py, float* ax, float* ay, int n) {
#pragma omp target teams distribute parallel for
    for (int i = 0; i < n; ++i) {
        float fx = 0.0f, fy = 0.0f;
        for (int j = 0; j < n; ++j) {
            float dx = px[j] - px[i];
            float dy = py[j] - py[i];
            float inv = 1.0f / sqrtf(dx * dx + dy * dy + 1e-6f);
            float inv3 = inv * inv * inv;
            fx += dx * inv3;
            fy += dy * inv3;
        }
        ax[i] = fx;
        ay[i] = fy;
    }
}
