#include <cuda_runtime.h>

__global__ void fft_kernel(float2* data, int n, int step) {
    int tid = blockIdx.x * blockDim.x + threadIdx.x;
    int pair = tid ^ step;
    if (pair > tid && pair < n) {
        float2 a = data[tid];
        float2 b = data[pair];
        data[tid] = make_float2(a.x + b.x, a.y + b.y);
        data[pair] = make_float2(a.x - b.x, a.y - b.y);
    }
}
