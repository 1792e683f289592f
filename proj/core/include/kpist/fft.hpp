#ifndef KPIST_FFT_HPP
#define KPIST_FFT_HPP

#include "kpist/common.hpp"

namespace kpist::fft {

// Unnormalized complex DFTs backed by FFTW (plans cached per size, creation
// serialized; execution is thread safe on caller-owned buffers).
//
// dft2d:  out[kb*Nx + jb] = sum_{j,k} in[k*Nx + j] e^{-+ 2 pi i (j jb/Nx + k kb/Ny)}
// dft_x:  rows of length Nx transformed along j for every k (batch Ny)
// dft_y:  columns transformed along k for every j (batch Nx)
void dft2d(int Nx, int Ny, const Complex* in, Complex* out, bool inverse);
void dft_x(int Nx, int Ny, const Complex* in, Complex* out, bool inverse);
void dft_y(int Nx, int Ny, const Complex* in, Complex* out, bool inverse);

} // namespace kpist::fft

#endif
