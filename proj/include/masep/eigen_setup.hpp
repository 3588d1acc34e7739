#pragma once

// LAPACKE's default complex type drags in <complex.h> and its I macro;
// route it through std::complex instead (the layout-compatible setup
// documented by Eigen).
#ifdef EIGEN_USE_LAPACKE
#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif

#include <Eigen/Dense>

#ifdef I
#undef I
#endif
