#pragma once
#include "vortiline/field.hpp"

namespace vortiline::fft {

// Coefficient convention: forward() returns c_k = (1/N) sum_x f(x) e^{-ik.x},
// so f(x) = sum_k c_k e^{ik.x} with the r2c half-spectrum storing k_last >= 0.
// Plans are FFTW_ESTIMATE (deterministic across runs) and cached per shape.
SpectralScalar forward(const ScalarField& f);
ScalarField inverse(const SpectralScalar& s);

}  // namespace vortiline::fft
