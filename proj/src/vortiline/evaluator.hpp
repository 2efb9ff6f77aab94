#pragma once
#include <vector>

#include "vortiline/spectral_ops.hpp"

namespace vortiline {

enum class EvalMethod { Auto, Spectral, Tricubic };

// Evaluates a set of scalar fields sharing one grid at arbitrary (periodic)
// points.  All fields are evaluated together so phase tables / stencils are
// shared.  Auto picks direct spectral summation when every axis has
// n <= 128, 4-point Lagrange tri-cubic interpolation otherwise.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const Grid& g, EvalMethod m = EvalMethod::Auto);

  int add(const ScalarField& f);
  int add(const SpectralScalar& s);
  int add_vector(const VectorField& u);  // returns index of first component
  void finalize();

  int count() const { return nf_; }
  EvalMethod method() const { return chosen_; }
  const Grid& grid() const { return g_; }

  // out must hold count() doubles
  void eval(const std::array<double, 3>& x, double* out) const;

 private:
  Grid g_;
  EvalMethod chosen_;
  int nf_ = 0;
  bool finalized_ = false;
  // staging (cleared by finalize)
  std::vector<std::vector<std::complex<double>>> stage_spec_;
  std::vector<std::vector<double>> stage_phys_;
  // interleaved storage: entry index*nf_ + field
  std::vector<std::complex<double>> spec_;
  std::vector<double> phys_;

  void eval_spectral(const std::array<double, 3>& x, double* out) const;
  void eval_tricubic(const std::array<double, 3>& x, double* out) const;
};

struct PeakResult {
  std::array<double, 3> x{0, 0, 0};
  double value = 0.0;
};

// Max over the grid of the pointwise norm of the component list, refined by
// nested sub-grid patch searches around the grid argmax.
PeakResult refined_max_norm(const Grid& g, const std::vector<const std::vector<double>*>& comps,
                            EvalMethod m = EvalMethod::Auto);

// Spectral zero-pad resampling onto a finer grid (factor per active axis).
ScalarField upsample(const ScalarField& f, int factor);
// Spectral truncation onto a coarser grid.
ScalarField restrict_modes(const ScalarField& f, const Grid& coarse);

}  // namespace vortiline
