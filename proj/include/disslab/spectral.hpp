#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "disslab/field.hpp"

namespace disslab {

using Coeffs = Eigen::ArrayXcd;

// Real-to-complex transforms on a periodic box of any shape (row-major, last axis fastest).
// Coefficients are normalized: f(x) = sum_m c_m exp(i m.x) with integer m. The last axis
// stores only m >= 0. Instances are immutable and safe to share between threads.
class FourierBox {
 public:
  explicit FourierBox(std::vector<int> shape);
  ~FourierBox();
  FourierBox(const FourierBox&) = delete;
  FourierBox& operator=(const FourierBox&) = delete;

  const std::vector<int>& shape() const { return shape_; }
  Eigen::Index real_size() const { return real_size_; }
  Eigen::Index spectral_size() const { return spectral_size_; }

  Coeffs forward(const Eigen::Ref<const Eigen::ArrayXd>& f) const;
  Eigen::ArrayXd inverse(const Coeffs& c) const;

  // Integer wavenumber along an axis for every spectral index.
  const Eigen::ArrayXi& wavenumbers(int axis) const { return wavenumbers_[axis]; }
  // Multiplicity of each stored coefficient in the full spectrum (1 or 2).
  const Eigen::ArrayXd& multiplicity() const { return multiplicity_; }
  // True where some axis sits on its Nyquist wavenumber.
  const Eigen::Array<bool, Eigen::Dynamic, 1>& nyquist() const { return nyquist_; }

 private:
  std::vector<int> shape_;
  Eigen::Index real_size_ = 0;
  Eigen::Index spectral_size_ = 0;
  std::vector<Eigen::ArrayXi> wavenumbers_;
  Eigen::ArrayXd multiplicity_;
  Eigen::Array<bool, Eigen::Dynamic, 1> nyquist_;
  // SIMD plans need the planning alignment; the unaligned pair covers everything else.
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  void* forward_unaligned_ = nullptr;
  void* inverse_unaligned_ = nullptr;
  int real_alignment_ = 0;
  int complex_alignment_ = 0;
};

// Shared, process-wide cache of boxes keyed by shape.
std::shared_ptr<const FourierBox> fourier_box(const std::vector<int>& shape);

// Spectral calculus on the spatial box of a PeriodicGrid. Products are dealiased by
// zero-padding to a 3/2 grid and projecting back, with Nyquist modes dropped.
class SpectralOps {
 public:
  explicit SpectralOps(const PeriodicGrid& grid);

  const PeriodicGrid& grid() const { return grid_; }
  const FourierBox& box() const { return *box_; }
  Eigen::Index points() const { return box_->real_size(); }

  Coeffs fft(const Eigen::Ref<const Eigen::ArrayXd>& f) const { return box_->forward(f); }
  Eigen::ArrayXd ifft(const Coeffs& c) const { return box_->inverse(c); }

  // Physical wavenumber along an axis, and |k|^2.
  const Eigen::ArrayXd& k(int axis) const { return k_[axis]; }
  const Eigen::ArrayXd& k_squared() const { return k2_; }
  // Integer lattice magnitude |m|.
  const Eigen::ArrayXd& lattice_norm() const { return lattice_norm_; }

  Coeffs derivative(const Coeffs& c, int axis) const;
  Coeffs laplacian(const Coeffs& c) const;
  // Zero-mean solution of Delta g = c.
  Coeffs inverse_laplacian(const Coeffs& c) const;

  Eigen::ArrayXd spatial_derivative(const Eigen::Ref<const Eigen::ArrayXd>& f, int axis) const;
  Eigen::ArrayXXd gradient(const Eigen::Ref<const Eigen::ArrayXd>& f) const;
  Eigen::ArrayXd divergence(const Eigen::Ref<const Eigen::ArrayXXd>& v) const;
  Eigen::ArrayXd spatial_laplacian(const Eigen::Ref<const Eigen::ArrayXd>& f) const;
  Eigen::ArrayXd apply(const Eigen::Ref<const Eigen::ArrayXd>& f,
                       const Eigen::ArrayXd& multiplier) const;

  // Zero every mode with some |m_axis| > fraction * n / 2 (2/3 rule with fraction = 2/3).
  Coeffs truncate(const Coeffs& c, double fraction) const;

  // Band-limited interpolation onto the 3/2 grid, and projection back.
  Eigen::ArrayXd to_fine(const Eigen::Ref<const Eigen::ArrayXd>& f) const;
  Eigen::ArrayXd from_fine(const Eigen::Ref<const Eigen::ArrayXd>& g) const;
  Eigen::ArrayXXd to_fine_columns(const Eigen::Ref<const Eigen::ArrayXXd>& v) const;
  Eigen::ArrayXd fine_from_coeffs(const Coeffs& c) const;
  Coeffs coeffs_from_fine(const Eigen::Ref<const Eigen::ArrayXd>& g) const;
  double fine_cell_volume() const;
  Eigen::Index fine_points() const { return fine_->real_size(); }
  Eigen::ArrayXd product(const Eigen::Ref<const Eigen::ArrayXd>& a,
                         const Eigen::Ref<const Eigen::ArrayXd>& b) const;

  // Integral over the box (exact for trigonometric polynomials resolved by the grid).
  double integral(const Eigen::Ref<const Eigen::ArrayXd>& f) const;
  double mean(const Eigen::Ref<const Eigen::ArrayXd>& f) const { return f.mean(); }

 private:
  PeriodicGrid grid_;
  std::shared_ptr<const FourierBox> box_;
  std::shared_ptr<const FourierBox> fine_;
  std::vector<Eigen::ArrayXd> k_;
  Eigen::ArrayXd k2_;
  Eigen::ArrayXd lattice_norm_;
  // Spectral index on the fine grid of each coarse coefficient, -1 for dropped modes.
  Eigen::Array<Eigen::Index, Eigen::Dynamic, 1> fine_index_;
};

}  // namespace disslab
