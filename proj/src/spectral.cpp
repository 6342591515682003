#include "disslab/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace disslab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

FourierBox::FourierBox(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw Error("empty transform shape");
  const int rank = static_cast<int>(shape_.size());
  real_size_ = 1;
  for (int s : shape_) {
    if (s < 2) throw Error("transform axis too short");
    real_size_ *= s;
  }
  const int last_half = shape_.back() / 2 + 1;
  spectral_size_ = real_size_ / shape_.back() * last_half;

  wavenumbers_.assign(rank, Eigen::ArrayXi(spectral_size_));
  multiplicity_.resize(spectral_size_);
  nyquist_.resize(spectral_size_);
  for (Eigen::Index k = 0; k < spectral_size_; ++k) {
    Eigen::Index rest = k;
    bool nyq = false;
    for (int a = rank - 1; a >= 0; --a) {
      const int len = a == rank - 1 ? last_half : shape_[a];
      const int i = static_cast<int>(rest % len);
      rest /= len;
      const int m = a == rank - 1 ? i : signed_wavenumber(i, shape_[a]);
      wavenumbers_[a](k) = m;
      if (shape_[a] % 2 == 0 && std::abs(m) == shape_[a] / 2) nyq = true;
    }
    const int m_last = wavenumbers_[rank - 1](k);
    const bool self_conjugate =
        m_last == 0 || (shape_.back() % 2 == 0 && m_last == shape_.back() / 2);
    multiplicity_(k) = self_conjugate ? 1.0 : 2.0;
    nyquist_(k) = nyq;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  Eigen::ArrayXd in(real_size_);
  Eigen::ArrayXcd out(spectral_size_);
  auto* cin = reinterpret_cast<fftw_complex*>(out.data());
  real_alignment_ = fftw_alignment_of(in.data());
  complex_alignment_ = fftw_alignment_of(reinterpret_cast<double*>(out.data()));
  forward_plan_ = fftw_plan_dft_r2c(rank, shape_.data(), in.data(), cin, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r(rank, shape_.data(), cin, in.data(), FFTW_ESTIMATE);
  forward_unaligned_ = fftw_plan_dft_r2c(rank, shape_.data(), in.data(), cin, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_unaligned_ = fftw_plan_dft_c2r(rank, shape_.data(), cin, in.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!forward_plan_ || !inverse_plan_ || !forward_unaligned_ || !inverse_unaligned_)
    throw Error("FFTW planning failed");
}

FourierBox::~FourierBox() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  for (void* p : {forward_plan_, inverse_plan_, forward_unaligned_, inverse_unaligned_})
    if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

Coeffs FourierBox::forward(const Eigen::Ref<const Eigen::ArrayXd>& f) const {
  if (f.size() != real_size_) throw Error("transform input has wrong size");
  Eigen::ArrayXd in = f;
  Coeffs out(spectral_size_);
  const bool aligned = fftw_alignment_of(in.data()) == real_alignment_ &&
                       fftw_alignment_of(reinterpret_cast<double*>(out.data())) == complex_alignment_;
  fftw_execute_dft_r2c(static_cast<fftw_plan>(aligned ? forward_plan_ : forward_unaligned_), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  out /= static_cast<double>(real_size_);
  return out;
}

Eigen::ArrayXd FourierBox::inverse(const Coeffs& c) const {
  if (c.size() != spectral_size_) throw Error("inverse transform input has wrong size");
  Coeffs in = c;
  Eigen::ArrayXd out(real_size_);
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(in.data())) == complex_alignment_ &&
                       fftw_alignment_of(out.data()) == real_alignment_;
  fftw_execute_dft_c2r(static_cast<fftw_plan>(aligned ? inverse_plan_ : inverse_unaligned_),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

std::shared_ptr<const FourierBox> fourier_box(const std::vector<int>& shape) {
  static std::mutex m;
  static std::map<std::vector<int>, std::shared_ptr<const FourierBox>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(shape);
  if (it != cache.end()) return it->second;
  auto box = std::make_shared<const FourierBox>(shape);
  cache.emplace(shape, box);
  return box;
}

SpectralOps::SpectralOps(const PeriodicGrid& grid)
    : grid_(grid),
      box_(fourier_box(grid.shape())),
      fine_(fourier_box(std::vector<int>(grid.d, 3 * grid.n / 2))) {
  const Eigen::Index ns = box_->spectral_size();
  const double k0 = grid.wavenumber_unit();
  k_.resize(grid.d);
  k2_ = Eigen::ArrayXd::Zero(ns);
  Eigen::ArrayXd m2 = Eigen::ArrayXd::Zero(ns);
  for (int a = 0; a < grid.d; ++a) {
    Eigen::ArrayXd m = box_->wavenumbers(a).cast<double>();
    k_[a] = k0 * m;
    // derivatives never touch the unpaired Nyquist mode
    for (Eigen::Index i = 0; i < ns; ++i)
      if (std::abs(box_->wavenumbers(a)(i)) == grid.n / 2) k_[a](i) = 0.0;
    k2_ += (k0 * m).square();
    m2 += m.square();
  }
  lattice_norm_ = m2.sqrt();

  const int nf = 3 * grid.n / 2;
  fine_index_.resize(ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    if (box_->nyquist()(i)) {
      fine_index_(i) = -1;
      continue;
    }
    Eigen::Index idx = 0;
    for (int a = 0; a < grid.d; ++a) {
      const int m = box_->wavenumbers(a)(i);
      const int len = a == grid.d - 1 ? nf / 2 + 1 : nf;
      const int j = m >= 0 ? m : m + nf;
      idx = idx * len + j;
    }
    fine_index_(i) = idx;
  }
}

Coeffs SpectralOps::derivative(const Coeffs& c, int axis) const {
  return c * (std::complex<double>(0.0, 1.0) * k_[axis]);
}

Coeffs SpectralOps::laplacian(const Coeffs& c) const { return c * (-k2_); }

Coeffs SpectralOps::inverse_laplacian(const Coeffs& c) const {
  Coeffs out = c;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = k2_(i) > 0.0 ? -c(i) / k2_(i) : std::complex<double>(0.0, 0.0);
  return out;
}

Eigen::ArrayXd SpectralOps::spatial_derivative(const Eigen::Ref<const Eigen::ArrayXd>& f, int axis) const {
  return ifft(derivative(fft(f), axis));
}

Eigen::ArrayXXd SpectralOps::gradient(const Eigen::Ref<const Eigen::ArrayXd>& f) const {
  const Coeffs c = fft(f);
  Eigen::ArrayXXd g(points(), grid_.d);
  for (int a = 0; a < grid_.d; ++a) g.col(a) = ifft(derivative(c, a));
  return g;
}

Eigen::ArrayXd SpectralOps::divergence(const Eigen::Ref<const Eigen::ArrayXXd>& v) const {
  Coeffs acc = Coeffs::Zero(box_->spectral_size());
  for (int a = 0; a < grid_.d; ++a) acc += derivative(fft(v.col(a)), a);
  return ifft(acc);
}

Eigen::ArrayXd SpectralOps::spatial_laplacian(const Eigen::Ref<const Eigen::ArrayXd>& f) const {
  return ifft(laplacian(fft(f)));
}

Eigen::ArrayXd SpectralOps::apply(const Eigen::Ref<const Eigen::ArrayXd>& f,
                                  const Eigen::ArrayXd& multiplier) const {
  return ifft(fft(f) * multiplier);
}

Coeffs SpectralOps::truncate(const Coeffs& c, double fraction) const {
  Coeffs out = c;
  const double cut = fraction * grid_.n / 2.0;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    for (int a = 0; a < grid_.d; ++a)
      if (std::abs(box_->wavenumbers(a)(i)) > cut) {
        out(i) = 0.0;
        break;
      }
  return out;
}

Eigen::ArrayXd SpectralOps::to_fine(const Eigen::Ref<const Eigen::ArrayXd>& f) const {
  return fine_from_coeffs(fft(f));
}

Eigen::ArrayXd SpectralOps::fine_from_coeffs(const Coeffs& c) const {
  Coeffs g = Coeffs::Zero(fine_->spectral_size());
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (fine_index_(i) >= 0) g(fine_index_(i)) = c(i);
  return fine_->inverse(g);
}

Eigen::ArrayXXd SpectralOps::to_fine_columns(const Eigen::Ref<const Eigen::ArrayXXd>& v) const {
  Eigen::ArrayXXd out(fine_points(), v.cols());
  for (Eigen::Index a = 0; a < v.cols(); ++a) out.col(a) = to_fine(v.col(a));
  return out;
}

Coeffs SpectralOps::coeffs_from_fine(const Eigen::Ref<const Eigen::ArrayXd>& g) const {
  const Coeffs cf = fine_->forward(g);
  Coeffs c = Coeffs::Zero(box_->spectral_size());
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (fine_index_(i) >= 0) c(i) = cf(fine_index_(i));
  return c;
}

Eigen::ArrayXd SpectralOps::from_fine(const Eigen::Ref<const Eigen::ArrayXd>& g) const {
  return ifft(coeffs_from_fine(g));
}

double SpectralOps::fine_cell_volume() const {
  return std::pow(grid_.L / (3 * grid_.n / 2), grid_.d);
}

Eigen::ArrayXd SpectralOps::product(const Eigen::Ref<const Eigen::ArrayXd>& a,
                                    const Eigen::Ref<const Eigen::ArrayXd>& b) const {
  return from_fine(to_fine(a) * to_fine(b));
}

double SpectralOps::integral(const Eigen::Ref<const Eigen::ArrayXd>& f) const {
  return f.sum() * grid_.cell_volume();
}

}  // namespace disslab
