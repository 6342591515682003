#pragma once

// Shared accumulation of space-time integrals against test functions. Integrands are
// evaluated pointwise on the 3/2 grid; time uses the trapezoid rule over movie frames.

#include <cmath>
#include <memory>
#include <vector>

#include "disslab/duchon_robert.hpp"
#include "disslab/field.hpp"
#include "disslab/parallel.hpp"
#include "disslab/spectral.hpp"
#include "disslab/test_function.hpp"

namespace disslab::detail {

enum class Probe { value, rate, laplacian };

// Fine-grid value, gradient and Laplacian of every profile term, so that per-frame samples
// are linear combinations instead of fresh transforms. Left empty above the memory budget.
struct ProfileCache {
  std::vector<std::vector<TestFunction::Sample>> terms;  // [phi][term]; rate unused

  static ProfileCache build(const SpectralOps& ops, const std::vector<TestFunction>& phis) {
    constexpr double kBudgetBytes = 512.0 * 1024 * 1024;
    const int d = ops.grid().d;
    double count = 0.0;
    for (const auto& p : phis) count += static_cast<double>(p.terms().size());
    ProfileCache cache;
    if (count * (2 + d) * static_cast<double>(ops.fine_points()) * sizeof(double) > kBudgetBytes) return cache;
    for (const auto& p : phis) {
      std::vector<TestFunction::Sample> row;
      for (const auto& term : p.terms()) {
        const Coeffs c = ops.fft(term.profile);
        TestFunction::Sample s;
        s.value = ops.fine_from_coeffs(c);
        s.laplacian = ops.fine_from_coeffs(ops.laplacian(c));
        for (int a = 0; a < d; ++a) s.gradient.push_back(ops.fine_from_coeffs(ops.derivative(c, a)));
        row.push_back(std::move(s));
      }
      cache.terms.push_back(std::move(row));
    }
    return cache;
  }
  bool empty() const { return terms.empty(); }

  TestFunction::Sample sample(std::size_t i, const TestFunction& phi, double t) const {
    const auto& row = terms[i];
    const Eigen::Index n = row.front().value.size();
    TestFunction::Sample s;
    s.value = s.rate = s.laplacian = Eigen::ArrayXd::Zero(n);
    s.gradient.assign(row.front().gradient.size(), Eigen::ArrayXd::Zero(n));
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto& bump = phi.terms()[j].bump;
      const double e = bump.value(t), de = bump.rate(t);
      if (de != 0.0) s.rate += de * row[j].value;
      if (e == 0.0) continue;
      s.value += e * row[j].value;
      s.laplacian += e * row[j].laplacian;
      for (std::size_t a = 0; a < s.gradient.size(); ++a) s.gradient[a] += e * row[j].gradient[a];
    }
    return s;
  }
};

class WeakAccumulator {
 public:
  WeakAccumulator(const SpectralOps& ops, const std::vector<TestFunction>& phis, int slots,
                  const ProfileCache* cache = nullptr)
      : ops_(ops), phis_(phis), slots_(slots), cache_(cache) {
    const std::size_t n = phis.size();
    totals_.assign(n, std::vector<double>(slots, 0.0));
    magnitude_.assign(n, std::vector<double>(slots, 0.0));
    samples_.resize(n);
    active_.assign(n, false);
    sup_.assign(n, 0.0);
  }

  // Frames where some test function is nonzero.
  static std::vector<int> active_frames(const PeriodicGrid& g, const std::vector<TestFunction>& phis) {
    std::vector<int> out;
    for (int t = 0; t < g.nt; ++t)
      for (const auto& p : phis)
        if (p.active(g.time(t))) {
          out.push_back(t);
          break;
        }
    return out;
  }

  void begin_frame(const PeriodicGrid& g, int t) {
    weight_ = g.dt * ops_.fine_cell_volume();
    if (g.nt == 1) weight_ = ops_.fine_cell_volume();
    else if (t == 0 || t == g.nt - 1) weight_ *= 0.5;
    for (std::size_t i = 0; i < phis_.size(); ++i) {
      active_[i] = phis_[i].active(g.time(t));
      if (!active_[i]) continue;
      samples_[i] = cache_ && !cache_->empty() ? cache_->sample(i, phis_[i], g.time(t))
                                               : phis_[i].sample(ops_, g.time(t), true);
      sup_[i] = std::max(sup_[i], samples_[i].value.abs().maxCoeff());
    }
  }

  // slot += coef * int s * probe(phi)
  void scalar(int slot, double coef, const Eigen::ArrayXd& s, Probe probe) {
    for (std::size_t i = 0; i < phis_.size(); ++i) {
      if (!active_[i]) continue;
      const auto& sm = samples_[i];
      const Eigen::ArrayXd& p = probe == Probe::value ? sm.value
                                : probe == Probe::rate ? sm.rate
                                                       : sm.laplacian;
      add(i, slot, coef, s * p);
    }
  }

  // slot += coef * int v . grad phi
  void flux(int slot, double coef, const std::vector<Eigen::ArrayXd>& v) {
    for (std::size_t i = 0; i < phis_.size(); ++i) {
      if (!active_[i]) continue;
      buffer_ = v[0] * samples_[i].gradient[0];
      for (std::size_t a = 1; a < v.size(); ++a) buffer_ += v[a] * samples_[i].gradient[a];
      add(i, slot, coef, buffer_);
    }
  }

  // slot += int |f| over the support of each test function (no phi weight).
  void norm1(int slot, const Eigen::ArrayXd& f) {
    const double v = f.abs().sum() * weight_;
    for (std::size_t i = 0; i < phis_.size(); ++i)
      if (active_[i]) {
        totals_[i][slot] += v;
        magnitude_[i][slot] += v;
      }
  }

  // Drop the per-frame samples once the frame is done.
  void release() {
    for (auto& s : samples_) s = TestFunction::Sample{};
  }

  double total(std::size_t phi, int slot) const { return totals_[phi][slot]; }
  double magnitude(std::size_t phi, int slot) const { return magnitude_[phi][slot]; }
  double sup(std::size_t phi) const { return sup_[phi]; }
  std::size_t size() const { return phis_.size(); }

  // Merge another accumulator over a disjoint frame set (same test functions and slots).
  void merge(const WeakAccumulator& o) {
    for (std::size_t i = 0; i < phis_.size(); ++i) {
      for (int s = 0; s < slots_; ++s) {
        totals_[i][s] += o.totals_[i][s];
        magnitude_[i][s] += o.magnitude_[i][s];
      }
      sup_[i] = std::max(sup_[i], o.sup_[i]);
    }
  }

 private:
  template <class Expr>
  void add(std::size_t i, int slot, double coef, const Eigen::ArrayBase<Expr>& integrand) {
    totals_[i][slot] += coef * integrand.sum() * weight_;
    magnitude_[i][slot] += std::abs(coef) * integrand.abs().sum() * weight_;
  }

  const SpectralOps& ops_;
  const std::vector<TestFunction>& phis_;
  int slots_;
  const ProfileCache* cache_ = nullptr;
  double weight_ = 0.0;
  std::vector<std::vector<double>> totals_, magnitude_;
  std::vector<TestFunction::Sample> samples_;
  Eigen::ArrayXd buffer_;
  std::vector<bool> active_;
  std::vector<double> sup_;
};

// Test functions must vanish outside the sampled time range.
inline void check_support(const PeriodicGrid& g, const std::vector<TestFunction>& phis) {
  const double tol = 1e-9 * std::max(g.duration(), 1.0);
  for (const auto& p : phis) {
    if (!p.grid().same_space(g)) throw Error("test function grid does not match the movie");
    if (g.nt > 1 && (p.support_lo() < -tol || p.support_hi() > g.duration() + tol))
      throw Error("test function " + p.id() + " is not supported inside the movie");
  }
}

// Runs body(frame, accumulator) on every frame where a test function is active and merges
// the per-frame results in frame order, so the totals do not depend on the thread count.
template <class Body>
WeakAccumulator accumulate_frames(const SpectralOps& ops, const PeriodicGrid& g,
                                  const std::vector<TestFunction>& phis, int slots, Body body) {
  const std::vector<int> frames = WeakAccumulator::active_frames(g, phis);
  const ProfileCache cache = ProfileCache::build(ops, phis);
  std::vector<std::unique_ptr<WeakAccumulator>> parts(frames.size());
  parallel_for(static_cast<int>(frames.size()), [&](int i) {
    auto acc = std::make_unique<WeakAccumulator>(ops, phis, slots, &cache);
    acc->begin_frame(g, frames[i]);
    body(frames[i], *acc);
    acc->release();
    parts[i] = std::move(acc);
  });
  WeakAccumulator total(ops, phis, slots);
  for (const auto& p : parts) total.merge(*p);
  return total;
}

// Slot layout of identity tables: lhs and loss, then one block per scale.
constexpr int kLhs = 0;
constexpr int kLoss = 1;
enum ScaleSlot { kRhs, kFlux, kCoarseLoss, kNormQ, kNormC, kScaleSlots };
inline int scale_slot(int ell_index, ScaleSlot s) { return 2 + kScaleSlots * ell_index + s; }
inline int identity_slots(std::size_t ells) { return 2 + kScaleSlots * static_cast<int>(ells); }

inline std::vector<PairingRow> identity_rows(const WeakAccumulator& acc,
                                             const std::vector<TestFunction>& phis,
                                             const std::vector<double>& ells) {
  std::vector<PairingRow> rows;
  for (std::size_t i = 0; i < phis.size(); ++i)
    for (std::size_t k = 0; k < ells.size(); ++k) {
      const int e = static_cast<int>(k);
      PairingRow r;
      r.phi_id = phis[i].id();
      r.ell = ells[k];
      r.lhs = acc.total(i, kLhs);
      r.rhs = acc.total(i, scale_slot(e, kRhs));
      r.flux = acc.total(i, scale_slot(e, kFlux));
      r.loss = acc.total(i, kLoss);
      r.coarse_loss = acc.total(i, scale_slot(e, kCoarseLoss));
      r.total = -r.lhs + r.loss;
      const double norm_guard = std::max(acc.total(i, scale_slot(e, kNormQ)),
                                         acc.total(i, scale_slot(e, kNormC))) * acc.sup(i);
      const double terms = acc.magnitude(i, kLhs) + acc.magnitude(i, scale_slot(e, kRhs));
      r.guard = std::max(norm_guard, terms);
      const double den = std::abs(r.lhs) + std::abs(r.rhs) + r.guard;
      r.residual = den > 0.0 ? std::abs(r.lhs - r.rhs) / den : 0.0;
      rows.push_back(r);
    }
  return rows;
}

}  // namespace disslab::detail
