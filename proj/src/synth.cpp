#include "disslab/synth.hpp"

#include <cmath>
#include <sstream>

#include "disslab/spectral.hpp"

namespace disslab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double keyed_uniform(std::uint64_t seed, std::initializer_list<std::int64_t> counters) {
  std::uint64_t h = splitmix64(seed);
  for (std::int64_t c : counters) h = splitmix64(h ^ static_cast<std::uint64_t>(c + (1LL << 40)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

namespace {

struct Canonical {
  std::int64_t m[3] = {0, 0, 0};
  bool flipped = false;
};

// Representative of {m, -m}: first nonzero component positive.
Canonical canonical(const FourierBox& box, Eigen::Index i, int d) {
  Canonical c;
  for (int a = 0; a < d; ++a) c.m[a] = box.wavenumbers(a)(i);
  for (int a = 0; a < d; ++a) {
    if (c.m[a] == 0) continue;
    if (c.m[a] < 0) {
      c.flipped = true;
      for (int b = 0; b < d; ++b) c.m[b] = -c.m[b];
    }
    break;
  }
  return c;
}

// Random-phase spectrum |c_m| = |m|^-(decay) on the band, optionally drifting in time.
Coeffs random_spectrum(const SpectralOps& ops, double decay, const SynthParams& p, double t) {
  const FourierBox& box = ops.box();
  const int d = ops.grid().d;
  const double kmax = p.kmax > 0 ? p.kmax : ops.grid().n / 2 - 1;
  Coeffs c = Coeffs::Zero(box.spectral_size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double r = ops.lattice_norm()(i);
    if (box.nyquist()(i) || r < p.kmin || r > kmax || r == 0.0) continue;
    const Canonical cm = canonical(box, i, d);
    double phase = kTwoPi * keyed_uniform(p.seed, {cm.m[0], cm.m[1], cm.m[2]});
    phase += p.drift * std::pow(r, 1.0 - p.sigma) * t;
    if (cm.flipped) phase = -phase;
    c(i) = std::polar(std::pow(r, -decay), phase);
  }
  return c;
}

double rms(const Eigen::ArrayXXd& f) { return std::sqrt(f.square().sum() / f.rows()); }

}  // namespace

SpaceTimeField synth_field(const PeriodicGrid& grid, SynthKind kind, const SynthParams& p) {
  const int d = grid.d;
  const int n = grid.n;
  const double k0 = grid.wavenumber_unit();
  const Eigen::Index N = grid.points();
  if (p.axis < 0 || p.axis >= d) throw Error("synthetic field axis out of range");

  std::ostringstream prov;
  prov << "kind=" << to_string(kind) << ";generator=splitmix64;seed=" << p.seed;
  int components = 1;
  if (kind == SynthKind::taylor_green || kind == SynthKind::solenoidal_besov) {
    if (d != 2) throw Error("vector synthetic kinds need d = 2");
    components = 2;
  }
  SpaceTimeField out(grid, components, FieldInfo{to_string(kind), 0.0, prov.str()});

  auto coordinate = [&](Eigen::Index i, int axis) {
    return unravel(i, d, n)[axis] * grid.dx();
  };

  std::unique_ptr<SpectralOps> ops;
  if (kind == SynthKind::random_phase_besov || kind == SynthKind::solenoidal_besov)
    ops = std::make_unique<SpectralOps>(grid);

  double scale = 1.0;
  for (int t = 0; t < grid.nt; ++t) {
    auto f = out.frame(t);
    switch (kind) {
      case SynthKind::constant:
        f.setConstant(p.value);
        break;
      case SynthKind::fourier_mode:
        for (Eigen::Index i = 0; i < N; ++i)
          f(i, 0) = p.amplitude * std::cos(p.mode * k0 * coordinate(i, p.axis));
        break;
      case SynthKind::taylor_green:
        for (Eigen::Index i = 0; i < N; ++i) {
          const double x = k0 * coordinate(i, 0), y = k0 * coordinate(i, 1);
          f(i, 0) = p.amplitude * std::sin(x) * std::cos(y);
          f(i, 1) = -p.amplitude * std::cos(x) * std::sin(y);
        }
        break;
      case SynthKind::sawtooth: {
        if (p.shocks < 1 || n % p.shocks != 0 || n / p.shocks < 2)
          throw Error("sawtooth shock count must divide the grid size");
        const int period = n / p.shocks;
        for (Eigen::Index i = 0; i < N; ++i) {
          const int j = unravel(i, d, n)[p.axis] % period;
          f(i, 0) = p.jump * (static_cast<double>(j) / (period - 1) - 0.5);
        }
        break;
      }
      case SynthKind::weierstrass: {
        int top = 0;
        while ((1 << (top + 1)) < n / 2) ++top;
        for (Eigen::Index i = 0; i < N; ++i) f(i, 0) = 0.0;
        for (int j = 0; j <= top; ++j) {
          const double phase = kTwoPi * keyed_uniform(p.seed, {j});
          const double a = p.amplitude * std::pow(2.0, -p.sigma * j);
          const double w = (1 << j) * k0;
          for (Eigen::Index i = 0; i < N; ++i)
            f(i, 0) += a * std::cos(w * coordinate(i, p.axis) + phase);
        }
        break;
      }
      case SynthKind::random_phase_besov: {
        const Coeffs c = random_spectrum(*ops, p.sigma + d / 2.0, p, grid.time(t));
        f.col(0) = p.amplitude * ops->ifft(c);
        break;
      }
      case SynthKind::solenoidal_besov: {
        const Coeffs psi = random_spectrum(*ops, p.sigma + 1.0 + d / 2.0, p, grid.time(t));
        f.col(0) = p.amplitude * ops->ifft(ops->derivative(psi, 1));
        f.col(1) = -p.amplitude * ops->ifft(ops->derivative(psi, 0));
        break;
      }
    }
    if (p.rms > 0.0) {
      if (t == 0) {
        const double r = rms(f);
        if (r == 0.0) throw Error("cannot normalize a zero field");
        scale = p.rms / r;
      }
      f *= scale;
    }
  }
  return out;
}

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "constant") return SynthKind::constant;
  if (name == "fourier_mode") return SynthKind::fourier_mode;
  if (name == "taylor_green") return SynthKind::taylor_green;
  if (name == "sawtooth") return SynthKind::sawtooth;
  if (name == "random_phase_besov") return SynthKind::random_phase_besov;
  if (name == "weierstrass") return SynthKind::weierstrass;
  if (name == "solenoidal_besov") return SynthKind::solenoidal_besov;
  throw Error("unknown synthetic field kind: " + name);
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::constant: return "constant";
    case SynthKind::fourier_mode: return "fourier_mode";
    case SynthKind::taylor_green: return "taylor_green";
    case SynthKind::sawtooth: return "sawtooth";
    case SynthKind::random_phase_besov: return "random_phase_besov";
    case SynthKind::weierstrass: return "weierstrass";
    case SynthKind::solenoidal_besov: return "solenoidal_besov";
  }
  return "unknown";
}

}  // namespace disslab
