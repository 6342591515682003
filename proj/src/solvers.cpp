#include "disslab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "disslab/spectral.hpp"
#include "disslab/synth.hpp"

namespace disslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// A semi-linear problem c_t = -decay * c + nonlinear(c, t) in spectral space.
struct Problem {
  const SpectralOps* ops = nullptr;
  Eigen::ArrayXd decay;
  std::function<Coeffs(const Coeffs&, double)> nonlinear;
  std::function<double(const Coeffs&, double)> max_speed;
  // Returns {energy, loss rate, injection rate}.
  std::function<Eigen::Array3d(const Coeffs&)> budget;
  std::function<Eigen::ArrayXXd(const Coeffs&)> frame;
  int components = 1;
  std::string name;
};

// Spectral sum over the full (Hermitian) spectrum of weight * |c|^2, times the box volume.
double spectral_quadratic(const SpectralOps& ops, const Coeffs& c, const Eigen::ArrayXd& weight) {
  return ops.grid().volume() * (ops.box().multiplicity() * weight * c.abs2()).sum();
}

double spectral_inner(const SpectralOps& ops, const Coeffs& a, const Coeffs& b) {
  return ops.grid().volume() * (ops.box().multiplicity() * (a * b.conjugate()).real()).sum();
}

Coeffs band_forcing(const SpectralOps& ops, const SolverConfig& cfg) {
  Coeffs f = Coeffs::Zero(ops.box().spectral_size());
  if (cfg.forcing_amplitude == 0.0 || cfg.forcing_kmax <= 0.0) return f;
  SynthParams p;
  p.sigma = -ops.grid().d / 2.0;  // flat amplitude in the shell
  p.kmin = cfg.forcing_kmin;
  p.kmax = cfg.forcing_kmax;
  p.seed = cfg.seed ^ 0xf0ace5ULL;
  const SpaceTimeField g = synth_field(ops.grid().with_frames(1, 1.0), SynthKind::random_phase_besov, p);
  const Eigen::ArrayXd gv = g.component(0, 0);
  const double r = std::sqrt(gv.square().mean());
  return ops.fft(gv * (cfg.forcing_amplitude / r));
}

SolverRun integrate(const Problem& pb, Coeffs c, const SolverConfig& cfg) {
  if (!(cfg.T > 0.0)) throw Error("final time must be positive");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw Error("cfl must lie in (0, 1]");
  const SpectralOps& ops = *pb.ops;
  const PeriodicGrid& g = ops.grid();
  const double dx = g.dx();
  const Coeffs keep = cfg.dealias ? ops.truncate(Coeffs::Ones(c.size()), 2.0 / 3.0)
                                  : Coeffs::Ones(c.size());
  c *= keep;
  auto nonlinear = [&](const Coeffs& s, double t) { return Coeffs(pb.nonlinear(s, t) * keep); };
  auto cfl_step = [&](const Coeffs& s, double t) {
    const double speed = pb.max_speed(s, t);
    return cfg.cfl * dx / std::max(speed, 1.0);
  };

  const double dt0 = cfl_step(c, 0.0);
  const int intervals =
      cfg.frames > 0 ? cfg.frames
                     : std::max(1, static_cast<int>(std::lround(cfg.T / (std::max(cfg.stride, 1) * dt0))));
  const double dt_out = cfg.T / intervals;

  std::vector<Eigen::ArrayXXd> frames;
  frames.reserve(intervals + 1);
  frames.push_back(pb.frame(c));
  SolverDiagnostics diag;
  Eigen::Array3d b = pb.budget(c);
  const double e0 = b(0);
  diag.energy.push_back(b(0));
  diag.dissipated.push_back(0.0);
  diag.injected.push_back(0.0);
  double lost = 0.0, gained = 0.0;

  for (int k = 0; k < intervals; ++k) {
    const double t_start = k * dt_out;
    double done = 0.0;
    int taken = 0;
    int m = static_cast<int>(std::ceil(dt_out / cfl_step(c, t_start) - 1e-12));
    double h = dt_out / m;
    while (taken < m) {
      if (taken > 0 && taken % 10 == 0) {
        const double allowed = cfl_step(c, t_start + done);
        if (allowed < h * (1.0 - 1e-12)) {
          const double remaining = dt_out - done;
          const int more = static_cast<int>(std::ceil(remaining / allowed - 1e-12));
          m = taken + more;
          h = remaining / more;
        }
      }
      const double t = t_start + done;
      const Eigen::ArrayXd eh = (-pb.decay * (h / 2)).exp();
      const Eigen::ArrayXd ef = eh.square();
      const Coeffs k1 = nonlinear(c, t);
      const Coeffs k2 = nonlinear(eh * (c + (h / 2) * k1), t + h / 2);
      const Coeffs k3 = nonlinear(eh * c + (h / 2) * k2, t + h / 2);
      const Coeffs k4 = nonlinear(ef * c + h * eh * k3, t + h);
      c = ef * c + (h / 6) * (ef * k1 + 2.0 * eh * (k2 + k3) + k4);
      const Eigen::Array3d b1 = pb.budget(c);
      lost += h / 2 * (b(1) + b1(1));
      gained += h / 2 * (b(2) + b1(2));
      b = b1;
      done += h;
      ++taken;
      ++diag.steps;
    }
    if (!c.isFinite().all()) throw Error(pb.name + ": solution blew up (non-finite state)");
    frames.push_back(pb.frame(c));
    diag.energy.push_back(b(0));
    diag.dissipated.push_back(lost);
    diag.injected.push_back(gained);
    const double t = (k + 1) * dt_out;
    if (e0 > 0.0)
      diag.budget_residual = std::max(diag.budget_residual,
                                      std::abs(b(0) - e0 + lost - gained) / e0 / std::max(t, 1.0));
  }
  SolverRun run{stack_frames(g, dt_out, frames), diag};
  return run;
}

}  // namespace

SolverConfig parse_solver_config(const std::string& text) {
  SolverConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "nu") cfg.nu = std::stod(value);
      else if (key == "kappa") cfg.kappa = std::stod(value);
      else if (key == "T") cfg.T = std::stod(value);
      else if (key == "cfl") cfg.cfl = std::stod(value);
      else if (key == "dealias") cfg.dealias = value == "true" || value == "1" || value == "yes";
      else if (key == "stride") cfg.stride = std::stoi(value);
      else if (key == "frames") cfg.frames = std::stoi(value);
      else if (key == "forcing_shell") {
        const auto comma = value.find(',');
        if (comma == std::string::npos) throw Error("forcing_shell expects kmin,kmax");
        cfg.forcing_kmin = std::stod(value.substr(0, comma));
        cfg.forcing_kmax = std::stod(value.substr(comma + 1));
      } else if (key == "forcing_amplitude") cfg.forcing_amplitude = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw Error("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

SolverConfig read_solver_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_solver_config(ss.str());
}

SolverRun solve_burgers(const SpaceTimeField& u0, const SolverConfig& cfg) {
  const PeriodicGrid& g = u0.grid();
  if (g.d != 1 || u0.components() != 1) throw Error("Burgers needs a scalar 1D field");
  if (!(cfg.nu > 0.0)) throw Error("Burgers needs nu > 0");
  const SpectralOps ops(g.with_frames(1, 1.0));
  const Coeffs force = band_forcing(ops, cfg);
  const Eigen::ArrayXd& k = ops.k(0);

  Problem pb;
  pb.ops = &ops;
  pb.name = "burgers";
  pb.decay = cfg.nu * ops.k_squared();
  pb.nonlinear = [&](const Coeffs& c, double) {
    const Eigen::ArrayXd u = ops.ifft(c);
    const Eigen::ArrayXd flux = 0.5 * u.square();
    return Coeffs(-ops.derivative(ops.fft(flux), 0) + force);
  };
  pb.max_speed = [&](const Coeffs& c, double) { return ops.ifft(c).abs().maxCoeff(); };
  pb.budget = [&](const Coeffs& c) {
    Eigen::Array3d b;
    b(0) = 0.5 * spectral_quadratic(ops, c, Eigen::ArrayXd::Ones(c.size()));
    b(1) = cfg.nu * spectral_quadratic(ops, c, k.square());
    b(2) = spectral_inner(ops, force, c);
    return b;
  };
  pb.frame = [&](const Coeffs& c) {
    Eigen::ArrayXXd f(ops.points(), 1);
    f.col(0) = ops.ifft(c);
    return f;
  };
  SolverRun run = integrate(pb, ops.fft(u0.component(0, 0)), cfg);
  run.movie.info() = FieldInfo{"burgers_u", cfg.nu, "solve_burgers;seed=" + std::to_string(cfg.seed)};
  return run;
}

SolverRun solve_ns2d(const SpaceTimeField& omega0, const SolverConfig& cfg) {
  const PeriodicGrid& g = omega0.grid();
  if (g.d != 2 || omega0.components() != 1) throw Error("Navier-Stokes needs a scalar 2D vorticity");
  if (!(cfg.nu > 0.0)) throw Error("Navier-Stokes needs nu > 0");
  const auto w0 = omega0.component(0, 0);
  if (std::abs(w0.mean()) > 1e-12 * std::max(1.0, w0.abs().maxCoeff()))
    throw Error("initial vorticity must have zero mean");
  const SpectralOps ops(g.with_frames(1, 1.0));
  const Coeffs force = band_forcing(ops, cfg);
  const Eigen::ArrayXd& k2 = ops.k_squared();
  const Eigen::ArrayXd inv_k2 = (k2 > 0.0).select(k2.inverse(), 0.0);

  auto velocity = [&](const Coeffs& w) {
    const Coeffs psi = w * inv_k2;
    Eigen::ArrayXXd u(ops.points(), 2);
    u.col(0) = ops.ifft(ops.derivative(psi, 1));
    u.col(1) = -ops.ifft(ops.derivative(psi, 0));
    return u;
  };

  Problem pb;
  pb.ops = &ops;
  pb.name = "ns2d";
  pb.decay = cfg.nu * k2;
  pb.nonlinear = [&](const Coeffs& c, double) {
    const Eigen::ArrayXXd u = velocity(c);
    const Eigen::ArrayXd w = ops.ifft(c);
    const Coeffs fx = ops.fft(u.col(0) * w);
    const Coeffs fy = ops.fft(u.col(1) * w);
    return Coeffs(-(ops.derivative(fx, 0) + ops.derivative(fy, 1)) + force);
  };
  pb.max_speed = [&](const Coeffs& c, double) { return velocity(c).abs().maxCoeff(); };
  pb.budget = [&](const Coeffs& c) {
    Eigen::Array3d b;
    b(0) = 0.5 * spectral_quadratic(ops, c, inv_k2);
    b(1) = cfg.nu * spectral_quadratic(ops, c, Eigen::ArrayXd::Ones(c.size()));
    b(2) = spectral_inner(ops, force * inv_k2, c);
    return b;
  };
  pb.frame = velocity;
  pb.components = 2;
  SolverRun run = integrate(pb, ops.fft(w0), cfg);
  run.movie.info() = FieldInfo{"ns2d_velocity", cfg.nu, "solve_ns2d;seed=" + std::to_string(cfg.seed)};
  return run;
}

SolverRun solve_advection(const SpaceTimeField& theta0, const SpaceTimeField& velocity,
                          const SolverConfig& cfg) {
  const PeriodicGrid& g = theta0.grid();
  if (theta0.components() != 1) throw Error("advected scalar must have one component");
  if (!g.same_space(velocity.grid()) || velocity.components() != g.d)
    throw Error("velocity grid does not match the scalar grid");
  if (!(cfg.kappa > 0.0)) throw Error("advection needs kappa > 0");
  const bool steady = velocity.frames() == 1;
  if (!steady && velocity.grid().duration() < cfg.T * (1.0 - 1e-12))
    throw Error("velocity movie does not cover the integration window");
  const SpectralOps ops(g.with_frames(1, 1.0));

  // velocity frames are truncated exactly like the scalar so products stay alias-free
  const Coeffs keep = cfg.dealias ? ops.truncate(Coeffs::Ones(ops.box().spectral_size()), 2.0 / 3.0)
                                  : Coeffs::Ones(ops.box().spectral_size());
  std::vector<Eigen::ArrayXXd> vframes;
  for (int t = 0; t < velocity.frames(); ++t) {
    Eigen::ArrayXXd v(ops.points(), g.d);
    for (int a = 0; a < g.d; ++a) v.col(a) = ops.ifft(ops.fft(velocity.component(t, a)) * keep);
    const Eigen::ArrayXd div = ops.divergence(v);
    if (div.abs().maxCoeff() > 1e-8 * std::max(1.0, v.abs().maxCoeff()))
      throw Error("advecting velocity is not divergence-free");
    vframes.push_back(std::move(v));
  }
  auto v_at = [&](double t) -> Eigen::ArrayXXd {
    if (steady) return vframes[0];
    const double s = t / velocity.grid().dt;
    const int i = std::clamp(static_cast<int>(std::floor(s)), 0, velocity.frames() - 2);
    const double a = std::clamp(s - i, 0.0, 1.0);
    return (1.0 - a) * vframes[i] + a * vframes[i + 1];
  };
  double speed_max = 0.0;
  for (const auto& v : vframes) speed_max = std::max(speed_max, v.abs().maxCoeff());

  Problem pb;
  pb.ops = &ops;
  pb.name = "advection";
  pb.decay = cfg.kappa * ops.k_squared();
  pb.nonlinear = [&](const Coeffs& c, double t) {
    const Eigen::ArrayXXd v = v_at(t);
    const Eigen::ArrayXd th = ops.ifft(c);
    Coeffs acc = Coeffs::Zero(c.size());
    for (int a = 0; a < g.d; ++a) acc += ops.derivative(ops.fft(v.col(a) * th), a);
    return Coeffs(-acc);
  };
  pb.max_speed = [&](const Coeffs&, double) { return speed_max; };
  pb.budget = [&](const Coeffs& c) {
    Eigen::Array3d b;
    b(0) = 0.5 * spectral_quadratic(ops, c, Eigen::ArrayXd::Ones(c.size()));
    b(1) = cfg.kappa * spectral_quadratic(ops, c, ops.k_squared());
    b(2) = 0.0;
    return b;
  };
  pb.frame = [&](const Coeffs& c) {
    Eigen::ArrayXXd f(ops.points(), 1);
    f.col(0) = ops.ifft(c);
    return f;
  };
  SolverRun run = integrate(pb, ops.fft(theta0.component(0, 0)), cfg);
  run.movie.info() = FieldInfo{"advected_scalar", cfg.kappa, "solve_advection"};
  return run;
}

SpaceTimeField vorticity(const SpaceTimeField& velocity) {
  const PeriodicGrid& g = velocity.grid();
  if (g.d != 2 || velocity.components() != 2) throw Error("vorticity needs a 2D velocity");
  const SpectralOps ops(g);
  SpaceTimeField out(g, 1, FieldInfo{"vorticity", velocity.info().viscosity, ""});
  for (int t = 0; t < g.nt; ++t)
    out.component(t, 0) = ops.spatial_derivative(velocity.component(t, 1), 0) -
                          ops.spatial_derivative(velocity.component(t, 0), 1);
  return out;
}

}  // namespace disslab
