#include "disslab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "disslab/artifacts.hpp"
#include "disslab/bounds.hpp"
#include "disslab/dlf_io.hpp"
#include "disslab/duchon_robert.hpp"
#include "disslab/fractal.hpp"
#include "disslab/inviscid_limits.hpp"
#include "disslab/lp_besov.hpp"
#include "disslab/parallel.hpp"
#include "disslab/solvers.hpp"
#include "disslab/structure_fn.hpp"
#include "disslab/synth.hpp"
#include "disslab/transport.hpp"

namespace disslab::cli {

namespace fs = std::filesystem;

namespace {

// Bad flags, bad config or missing inputs: exit 1 before any artifact is written.
struct UsageError : Error {
  using Error::Error;
};

enum class Law { incompressible, burgers, transport };

Law parse_law(const std::string& s) {
  if (s == "incompressible") return Law::incompressible;
  if (s == "burgers") return Law::burgers;
  if (s == "transport") return Law::transport;
  throw UsageError("unknown law '" + s + "' (incompressible, burgers, transport)");
}

BalanceLaw balance_law(Law law) {
  if (law == Law::transport) throw UsageError("this command does not support the transport law");
  return law == Law::burgers ? BalanceLaw::burgers : BalanceLaw::incompressible;
}

class Context {
 public:
  Context(std::string command, Json cfg, fs::path cfg_dir, std::string out_dir,
          std::optional<std::uint64_t> seed, bool strict, std::ostream& log)
      : manifest(command), command_(std::move(command)), cfg_(std::move(cfg)),
        cfg_dir_(std::move(cfg_dir)), out_dir_(std::move(out_dir)), seed_(seed), strict_(strict),
        log_(log) {
    manifest.inputs()["config"] = cfg_;
  }

  Manifest manifest;

  const Json& cfg() const { return cfg_; }
  bool strict() const { return strict_; }
  std::ostream& log() { return log_; }

  bool has(const std::string& key) const { return cfg_.contains(key) && !cfg_[key].is_null(); }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return cfg_[key].get<T>();
    } catch (const std::exception&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T require(const std::string& key) const {
    if (!has(key)) throw UsageError("config key '" + key + "' is required for " + command_);
    return get<T>(key, T{});
  }

  // Paths in the config are relative to the config file; they must exist now.
  std::string input(const std::string& key) const { return resolve(require<std::string>(key)); }
  std::string resolve(const std::string& path) const {
    fs::path p(path);
    if (p.is_relative()) p = cfg_dir_ / p;
    if (!fs::exists(p)) throw UsageError("input not found: " + p.string());
    return p.string();
  }

  std::uint64_t seed() {
    std::optional<std::uint64_t> s = seed_;
    if (!s && has("seed")) s = get<std::uint64_t>("seed", 0);
    if (!s) throw UsageError(command_ + " draws random test functions or fields; a seed is required");
    manifest.set_seed(*s);
    return *s;
  }
  std::optional<std::uint64_t> seed_override() const { return seed_; }

  std::string artifact(const std::string& name) {
    manifest.add_artifact(name);
    return (fs::path(out_dir_) / name).string();
  }
  const std::string& out_dir() const { return out_dir_; }

  void check(const std::string& name, bool passed, const std::string& detail = "") {
    manifest.add_check(name, passed, detail);
    log_ << (passed ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) log_ << "  " << detail;
    log_ << '\n';
  }

  int finish() {
    manifest.write(out_dir_);
    return manifest.checks_passed() ? kOk : kCheckFailed;
  }

 private:
  std::string command_;
  Json cfg_;
  fs::path cfg_dir_;
  std::string out_dir_;
  std::optional<std::uint64_t> seed_;
  bool strict_ = false;
  std::ostream& log_;
};

std::string fmt(double v) { return format_number(v); }

SpaceTimeField load(const Context& ctx, const std::string& key) { return read_dlf(ctx.input(key)); }

std::vector<int> dyadic_steps(int lo, int hi) {
  std::vector<int> s;
  for (int k = lo; k <= hi; k *= 2) s.push_back(k);
  return s;
}

std::vector<double> physical(const PeriodicGrid& g, const std::vector<int>& steps) {
  std::vector<double> out;
  for (int s : steps) out.push_back(s * g.dx());
  return out;
}

// Random test functions with bumps inside a fraction window of the movie's time span.
std::vector<TestFunction> test_functions(Context& ctx, const PeriodicGrid& g, int fallback_count) {
  const int count = ctx.get<int>("test_functions", fallback_count);
  if (count < 1) throw UsageError("test_functions must be positive");
  const auto window = ctx.get<std::vector<double>>("t_window", {0.2, 0.8});
  if (window.size() != 2 || !(window[0] >= 0.0 && window[0] < window[1] && window[1] <= 1.0))
    throw UsageError("t_window must be two fractions 0 <= lo < hi <= 1");
  if (g.nt < 2) throw UsageError("test functions need a movie with at least 2 frames");
  const std::uint64_t seed = ctx.seed();
  const double kmax = ctx.get<double>("phi_kmax", 4.0);
  PeriodicGrid space = g.with_frames(1, g.dt);
  std::vector<TestFunction> phis;
  for (int i = 0; i < count; ++i)
    phis.push_back(random_test_function(space, window[0] * g.duration(), window[1] * g.duration(),
                                        seed + static_cast<std::uint64_t>(i), kmax));
  return phis;
}

std::vector<PairingRow> pairing_table(Context& ctx, Law law, const SpaceTimeField& f,
                                      const std::vector<double>& ells,
                                      const std::vector<TestFunction>& phis, double nu, int power) {
  if (law == Law::transport) {
    const SpaceTimeField v = load(ctx, "velocity");
    return transport_identity_table(f, v, nu, ells, phis, power);
  }
  if (law == Law::burgers) return burgers_identity_table(f, nu, ells, phis, power);
  std::optional<SpaceTimeField> q;
  if (ctx.has("pressure")) q = load(ctx, "pressure");
  return identity_table(f, q ? &*q : nullptr, nu, ells, phis, power);
}

double viscosity(const Context& ctx, const SpaceTimeField& f, Law law) {
  const std::string key = law == Law::transport ? "kappa" : "nu";
  if (ctx.has(key)) return ctx.get<double>(key, 0.0);
  if (f.info().viscosity > 0.0) return f.info().viscosity;
  throw UsageError("config key '" + key + "' is required (the movie carries no viscosity)");
}

// ---------------------------------------------------------------- generate

SynthParams synth_params(const Json& j) {
  SynthParams p;
  auto set = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
  };
  set("value", p.value);
  set("mode", p.mode);
  set("axis", p.axis);
  set("amplitude", p.amplitude);
  set("shocks", p.shocks);
  set("jump", p.jump);
  set("sigma", p.sigma);
  set("seed", p.seed);
  set("kmin", p.kmin);
  set("kmax", p.kmax);
  set("rms", p.rms);
  set("drift", p.drift);
  return p;
}

bool random_kind(SynthKind k) {
  return k == SynthKind::random_phase_besov || k == SynthKind::weierstrass ||
         k == SynthKind::solenoidal_besov;
}

PeriodicGrid grid_from(const Json& j) {
  return make_grid(j.value("d", 1), j.value("n", 64), j.value("L", kTwoPi), j.value("nt", 1),
                   j.value("dt", 1.0));
}

SpaceTimeField synth_from(Context& ctx, const Json& spec, const PeriodicGrid& g, Json& record) {
  if (!spec.contains("kind")) throw UsageError("field spec needs a 'kind'");
  const SynthKind kind = parse_synth_kind(spec["kind"].get<std::string>());
  SynthParams p = synth_params(spec);
  if (random_kind(kind)) {
    if (ctx.seed_override()) p.seed = *ctx.seed_override();
    else if (!spec.contains("seed")) p.seed = ctx.seed();
  }
  record = spec;
  record["seed"] = p.seed;
  return synth_field(g, kind, p);
}

SolverConfig solver_config(const Context& ctx, const Json& s) {
  if (s.contains("file")) return read_solver_config(ctx.resolve(s["file"].get<std::string>()));
  std::ostringstream text;
  if (s.contains("settings")) {
    for (const auto& [key, value] : s["settings"].items()) {
      text << key << " = ";
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) text << (i ? "," : "") << value[i].dump();
      } else if (value.is_string()) {
        text << value.get<std::string>();
      } else {
        text << value.dump();
      }
      text << '\n';
    }
  }
  return parse_solver_config(text.str());
}

int cmd_generate(Context& ctx) {
  const PeriodicGrid g = grid_from(ctx.require<Json>("grid"));
  Json field_record;
  SpaceTimeField f = synth_from(ctx, ctx.require<Json>("field"), g, field_record);
  ctx.manifest.inputs()["field"] = field_record;
  const std::string output = ctx.get<std::string>("output", "field.dlf");

  if (ctx.has("solver")) {
    const Json s = ctx.cfg()["solver"];
    const std::string type = s.value("type", "");
    SolverConfig sc = solver_config(ctx, s);
    if (sc.forcing_amplitude > 0.0) sc.seed = ctx.seed_override() ? *ctx.seed_override() : ctx.seed();
    SolverRun run;
    if (type == "burgers") {
      run = solve_burgers(f, sc);
    } else if (type == "ns2d") {
      run = solve_ns2d(f.components() == 1 ? f : vorticity(f), sc);
    } else if (type == "advection") {
      SpaceTimeField v;
      if (s.contains("velocity_input")) {
        v = read_dlf(ctx.resolve(s["velocity_input"].get<std::string>()));
      } else if (s.contains("velocity")) {
        Json vrec;
        v = synth_from(ctx, s["velocity"], g.with_frames(1, g.dt), vrec);
        ctx.manifest.inputs()["velocity"] = vrec;
      } else {
        throw UsageError("advection needs 'velocity' or 'velocity_input'");
      }
      run = solve_advection(f, v, sc);
    } else {
      throw UsageError("unknown solver type '" + type + "' (burgers, ns2d, advection)");
    }
    ctx.manifest.inputs()["solver_settings"] = Json{
        {"nu", sc.nu},         {"kappa", sc.kappa},   {"T", sc.T},
        {"cfl", sc.cfl},       {"dealias", sc.dealias}, {"stride", sc.stride},
        {"frames", sc.frames}, {"forcing_shell", {sc.forcing_kmin, sc.forcing_kmax}},
        {"forcing_amplitude", sc.forcing_amplitude}, {"seed", sc.seed}};
    const SolverDiagnostics& dg = run.diagnostics;
    CsvTable t{{"frame", "time", "energy", "dissipated", "injected"}, {}};
    for (std::size_t k = 0; k < dg.energy.size(); ++k)
      t.add(k, run.movie.time(static_cast<int>(k)), dg.energy[k], dg.dissipated[k], dg.injected[k]);
    write_csv(ctx.artifact("energy.csv"), t);
    ctx.manifest.add_value("budget_residual", dg.budget_residual);
    ctx.manifest.add_value("steps", static_cast<double>(dg.steps));
    ctx.manifest.add_value("frames", run.movie.frames());
    ctx.check("energy_budget", dg.budget_residual < ctx.get<double>("budget_tolerance", 1e-6),
              "residual " + fmt(dg.budget_residual));
    f = std::move(run.movie);
  }
  if (!f.all_finite()) throw Error("generated field is not finite");
  write_dlf_atomic(ctx.artifact(output), f);
  ctx.log() << "wrote " << output << " (" << f.frames() << " frames, " << f.components()
            << " components)\n";
  return ctx.finish();
}

// ---------------------------------------------------------------- besov

int cmd_besov(Context& ctx) {
  const SpaceTimeField f = load(ctx, "input");
  const double p = ctx.get<double>("p", 2.0);
  const auto window = ctx.get<std::vector<int>>("window", {2, 0});
  if (window.size() != 2) throw UsageError("window must be [k_lo, k_hi]");
  const std::string mode_name = ctx.get<std::string>("mode", "per_slice");
  if (mode_name != "per_slice" && mode_name != "space_time")
    throw UsageError("mode must be per_slice or space_time");
  const BesovMode mode = mode_name == "per_slice" ? BesovMode::per_slice : BesovMode::space_time;
  const bool space_time_family = ctx.get<std::string>("family", "space") == "space_time";
  const DyadicFamily family =
      space_time_family ? build_space_time_family(f.grid()) : build_dyadic_family(f.grid());
  const BesovFit fit = fit_besov_exponent(f, p, family, {window[0], window[1]}, mode);

  CsvTable t{{"band", "norm"}, {}};
  for (std::size_t k = 0; k < fit.band_norms.size(); ++k) t.add(k + 1, fit.band_norms[k]);
  write_csv(ctx.artifact("besov.csv"), t);
  ctx.manifest.add_fit("besov", fit.fit);
  ctx.manifest.add_value("sigma", fit.fit.exponent);
  ctx.manifest.add_value("saturated", fit.saturated ? 1.0 : 0.0);
  ctx.log() << "sigma " << fmt(fit.fit.exponent) << " r2 " << fmt(fit.fit.r2)
            << (fit.saturated ? " (saturated)" : "") << '\n';
  if (ctx.has("expected_sigma")) {
    const double want = ctx.get<double>("expected_sigma", 0.0);
    const double tol = ctx.get<double>("tolerance", 0.05);
    ctx.check("besov_exponent", std::abs(fit.fit.exponent - want) <= tol,
              "fitted " + fmt(fit.fit.exponent) + " expected " + fmt(want));
  }
  return ctx.finish();
}

// ---------------------------------------------------------------- decompose

double abs_mean(const SpaceTimeField& f) { return f.samples().abs().mean(); }

int cmd_decompose(Context& ctx) {
  const SpaceTimeField f = load(ctx, "input");
  const Law law = parse_law(ctx.get<std::string>("law", "incompressible"));
  const double nu = law == Law::transport ? 0.0 : viscosity(ctx, f, law);
  const int power = ctx.get<int>("power", 4);
  const auto steps = ctx.get<std::vector<int>>("ell_steps", dyadic_steps(4, f.grid().n / 4));
  const bool write_fields = ctx.get<bool>("write_fields", false);
  std::optional<SpaceTimeField> q, v;
  if (law == Law::incompressible && ctx.has("pressure")) q = load(ctx, "pressure");
  if (law == Law::transport) v = load(ctx, "velocity");

  CsvTable t{{"ell", "E_mean", "Q_abs_mean", "R_abs_mean", "C_mean", "C_abs_mean"}, {}};
  for (int s : steps) {
    const double ell = s * f.grid().dx();
    SpaceTimeField E, Q, R, C;
    if (law == Law::incompressible) {
      auto d = decomposition_terms(f, q ? &*q : nullptr, ell, nu, power);
      E = std::move(d.E), Q = std::move(d.Q), R = std::move(d.R), C = std::move(d.C);
    } else if (law == Law::burgers) {
      auto d = burgers_terms(f, ell, power);
      E = std::move(d.E), Q = std::move(d.Q), R = std::move(d.R), C = std::move(d.C);
    } else {
      auto d = transport_terms(f, *v, ell, power);
      E = std::move(d.E), Q = std::move(d.Q), R = std::move(d.R), C = std::move(d.C);
    }
    t.add(ell, E.samples().mean(), abs_mean(Q), abs_mean(R), C.samples().mean(), abs_mean(C));
    if (write_fields) {
      write_dlf_atomic(ctx.artifact("E_ell" + std::to_string(s) + ".dlf"), E);
      write_dlf_atomic(ctx.artifact("C_ell" + std::to_string(s) + ".dlf"), C);
    }
  }
  write_csv(ctx.artifact("decompose.csv"), t);
  ctx.log() << "decomposed at " << steps.size() << " scales\n";
  return ctx.finish();
}

// ---------------------------------------------------------------- verify-identity

void write_pairings(Context& ctx, const std::string& name, const std::vector<PairingRow>& rows) {
  CsvTable t{{"phi_id", "delta", "ell", "lhs", "rhs", "residual"}, {}};
  for (const auto& r : rows) t.add(r.phi_id, r.delta, r.ell, r.lhs, r.rhs, r.residual);
  write_csv(ctx.artifact(name), t);
}

int cmd_verify_identity(Context& ctx) {
  const SpaceTimeField f = load(ctx, "input");
  const Law law = parse_law(ctx.get<std::string>("law", "incompressible"));
  const double nu = viscosity(ctx, f, law);
  const auto steps = ctx.get<std::vector<int>>("ell_steps", dyadic_steps(4, f.grid().n / 4));
  const auto phis = test_functions(ctx, f.grid(), 10);
  const double tol = ctx.get<double>("tolerance", 1e-4);
  const auto rows = pairing_table(ctx, law, f, physical(f.grid(), steps), phis, nu,
                                  ctx.get<int>("power", 4));
  write_pairings(ctx, "identity.csv", rows);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.residual);
  ctx.manifest.add_value("max_residual", worst);
  ctx.manifest.add_value("tolerance", tol);
  ctx.check("identity_residual", worst < tol, "max " + fmt(worst) + " tolerance " + fmt(tol));
  return ctx.finish();
}

// ---------------------------------------------------------------- rates

int cmd_rates(Context& ctx) {
  const SpaceTimeField f = load(ctx, "input");
  const Law law = parse_law(ctx.get<std::string>("law", "incompressible"));
  const BalanceLaw bl = balance_law(law);
  const double nu = ctx.has("nu") ? ctx.get<double>("nu", 0.0) : f.info().viscosity;
  std::optional<SpaceTimeField> q;
  if (ctx.has("pressure")) q = load(ctx, "pressure");
  const auto steps = ctx.get<std::vector<int>>("delta_steps", {2, 3, 4, 6, 8});
  double sigma = 0.0;
  if (ctx.has("sigma")) {
    sigma = ctx.get<double>("sigma", 0.0);
  } else {
    const DyadicFamily fam = build_dyadic_family(f.grid());
    const BesovFit bf = fit_besov_exponent(f, 3.0, fam, {fam.bands() - 1 >= 4 ? 2 : 1, 0},
                                           BesovMode::per_slice);
    sigma = std::min(bf.fit.exponent, 1.0);
    ctx.manifest.add_fit("besov_p3", bf.fit);
  }
  ctx.manifest.add_value("sigma", sigma);
  const auto phis = test_functions(ctx, f.grid(), 5);
  const std::string target = ctx.get<std::string>("target", "dissipation");
  if (target != "dissipation" && target != "total") throw UsageError("target must be dissipation or total");
  const auto r = dr_mollification_rates(
      f, q ? &*q : nullptr, nu, phis, physical(f.grid(), steps), sigma,
      ctx.get<double>("time_ratio", 1.0), ctx.get<int>("power", 4), bl,
      target == "total" ? PairingTarget::total : PairingTarget::dissipation);

  CsvTable t{{"phi_id", "delta", "difference", "mollified"}, {}};
  for (std::size_t i = 0; i < phis.size(); ++i) {
    for (std::size_t k = 0; k < r.deltas.size(); ++k)
      t.add(phis[i].id(), r.deltas[k], r.difference[i][k], r.mollified[i][k]);
    if (!r.trivial) {
      ctx.manifest.add_fit("difference_" + phis[i].id(), r.difference_fits[i]);
      ctx.manifest.add_fit("mollified_" + phis[i].id(), r.mollified_fits[i]);
    }
  }
  write_csv(ctx.artifact("rates.csv"), t);
  ctx.manifest.add_value("difference_exponent", r.difference_exponent);
  ctx.manifest.add_value("mollified_exponent", r.mollified_exponent);
  ctx.manifest.add_value("predicted_difference", r.predicted_difference);
  ctx.manifest.add_value("predicted_mollified", r.predicted_mollified);
  if (r.trivial) {
    ctx.log() << "pairings vanish; rates are trivially satisfied\n";
  } else {
    ctx.check("difference_rate", r.pass_difference,
              "exponent " + fmt(r.difference_exponent) + " predicted " + fmt(r.predicted_difference));
    ctx.check("mollified_rate", r.pass_mollified,
              "exponent " + fmt(r.mollified_exponent) + " predicted " + fmt(r.predicted_mollified));
  }
  return ctx.finish();
}

// ---------------------------------------------------------------- sf

int cmd_sf(Context& ctx) {
  const SpaceTimeField f = load(ctx, "input");
  const auto orders = ctx.get<std::vector<double>>("orders", {2.0, 3.0, 4.0, 6.0});
  const auto steps = ctx.get<std::vector<int>>("steps", dyadic_steps(1, f.grid().n / 4));
  const int directions = ctx.get<int>("directions", 16);
  const auto window = ctx.get<std::vector<double>>("window", {0.0, 0.0});
  if (window.size() != 2) throw UsageError("window must be [lo, hi] in physical units");
  std::vector<SFCurve> curves = absolute_sf(f, orders, steps, directions);
  if (ctx.get<bool>("longitudinal", false)) curves.push_back(longitudinal_sf(f, steps, directions));

  CsvTable t{{"kind", "p", "step", "ell", "value"}, {}};
  Json table = Json::array();
  for (const auto& c : curves) {
    const std::string kind = c.kind == SFKind::absolute ? "absolute" : "longitudinal";
    for (std::size_t k = 0; k < c.steps.size(); ++k) t.add(kind, c.p, c.steps[k], c.separations[k], c.values[k]);
    if (c.kind == SFKind::longitudinal) continue;
    const ZetaFit z = fit_zeta(c, {window[0], window[1]});
    ctx.manifest.add_fit("zeta_p" + fmt(c.p), z.fit);
    table.push_back(Json{{"p", c.p}, {"zeta", z.zeta}, {"sigma", z.sigma}, {"r2", z.fit.r2},
                         {"zeta_error", z.fit.stderr_exponent}});
    ctx.log() << "p " << fmt(c.p) << " zeta " << fmt(z.zeta) << '\n';
  }
  write_csv(ctx.artifact("sf.csv"), t);
  write_json(ctx.artifact("zeta.json"),
             Json{{"averaging", curves.empty() ? "" : curves.front().averaging},
                  {"directions", directions}, {"entries", table}});
  return ctx.finish();
}

// ---------------------------------------------------------------- dims

int cmd_dims(Context& ctx) {
  const SpaceTimeField f = load(ctx, "input");
  const std::string source = ctx.get<std::string>("source", "density");
  SpaceTimeField density;
  double delta = 0.0;
  if (source == "density") {
    density = f;
  } else if (source == "dissipation") {
    const Law law = parse_law(ctx.get<std::string>("law", "burgers"));
    const double nu = viscosity(ctx, f, law);
    std::optional<SpaceTimeField> q;
    if (ctx.has("pressure")) q = load(ctx, "pressure");
    delta = ctx.get<double>("delta_steps", 4.0) * f.grid().dx();
    const double delta_t = ctx.get<double>("time_steps", 2.0) * f.grid().dt;
    DissipationSample s = dissipation_sample(f, q ? &*q : nullptr, nu, delta, delta_t, balance_law(law),
                                             ctx.get<bool>("include_loss", false));
    ctx.manifest.add_value("first_frame", s.first_frame);
    density = std::move(s.field);
  } else {
    throw UsageError("source must be density or dissipation");
  }
  const int skip = ctx.get<int>("skip_frames", 0);
  if (skip < 0 || skip >= density.frames()) throw UsageError("skip_frames out of range");
  if (skip > 0) {
    PeriodicGrid g = density.grid().with_frames(density.frames() - skip, density.grid().dt);
    const Eigen::Index per = density.points() * density.components();
    density = SpaceTimeField(g, density.components(), density.samples().tail(per * g.nt).eval(),
                             density.info());
  }
  const double threshold = ctx.get<double>("threshold", 0.99);
  const auto boxes = ctx.require<std::vector<int>>("boxes");
  const SpaceTimeMeasure m = measure_from_field(density);
  const ConcentrationSet set = concentration_set(m, threshold);
  const DimensionEstimate e = box_count_dimension(set.mask, boxes);

  CsvTable bt{{"box", "radius", "count"}, {}};
  for (std::size_t k = 0; k < e.box_cells.size(); ++k) bt.add(e.box_cells[k], e.radii[k], e.counts[k]);
  write_csv(ctx.artifact("boxes.csv"), bt);
  ctx.manifest.add_fit("box_counting", e.fit);
  ctx.manifest.add_value("dimension", e.dimension);
  ctx.manifest.add_value("retained_mass", set.retained);
  ctx.manifest.add_value("positive_fraction", m.positive_fraction);
  Json report{{"method", e.method}, {"estimate", e.dimension}, {"fit", fit_json(e.fit)},
              {"threshold", threshold}, {"retained", set.retained}, {"delta", delta},
              {"skip_frames", skip}, {"signed_input", m.signed_input},
              {"positive_fraction", m.positive_fraction}};
  ctx.log() << "dimension " << fmt(e.dimension) << " r2 " << fmt(e.fit.r2) << '\n';
  if (ctx.has("expected_dimension")) {
    const double want = ctx.get<double>("expected_dimension", 0.0);
    const double tol = ctx.get<double>("tolerance", 0.1);
    ctx.check("dimension", std::abs(e.dimension - want) <= tol,
              "estimate " + fmt(e.dimension) + " expected " + fmt(want));
  }

  if (ctx.has("gammas")) {
    CsvTable ct{{"gamma", "box", "radius", "count", "sum", "covered_mass"}, {}};
    for (double gamma : ctx.get<std::vector<double>>("gammas", {})) {
      const CoveringCurve c = covering_mass_estimate(m, gamma, boxes, threshold);
      for (std::size_t k = 0; k < c.box_cells.size(); ++k)
        ct.add(gamma, c.box_cells[k], c.radii[k], c.counts[k], c.sums[k], c.covered_mass[k]);
    }
    write_csv(ctx.artifact("covering.csv"), ct);
  }

  if (ctx.has("density")) {
    const Json d = ctx.cfg()["density"];
    const double sigma = d.value("sigma", 1.0 / 3.0);
    const double p = d.contains("p") && d["p"].is_string() ? std::numeric_limits<double>::infinity()
                                                           : d.value("p", 3.0);
    const DensityReport r = density_exponent_fit(m, d.value("points", 8),
                                                 d.value("radii", std::vector<int>{4, 8, 16, 32}),
                                                 d.value("delta", delta), sigma, p, threshold);
    CsvTable dt{{"point", "exponent", "r2"}, {}};
    for (std::size_t k = 0; k < r.points.size(); ++k) {
      dt.add(static_cast<long long>(r.points[k]), r.fits[k].exponent, r.fits[k].r2);
      ctx.manifest.add_fit("density_point" + std::to_string(k), r.fits[k]);
    }
    write_csv(ctx.artifact("density.csv"), dt);
    ctx.manifest.add_value("density_min_exponent", r.min_exponent);
    ctx.manifest.add_value("density_predicted", r.predicted);
    report["density"] = Json{{"min_exponent", r.min_exponent}, {"predicted", r.predicted}};
    ctx.check("density_exponent", r.pass,
              "min " + fmt(r.min_exponent) + " predicted " + fmt(r.predicted) + " - 0.2");
  }
  write_json(ctx.artifact("dims.json"), report);
  return ctx.finish();
}

// ---------------------------------------------------------------- bounds

std::vector<ExponentEntry> read_exponent_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int cp = column("p"), cz = column("zeta"), ce = column("zeta_error");
  if (cp < 0 || cz < 0) throw UsageError(path + ": needs columns p and zeta");
  std::vector<ExponentEntry> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    ExponentEntry e;
    try {
      e.p = std::stod(cells.at(cp));
      e.zeta = std::stod(cells.at(cz));
      if (ce >= 0 && ce < static_cast<int>(cells.size())) e.zeta_error = std::stod(cells[ce]);
    } catch (const std::exception&) {
      throw UsageError(path + ": malformed row '" + line + "'");
    }
    e.source = path;
    out.push_back(e);
  }
  return out;
}

int cmd_bounds(Context& ctx) {
  ExponentTable table;
  table.gamma = ctx.require<double>("gamma");
  table.gamma_method = ctx.get<std::string>("gamma_method", "given");
  table.d = ctx.get<int>("d", 3);
  if (ctx.has("table")) {
    for (const auto& j : ctx.cfg()["table"]) {
      ExponentEntry e;
      e.p = j.at("p").get<double>();
      e.zeta = j.at("zeta").get<double>();
      e.zeta_error = j.value("zeta_error", 0.0);
      e.r2 = j.value("r2", 1.0);
      e.source = j.value("source", "config");
      table.entries.push_back(e);
    }
  } else if (ctx.has("table_csv")) {
    table.entries = read_exponent_csv(ctx.input("table_csv"));
  } else if (ctx.get<std::string>("preset", "") == "kolmogorov") {
    for (double p : {3.0, 4.0, 5.0, 6.0}) table.entries.push_back({p, p / 3.0, 1.0, 0.0, "kolmogorov"});
  } else {
    throw UsageError("bounds needs 'table', 'table_csv' or preset 'kolmogorov'");
  }
  const ConsistencyReport rep = consistency_report(table, ctx.get<int>("curve_points", 31));

  const Json curve_cfg = ctx.get<Json>("curve", Json::object());
  const double p_lo = curve_cfg.value("p_lo", 3.0), p_hi = curve_cfg.value("p_hi", 6.0);
  const int points = curve_cfg.value("points", 31);
  CsvTable ct{{"p", "zeta_star"}, {}};
  for (const auto& [p, z] : zeta_star_curve(p_lo, p_hi, points, rep.kappa)) ct.add(p, z);
  write_csv(ctx.artifact("zeta_star.csv"), ct);

  CsvTable ft{{"p", "zeta_measured", "zeta_star", "verdict"}, {}};
  Json entries = Json::array();
  for (const auto& e : rep.entries) {
    ft.add(e.p, e.zeta, e.zeta_star, to_string(e.verdict));
    entries.push_back(Json{{"p", e.p}, {"zeta", e.zeta}, {"sigma", e.sigma}, {"zeta_star", e.zeta_star},
                           {"margin", e.condition.margin}, {"tolerance", e.tolerance},
                           {"verdict", to_string(e.verdict)}});
    const bool ok = e.verdict == Verdict::consistent || (e.verdict == Verdict::boundary && !ctx.strict());
    ctx.check("bound_p" + fmt(e.p), ok,
              to_string(e.verdict) + ": zeta " + fmt(e.zeta) + " zeta* " + fmt(e.zeta_star));
  }
  write_csv(ctx.artifact("fig1.csv"), ft);
  Json report{{"gamma", table.gamma}, {"gamma_method", table.gamma_method}, {"d", table.d},
              {"kappa", rep.kappa}, {"overall", to_string(rep.overall)}, {"entries", entries}};

  if (ctx.has("obukhov_corrsin")) {
    const Json o = ctx.cfg()["obukhov_corrsin"];
    const ObukhovCorrsin oc = obukhov_corrsin_bound(o.at("sigma").get<double>(), o.at("beta").get<double>(),
                                                    o.at("s").get<double>(), o.at("p").get<double>(),
                                                    table.gamma, table.d);
    report["obukhov_corrsin"] = Json{{"refined_margin", oc.refined.margin},
                                     {"refined", to_string(oc.refined_verdict)},
                                     {"classical_margin", oc.classical.margin},
                                     {"classical", to_string(oc.classical_verdict)},
                                     {"integrability_ok", oc.integrability_ok}};
    auto ok = [&](Verdict v) { return v == Verdict::consistent || (v == Verdict::boundary && !ctx.strict()); };
    ctx.check("obukhov_corrsin_refined", ok(oc.refined_verdict) && oc.integrability_ok,
              to_string(oc.refined_verdict) + " margin " + fmt(oc.refined.margin));
    ctx.check("obukhov_corrsin_classical", ok(oc.classical_verdict),
              to_string(oc.classical_verdict) + " margin " + fmt(oc.classical.margin));
  }
  write_json(ctx.artifact("bounds.json"), report);
  return ctx.finish();
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(Context& ctx) {
  const Law law = parse_law(ctx.get<std::string>("law", "incompressible"));
  const BalanceLaw bl = balance_law(law);
  const Json members = ctx.require<Json>("members");
  if (!members.is_array() || members.size() < 2) throw UsageError("sweep needs at least 2 members");
  std::vector<double> nus;
  std::vector<SpaceTimeField> movies;
  std::vector<std::string> sources;
  for (const auto& m : members) {
    nus.push_back(m.at("nu").get<double>());
    sources.push_back(m.at("input").get<std::string>());
    movies.push_back(read_dlf(ctx.resolve(sources.back())));
  }
  const PeriodicGrid g = movies.front().grid();
  const auto phis = test_functions(ctx, g, 3);
  const SweepRecord sweep = build_sweep(bl, nus, std::move(movies), phis, sources);
  const double sigma = sweep.sigma();
  const TimeBump eta{ctx.get<double>("eta_center", 0.5 * g.duration()),
                     ctx.get<double>("eta_half_width", 0.45 * g.duration())};

  CsvTable mt{{"nu", "source", "sigma", "saturated", "total_dissipation", "resolved_scale"}, {}};
  for (const auto& m : sweep.members)
    mt.add(m.nu, m.source, m.sigma, m.sigma_saturated, m.total_dissipation, m.resolved_scale);
  write_csv(ctx.artifact("sweep_members.csv"), mt);
  ctx.manifest.add_value("sigma", sigma);

  const auto checks = ctx.get<std::vector<std::string>>(
      "checks", {"modulus", "quasi", "four_fifths", "resolved", "uniform"});
  auto wants = [&](const char* c) { return std::find(checks.begin(), checks.end(), c) != checks.end(); };

  if (wants("modulus")) {
    const ModulusReport r = kinetic_energy_modulus(sweep.members.back().movie, sigma);
    CsvTable t{{"lag", "value"}, {}};
    for (std::size_t k = 0; k < r.lags.size(); ++k) t.add(r.lags[k], r.values[k]);
    write_csv(ctx.artifact("modulus.csv"), t);
    if (!r.degenerate) ctx.manifest.add_fit("modulus", r.fit);
    ctx.check("modulus", r.pass,
              r.degenerate ? "energy constant" : "exponent " + fmt(r.fit.exponent) + " predicted " + fmt(r.predicted));
  }
  if (wants("quasi")) {
    CsvTable t{{"phi_id", "nu", "value"}, {}};
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const QuasiSingularityReport r = quasi_singularity_fit(sweep, static_cast<int>(i));
      for (std::size_t k = 0; k < r.nus.size(); ++k) t.add(phis[i].id(), r.nus[k], r.values[k]);
      ctx.manifest.add_fit("quasi_" + phis[i].id(), r.fit);
      pass = pass && r.pass;
      detail += (detail.empty() ? "" : " ") + fmt(r.fit.exponent);
    }
    write_csv(ctx.artifact("quasi.csv"), t);
    ctx.check("quasi_singularity", pass, "exponents " + detail);
  }
  if (wants("four_fifths")) {
    const auto ells = ctx.get<std::vector<int>>("ell_I_steps", {16, 8, 4});
    const FourFifthsReport r = four_fifths_residual(sweep, ells, eta, ctx.get<int>("directions", 16));
    CsvTable t{{"nu", "ell_I", "ell_nu", "balance", "sf"}, {}};
    for (const auto& row : r.rows) t.add(row.nu, row.ell_I, row.ell_nu, row.balance, row.sf);
    write_csv(ctx.artifact("four_fifths.csv"), t);
    CsvTable lt{{"ell_I", "limit_balance", "limit_sf", "bound"}, {}};
    for (std::size_t k = 0; k < r.ell_I.size(); ++k)
      lt.add(r.ell_I[k], r.limit_balance[k], r.limit_sf[k], r.bound[k]);
    write_csv(ctx.artifact("four_fifths_limits.csv"), lt);
    if (r.balance_fit.points) ctx.manifest.add_fit("four_fifths_balance", r.balance_fit);
    if (r.sf_fit.points) ctx.manifest.add_fit("four_fifths_sf", r.sf_fit);
    if (r.bound_fit.points) ctx.manifest.add_fit("four_fifths_bound", r.bound_fit);
    ctx.manifest.add_value("four_fifths_rate", r.rate);
    ctx.manifest.add_value("limit_dissipation", r.limit_dissipation);
    ctx.check("four_fifths", r.pass,
              std::string(r.vanishes ? "vanishing; " : "") + "rate " + fmt(r.rate) + " predicted " + fmt(r.predicted));
  }
  if (wants("resolved")) {
    const ResolvedScaleReport r = resolved_scale_check(sweep, eta);
    CsvTable t{{"nu", "ell_nu", "coarse", "total", "coarse_ratio", "total_ratio"}, {}};
    for (const auto& row : r.rows)
      t.add(row.nu, row.ell_nu, row.coarse, row.total, row.coarse_ratio, row.total_ratio);
    write_csv(ctx.artifact("resolved.csv"), t);
    ctx.check("resolved_scale", r.pass, r.hypothesis ? "hypothesis holds" : "hypothesis not met");
  }
  if (wants("uniform")) {
    const auto steps = ctx.get<std::vector<int>>("delta_steps", {2, 3, 4, 6, 8});
    const UniformBesovReport r = uniform_viscous_besov(sweep, phis, physical(g, steps), ctx.get<double>("p", 3.0),
                                                       ctx.get<double>("time_ratio", 1.0));
    CsvTable t{{"nu", "phi_id", "delta", "difference", "mollified"}, {}};
    for (std::size_t m = 0; m < r.nus.size(); ++m) {
      const auto& rate = r.rates[m];
      for (std::size_t i = 0; i < phis.size(); ++i)
        for (std::size_t k = 0; k < rate.deltas.size(); ++k)
          t.add(r.nus[m], phis[i].id(), rate.deltas[k], rate.difference[i][k], rate.mollified[i][k]);
      ctx.manifest.add_value("uniform_difference_exponent_nu" + fmt(r.nus[m]), r.difference_exponents[m]);
      ctx.manifest.add_value("uniform_mollified_exponent_nu" + fmt(r.nus[m]), r.mollified_exponents[m]);
    }
    write_csv(ctx.artifact("uniform.csv"), t);
    ctx.manifest.add_value("uniform_spread", r.spread);
    ctx.check("uniform_besov", r.trivial || r.pass_uniform,
              r.trivial ? "pairings vanish" : "spread " + fmt(r.spread));
  }
  return ctx.finish();
}

// ---------------------------------------------------------------- report

int cmd_report(Context& ctx) {
  const fs::path dir = ctx.has("dir") ? fs::path(ctx.resolve(ctx.get<std::string>("dir", "")))
                                      : fs::path(ctx.out_dir());
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 14 && name.ends_with(".manifest.json") && name != "report.manifest.json")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no manifests in " + dir.string());

  Json runs = Json::array();
  std::ostringstream md;
  md << "# disslab report\n\n";
  int failed = 0, total = 0;
  for (const auto& f : files) {
    std::ifstream is(f);
    Json m;
    try {
      m = Json::parse(is);
    } catch (const std::exception&) {
      throw Error("malformed manifest " + f.string());
    }
    const std::string cmd = m.value("command", f.stem().stem().string());
    md << "## " << cmd << "\n\n";
    Json summary{{"command", cmd}, {"manifest", f.filename().string()},
                 {"fits", m.value("fits", Json::object())}, {"values", m.value("values", Json::object())},
                 {"checks", m.value("checks", Json::array())}};
    for (const auto& [name, fit] : summary["fits"].items())
      md << "- fit `" << name << "`: exponent " << fit["exponent"].dump() << ", r2 " << fit["r2"].dump() << "\n";
    for (const auto& [name, v] : summary["values"].items()) md << "- `" << name << "` = " << v.dump() << "\n";
    for (const auto& c : summary["checks"]) {
      ++total;
      const bool ok = c.value("passed", false);
      if (!ok) ++failed;
      md << "- " << (ok ? "PASS" : "FAIL") << " " << c.value("name", "") << ": " << c.value("detail", "") << "\n";
    }
    md << "\n";
    runs.push_back(summary);
  }
  md << "Checks: " << total - failed << "/" << total << " passed.\n";
  write_json(ctx.artifact("report.json"),
             Json{{"runs", runs}, {"checks_total", total}, {"checks_failed", failed}});
  write_text_atomic(ctx.artifact("report.md"), md.str());
  ctx.check("all_checks", failed == 0, std::to_string(total - failed) + "/" + std::to_string(total) + " passed");
  return ctx.finish();
}

const std::map<std::string, std::function<int(Context&)>>& handlers() {
  static const std::map<std::string, std::function<int(Context&)>> h{
      {"generate", cmd_generate},   {"besov", cmd_besov},   {"decompose", cmd_decompose},
      {"verify-identity", cmd_verify_identity}, {"rates", cmd_rates}, {"sf", cmd_sf},
      {"dims", cmd_dims},           {"bounds", cmd_bounds}, {"sweep", cmd_sweep},
      {"report", cmd_report}};
  return h;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"generate", "besov", "decompose", "verify-identity", "rates",
                                          "sf",       "dims",  "bounds",    "sweep",           "report"};
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Duchon-Robert dissipation analysis pipeline", "disslab"};
  std::string command, config, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool strict = false;
  app.add_option("command", command, "pipeline command")->required()->check(CLI::IsMember(commands()));
  app.add_option("--config", config, "JSON pipeline config");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for stochastic steps (overrides the config)");
  app.add_option("--threads", threads, "worker threads (default: DISSLAB_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "treat boundary verdicts as failures");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (threads) set_thread_count(*threads);
    Json cfg = Json::object();
    fs::path cfg_dir = fs::current_path();
    if (!config.empty()) {
      std::ifstream is(config);
      if (!is) throw UsageError("cannot read config " + config);
      try {
        cfg = Json::parse(is);
      } catch (const std::exception& e) {
        throw UsageError("invalid config " + config + ": " + e.what());
      }
      if (!cfg.is_object()) throw UsageError("config must be a JSON object");
      if (cfg.contains("command") && cfg["command"] != command)
        throw UsageError("config is for command '" + cfg["command"].get<std::string>() + "'");
      cfg_dir = fs::absolute(config).parent_path();
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw UsageError("cannot create output directory " + out_dir);
    Context ctx(command, std::move(cfg), cfg_dir, out_dir, seed, strict, out);
    return handlers().at(command)(ctx);
  } catch (const std::exception& e) {
    err << "disslab " << command << ": error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace disslab::cli
