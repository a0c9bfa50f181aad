#include "semispec/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "semispec/models.hpp"
#include "semispec/pseudospec.hpp"
#include "semispec/semigroup.hpp"
#include "semispec/sweep.hpp"

namespace semispec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

json clist(const std::vector<Complex>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back(cjson(z));
  return a;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<Complex> low_modes(const AssembledOperator& op, int count, const SolverOptions& base) {
  SolverOptions so = base;
  so.method = SolverMethod::ShiftInvert;
  so.shifts_override = {Complex(0.0, 0.0)};
  so.extra_shifts.clear();
  so.k_per_shift = count + 4;
  SpectrumResult s = compute_spectrum(op, so);
  if (static_cast<int>(s.eigenvalues.size()) < count) {
    throw NumericalError("model validation: only " + std::to_string(s.eigenvalues.size()) +
                         " converged eigenvalues, wanted " + std::to_string(count));
  }
  return s.eigenvalues;
}

Complex nearest_to(const std::vector<Complex>& zs, Complex target) {
  return *std::min_element(zs.begin(), zs.end(), [&](Complex a, Complex b) {
    return std::abs(a - target) < std::abs(b - target);
  });
}

void add_extrapolated(ModelValidation& v, const std::string& name, const std::vector<Complex>& oracle,
                      const std::vector<Complex>& coarse, const std::vector<Complex>& fine, double tol) {
  for (std::size_t j = 0; j < oracle.size(); ++j) {
    ModelCheck c;
    c.model = name;
    c.index = static_cast<int>(j);
    c.oracle = oracle[j];
    c.raw = nearest_to(coarse, oracle[j]);
    c.discrete = (4.0 * nearest_to(fine, oracle[j]) - c.raw) / 3.0;
    c.abs_error = std::abs(c.discrete - c.oracle);
    c.raw_abs_error = std::abs(c.raw - c.oracle);
    c.tolerance = tol;
    c.pass = c.abs_error <= tol;
    v.checks.push_back(c);
  }
}

struct Context {
  const CliRequest& req;
  ExperimentConfig cfg;
  fs::path out_dir;
  std::string short_hash;
  std::vector<std::string> outputs;
  std::ostream& out;

  std::string file(const std::string& stem, const std::string& ext) const {
    return stem + "_" + short_hash + "." + ext;
  }
  void write(const std::string& name, const std::string& content) {
    const fs::path p = out_dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + p.string() + "'");
    f << content;
    if (!f) throw ConfigError("failed writing output file '" + p.string() + "'");
    outputs.push_back(name);
  }
  void write_json(const std::string& name, json j) {
    j["config_hash"] = cfg.hash;
    write(name, j.dump(2) + "\n");
  }
};

ResolutionRegime resolution_for(const PredictedAsymptote& p) {
  return p.regime == Regime::Morse ? ResolutionRegime::Morse : ResolutionRegime::Airy;
}

AssembledOperator operator_at(const ExperimentConfig& cfg, const PotentialProfile& prof,
                              const PredictedAsymptote& pred, double h) {
  const Grid g = grid_for(h, cfg.require_domain(), {resolution_for(pred), cfg.points_per_scale}, cfg.n_max);
  return assemble(g, prof, h);
}

json predicted_json(const PredictedAsymptote& p) {
  json w = json::array();
  for (const auto& s : p.warnings) w.push_back(s);
  return {{"regime", to_string(p.regime)},
          {"h_exponent", p.h_exponent},
          {"prefactor", p.prefactor},
          {"imag_center", p.imag_center},
          {"lower_bound_only", p.lower_bound_only},
          {"warnings", w}};
}

json row_error_json(const std::optional<RowError>& e) {
  if (!e) return nullptr;
  return {{"kind", e->kind == ErrorKind::Config ? "config" : e->kind == ErrorKind::Regime ? "regime" : "numerical"},
          {"type", e->type},
          {"message", e->message}};
}

double required(const std::optional<double>& v, const char* key) {
  if (!v) throw ConfigError(std::string("config: '") + key + "' is required for this command");
  return *v;
}

int cmd_spectrum(Context& ctx) {
  const auto prof = ctx.cfg.profile();
  const auto pred = predicted_limit(prof, ctx.cfg.require_domain(), ctx.cfg.regime);
  const double h = required(ctx.cfg.spectrum_h, "spectrum.h");
  const AssembledOperator op = operator_at(ctx.cfg, prof, pred, h);
  const SpectrumResult s = compute_spectrum(op, ctx.cfg.solver);
  json j{{"command", "spectrum"},
         {"potential", prof.text()},
         {"h", h},
         {"grid", {{"dim", op.grid.dim}, {"nodes", op.grid.size()}, {"id", op.grid.id()}}},
         {"method", s.method == SpectrumMethod::Dense ? "dense" : "shift-invert"},
         {"shifts", clist(s.shifts)},
         {"tolerance", s.tolerance},
         {"empty_flagged", s.empty_flagged},
         {"predicted", predicted_json(pred)},
         {"eigenvalues", clist(s.eigenvalues)},
         {"residuals", s.residuals}};
  if (!s.eigenvalues.empty()) j["leftmost"] = cjson(leftmost(s));
  const std::string name = ctx.file("spectrum", "json");
  ctx.write_json(name, j);
  ctx.out << "spectrum: " << s.eigenvalues.size() << " eigenvalues";
  if (!s.eigenvalues.empty()) ctx.out << ", leftmost " << std::setprecision(12) << leftmost(s);
  ctx.out << " -> " << name << "\n";
  return 0;
}

int cmd_sweep(Context& ctx) {
  const auto prof = ctx.cfg.profile();
  const std::vector<double> hs = ctx.cfg.hs ? *ctx.cfg.hs : default_hs();
  SweepOptions so;
  so.regime = ctx.cfg.regime;
  so.points_per_scale = ctx.cfg.points_per_scale;
  so.levels = ctx.cfg.levels;
  so.n_max = ctx.cfg.n_max;
  so.solver = ctx.cfg.solver;
  const SweepOutcome res = run_h_sweep(prof, ctx.cfg.require_domain(), hs, so);

  std::ostringstream csv;
  write_sweep_csv(csv, res.rows);
  const std::string csv_name = ctx.file("sweep", "csv");
  ctx.write(csv_name, csv.str());

  json rows = json::array();
  for (const auto& r : res.rows) rows.push_back({{"h", r.h}, {"error", row_error_json(r.error)}});
  json j{{"command", "sweep"}, {"potential", prof.text()}, {"predicted", predicted_json(res.predicted)},
         {"rows", rows}, {"tolerance", ctx.cfg.theory_tolerance}};
  std::string verdict_text;
  try {
    const FitResult f = fit_powerlaw(res.rows, res.predicted);
    const TheoryVerdict v = compare_to_theory(f, res.predicted, ctx.cfg.theory_tolerance);
    j["fit"] = {{"fitted_exponent", f.fitted_exponent},     {"fitted_prefactor", f.fitted_prefactor},
                {"r_squared", f.r_squared},                 {"prefactor_at_theory", f.prefactor_at_theory},
                {"relative_error_vs_theory", f.relative_error_vs_theory}, {"rows_used", f.rows_used}};
    j["verdict"] = {{"pass", v.pass}, {"details", v.details}};
    verdict_text = std::string(v.pass ? "pass" : "fail") + " (" + v.details + ")";
  } catch (const ConfigError& e) {
    j["fit"] = nullptr;
    j["fit_error"] = e.what();
    j["verdict"] = nullptr;
    verdict_text = std::string("no fit: ") + e.what();
  }
  const std::string json_name = ctx.file("fit", "json");
  ctx.write_json(json_name, j);
  ctx.out << "sweep: " << res.rows.size() << " rows -> " << csv_name << ", " << json_name << "\n";
  ctx.out << "verdict: " << verdict_text << "\n";
  return 0;
}

int cmd_pseudo(Context& ctx) {
  const auto prof = ctx.cfg.profile();
  const auto pred = predicted_limit(prof, ctx.cfg.require_domain(), ctx.cfg.regime);
  const double h = required(ctx.cfg.pseudo_h, "pseudo.h");
  const AssembledOperator op = operator_at(ctx.cfg, prof, pred, h);
  const SpectrumResult spec = compute_spectrum(op, ctx.cfg.solver);
  const double scale = std::pow(h, pred.h_exponent);
  const double gamma = ctx.cfg.pseudo_gamma_factor * pred.prefactor * scale;
  if (!std::isfinite(gamma)) throw RegimeError("pseudo: predicted prefactor is not finite");

  StripOptions so;
  so.nu_samples = ctx.cfg.nu_samples;
  so.spectrum = &spec;
  so.threads = ctx.cfg.solver.threads;
  const StripResult sr = strip_sup(op, gamma, so);

  Region region;
  if (ctx.cfg.pseudo_region) {
    region = *ctx.cfg.pseudo_region;
  } else {
    const Eigen::VectorXd v = op.potential_diagonal();
    const double lm = spec.eigenvalues.empty() ? pred.prefactor * scale : leftmost(spec).real();
    region = {0.0, 3.0 * lm, v.minCoeff(), v.maxCoeff()};
  }
  const PseudospectrumField f = field(op, region, ctx.cfg.pseudo_nx, ctx.cfg.pseudo_ny, {}, ctx.cfg.solver.threads);
  std::ostringstream csv;
  write_field_csv(csv, f);
  const std::string csv_name = ctx.file("field", "csv");
  ctx.write(csv_name, csv.str());

  json j{{"command", "pseudo"},
         {"potential", prof.text()},
         {"h", h},
         {"gamma_max", gamma},
         {"strip_sup", sr.sup},
         {"argmax_nu", sr.argmax_nu},
         {"scaled_strip_sup", sr.sup * scale},
         {"h_exponent", pred.h_exponent},
         {"region", {region.re_lo, region.re_hi, region.im_lo, region.im_hi}},
         {"nx", f.nx},
         {"ny", f.ny}};
  const std::string json_name = ctx.file("strip", "json");
  ctx.write_json(json_name, j);
  ctx.out << "pseudo: strip_sup " << std::setprecision(10) << sr.sup << " at gamma " << gamma << " -> " << csv_name
          << ", " << json_name << "\n";
  return 0;
}

int cmd_decay(Context& ctx) {
  const auto prof = ctx.cfg.profile();
  const auto pred = predicted_limit(prof, ctx.cfg.require_domain(), ctx.cfg.regime);
  const double h = required(ctx.cfg.decay_h, "decay.h");
  const AssembledOperator op = operator_at(ctx.cfg, prof, pred, h);
  const SpectrumResult spec = dense_spectrum(op, ctx.cfg.solver.dense_cap);
  const double rate = leftmost(spec).real();
  const double omega = ctx.cfg.decay_gamma_factor * pred.prefactor * std::pow(h, pred.h_exponent);
  if (!std::isfinite(omega)) throw RegimeError("decay: predicted prefactor is not finite");

  StripOptions so;
  so.nu_samples = ctx.cfg.nu_samples;
  so.spectrum = &spec;
  so.threads = ctx.cfg.solver.threads;
  const StripResult sr = strip_sup(op, omega, so);

  const double t_max = ctx.cfg.decay_t_max ? *ctx.cfg.decay_t_max : 10.0 / rate;
  const DecayCurve curve = decay_curve(op, t_max, ctx.cfg.decay_samples, ctx.cfg.solver.dense_cap);
  const DecayEnvelope env = gp_envelope(sr.sup, omega, ctx.cfg.c0, curve.ts);
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.ts.size(); ++i) worst = std::max(worst, curve.norms[i] / env.values[i]);

  json fit = nullptr;
  json fit_error = nullptr;
  const auto window = default_fit_window(rate);
  try {
    const double r = decay_rate_fit(curve, window);
    fit = {{"fitted_rate", r}, {"relative_error", std::abs(r - rate) / rate}};
  } catch (const Error& e) {
    fit_error = e.what();
  }

  std::ostringstream csv;
  write_decay_csv(csv, curve, &env);
  const std::string csv_name = ctx.file("decay", "csv");
  ctx.write(csv_name, csv.str());
  json j{{"command", "decay"},
         {"potential", prof.text()},
         {"h", h},
         {"min_re_spectrum", rate},
         {"fit_window", {window.first, window.second}},
         {"fit", fit},
         {"fit_error", fit_error},
         {"envelope",
          {{"M", env.M}, {"M1", env.M1}, {"M2", env.M2}, {"rate", env.rate}, {"resolvent_bound", env.resolvent_bound},
           {"c0", env.c0}}},
         {"max_norm_over_envelope", worst},
         {"below_envelope", worst <= 1.0}};
  const std::string json_name = ctx.file("envelope", "json");
  ctx.write_json(json_name, j);
  ctx.out << "decay: min Re sigma " << std::setprecision(10) << rate << ", envelope M " << env.M << " -> "
          << csv_name << ", " << json_name << "\n";
  return 0;
}

int cmd_models(Context& ctx) {
  if (ctx.req.subcommand != "validate") throw ConfigError("models: expected subcommand 'validate'");
  const ModelValidation v = validate_models(ctx.cfg);
  std::ostringstream csv;
  write_models_csv(csv, v);
  const std::string name = ctx.file("models", "csv");
  ctx.write(name, csv.str());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-17s %3s %24s %24s %11s %11s %9s %s\n", "model", "k", "discrete", "oracle",
                "abs_err", "raw_err", "tol", "ok");
  ctx.out << buf;
  for (const auto& c : v.checks) {
    std::snprintf(buf, sizeof buf, "%-17s %3d %11.8f%+11.8fi %11.8f%+11.8fi %11.3e %11.3e %9.1e %s\n",
                  c.model.c_str(), c.index, c.discrete.real(), c.discrete.imag(), c.oracle.real(), c.oracle.imag(),
                  c.abs_error, c.raw_abs_error, c.tolerance, c.pass ? "yes" : "NO");
    ctx.out << buf;
  }
  ctx.out << "models validate -> " << name << "\n";
  if (!v.all_pass()) throw NumericalError("models validate: at least one model exceeds its tolerance");
  return 0;
}

int cmd_gl(Context& ctx) {
  const auto prof = ctx.cfg.profile();
  SweepOptions so;
  so.points_per_scale = ctx.cfg.points_per_scale;
  so.levels = ctx.cfg.levels;
  so.n_max = ctx.cfg.n_max;
  so.solver = ctx.cfg.solver;
  const GLReport rep = gl_preset(prof, ctx.cfg.require_domain(), ctx.cfg.Rs, so);
  std::ostringstream csv;
  write_gl_csv(csv, rep.rows);
  const std::string csv_name = ctx.file("gl", "csv");
  ctx.write(csv_name, csv.str());
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"R", r.R}, {"outside_asymptotic", r.outside_asymptotic}, {"error", row_error_json(r.error)}});
  }
  json j{{"command", "gl"},
         {"potential", prof.text()},
         {"J_m", rep.J_m ? json(*rep.J_m) : json(nullptr)},
         {"J_c", rep.J_c},
         {"predicted_stable", rep.predicted_stable},
         {"observed_stable", rep.observed_stable ? json(*rep.observed_stable) : json(nullptr)},
         {"consistent", rep.consistent},
         {"rows", rows}};
  const std::string json_name = ctx.file("gl", "json");
  ctx.write_json(json_name, j);
  ctx.out << "gl: predicted " << (rep.predicted_stable ? "stable" : "unstable") << ", observed "
          << (rep.observed_stable ? (*rep.observed_stable ? "stable" : "unstable") : "n/a") << " -> " << csv_name
          << ", " << json_name << "\n";
  return 0;
}

unsigned resolve_thread_request(const std::optional<unsigned>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SEMISPEC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ConfigError("SEMISPEC_THREADS must be a nonnegative integer");
    return static_cast<unsigned>(v);
  }
  return 0;
}

void report_error(std::ostream& err, const char* kind, const char* type, const std::string& message) {
  err << json{{"error", kind}, {"type", type}, {"message", message}}.dump() << "\n";
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Regime: return "regime";
    case ErrorKind::Numerical: return "numerical";
  }
  return "config";
}

}  // namespace

bool ModelValidation::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ModelCheck& c) { return c.pass; });
}

ModelValidation validate_models(const ExperimentConfig& cfg) {
  ModelValidation v;
  const SolverOptions& so = cfg.solver;

  {
    const auto oracle = halfline_airy_spectrum(1.0, cfg.airy_count).eigenvalues;
    const auto c = low_modes(assemble_model(HalfLineAiry{1.0, cfg.airy_L}, cfg.airy_n), cfg.airy_count, so);
    const auto f = low_modes(assemble_model(HalfLineAiry{1.0, cfg.airy_L}, 2 * cfg.airy_n + 1), cfg.airy_count, so);
    add_extrapolated(v, "airy", oracle, c, f, cfg.airy_tol);
  }

  std::vector<Complex> davies_raw;
  {
    const auto oracle = davies_spectrum(1.0, cfg.davies_count - 1).eigenvalues;
    davies_raw = low_modes(assemble_model(Oscillator{1.0, cfg.davies_L}, cfg.davies_n), cfg.davies_count, so);
    const auto f = low_modes(assemble_model(Oscillator{1.0, cfg.davies_L}, 2 * cfg.davies_n + 1), cfg.davies_count, so);
    add_extrapolated(v, "davies", oracle, davies_raw, f, cfg.davies_tol);
  }

  {
    // alpha = -1 is the complex conjugate matrix; its spectrum must be the mirror image
    const auto conj_raw = low_modes(assemble_model(Oscillator{-1.0, cfg.davies_L}, cfg.davies_n), cfg.davies_count, so);
    const auto oracle = davies_spectrum(1.0, cfg.davies_count - 1).eigenvalues;
    for (int k = 0; k < cfg.davies_count; ++k) {
      ModelCheck c;
      c.model = "davies_conjugate";
      c.index = k;
      const Complex plus = nearest_to(davies_raw, oracle[static_cast<std::size_t>(k)]);
      c.oracle = std::conj(plus);
      c.raw = c.discrete = nearest_to(conj_raw, c.oracle);
      c.abs_error = c.raw_abs_error = std::abs(c.discrete - c.oracle);
      c.tolerance = so.tol;
      c.pass = c.abs_error <= c.tolerance;
      v.checks.push_back(c);
    }
  }

  {
    const auto prof = PotentialProfile::parse("x^2 + 2*y^2", 2);
    const double L = cfg.tensor_L;
    const Rectangle box{{-L, L}, {-L, L}};
    const int kmax = cfg.tensor_count;
    auto all = quad_tensor_spectrum({1.0, 2.0}, kmax).eigenvalues;
    std::stable_sort(all.begin(), all.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    all.resize(static_cast<std::size_t>(cfg.tensor_count));
    const auto c = low_modes(assemble(make_grid(box, cfg.tensor_n, cfg.tensor_n), prof, 1.0), cfg.tensor_count, so);
    const int nf = 2 * cfg.tensor_n + 1;
    const auto f = low_modes(assemble(make_grid(box, nf, nf), prof, 1.0), cfg.tensor_count, so);
    add_extrapolated(v, "tensor", all, c, f, cfg.tensor_tol);
  }
  return v;
}

void write_models_csv(std::ostream& os, const ModelValidation& v) {
  os << "model,index,discrete_re,discrete_im,raw_re,raw_im,oracle_re,oracle_im,abs_error,raw_abs_error,tolerance,"
        "pass\n";
  char buf[512];
  for (const auto& c : v.checks) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                  c.model.c_str(), c.index, c.discrete.real(), c.discrete.imag(), c.raw.real(), c.raw.imag(),
                  c.oracle.real(), c.oracle.imag(), c.abs_error, c.raw_abs_error, c.tolerance,
                  c.pass ? "true" : "false");
    os << buf;
  }
}

int run_command(const CliRequest& req, std::ostream& out, std::ostream& err) {
  try {
    static const char* commands[] = {"spectrum", "sweep", "pseudo", "decay", "models", "gl"};
    if (std::find_if(std::begin(commands), std::end(commands), [&](const char* c) { return req.command == c; }) ==
        std::end(commands)) {
      throw ConfigError("unknown command '" + req.command + "'");
    }
    ExperimentConfig cfg;
    if (req.config_path) {
      cfg = load_config(*req.config_path);
    } else if (req.command == "models") {
      cfg = parse_config("");
    } else {
      throw ConfigError("--config is required for '" + req.command + "'");
    }
    cfg.solver.threads = resolve_thread_request(req.threads);
    if (req.dense_cap) {
      if (*req.dense_cap < 1) throw ConfigError("--dense-cap must be positive");
      cfg.solver.dense_cap = *req.dense_cap;
    }
    Context ctx{req, cfg, fs::path(req.out_dir ? *req.out_dir : cfg.output_dir), cfg.hash.substr(0, 16), {}, out};
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());

    const std::string started = utc_now();
    int code = 0;
    if (req.command == "spectrum") code = cmd_spectrum(ctx);
    else if (req.command == "sweep") code = cmd_sweep(ctx);
    else if (req.command == "pseudo") code = cmd_pseudo(ctx);
    else if (req.command == "decay") code = cmd_decay(ctx);
    else if (req.command == "models") code = cmd_models(ctx);
    else code = cmd_gl(ctx);

    const std::string cmd = req.command + (req.subcommand.empty() ? "" : "_" + req.subcommand);
    json meta{{"command", cmd},
              {"config_path", req.config_path ? json(*req.config_path) : json(nullptr)},
              {"config_hash", cfg.hash},
              {"started_utc", started},
              {"finished_utc", utc_now()},
              {"threads", cfg.solver.threads},
              {"dense_cap", cfg.solver.dense_cap},
              {"outputs", ctx.outputs}};
    std::ofstream(ctx.out_dir / ("run_" + cmd + "_" + ctx.short_hash + ".meta.json")) << meta.dump(2) << "\n";
    return code;
  } catch (const Error& e) {
    report_error(err, kind_name(e.kind()), e.type_name(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "numerical", "internal", e.what());
    return exit_code(ErrorKind::Numerical);
  }
}

}  // namespace semispec
