#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "zkb/harness.hpp"
#include "zkb/kernels.hpp"

#ifndef ZKB_VERSION
#define ZKB_VERSION "unknown"
#endif

namespace zkb::harness {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string iso_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int status_exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Clean: return exit_code::kClean;
    case RunStatus::Contaminated: return exit_code::kContaminated;
    default: return exit_code::kBlowUp;
  }
}

json file_entry(const fs::path& dir, const std::string& name) {
  return {{"name", name}, {"sha256", sha256_file(dir / name)}, {"bytes", fs::file_size(dir / name)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

std::string fmt(double v) { return format_number(v); }

// Shared error reporting for the command entry points.
template <typename F>
int guarded(std::ostream& out, F&& body) {
  try {
    return body();
  } catch (const BlowUpError& e) {
    out << "error: " << e.what() << '\n';
    return exit_code::kBlowUp;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
}

TimeSeries series_from_samples(const StripGeometry& g, std::vector<NormSample> samples) {
  TimeSeries ts(g);
  ts.samples = std::move(samples);
  return ts;
}

DecayFit fit_for(const TimeSeries& ts, const ExperimentConfig& x, NormId norm, std::optional<double> t0,
                 std::optional<double> t1) {
  if (!t0 && !t1) {
    if (x.t0 || x.t1) {
      t0 = x.t0;
      t1 = x.t1;
    } else {
      return fit_decay_rate(ts, norm);
    }
  }
  const double lo = t0.value_or(ts.samples.front().t);
  const double hi = t1.value_or(ts.samples.back().t);
  return fit_decay_rate(ts, norm, lo, hi);
}

}  // namespace

StripGeometry verify_geometry() { return StripGeometry(std::numbers::pi, 20.0, 256, 16, 0.1); }

// ---------------------------------------------------------------------------
// simulate

SimulationOutcome simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  const std::string started = iso_now();
  const InitialField init = make_initial_field(cfg.initial, cfg.geometry);

  SimulationOutcome outcome{TimeSeries(cfg.geometry), exit_code::kClean};
  try {
    outcome.series = run(init.field, cfg.solver);
  } catch (const BlowUpError& e) {
    if (e.partial) outcome.series = *e.partial;
    outcome.series.status = RunStatus::BlowUp;
    outcome.series.blowup_time = e.time();
    outcome.series.blowup_reason = e.reason();
  }
  TimeSeries& ts = outcome.series;
  ts.provenance = dump_config(cfg);
  outcome.exit_code = status_exit_code(ts.status);

  json files = json::array();
  write_series_csv(out_dir / "series.csv", ts.samples);
  files.push_back(file_entry(out_dir, "series.csv"));
  if (cfg.solver.store_snapshots && !ts.snapshots.empty()) {
    fs::create_directories(out_dir / "snapshots");
    for (std::size_t s = 0; s < ts.snapshots.size(); ++s) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/u_%06zu.bin", s);
      std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
      const auto vals = ts.snapshots[s].values();
      out.write(reinterpret_cast<const char*>(vals.data()), static_cast<std::streamsize>(vals.size_bytes()));
      if (!out) throw std::runtime_error("write failed: " + (out_dir / name).string());
      out.close();
      files.push_back(file_entry(out_dir, name));
    }
  }

  json manifest;
  manifest["schema"] = 1;
  manifest["code_version"] = ZKB_VERSION;
  manifest["kernels"] = std::string(kernels::active().name);
  manifest["seed"] = cfg.seed;
  manifest["config"] = json::parse(ts.provenance);
  manifest["weight"] = {{"b", cfg.geometry.weight_rate()}, {"auto", cfg.b_auto}};
  manifest["initial"] = {{"l2_norm", init.l2_norm}, {"tail", init.tail}};
  manifest["started"] = started;
  manifest["finished"] = iso_now();
  manifest["status"] = std::string(to_string(ts.status));
  manifest["contaminated_at"] = ts.contaminated_at ? json(*ts.contaminated_at) : json(nullptr);
  manifest["blowup"] = ts.blowup_time ? json{{"t", *ts.blowup_time}, {"reason", ts.blowup_reason}} : json(nullptr);
  manifest["absorbed"] = ts.absorbed;
  manifest["samples"] = ts.samples.size();
  if (cfg.solver.store_snapshots) {
    manifest["snapshot_format"] = "raw little-endian float64, y-major (Ny rows of Nx), one file per sample";
  }
  manifest["files"] = files;
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  log << "status: " << to_string(ts.status) << '\n';
  if (ts.contaminated_at) log << "contaminated at t=" << fmt(*ts.contaminated_at) << '\n';
  if (ts.blowup_time) log << "blow-up at t=" << fmt(*ts.blowup_time) << ": " << ts.blowup_reason << '\n';
  log << "samples: " << ts.samples.size() << "  output: " << out_dir.string() << '\n';
  return outcome;
}

int cmd_simulate(const fs::path& config, const fs::path& out_dir, std::ostream& out) {
  return guarded(out, [&] {
    const RunConfig cfg = load_config(config);
    return simulate(cfg, out_dir, out).exit_code;
  });
}

// ---------------------------------------------------------------------------
// constants

int cmd_constants(double B, std::ostream& out) {
  return guarded(out, [&] {
    const TheoremConstants c = constants_for_width(B);
    out << "{\"B\": " << fmt(c.B) << ", \"b_star\": " << fmt(c.b_star) << ", \"chi\": " << fmt(c.chi)
        << ", \"gamma\": " << fmt(c.gamma) << ", \"reg\": " << fmt(c.reg_threshold)
        << ", \"weak\": " << fmt(c.weak_threshold) << "}\n";
    return exit_code::kClean;
  });
}

// ---------------------------------------------------------------------------
// verify

SuiteReport run_inequality_suite(std::string_view suite, int samples, std::uint64_t seed, const StripGeometry& geom) {
  if (samples < 1) throw DomainError("samples must be ≥ 1");
  SuiteReport r;
  r.suite = std::string(suite);
  r.worst_margin = INFINITY;
  auto record = [&](const InequalityCheck& c, int index) {
    ++r.cases;
    if (!c.holds) ++r.failures;
    if (c.margin < r.worst_margin) {
      r.worst_margin = c.margin;
      r.worst_case = index;
    }
  };
  const double b = geom.weight_rate();
  for (int i = 0; i < samples; ++i) {
    const Field u = random_field(geom, seed, static_cast<std::uint64_t>(i));
    if (suite == "steklov") {
      record(verify_steklov(u, b), i);
    } else if (suite == "gn") {
      record(verify_gn(u), i);
    } else if (suite == "sup") {
      for (double delta : {0.1, 1.0, 10.0}) {
        for (double delta1 : {0.1, 1.0, 10.0}) record(verify_sup_lemma(u, b, delta, delta1), i);
      }
    } else {
      throw ConfigError("unknown suite: " + std::string(suite));
    }
  }
  return r;
}

int cmd_verify(std::string_view suite, int samples, std::uint64_t seed, const std::optional<fs::path>& config,
               std::ostream& out) {
  return guarded(out, [&] {
    if (suite != "energy" && suite != "steklov" && suite != "gn" && suite != "sup") {
      throw ConfigError("unknown suite: " + std::string(suite) + " (expected energy, steklov, gn or sup)");
    }
    if (samples < 1) throw DomainError("samples must be ≥ 1");

    if (suite != "energy") {
      const StripGeometry geom = config ? load_config(*config).geometry : verify_geometry();
      const SuiteReport r = run_inequality_suite(suite, samples, seed, geom);
      out << "suite " << r.suite << ": " << (r.cases - r.failures) << "/" << r.cases << " hold, worst margin "
          << fmt(r.worst_margin) << " (field " << r.worst_case << ")\n";
      return r.failures == 0 ? exit_code::kClean : exit_code::kVerdictFailed;
    }

    RunConfig cfg = config ? load_config(*config) : parse_config(preset_document("paper-ref"));
    cfg.solver.dissipation = DissipationMode::PerStep;
    const double limit = 1e-6;
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < samples; ++i) {
      Field u0(cfg.geometry);
      SolverConfig sc = cfg.solver;
      if (i == 0) {
        u0 = make_initial_field(cfg.initial, cfg.geometry).field;
      } else {
        u0 = random_field(cfg.geometry, seed, static_cast<std::uint64_t>(i));
        const double target = 0.9 * constants_for_width(cfg.geometry.width()).weak_threshold;
        for (double& v : u0.values()) v *= target;
        sc.t_end = std::min(sc.t_end, 1.0);
      }
      double residual = INFINITY;
      std::string status;
      try {
        const TimeSeries ts = run(u0, sc);
        residual = energy_residual(ts);
        status = std::string(to_string(ts.status));
      } catch (const BlowUpError& e) {
        status = "blow-up";
      }
      const bool ok = residual < limit;
      if (!ok) ++failures;
      worst = std::max(worst, residual);
      out << "energy run " << i << (i == 0 ? " (reference)" : " (corpus)") << ": residual " << fmt(residual)
          << " status " << status << (ok ? " ok" : " FAIL") << '\n';
    }
    out << "suite energy: " << (samples - failures) << "/" << samples << " below " << fmt(limit)
        << ", worst residual " << fmt(worst) << '\n';
    return failures == 0 ? exit_code::kClean : exit_code::kVerdictFailed;
  });
}

// ---------------------------------------------------------------------------
// fit-decay

int cmd_fit_decay(const fs::path& run_dir, std::string_view norm, std::optional<double> t0, std::optional<double> t1,
                  std::ostream& out) {
  return guarded(out, [&] {
    if (t0 && t1 && !(*t0 < *t1)) throw FitError("window requires t0 < t1");
    const json manifest = read_json(run_dir / "manifest.json");
    const std::string status = manifest.value("status", "");
    if (status != "clean") {
      out << "error: run status is " << status << "; decay fit rejected\n";
      return status == "contaminated" ? exit_code::kContaminated : exit_code::kBlowUp;
    }
    std::ostringstream problems;
    if (!verify_manifest(run_dir, problems)) throw std::runtime_error("manifest check failed: " + problems.str());
    const RunConfig cfg = parse_config(manifest.at("config").dump());
    const NormId id = norm.empty() ? cfg.experiment.norm : parse_norm_id(norm);
    const TimeSeries ts = series_from_samples(cfg.geometry, read_series_csv(run_dir / "series.csv"));
    const DecayFit fit = fit_for(ts, cfg.experiment, id, t0, t1);
    const double chi = constants_for_width(cfg.geometry.width()).chi;
    const bool pass = fit.rate >= chi * (1.0 - cfg.experiment.tolerance);
    out << "norm " << to_string(id) << " window [" << fmt(fit.t0) << ", " << fmt(fit.t1) << "] (" << fit.count
        << " samples)\n";
    out << "fitted rate " << fmt(fit.rate) << "  residual " << fmt(fit.residual) << '\n';
    out << "chi " << fmt(chi) << "  ratio " << fmt(fit.rate / chi) << '\n';
    out << "verdict: " << (pass ? "pass" : "FAIL") << " (fitted >= chi * " << fmt(1.0 - cfg.experiment.tolerance)
        << ")\n";
    return pass ? exit_code::kClean : exit_code::kVerdictFailed;
  });
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const fs::path& config, const std::vector<double>& widths, const std::vector<double>& amplitudes,
              int workers, const fs::path& out_dir, std::ostream& out) {
  return guarded(out, [&] {
    if (widths.empty() || amplitudes.empty()) throw DomainError("width and amplitude lists must be nonempty");
    if (workers < 1) throw DomainError("workers must be >= 1");
    const RunConfig base = load_config(config);
    fs::create_directories(out_dir);

    struct Cell {
      double B = 0.0, fraction = 0.0, u0 = 0.0, threshold = 0.0, chi = 0.0, rate = NAN;
      bool in_scope = false, checked = false, pass = false;
      std::string status;
    };
    std::vector<Cell> cells;
    for (double B : widths) {
      for (double a : amplitudes) {
        Cell c;
        c.B = B;
        c.fraction = a;
        cells.push_back(c);
      }
    }

    auto run_cell = [&](std::size_t index) {
      Cell& c = cells[index];
      try {
        RunConfig cfg = base;
        const TheoremConstants tc = constants_for_width(c.B);
        const double b = base.b_auto ? tc.b_star : base.geometry.weight_rate();
        cfg.geometry = StripGeometry(c.B, base.geometry.half_length(), base.geometry.nx(), base.geometry.ny(), b);
        c.u0 = c.fraction * tc.weak_threshold;
        cfg.initial.target_norm = c.u0;
        c.chi = tc.chi;
        const SmallnessCheck sc = check_smallness(c.u0, c.B, base.experiment.regime);
        c.threshold = sc.threshold;
        c.in_scope = sc.holds;
        std::ostringstream log;
        char name[32];
        std::snprintf(name, sizeof name, "cell_%03zu", index);
        const SimulationOutcome res = simulate(cfg, out_dir / name, log);
        c.status = std::string(to_string(res.series.status));
        if (res.series.status == RunStatus::Clean) {
          const DecayFit fit = fit_for(res.series, base.experiment, base.experiment.norm, {}, {});
          c.rate = fit.rate;
          c.checked = true;
          c.pass = fit.rate >= c.chi * (1.0 - base.experiment.tolerance);
        }
      } catch (const std::exception& e) {
        c.status = std::string("error: ") + e.what();
      }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
    };
    std::vector<std::thread> pool;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), cells.size());
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ofstream csv(out_dir / "summary.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write summary.csv");
    csv << "cell,B,amp_fraction,u0_norm,threshold,in_scope,status,rate,chi,verdict\n";
    bool failed = false;
    out << "cell  B                        fraction  scope     status        rate                     verdict\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Cell& c = cells[i];
      std::string verdict;
      if (!c.in_scope) {
        verdict = "outside theorem scope";
      } else if (!c.checked) {
        verdict = "fail";
        failed = true;
      } else {
        verdict = c.pass ? "pass" : "fail";
        failed = failed || !c.pass;
      }
      csv << i << ',' << fmt(c.B) << ',' << fmt(c.fraction) << ',' << fmt(c.u0) << ',' << fmt(c.threshold) << ','
          << (c.in_scope ? "yes" : "no") << ",\"" << c.status << "\"," << fmt(c.rate) << ',' << fmt(c.chi) << ','
          << verdict << '\n';
      out << i << "  " << fmt(c.B) << "  " << c.fraction << "  " << (c.in_scope ? "in" : "out") << "  " << c.status
          << "  " << fmt(c.rate) << "  " << verdict << '\n';
    }
    out << "summary: " << (out_dir / "summary.csv").string() << '\n';
    return failed ? exit_code::kVerdictFailed : exit_code::kClean;
  });
}

// ---------------------------------------------------------------------------
// cdep

DependenceReport continuous_dependence(const RunConfig& cfg, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("eps must be >= 0");
  DependenceReport rep;
  rep.eps = eps;
  if (eps == 0.0) {
    rep.identical = true;
    rep.passes = true;
    rep.ratio = 1.0;
    return rep;
  }
  const StripGeometry& g = cfg.geometry;
  const Field u0 = make_initial_field(cfg.initial, g).field;
  InitialData bump_spec;
  bump_spec.kind = InitialKind::GaussianMode;
  bump_spec.x0 = cfg.initial.x0;
  bump_spec.width = 1.0;
  bump_spec.mode = 1;
  bump_spec.target_norm = 1.0;
  const Field bump = make_initial_field(bump_spec, g).field;

  SpectralTransform tr(g);
  NormEvaluator norms(g);
  SpectralField v0 = tr.forward(u0);
  const SpectralField vb = tr.forward(bump);
  SpectralField v1 = v0, v2 = v0;
  {
    SpectralField d = vb;
    d *= eps;
    v1 += d;
    d *= 0.5;
    v2 += d;
  }
  Stepper s0(g, cfg.solver), s1(g, cfg.solver), s2(g, cfg.solver);

  auto diff_norm = [&](const SpectralField& a) {
    SpectralField z = a;
    z -= v0;
    return norms.weighted(z).u;
  };
  auto sample = [&](double t) {
    rep.t.push_back(t);
    rep.z_full.push_back(diff_norm(v1));
    rep.z_half.push_back(diff_norm(v2));
  };
  sample(0.0);
  const std::size_t steps = cfg.solver.steps();
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_from = static_cast<double>(n - 1) * cfg.solver.dt;
    s0.step(v0, t_from);
    s1.step(v1, t_from);
    s2.step(v2, t_from);
    if (!std::isfinite(v0.l2_squared()) || !std::isfinite(v1.l2_squared()) || !std::isfinite(v2.l2_squared())) {
      throw BlowUpError(t_from + cfg.solver.dt, NAN, "non-finite values");
    }
    if (n % cfg.solver.output_every == 0 || n == steps) sample(static_cast<double>(n) * cfg.solver.dt);
  }
  rep.growth_full = rep.z_full.back() / rep.z_full.front();
  rep.growth_half = rep.z_half.back() / rep.z_half.front();
  rep.ratio = rep.growth_full / rep.growth_half;
  rep.peak_full = *std::max_element(rep.z_full.begin(), rep.z_full.end()) / rep.z_full.front();
  rep.peak_half = *std::max_element(rep.z_half.begin(), rep.z_half.end()) / rep.z_half.front();
  const double peak_ratio = rep.peak_full / rep.peak_half;
  rep.passes = std::isfinite(rep.ratio) && std::fabs(rep.ratio - 1.0) <= 0.1 && std::fabs(peak_ratio - 1.0) <= 0.1;
  return rep;
}

int cmd_cdep(const fs::path& config, double eps, const std::optional<fs::path>& out_dir, std::ostream& out) {
  return guarded(out, [&] {
    if (!(eps >= 0.0)) throw DomainError("eps must be >= 0");
    const RunConfig cfg = load_config(config);
    const DependenceReport rep = continuous_dependence(cfg, eps);
    if (rep.identical) {
      out << "eps = 0: perturbed and reference runs are identical\n";
      return exit_code::kClean;
    }
    const double u0_norm = make_initial_field(cfg.initial, cfg.geometry).l2_norm;
    const bool in_scope = check_smallness(u0_norm + eps, cfg.geometry.width(), cfg.experiment.regime).holds;
    out << "growth factor eps=" << fmt(eps) << ": " << fmt(rep.growth_full) << " (peak " << fmt(rep.peak_full) << ")\n";
    out << "growth factor eps/2=" << fmt(0.5 * eps) << ": " << fmt(rep.growth_half) << " (peak " << fmt(rep.peak_half)
        << ")\n";
    out << "ratio " << fmt(rep.ratio) << "  verdict: " << (rep.passes ? "pass" : "FAIL")
        << (in_scope ? "" : " (perturbed data beyond threshold; informational)") << '\n';
    if (out_dir) {
      fs::create_directories(*out_dir);
      std::ofstream csv(*out_dir / "cdep.csv", std::ios::binary | std::ios::trunc);
      csv << "t,z_eps,z_half\n";
      for (std::size_t i = 0; i < rep.t.size(); ++i) {
        csv << fmt(rep.t[i]) << ',' << fmt(rep.z_full[i]) << ',' << fmt(rep.z_half[i]) << '\n';
      }
      csv.close();
      json manifest;
      manifest["schema"] = 1;
      manifest["code_version"] = ZKB_VERSION;
      manifest["seed"] = cfg.seed;
      manifest["config"] = json::parse(dump_config(cfg));
      manifest["eps"] = eps;
      manifest["growth_full"] = rep.growth_full;
      manifest["growth_half"] = rep.growth_half;
      manifest["peak_full"] = rep.peak_full;
      manifest["peak_half"] = rep.peak_half;
      manifest["verdict"] = rep.passes ? "pass" : "fail";
      manifest["files"] = json::array({file_entry(*out_dir, "cdep.csv")});
      write_text(*out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    if (!in_scope) return exit_code::kClean;
    return rep.passes ? exit_code::kClean : exit_code::kVerdictFailed;
  });
}

}  // namespace zkb::harness
