#include "qgsaddle/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qgsaddle/diagnostics.hpp"
#include "qgsaddle/fits.hpp"
#include "qgsaddle/io.hpp"
#include "qgsaddle/oracle.hpp"

namespace qgsaddle {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const SaddleRecord& s) {
  return {{"t", s.t},
          {"x1", s.x1},
          {"x2", s.x2},
          {"beta", finite_or_null(s.beta)},
          {"delta", finite_or_null(s.delta)},
          {"gamma", finite_or_null(s.gamma)},
          {"quality", s.quality},
          {"frame_angle", s.frame_angle},
          {"degenerate", s.degenerate},
          {"out_of_model", s.out_of_model}};
}

json to_json(const FitResult& f) {
  json j{{"model", to_string(f.model)},
         {"rms_log_residual", f.rms_log_residual},
         {"window", {f.window_t0, f.window_t1}},
         {"points", f.points},
         {"converged", f.converged}};
  if (f.model == FitResult::Model::power_law) {
    j["t_star"] = f.t_star;
    j["p"] = f.p;
    j["amplitude"] = f.amplitude;
  } else {
    j["a"] = f.a;
    j["b"] = f.b;
  }
  if (!f.diagnostic.empty()) j["diagnostic"] = f.diagnostic;
  return j;
}

json to_json(const QuadratureResult& q) {
  return {{"resolution", q.resolution}, {"last_change", q.last_change}, {"converged", q.converged}, {"flagged", q.flagged}};
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write '" + out + "'");
  f << text;
}

// Smallest multiple of `interval` strictly beyond t (same slack as the snapshot schedule).
double next_multiple(double t, double interval) {
  return (std::floor(t / interval * (1.0 + 1e-12) + 1e-12) + 1.0) * interval;
}

std::optional<SaddleRecord> seed_saddle(const Field2D& theta, const Region& region, double t) {
  DetectOptions opt;
  opt.time = t;
  const double c1 = 0.5 * (region.x1_min + region.x1_max), c2 = 0.5 * (region.x2_min + region.x2_max);
  std::optional<SaddleRecord> best;
  for (const auto& s : detect_saddles(theta, region, opt)) {
    if (s.degenerate) continue;
    if (!best || periodic_distance(s.x1, s.x2, c1, c2) < periodic_distance(best->x1, best->x2, c1, c2)) best = s;
  }
  return best;
}

json fit_report(const Series& series, double t0, double t1) {
  json j{{"window", {t0, t1}}};
  std::optional<FitResult> power, dexp;
  try {
    power = fit_power_law(series, t0, t1);
    j["power_law"] = to_json(*power);
  } catch (const std::exception& e) {
    j["power_law"] = {{"error", e.what()}};
  }
  try {
    dexp = fit_double_exp(series, t0, t1);
    j["double_exp"] = to_json(*dexp);
  } catch (const std::exception& e) {
    j["double_exp"] = {{"error", e.what()}};
  }

  // The comparison needs both fits on one window; when g ≤ e somewhere in the
  // requested window it runs on the trailing sub-window where g > e.
  double c0 = t0, c1 = t1;
  if (!dexp) {
    try {
      if (const auto sub = double_exp_subwindow(series, t0, t1)) {
        c0 = sub->first;
        c1 = sub->second;
      }
    } catch (const std::exception&) {
    }
  }
  try {
    const auto cmp = compare_models(series, c0, c1);
    j["comparison"] = {{"window", {c0, c1}},
                       {"preferred", to_string(cmp.preferred)},
                       {"relative_gap", cmp.relative_gap},
                       {"power_law", to_json(cmp.power_law)},
                       {"double_exp", to_json(cmp.double_exp)}};
  } catch (const std::exception& e) {
    j["comparison"] = {{"window", {c0, c1}}, {"preferred", nullptr}, {"error", e.what()}};
  }
  return j;
}

}  // namespace

std::string checkpoint_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "state_t%.6f.bin", t);
  return buf;
}

SimulationSummary simulate(const SimConfig& config, const std::optional<std::string>& resume) {
  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  SimulationSummary summary;
  summary.series_path = (dir / "series.csv").string();

  RunSpec spec;
  spec.model = config.model;
  spec.step = config.step;
  spec.filter = config.filter;
  spec.store_states = false;
  if (resume) {
    auto ck = read_checkpoint(*resume);
    if (ck.model != config.model) throw std::invalid_argument("checkpoint model differs from the configuration");
    const int n = std::visit([](const auto& f) { return f.n(); }, ck.state);
    if (n != config.n) throw std::invalid_argument("checkpoint grid size differs from the configuration");
    spec.initial = std::move(ck.state);
    spec.t0 = ck.t;
    if (fs::exists(summary.series_path)) {
      const auto rows = read_series(summary.series_path);
      if (!rows.empty() && std::abs(rows.back().diag.t - spec.t0) <= 1e-12 * std::max(1.0, spec.t0))
        spec.bkm0 = rows.back().diag.bkm_accum;
    }
  } else {
    spec.initial = initial_state(config);
    fs::remove(summary.series_path);
  }

  std::optional<SaddleTracker> tracker;
  if (config.saddle_region) {
    const auto& theta = std::get<Field2D>(spec.initial);
    if (const auto seed = seed_saddle(theta, *config.saddle_region, spec.t0)) {
      TrackOptions opt;
      opt.continuity_radius = config.track_radius;
      opt.region = *config.saddle_region;
      tracker.emplace(*seed, opt);
    }
  }
  const double disc_radius = config.track_radius > 0.0 ? config.track_radius : 10.0 * kTwoPi / config.n;

  spec.disc_provider = [&](double t, const State& state) -> std::optional<Disc> {
    if (!tracker || !tracker->update(t, std::get<Field2D>(state))) return std::nullopt;
    return Disc{tracker->current().x1, tracker->current().x2, disc_radius};
  };

  double next_ckpt = config.checkpoint_interval > 0.0 ? 0.0 : INFINITY;
  if (resume) next_ckpt = config.checkpoint_interval > 0.0 ? next_multiple(spec.t0, config.checkpoint_interval) : INFINITY;
  const double end_slack = 1e-12 * std::max(1.0, config.step.t_end);
  bool first = true;

  spec.on_snapshot = [&](double t, const State& state, const DiagRow& row) {
    const bool skip_row = first && resume.has_value();
    first = false;
    if (!skip_row) {
      SeriesRow r{row, std::nullopt};
      if (tracker && tracker->active() && !tracker->track().records.empty() && tracker->current().t == t)
        r.saddle = tracker->current();
      append_series_row(summary.series_path, r);
    }
    const bool at_end = t >= config.step.t_end - end_slack;
    const bool due = t >= next_ckpt * (1.0 - 1e-12);
    if ((due || at_end) && !skip_row) {
      const auto path = (dir / checkpoint_name(t)).string();
      write_checkpoint(path, state, t, config.model);
      summary.checkpoints.push_back(path);
    }
    if (due) next_ckpt = next_multiple(t, config.checkpoint_interval);
  };

  summary.trajectory = run(spec);
  if (tracker) summary.track = tracker->track();

  json report{{"model", std::string(to_string(config.model))},
              {"n", config.n},
              {"initial", std::string(to_string(config.initial))},
              {"t_start", spec.t0},
              {"t_end", config.step.t_end},
              {"steps", summary.trajectory.steps},
              {"dt_min", summary.trajectory.dt_min},
              {"dt_max", summary.trajectory.dt_max},
              {"snapshots", summary.trajectory.rows.size()},
              {"filter", config.filter.enabled},
              {"resumed", resume.has_value()}};
  json ck = json::array();
  for (const auto& p : summary.checkpoints) ck.push_back(fs::path(p).filename().string());
  report["checkpoints"] = ck;
  if (summary.track) {
    report["track"] = {{"records", summary.track->records.size()},
                       {"terminated", to_string(summary.track->terminated)},
                       {"terminated_at", summary.track->terminated_at}};
  } else {
    report["track"] = nullptr;
  }
  emit(report, (dir / "run.json").string());
  return summary;
}

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Pseudo-spectral active scalar lab: simulation, saddle metrology, kernel quadrature and growth fits"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a configuration; writes series.csv, checkpoints and run.json");
  std::string config_path, resume_path;
  sim->add_option("config", config_path, "key=value configuration file")->required()->check(CLI::ExistingFile);
  sim->add_option("--resume", resume_path, "continue from this checkpoint")->check(CLI::ExistingFile);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Quadrature oracles; JSON report");
  oracle->require_subcommand(1);
  std::string out_path;

  auto* lemma = oracle->add_subcommand("lemma1", "psi(p) - psi(q) across a sweep of opening angles");
  std::string kernel_name = "sqg";
  std::vector<double> gammas{0.2, 0.1, 0.05, 0.02, 0.01};
  LemmaSweepOptions lopt;
  lemma->add_option("--kernel", kernel_name, "sqg or euler")->check(CLI::IsMember({"sqg", "euler"}));
  lemma->add_option("--gammas", gammas, "comma-separated opening angles in (0, 0.5)")->delimiter(',');
  lemma->add_option("--y1", lopt.y1, "abscissa of p and q");
  lemma->add_option("--radius", lopt.radius, "support radius");
  lemma->add_option("--epsilon", lopt.epsilon, "profile width, 0 for a sign profile");
  lemma->add_option("--amp-top", lopt.amp_top);
  lemma->add_option("--amp-bottom", lopt.amp_bottom);
  lemma->add_option("--max-resolution", lopt.quadrature.max_resolution);
  lemma->add_option("--out", out_path, "write JSON here instead of stdout");

  auto* kint = oracle->add_subcommand("kintegral", "branch integrals K(p), K(q) with D = 1 + c*y2");
  double k_y1 = 1.0, k_c = 0.1;
  std::vector<double> k_gammas{0.2, 0.1, 0.05};
  kint->add_option("--y1", k_y1);
  kint->add_option("--perturbation", k_c, "c in D = 1 + c*y2 (0 gives D = 1)");
  kint->add_option("--gammas", k_gammas)->delimiter(',');
  kint->add_option("--out", out_path);

  auto* apv = oracle->add_subcommand("alphapv", "principal-value stretching factor vs the local strain formula");
  std::string apv_ckpt, apv_expr = "sin(x1)*sin(x2)";
  int apv_n = 64;
  double apv_x1 = 1.0, apv_x2 = 0.3;
  PvOptions popt;
  apv->add_option("--checkpoint", apv_ckpt, "sqg checkpoint (otherwise --expression on an n-grid)")
      ->check(CLI::ExistingFile);
  apv->add_option("--expression", apv_expr);
  apv->add_option("--n", apv_n);
  apv->add_option("--x1", apv_x1);
  apv->add_option("--x2", apv_x2);
  apv->add_option("--cutoff", popt.cutoff);
  apv->add_option("--angles", popt.angles);
  apv->add_option("--out", out_path);

  // fit
  auto* fit = app.add_subcommand("fit", "power-law and double-exponential fits of a series column; JSON report");
  std::string series_path, column = "sup_grad";
  std::vector<double> window;
  fit->add_option("series", series_path)->required()->check(CLI::ExistingFile);
  fit->add_option("--window", window, "t0 t1")->required()->expected(2);
  fit->add_option("--column", column);
  fit->add_option("--out", out_path);

  // measure
  auto* measure = app.add_subcommand("measure", "saddle detection on a checkpoint; JSON report");
  std::string measure_ckpt;
  std::vector<double> region_values;
  double reference_angle = 0.0;
  bool ellipse = false;
  measure->add_option("checkpoint", measure_ckpt)->required()->check(CLI::ExistingFile);
  measure->add_option("--region", region_values, "x1min x1max x2min x2max")->expected(4);
  measure->add_option("--reference-angle", reference_angle, "axis the slopes beta, delta refer to");
  measure->add_flag("--ellipse", ellipse, "also fit the dominant extremum");
  measure->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) {
      const auto cfg = load_config(config_path);
      const auto s = simulate(cfg, resume_path.empty() ? std::nullopt : std::optional<std::string>(resume_path));
      std::cout << "wrote " << s.series_path << " (" << s.trajectory.rows.size() << " snapshots, "
                << s.trajectory.steps << " steps)\n";
    } else if (lemma->parsed()) {
      const auto kernel = kernel_name == "sqg" ? KernelTag::sqg : KernelTag::euler;
      const auto rows = lemma1_sweep(gammas, kernel, lopt);
      json j{{"kernel", kernel_name},
             {"y1", lopt.y1},
             {"radius", lopt.radius},
             {"epsilon", lopt.epsilon},
             {"amp_top", lopt.amp_top},
             {"amp_bottom", lopt.amp_bottom},
             {"ratio_definition", kernel == KernelTag::sqg ? "|I|/(gamma*log(1/gamma))" : "|I|/gamma"}};
      json entries = json::array();
      double lo = INFINITY, hi = 0.0;
      for (const auto& r : rows) {
        entries.push_back({{"gamma", r.gamma},
                           {"beta", r.beta},
                           {"delta", r.delta},
                           {"value", r.value},
                           {"ratio", r.ratio},
                           {"ratio_linear", r.ratio_linear},
                           {"quadrature", to_json(r.quadrature)}});
        if (!r.quadrature.flagged) {
          lo = std::min(lo, r.ratio);
          hi = std::max(hi, r.ratio);
        }
      }
      j["entries"] = entries;
      j["spread"] = lo > 0.0 && std::isfinite(lo) ? json(hi / lo) : json(nullptr);
      emit(j, out_path);
    } else if (kint->parsed()) {
      std::function<double(double, double)> D;
      if (k_c != 0.0) D = [k_c](double, double y2) { return 1.0 + k_c * y2; };
      json entries = json::array();
      for (double g : k_gammas) {
        const double beta = std::tan(g / 3.0), delta = std::tan(2.0 * g / 3.0);
        const double kp = k_integral(Branch::p, k_y1, beta, delta, D);
        const double kq = k_integral(Branch::q, k_y1, beta, delta, D);
        entries.push_back({{"gamma", g}, {"beta", beta}, {"delta", delta}, {"k_p", kp}, {"k_q", kq},
                           {"difference_over_gamma", std::abs(kp - kq) / g}});
      }
      emit({{"y1", k_y1}, {"perturbation", k_c}, {"entries", entries}}, out_path);
    } else if (apv->parsed()) {
      Field2D theta(Grid2D(8));
      if (!apv_ckpt.empty()) {
        auto ck = read_checkpoint(apv_ckpt);
        if (ck.model != ModelTag::sqg) throw std::invalid_argument("alphapv needs an sqg checkpoint");
        theta = std::get<Field2D>(ck.state);
      } else {
        theta = Field2D::from_function(Grid2D(apv_n), compile_expression(apv_expr));
      }
      const double pv = alpha_pv_point(theta, apv_x1, apv_x2, popt);
      const double local = alpha_local_point(theta, apv_x1, apv_x2);
      emit({{"x1", apv_x1},
            {"x2", apv_x2},
            {"cutoff", popt.cutoff},
            {"alpha_pv", pv},
            {"alpha_local", local},
            {"relative_difference", local != 0.0 ? json(std::abs(pv - local) / std::abs(local)) : json(nullptr)}},
           out_path);
    } else if (fit->parsed()) {
      const auto series = series_column(read_series(series_path), column);
      auto j = fit_report(series, window[0], window[1]);
      j["column"] = column;
      emit(j, out_path);
    } else if (measure->parsed()) {
      const auto ck = read_checkpoint(measure_ckpt);
      const auto* theta = std::get_if<Field2D>(&ck.state);
      if (!theta) throw std::invalid_argument("measure needs a 2D checkpoint");
      Region region;
      if (!region_values.empty()) region = {region_values[0], region_values[1], region_values[2], region_values[3]};
      DetectOptions opt;
      opt.time = ck.t;
      opt.reference_angle = reference_angle;
      json saddles = json::array();
      for (const auto& s : detect_saddles(*theta, region, opt)) saddles.push_back(to_json(s));
      json j{{"t", ck.t}, {"model", std::string(to_string(ck.model))}, {"n", theta->n()}, {"saddles", saddles}};
      if (ellipse) {
        try {
          const auto e = fit_ellipse(*theta, region, ck.t);
          j["ellipse"] = {{"x1", e.x1}, {"x2", e.x2}, {"a", e.a}, {"b", e.b}, {"aspect", e.aspect},
                          {"axis_angle", e.axis_angle}};
        } catch (const NotEllipticError& e) {
          j["ellipse"] = {{"error", e.what()}};
        }
      }
      emit(j, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_command(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"qgsaddle"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qgsaddle
