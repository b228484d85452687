#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "tvrls/config.hpp"
#include "tvrls/error.hpp"
#include "tvrls/experiments.hpp"
#include "tvrls/report.hpp"
#include "tvrls/version.hpp"

namespace tvrls::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  bool svg = false;
  std::string scale = "desk";
  int threads = 0;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 1;
    case ErrorKind::io: return 3;
    default: return 2;
  }
}

json base_document(const Options& opt) {
  if (opt.config_path.empty()) return to_json(ExperimentConfig{});
  std::ifstream in(opt.config_path);
  if (!in) throw Error(ErrorKind::config, "cannot open config file " + opt.config_path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::config, "invalid JSON in " + opt.config_path);
  if (doc.is_object() && doc.contains("config") && doc.contains("version")) doc = doc["config"];
  return doc;
}

ExperimentConfig resolve(json doc, const Options& opt) {
  for (const auto& o : opt.overrides) apply_override(doc, o);
  return config_from_json(doc);
}

void write_meta(const fs::path& dir, const std::string& command, const ExperimentConfig& cfg,
                const Options& opt, double wall_s, bool machine_dependent) {
  json meta{{"command", command},
            {"config", to_json(cfg)},
            {"seed", cfg.seed},
            {"version", version},
            {"overrides", opt.overrides},
            {"wall_time_s", wall_s},
            {"machine_dependent", machine_dependent}};
  if (command == "example1" || command == "example2" || command == "bench") {
    meta["scale"] = opt.scale;
  }
  const fs::path path = dir / "meta.json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << meta.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
  }
}

std::string opt_str(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string("none");
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// --- commands --------------------------------------------------------------

int cmd_run(const Options& opt, std::ostream& out) {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = resolve(base_document(opt), opt);
  const fs::path dir(opt.out_dir);
  ensure_dir(dir);

  if (cfg.trials == 1) {
    const Dataset ds = gen_data(cfg, cfg.seed);
    const Excitation ex = monitor_excitation(ds.data, cfg.monitor_cadence);
    std::vector<PlotSeries> series;
    for (EstimatorKind kind : cfg.estimators) {
      const auto ts = Clock::now();
      const ErrorTrace trace = run_on_data(cfg, ds, kind, &ex);
      emit_csv(trace, dir / ("trace_" + std::string(to_string(kind)) + ".csv"));
      series.push_back(series_from(trace));
      out << to_string(kind) << ": final_error=" << format_double(trace.rows.back().error_norm)
          << " k_rank=" << opt_str(trace.k_rank) << " wall_s=" << seconds_since(ts) << '\n';
    }
    if (opt.svg) emit_svg(series, dir / "trace.svg", PlotSpec{"Estimation error"});
  } else {
    const auto summaries = run_monte_carlo(cfg);
    std::vector<PlotSeries> series;
    for (const auto& s : summaries) {
      emit_csv(s, dir / ("mc_" + std::string(to_string(s.kind)) + ".csv"));
      series.push_back(series_from(s));
      out << to_string(s.kind) << ": final_mean_error=" << format_double(s.rows.back().mean)
          << " trials=" << s.trials << '\n';
    }
    if (opt.svg) emit_svg(series, dir / "mc.svg", PlotSpec{"Mean estimation error"});
  }
  const double wall = seconds_since(t0);
  write_meta(dir, "run", cfg, opt, wall, false);
  out << "wall_s=" << wall << '\n';
  return 0;
}

json example1_document(const std::string& scale) {
  ExperimentConfig cfg;
  cfg.p = 2;
  cfg.schedule.mu = 0.99;
  cfg.schedule.j_cut = 1;
  cfg.data.noise_std = 0.0;
  if (scale == "full") {
    cfg.n = 100;
    cfg.schedule.k_cut = 201;
    cfg.data.steps = 400;
    cfg.data.non_pe_stop = 100;
  } else {
    cfg.n = 20;
    cfg.schedule.k_cut = 41;
    cfg.data.steps = 80;
    cfg.data.non_pe_stop = 20;
  }
  return to_json(cfg);
}

int cmd_example1(const Options& opt, std::ostream& out) {
  const auto t0 = Clock::now();
  const ExperimentConfig base = resolve(example1_document(opt.scale), opt);
  const fs::path dir(opt.out_dir);
  ensure_dir(dir);
  std::vector<PlotSeries> series;
  for (DataMode mode : {DataMode::pe, DataMode::non_pe}) {
    ExperimentConfig cfg = base;
    cfg.data.mode = mode;
    const Dataset ds = gen_data(cfg, cfg.seed);
    const Excitation ex = monitor_excitation(ds.data, cfg.monitor_cadence);
    for (EstimatorKind kind : cfg.estimators) {
      const ErrorTrace trace = run_on_data(cfg, ds, kind, &ex);
      emit_csv(trace, dir / ("example1_" + std::string(to_string(mode)) + "_" +
                             to_string(kind) + ".csv"));
      series.push_back(series_from(trace));
      out << to_string(mode) << ' ' << to_string(kind)
          << ": final_error=" << format_double(trace.rows.back().error_norm)
          << " k_rank=" << opt_str(trace.k_rank) << '\n';
    }
  }
  emit_svg(series, dir / "example1.svg", PlotSpec{"Estimation error, noise-free data"});
  const double wall = seconds_since(t0);
  write_meta(dir, "example1", base, opt, wall, false);
  out << "wall_s=" << wall << '\n';
  return 0;
}

json example2_document(const std::string& scale) {
  ExperimentConfig cfg;
  cfg.p = 2;
  cfg.schedule.mu = 0.99;
  cfg.schedule.j_cut = 1;
  cfg.data.noise_std = 1.0;
  if (scale == "full") {
    cfg.n = 100;
    cfg.schedule.k_cut = 201;
    cfg.data.steps = 400;
    cfg.trials = 1000;
  } else {
    cfg.n = 20;
    cfg.schedule.k_cut = 41;
    cfg.data.steps = 120;
    cfg.trials = 100;
  }
  return to_json(cfg);
}

int cmd_example2(const Options& opt, std::ostream& out) {
  const auto t0 = Clock::now();
  const ExperimentConfig base = resolve(example2_document(opt.scale), opt);
  const fs::path dir(opt.out_dir);
  ensure_dir(dir);
  const std::pair<const char*, double> cases[] = {{"0.01", 0.01}, {"1", 1.0}, {"100", 100.0}};
  for (const auto& [tag, r0] : cases) {
    ExperimentConfig cfg = base;
    cfg.schedule.r0_scale = r0;
    const auto summaries = run_monte_carlo(cfg);
    std::vector<PlotSeries> series;
    for (const auto& s : summaries) {
      emit_csv(s, dir / ("example2_r0_" + std::string(tag) + "_" + to_string(s.kind) + ".csv"));
      series.push_back(series_from(s));
      out << "r0=" << tag << ' ' << to_string(s.kind)
          << ": final_mean_error=" << format_double(s.rows.back().mean) << '\n';
    }
    emit_svg(series, dir / ("example2_r0_" + std::string(tag) + ".svg"),
             PlotSpec{"Mean estimation error, r0 = " + std::string(tag)});
  }
  const double wall = seconds_since(t0);
  write_meta(dir, "example2", base, opt, wall, false);
  out << "wall_s=" << wall << '\n';
  return 0;
}

json bench_document(const std::string& scale) {
  ExperimentConfig cfg;
  cfg.p = 2;
  cfg.schedule.mu = 0.99;
  cfg.schedule.j_cut = 0;
  cfg.data.noise_std = 1.0;
  if (scale == "full") {
    cfg.n = 400;
    cfg.schedule.k_cut = 201;
    cfg.data.steps = 500;
  } else {
    cfg.n = 100;
    cfg.schedule.k_cut = 51;
    cfg.data.steps = 200;
  }
  return to_json(cfg);
}

int cmd_bench(const Options& opt, std::ostream& out) {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = resolve(bench_document(opt.scale), opt);
  const fs::path dir(opt.out_dir);
  ensure_dir(dir);
  const TimingSummary summary = run_timing(cfg);
  emit_csv(summary, dir / "timing.csv");
  emit_timing_svg(summary, dir / "timing.svg",
                  "Time per step, n = " + std::to_string(cfg.n) + ", p = " + std::to_string(cfg.p));
  for (const auto& r : summary.rows) {
    out << to_string(r.kind) << ' ' << r.phase << ": mean_ms=" << format_double(r.mean_ms)
        << " samples=" << r.samples << '\n';
  }
  const double wall = seconds_since(t0);
  write_meta(dir, "bench", cfg, opt, wall, true);
  out << "wall_s=" << wall << '\n';
  return 0;
}

int cmd_validate(const Options& opt, std::ostream& out) {
  const ExperimentConfig cfg = resolve(base_document(opt), opt);
  out << "valid: " << to_json(cfg).dump() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recursive least squares with time-varying regularization", "tvrls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool with_scale) {
    sub->add_option("--config", opt.config_path, "JSON configuration (or a meta.json record)");
    sub->add_option("--set", opt.overrides, "Override a config field: dotted.key=value")
        ->allow_extra_args(false);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--svg", opt.svg, "Also write SVG figures");
    sub->add_option("--threads", opt.threads, "Worker threads (0: machine default)");
    if (with_scale) {
      sub->add_option("--scale", opt.scale, "desk or full")
          ->check(CLI::IsMember({"desk", "full"}))
          ->capture_default_str();
    }
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run the configured experiment");
  CLI::App* ex1 = app.add_subcommand("example1", "Noise-free error traces, PE and non-PE data");
  CLI::App* ex2 = app.add_subcommand("example2", "Monte Carlo error with noise, three r0 values");
  CLI::App* bench = app.add_subcommand("bench", "Per-step timing by phase");
  CLI::App* validate = app.add_subcommand("validate-config", "Check a configuration");
  add_common(run_cmd, false);
  add_common(ex1, true);
  add_common(ex2, true);
  add_common(bench, true);
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (opt.threads < 0) {
    err << "error: --threads must be non-negative\n";
    return 1;
  }
  if (opt.threads > 0) omp_set_num_threads(opt.threads);

  try {
    if (run_cmd->parsed()) return cmd_run(opt, out);
    if (ex1->parsed()) return cmd_example1(opt, out);
    if (ex2->parsed()) return cmd_example2(opt, out);
    if (bench->parsed()) return cmd_bench(opt, out);
    if (validate->parsed()) return cmd_validate(opt, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << "error [ConfigError]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace tvrls::cli
