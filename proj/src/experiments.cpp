#include "tvrls/experiments.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

#include "tvrls/error.hpp"
#include "tvrls/matkit.hpp"

namespace tvrls {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

double r_max_of(const RegDelta& reg) {
  const Matrix& r = reg.current();
  if (max_abs(r) == 0.0) return 0.0;
  return lambda_extreme(r).max;
}

// Last step whose update belongs to the fading phase.
std::optional<std::size_t> fading_end(const ExperimentConfig& cfg, const Estimator& est) {
  if (est.kind() == EstimatorKind::classical) return cfg.schedule.k_cut;
  return est.schedule().last_change();
}

class ThreadCap {
 public:
  explicit ThreadCap(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCap() { omp_set_num_threads(saved_); }
  ThreadCap(const ThreadCap&) = delete;
  ThreadCap& operator=(const ThreadCap&) = delete;

 private:
  int saved_;
};

}  // namespace

Dataset gen_data(const ExperimentConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = cfg.n;
  const std::size_t p = cfg.p;
  Dataset ds;
  ds.model.theta.resize(n);
  for (double& t : ds.model.theta) t = rng.normal();

  const Matrix gamma = Matrix::identity(p);
  ds.data.reserve(cfg.data.steps);
  for (std::size_t k = 0; k < cfg.data.steps; ++k) {
    MeasurementTriple m;
    m.phi = Matrix(p, n);
    for (std::size_t i = 0; i < p * n; ++i) m.phi.data()[i] = rng.normal();
    if (cfg.data.mode == DataMode::non_pe && k > cfg.data.non_pe_stop) m.phi = Matrix(p, n);
    m.y = m.phi * std::span<const double>(ds.model.theta);
    for (double& y : m.y) y += cfg.data.noise_std * rng.normal();
    m.gamma = gamma;
    ds.data.push_back(std::move(m));
  }
  return ds;
}

Dataset gen_data(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return gen_data(cfg, rng);
}

EstimatorParams estimator_params(const ExperimentConfig& cfg) {
  EstimatorParams params;
  params.r0 = Matrix::identity(cfg.n) * cfg.schedule.r0_scale;
  params.theta_reg = Vector(cfg.n, 0.0);
  params.mu = cfg.schedule.mu;
  params.k_cut = cfg.schedule.k_cut;
  params.j_cut = cfg.schedule.j_cut;
  params.general_schedule = cfg.schedule.kind;
  return params;
}

Excitation monitor_excitation(const History& data, std::size_t cadence) {
  Excitation out;
  if (data.empty()) return out;
  ExcitationMonitor monitor(data.front().dim(), cadence);
  out.lambda_min.reserve(data.size());
  for (const auto& m : data) {
    const auto lmin = monitor.add(m);
    out.lambda_min.push_back(lmin ? *lmin : nan_value);
  }
  out.k_rank = monitor.k_rank();
  out.lambda_min_at_k_rank = monitor.lambda_min_at_k_rank();
  return out;
}

ErrorTrace run_on_data(const ExperimentConfig& cfg, const Dataset& ds, EstimatorKind kind,
                       const Excitation* excitation) {
  Excitation local;
  if (!excitation) {
    local = monitor_excitation(ds.data, cfg.monitor_cadence);
    excitation = &local;
  }
  const auto est = make_estimator(kind, estimator_params(cfg));
  const double theta_norm = norm(ds.model.theta);

  ErrorTrace trace;
  trace.kind = kind;
  trace.mode = cfg.data.mode;
  trace.k_rank = excitation->k_rank;
  trace.rows.reserve(ds.data.size());
  for (std::size_t i = 0; i < ds.data.size(); ++i) {
    const auto start = Clock::now();
    est->update(ds.data[i]);
    const double ms = elapsed_ms(start);

    TraceRow row;
    row.k = i + 1;
    row.error_norm = norm(sub(est->theta(), ds.model.theta));
    row.lambda_min = i < excitation->lambda_min.size() ? excitation->lambda_min[i] : nan_value;
    row.r_max = r_max_of(est->last_reg());
    row.step_ms = ms;
    if (excitation->k_rank && i >= *excitation->k_rank) {
      row.bound = attractivity_bound(row.r_max, excitation->lambda_min_at_k_rank,
                                     norm(est->last_reg().theta_reg), theta_norm);
    }
    trace.rows.push_back(row);
  }
  return trace;
}

ErrorTrace run_single(const ExperimentConfig& cfg, EstimatorKind kind) {
  return run_on_data(cfg, gen_data(cfg, cfg.seed), kind);
}

McRow mean_interval(const std::vector<double>& xs) {
  if (xs.size() < 2) throw Error(ErrorKind::config, "an interval needs at least two samples");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  const double half = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
  return McRow{0, mean, mean - half, mean + half};
}

std::vector<McSummary> run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.trials < 2) throw Error(ErrorKind::config, "Monte Carlo needs trials >= 2");
  const std::size_t kinds = cfg.estimators.size();
  const std::size_t steps = cfg.data.steps;
  const std::size_t trials = cfg.trials;
  // errors[(trial * kinds + e) * steps + k - 1]
  std::vector<double> errors(trials * kinds * steps, 0.0);
  std::vector<std::exception_ptr> failures(trials);
  const Excitation no_monitor;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t t = 0; t < trials; ++t) {
    try {
      const Dataset ds = gen_data(cfg, mix_seed(cfg.seed, t));
      for (std::size_t e = 0; e < kinds; ++e) {
        const auto est = make_estimator(cfg.estimators[e], estimator_params(cfg));
        double* out = errors.data() + (t * kinds + e) * steps;
        for (std::size_t i = 0; i < steps; ++i) {
          est->update(ds.data[i]);
          out[i] = norm(sub(est->theta(), ds.model.theta));
        }
      }
    } catch (...) {
      failures[t] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<McSummary> out(kinds);
  std::vector<double> column(trials);
  for (std::size_t e = 0; e < kinds; ++e) {
    out[e].kind = cfg.estimators[e];
    out[e].trials = trials;
    out[e].rows.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      for (std::size_t t = 0; t < trials; ++t) column[t] = errors[(t * kinds + e) * steps + i];
      McRow row = mean_interval(column);
      row.k = i + 1;
      out[e].rows.push_back(row);
    }
  }
  return out;
}

const TimingRow* TimingSummary::find(EstimatorKind kind, const std::string& phase) const {
  for (const auto& r : rows) {
    if (r.kind == kind && r.phase == phase) return &r;
  }
  return nullptr;
}

TimingSummary run_timing(const ExperimentConfig& cfg) {
  const ThreadCap single(1);
  const Dataset ds = gen_data(cfg, cfg.seed);
  const std::size_t kinds = cfg.estimators.size();

  // Lockstep: every estimator takes step i before any takes step i + 1.
  std::vector<std::unique_ptr<Estimator>> ests;
  std::vector<std::optional<std::size_t>> ends;
  for (EstimatorKind kind : cfg.estimators) {
    ests.push_back(make_estimator(kind, estimator_params(cfg)));
    ends.push_back(fading_end(cfg, *ests.back()));
  }
  std::vector<std::vector<double>> fading(kinds), post(kinds);
  for (std::size_t i = 0; i < ds.data.size(); ++i) {
    for (std::size_t e = 0; e < kinds; ++e) {
      const auto start = Clock::now();
      ests[e]->update(ds.data[i]);
      const double ms = elapsed_ms(start);
      if (i < timing_warmup) continue;
      (!ends[e] || i <= *ends[e] ? fading[e] : post[e]).push_back(ms);
    }
  }

  TimingSummary summary;
  for (std::size_t e = 0; e < kinds; ++e) {
    for (int ph = 0; ph < 2; ++ph) {
      const auto& xs = ph == 0 ? fading[e] : post[e];
      if (xs.size() < 2) continue;
      const McRow stats = mean_interval(xs);
      summary.rows.push_back(TimingRow{cfg.estimators[e], ph == 0 ? "fading" : "post-cutoff",
                                       stats.mean, stats.ci_lo, stats.ci_hi, xs.size()});
    }
  }
  return summary;
}

}  // namespace tvrls
