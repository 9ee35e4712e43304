#pragma once

// Seeded sweeps over (d, n/d, seed). Each cell owns its instance and
// optimizer state; records flow through a single serialized sink.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "phaseprobe/error.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/optimize.hpp"
#include "phaseprobe/probes.hpp"
#include "phaseprobe/rng.hpp"
#include "phaseprobe/spectral.hpp"
#include "phaseprobe/stats.hpp"

namespace phaseprobe {

enum class SweepMetric { q, Q, cert_hessian, cert_onepoint, eig_min, annulus, gd };

inline std::string_view to_string(SweepMetric m) noexcept {
  switch (m) {
    case SweepMetric::q: return "q";
    case SweepMetric::Q: return "Q";
    case SweepMetric::cert_hessian: return "cert_hessian";
    case SweepMetric::cert_onepoint: return "cert_onepoint";
    case SweepMetric::eig_min: return "eig_min";
    case SweepMetric::annulus: return "annulus";
    case SweepMetric::gd: return "gd";
  }
  return "";
}

inline SweepMetric parse_metric(std::string_view s) {
  for (SweepMetric m : {SweepMetric::q, SweepMetric::Q, SweepMetric::cert_hessian, SweepMetric::cert_onepoint,
                        SweepMetric::eig_min, SweepMetric::annulus, SweepMetric::gd}) {
    if (to_string(m) == s) return m;
  }
  throw ParameterError("unknown metric '" + std::string(s) + "'");
}

struct SweepConfig {
  SweepMetric metric = SweepMetric::q;
  std::vector<std::size_t> d_grid;
  std::vector<double> ratios{2.0};     // n = round(ratio * d), one series per ratio
  std::optional<std::size_t> n_fixed;  // overrides ratios when set
  double r = 0.1;
  std::size_t seeds = 10;
  std::uint64_t base_seed = 0;
  std::optional<AdamConfig> adam;  // default: fig2 preset for q, fig3 for Q

  double r_lo = 0.15;  // annulus
  double r_hi = 0.3;
  std::size_t points = 500;

  double eta = 0.1;  // gd
  std::size_t max_steps = 500;
  double dist_tol = 0.01;
  double init_distance = 0.3;

  std::size_t lanczos_iters = 1000;  // eig_min
  double lanczos_tol = 1e-8;

  AdamConfig optimizer() const {
    if (adam) return *adam;
    return metric == SweepMetric::Q ? AdamConfig::fig3() : AdamConfig::fig2();
  }

  std::vector<double> series() const {
    if (n_fixed) return {std::numeric_limits<double>::quiet_NaN()};
    return ratios;
  }

  std::size_t sample_count(std::size_t d, double ratio) const {
    if (n_fixed) return *n_fixed;
    return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(d)));
  }

  void validate() const {
    if (d_grid.empty()) throw ParameterError("sweep: d grid must be non-empty");
    if (seeds == 0) throw ParameterError("sweep: seeds must be at least 1");
    for (std::size_t d : d_grid) {
      if (d == 0) throw ParameterError("sweep: dimensions must be positive");
    }
    if (n_fixed) {
      if (*n_fixed == 0) throw ParameterError("sweep: n must be positive");
    } else {
      if (ratios.empty()) throw ParameterError("sweep: ratio list must be non-empty");
      for (double g : ratios) {
        if (!(g >= 1.0)) throw ParameterError("sweep: ratio n/d must be at least 1");
      }
    }
    optimizer().validate();
  }
};

struct SweepRecord {
  std::string metric;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t seed = 0;  // seed index within the cell grid
  double value = 0.0;
  double wall_ms = 0.0;
  std::string extra_json = "{}";
  bool failed = false;

  bool operator==(const SweepRecord&) const = default;
};

struct Aggregate {
  std::size_t d = 0;
  std::size_t n = 0;
  double ratio = 0.0;  // series key (NaN for a fixed n)
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

// Seed of cell (d, k): a stable mix of (base_seed, d, k).
inline std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t d, std::size_t seed_index) {
  return mix_seed({base_seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(seed_index)});
}

// Runs one cell. Failures propagate as exceptions.
inline SweepRecord run_cell(const SweepConfig& cfg, std::size_t d, std::size_t n, std::size_t seed_index) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = cell_seed(cfg.base_seed, d, seed_index);
  const std::uint64_t aux_seed = mix_seed({seed, 1});
  const Instance inst = generate_instance(d, n, seed);
  nlohmann::ordered_json extra;
  extra["cell_seed"] = seed;
  double value = 0.0;

  switch (cfg.metric) {
    case SweepMetric::q:
    case SweepMetric::Q: {
      const AdamConfig adam = cfg.optimizer();
      const ProbeResult res = cfg.metric == SweepMetric::q ? probe_q(inst, cfg.r, adam, aux_seed)
                                                           : probe_Q(inst, cfg.r, adam, aux_seed);
      value = res.final_value;
      extra["steps"] = res.trace.steps;
      extra["last_value"] = res.trace.values.back();
      break;
    }
    case SweepMetric::cert_hessian:
    case SweepMetric::cert_onepoint: {
      const Certificate c = cfg.metric == SweepMetric::cert_hessian ? certificate_hessian_ball(inst)
                                                                    : certificate_onepoint_ball(inst);
      value = c.value;
      extra["J"] = c.J;
      extra["delta_norm"] = c.delta_norm;
      break;
    }
    case SweepMetric::eig_min: {
      const SpectralEstimate est = min_eigen_lanczos(inst, inst.w_star(), cfg.lanczos_iters, cfg.lanczos_tol, aux_seed);
      value = est.lambda_min;
      extra["iterations"] = est.iterations;
      extra["residual"] = est.residual;
      extra["converged"] = est.converged;
      break;
    }
    case SweepMetric::annulus: {
      const AnnulusResult res = annulus_min_ratio(inst, cfg.r_lo, cfg.r_hi, cfg.points, aux_seed);
      value = res.min_ratio;
      extra["argmin_distance"] = distance(res.argmin_w, inst.w_star());
      break;
    }
    case SweepMetric::gd: {
      Rng rng(aux_seed);
      Vector w0 = random_point_on_sphere(inst.w_star(), cfg.init_distance, rng);
      const Trace trace = gradient_descent(inst, std::move(w0), cfg.eta, cfg.max_steps, cfg.dist_tol);
      value = trace.distances.back();
      extra["steps"] = trace.steps;
      extra["reached"] = value <= cfg.dist_tol;
      break;
    }
  }
  if (!std::isfinite(value)) throw NumericalError("sweep cell produced a non-finite value", 0);

  SweepRecord rec;
  rec.metric = std::string(to_string(cfg.metric));
  rec.d = d;
  rec.n = n;
  rec.seed = seed_index;
  rec.value = value;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.extra_json = extra.dump();
  return rec;
}

struct SweepOutcome {
  std::vector<SweepRecord> records;  // in cell order
  std::vector<Aggregate> aggregates;
  std::size_t failures = 0;
};

struct SweepOptions {
  std::size_t threads = 1;
  // Emit records in cell order and zero wall_ms, so reruns are byte-identical.
  bool deterministic = false;
};

using RecordSink = std::function<void(const SweepRecord&)>;

inline std::vector<Aggregate> aggregate_records(const SweepConfig& cfg, const std::vector<SweepRecord>& records) {
  std::vector<Aggregate> out;
  for (double ratio : cfg.series()) {
    for (std::size_t d : cfg.d_grid) {
      const std::size_t n = cfg.sample_count(d, ratio);
      std::vector<double> values;
      for (const auto& r : records) {
        if (!r.failed && r.d == d && r.n == n) values.push_back(r.value);
      }
      Aggregate a;
      a.d = d;
      a.n = n;
      a.ratio = ratio;
      a.mean = stats::mean(values);
      a.median = stats::median(values);
      a.std = stats::stddev(values);
      a.count = values.size();
      out.push_back(a);
    }
  }
  return out;
}

inline SweepOutcome run_sweep(const SweepConfig& cfg, const RecordSink& sink = {}, SweepOptions opts = {}) {
  cfg.validate();
  struct Cell {
    std::size_t d, n, k;
  };
  std::vector<Cell> cells;
  for (double ratio : cfg.series()) {
    for (std::size_t d : cfg.d_grid) {
      for (std::size_t k = 0; k < cfg.seeds; ++k) cells.push_back({d, cfg.sample_count(d, ratio), k});
    }
  }

  std::vector<std::optional<SweepRecord>> done(cells.size());
  std::mutex sink_mutex;
  std::size_t next_to_emit = 0;
  std::atomic<std::size_t> next_cell{0};

  auto emit = [&](std::size_t idx, SweepRecord rec) {
    std::lock_guard<std::mutex> lock(sink_mutex);
    if (opts.deterministic) rec.wall_ms = 0.0;
    done[idx] = rec;
    if (!opts.deterministic) {
      if (sink) sink(rec);
      return;
    }
    while (next_to_emit < done.size() && done[next_to_emit]) {
      if (sink) sink(*done[next_to_emit]);
      ++next_to_emit;
    }
  };

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next_cell.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& c = cells[idx];
      SweepRecord rec;
      try {
        rec = run_cell(cfg, c.d, c.n, c.k);
      } catch (const std::exception& e) {
        rec.metric = std::string(to_string(cfg.metric));
        rec.d = c.d;
        rec.n = c.n;
        rec.seed = c.k;
        rec.value = std::numeric_limits<double>::quiet_NaN();
        rec.failed = true;
        nlohmann::ordered_json extra;
        extra["error"] = e.what();
        rec.extra_json = extra.dump();
      }
      emit(idx, std::move(rec));
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepOutcome out;
  for (auto& r : done) {
    if (r->failed) ++out.failures;
    out.records.push_back(std::move(*r));
  }
  out.aggregates = aggregate_records(cfg, out.records);
  return out;
}

}  // namespace phaseprobe
