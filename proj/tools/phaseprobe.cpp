// phaseprobe: command-line front end for the landscape probes.
//
//   phaseprobe [--seed S] [--out PATH] [--format csv|json] [--threads T]
//              [--deterministic] [--config FILE] <subcommand> [flags]
//
// Exit codes: 0 success, 1 numerical failure / failed verdict / failed sweep
// cell, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phaseprobe/phaseprobe.hpp"

namespace pp = phaseprobe;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::size_t threads = 1;
  bool deterministic = false;
  bool full = false;
};

struct ProblemFlags {
  std::size_t d = 64;
  std::optional<std::size_t> n;
  double ratio = 2.0;
  std::string wstar = "canonical";

  std::size_t sample_count() const {
    if (n) return *n;
    const auto v = static_cast<long long>(std::llround(ratio * static_cast<double>(d)));
    if (v < 1) throw pp::ParameterError("ratio * d must round to at least one sample");
    return static_cast<std::size_t>(v);
  }

  pp::Instance make(std::uint64_t seed) const {
    const pp::WStarMode mode = wstar == "random" ? pp::WStarMode::random_unit : pp::WStarMode::canonical_e1;
    return pp::generate_instance(d, sample_count(), seed, mode);
  }
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& p) {
  cmd->add_option("--d", p.d, "Dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--n", p.n, "Sample count (overrides --ratio)")->check(CLI::PositiveNumber);
  cmd->add_option("--ratio", p.ratio, "Samples per dimension, n = round(ratio * d)")->check(CLI::PositiveNumber);
  cmd->add_option("--wstar", p.wstar, "Ground truth: canonical (e1) or random unit")
      ->check(CLI::IsMember({"canonical", "random"}));
}

pp::AdamConfig preset(const std::string& name) {
  if (name == "fig2") return pp::AdamConfig::fig2();
  if (name == "fig3") return pp::AdamConfig::fig3();
  throw pp::ParameterError("unknown preset '" + name + "'");
}

Json vector_json(pp::ConstSpan v) { return Json(std::vector<double>(v.begin(), v.end())); }

// Single results are flat objects; CSV renders them as a header plus one row.
std::string render(const Json& obj, const std::string& format) {
  if (format == "json") return obj.dump(2) + "\n";
  std::string header, row;
  for (const auto& [key, value] : obj.items()) {
    if (value.is_array() || value.is_object()) continue;
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    if (value.is_number_float()) {
      row += pp::format_real(value.get<double>());
    } else if (value.is_string()) {
      row += value.get<std::string>();
    } else {
      row += value.dump();
    }
  }
  return header + "\n" + row + "\n";
}

void write_output(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    pp::write_file_atomic(g.out, text);
  }
}

std::string trace_csv(const pp::Trace& tr, const char* value_name) {
  std::string text = std::string("step,") + value_name + ",distance\n";
  for (std::size_t k = 0; k < tr.values.size(); ++k) {
    text += std::to_string(k) + ',' + pp::format_real(tr.values[k]) + ',' +
            (k < tr.distances.size() ? pp::format_real(tr.distances[k]) : std::string("nan")) + '\n';
  }
  return text;
}

double wall(const Globals& g, double seconds) { return g.deterministic ? 0.0 : seconds; }

pp::Vector point_near(const pp::Instance& inst, double dist, std::uint64_t seed) {
  if (dist == 0.0) return pp::Vector(inst.w_star().begin(), inst.w_star().end());
  pp::Rng rng(seed);
  return pp::random_point_on_sphere(inst.w_star(), dist, rng);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landscape probes for quartic phase retrieval"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key = value file mirroring the flags (flags win)");

  Globals g;
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "Worker threads for sweeps")
      ->envname("PHASEPROBE_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic, "Byte-identical reruns: ordered rows, zeroed timings");
  app.add_flag("--full", g.full, "Include vectors in JSON output");

  // gen
  ProblemFlags gen_p;
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  add_problem_flags(gen, gen_p);

  // eval
  ProblemFlags eval_p;
  double eval_dist = 0.1;
  auto* eval = app.add_subcommand("eval", "Evaluate the landscape at a random point near w*");
  add_problem_flags(eval, eval_p);
  eval->add_option("--dist", eval_dist, "Distance of the point from w*")->check(CLI::NonNegativeNumber);

  // probes
  ProblemFlags probe_p;
  double probe_r = 0.1;
  std::string probe_preset;
  auto* probe_q = app.add_subcommand("probe-q", "Minimize the Hessian quadratic form near w*");
  auto* probe_o = app.add_subcommand("probe-onepoint", "Minimize the one-point ratio near w*");
  for (auto* cmd : {probe_q, probe_o}) {
    add_problem_flags(cmd, probe_p);
    cmd->add_option("--r", probe_r, "Ball radius around w*");
    cmd->add_option("--preset", probe_preset, "Optimizer schedule (fig2 or fig3)")
        ->check(CLI::IsMember({"fig2", "fig3"}));
  }

  // certificate
  ProblemFlags cert_p;
  std::string cert_kind = "hessian-ball";
  double cert_alpha = 1.0, cert_beta = 0.5;
  auto* cert = app.add_subcommand("certificate", "Closed-form adversarial point");
  add_problem_flags(cert, cert_p);
  cert->add_option("--kind", cert_kind, "hessian-ball, hessian-fixed or onepoint-ball")
      ->check(CLI::IsMember({"hessian-ball", "hessian-fixed", "onepoint-ball"}));
  cert->add_option("--alpha", cert_alpha, "hessian-fixed: w = alpha w* + beta w_perp");
  cert->add_option("--beta", cert_beta, "hessian-fixed: perpendicular weight");

  // annulus-check
  ProblemFlags ann_p;
  double ann_lo = 0.15, ann_hi = 0.3;
  std::size_t ann_points = 500;
  bool ann_population = false;
  auto* ann = app.add_subcommand("annulus-check", "Minimum one-point ratio over random annulus points");
  add_problem_flags(ann, ann_p);
  ann->add_option("--r-lo", ann_lo, "Inner radius");
  ann->add_option("--r-hi", ann_hi, "Outer radius");
  ann->add_option("--points", ann_points, "Number of sampled points")->check(CLI::PositiveNumber);
  ann->add_flag("--population", ann_population, "Use the population ratio instead of the samples");

  // eig-min
  ProblemFlags eig_p;
  std::string eig_method = "lanczos";
  double eig_dist = 0.0, eig_tol = 1e-8;
  std::size_t eig_iters = 1000;
  auto* eig = app.add_subcommand("eig-min", "Smallest Hessian eigenvalue");
  add_problem_flags(eig, eig_p);
  eig->add_option("--method", eig_method, "lanczos or dense")->check(CLI::IsMember({"lanczos", "dense"}));
  eig->add_option("--dist", eig_dist, "Distance of w from w* (0 evaluates at w*)")->check(CLI::NonNegativeNumber);
  eig->add_option("--max-iters", eig_iters, "Lanczos HVP budget");
  eig->add_option("--tol", eig_tol, "Residual tolerance");

  // gd
  ProblemFlags gd_p;
  double gd_eta = 0.1, gd_tol = 0.01, gd_init = 0.3;
  std::size_t gd_steps = 500;
  auto* gd = app.add_subcommand("gd", "Plain gradient descent from a point near w*");
  add_problem_flags(gd, gd_p);
  gd->add_option("--eta", gd_eta, "Step size");
  gd->add_option("--max-steps", gd_steps, "Step budget");
  gd->add_option("--dist-tol", gd_tol, "Stop once |w - w*| is at most this");
  gd->add_option("--init-distance", gd_init, "Initial distance from w*");

  // flow
  ProblemFlags flow_p;
  std::string flow_field = "empirical", flow_method = "rk4";
  double flow_dt = 1e-3, flow_T = 1.0, flow_init = 0.1;
  auto* flow = app.add_subcommand("flow", "Integrate gradient flow from a point near w*");
  add_problem_flags(flow, flow_p);
  flow->add_option("--field", flow_field, "empirical or population")
      ->check(CLI::IsMember({"empirical", "population"}));
  flow->add_option("--method", flow_method, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
  flow->add_option("--dt", flow_dt, "Time step");
  flow->add_option("--horizon", flow_T, "Integration horizon T");
  flow->add_option("--init-distance", flow_init, "Initial distance from w*");

  // addone-test
  std::string ao_test = "zj-marginal", ao_selector = "argmin-y", ao_kind = "hessian";
  std::size_t ao_n = 50, ao_d = 10, ao_trials = 5000;
  double ao_alpha = 1.0, ao_beta = 0.5, ao_t = 3.0, ao_kappa = 0.1;
  bool ao_control = false;
  auto* ao = app.add_subcommand("addone-test", "Monte Carlo checks of the add-one machinery");
  ao->add_option("--test", ao_test, "zj-marginal, addone, inner-product, extreme-value or quadratic-tail")
      ->check(CLI::IsMember({"zj-marginal", "addone", "inner-product", "extreme-value", "quadratic-tail"}));
  ao->add_option("--n", ao_n, "Number of samples")->check(CLI::PositiveNumber);
  ao->add_option("--d", ao_d, "Dimension")->check(CLI::PositiveNumber);
  ao->add_option("--trials", ao_trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  ao->add_option("--selector", ao_selector, "zj-marginal: argmin-y or argmax-y")
      ->check(CLI::IsMember({"argmin-y", "argmax-y"}));
  ao->add_option("--kind", ao_kind, "addone: hessian or onepoint")->check(CLI::IsMember({"hessian", "onepoint"}));
  ao->add_flag("--control", ao_control, "Run the deliberately broken variant");
  ao->add_option("--alpha", ao_alpha, "quadratic-tail: alpha");
  ao->add_option("--beta", ao_beta, "quadratic-tail: beta");
  ao->add_option("--t", ao_t, "quadratic-tail: threshold");
  ao->add_option("--kappa", ao_kappa, "quadratic-tail: slack on the lower form");

  // sweep
  pp::SweepConfig sw;
  std::string sw_metric = "q", sw_preset, sw_summary, sw_svg;
  std::optional<std::size_t> sw_n;
  auto* sweep = app.add_subcommand("sweep", "Seeded sweep over (d, n/d, seed)");
  sweep->add_option("--metric", sw_metric, "q, Q, cert_hessian, cert_onepoint, eig_min, annulus or gd")
      ->check(CLI::IsMember({"q", "Q", "cert_hessian", "cert_onepoint", "eig_min", "annulus", "gd"}));
  sweep->add_option("--d-grid", sw.d_grid, "Comma-separated dimensions")->delimiter(',')->required();
  sweep->add_option("--ratio", sw.ratios, "Comma-separated n/d ratios")->delimiter(',');
  sweep->add_option("--n", sw_n, "Fixed sample count (overrides --ratio)")->check(CLI::PositiveNumber);
  sweep->add_option("--r", sw.r, "Probe radius");
  sweep->add_option("--seeds", sw.seeds, "Seeds per cell");
  sweep->add_option("--preset", sw_preset, "Optimizer schedule (fig2 or fig3)")
      ->check(CLI::IsMember({"fig2", "fig3"}));
  sweep->add_option("--summary", sw_summary, "JSON summary path");
  sweep->add_option("--svg", sw_svg, "SVG chart path");
  sweep->add_option("--r-lo", sw.r_lo, "annulus: inner radius");
  sweep->add_option("--r-hi", sw.r_hi, "annulus: outer radius");
  sweep->add_option("--points", sw.points, "annulus: sampled points");
  sweep->add_option("--eta", sw.eta, "gd: step size");
  sweep->add_option("--max-steps", sw.max_steps, "gd: step budget");
  sweep->add_option("--dist-tol", sw.dist_tol, "gd: stopping distance");
  sweep->add_option("--init-distance", sw.init_distance, "gd: initial distance");
  sweep->add_option("--max-iters", sw.lanczos_iters, "eig_min: Lanczos HVP budget");
  sweep->add_option("--tol", sw.lanczos_tol, "eig_min: residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::uint64_t aux_seed = pp::mix_seed({g.seed, 1});

    if (*gen) {
      const pp::Instance inst = gen_p.make(g.seed);
      if (g.format == "csv") {
        std::string text = "y";
        for (std::size_t k = 0; k < inst.dim(); ++k) text += ",x" + std::to_string(k);
        text += '\n';
        for (std::size_t i = 0; i < inst.size(); ++i) {
          text += pp::format_real(pp::dot(inst.w_star(), inst.sample(i)));
          for (double v : inst.sample(i)) text += ',' + pp::format_real(v);
          text += '\n';
        }
        write_output(g, text);
      } else {
        Json j;
        j["d"] = inst.dim();
        j["n"] = inst.size();
        j["seed"] = g.seed;
        j["w_star"] = vector_json(inst.w_star());
        Json rows = Json::array();
        for (std::size_t i = 0; i < inst.size(); ++i) rows.push_back(vector_json(inst.sample(i)));
        j["samples"] = rows;
        write_output(g, j.dump() + "\n");
      }
      return 0;
    }

    if (*eval) {
      const pp::Instance inst = eval_p.make(g.seed);
      const pp::Vector w = point_near(inst, eval_dist, aux_seed);
      Json j;
      j["d"] = inst.dim();
      j["n"] = inst.size();
      j["seed"] = g.seed;
      j["distance"] = pp::distance(w, inst.w_star());
      j["loss"] = pp::loss(inst, w);
      j["pop_loss"] = pp::pop_loss(w, inst.w_star());
      j["grad_norm"] = pp::norm(pp::gradient(inst, w));
      j["pop_grad_norm"] = pp::norm(pp::pop_gradient(w, inst.w_star()));
      if (eval_dist > 0.0) {
        j["onepoint_ratio"] = pp::onepoint_ratio(inst, w);
        j["pop_onepoint_ratio"] = pp::pop_onepoint_ratio(w, inst.w_star());
      }
      const pp::LandscapePoint p = pp::decompose(w, inst.w_star());
      j["alpha"] = p.alpha;
      j["beta"] = p.beta;
      j["critical_point"] = std::string(pp::to_string(pp::classify_critical_point(w, inst.w_star())));
      if (g.full) j["w"] = vector_json(w);
      write_output(g, render(j, g.format));
      return 0;
    }

    if (*probe_q || *probe_o) {
      const bool is_q = static_cast<bool>(*probe_q);
      const pp::Instance inst = probe_p.make(g.seed);
      const pp::AdamConfig cfg = preset(probe_preset.empty() ? (is_q ? "fig2" : "fig3") : probe_preset);
      const pp::ProbeResult res =
          is_q ? pp::probe_q(inst, probe_r, cfg, aux_seed) : pp::probe_Q(inst, probe_r, cfg, aux_seed);
      Json j;
      j["metric"] = std::string(pp::to_string(res.metric));
      j["d"] = inst.dim();
      j["n"] = inst.size();
      j["r"] = res.r;
      j["seed"] = g.seed;
      j["value"] = res.final_value;
      j["initial_value"] = res.trace.values.front();
      j["last_value"] = res.trace.values.back();
      j["steps"] = res.trace.steps;
      j["distance"] = pp::distance(res.w, inst.w_star());
      j["wall_seconds"] = wall(g, res.trace.wall_seconds);
      if (g.full) {
        if (res.u) j["u"] = vector_json(*res.u);
        j["w"] = vector_json(res.w);
      }
      write_output(g, render(j, g.format));
      return 0;
    }

    if (*cert) {
      const pp::Instance inst = cert_p.make(g.seed);
      pp::Certificate c;
      if (cert_kind == "hessian-ball") {
        c = pp::certificate_hessian_ball(inst);
      } else if (cert_kind == "onepoint-ball") {
        c = pp::certificate_onepoint_ball(inst);
      } else {
        pp::Vector w = pp::scaled(cert_alpha, inst.w_star());
        if (cert_beta != 0.0) {
          pp::Rng rng(aux_seed);
          const pp::Vector perp = pp::random_direction_off_plane(inst.w_star(), inst.w_star(), rng);
          pp::axpy(cert_beta, perp, w);
        }
        c = pp::certificate_hessian_fixed(inst, w);
      }
      Json j;
      j["kind"] = std::string(pp::to_string(c.kind));
      j["d"] = inst.dim();
      j["n"] = inst.size();
      j["seed"] = g.seed;
      j["J"] = c.J;
      j["value"] = c.value;
      j["delta_norm"] = c.delta_norm;
      j["locality_radius"] = inst.size() >= 2 ? pp::locality_radius(static_cast<double>(inst.size()), inst.dim()) : 0.0;
      if (c.kind == pp::CertificateKind::hessian_fixed) j["z_J"] = c.z_J;
      if (g.full) {
        if (c.u) j["u"] = vector_json(*c.u);
        j["w"] = vector_json(c.w);
      }
      write_output(g, render(j, g.format));
      return 0;
    }

    if (*ann) {
      const pp::Instance inst = ann_p.make(g.seed);
      const pp::AnnulusResult res =
          ann_population ? pp::annulus_min_ratio_population(inst.w_star(), ann_lo, ann_hi, ann_points, aux_seed)
                         : pp::annulus_min_ratio(inst, ann_lo, ann_hi, ann_points, aux_seed);
      Json j;
      j["d"] = inst.dim();
      j["n"] = inst.size();
      j["seed"] = g.seed;
      j["field"] = ann_population ? "population" : "empirical";
      j["r_lo"] = ann_lo;
      j["r_hi"] = ann_hi;
      j["points"] = ann_points;
      j["min_ratio"] = res.min_ratio;
      j["argmin_distance"] = pp::distance(res.argmin_w, inst.w_star());
      if (g.full) j["argmin_w"] = vector_json(res.argmin_w);
      write_output(g, render(j, g.format));
      return 0;
    }

    if (*eig) {
      const pp::Instance inst = eig_p.make(g.seed);
      const pp::Vector w = point_near(inst, eig_dist, aux_seed);
      const pp::SpectralEstimate est = eig_method == "dense"
                                           ? pp::min_eigen_dense(inst, w)
                                           : pp::min_eigen_lanczos(inst, w, eig_iters, eig_tol, aux_seed);
      Json j;
      j["d"] = inst.dim();
      j["n"] = inst.size();
      j["seed"] = g.seed;
      j["method"] = eig_method;
      j["lambda_min"] = est.lambda_min;
      j["residual"] = est.residual;
      j["iterations"] = est.iterations;
      j["converged"] = est.converged;
      if (g.full) j["eigenvector"] = vector_json(est.eigenvector);
      write_output(g, render(j, g.format));
      return est.converged ? 0 : 1;
    }

    if (*gd) {
      const pp::Instance inst = gd_p.make(g.seed);
      const pp::Vector w0 = point_near(inst, gd_init, aux_seed);
      const pp::Trace tr = pp::gradient_descent(inst, w0, gd_eta, gd_steps, gd_tol);
      if (g.format == "csv") {
        write_output(g, trace_csv(tr, "loss"));
      } else {
        Json j;
        j["d"] = inst.dim();
        j["n"] = inst.size();
        j["seed"] = g.seed;
        j["steps"] = tr.steps;
        j["final_distance"] = tr.distances.back();
        j["final_loss"] = tr.values.back();
        j["reached"] = tr.distances.back() <= gd_tol;
        j["monotone_loss"] = tr.monotone_nonincreasing();
        j["wall_seconds"] = wall(g, tr.wall_seconds);
        write_output(g, j.dump(2) + "\n");
      }
      return 0;
    }

    if (*flow) {
      const pp::Instance inst = flow_p.make(g.seed);
      const pp::Vector w0 = point_near(inst, flow_init, aux_seed);
      const pp::GradientField field =
          flow_field == "population" ? pp::population_field(inst.w_star()) : pp::empirical_field(inst);
      const pp::FlowMethod method = flow_method == "euler" ? pp::FlowMethod::euler : pp::FlowMethod::rk4;
      const pp::Trace tr = pp::gradient_flow(field, w0, flow_dt, flow_T, method);
      if (g.format == "csv") {
        write_output(g, trace_csv(tr, "squared_distance"));
      } else {
        Json j;
        j["d"] = inst.dim();
        j["n"] = inst.size();
        j["seed"] = g.seed;
        j["field"] = flow_field;
        j["method"] = flow_method;
        j["steps"] = tr.steps;
        j["initial_distance"] = tr.distances.front();
        j["final_distance"] = tr.distances.back();
        j["wall_seconds"] = wall(g, tr.wall_seconds);
        write_output(g, j.dump(2) + "\n");
      }
      return 0;
    }

    if (*ao) {
      pp::TestReport r;
      if (ao_test == "zj-marginal") {
        const pp::IndexSelector sel = ao_control              ? pp::IndexSelector::argmax_z_norm
                                      : ao_selector == "argmax-y" ? pp::IndexSelector::argmax_y
                                                                  : pp::IndexSelector::argmin_y;
        r = pp::verify_zj_marginal(ao_n, ao_d, sel, ao_trials, g.seed);
      } else if (ao_test == "addone") {
        r = pp::verify_addone_identity(
            ao_n, ao_d, ao_trials, g.seed,
            ao_kind == "onepoint" ? pp::SummandKind::onepoint_form : pp::SummandKind::hessian_form,
            ao_control ? pp::AddOneVariant::no_swap : pp::AddOneVariant::swap);
      } else if (ao_test == "inner-product") {
        r = pp::verify_inner_product_independence(
            ao_n, ao_d, ao_trials, g.seed, ao_control ? pp::CoordinateLaw::rademacher : pp::CoordinateLaw::gaussian);
      } else if (ao_test == "extreme-value") {
        r = pp::extreme_value_mean(ao_n, ao_trials, g.seed);
      } else {
        r = pp::quadratic_form_tail(ao_alpha, ao_beta, ao_t, ao_trials, g.seed, ao_kappa);
      }
      Json j;
      j["test"] = ao_test;
      j["control"] = ao_control;
      j["statistic"] = r.statistic_name;
      j["observed"] = r.observed;
      j["reference_lo"] = r.reference_lo;
      j["reference_hi"] = r.reference_hi;
      j["n_trials"] = r.n_trials;
      j["seed"] = r.seed;
      j["pass"] = r.pass;
      for (const auto& [key, value] : r.details) j[key] = value;
      write_output(g, render(j, g.format));
      return r.pass ? 0 : 1;
    }

    if (*sweep) {
      sw.metric = pp::parse_metric(sw_metric);
      sw.base_seed = g.seed;
      sw.n_fixed = sw_n;
      if (!sw_preset.empty()) sw.adam = preset(sw_preset);
      sw.validate();
      const pp::SweepOptions opts{g.threads, g.deterministic};
      std::optional<pp::CsvWriter> writer;
      pp::RecordSink sink;
      if (!g.out.empty() && g.out != "-") {
        writer.emplace(g.out);
        sink = [&](const pp::SweepRecord& r) { writer->write(r); };
      } else {
        std::cout << pp::kCsvHeader << '\n' << std::flush;
        sink = [](const pp::SweepRecord& r) { std::cout << pp::csv_row(r) << std::flush; };
      }
      const pp::SweepOutcome out = pp::run_sweep(sw, sink, opts);
      if (!sw_summary.empty()) pp::emit_json_summary(sw_metric, out.aggregates, sw_summary);
      if (!sw_svg.empty()) pp::emit_svg(sw_metric, out.aggregates, sw_svg);
      if (out.failures > 0) {
        std::cerr << "phaseprobe: " << out.failures << " sweep cell(s) failed\n";
        return 1;
      }
      return 0;
    }
  } catch (const pp::ParameterError& e) {
    std::cerr << "phaseprobe: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "phaseprobe: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
