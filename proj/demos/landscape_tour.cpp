// A short walk through the library: build an instance, check the local
// geometry around the ground truth and run one curvature probe.
//
//   landscape_tour [d] [n/d]

#include <cstdio>
#include <cstdlib>

#include "phaseprobe/phaseprobe.hpp"

namespace pp = phaseprobe;

int main(int argc, char** argv) {
  const std::size_t d = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
  const double ratio = argc > 2 ? std::strtod(argv[2], nullptr) : 20.0;
  const auto n = static_cast<std::size_t>(ratio * static_cast<double>(d));

  try {
    const pp::Instance inst = pp::generate_instance(d, n, pp::cell_seed(0, d, 0));
    std::printf("instance: d = %zu, n = %zu\n", d, n);
    std::printf("loss at w*: %g, at 0: %g\n", pp::loss(inst, inst.w_star()), pp::loss(inst, pp::Vector(d, 0.0)));

    const pp::SpectralEstimate eig = pp::min_eigen_lanczos(inst, inst.w_star());
    std::printf("lambda_min of the Hessian at w*: %.4f (%zu Lanczos steps, residual %.2e)\n", eig.lambda_min,
                eig.iterations, eig.residual);

    const pp::Certificate cert = pp::certificate_hessian_ball(inst);
    std::printf("Hessian certificate: sample %zu, value %.4f at distance %.4f\n", cert.J, cert.value,
                cert.delta_norm);

    const pp::ProbeResult q = pp::probe_q(inst, 0.1, pp::AdamConfig::fig2(), 1);
    std::printf("q probe (r = 0.1): %.4f after %zu Adam steps\n", q.final_value, q.trace.steps);

    pp::Rng rng(2);
    pp::Vector w0 = pp::random_point_on_sphere(inst.w_star(), 0.3, rng);
    const pp::Trace gd = pp::gradient_descent(inst, std::move(w0), 0.1, 500, 1e-3);
    std::printf("gradient descent from distance 0.3: distance %.2e after %zu steps\n", gd.distances.back(), gd.steps);
  } catch (const pp::Error& e) {
    std::fprintf(stderr, "landscape_tour: %s\n", e.what());
    return 1;
  }
  return 0;
}
