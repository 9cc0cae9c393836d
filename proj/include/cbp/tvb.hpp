#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "cbp/errors.hpp"
#include "cbp/limiters.hpp"
#include "cbp/problem.hpp"

namespace cbp {

/// TVB-limited interface fluxes F[i] ~ f_{i+1/2} of the fourth-order compact scheme, built from the
/// Lax-Friedrichs splitting f = f+ + f-, f+-(u) = (f(u) +- alpha u)/2.
inline Field tvb_fluxes(std::span<const double> u, std::span<const double> ubar, const ScalarLaw& flux, double p,
                        double dx) {
  const std::size_t n = u.size();
  require_size("tvb_fluxes", n, ubar.size());
  const double al = flux.max_slope;
  Field fpu(n), fmu(n), fpb(n), fmb(n);
  for (std::size_t i = 0; i < n; ++i) {
    double fu = flux(u[i]), fb = flux(ubar[i]);
    fpu[i] = 0.5 * (fu + al * u[i]);
    fmu[i] = 0.5 * (fu - al * u[i]);
    fpb[i] = 0.5 * (fb + al * ubar[i]);
    fmb[i] = 0.5 * (fb - al * ubar[i]);
  }
  Field F(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n, ipp = (i + 2) % n;
    double dp = 0.5 * (fpu[i] + fpu[ip]) - fpb[i];
    double dm = fmb[ip] - 0.5 * (fmu[i] + fmu[ip]);
    std::array<double, 3> ap{dp, fpb[ip] - fpb[i], fpb[i] - fpb[im]};
    std::array<double, 3> am{dm, fmb[ip] - fmb[i], fmb[ipp] - fmb[ip]};
    F[i] = fpb[i] + modified_minmod(ap, p, dx) + fmb[ip] - modified_minmod(am, p, dx);
  }
  return F;
}

/// Mean update ubar - lambda (F_{i+1/2} - F_{i-1/2}) with TVB-limited fluxes.
inline Field tvb_euler_step(std::span<const double> u, std::span<const double> ubar, const ProblemSpec1D& problem,
                            double lambda, double p, const Bounds& /*bounds*/, double dx) {
  const double al = problem.flux.max_slope;
  if (lambda * al > 1.0 / 12.0 * (1.0 + 1e-12))
    throw CflViolation("TVB step needs lambda*max|f'| <= 1/12", al > 0 ? dx / (12.0 * al) : dx);
  Field F = tvb_fluxes(u, ubar, problem.flux, p, dx);
  const std::size_t n = u.size();
  Field out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = ubar[i] - lambda * (F[i] - F[(i + n - 1) % n]);
  return out;
}

}  // namespace cbp
