#include <chrono>
#include <cstdio>

#include "nlslab/linop.hpp"

using namespace nlslab;
using Clock = std::chrono::steady_clock;

static double secs(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int main() {
  auto t0 = Clock::now();
  double mu1 = mu1_of(7.0);
  auto t1 = Clock::now();
  std::printf("mu1(p=7) scaled-family = %.12f  (%.2f s)\n", mu1, secs(t0, t1));

  t0 = Clock::now();
  double mus = mu_by_shooting(7.0, 1.0);
  t1 = Clock::now();
  std::printf("mu1(p=7) shooting      = %.12f  (%.2f s)\n", mus, secs(t0, t1));
  std::printf("relative difference    = %.3e\n", std::abs(mu1 - mus) / mus);

  Grid g(24.0, 512);
  t0 = Clock::now();
  SpectralData sd = spectral_direct(7.0, 1.0, g, true);
  t1 = Clock::now();
  std::printf("direct solve N=512: mu = %.12f, lambda1 = %.6f, xi_res = %.2e, modes = %d (%.2f s)\n",
              sd.mu, sd.lambda1, sd.xi_residual, (int)sd.pc->lambda.size(), secs(t0, t1));

  Grid g1024(30.0, 1024);
  t0 = Clock::now();
  SpectralData sd2 = spectral_direct(7.0, 1.0, g1024, true);
  t1 = Clock::now();
  std::printf("direct solve N=1024: mu = %.12f (%.2f s)\n", sd2.mu, secs(t0, t1));
  return 0;
}
