// Builds the hard-sphere and Maxwell collision operators at N = 8, checks that the trial
// Maxwellian is annihilated, then relaxes the BKW solution from t = 5.5 to t = 6.5 and
// prints the error against the closed form every few steps.

#include <boltzmann/boltzmann.hpp>

#include <cstdio>

int main()
{
  using namespace boltzmann;
  const int N = 8;
  auto transforms = std::make_shared<const TransformSet>(N);

  for (const char* name : {"maxwell", "hardsphere"}) {
    CollisionOperator op(transforms, CollisionKernel::parse(name), N);
    SpectralDensity m(N, 2.0, {0.0, 0.0, 0.0});
    std::fill(m.c.begin(), m.c.end(), 1.0);
    std::printf("%-10s |Q(M)|_inf = %.2e   storage = %.2f MB\n", name, max_abs(op.evaluate(m)),
                op.storage_doubles() * 8e-6);
  }

  auto cfg = bkw_config(N);
  cfg.t_end = 6.5;
  std::printf("\n%6s %12s %12s %12s\n", "t", "L2 error", "Linf error", "energy");
  run_experiment(cfg, default_thread_count(), [&](const StepRecord& r) {
    const long step = std::lround((r.moments.t - cfg.t0) / cfg.dt);
    if (step % 2 == 0)
      std::printf("%6.2f %12.4e %12.4e %12.9f\n", r.moments.t, r.errors->L2, r.errors->Linf, r.moments.E);
  });
  return 0;
}
