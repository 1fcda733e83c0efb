// Prints the backscattering enhancement factor of the helicity-preserving
// channel against saturation, next to the closed-form curve, showing the
// collapse from the weak-drive value 2 toward the strong-drive limit 23/21.

#include <cstdio>

#include "cbs/analytic.hpp"
#include "cbs/average.hpp"

int main() {
  cbs::AverageConfig cfg;
  cfg.nodes_cos = 16;
  cfg.nodes_phi = 16;
  std::printf("%12s %14s %14s\n", "saturation", "alpha", "alpha(closed)");
  for (double s : {1e-3, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0, 1000.0}) {
    const double a = cbs::enhancement(cbs::Channel::HelicityPreserving, s, 0.0, cfg);
    std::printf("%12.4g %14.9f %14.9f\n", s, a, cbs::analytic::alpha_closed(s));
  }
  return 0;
}
