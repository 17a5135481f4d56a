#pragma once

// Direct transcriptions of the routing formulas, written without reference to
// the library code so the library can be checked against them.

#include <algorithm>
#include <cmath>
#include <utility>

namespace oracle {

struct CH {
  double c;
  double h;
};

inline CH ack_update(double c_t, double h_t, double c_ack, double h_ack, double lambda) {
  const double alpha = std::max(c_ack, 1.0 - c_t);
  return {(1.0 - lambda) * c_t + lambda * c_ack, (1.0 - alpha) * h_t + alpha * h_ack};
}

inline CH failure_update(double c_t, double h_t, double lambda) {
  return {(1.0 - lambda) * c_t, h_t};
}

inline double p_broadcast(double c_best, double eps) {
  return eps + (1.0 - eps) * (1.0 - c_best);
}

// Returns 1 for broadcast, 0 for unicast, -1 on an exact tie.
inline int reward1_argmax(double c_best, double eps) {
  const double r_bc = 1.0 - c_best * (1.0 - eps);
  const double r_uc = c_best * (1.0 - eps);
  if (r_bc > r_uc) return 1;
  if (r_uc > r_bc) return 0;
  return -1;
}

inline double logistic_gap(double z_unicast, double z_broadcast) {
  const double m = std::max(z_unicast, z_broadcast);
  const double eu = std::exp(z_unicast - m);
  const double eb = std::exp(z_broadcast - m);
  return eb / (eu + eb);
}

}  // namespace oracle
