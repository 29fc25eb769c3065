#pragma once

// Closed-form frame potential of the Brownian circuit and its design-time
// diagnostic. All arithmetic is carried in the log domain; lgamma supplies
// the factorials, so NL up to ~1e6 is safe.

#include <vector>

#include "sykm/common.hpp"

namespace sykm {

struct FramePotentialInput {
  int m = 2;        // replica count >= 1
  double NL = 1.0;  // total Majorana count N*L
  double J = 1.0;
  double U = 0.0;
  int q = 4;
  double t = 0.0;   // time >= 0
};

// log F^{(m)}(t), evaluated as a max-shifted finite sum.
double log_frame_potential(const FramePotentialInput& inp);

// Smallest t with log F <= log(m!) + epsilon, found by bisection to 1e-9
// relative (F is monotone decreasing in t).
double design_time(FramePotentialInput inp, double epsilon);

}  // namespace sykm
