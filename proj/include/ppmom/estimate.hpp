#pragma once

#include <cstdint>
#include <string>

namespace ppmom {

enum class Method {
  Slivnyak,
  Chaos,
  Theorem2,
  Theorem3,
  Series,
  Simulation,
  Importance,
};

std::string to_string(Method m);

// Every stochastic estimate in the library carries its value, a standard
// error, the sample sizes that produced it and the estimator path used.
struct MomentEstimate {
  double value = 0;
  double std_error = 0;
  long n_outer = 0;
  long n_inner = 0;
  Method method = Method::Slivnyak;
};

// |a - b| within k combined standard errors
bool agree_within(const MomentEstimate& a, const MomentEstimate& b, double k);

}  // namespace ppmom
