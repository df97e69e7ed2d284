#pragma once

#include "errdens/error.hpp"

namespace errdens {

//! Composite Simpson rule with `panels` panels (panels must be even).
template<typename F>
double simpson(F&& f, double a, double b, int panels)
{
  require(panels >= 2 && panels % 2 == 0, ErrorCode::InvalidArgument,
          "simpson: panels must be a positive even count");
  const double h = (b - a) / panels;
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < panels; i += 2)
    odd += f(a + i * h);
  for (int i = 2; i < panels; i += 2)
    even += f(a + i * h);
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

} // namespace errdens
