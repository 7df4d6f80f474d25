#include "hyperweno/autodiff/gradcheck.hpp"

#include <cmath>
#include <numeric>

#include "hyperweno/error.hpp"

namespace hyperweno::ad {

GradCheckResult check_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                               const std::vector<double>& analytic, double h, double floor,
                               const std::vector<std::size_t>& indices) {
  if (analytic.size() != x.size()) throw ShapeError("check_gradient: gradient/parameter size mismatch");
  std::vector<std::size_t> idx = indices;
  if (idx.empty()) {
    idx.resize(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  }
  GradCheckResult r;
  r.numeric.assign(x.size(), 0.0);
  for (std::size_t i : idx) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    const double num = (fp - fm) / (2.0 * h);
    r.numeric[i] = num;
    const double a = analytic[i];
    const double scale = std::max(std::abs(a), std::abs(num));
    double err;
    if (scale > floor) {
      err = std::abs(a - num) / scale;
      ++r.n_checked;
    } else {
      err = std::abs(a - num) < floor ? 0.0 : 1.0;
    }
    if (!(err <= r.max_rel_error)) {
      r.max_rel_error = err;
      r.worst_index = i;
    }
  }
  return r;
}

}  // namespace hyperweno::ad
