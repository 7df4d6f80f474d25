#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hyperweno::ad {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t n_checked = 0;  // entries above the magnitude floor
  std::vector<double> numeric;
};

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every i in
// `indices` (all when empty). Relative error |a - n| / max(|a|, |n|) is taken
// where max(|a|, |n|) > floor; below it the absolute error must be < floor and
// is reported as 0 when it is, 1 otherwise.
GradCheckResult check_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                               const std::vector<double>& analytic, double h = 1e-5, double floor = 1e-8,
                               const std::vector<std::size_t>& indices = {});

}  // namespace hyperweno::ad
