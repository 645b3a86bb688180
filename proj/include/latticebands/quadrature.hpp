#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace lb {

struct QuadRule {
  std::vector<double> x, w;
  std::vector<char> even;  // node belongs to the rule of step 2h
};

// tanh-sinh nodes on [a, b]; n is the total node count.  Nodes whose weight
// underflows are dropped.  Every second node of the rule forms the rule of
// step 2h, which gives an error estimate at no extra cost.
QuadRule tanh_sinh_rule(double a, double b, int n);

struct QuadResult {
  std::complex<double> value;
  double error = 0.0;
  int evaluations = 0;
};

// adaptive Gauss-Kronrod 7-15 with a global error target
QuadResult adaptive_gk(const std::function<std::complex<double>(double)>& f, double a, double b,
                       double abs_tol, int max_intervals = 2000);

}  // namespace lb
