#pragma once

#include <vector>

#include "celearn/common.hpp"

namespace celearn {

// max objective . x  subject to  le_rows x <= le_rhs, eq_rows x = eq_rhs,
// x >= 0. Rows are dense over the variables.
struct LinearProgram {
  int nvars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
};

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  int pivots = 0;
};

// Dense two-phase tableau simplex. Entering variable by Dantzig's rule (most
// negative reduced cost, lowest index on ties); leaving row by the
// lexicographic min-ratio rule, which cannot cycle even on fully degenerate
// polytopes and is deterministic. Throws Infeasible / Unbounded.
class SimplexSolver {
 public:
  LpResult solve(const LinearProgram& lp);

 private:
  // workspace reused across calls to keep per-step allocations off the hot path
  std::vector<double> tab_;
  std::vector<int> basis_;
};

}  // namespace celearn
