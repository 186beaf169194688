#pragma once

// Acceptance battery A1-A10. Each check reports PASS/FAIL at fixed
// tolerances together with the numbers it was decided on.

#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "freeze/model.hpp"
#include "freeze/pressure.hpp"

namespace freeze {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

struct AcceptanceOptions {
  // Convention whose limit constants A8 is decided on; the other one is
  // reported alongside.
  LimitConvention convention = LimitConvention::Corrected;
  double tie_tol = 1e-12;
  int threads = 0;
};

// Reference parameter sets used by the battery.
ModelParams z2_params();       // example with alpha_u = 0.1
ModelParams z3_params();       // theta 0.5, alpha {{1,2},{1.5,3}}, alpha_u 0.25
ModelParams z4_params();       // theta 0.75, alpha {{1,2},{2,3}}, alpha_u 2
ModelParams theta_branch_params();  // gamma attained by the theta branch only

// A valid random parameter draw: N in 2..5, p in 2..4.
ModelParams random_params(std::mt19937_64& rng);

// Largest integer beta (searching down from about 750/gamma) at which the
// solver returns a root.
double largest_solvable_beta(const ModelParams& params);

// One line per criterion: "A1 PASS <title> | <detail> (0.01 s)".
std::string format_result(const CriterionResult& r);

CriterionResult check_A1(const AcceptanceOptions& opts = {});
CriterionResult check_A2(const AcceptanceOptions& opts = {});
CriterionResult check_A3(const AcceptanceOptions& opts = {});
CriterionResult check_A4(const AcceptanceOptions& opts = {});
CriterionResult check_A5(const AcceptanceOptions& opts = {});
CriterionResult check_A6(const AcceptanceOptions& opts = {});
CriterionResult check_A7(const AcceptanceOptions& opts = {});
CriterionResult check_A8(const AcceptanceOptions& opts = {});
CriterionResult check_A9(const AcceptanceOptions& opts = {});
CriterionResult check_A10(const AcceptanceOptions& opts = {});

// Runs all criteria in order, writing each line to `out` as soon as it is
// decided. Returns the results.
std::vector<CriterionResult> run_acceptance(std::ostream& out, const AcceptanceOptions& opts = {});

}  // namespace freeze
