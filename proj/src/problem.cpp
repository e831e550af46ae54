#include "pinngen/problem.hpp"

namespace pinngen {

std::vector<BoundaryPoint> boundary_targets(const Interval& train_domain,
                                            const Interval& full_domain, int n_modes) {
  if (!full_domain.contains(train_domain)) {
    throw ContractViolation("boundary_targets: training domain not inside the full domain");
  }
  return {BoundaryPoint{train_domain.lo, analytic_u(train_domain.lo, n_modes)},
          BoundaryPoint{train_domain.hi, analytic_u(train_domain.hi, n_modes)}};
}

PoissonProblem make_problem(const Interval& train_domain, const Interval& full_domain) {
  PoissonProblem p;
  p.train_domain = train_domain;
  p.full_domain = full_domain;
  p.n_modes = kDefaultModes;
  p.boundary_points = boundary_targets(train_domain, full_domain, p.n_modes);
  return p;
}

}  // namespace pinngen
