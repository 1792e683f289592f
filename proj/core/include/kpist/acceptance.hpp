#ifndef KPIST_ACCEPTANCE_HPP
#define KPIST_ACCEPTANCE_HPP

#include "kpist/kpsolver.hpp"

#include <iosfwd>

namespace kpist {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the validation battery on the reference configuration
// (ell = pi, Nx = 32, Ny = 256, Ly = 12, n_max = 3, u0 = 0.02 cos(x) e^{-y^2})
// and prints one pass/fail line per criterion to `log`.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

// Builtin potential family used by the reference configuration and the CLI.
Field cosine_gaussian_potential(const CylinderGrid& g, double amplitude);

} // namespace kpist

#endif
