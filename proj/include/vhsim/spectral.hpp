#pragma once

#include <cstddef>

#include "vhsim/grid.hpp"

namespace vhsim {

/// Principal eigenpair of T u = div(D grad u) + beta u with u = 0 off the mask.
struct EigenResult {
    double lambda1{0.0};       // 1/month
    Field eigenfunction;       // positive on the mask, unit discrete L2 norm
    std::size_t iterations{0};
    double residual{0.0};      // ||T u - lambda1 u||_2
};

struct EigenOptions {
    double tol{1e-8};  // on the extrapolated Rayleigh-quotient error, relative to max(1, |lambda1|)
    std::size_t max_iterations{2'000'000};
};

/// Shifted power iteration on T + s I with the Gershgorin shift
/// s = max_k (2 sum_faces D_f / h^2 - beta_k), which makes the shifted
/// matrix entrywise nonnegative and positive semidefinite; the iterates
/// therefore stay positive and converge to the principal eigenvector.
/// Throws ConvergenceError after max_iterations.
EigenResult principal_eigenvalue(const Grid& grid, const Field& D, const Field& beta, const Mask& domain,
                                 const EigenOptions& options = {});

/// Discrete version of max over ||u|| = 1 of int(-D |grad u|^2 + beta u^2),
/// evaluated for one u through face differences (u taken as 0 off the mask).
/// Throws std::invalid_argument for the zero function.
double rayleigh_quotient(const Grid& grid, const Field& u, const Field& D, const Field& beta, const Mask& domain);

/// sqrt(sum over faces touching the mask of (u_a - u_b)^2), u = 0 off the
/// mask: the discrete L2 norm of grad u.
double gradient_norm(const Grid& grid, const Field& u, const Mask& domain);

/// sqrt(sum over mask cells of u^2 h^2).
double l2_norm(const Grid& grid, const Field& u, const Mask& domain);

struct PersistenceVerdict {
    double lhs{0.0};  // int beta dx over the grid
    double rhs{0.0};  // pi^2 D_M / 2
    bool satisfied{false};  // lhs > rhs (strict)
};

PersistenceVerdict persistence_criterion(const Grid& grid, const Field& beta, double D_M);

}  // namespace vhsim
