#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcone/certify.hpp"
#include "pcone/cone.hpp"
#include "pcone/operator.hpp"

namespace pcone {

struct SolveOptions {
    double damping = 0.5;  ///< Picard relaxation omega in (0, 1]
    int max_picard = 200;
    double picard_tol = 1e-6;  ///< hand-off residual to Newton
    double newton_tol = 1e-10;  ///< scaled by max(1, |x|)
    int max_newton = 30;
    /// Accepted solutions must satisfy the finite-difference ODE to this level.
    double max_ode_residual = 1e-6;
    /// Solutions whose norms differ by less than this (relative) are the same.
    double dedupe_rel = 1e-6;
    /// When the D2 residual exceeds max_ode_residual, re-solve on the doubled
    /// grid and accept if the residual falls at order >= min_ode_order.
    bool refine_ode_check = false;
    double min_ode_order = 1.9;

    void validate() const;
};

struct SearchOptions {
    double rmin = 1e-3;
    double rmax = 1e3;
    int per_decade = 60;
    SolveOptions solve;
    int jobs = 1;
};

struct PicardResult {
    GridFunction solution;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

struct NewtonResult {
    GridFunction solution;
    int iterations = 0;
    std::vector<double> residuals;  ///< residual before each step, then final
};

/// A verified discrete fixed point with its diagnostics.
struct Solution {
    GridFunction x;
    double norm = 0.0;
    double fp_residual = 0.0;
    double ode_residual = 0.0;
    ConeMembership cone{false, 0.0};
    std::optional<std::size_t> annulus;  ///< seeding annulus, if any
    bool inside_annulus = false;
    std::optional<double> ode_order;  ///< set when accepted by the grid-doubling check
};

struct SolveReport {
    ExistenceReport existence;
    std::vector<Solution> solutions;  ///< ascending norm
    std::vector<std::string> notes;
};

/// Constant x_i = c with n c the geometric mean of the annulus radii.
GridFunction seed_from_annulus(const CertifiedAnnulus& annulus, const ConeConstants& constants,
                               const Problem& problem);

/// Damped iteration x <- (1 - omega) x + omega T x. omega is halved (at most
/// four times) whenever a step increases the residual. Throws DivergenceError
/// when the iterate blows up, reaches the singularity or turns negative, and
/// lets DomainError through when it leaves the positivity region.
PicardResult picard_solve(const NystromOperator& op, GridFunction x0, const SolveOptions& opts);

/// Newton on F(x) = x - T x from a point with residual <= 1e-3.
NewtonResult newton_refine(const NystromOperator& op, GridFunction x0, const SolveOptions& opts);

/// Newton with backtracking from an arbitrary point (no residual precondition).
NewtonResult newton_solve(const NystromOperator& op, GridFunction x0, const SolveOptions& opts, int max_iter);

/// Picard then Newton from `seed`, falling back to Newton from the raw seed.
/// Returns the solution only if it passes every acceptance check; otherwise
/// the reason is written to `note`.
std::optional<Solution> solve_from(const NystromOperator& op, const ConeConstants& constants,
                                   const GridFunction& seed, const SolveOptions& opts, std::string* note = nullptr);

/// Certify annuli, seed each one, solve and deduplicate.
/// Observed order of the D2 residual between x's grid and the doubled grid.
double ode_residual_order(const NystromOperator& op, const GridFunction& x, const SolveOptions& opts);

SolveReport find_solutions(const NystromOperator& op, const ConeConstants& constants,
                           const SearchOptions& search = {});

struct BranchRow {
    double lambda;
    int branch_id;
    double norm;
    double ode_residual;
    double cone_margin;
    std::optional<std::size_t> annulus;
};

struct BranchEvent {
    enum class Kind { Lost, Fold };
    Kind kind;
    double lambda_before;
    double lambda_after;
    std::vector<int> branches;
};

struct BranchTable {
    std::vector<double> lambdas;
    std::vector<BranchRow> rows;
    std::vector<BranchEvent> events;
    std::vector<std::string> notes;

    /// Rows at lambda, matched to 1e-12 relative.
    int branch_count(double lambda) const;
};

/// Geometric lambda sweep. Branches are carried by Newton warm starts; fresh
/// certified annuli may open new branches. Two branches lost together whose
/// norms were within 5% are reported as a fold.
BranchTable continue_lambda(const NystromOperator& op, const ConeConstants& constants, double lambda_lo,
                            double lambda_hi, int steps, const SearchOptions& search = {});

}  // namespace pcone
