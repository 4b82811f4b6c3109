#include "pcone/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "pcone/errors.hpp"

namespace pcone {

namespace {

constexpr double kClampTol = 1e-12;
constexpr double kBlowUp = 1e12;
constexpr double kMinRcond = 1e-14;

double scaled_tol(double tol, const GridFunction& x) { return tol * std::max(1.0, x.norm()); }

Eigen::MatrixXd jacobian(const NystromOperator& op, const GridFunction& x) {
    const int n = op.dimension();
    const int N = op.grid_size();
    const double lambda = op.problem().lambda;
    const auto& f = op.problem().f;
    const Eigen::Index dim = Eigen::Index(n) * N;
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim, dim);

    // T only sees x(t_q) through f(x(t_q)), so perturbing x_k(t_q) changes one
    // column of the quadrature sum per component.
    for (int q = 0; q < N; ++q) {
        auto point = x.at(q);
        const auto f0 = eval_f(f, point);
        for (int k = 0; k < n; ++k) {
            const double eps = 1e-6 * (1.0 + std::abs(point[std::size_t(k)]));
            auto shifted = point;
            shifted[std::size_t(k)] += eps;
            const auto f1 = eval_f(f, shifted);
            const Eigen::Index col = Eigen::Index(k) * N + q;
            for (int i = 0; i < n; ++i) {
                const double d = lambda * op.g_at(i, q) * (f1[std::size_t(i)] - f0[std::size_t(i)]) / eps;
                if (d == 0.0) continue;
                for (int p = 0; p < N; ++p) J(Eigen::Index(i) * N + p, col) -= d * op.weight(i, p, q);
            }
        }
    }
    return J;
}

struct Evaluated {
    GridFunction x;
    GridFunction tx;
    double residual;
};

Evaluated evaluate(const NystromOperator& op, GridFunction x) {
    GridFunction tx = op.apply(x);
    const double r = distance(x, tx);
    return {std::move(x), std::move(tx), r};
}

}  // namespace

void SolveOptions::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
    if (!(newton_tol >= 1e-12)) throw DomainError("newton_tol must be >= 1e-12");
    if (max_picard < 0 || max_newton < 1) throw DomainError("iteration limits must be positive");
}

GridFunction seed_from_annulus(const CertifiedAnnulus& annulus, const ConeConstants&, const Problem& problem) {
    const double c = std::sqrt(annulus.r_in * annulus.r_out) / problem.n;
    return GridFunction(problem.n, problem.n_grid, problem.period, c);
}

PicardResult picard_solve(const NystromOperator& op, GridFunction x0, const SolveOptions& opts) {
    opts.validate();
    const double start_norm = x0.norm();
    double omega = opts.damping;
    int halvings = 0;

    auto guarded = [&](GridFunction x) -> Evaluated {
        try {
            return evaluate(op, std::move(x));
        } catch (const SingularityError& err) {
            throw DivergenceError(std::string("Picard iterate reached the singularity: ") + err.what());
        }
    };

    Evaluated cur = guarded(std::move(x0));
    PicardResult result;
    int it = 0;
    while (it < opts.max_picard && cur.residual > opts.picard_tol) {
        ++it;
        GridFunction next = cur.x;
        auto& v = next.data();
        const auto& tv = cur.tx.data();
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = (1.0 - omega) * v[j] + omega * tv[j];
            if (v[j] < 0.0) {
                if (v[j] < -kClampTol) throw DivergenceError("Picard iterate left the nonnegative orthant");
                v[j] = 0.0;
            }
        }
        if (!next.finite() || next.norm() > kBlowUp * (1.0 + start_norm)) {
            throw DivergenceError("Picard iterate norm diverged");
        }
        Evaluated trial = guarded(std::move(next));
        if (trial.residual > cur.residual && halvings < 4) {
            omega *= 0.5;
            ++halvings;
            continue;
        }
        cur = std::move(trial);
    }
    result.iterations = it;
    result.converged = cur.residual <= opts.picard_tol;
    result.residual = cur.residual;
    result.solution = std::move(cur.x);
    return result;
}

NewtonResult newton_solve(const NystromOperator& op, GridFunction x0, const SolveOptions& opts, int max_iter) {
    opts.validate();
    Evaluated cur = evaluate(op, std::move(x0));
    NewtonResult result;
    result.residuals.push_back(cur.residual);
    int it = 0;
    while (cur.residual > scaled_tol(opts.newton_tol, cur.x)) {
        if (it >= max_iter) {
            std::ostringstream os;
            os << "Newton did not converge in " << max_iter << " steps (residual " << cur.residual << ")";
            throw NoConvergenceError(os.str());
        }
        ++it;
        const Eigen::MatrixXd J = jacobian(op, cur.x);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!(lu.rcond() > kMinRcond)) throw SingularJacobianError("Newton Jacobian is numerically singular");
        Eigen::VectorXd rhs(Eigen::Index(cur.x.data().size()));
        for (Eigen::Index j = 0; j < rhs.size(); ++j) {
            rhs(j) = cur.tx.data()[std::size_t(j)] - cur.x.data()[std::size_t(j)];
        }
        const Eigen::VectorXd step = lu.solve(rhs);

        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 12 && !accepted; ++ls, alpha *= 0.5) {
            GridFunction trial_x = cur.x;
            auto& v = trial_x.data();
            for (std::size_t j = 0; j < v.size(); ++j) v[j] += alpha * step(Eigen::Index(j));
            try {
                Evaluated trial = evaluate(op, std::move(trial_x));
                if (trial.residual < cur.residual) {
                    cur = std::move(trial);
                    accepted = true;
                }
            } catch (const SingularityError&) {
            } catch (const DomainError&) {
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "Newton line search stalled at residual " << cur.residual;
            throw NoConvergenceError(os.str());
        }
        result.residuals.push_back(cur.residual);
    }
    result.iterations = it;
    result.solution = std::move(cur.x);
    return result;
}

namespace {

// One more full Newton step past the tolerance. D2 multiplies grid noise by
// 4/h^2, so the ODE check wants the fixed point to rounding level.
GridFunction polish(const NystromOperator& op, GridFunction x) {
    try {
        Evaluated cur = evaluate(op, std::move(x));
        for (int k = 0; k < 2; ++k) {
            const Eigen::MatrixXd J = jacobian(op, cur.x);
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
            Eigen::VectorXd rhs(Eigen::Index(cur.x.data().size()));
            for (Eigen::Index j = 0; j < rhs.size(); ++j) {
                rhs(j) = cur.tx.data()[std::size_t(j)] - cur.x.data()[std::size_t(j)];
            }
            const Eigen::VectorXd step = lu.solve(rhs);
            GridFunction trial_x = cur.x;
            auto& v = trial_x.data();
            for (std::size_t j = 0; j < v.size(); ++j) v[j] += step(Eigen::Index(j));
            Evaluated trial = evaluate(op, std::move(trial_x));
            if (!(trial.residual < cur.residual)) break;
            cur = std::move(trial);
        }
        return std::move(cur.x);
    } catch (const Error&) {
        return x;
    }
}

}  // namespace

NewtonResult newton_refine(const NystromOperator& op, GridFunction x0, const SolveOptions& opts) {
    const double r0 = op.residual(x0);
    if (!(r0 <= 1e-3)) throw DomainError("newton_refine needs a starting residual <= 1e-3");
    return newton_solve(op, std::move(x0), opts, opts.max_newton);
}

std::optional<Solution> solve_from(const NystromOperator& op, const ConeConstants& constants,
                                   const GridFunction& seed, const SolveOptions& opts, std::string* note) {
    auto fail = [&](const std::string& why) -> std::optional<Solution> {
        if (note) *note = why;
        return std::nullopt;
    };

    std::optional<GridFunction> x;
    std::string picard_note;
    try {
        auto pic = picard_solve(op, seed, opts);
        if (pic.converged) {
            x = newton_refine(op, std::move(pic.solution), opts).solution;
        } else {
            picard_note = "Picard stalled";
        }
    } catch (const Error& err) {
        picard_note = err.what();
    }
    if (!x) {
        try {
            x = newton_solve(op, seed, opts, 2 * opts.max_newton).solution;
        } catch (const Error& err) {
            return fail(picard_note + "; Newton from seed failed: " + err.what());
        }
    }

    x = polish(op, std::move(*x));
    Solution sol;
    sol.norm = x->norm();
    try {
        sol.fp_residual = op.residual(*x);
        sol.ode_residual = ode_residual(op.problem(), *x);
    } catch (const Error& err) {
        return fail(std::string("converged point is outside the operator domain: ") + err.what());
    }
    sol.cone = cone_membership(*x, constants.sigma);
    std::ostringstream why;
    if (!(sol.fp_residual <= 100.0 * scaled_tol(opts.newton_tol, *x))) {
        why << "fixed-point residual " << sol.fp_residual << " too large";
    } else if (!(x->min_value() > 0.0)) {
        why << "converged point is not strictly positive";
    } else if (!(sol.ode_residual <= opts.max_ode_residual)) {
        if (opts.refine_ode_check) {
            try {
                sol.ode_order = ode_residual_order(op, *x, opts);
            } catch (const Error&) {
            }
        }
        if (!sol.ode_order || !(*sol.ode_order >= opts.min_ode_order)) {
            why << "ODE residual " << sol.ode_residual << " too large";
            if (sol.ode_order) why << " (order " << *sol.ode_order << " under grid doubling)";
        }
    } else if (!sol.cone.member) {
        why << "converged point is outside the cone (margin " << sol.cone.margin << ")";
    }
    if (!why.str().empty()) return fail(why.str());
    sol.x = std::move(*x);
    return sol;
}

double ode_residual_order(const NystromOperator& op, const GridFunction& x, const SolveOptions& opts) {
    Problem fine = op.problem();
    const int N = x.grid_size();
    fine.n_grid = 2 * N;
    const NystromOperator fine_op(fine, build_tables(fine), op.rule());
    // 4-point periodic interpolation to the midpoints
    GridFunction seed(fine.n, fine.n_grid, fine.period);
    for (int i = 0; i < fine.n; ++i) {
        for (int p = 0; p < N; ++p) {
            const auto at = [&](int q) { return x(i, (q % N + N) % N); };
            seed(i, 2 * p) = at(p);
            seed(i, 2 * p + 1) = (-at(p - 1) + 9.0 * at(p) + 9.0 * at(p + 1) - at(p + 2)) / 16.0;
        }
    }
    const auto refined = polish(fine_op, newton_solve(fine_op, std::move(seed), opts, opts.max_newton).solution);
    const double coarse = ode_residual(op.problem(), x);
    const double finer = ode_residual(fine, refined);
    if (!(finer > 0.0)) return std::numeric_limits<double>::infinity();
    return std::log2(coarse / finer);
}

namespace {

bool same_solution(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(a, b); }

void insert_unique(std::vector<Solution>& out, Solution sol, double rel) {
    for (const auto& existing : out) {
        if (same_solution(existing.norm, sol.norm, rel)) return;
    }
    out.push_back(std::move(sol));
}

}  // namespace

SolveReport find_solutions(const NystromOperator& op, const ConeConstants& constants, const SearchOptions& search) {
    SolveReport report;
    report.existence =
        existence_report(op.problem(), constants, log_radii(search.rmin, search.rmax, search.per_decade));
    const auto& annuli = report.existence.annuli;
    if (annuli.empty()) {
        report.notes.push_back(
            "no certified annulus on the radius grid; the certificates are sufficient conditions only, so this is "
            "not evidence that no solution exists");
        return report;
    }

    struct Attempt {
        std::optional<Solution> sol;
        std::string note;
    };
    auto attempt = [&](std::size_t k) {
        Attempt a;
        const auto seed = seed_from_annulus(annuli[k], constants, op.problem());
        a.sol = solve_from(op, constants, seed, search.solve, &a.note);
        if (a.sol) {
            a.sol->annulus = k;
            a.sol->inside_annulus = annuli[k].contains(a.sol->norm);
        }
        return a;
    };

    std::vector<Attempt> attempts(annuli.size());
    const std::size_t jobs = std::size_t(std::max(1, search.jobs));
    for (std::size_t start = 0; start < annuli.size(); start += jobs) {
        const std::size_t end = std::min(annuli.size(), start + jobs);
        if (jobs == 1) {
            attempts[start] = attempt(start);
            continue;
        }
        std::vector<std::future<Attempt>> pending;
        for (std::size_t k = start; k < end; ++k) pending.push_back(std::async(std::launch::async, attempt, k));
        for (std::size_t k = start; k < end; ++k) attempts[k] = pending[k - start].get();
    }

    for (std::size_t k = 0; k < attempts.size(); ++k) {
        if (!attempts[k].sol) {
            report.notes.push_back("annulus " + std::to_string(k) + " " + annuli[k].predicted() +
                                   ": solve failed: " + attempts[k].note);
            continue;
        }
        if (!attempts[k].sol->inside_annulus) {
            report.notes.push_back("annulus " + std::to_string(k) + ": solver converged outside the annulus");
        }
        insert_unique(report.solutions, std::move(*attempts[k].sol), search.solve.dedupe_rel);
    }
    std::sort(report.solutions.begin(), report.solutions.end(),
              [](const Solution& a, const Solution& b) { return a.norm < b.norm; });
    return report;
}

int BranchTable::branch_count(double lambda) const {
    return int(std::count_if(rows.begin(), rows.end(), [&](const BranchRow& r) {
        return std::abs(r.lambda - lambda) <= 1e-12 * lambda;
    }));
}

BranchTable continue_lambda(const NystromOperator& op, const ConeConstants& constants, double lambda_lo,
                            double lambda_hi, int steps, const SearchOptions& search) {
    constexpr int kFoldBisections = 30;
    BranchTable table;
    if (steps <= 0) return table;
    if (!(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo)) throw DomainError("sweep needs 0 < lambda_lo <= lambda_hi");

    for (int k = 0; k < steps; ++k) {
        const double t = steps == 1 ? 0.0 : double(k) / (steps - 1);
        table.lambdas.push_back(lambda_lo * std::pow(lambda_hi / lambda_lo, t));
    }

    struct Branch {
        int id;
        GridFunction x;
        double norm;
        std::optional<GridFunction> prev_x;  ///< previous point, for the predictor
        double prev_lambda = 0.0;
    };
    std::vector<Branch> live;
    int next_id = 0;
    double prev_lambda = 0.0;

    for (double lambda : table.lambdas) {
        const NystromOperator opk = op.with_lambda(lambda);
        std::vector<Branch> found;
        std::vector<Solution> found_solutions;
        std::vector<int> lost;

        for (const auto& br : live) {
            std::vector<GridFunction> starts;
            if (br.prev_x) {
                // log-linear secant in log lambda; stays positive
                const double s = std::log(lambda / prev_lambda) / std::log(prev_lambda / br.prev_lambda);
                GridFunction pred = br.x;
                auto& v = pred.data();
                const auto& old = br.prev_x->data();
                for (std::size_t j = 0; j < v.size(); ++j) {
                    if (v[j] > 0.0 && old[j] > 0.0) v[j] *= std::pow(v[j] / old[j], s);
                }
                if (pred.finite()) starts.push_back(std::move(pred));
            }
            starts.push_back(br.x);

            std::optional<Solution> sol;
            std::string note;
            for (const auto& start : starts) {
                try {
                    auto x = newton_solve(opk, start, search.solve, search.solve.max_newton).solution;
                    sol = solve_from(opk, constants, x, search.solve, &note);
                } catch (const Error& err) {
                    note = err.what();
                }
                if (sol) break;
            }
            // long steps: let damped Picard pull the warm start in first
            if (!sol) sol = solve_from(opk, constants, br.x, search.solve, &note);
            const bool duplicate =
                sol && std::any_of(found.begin(), found.end(), [&](const Branch& b) {
                    return same_solution(b.norm, sol->norm, search.solve.dedupe_rel);
                });
            if (!sol || duplicate) {
                lost.push_back(br.id);
                continue;
            }
            found.push_back({br.id, sol->x, sol->norm, br.x, prev_lambda});
            found_solutions.push_back(std::move(*sol));
        }

        const SolveReport fresh = find_solutions(opk, constants, search);
        for (const auto& sol : fresh.solutions) {
            const bool known = std::any_of(found.begin(), found.end(), [&](const Branch& b) {
                return same_solution(b.norm, sol.norm, search.solve.dedupe_rel);
            });
            if (known) continue;
            found.push_back({next_id++, sol.x, sol.norm, std::nullopt, 0.0});
            found_solutions.push_back(sol);
        }

        std::vector<std::size_t> order(found.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return found[a].norm < found[b].norm; });
        for (std::size_t j : order) {
            const auto& sol = found_solutions[j];
            std::optional<std::size_t> annulus;
            for (std::size_t a = 0; a < fresh.existence.annuli.size(); ++a) {
                if (fresh.existence.annuli[a].contains(sol.norm)) annulus = a;
            }
            table.rows.push_back({lambda, found[j].id, sol.norm, sol.ode_residual, sol.cone.margin, annulus});
        }

        if (!lost.empty()) {
            table.events.push_back({BranchEvent::Kind::Lost, prev_lambda, lambda, lost});
            if (lost.size() >= 2) {
                std::vector<Branch> pair;
                for (const auto& br : live) {
                    if (std::find(lost.begin(), lost.end(), br.id) != lost.end()) pair.push_back(br);
                }
                // grid steps are usually too coarse to see the norms meet, so
                // bisect the loss bracket while every lost branch still continues
                double lo_lambda = prev_lambda, hi_lambda = lambda;
                for (int it = 0; it < kFoldBisections; ++it) {
                    const double mid = std::sqrt(lo_lambda * hi_lambda);
                    const NystromOperator opm = op.with_lambda(mid);
                    std::vector<Branch> moved;
                    for (const auto& br : pair) {
                        try {
                            auto x = newton_solve(opm, br.x, search.solve, search.solve.max_newton).solution;
                            auto sol = solve_from(opm, constants, x, search.solve);
                            if (!sol) break;
                            const bool dup = std::any_of(moved.begin(), moved.end(), [&](const Branch& b) {
                                return same_solution(b.norm, sol->norm, search.solve.dedupe_rel);
                            });
                            if (dup) break;
                            moved.push_back({br.id, sol->x, sol->norm, std::nullopt, 0.0});
                        } catch (const Error&) {
                            break;
                        }
                    }
                    if (moved.size() == pair.size()) {
                        pair = std::move(moved);
                        lo_lambda = mid;
                    } else {
                        hi_lambda = mid;
                    }
                }
                double nlo = pair.front().norm, nhi = nlo;
                for (const auto& br : pair) {
                    nlo = std::min(nlo, br.norm);
                    nhi = std::max(nhi, br.norm);
                }
                if (nhi <= 1.05 * nlo) table.events.push_back({BranchEvent::Kind::Fold, lo_lambda, hi_lambda, lost});
            }
        }
        live = std::move(found);
        prev_lambda = lambda;
    }
    return table;
}

}  // namespace pcone
