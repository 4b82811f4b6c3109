#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pcone/greens.hpp"
#include "pcone/grid_function.hpp"
#include "pcone/problem.hpp"

namespace pcone {

/// Constants of the cone K = {x >= 0 : min_t sum_i x_i(t) >= sigma |x|}.
struct ConeConstants {
    std::vector<double> m;        ///< min G_i over the grid
    std::vector<double> M;        ///< max G_i over the grid
    std::vector<double> sigma_i;  ///< m_i / M_i
    double sigma = 0.0;           ///< min_i sigma_i
    double Gamma = 0.0;           ///< min_i m_i sigma int g_i / 2
    double C_hat = 0.0;           ///< sum_i M_i int g_i
    std::vector<double> int_g;
    std::vector<double> int_abs_e;
    std::optional<double> delta;
    std::optional<double> Delta;

    /// sum_i M_i int |e_i|
    double forcing_mass() const;
};

/// Throws PositivityAssumptionError if a table is not positive.
ConeConstants compute_constants(std::span<const GreensTable> tables, const Problem& problem);

struct ConeMembership {
    bool member;
    double margin;  ///< min_t sum_i x_i(t) - sigma |x|
};

/// Membership with absolute slack 1e-10 (1 + |x|).
ConeMembership cone_membership(const GridFunction& x, double sigma);

}  // namespace pcone
