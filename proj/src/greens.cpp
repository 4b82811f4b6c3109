#include "pcone/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pcone/errors.hpp"

namespace pcone {

namespace {

constexpr double kPositivityRelTol = 1e-9;
constexpr double kResonanceTol = 1e-10;

void check_window(double k, double period) {
    if (!(k > 0.0) || !(period > 0.0) || !(k * period < std::numbers::pi)) {
        throw DomainError("closed-form Green's function needs 0 < kT < pi (k=" + std::to_string(k) +
                          ", T=" + std::to_string(period) + ")");
    }
}

double green_constant_unchecked(double k, double period, double t, double s) {
    const double d = std::abs(t - s);
    return (std::sin(k * d) + std::sin(k * (period - d))) / (2.0 * k * (1.0 - std::cos(k * period)));
}

using State = std::array<double, 2>;

}  // namespace

double green_constant(double k, double period, double t, double s) {
    check_window(k, period);
    if (t < 0.0 || t > period || s < 0.0 || s > period) {
        throw DomainError("green_constant: t and s must lie in [0, T]");
    }
    return green_constant_unchecked(k, period, t, s);
}

GreenBounds green_bounds_constant(double k, double period) {
    check_window(k, period);
    const double m = std::sin(k * period) / (2.0 * k * (1.0 - std::cos(k * period)));
    const double M = 1.0 / (2.0 * k * std::sin(k * period / 2.0));
    return {m, M};
}

double GreensTable::fine_value(int pf, int qf) const {
    const int nf = fine_size();
    pf = ((pf % nf) + nf) % nf;
    qf = ((qf % nf) + nf) % nf;
    const double hf = period_ / nf;
    if (closed_form_) return green_constant_unchecked(k_, period_, pf * hf, qf * hf);

    // c = (I - Phi(T))^{-1} v(s), v(s) = state at T of the causal response.
    const double p1s = phi1_[std::size_t(qf)];
    const double p2s = phi2_[std::size_t(qf)];
    const double v0 = p1s * phi2_T_ - phi1_T_ * p2s;
    const double v1 = p1s * dphi2_T_ - dphi1_T_ * p2s;
    const double c1 = inv_[0][0] * v0 + inv_[0][1] * v1;
    const double c2 = inv_[1][0] * v0 + inv_[1][1] * v1;
    const double p1t = phi1_[std::size_t(pf)];
    const double p2t = phi2_[std::size_t(pf)];
    double g = c1 * p1t + c2 * p2t;
    if (pf >= qf) g += p1s * p2t - p1t * p2s;
    return g;
}

double GreensTable::interpolate(double t, double s) const {
    const double h = step();
    auto locate = [&](double x, int& j, double& frac) {
        double pos = x / h;
        pos -= std::floor(pos / n_grid_) * n_grid_;
        j = int(std::floor(pos));
        frac = pos - j;
        j %= n_grid_;
    };
    int p = 0, q = 0;
    double ft = 0.0, fs = 0.0;
    locate(t, p, ft);
    locate(s, q, fs);
    const int p1 = (p + 1) % n_grid_;
    const int q1 = (q + 1) % n_grid_;
    return (1 - ft) * (1 - fs) * (*this)(p, q) + ft * (1 - fs) * (*this)(p1, q) + (1 - ft) * fs * (*this)(p, q1) +
           ft * fs * (*this)(p1, q1);
}

GreensTable build_green_table(const PeriodicCoefficient& a, int n_grid) {
    if (n_grid < 16 || n_grid % 2 != 0) {
        throw DomainError("Green table needs an even grid size >= 16, got " + std::to_string(n_grid));
    }
    GreensTable table;
    table.n_grid_ = n_grid;
    table.period_ = a.period();
    const double T = a.period();
    const auto N = std::size_t(n_grid);

    const auto k = a.constant_k();
    if (k && *k * T < std::numbers::pi) {
        table.closed_form_ = true;
        table.k_ = *k;
        table.resonance_margin_ = std::numeric_limits<double>::infinity();
    } else {
        const int nf = 4 * n_grid;
        const double hf = T / nf;
        auto rhs = [&](double t, const State& y) { return State{y[1], -a(t) * y[0]}; };
        auto integrate = [&](State y, std::vector<double>& pos) -> State {
            pos.assign(std::size_t(nf) + 1, 0.0);
            pos[0] = y[0];
            for (int j = 0; j < nf; ++j) {
                const double t = j * hf;
                const State k1 = rhs(t, y);
                const State k2 = rhs(t + hf / 2, {y[0] + hf / 2 * k1[0], y[1] + hf / 2 * k1[1]});
                const State k3 = rhs(t + hf / 2, {y[0] + hf / 2 * k2[0], y[1] + hf / 2 * k2[1]});
                const State k4 = rhs(t + hf, {y[0] + hf * k3[0], y[1] + hf * k3[1]});
                for (int c = 0; c < 2; ++c) y[c] += hf / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
                pos[std::size_t(j) + 1] = y[0];
            }
            return y;
        };
        const State end1 = integrate({1.0, 0.0}, table.phi1_);
        const State end2 = integrate({0.0, 1.0}, table.phi2_);
        table.phi1_T_ = end1[0];
        table.dphi1_T_ = end1[1];
        table.phi2_T_ = end2[0];
        table.dphi2_T_ = end2[1];

        // I - Phi(T), Phi columns are the two basis states.
        const double a00 = 1.0 - end1[0], a01 = -end2[0];
        const double a10 = -end1[1], a11 = 1.0 - end2[1];
        const double det = a00 * a11 - a01 * a10;
        const double phi_norm = std::hypot(std::hypot(end1[0], end1[1]), std::hypot(end2[0], end2[1]));
        table.resonance_margin_ = std::abs(det) / (1.0 + phi_norm);
        if (std::abs(det) < kResonanceTol * (1.0 + phi_norm)) {
            throw ResonanceError("periodic problem is resonant: |det(I - Phi(T))| = " + std::to_string(std::abs(det)));
        }
        table.inv_[0][0] = a11 / det;
        table.inv_[0][1] = -a01 / det;
        table.inv_[1][0] = -a10 / det;
        table.inv_[1][1] = a00 / det;
    }

    table.values_.resize(N * N);
    const double h = T / n_grid;
    for (int p = 0; p < n_grid; ++p) {
        for (int q = 0; q < n_grid; ++q) {
            table.values_[std::size_t(p) * N + std::size_t(q)] =
                table.closed_form_ ? green_constant_unchecked(table.k_, T, p * h, q * h)
                                   : table.fine_value(4 * p, 4 * q);
        }
    }
    const auto [lo, hi] = std::minmax_element(table.values_.begin(), table.values_.end());
    table.min_ = *lo;
    table.max_ = *hi;
    table.positive_ = verify_positivity(table).holds;
    return table;
}

PositivityReport verify_positivity(const GreensTable& table) {
    const int n = table.grid_size();
    const double h = table.step();
    PositivityReport report{std::numeric_limits<double>::infinity(), 0.0, 0.0, false};
    int pmin = 0, qmin = 0;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            if (table(p, q) < report.min_value) {
                report.min_value = table(p, q);
                pmin = p;
                qmin = q;
            }
        }
    }
    report.t_argmin = pmin * h;
    report.s_argmin = qmin * h;

    // Refine around the argmin on the 4x grid, one coarse cell each way.
    const double hf = table.period() / table.fine_size();
    for (int dp = -4; dp <= 4; ++dp) {
        for (int dq = -4; dq <= 4; ++dq) {
            const int pf = 4 * pmin + dp;
            const int qf = 4 * qmin + dq;
            const double v = table.fine_value(pf, qf);
            if (v < report.min_value) {
                const int nf = table.fine_size();
                report.min_value = v;
                report.t_argmin = (((pf % nf) + nf) % nf) * hf;
                report.s_argmin = (((qf % nf) + nf) % nf) * hf;
            }
        }
    }
    report.holds = report.min_value > kPositivityRelTol * std::abs(table.max());
    return report;
}

double diagonal_correction(Quadrature rule, double step) {
    return rule == Quadrature::CorrectedTrapezoid ? step * step / 12.0 : 0.0;
}

GridFunction solve_linear_periodic(const GreensTable& table, const PeriodicCoefficient& e, Quadrature rule) {
    const int n = table.grid_size();
    const double h = table.step();
    const auto forcing = e.sample(n);
    const double corr = diagonal_correction(rule, h);
    GridFunction x(1, n, table.period());
    for (int p = 0; p < n; ++p) {
        double sum = 0.0;
        for (int q = 0; q < n; ++q) sum += table(p, q) * forcing[std::size_t(q)];
        x(0, p) = h * sum + corr * forcing[std::size_t(p)];
    }
    return x;
}

}  // namespace pcone
