#pragma once

#include <optional>
#include <variant>
#include <vector>

namespace pcone {

/// A T-periodic scalar function of time: a constant, a truncated Fourier
/// series, or uniform samples with periodic linear interpolation.
class PeriodicCoefficient {
public:
    struct Constant {
        double value = 0.0;
    };
    /// c0 + sum_j cos[j] cos(2 pi (j+1) t / T) + sin[j] sin(2 pi (j+1) t / T)
    struct Fourier {
        double c0 = 0.0;
        std::vector<double> cos;
        std::vector<double> sin;
    };
    /// values[j] is the value at t_j = j T / values.size().
    struct Samples {
        std::vector<double> values;
    };
    using Form = std::variant<Constant, Fourier, Samples>;

    static PeriodicCoefficient constant(double period, double value);
    /// a(t) = k^2, the form with a closed-form Green's function when 0 < kT < pi.
    static PeriodicCoefficient constant_k2(double period, double k);
    static PeriodicCoefficient fourier(double period, double c0, std::vector<double> cos_coeffs,
                                       std::vector<double> sin_coeffs);
    static PeriodicCoefficient samples(double period, std::vector<double> values);

    double operator()(double t) const;
    double period() const { return period_; }
    const Form& form() const { return form_; }

    /// Values at t_p = p T / n_grid, p = 0..n_grid-1.
    std::vector<double> sample(int n_grid) const;

    /// sqrt(value) for a positive constant, otherwise empty.
    std::optional<double> constant_k() const;
    bool is_constant() const { return std::holds_alternative<Constant>(form_); }

private:
    PeriodicCoefficient(double period, Form form);

    double period_;
    Form form_;
};

/// Composite trapezoid over one period on n_grid uniform nodes.
double periodic_integral(const std::vector<double>& samples, double period);

}  // namespace pcone
