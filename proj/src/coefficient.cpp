#include "pcone/coefficient.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pcone/errors.hpp"

namespace pcone {

PeriodicCoefficient::PeriodicCoefficient(double period, Form form) : period_(period), form_(std::move(form)) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw DomainError("period must be positive, got " + std::to_string(period));
    }
}

PeriodicCoefficient PeriodicCoefficient::constant(double period, double value) {
    return PeriodicCoefficient(period, Constant{value});
}

PeriodicCoefficient PeriodicCoefficient::constant_k2(double period, double k) {
    if (!(k > 0.0) || !(k * period < std::numbers::pi)) {
        throw DomainError("constant k^2 coefficient needs 0 < kT < pi");
    }
    return PeriodicCoefficient(period, Constant{k * k});
}

PeriodicCoefficient PeriodicCoefficient::fourier(double period, double c0, std::vector<double> cos_coeffs,
                                                 std::vector<double> sin_coeffs) {
    return PeriodicCoefficient(period, Fourier{c0, std::move(cos_coeffs), std::move(sin_coeffs)});
}

PeriodicCoefficient PeriodicCoefficient::samples(double period, std::vector<double> values) {
    if (values.size() < 4) {
        throw DomainError("sampled coefficient needs at least 4 values");
    }
    return PeriodicCoefficient(period, Samples{std::move(values)});
}

double PeriodicCoefficient::operator()(double t) const {
    return std::visit(
        [&](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Constant>) {
                return f.value;
            } else if constexpr (std::is_same_v<F, Fourier>) {
                const double w = 2.0 * std::numbers::pi / period_;
                double v = f.c0;
                for (std::size_t j = 0; j < f.cos.size(); ++j) v += f.cos[j] * std::cos(w * double(j + 1) * t);
                for (std::size_t j = 0; j < f.sin.size(); ++j) v += f.sin[j] * std::sin(w * double(j + 1) * t);
                return v;
            } else {
                const auto n = f.values.size();
                double pos = t / period_ * double(n);
                pos -= std::floor(pos / double(n)) * double(n);
                auto j = std::size_t(std::floor(pos));
                const double frac = pos - double(j);
                j %= n;
                return (1.0 - frac) * f.values[j] + frac * f.values[(j + 1) % n];
            }
        },
        form_);
}

std::vector<double> PeriodicCoefficient::sample(int n_grid) const {
    std::vector<double> out(static_cast<std::size_t>(n_grid));
    const double h = period_ / n_grid;
    for (int p = 0; p < n_grid; ++p) out[std::size_t(p)] = (*this)(p * h);
    return out;
}

std::optional<double> PeriodicCoefficient::constant_k() const {
    if (const auto* c = std::get_if<Constant>(&form_); c && c->value > 0.0) return std::sqrt(c->value);
    return std::nullopt;
}

double periodic_integral(const std::vector<double>& samples, double period) {
    double sum = 0.0;
    for (double v : samples) sum += v;
    return sum * period / double(samples.size());
}

}  // namespace pcone
