#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcone {

/// n-component function sampled at t_p = p T / N, p = 0..N-1.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int n, int n_grid, double period, double fill = 0.0);

    int dimension() const { return n_; }
    int grid_size() const { return n_grid_; }
    double period() const { return period_; }
    double step() const { return period_ / n_grid_; }
    double time(int p) const { return p * period_ / n_grid_; }

    double& operator()(int i, int p) { return values_[index(i, p)]; }
    double operator()(int i, int p) const { return values_[index(i, p)]; }

    std::span<double> component(int i) { return {values_.data() + index(i, 0), std::size_t(n_grid_)}; }
    std::span<const double> component(int i) const {
        return {values_.data() + index(i, 0), std::size_t(n_grid_)};
    }
    /// The n-vector x(t_p), copied out.
    std::vector<double> at(int p) const;

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    /// Product sup norm: sum_i max_p |x_i(t_p)|.
    double norm() const;
    /// min_p sum_i x_i(t_p).
    double min_component_sum() const;
    /// min_{i,p} x_i(t_p).
    double min_value() const;
    bool finite() const;

private:
    std::size_t index(int i, int p) const { return std::size_t(i) * std::size_t(n_grid_) + std::size_t(p); }

    int n_ = 0;
    int n_grid_ = 0;
    double period_ = 0.0;
    std::vector<double> values_;
};

/// Product sup norm of a - b.
double distance(const GridFunction& a, const GridFunction& b);

}  // namespace pcone
