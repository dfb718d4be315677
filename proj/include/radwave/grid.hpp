#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "radwave/errors.hpp"

namespace radwave {

/// Uniform radial mesh r_j = j * dr, j = 0..M, standing in for a radially
/// symmetric R^N (N = 2, 3).
class RadialGrid {
public:
    RadialGrid(int dim, double r_max, std::size_t num_cells);

    int dim() const noexcept { return dim_; }
    double r_max() const noexcept { return r_max_; }
    std::size_t num_cells() const noexcept { return num_cells_; }
    std::size_t num_nodes() const noexcept { return num_cells_ + 1; }
    double spacing() const noexcept { return spacing_; }
    double node(std::size_t j) const noexcept {
        return j == num_cells_ ? r_max_ : static_cast<double>(j) * spacing_;
    }
    std::vector<double> nodes() const;

    /// Surface measure of the unit sphere S^{N-1}: 2pi (N=2), 4pi (N=3).
    double sphere_area() const noexcept;

    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

private:
    int dim_;
    double r_max_;
    std::size_t num_cells_;
    double spacing_;
};

RadialGrid build_grid(int dim, double r_max, std::size_t num_cells);

/// Samples of a radial function at every node of a grid.
class RadialField {
public:
    explicit RadialField(RadialGrid grid);  // zero field
    RadialField(RadialGrid grid, std::vector<double> values);

    template <class Profile>
    static RadialField sample(const RadialGrid& grid, Profile&& profile) {
        std::vector<double> v(grid.num_nodes());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = profile(grid.node(j));
        return RadialField(grid, std::move(v));
    }

    const RadialGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }
    double& operator[](std::size_t j) noexcept { return values_[j]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    RadialField& operator*=(double s);
    friend RadialField operator*(double s, RadialField f) { return f *= s; }
    friend RadialField operator-(const RadialField& a, const RadialField& b);
    friend RadialField operator+(const RadialField& a, const RadialField& b);

    double sup_abs() const noexcept;

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

/// omega_{N-1} * int_0^{r_max} transform(u(r)) r^{N-1+w} dr, composite trapezoid.
/// Throws NonFiniteError naming the first node where transform() is not finite.
double weighted_integral(const RadialField& field, double weight_exponent,
                         const std::function<double(double)>& transform);

/// Same integral for integrable singular weights, N-1+w > -1. The first cell
/// is integrated exactly against r^{N-1+w} with the integrand interpolated
/// linearly, so the r = 0 endpoint singularity never gets evaluated.
double singular_weighted_integral(const RadialField& field, double weight_exponent,
                                  const std::function<double(double)>& transform);

double l2_norm(const RadialField& field);
double grad_l2_norm(const RadialField& field);
double h1_norm(const RadialField& field);

/// (int |u|^p dx)^{1/p}, p >= 1.
double lp_norm(const RadialField& field, double p);

/// Centered differences inside, one-sided at r_max, zero at the origin.
std::vector<double> radial_gradient(const RadialField& field);

/// max_j r_j^exponent |u(r_j)|.
double weighted_sup(const RadialField& field, double exponent);

/// Largest node radius where |u| > threshold; 0 if there is none.
double support_radius(const RadialField& field, double threshold);

/// Default tolerance for quadrature-based comparisons.
inline double quadrature_tolerance(double dr, double scale) {
    return std::max(1e-6, 10.0 * dr * dr * std::abs(scale));
}

}  // namespace radwave
