#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "irgnm/error.hpp"

namespace irgnm {

/// Uniform partition of [lo, hi] with n nodes.
template <typename Scalar>
class BasicGrid1D
{
public:
    using scalar_t = Scalar;

    BasicGrid1D() = default;

    BasicGrid1D(Eigen::Index n, Scalar lo, Scalar hi)
        : n_(n), lo_(lo), hi_(hi)
    {
        if (n < 2) throw Error(ErrorKind::invalid_input, "grid needs at least 2 nodes");
        if (!(hi > lo)) throw Error(ErrorKind::invalid_input, "grid needs hi > lo");
    }

    Eigen::Index size() const { return n_; }
    Scalar lo() const { return lo_; }
    Scalar hi() const { return hi_; }
    Scalar spacing() const { return (hi_ - lo_) / Scalar(n_ - 1); }

    Scalar node(Eigen::Index i) const
    {
        // exact endpoints regardless of rounding in the spacing
        if (i == n_ - 1) return hi_;
        return lo_ + Scalar(i) * spacing();
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes() const
    {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n_);
        for (Eigen::Index i = 0; i < n_; ++i) x[i] = node(i);
        return x;
    }

    /// Trapezoid quadrature weights: h/2 at the ends, h inside.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights() const
    {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w =
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n_, spacing());
        w[0] *= Scalar(0.5);
        w[n_ - 1] *= Scalar(0.5);
        return w;
    }

    friend bool operator==(const BasicGrid1D& a, const BasicGrid1D& b)
    {
        return a.n_ == b.n_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    Eigen::Index n_ = 2;
    Scalar lo_ = 0;
    Scalar hi_ = 1;
};

/// Real function sampled at the nodes of a uniform grid.
template <typename Scalar>
class BasicGridFn
{
public:
    using scalar_t = Scalar;
    using grid_t = BasicGrid1D<Scalar>;
    using vec_t = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicGridFn() = default;

    explicit BasicGridFn(grid_t grid)
        : grid_(std::move(grid)), values_(vec_t::Zero(grid_.size()))
    {}

    BasicGridFn(grid_t grid, vec_t values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw Error(ErrorKind::invalid_input, "grid function length does not match grid");
        if (!values_.allFinite())
            throw Error(ErrorKind::numerical, "grid function has non-finite values");
    }

    static BasicGridFn constant(const grid_t& grid, Scalar c)
    {
        return BasicGridFn(grid, vec_t::Constant(grid.size(), c));
    }

    template <typename F>
    static BasicGridFn sample(const grid_t& grid, F&& f)
    {
        vec_t v(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = f(grid.node(i));
        return BasicGridFn(grid, std::move(v));
    }

    const grid_t& grid() const { return grid_; }
    const vec_t& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    Scalar operator[](Eigen::Index i) const { return values_[i]; }

    BasicGridFn with_values(vec_t v) const { return BasicGridFn(grid_, std::move(v)); }

private:
    grid_t grid_;
    vec_t values_;
};

/// Element of L2(u-grid) (+) R. The scalar carries the mean-constraint row.
template <typename Scalar>
struct BasicCodomainElem
{
    BasicGridFn<Scalar> ufun;
    Scalar scalar = 0;
};

using Grid1D = BasicGrid1D<double>;
using GridFn = BasicGridFn<double>;
using CodomainElem = BasicCodomainElem<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Grid1D make_grid(Eigen::Index n, double lo, double hi) { return Grid1D(n, lo, hi); }

/// Trapezoid rule for the weighted dot product of two node-value vectors.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar weighted_dot(const BasicGrid1D<Scalar>& grid,
                    const Eigen::MatrixBase<DerivedA>& a,
                    const Eigen::MatrixBase<DerivedB>& b)
{
    const Eigen::Index n = grid.size();
    Scalar inner = a.segment(1, n - 2).dot(b.segment(1, n - 2));
    Scalar ends = Scalar(0.5) * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    return grid.spacing() * (inner + ends);
}

template <typename Scalar>
Scalar inner_product(const BasicGridFn<Scalar>& f, const BasicGridFn<Scalar>& g)
{
    if (!(f.grid() == g.grid()))
        throw Error(ErrorKind::invalid_input, "inner_product: grid mismatch");
    return weighted_dot(f.grid(), f.values(), g.values());
}

template <typename Scalar>
Scalar l2_norm(const BasicGridFn<Scalar>& f)
{
    return std::sqrt(inner_product(f, f));
}

template <typename Scalar>
Scalar integrate(const BasicGridFn<Scalar>& f)
{
    return weighted_dot(f.grid(), f.values(), BasicGridFn<Scalar>::vec_t::Ones(f.size()));
}

/// Inner product on the codomain; `scalar_weight` multiplies the constraint row.
template <typename Scalar>
Scalar codomain_inner(const BasicCodomainElem<Scalar>& a,
                      const BasicCodomainElem<Scalar>& b,
                      Scalar scalar_weight = 1)
{
    return inner_product(a.ufun, b.ufun) + scalar_weight * a.scalar * b.scalar;
}

template <typename Scalar>
Scalar codomain_norm(const BasicCodomainElem<Scalar>& y, Scalar scalar_weight = 1)
{
    return std::sqrt(codomain_inner(y, y, scalar_weight));
}

/// What interpolation returns outside [lo, hi].
enum class Extension
{
    zero, // densities vanish off the tabulated window
    hold  // hold the end values, for cumulative functions
};

/// Piecewise-linear interpolation of node values at an arbitrary point.
template <typename Scalar, typename Derived>
Scalar interp_values(const BasicGrid1D<Scalar>& grid,
                     const Eigen::DenseBase<Derived>& values,
                     Scalar x,
                     Extension ext = Extension::zero)
{
    const Eigen::Index n = grid.size();
    if (!(x >= grid.lo())) return ext == Extension::zero ? Scalar(0) : values[0];
    if (!(x <= grid.hi())) return ext == Extension::zero ? Scalar(0) : values[n - 1];
    const Scalar s = (x - grid.lo()) / grid.spacing();
    Eigen::Index i = static_cast<Eigen::Index>(std::floor(s));
    if (i >= n - 1) i = n - 2;
    const Scalar t = s - Scalar(i);
    return (Scalar(1) - t) * values[i] + t * values[i + 1];
}

template <typename Scalar>
Scalar interp_eval(const BasicGridFn<Scalar>& f, Scalar x, Extension ext = Extension::zero)
{
    return interp_values(f.grid(), f.values(), x, ext);
}

/// Running trapezoid integral along a vector; first entry 0.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> cumtrapz_values(const BasicGrid1D<Scalar>& grid,
                                                         const Eigen::MatrixBase<Derived>& f)
{
    const Eigen::Index n = grid.size();
    const Scalar half_h = Scalar(0.5) * grid.spacing();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    out[0] = 0;
    for (Eigen::Index i = 1; i < n; ++i) out[i] = out[i - 1] + half_h * (f[i - 1] + f[i]);
    return out;
}

template <typename Scalar>
BasicGridFn<Scalar> cumtrapz(const BasicGridFn<Scalar>& f)
{
    return f.with_values(cumtrapz_values(f.grid(), f.values()));
}

// Vector-space helpers. Grids must match.
template <typename Scalar>
BasicGridFn<Scalar> operator+(const BasicGridFn<Scalar>& a, const BasicGridFn<Scalar>& b)
{
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::invalid_input, "grid mismatch");
    return a.with_values(a.values() + b.values());
}

template <typename Scalar>
BasicGridFn<Scalar> operator-(const BasicGridFn<Scalar>& a, const BasicGridFn<Scalar>& b)
{
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::invalid_input, "grid mismatch");
    return a.with_values(a.values() - b.values());
}

template <typename Scalar>
BasicGridFn<Scalar> operator*(Scalar s, const BasicGridFn<Scalar>& a)
{
    return a.with_values(s * a.values());
}

/// Write `x,value` CSV with a header and 17 significant digits.
void write_csv(std::ostream& os, const GridFn& f);
void write_csv(const std::string& path, const GridFn& f);
GridFn read_grid_fn_csv(const std::string& path);

} // namespace irgnm
