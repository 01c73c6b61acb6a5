#pragma once

// Uniform finite-difference grids on intervals and rectangles with homogeneous
// Dirichlet data, the five-point (three-point in 1-D) negative Laplacian, and
// the nodal quadrature that goes with it.
//
// Interior nodes are numbered lexicographically with the x index running
// fastest: node (i, j) has index i + nx * j, where i = 0..nx-1 corresponds to
// x = (i + 1) * hx. Boundary nodes are not stored; a Field is implicitly zero
// there.

#include <kms/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace kms {

struct DomainSpec {
    int dimension = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> cells{4, 4};

    friend bool operator==(const DomainSpec& lhs, const DomainSpec& rhs) {
        if (lhs.dimension != rhs.dimension) return false;
        for (int d = 0; d < lhs.dimension; ++d) {
            if (lhs.extent[d] != rhs.extent[d] || lhs.cells[d] != rhs.cells[d]) return false;
        }
        return true;
    }

    static DomainSpec interval(double length, int cells) {
        DomainSpec s;
        s.dimension = 1;
        s.extent = {length, 1.0};
        s.cells = {cells, 1};
        return s;
    }

    static DomainSpec rectangle(double lx, double ly, int cx, int cy) {
        DomainSpec s;
        s.dimension = 2;
        s.extent = {lx, ly};
        s.cells = {cx, cy};
        return s;
    }
};

/// Nodal values on the interior nodes of a Mesh.
class Field {
public:
    Field() = default;
    explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
    explicit Field(std::vector<double> values) : values_(std::move(values)) {}
    Field(std::initializer_list<double> values) : values_(values) {}

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] double* data() noexcept { return values_.data(); }
    [[nodiscard]] const double* data() const noexcept { return values_.data(); }

    [[nodiscard]] std::span<double> span() noexcept { return values_; }
    [[nodiscard]] std::span<const double> span() const noexcept { return values_; }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    Field& operator+=(const Field& other) {
        for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
        return *this;
    }
    Field& operator-=(const Field& other) {
        for (std::size_t i = 0; i < size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

    friend Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
    friend Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
    friend Field operator*(double s, Field f) { return f *= s; }
    friend Field operator*(Field f, double s) { return f *= s; }

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::vector<double> values_;
};

/// Immutable uniform tensor grid.
class Mesh {
public:
    explicit Mesh(const DomainSpec& spec) : spec_(spec) {
        if (spec.dimension != 1 && spec.dimension != 2) {
            throw InvalidArgument("build_mesh: dimension must be 1 or 2");
        }
        for (int d = 0; d < spec.dimension; ++d) {
            if (!(spec.extent[d] > 0.0) || !std::isfinite(spec.extent[d])) {
                throw InvalidArgument("build_mesh: extent must be strictly positive");
            }
            if (spec.cells[d] < 4) {
                throw InvalidArgument("build_mesh: at least 4 cells per axis are required");
            }
        }
        dim_ = spec.dimension;
        nx_ = spec.cells[0] - 1;
        ny_ = dim_ == 2 ? spec.cells[1] - 1 : 1;
        hx_ = spec.extent[0] / spec.cells[0];
        hy_ = dim_ == 2 ? spec.extent[1] / spec.cells[1] : 1.0;
        cell_volume_ = dim_ == 2 ? hx_ * hy_ : hx_;
        volume_ = dim_ == 2 ? spec.extent[0] * spec.extent[1] : spec.extent[0];
    }

    [[nodiscard]] const DomainSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int dimension() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    [[nodiscard]] int nx() const noexcept { return nx_; }
    [[nodiscard]] int ny() const noexcept { return ny_; }
    [[nodiscard]] double hx() const noexcept { return hx_; }
    [[nodiscard]] double hy() const noexcept { return hy_; }
    /// Largest grid spacing.
    [[nodiscard]] double h() const noexcept { return dim_ == 2 ? std::max(hx_, hy_) : hx_; }
    [[nodiscard]] double cell_volume() const noexcept { return cell_volume_; }
    [[nodiscard]] double volume() const noexcept { return volume_; }

    [[nodiscard]] std::size_t index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j;
    }

    [[nodiscard]] std::array<double, 2> coordinate(std::size_t node) const noexcept {
        const auto i = static_cast<int>(node % nx_);
        const auto j = static_cast<int>(node / nx_);
        return {(i + 1) * hx_, dim_ == 2 ? (j + 1) * hy_ : 0.0};
    }

    /// Samples fn(x) (1-D) or fn(x, y) (2-D) at the interior nodes.
    template <class Fn>
    [[nodiscard]] Field sample(Fn&& fn) const {
        Field out(size());
        for (std::size_t n = 0; n < size(); ++n) {
            const auto c = coordinate(n);
            if constexpr (std::is_invocable_v<Fn, double, double>) {
                out[n] = fn(c[0], c[1]);
            } else {
                out[n] = fn(c[0]);
            }
        }
        return out;
    }

    [[nodiscard]] Field zeros() const { return Field(size(), 0.0); }
    [[nodiscard]] Field constant(double v) const { return Field(size(), v); }

private:
    DomainSpec spec_;
    int dim_ = 1;
    int nx_ = 0;
    int ny_ = 1;
    double hx_ = 0.0;
    double hy_ = 1.0;
    double cell_volume_ = 0.0;
    double volume_ = 0.0;
};

inline Mesh build_mesh(const DomainSpec& spec) { return Mesh(spec); }

namespace detail {

inline void check_size(const Mesh& mesh, const Field& u, const char* where) {
    if (u.size() != mesh.size()) {
        throw InvalidArgument(std::string(where) + ": field size " + std::to_string(u.size()) +
                              " does not match mesh interior node count " +
                              std::to_string(mesh.size()));
    }
}

}  // namespace detail

/// out = -Δ_h u, boundary values taken as zero. `out` must already have mesh.size() entries.
inline void apply_neg_laplacian(const Mesh& mesh, std::span<const double> u, std::span<double> out) {
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    const double cx = 1.0 / (mesh.hx() * mesh.hx());
    if (mesh.dimension() == 1) {
        for (int i = 0; i < nx; ++i) {
            const double left = i > 0 ? u[i - 1] : 0.0;
            const double right = i + 1 < nx ? u[i + 1] : 0.0;
            out[i] = cx * (2.0 * u[i] - left - right);
        }
        return;
    }
    const double cy = 1.0 / (mesh.hy() * mesh.hy());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t n = mesh.index(i, j);
            const double left = i > 0 ? u[n - 1] : 0.0;
            const double right = i + 1 < nx ? u[n + 1] : 0.0;
            const double down = j > 0 ? u[n - nx] : 0.0;
            const double up = j + 1 < ny ? u[n + nx] : 0.0;
            out[n] = cx * (2.0 * u[n] - left - right) + cy * (2.0 * u[n] - down - up);
        }
    }
}

inline Field neg_laplacian(const Mesh& mesh, const Field& u) {
    detail::check_size(mesh, u, "neg_laplacian");
    Field out(mesh.size());
    apply_neg_laplacian(mesh, u.span(), out.span());
    return out;
}

/// Nodal quadrature Σ u_i^q ω.
inline double integrate_power(const Mesh& mesh, const Field& u, double q) {
    detail::check_size(mesh, u, "integrate_power");
    if (!(q >= 0.0)) throw InvalidArgument("integrate_power: exponent must be >= 0");
    const bool integer_power = q == std::floor(q);
    double sum = 0.0;
    for (double v : u) {
        if (v < 0.0 && !integer_power) {
            throw InvalidArgument("integrate_power: negative nodal value with non-integer exponent");
        }
        if (q == 1.0) {
            sum += v;
        } else if (q == 0.0) {
            sum += 1.0;
        } else {
            sum += std::pow(v, q);
        }
    }
    return sum * mesh.cell_volume();
}

inline double integrate(const Mesh& mesh, const Field& u) { return integrate_power(mesh, u, 1.0); }

/// Σ u_i v_i ω.
inline double inner_product(const Mesh& mesh, const Field& u, const Field& v) {
    detail::check_size(mesh, u, "inner_product");
    detail::check_size(mesh, v, "inner_product");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
    return sum * mesh.cell_volume();
}

/// Discrete Dirichlet energy uᵀ(-Δ_h u) ω ≈ ∫|∇u|².
inline double grad_norm_sq(const Mesh& mesh, const Field& u) {
    detail::check_size(mesh, u, "grad_norm_sq");
    return inner_product(mesh, u, neg_laplacian(mesh, u));
}

inline double sup_norm(const Field& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

inline double lp_norm(const Mesh& mesh, const Field& u, double r) {
    detail::check_size(mesh, u, "lp_norm");
    if (!(r > 0.0)) throw InvalidArgument("lp_norm: exponent must be > 0");
    Field abs_u(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) abs_u[i] = std::abs(u[i]);
    return std::pow(integrate_power(mesh, abs_u, r), 1.0 / r);
}

inline double min_value(const Field& u) {
    return u.empty() ? 0.0 : *std::min_element(u.begin(), u.end());
}

/// One row per interior node: coordinates then value. Full round-trip precision.
inline void write_field_csv(std::ostream& os, const Mesh& mesh, const Field& u,
                            const std::string& value_name = "u") {
    detail::check_size(mesh, u, "write_field_csv");
    os << (mesh.dimension() == 1 ? "x," : "x,y,") << value_name << '\n';
    os << std::setprecision(17);
    for (std::size_t n = 0; n < u.size(); ++n) {
        const auto c = mesh.coordinate(n);
        os << c[0] << ',';
        if (mesh.dimension() == 2) os << c[1] << ',';
        os << u[n] << '\n';
    }
}

inline void write_field_csv(const std::string& path, const Mesh& mesh, const Field& u,
                            const std::string& value_name = "u") {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_field_csv(os, mesh, u, value_name);
}

}  // namespace kms
