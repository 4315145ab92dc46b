#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vhsim {

struct Point {
    double x{0.0};
    double y{0.0};

    bool operator==(const Point&) const = default;
};

/// Treatment of the advective flux on the outer boundary. Diffusion is
/// always zero-flux there.
enum class BoundaryMode {
    zero_flux,  // closed walls, no advective flux through the boundary
    outflow,    // upwind outflow, zero-gradient inflow
};

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(const std::string& name);

/// Truncated rectangular domain [origin, origin + extent] in km.
struct DomainSpec {
    Point origin{0.0, 0.0};
    Point extent{150.0, 60.0};
    double cell_size{0.5};
    BoundaryMode boundary_mode{BoundaryMode::outflow};

    bool operator==(const DomainSpec&) const = default;
};

/// Circular host subregion. Ids are user-facing labels; positions in the
/// subregion list are what the solver indexes by.
struct SubregionSpec {
    int id{1};
    Point center{};
    double radius{5.0};

    bool operator==(const SubregionSpec&) const = default;
};

/// Uniform cell-centered Cartesian grid. Cell (i, j) has its center at
/// origin + ((i + 1/2) h, (j + 1/2) h); storage is row-major in x.
class Grid {
public:
    Grid() = default;
    Grid(Point origin, std::size_t nx, std::size_t ny, double h);

    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] std::size_t ny() const noexcept { return ny_; }
    [[nodiscard]] std::size_t size() const noexcept { return nx_ * ny_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double cell_area() const noexcept { return h_ * h_; }
    [[nodiscard]] Point origin() const noexcept { return origin_; }
    [[nodiscard]] double area() const noexcept { return cell_area() * static_cast<double>(size()); }

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
    [[nodiscard]] std::size_t col(std::size_t k) const noexcept { return k % nx_; }
    [[nodiscard]] std::size_t row(std::size_t k) const noexcept { return k / nx_; }

    [[nodiscard]] Point center(std::size_t i, std::size_t j) const noexcept {
        return {origin_.x + (static_cast<double>(i) + 0.5) * h_,
                origin_.y + (static_cast<double>(j) + 0.5) * h_};
    }
    [[nodiscard]] Point center(std::size_t k) const noexcept { return center(col(k), row(k)); }

    /// Neighbor of cell k in direction d (0:-x, 1:+x, 2:-y, 3:+y), if inside the grid.
    [[nodiscard]] std::optional<std::size_t> neighbor(std::size_t k, int d) const noexcept;

    [[nodiscard]] bool same_shape(const Grid& other) const noexcept {
        return nx_ == other.nx_ && ny_ == other.ny_ && h_ == other.h_;
    }

    bool operator==(const Grid&) const = default;

private:
    Point origin_{};
    std::size_t nx_{0};
    std::size_t ny_{0};
    double h_{1.0};
};

/// Scalar values on a Grid, one per cell, with a units label.
class Field {
public:
    Field() = default;
    Field(const Grid& grid, double value = 0.0, std::string units = {})
        : nx_(grid.nx()), ny_(grid.ny()), values_(grid.size(), value), units_(std::move(units)) {}

    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] std::size_t ny() const noexcept { return ny_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool matches(const Grid& grid) const noexcept {
        return nx_ == grid.nx() && ny_ == grid.ny();
    }

    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double& at(std::size_t i, std::size_t j) noexcept { return values_[j * nx_ + i]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept { return values_[j * nx_ + i]; }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] const std::string& units() const noexcept { return units_; }
    void set_units(std::string units) { units_ = std::move(units); }

    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;

    bool operator==(const Field&) const = default;

private:
    std::size_t nx_{0};
    std::size_t ny_{0};
    std::vector<double> values_;
    std::string units_;
};

/// Indicator of the grid cells belonging to one subregion. Keeps both the
/// dense flag array and the sorted list of member cell indices.
class Mask {
public:
    Mask() = default;
    Mask(const Grid& grid, std::vector<std::size_t> cells);

    [[nodiscard]] bool contains(std::size_t k) const noexcept { return flags_[k] != 0; }
    [[nodiscard]] std::span<const std::size_t> cells() const noexcept { return cells_; }
    [[nodiscard]] std::size_t count() const noexcept { return cells_.size(); }
    [[nodiscard]] bool empty() const noexcept { return cells_.empty(); }
    [[nodiscard]] std::size_t grid_size() const noexcept { return flags_.size(); }

    /// Position of grid cell k within cells(), or -1 when k is not a member.
    [[nodiscard]] std::ptrdiff_t local_index(std::size_t k) const noexcept { return local_[k]; }

    /// Mask-local neighbor table: for member m and direction d, the local
    /// index of the neighbor or -1 when the neighbor is outside the mask.
    [[nodiscard]] std::ptrdiff_t local_neighbor(std::size_t m, int d) const noexcept {
        return neighbors_[4 * m + static_cast<std::size_t>(d)];
    }

    bool operator==(const Mask& other) const { return flags_ == other.flags_; }

private:
    std::vector<std::uint8_t> flags_;
    std::vector<std::size_t> cells_;
    std::vector<std::ptrdiff_t> local_;
    std::vector<std::ptrdiff_t> neighbors_;
};

/// Throws ConfigError when the extent is not a positive integer multiple of
/// the cell size or when either axis has fewer than 4 cells.
Grid build_grid(const DomainSpec& spec);

/// Cells whose centers satisfy |center - sub.center| <= sub.radius.
Mask build_mask(const Grid& grid, const SubregionSpec& sub);

/// Cells whose centers lie in [lo, hi] (closed) or (lo, hi) (open).
Mask build_box_mask(const Grid& grid, Point lo, Point hi, bool closed);

/// Every cell of the grid.
Mask full_mask(const Grid& grid);

/// Checks containment (distance >= 2h from the outer boundary) and pairwise
/// positive separation of the disks, and that the resulting masks are
/// nonempty and disjoint. Throws ConfigError.
void validate_subregions(const DomainSpec& domain, std::span<const SubregionSpec> subs);

/// Midpoint quadrature sum_k f_k h^2 over the mask, or over every cell.
double integrate(const Grid& grid, const Field& field, const Mask* mask = nullptr);

/// Quadrature of mask-local values (values[m] lives on mask.cells()[m]).
double integrate_local(const Grid& grid, const Mask& mask, std::span<const double> values);

/// Scatters mask-local values onto a full-grid field; zero elsewhere.
Field expand(const Grid& grid, const Mask& mask, std::span<const double> values, std::string units = {});

/// Gathers the mask cells of a full-grid field.
std::vector<double> restrict_to(const Mask& mask, const Field& field);

}  // namespace vhsim
