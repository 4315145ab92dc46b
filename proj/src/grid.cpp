#include "vhsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vhsim/errors.hpp"

namespace vhsim {

std::string to_string(BoundaryMode mode) {
    return mode == BoundaryMode::zero_flux ? "zero_flux" : "outflow";
}

BoundaryMode boundary_mode_from_string(const std::string& name) {
    if (name == "zero_flux") return BoundaryMode::zero_flux;
    if (name == "outflow") return BoundaryMode::outflow;
    throw ConfigError("unknown boundary_mode '" + name + "' (expected zero_flux or outflow)");
}

Grid::Grid(Point origin, std::size_t nx, std::size_t ny, double h)
    : origin_(origin), nx_(nx), ny_(ny), h_(h) {}

std::optional<std::size_t> Grid::neighbor(std::size_t k, int d) const noexcept {
    const std::size_t i = col(k);
    const std::size_t j = row(k);
    switch (d) {
        case 0: return i > 0 ? std::optional(k - 1) : std::nullopt;
        case 1: return i + 1 < nx_ ? std::optional(k + 1) : std::nullopt;
        case 2: return j > 0 ? std::optional(k - nx_) : std::nullopt;
        case 3: return j + 1 < ny_ ? std::optional(k + nx_) : std::nullopt;
        default: return std::nullopt;
    }
}

double Field::min() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double Field::max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

Mask::Mask(const Grid& grid, std::vector<std::size_t> cells)
    : flags_(grid.size(), 0), cells_(std::move(cells)), local_(grid.size(), -1) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    for (std::size_t m = 0; m < cells_.size(); ++m) {
        flags_[cells_[m]] = 1;
        local_[cells_[m]] = static_cast<std::ptrdiff_t>(m);
    }
    neighbors_.assign(4 * cells_.size(), -1);
    for (std::size_t m = 0; m < cells_.size(); ++m) {
        for (int d = 0; d < 4; ++d) {
            if (auto nb = grid.neighbor(cells_[m], d)) {
                neighbors_[4 * m + static_cast<std::size_t>(d)] = local_[*nb];
            }
        }
    }
}

namespace {

std::size_t cells_along(double extent, double h, const char* axis) {
    if (!(extent > 0.0) || !(h > 0.0)) {
        std::ostringstream os;
        os << "domain extent and cell size must be positive (" << axis << " extent " << extent
           << ", h " << h << ")";
        throw ConfigError(os.str());
    }
    const double ratio = extent / h;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << axis << " extent " << extent << " km is not an integer multiple of h = " << h << " km";
        throw ConfigError(os.str());
    }
    if (n < 4) {
        std::ostringstream os;
        os << axis << " axis has " << n << " cells; at least 4 are required";
        throw ConfigError(os.str());
    }
    return static_cast<std::size_t>(n);
}

}  // namespace

Grid build_grid(const DomainSpec& spec) {
    const std::size_t nx = cells_along(spec.extent.x, spec.cell_size, "x");
    const std::size_t ny = cells_along(spec.extent.y, spec.cell_size, "y");
    return Grid(spec.origin, nx, ny, spec.cell_size);
}

Mask build_mask(const Grid& grid, const SubregionSpec& sub) {
    std::vector<std::size_t> cells;
    const double r2 = sub.radius * sub.radius;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point c = grid.center(k);
        const double dx = c.x - sub.center.x;
        const double dy = c.y - sub.center.y;
        if (dx * dx + dy * dy <= r2) cells.push_back(k);
    }
    if (cells.empty()) {
        std::ostringstream os;
        os << "subregion " << sub.id << " (radius " << sub.radius << " km) contains no cell centers";
        throw ConfigError(os.str());
    }
    return Mask(grid, std::move(cells));
}

Mask build_box_mask(const Grid& grid, Point lo, Point hi, bool closed) {
    std::vector<std::size_t> cells;
    // cell centers are computed in floating point; a relative slack keeps
    // centers that sit on the box edge classified consistently
    const double eps = 1e-9 * grid.h();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point c = grid.center(k);
        const bool inside = closed
            ? (c.x >= lo.x - eps && c.x <= hi.x + eps && c.y >= lo.y - eps && c.y <= hi.y + eps)
            : (c.x > lo.x + eps && c.x < hi.x - eps && c.y > lo.y + eps && c.y < hi.y - eps);
        if (inside) cells.push_back(k);
    }
    if (cells.empty()) throw ConfigError("box mask contains no cell centers");
    return Mask(grid, std::move(cells));
}

Mask full_mask(const Grid& grid) {
    std::vector<std::size_t> cells(grid.size());
    for (std::size_t k = 0; k < cells.size(); ++k) cells[k] = k;
    return Mask(grid, std::move(cells));
}

void validate_subregions(const DomainSpec& domain, std::span<const SubregionSpec> subs) {
    const Grid grid = build_grid(domain);
    const double margin = 2.0 * domain.cell_size;
    const double x0 = domain.origin.x;
    const double y0 = domain.origin.y;
    const double x1 = x0 + domain.extent.x;
    const double y1 = y0 + domain.extent.y;
    std::vector<Mask> masks;
    for (const auto& s : subs) {
        if (!(s.radius > 0.0)) {
            throw ConfigError("subregion " + std::to_string(s.id) + ": radius must be positive");
        }
        if (s.center.x - s.radius < x0 + margin || s.center.x + s.radius > x1 - margin ||
            s.center.y - s.radius < y0 + margin || s.center.y + s.radius > y1 - margin) {
            throw ConfigError("subregion " + std::to_string(s.id) +
                              " must lie inside the domain at distance >= 2h from its boundary");
        }
        masks.push_back(build_mask(grid, s));
    }
    for (std::size_t a = 0; a < subs.size(); ++a) {
        for (std::size_t b = a + 1; b < subs.size(); ++b) {
            if (subs[a].id == subs[b].id) {
                throw ConfigError("duplicate subregion id " + std::to_string(subs[a].id));
            }
            const double dx = subs[a].center.x - subs[b].center.x;
            const double dy = subs[a].center.y - subs[b].center.y;
            const double gap = std::hypot(dx, dy) - subs[a].radius - subs[b].radius;
            if (!(gap > 0.0)) {
                throw ConfigError("subregions " + std::to_string(subs[a].id) + " and " +
                                  std::to_string(subs[b].id) + " overlap or touch");
            }
            for (std::size_t k : masks[a].cells()) {
                if (masks[b].contains(k)) {
                    throw ConfigError("masks of subregions " + std::to_string(subs[a].id) + " and " +
                                      std::to_string(subs[b].id) + " share a cell");
                }
            }
        }
    }
}

double integrate(const Grid& grid, const Field& field, const Mask* mask) {
    if (!field.matches(grid)) throw ConfigError("integrate: field does not match grid");
    double sum = 0.0;
    if (mask == nullptr) {
        for (double v : field.values()) sum += v;
    } else {
        if (mask->grid_size() != grid.size()) throw ConfigError("integrate: mask does not match grid");
        for (std::size_t k : mask->cells()) sum += field[k];
    }
    return sum * grid.cell_area();
}

double integrate_local(const Grid& grid, const Mask& mask, std::span<const double> values) {
    if (values.size() != mask.count()) throw ConfigError("integrate_local: size mismatch");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * grid.cell_area();
}

Field expand(const Grid& grid, const Mask& mask, std::span<const double> values, std::string units) {
    Field out(grid, 0.0, std::move(units));
    const auto cells = mask.cells();
    for (std::size_t m = 0; m < cells.size(); ++m) out[cells[m]] = values[m];
    return out;
}

std::vector<double> restrict_to(const Mask& mask, const Field& field) {
    std::vector<double> out;
    out.reserve(mask.count());
    for (std::size_t k : mask.cells()) out.push_back(field[k]);
    return out;
}

}  // namespace vhsim
