#include "vhsim/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vhsim/errors.hpp"

namespace vhsim {

namespace {

double face_diffusivity(const Field& D, std::size_t a, std::optional<std::size_t> b) {
    if (!b) return D[a];
    const double da = D[a];
    const double db = D[*b];
    return (da + db) > 0.0 ? 2.0 * da * db / (da + db) : 0.0;
}

/// Matrix-free Dirichlet operator restricted to the mask cells.
class DirichletOperator {
public:
    DirichletOperator(const Grid& grid, const Field& D, const Field& beta, const Mask& mask)
        : mask_(mask), coef_(4 * mask.count()), beta_(mask.count()) {
        const double inv_h2 = 1.0 / grid.cell_area();
        for (std::size_t m = 0; m < mask.count(); ++m) {
            const std::size_t k = mask.cells()[m];
            beta_[m] = beta[k];
            for (int d = 0; d < 4; ++d) {
                coef_[4 * m + static_cast<std::size_t>(d)] = face_diffusivity(D, k, grid.neighbor(k, d)) * inv_h2;
            }
        }
    }

    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        for (std::size_t m = 0; m < u.size(); ++m) {
            double acc = beta_[m] * u[m];
            for (int d = 0; d < 4; ++d) {
                const double c = coef_[4 * m + static_cast<std::size_t>(d)];
                const std::ptrdiff_t nb = mask_.local_neighbor(m, d);
                const double un = nb < 0 ? 0.0 : u[static_cast<std::size_t>(nb)];
                acc += c * (un - u[m]);
            }
            out[m] = acc;
        }
    }

    /// Gershgorin shift: T + s I is nonnegative with nonnegative spectrum.
    [[nodiscard]] double shift() const {
        double s = 0.0;
        for (std::size_t m = 0; m < beta_.size(); ++m) {
            double row = 0.0;
            for (int d = 0; d < 4; ++d) row += coef_[4 * m + static_cast<std::size_t>(d)];
            s = std::max(s, 2.0 * row - beta_[m]);
        }
        return s;
    }

private:
    const Mask& mask_;
    std::vector<double> coef_;
    std::vector<double> beta_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_inputs(const Grid& grid, const Field& D, const Field& beta, const Mask& mask) {
    if (!D.matches(grid) || !beta.matches(grid) || mask.grid_size() != grid.size()) {
        throw ConfigError("spectral: fields and mask must match the grid");
    }
    if (mask.empty()) throw ConfigError("spectral: empty domain mask");
    for (std::size_t k : mask.cells()) {
        if (!(D[k] > 0.0)) throw AssumptionViolation("A2", "D must be > 0 on the eigenvalue domain");
    }
}

}  // namespace

EigenResult principal_eigenvalue(const Grid& grid, const Field& D, const Field& beta, const Mask& domain,
                                 const EigenOptions& options) {
    check_inputs(grid, D, beta, domain);
    const DirichletOperator op(grid, D, beta, domain);
    const double shift = op.shift();
    const std::size_t n = domain.count();

    // start from the product of sines on the mask's bounding box
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (std::size_t k : domain.cells()) {
        const Point c = grid.center(k);
        x0 = std::min(x0, c.x);
        x1 = std::max(x1, c.x);
        y0 = std::min(y0, c.y);
        y1 = std::max(y1, c.y);
    }
    const double h = grid.h();
    x0 -= h;
    x1 += h;
    y0 -= h;
    y1 += h;
    std::vector<double> u(n), y(n);
    for (std::size_t m = 0; m < n; ++m) {
        const Point c = grid.center(domain.cells()[m]);
        u[m] = std::sin(std::numbers::pi * (c.x - x0) / (x1 - x0)) * std::sin(std::numbers::pi * (c.y - y0) / (y1 - y0));
    }
    double norm = std::sqrt(dot(u, u));
    for (double& v : u) v /= norm;

    EigenResult result;
    double lambda = 0.0;
    double prev_lambda = std::numeric_limits<double>::quiet_NaN();
    double prev_delta = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        op.apply(u, y);
        lambda = dot(u, y);  // u has unit Euclidean norm
        const double scale = std::max(1.0, std::abs(lambda));
        if (!std::isnan(prev_lambda)) {
            const double delta = std::abs(lambda - prev_lambda);
            if (delta <= 1e-15 * scale) {
                converged = true;
            } else if (!std::isnan(prev_delta) && prev_delta > 0.0) {
                // geometric tail estimate of the remaining error
                const double ratio = delta / prev_delta;
                if (ratio < 1.0 && delta <= options.tol * scale &&
                    delta * ratio / (1.0 - ratio) <= options.tol * scale) {
                    converged = true;
                }
            }
            prev_delta = delta;
        }
        prev_lambda = lambda;
        if (converged) break;
        for (std::size_t m = 0; m < n; ++m) y[m] += shift * u[m];
        norm = std::sqrt(dot(y, y));
        for (std::size_t m = 0; m < n; ++m) u[m] = y[m] / norm;
    }
    if (!converged) {
        throw ConvergenceError("principal eigenvalue did not converge in " + std::to_string(options.max_iterations) +
                               " iterations");
    }

    // residual in the discrete L2 norm of the h-normalized eigenfunction
    double res2 = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double r = y[m] - lambda * u[m];
        res2 += r * r;
    }
    result.lambda1 = lambda;
    result.iterations = it + 1;
    result.residual = std::sqrt(res2);  // both u and T u scale by 1/h under normalization; the ratio is unchanged
    result.eigenfunction = Field(grid, 0.0, "1/km");
    for (std::size_t m = 0; m < n; ++m) result.eigenfunction[domain.cells()[m]] = u[m] / h;
    return result;
}

namespace {

/// Visits every face touching the mask once: f(a_value, b_value, D_face).
template <typename F>
void for_each_face(const Grid& grid, const Field& u, const Field& D, const Mask& mask, F&& f) {
    for (std::size_t k : mask.cells()) {
        for (int d = 0; d < 4; ++d) {
            const auto nb = grid.neighbor(k, d);
            // interior faces between two mask cells are visited from the lower index only
            if (nb && mask.contains(*nb) && *nb < k) continue;
            const double ub = (nb && mask.contains(*nb)) ? u[*nb] : 0.0;
            f(u[k], ub, face_diffusivity(D, k, nb));
        }
    }
}

}  // namespace

double rayleigh_quotient(const Grid& grid, const Field& u, const Field& D, const Field& beta, const Mask& domain) {
    check_inputs(grid, D, beta, domain);
    if (!u.matches(grid)) throw ConfigError("rayleigh_quotient: field does not match grid");
    double mass = 0.0;
    double potential = 0.0;
    for (std::size_t k : domain.cells()) {
        mass += u[k] * u[k];
        potential += beta[k] * u[k] * u[k];
    }
    if (!(mass > 0.0)) throw std::invalid_argument("rayleigh_quotient: zero function on the domain");
    double dirichlet = 0.0;
    for_each_face(grid, u, D, domain, [&](double a, double b, double df) { dirichlet += df * (a - b) * (a - b); });
    // int D |grad u|^2 ~ sum_f D_f (du/h)^2 h^2 and int u^2 ~ sum u^2 h^2
    const double h2 = grid.cell_area();
    return (-dirichlet + h2 * potential) / (h2 * mass);
}

double gradient_norm(const Grid& grid, const Field& u, const Mask& domain) {
    if (!u.matches(grid)) throw ConfigError("gradient_norm: field does not match grid");
    const Field unit(grid, 1.0);
    double sum = 0.0;
    for_each_face(grid, u, unit, domain, [&](double a, double b, double) { sum += (a - b) * (a - b); });
    return std::sqrt(sum);
}

double l2_norm(const Grid& grid, const Field& u, const Mask& domain) {
    double sum = 0.0;
    for (std::size_t k : domain.cells()) sum += u[k] * u[k];
    return std::sqrt(sum * grid.cell_area());
}

PersistenceVerdict persistence_criterion(const Grid& grid, const Field& beta, double D_M) {
    PersistenceVerdict v;
    v.lhs = integrate(grid, beta);
    v.rhs = std::numbers::pi * std::numbers::pi * D_M / 2.0;
    v.satisfied = v.lhs > v.rhs;
    return v;
}

}  // namespace vhsim
