#pragma once

#include <functional>
#include <vector>

namespace snm {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
    bool converged = true;
};

// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-9, double abs_tol = 1e-14, int max_depth = 48);

// Integrate over consecutive panels [knots[0], knots[1]], ..., splitting the
// domain at points where the integrand is known to be non-smooth.
QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& knots,
                            double rel_tol = 1e-9, double abs_tol = 1e-14);

// Gauss-Legendre nodes and weights on (-1, 1).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

}  // namespace snm
