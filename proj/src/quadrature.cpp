#include "snm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace snm {

namespace {

// QUADPACK G7/K15 abscissae and weights (positive half, node 0 last).
constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEstimate {
    double kronrod;
    double error;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodX[i]);
        fv[14 - i] = f(c + h * kKronrodX[i]);
    }
    fv[7] = f(c);
    double kres = 0.0;
    for (int i = 0; i < 7; ++i) kres += kKronrodW[i] * (fv[i] + fv[14 - i]);
    kres += kKronrodW[7] * fv[7];
    kres *= h;
    // Gauss nodes are Kronrod nodes 1, 3, 5, 7.
    double gres = 0.0;
    for (int i = 0; i < 3; ++i) gres += kGaussW[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    gres += kGaussW[3] * fv[7];
    gres *= h;
    const double diff = std::fabs(kres - gres);
    // QUADPACK error sharpening, scaled by the variation of f on the panel.
    const double fmean = kres / (b - a);
    double resasc = 0.0;
    for (int i = 0; i < 7; ++i)
        resasc += kKronrodW[i] * (std::fabs(fv[i] - fmean) + std::fabs(fv[14 - i] - fmean));
    resasc += kKronrodW[7] * std::fabs(fv[7] - fmean);
    resasc *= h;
    double err = diff;
    if (resasc > 0.0 && diff > 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * diff / resasc, 1.5));
    return {kres, err};
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace

// Globally adaptive: keep a heap of panels and always bisect the one with the
// largest error estimate, until the summed error meets the tolerance or the
// panel budget runs out.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth) {
    if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
    if (a == b) return {0.0, 0.0, true};
    const std::size_t max_panels = std::size_t{64} * static_cast<std::size_t>(max_depth);

    std::priority_queue<Panel> heap;
    const auto first = gk15(f, a, b);
    heap.push({a, b, first.kronrod, first.error});
    double value = first.kronrod;
    double error = first.error;
    std::size_t panels = 1;
    const auto tol = [&] { return std::max(abs_tol, rel_tol * std::fabs(value)); };
    while (error > tol() && panels < max_panels) {
        const Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(p.a < m && m < p.b)) {  // interval exhausted at machine precision
            heap.push({p.a, p.b, p.value, 0.0});
            error -= p.error;
            continue;
        }
        const auto left = gk15(f, p.a, m);
        const auto right = gk15(f, m, p.b);
        value += left.kronrod + right.kronrod - p.value;
        error += left.error + right.error - p.error;
        heap.push({p.a, m, left.kronrod, left.error});
        heap.push({m, p.b, right.kronrod, right.error});
        ++panels;
    }
    return {value, error, error <= tol()};
}

QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& knots,
                            double rel_tol, double abs_tol) {
    if (knots.size() < 2) throw std::invalid_argument("integrate_panels: need >= 2 knots");
    QuadResult out;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i + 1] <= knots[i]) continue;
        const auto r = integrate(f, knots[i], knots[i + 1], rel_tol, abs_tol);
        out.value += r.value;
        out.error += r.error;
        out.converged = out.converged && r.converged;
    }
    return out;
}

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        gl.nodes[i] = -x;
        gl.weights[i] = w;
        gl.nodes[n - 1 - i] = x;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
    return gl;
}

}  // namespace snm
