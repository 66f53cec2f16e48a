#include "gsmlayer/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gsml {

namespace {

// evaluation wrapper tracking count, budget, and the best-so-far trace
struct tracker {
    const objective_fn& f;
    const std::vector<double>& lo;
    const std::vector<double>& hi;
    int budget;
    int count = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    std::vector<double> history;

    double eval(std::vector<double> x) {
        for (std::size_t d = 0; d < x.size(); ++d)
            x[d] = std::clamp(x[d], lo[d], hi[d]);
        const double v = f(x);
        ++count;
        if (v < best) {
            best = v;
            best_x = x;
        }
        history.push_back(best);
        return v;
    }
    bool exhausted() const { return count >= budget; }
};

fit_result finish(const tracker& t, bool converged) {
    fit_result r;
    r.best = t.best_x;
    r.misfit = t.best;
    r.evaluations = t.count;
    r.converged = converged;
    r.history = t.history;
    return r;
}

fit_result nelder_mead_impl(tracker& t, std::vector<double> start, double tolerance) {
    const std::size_t dim = start.size();
    for (std::size_t d = 0; d < dim; ++d)
        start[d] = std::clamp(start[d], t.lo[d], t.hi[d]);

    // initial simplex: start plus one displaced vertex per dimension
    std::vector<std::vector<double>> xs(dim + 1, start);
    std::vector<double> fs(dim + 1);
    for (std::size_t d = 0; d < dim; ++d) {
        const double span = t.hi[d] - t.lo[d];
        double step = 0.1 * span;
        if (start[d] + step > t.hi[d]) step = -step;
        xs[d + 1][d] += step;
    }
    for (std::size_t v = 0; v <= dim; ++v) {
        if (t.exhausted()) return finish(t, false);
        fs[v] = t.eval(xs[v]);
    }

    std::vector<std::size_t> order(dim + 1);
    while (!t.exhausted()) {
        for (std::size_t v = 0; v <= dim; ++v) order[v] = v;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order[0], worst = order[dim];
        const std::size_t second_worst = order[dim - 1];

        // function values alone can tie exactly on symmetric objectives
        // (vertices on one level set), so require the simplex itself to have
        // collapsed before declaring convergence
        bool collapsed = true;
        for (std::size_t d = 0; d < dim && collapsed; ++d) {
            double span_min = xs[0][d], span_max = xs[0][d];
            for (std::size_t v = 1; v <= dim; ++v) {
                span_min = std::min(span_min, xs[v][d]);
                span_max = std::max(span_max, xs[v][d]);
            }
            const double scale =
                std::max(std::abs(xs[best][d]), t.hi[d] - t.lo[d]);
            if (span_max - span_min > tolerance * scale) collapsed = false;
        }
        if (collapsed && std::abs(fs[worst] - fs[best]) <=
                             tolerance * (std::abs(fs[best]) + tolerance))
            return finish(t, true);

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += xs[v][d] / dim;
        }
        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d)
                x[d] = centroid[d] + coef * (xs[worst][d] - centroid[d]);
            return x;
        };

        std::vector<double> xr = blend(-1.0);  // reflection
        const double fr = t.eval(xr);
        if (fr < fs[order[0]]) {
            if (t.exhausted()) break;
            std::vector<double> xe = blend(-2.0);  // expansion
            const double fe = t.eval(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            if (t.exhausted()) break;
            std::vector<double> xc = blend(0.5);  // contraction
            const double fc = t.eval(xc);
            if (fc < fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 0; v <= dim; ++v) {
                    if (v == best) continue;
                    for (std::size_t d = 0; d < dim; ++d)
                        xs[v][d] = xs[best][d] + 0.5 * (xs[v][d] - xs[best][d]);
                    if (t.exhausted()) return finish(t, false);
                    fs[v] = t.eval(xs[v]);
                }
            }
        }
    }
    return finish(t, false);
}

} // namespace

fit_result nelder_mead(const objective_fn& f, std::vector<double> start,
                       const std::vector<double>& lo, const std::vector<double>& hi,
                       int max_evaluations, double tolerance) {
    if (start.empty() || start.size() != lo.size() || lo.size() != hi.size())
        throw std::invalid_argument("nelder_mead: inconsistent parameter dimensions");
    for (std::size_t d = 0; d < lo.size(); ++d)
        if (!(lo[d] < hi[d]))
            throw std::invalid_argument("nelder_mead: bounds must be ordered");
    if (max_evaluations < static_cast<int>(start.size()) + 1)
        throw std::invalid_argument("nelder_mead: budget below simplex size");
    tracker t{f, lo, hi, max_evaluations};
    return nelder_mead_impl(t, std::move(start), tolerance);
}

fit_result grid_then_refine(const objective_fn& f, const std::vector<double>& lo,
                            const std::vector<double>& hi, int grid_per_dim,
                            int max_evaluations, double tolerance) {
    const std::size_t dim = lo.size();
    if (dim == 0 || lo.size() != hi.size())
        throw std::invalid_argument("grid_then_refine: inconsistent dimensions");
    if (grid_per_dim < 2)
        throw std::invalid_argument("grid_then_refine: need at least 2 grid points per dim");

    tracker t{f, lo, hi, max_evaluations};

    // coarse scan over the full box
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim; ++d) total *= grid_per_dim;
    std::vector<int> digit(dim, 0);
    for (std::size_t cell = 0; cell < total && !t.exhausted(); ++cell) {
        std::vector<double> x(dim);
        std::size_t rem = cell;
        for (std::size_t d = 0; d < dim; ++d) {
            digit[d] = static_cast<int>(rem % grid_per_dim);
            rem /= grid_per_dim;
            x[d] = lo[d] + (hi[d] - lo[d]) * digit[d] / double(grid_per_dim - 1);
        }
        t.eval(x);
    }
    if (t.exhausted()) return finish(t, false);

    return nelder_mead_impl(t, t.best_x, tolerance);
}

} // namespace gsml
