#include "discflow/grid.hpp"

#include <algorithm>
#include <cmath>

namespace discflow {

std::vector<std::vector<double>> fornberg_weights(double x0,
                                                  const std::vector<double>& x,
                                                  int maxorder) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(maxorder + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, maxorder);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

PolarGrid::PolarGrid(int nr, int modes, double stretch_exponent)
    : nr_(nr), modes_(modes), ntheta_(3 * modes), stretch_(stretch_exponent) {
    if (nr < 16) throw std::invalid_argument("PolarGrid: nr must be >= 16");
    if (modes < 4) throw std::invalid_argument("PolarGrid: modes must be >= 4");
    if (!(stretch_exponent >= 1.0))
        throw std::invalid_argument("PolarGrid: stretch_exponent must be >= 1");
    build_nodes();
    build_quadrature();
    build_derivatives();
}

void PolarGrid::build_nodes() {
    r_.resize(nr_);
    const double h = 1.0 / nr_;
    for (int i = 0; i < nr_; ++i) {
        const double s = (i + 1) * h;
        r_[i] = 1.0 - std::pow(1.0 - s, stretch_);
    }
    r_[nr_ - 1] = 1.0;  // exact boundary node
    theta_.resize(ntheta_);
    for (int j = 0; j < ntheta_; ++j) theta_[j] = 2.0 * M_PI * j / ntheta_;
}

namespace {

// 5-point Gauss-Legendre on [a,b]; exact for polynomials up to degree 9.
void gauss5(double a, double b, double* xs, double* ws) {
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < 5; ++q) {
        xs[q] = mid + half * gx[q];
        ws[q] = half * gw[q];
    }
}

}  // namespace

void PolarGrid::build_quadrature() {
    // Per interval [r_{i-1}, r_i] (r_0 := 0), integrate the cubic interpolant
    // of phi through the 4 nodes straddling the interval against the r dr
    // measure. The symmetric window keeps all accumulated node weights
    // positive on graded meshes.
    w_.assign(nr_, 0.0);
    cw_.assign(nr_, {});
    cfirst_.assign(nr_, 0);
    const int W = 4;
    for (int i = 0; i < nr_; ++i) {
        const double a = (i == 0) ? 0.0 : r_[i - 1];
        const double b = r_[i];
        int first = std::clamp(i - 2, 0, nr_ - W);
        std::vector<double> nodes(r_.begin() + first, r_.begin() + first + W);
        double xs[5], ws[5];
        gauss5(a, b, xs, ws);
        std::vector<double> iw(W, 0.0);
        for (int q = 0; q < 5; ++q) {
            auto lag = fornberg_weights(xs[q], nodes, 0);
            for (int j = 0; j < W; ++j) iw[j] += ws[q] * xs[q] * lag[0][j];
        }
        cfirst_[i] = first;
        cw_[i] = iw;
        for (int j = 0; j < W; ++j) w_[first + j] += iw[j];
    }

    // On strongly graded meshes the cubic windows can leave a tiny negative
    // total weight at the boundary node. Rebuild intervals from the end with
    // the (positive) linear rule until every node weight is positive; the
    // affected intervals have length O(nr^-stretch), so the accuracy loss is
    // far below the stencil order.
    auto has_nonpositive = [&] {
        for (double w : w_)
            if (w <= 0.0) return true;
        return false;
    };
    for (int i = nr_ - 1; i > 0 && has_nonpositive(); --i) {
        for (size_t j = 0; j < cw_[i].size(); ++j) w_[cfirst_[i] + j] -= cw_[i][j];
        const double a = r_[i - 1], b = r_[i];
        double xs[5], ws[5];
        gauss5(a, b, xs, ws);
        std::vector<double> iw(2, 0.0);
        for (int q = 0; q < 5; ++q) {
            const double t = (xs[q] - a) / (b - a);
            iw[0] += ws[q] * xs[q] * (1.0 - t);
            iw[1] += ws[q] * xs[q] * t;
        }
        cfirst_[i] = i - 1;
        cw_[i] = iw;
        w_[i - 1] += iw[0];
        w_[i] += iw[1];
    }
}

void PolarGrid::build_derivatives() {
    // Extended node list (-r_2, -r_1, r_1, ..., r_nr); ghost values carry the
    // parity sign of the Fourier mode, folded into real columns here.
    std::vector<double> ext(nr_ + 2);
    ext[0] = -r_[1];
    ext[1] = -r_[0];
    for (int i = 0; i < nr_; ++i) ext[i + 2] = r_[i];

    auto build = [&](int order, int parity_sign, std::vector<StencilRow>& out) {
        out.assign(nr_, {});
        for (int k = 0; k < nr_; ++k) {
            const int e = k + 2;  // position of node k in ext
            // 6-point windows near both ends keep the closures 4th order.
            const int W = (k <= 1 || k >= nr_ - 2) ? 6 : 5;
            int start = std::clamp(e - W / 2, 0, nr_ + 2 - W);
            std::vector<double> nodes(ext.begin() + start, ext.begin() + start + W);
            auto fw = fornberg_weights(r_[k], nodes, order);
            // Fold ghosts: ext index 0 -> column 1, ext index 1 -> column 0.
            int lo = nr_, hi = -1;
            for (int j = 0; j < W; ++j) {
                const int eidx = start + j;
                const int col = (eidx >= 2) ? eidx - 2 : 1 - eidx;
                lo = std::min(lo, col);
                hi = std::max(hi, col);
            }
            StencilRow row;
            row.first = lo;
            row.w.assign(hi - lo + 1, 0.0);
            for (int j = 0; j < W; ++j) {
                const int eidx = start + j;
                const int col = (eidx >= 2) ? eidx - 2 : 1 - eidx;
                const double sgn = (eidx >= 2) ? 1.0 : parity_sign;
                row.w[col - lo] += sgn * fw[order][j];
            }
            out[k] = std::move(row);
        }
    };
    build(1, +1, d1_even_);
    build(1, -1, d1_odd_);
    build(2, +1, d2_even_);
    build(2, -1, d2_odd_);

    // One-sided pole closure for the general derivative operators: rows 0
    // and 1 interpolate on real nodes only, which stays accurate for radial
    // profiles that are smooth in r > 0 but not across the origin (e.g. the
    // flux potential of a boundary-peaked source).
    auto build_onesided = [&](int order, std::vector<StencilRow>& out,
                              const std::vector<StencilRow>& base) {
        out = base;
        for (int k = 0; k <= 1; ++k) {
            const int W = 6;
            std::vector<double> nodes(r_.begin(), r_.begin() + W);
            auto fw = fornberg_weights(r_[k], nodes, order);
            StencilRow row;
            row.first = 0;
            row.w.assign(fw[order].begin(), fw[order].end());
            out[k] = std::move(row);
        }
    };
    build_onesided(1, d1_, d1_even_);
    build_onesided(2, d2_, d2_even_);
}

double PolarGrid::integrate_radial(const std::vector<double>& phi) const {
    double s = 0.0;
    for (int i = 0; i < nr_; ++i) s += w_[i] * phi[i];
    return s;
}

std::vector<double> PolarGrid::cumulative_radial(const std::vector<double>& phi) const {
    std::vector<double> g(nr_, 0.0);
    double acc = 0.0;
    for (int i = 0; i < nr_; ++i) {
        const auto& iw = cw_[i];
        for (size_t j = 0; j < iw.size(); ++j) acc += iw[j] * phi[cfirst_[i] + j];
        g[i] = acc;
    }
    return g;
}

std::vector<double> PolarGrid::apply(const std::vector<StencilRow>& rows,
                                     const std::vector<double>& a) {
    std::vector<double> out(rows.size(), 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        double s = 0.0;
        for (size_t j = 0; j < row.w.size(); ++j) s += row.w[j] * a[row.first + j];
        out[i] = s;
    }
    return out;
}

PolarGrid make_grid(int nr, int modes, double stretch_exponent) {
    return PolarGrid(nr, modes, stretch_exponent);
}

}  // namespace discflow
