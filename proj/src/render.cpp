#include "discflow/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace discflow {

namespace {

struct Pt {
    double x, y;
};

// Linear interpolation of the level crossing on one edge.
Pt cross(double va, double vb, Pt a, Pt b, double level) {
    const double t = (level - va) / (vb - va);
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

void fmt_pt(std::ostringstream& os, const Pt& p, double scale, double half) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f %.2f", half + p.x * scale, half - p.y * scale);
    os << buf;
}

}  // namespace

std::string render_streamlines_svg(const FlowDesign& d, const RenderOptions& opts) {
    const PolarGrid& grid = d.grid();
    const int nr = grid.nr(), nt = grid.ntheta();

    // psi samples and Cartesian node positions.
    std::vector<double> psi(static_cast<size_t>(nr) * nt);
    double amax = 0.0;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            const double v = d.eval(i, j).psi;
            psi[static_cast<size_t>(i) * nt + j] = v;
            amax = std::max(amax, std::abs(v));
        }

    const double half = opts.size_px / 2.0;
    const double scale = 0.46 * opts.size_px;

    std::ostringstream body;
    if (amax > 0.0) {
        for (int lev = 0; lev < opts.levels; ++lev) {
            const double level = -amax + 2.0 * amax * (lev + 1) / (opts.levels + 1);
            const char* color = level > 0.0   ? "#7b3294"
                                : level < 0.0 ? "#0571b0"
                                              : "#888888";
            std::ostringstream segs;
            bool any = false;
            for (int i = 0; i + 1 < nr; ++i) {
                for (int j = 0; j < nt; ++j) {
                    const int jn = (j + 1) % nt;
                    const double v00 = psi[static_cast<size_t>(i) * nt + j];
                    const double v10 = psi[static_cast<size_t>(i) * nt + jn];
                    const double v01 = psi[static_cast<size_t>(i + 1) * nt + j];
                    const double v11 = psi[static_cast<size_t>(i + 1) * nt + jn];
                    const bool b00 = v00 > level, b10 = v10 > level;
                    const bool b01 = v01 > level, b11 = v11 > level;
                    if (b00 == b10 && b10 == b01 && b01 == b11) continue;
                    const double r0 = grid.r(i), r1 = grid.r(i + 1);
                    const double t0 = grid.theta(j);
                    const double t1 = (jn == 0) ? 2.0 * M_PI : grid.theta(jn);
                    const Pt p00{r0 * std::cos(t0), r0 * std::sin(t0)};
                    const Pt p10{r0 * std::cos(t1), r0 * std::sin(t1)};
                    const Pt p01{r1 * std::cos(t0), r1 * std::sin(t0)};
                    const Pt p11{r1 * std::cos(t1), r1 * std::sin(t1)};
                    // edge crossings: bottom (00-10), right (10-11),
                    // top (01-11), left (00-01)
                    Pt pts[4];
                    int count = 0;
                    if (b00 != b10) pts[count++] = cross(v00, v10, p00, p10, level);
                    if (b10 != b11) pts[count++] = cross(v10, v11, p10, p11, level);
                    if (b01 != b11) pts[count++] = cross(v01, v11, p01, p11, level);
                    if (b00 != b01) pts[count++] = cross(v00, v01, p00, p01, level);
                    for (int k = 0; k + 1 < count; k += 2) {
                        segs << "M";
                        fmt_pt(segs, pts[k], scale, half);
                        segs << "L";
                        fmt_pt(segs, pts[k + 1], scale, half);
                        any = true;
                    }
                }
            }
            if (any)
                body << "<path fill=\"none\" stroke=\"" << color
                     << "\" stroke-width=\"1\" d=\"" << segs.str() << "\"/>\n";
        }
    }

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.size_px
        << "\" height=\"" << opts.size_px << "\" viewBox=\"0 0 " << opts.size_px << " "
        << opts.size_px << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<circle cx=\"" << half << "\" cy=\"" << half << "\" r=\"" << scale
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
        << body.str() << "</svg>\n";
    return svg.str();
}

void render_streamlines(const FlowDesign& d, const std::string& path,
                        const RenderOptions& opts) {
    const std::string svg = render_streamlines_svg(d, opts);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("render_streamlines: cannot write " + path);
    out << svg;
    if (!out) throw std::runtime_error("render_streamlines: write failed for " + path);
}

int azimuthal_sign_changes(const FlowDesign& d, double radius) {
    const PolarGrid& grid = d.grid();
    int best = 0;
    double dist = 2.0;
    for (int i = 0; i < grid.nr(); ++i) {
        if (std::abs(grid.r(i) - radius) < dist) {
            dist = std::abs(grid.r(i) - radius);
            best = i;
        }
    }
    const int nt = grid.ntheta();
    std::vector<double> row(nt);
    double amax = 0.0;
    for (int j = 0; j < nt; ++j) {
        row[j] = d.eval(best, j).psi;
        amax = std::max(amax, std::abs(row[j]));
    }
    if (amax == 0.0) return 0;
    const double tol = 1e-12 * amax;
    int j0 = -1;
    for (int j = 0; j < nt; ++j)
        if (std::abs(row[j]) > tol) {
            j0 = j;
            break;
        }
    if (j0 < 0) return 0;
    // one full turn starting from the first definite sample, skipping zeros
    int changes = 0;
    int last_sign = row[j0] > 0.0 ? 1 : -1;
    for (int jj = j0 + 1; jj <= j0 + nt; ++jj) {
        const double v = row[jj % nt];
        if (std::abs(v) <= tol) continue;
        const int sign = v > 0.0 ? 1 : -1;
        if (sign != last_sign) {
            ++changes;
            last_sign = sign;
        }
    }
    return changes;
}

}  // namespace discflow
