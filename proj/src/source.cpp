#include "discflow/source.hpp"

#include <cmath>
#include <stdexcept>

namespace discflow {

std::string to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::constant: return "constant";
        case SourceKind::gaussian_center: return "gaussian-center";
        case SourceKind::gaussian_ring: return "gaussian-ring";
        case SourceKind::quadrupole: return "quadrupole";
        case SourceKind::custom: return "custom";
    }
    return "?";
}

Source::Source(SourceKind kind, const std::vector<double>& params, const PolarGrid& grid)
    : grid_(&grid), kind_(kind) {
    if (kind == SourceKind::custom)
        throw std::invalid_argument("Source: custom kind needs CustomSource evaluators");
    const int nr = grid.nr();
    const int nt = grid.ntheta();
    R_.assign(nr, 1.0);
    Rp_.assign(nr, 0.0);
    Rpp_.assign(nr, 0.0);
    G_.assign(nr, 0.0);
    Q_.assign(nt, 1.0);
    Qp_.assign(nt, 0.0);
    Qpp_.assign(nt, 0.0);
    name_ = to_string(kind);

    switch (kind) {
        case SourceKind::constant: {
            const double c = params.empty() ? 1.0 : params[0];
            for (int i = 0; i < nr; ++i) {
                R_[i] = c;
                G_[i] = 0.5 * c * grid.r(i);
            }
            break;
        }
        case SourceKind::gaussian_center: {
            const double a = params.empty() ? 4.0 : params[0];
            for (int i = 0; i < nr; ++i) {
                const double r = grid.r(i), e = std::exp(-a * r * r);
                R_[i] = e;
                Rp_[i] = -2.0 * a * r * e;
                Rpp_[i] = (4.0 * a * a * r * r - 2.0 * a) * e;
                G_[i] = -std::expm1(-a * r * r) / (2.0 * a * r);
            }
            break;
        }
        case SourceKind::gaussian_ring: {
            const double a = params.empty() ? 4.0 : params[0];
            const double sq = std::sqrt(a);
            const double erf1 = std::erf(sq), em = std::exp(-a);
            for (int i = 0; i < nr; ++i) {
                const double r = grid.r(i), t = 1.0 - r;
                const double e = std::exp(-a * t * t);
                R_[i] = e;
                Rp_[i] = 2.0 * a * t * e;
                Rpp_[i] = (4.0 * a * a * t * t - 2.0 * a) * e;
                const double i1 = 0.5 * std::sqrt(M_PI / a) * (erf1 - std::erf(sq * t));
                const double i2 = (e - em) / (2.0 * a);
                G_[i] = (i1 - i2) / r;
            }
            break;
        }
        case SourceKind::quadrupole: {
            for (int i = 0; i < nr; ++i) G_[i] = 0.5 * grid.r(i);
            for (int j = 0; j < nt; ++j) {
                const double th = grid.theta(j);
                const double s = std::sin(2.0 * th);
                Q_[j] = s * s;
                Qp_[j] = 2.0 * std::sin(4.0 * th);
                Qpp_[j] = 8.0 * std::cos(4.0 * th);
            }
            break;
        }
        default: break;
    }
    finalize();
}

Source::Source(const CustomSource& custom, const PolarGrid& grid)
    : grid_(&grid), kind_(SourceKind::custom), name_(custom.name), separable_(false) {
    if (!custom.f || !custom.f_r || !custom.f_t || !custom.f_rr || !custom.f_rt ||
        !custom.f_tt)
        throw std::invalid_argument("Source: custom sources must supply analytic f and "
                                    "its first two derivatives");
    const int nr = grid.nr();
    const int nt = grid.ntheta();
    const size_t n = static_cast<size_t>(nr) * nt;
    tf_.resize(n);
    tfr_.resize(n);
    tft_.resize(n);
    tfrr_.resize(n);
    tfrt_.resize(n);
    tftt_.resize(n);
    tg_.resize(n);
    tgt_.resize(n);
    tgtt_.resize(n);
    for (int i = 0; i < nr; ++i) {
        const double r = grid.r(i);
        for (int j = 0; j < nt; ++j) {
            const double th = grid.theta(j);
            const size_t k = static_cast<size_t>(i) * nt + j;
            tf_[k] = custom.f(r, th);
            tfr_[k] = custom.f_r(r, th);
            tft_[k] = custom.f_t(r, th);
            tfrr_[k] = custom.f_rr(r, th);
            tfrt_[k] = custom.f_rt(r, th);
            tftt_[k] = custom.f_tt(r, th);
        }
    }
    // g-family by cumulative radial quadrature, one angle at a time.
    std::vector<double> col(nr);
    auto fill = [&](const std::vector<double>& src, std::vector<double>& dst) {
        for (int j = 0; j < nt; ++j) {
            for (int i = 0; i < nr; ++i) col[i] = src[static_cast<size_t>(i) * nt + j];
            auto cum = grid.cumulative_radial(col);
            for (int i = 0; i < nr; ++i)
                dst[static_cast<size_t>(i) * nt + j] = cum[i] / grid.r(i);
        }
    };
    fill(tf_, tg_);
    fill(tft_, tgt_);
    fill(tftt_, tgtt_);
    finalize();
}

double Source::f(int i, int j) const {
    return separable_ ? R_[i] * Q_[j] : tf_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::f_r(int i, int j) const {
    return separable_ ? Rp_[i] * Q_[j] : tfr_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::f_t(int i, int j) const {
    return separable_ ? R_[i] * Qp_[j] : tft_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::f_rr(int i, int j) const {
    return separable_ ? Rpp_[i] * Q_[j]
                      : tfrr_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::f_rt(int i, int j) const {
    return separable_ ? Rp_[i] * Qp_[j]
                      : tfrt_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::f_tt(int i, int j) const {
    return separable_ ? R_[i] * Qpp_[j]
                      : tftt_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::g(int i, int j) const {
    return separable_ ? G_[i] * Q_[j] : tg_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::g_t(int i, int j) const {
    return separable_ ? G_[i] * Qp_[j] : tgt_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::g_tt(int i, int j) const {
    return separable_ ? G_[i] * Qpp_[j]
                      : tgtt_[static_cast<size_t>(i) * grid_->ntheta() + j];
}
double Source::F(int i) const { return F_[i]; }

void Source::finalize() {
    const int nr = grid_->nr();
    const int nt = grid_->ntheta();
    // F = theta-mean of g (exact on the uniform collocation grid).
    F_.assign(nr, 0.0);
    for (int i = 0; i < nr; ++i) {
        double s = 0.0;
        for (int j = 0; j < nt; ++j) s += g(i, j);
        F_[i] = s / nt;
    }
    // <f> and C0 by grid quadrature; the Hessian is assembled in polar form.
    const auto& w = grid_->quad_weights();
    double mean = 0.0, c0 = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = grid_->r(i), inv_r = 1.0 / r;
        double sm = 0.0, sc = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double fv = f(i, j);
            const double fr = f_r(i, j), ft = f_t(i, j);
            const double hrr = f_rr(i, j);
            const double hrt = f_rt(i, j) * inv_r - ft * inv_r * inv_r;
            const double htt = f_tt(i, j) * inv_r * inv_r + fr * inv_r;
            sm += fv;
            sc += fv * fv + fr * fr + ft * ft * inv_r * inv_r + hrr * hrr +
                  2.0 * hrt * hrt + htt * htt;
        }
        mean += 2.0 * w[i] * sm / nt;
        c0 += 2.0 * w[i] * sc / nt;
    }
    mean_ = mean;
    c0_ = c0;
    if (!std::isfinite(c0_)) throw std::invalid_argument("Source: C0(f) is not finite");
    if (mean_ <= 1e-12)
        throw std::invalid_argument("Source: <f> must be positive (got " +
                                    std::to_string(mean_) + ")");
}

SpectralScalar Source::sample_f() const {
    std::vector<double> colloc(static_cast<size_t>(grid_->nr()) * grid_->ntheta());
    for (int i = 0; i < grid_->nr(); ++i)
        for (int j = 0; j < grid_->ntheta(); ++j)
            colloc[static_cast<size_t>(i) * grid_->ntheta() + j] = f(i, j);
    return from_collocation(*grid_, colloc);
}

SpectralScalar Source::sample_g() const {
    std::vector<double> colloc(static_cast<size_t>(grid_->nr()) * grid_->ntheta());
    for (int i = 0; i < grid_->nr(); ++i)
        for (int j = 0; j < grid_->ntheta(); ++j)
            colloc[static_cast<size_t>(i) * grid_->ntheta() + j] = g(i, j);
    return from_collocation(*grid_, colloc);
}

Source make_source(SourceKind kind, const std::vector<double>& params,
                   const PolarGrid& grid) {
    return Source(kind, params, grid);
}

Source make_source(const std::string& spec, const PolarGrid& grid) {
    std::string name = spec;
    std::vector<double> params;
    if (auto pos = spec.find(':'); pos != std::string::npos) {
        name = spec.substr(0, pos);
        std::string rest = spec.substr(pos + 1);
        size_t start = 0;
        while (start < rest.size()) {
            size_t comma = rest.find(',', start);
            if (comma == std::string::npos) comma = rest.size();
            params.push_back(std::stod(rest.substr(start, comma - start)));
            start = comma + 1;
        }
    }
    SourceKind kind;
    if (name == "constant")
        kind = SourceKind::constant;
    else if (name == "gaussian-center" || name == "gaussian_center")
        kind = SourceKind::gaussian_center;
    else if (name == "gaussian-ring" || name == "gaussian_ring")
        kind = SourceKind::gaussian_ring;
    else if (name == "quadrupole")
        kind = SourceKind::quadrupole;
    else
        throw std::invalid_argument("make_source: unknown source '" + name + "'");
    return Source(kind, params, grid);
}

}  // namespace discflow
