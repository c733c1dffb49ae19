#include "discflow/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace discflow {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kHalfPi = 1.5707963267948966;
}  // namespace

double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep5_d1(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

double smoothstep5_d2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

double BranchingPlan::ell(double radius) const {
    return scale_coeff * std::sqrt(std::max(0.0, 1.0 - radius));
}

double BranchingPlan::delta(int k) const {
    return (k + 1 < n) ? r[k + 1] - r[k] : delta_bl;
}

double BranchingPlan::m_estimate(double pe) const {
    const double l1 = l.front();
    const double ln = l.back();
    const double logratio = (n > 1) ? std::log(delta_bulk / delta_bl) : 0.0;
    const double c2 = scale_coeff * scale_coeff;
    const double grad_part =
        1.0 / (l1 * l1) + logratio / c2 + delta_bl / (ln * ln);
    return l1 * l1 + 0.25 * c2 * logratio + delta_bl +
           grad_part * grad_part / (pe * pe);
}

BranchingPlan branching_plan(double pe) {
    if (!(pe >= 70.0))
        throw std::invalid_argument(
            "branching_plan: pe must be >= 70 (use roll_flow below that)");
    const double ratio = std::cbrt(pe) / std::pow(std::log(pe), 1.0 / 6.0);
    BranchingPlan plan;
    plan.pe_target = pe;
    plan.scale_coeff = 1.0 / ratio;
    plan.n = static_cast<int>(std::floor(std::log2(ratio)));
    // smallest admissible integer in [2 ratio, 4 ratio]
    const long inv_l1 = static_cast<long>(std::ceil(2.0 * ratio));
    plan.l.resize(plan.n);
    plan.inv_l.resize(plan.n);
    plan.r.resize(plan.n);
    for (int k = 0; k < plan.n; ++k) {
        plan.inv_l[k] = inv_l1 << k;
        plan.l[k] = 1.0 / static_cast<double>(plan.inv_l[k]);
        const double root = plan.l[k] * ratio;  // sqrt(1 - r_k)
        plan.r[k] = 1.0 - root * root;
    }
    plan.delta_bulk = 1.0 - plan.r.front();
    plan.delta_bl = 1.0 - plan.r.back();
    plan.r_core = std::min(0.1, plan.r.front() / 4.0);
    return plan;
}

CutoffSet::CutoffSet(std::vector<double> radii, double ramp_width)
    : radii_(std::move(radii)) {
    const int n = static_cast<int>(radii_.size());
    delta_.resize(n);
    for (int k = 0; k + 1 < n; ++k) delta_[k] = radii_[k + 1] - radii_[k];
    delta_[n - 1] = ramp_width;
}

void CutoffSet::eval(int k, double r, double& chi, double& dchi, double& d2chi) const {
    chi = dchi = d2chi = 0.0;
    const int n = layers();
    // Left of r_k: layer 0 extends to the pole, others ramp up over
    // [r_{k-1}, r_k] as sin((pi/2) S(t)).
    if (r <= radii_[k]) {
        if (k == 0) {
            chi = 1.0;
            return;
        }
        const double lo = radii_[k - 1], d = delta_[k - 1];
        if (r <= lo) return;
        const double t = (r - lo) / d;
        const double A = kHalfPi * smoothstep5(t);
        const double A1 = kHalfPi * smoothstep5_d1(t) / d;
        const double A2 = kHalfPi * smoothstep5_d2(t) / (d * d);
        chi = std::sin(A);
        dchi = std::cos(A) * A1;
        d2chi = -std::sin(A) * A1 * A1 + std::cos(A) * A2;
        return;
    }
    // Right of r_k: ramp down over [r_k, r_{k+1}] as cos((pi/2) S(t)); the
    // last layer keeps its plateau until the wall ramp [1 - w, 1].
    const double lo = (k + 1 < n) ? radii_[k] : 1.0 - delta_[k];
    const double hi = (k + 1 < n) ? radii_[k + 1] : 1.0;
    if (r <= lo) {
        chi = 1.0;
        return;
    }
    if (r >= hi) return;
    const double t = (r - lo) / delta_[k];
    const double A = kHalfPi * smoothstep5(t);
    const double A1 = kHalfPi * smoothstep5_d1(t) / delta_[k];
    const double A2 = kHalfPi * smoothstep5_d2(t) / (delta_[k] * delta_[k]);
    chi = std::cos(A);
    dchi = -std::sin(A) * A1;
    d2chi = -std::cos(A) * A1 * A1 - std::sin(A) * A2;
}

CutoffSet cutoff_family(const BranchingPlan& plan) {
    return CutoffSet(plan.r, plan.delta_bl);
}

std::string to_string(FlowKind kind) {
    switch (kind) {
        case FlowKind::roll: return "roll";
        case FlowKind::branching: return "branching";
        case FlowKind::energy_roll: return "energy-roll";
    }
    return "?";
}

void FlowDesign::build(bool check_noslip) {
    const PolarGrid& grid = source_->grid();
    const int nr = grid.nr();
    const int nt = grid.ntheta();
    const int layers = plan_ ? plan_->n : 1;

    cos_tab_.resize(nt);
    sin_tab_.resize(nt);
    for (int j = 0; j < nt; ++j) {
        cos_tab_[j] = std::cos(grid.theta(j));
        sin_tab_[j] = std::sin(grid.theta(j));
    }

    chi_.assign(static_cast<size_t>(layers) * nr, 0.0);
    dchi_.assign(static_cast<size_t>(layers) * nr, 0.0);
    d2chi_.assign(static_cast<size_t>(layers) * nr, 0.0);
    if (cutoffs_) {
        for (int k = 0; k < layers; ++k)
            for (int i = 0; i < nr; ++i)
                cutoffs_->eval(k, grid.r(i), chi_[static_cast<size_t>(k) * nr + i],
                               dchi_[static_cast<size_t>(k) * nr + i],
                               d2chi_[static_cast<size_t>(k) * nr + i]);
    } else {
        for (int i = 0; i < nr; ++i) chi_[i] = 1.0;
    }

    const double rc = plan_ ? plan_->r_core : taper_;
    tap_.assign(nr, 1.0);
    dtap_.assign(nr, 0.0);
    if (rc > 0.0) {
        for (int i = 0; i < nr; ++i) {
            const double t = grid.r(i) / rc;
            tap_[i] = smoothstep5(t);
            dtap_[i] = smoothstep5_d1(t) / rc;
        }
    }

    // Sample streamfunction and test function; derive the stored velocity
    // from the sampled streamfunction so its discrete divergence vanishes.
    std::vector<double> cpsi(static_cast<size_t>(nr) * nt), ceta(cpsi.size());
    FlowSample fs;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            eval_raw(i, j, fs);
            cpsi[static_cast<size_t>(i) * nt + j] = fs.psi;
            ceta[static_cast<size_t>(i) * nt + j] = fs.eta;
        }
    psi_ = std::make_shared<SpectralScalar>(from_collocation(grid, cpsi));
    eta_ = std::make_shared<SpectralScalar>(from_collocation(grid, ceta));
    u_ = std::make_shared<VectorFieldPolar>(perp_gradient(*psi_));

    // The boundary row of the discrete radial derivative carries a one-sided
    // truncation error; replace it with the analytic boundary values.
    {
        std::vector<double> row(nt);
        for (int j = 0; j < nt; ++j) {
            eval_raw(nr - 1, j, fs);
            row[j] = fs.u_t;
        }
        std::vector<double> comps(2 * grid.modes() - 1);
        theta_analysis_row(nt, grid.modes(), row.data(), comps.data(), 1);
        for (int c = 0; c < u_->theta_comp.ncomp(); ++c)
            u_->theta_comp.at(c, nr - 1) = comps[c];
    }

    // Quadratic diagnostics by quadrature of the analytic samples.
    const auto& w = grid.quad_weights();
    double ens = 0.0, ene = 0.0, ge = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double inv_r = 1.0 / grid.r(i);
        double se = 0.0, sn = 0.0, sg = 0.0;
        for (int j = 0; j < nt; ++j) {
            eval_raw(i, j, fs);
            se += fs.u_r * fs.u_r + fs.u_t * fs.u_t;
            sn += fs.gradu_sq;
            const double gt = fs.eta_t * inv_r;
            sg += fs.eta_r * fs.eta_r + gt * gt;
        }
        ene += 2.0 * w[i] * se / nt;
        ens += 2.0 * w[i] * sn / nt;
        ge += 2.0 * w[i] * sg / nt;
    }
    energy_ = ene;
    enstrophy_ = ens;
    grad_eta_ = ge;

    if (check_noslip) {
        for (int j = 0; j < nt; ++j) {
            eval_raw(nr - 1, j, fs);
            if (std::abs(fs.u_r) > 1e-10 || std::abs(fs.u_t) > 1e-10 ||
                std::abs(fs.eta) > 1e-12)
                throw std::runtime_error("FlowDesign: boundary values violated");
        }
    }
}

FlowSample FlowDesign::eval(int i, int j) const {
    FlowSample out;
    eval_raw(i, j, out);
    out.psi *= u_scale_;
    out.u_r *= u_scale_;
    out.u_t *= u_scale_;
    out.gradu_sq *= u_scale_ * u_scale_;
    out.eta *= eta_scale_;
    out.eta_r *= eta_scale_;
    out.eta_t *= eta_scale_;
    return out;
}

void FlowDesign::eval_raw(int i, int j, FlowSample& out) const {
    const PolarGrid& grid = source_->grid();
    const int nr = grid.nr();
    const int nt = grid.ntheta();
    const double r = grid.r(i);
    const double inv_r = 1.0 / r;
    const Source& src = *source_;

    const double f = src.f(i, j);
    const double fr = src.f_r(i, j);
    const double ft = src.f_t(i, j);
    const double g = src.g(i, j);
    const double gt = src.g_t(i, j);
    const double gtt = src.g_tt(i, j);
    const double gr = f - g * inv_r;        // from d_r(r g) = r f
    const double grt = ft - gt * inv_r;

    const int layers = plan_ ? plan_->n : 1;
    double psi = 0.0, ur = 0.0, ut = 0.0;
    double eta = 0.0, eta_r = 0.0, eta_t = 0.0;
    double trr = 0.0, trt = 0.0, ttr = 0.0, ttt = 0.0;

    for (int k = 0; k < layers; ++k) {
        const double chi = chi_[static_cast<size_t>(k) * nr + i];
        const double dchi = dchi_[static_cast<size_t>(k) * nr + i];
        const double d2chi = d2chi_[static_cast<size_t>(k) * nr + i];
        if (chi == 0.0 && dchi == 0.0 && d2chi == 0.0) continue;

        const long q = plan_ ? plan_->inv_l[k] : n_rolls_;
        const double lk = 1.0 / static_cast<double>(q);
        const long idx = (q * j) % nt;
        const double c = cos_tab_[idx];
        const double s = sin_tab_[idx];
        const double Psi = kSqrt2 * lk * c;
        const double Psip = -kSqrt2 * s;
        const double Psipp = -kSqrt2 * c / lk;

        const double ak = -(gt * Psi + g * Psip);
        const double dak_dr = -(grt * Psi + gr * Psip);
        const double dak_dt = -(gtt * Psi + 2.0 * gt * Psip + g * Psipp);

        psi += chi * r * g * Psi;
        ur += chi * ak;
        ut += chi * r * f * Psi + dchi * r * g * Psi;

        eta += chi * (-Psip);
        eta_r += dchi * (-Psip);
        eta_t += chi * (-Psipp);

        trr += dchi * ak + chi * dak_dr;
        trt += chi * (f + r * fr) * Psi + dchi * r * f * Psi + d2chi * r * g * Psi +
               dchi * (g + r * gr) * Psi;
        ttr += chi * dak_dt;
        ttt += chi * (ft * Psi + f * Psip) + dchi * (gt * Psi + g * Psip);
    }

    out.psi = psi;
    out.u_r = ur;
    out.u_t = ut;
    out.eta = tap_[i] * eta;
    out.eta_r = dtap_[i] * eta + tap_[i] * eta_r;
    out.eta_t = tap_[i] * eta_t;
    const double Trr = trr;
    const double Trt = trt;
    const double Ttr = ttr * inv_r - ut * inv_r;
    const double Ttt = ttt + ur * inv_r;
    out.gradu_sq = Trr * Trr + Trt * Trt + Ttr * Ttr + Ttt * Ttt;
}

FlowDesign roll_flow(const Source& s, int n, double taper) {
    if (n < 1) throw std::invalid_argument("roll_flow: n must be >= 1");
    if (taper < 0.0 || taper > 0.25)
        throw std::invalid_argument("roll_flow: taper must lie in [0, 1/4]");
    FlowDesign d;
    d.kind_ = FlowKind::roll;
    d.source_ = std::make_shared<Source>(s);
    d.n_rolls_ = n;
    d.taper_ = taper;
    d.build(/*check_noslip=*/false);
    return d;
}

FlowDesign branching_flow(const Source& s, const BranchingPlan& plan) {
    const long need = 4 * plan.inv_l.back();
    if (s.grid().modes() < need)
        throw std::invalid_argument("branching_flow: grid under-resolved, needs >= " +
                                    std::to_string(need) + " theta modes");
    FlowDesign d;
    d.kind_ = FlowKind::branching;
    d.source_ = std::make_shared<Source>(s);
    d.plan_ = plan;
    d.cutoffs_ = cutoff_family(plan);
    d.n_rolls_ = static_cast<int>(plan.inv_l.front());
    d.build(/*check_noslip=*/true);
    return d;
}

FlowDesign energy_roll_design(const Source& s, double pe) {
    if (!(pe >= 4.0)) throw std::invalid_argument("energy_roll_design: pe must be >= 4");
    BranchingPlan plan;
    plan.n = 1;
    const long inv_l = std::lround(std::sqrt(pe));
    plan.inv_l = {inv_l};
    plan.l = {1.0 / static_cast<double>(inv_l)};
    // The streamlines turn inside a layer of width 1/pe. A cell-sized layer
    // (delta = l) leaves a mean-flux deficit of first order in the layer
    // width, which caps the cooling at pe^{-1/2}; the thin layer makes every
    // term of the bound scale like 1/pe while the kinetic energy stays
    // bounded, since the fast turning region has measure 1/pe.
    plan.delta_bl = 1.0 / pe;
    plan.delta_bulk = plan.delta_bl;
    plan.r = {1.0 - plan.delta_bl};
    plan.pe_target = pe;
    plan.r_core = std::min(0.1, plan.r[0] / 4.0);
    plan.scale_coeff = plan.l[0] / std::sqrt(plan.delta_bl);
    const long need = 4 * inv_l;
    if (s.grid().modes() < need)
        throw std::invalid_argument("energy_roll_design: grid under-resolved, needs >= " +
                                    std::to_string(need) + " theta modes");
    FlowDesign d;
    d.kind_ = FlowKind::energy_roll;
    d.source_ = std::make_shared<Source>(s);
    d.plan_ = plan;
    d.cutoffs_ = cutoff_family(plan);
    d.n_rolls_ = static_cast<int>(inv_l);
    d.build(/*check_noslip=*/true);
    return d;
}

FlowDesign rescale_to_pe(const FlowDesign& d, double pe, bool energy_constraint) {
    const double norm = d.norm_for(energy_constraint);
    if (!(norm > 0.0)) throw std::invalid_argument("rescale_to_pe: flow norm is zero");
    const double lambda = pe / std::sqrt(norm);
    FlowDesign out = d;
    out.u_scale_ *= lambda;
    out.eta_scale_ /= lambda;
    out.psi_ = std::make_shared<SpectralScalar>(*d.psi_);
    out.eta_ = std::make_shared<SpectralScalar>(*d.eta_);
    out.u_ = std::make_shared<VectorFieldPolar>(*d.u_);
    const PolarGrid& grid = d.grid();
    const size_t nvals = static_cast<size_t>(grid.nr()) * (2 * grid.modes() - 1);
    for (size_t k = 0; k < nvals; ++k) {
        out.psi_->comp(0)[k] = d.psi_->comp(0)[k] * lambda;
        out.eta_->comp(0)[k] = d.eta_->comp(0)[k] / lambda;
        out.u_->r_comp.comp(0)[k] = d.u_->r_comp.comp(0)[k] * lambda;
        out.u_->theta_comp.comp(0)[k] = d.u_->theta_comp.comp(0)[k] * lambda;
    }
    out.enstrophy_ = d.enstrophy_ * lambda * lambda;
    out.energy_ = d.energy_ * lambda * lambda;
    out.grad_eta_ = d.grad_eta_ / (lambda * lambda);
    return out;
}

}  // namespace discflow
