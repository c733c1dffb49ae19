// Flow designs for cooling the disc: single-scale convection rolls,
// multi-layer branching flows whose azimuthal scale refines toward the
// boundary, and the single-layer bounded-energy variant. Every design is a
// streamfunction/velocity/test-function triple
//   psi = sum_k chi_k(r) * r g(r,theta) Psi_k(theta),  u = perp-grad psi,
//   eta = taper(r) * sum_k chi_k(r) * (-Psi_k'(theta)),
// with Psi_k = sqrt(2) l_k cos(theta / l_k) and {chi_k} a radial partition of
// unity in the square sense. Components are evaluated analytically at grid
// nodes; the stored spectral velocity is the discrete perp-gradient of the
// sampled streamfunction so it is divergence-free by construction.

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "discflow/source.hpp"

namespace discflow {

// Quintic smoothstep: S(0)=0, S(1)=1, S'(0)=S'(1)=S''(0)=S''(1)=0.
double smoothstep5(double x);
double smoothstep5_d1(double x);
double smoothstep5_d2(double x);

// Layer parameters of a branching flow (one entry per layer, k = 0..n-1 in
// storage for layers 1..n).
struct BranchingPlan {
    int n = 0;
    std::vector<double> l;        // scales, l[k+1] = l[k]/2, 1/l[k] integer
    std::vector<long> inv_l;      // 1/l[k]
    std::vector<double> r;        // transition radii, 1/2 < r[0] < ... < r[n-1] < 1
    double delta_bulk = 0.0;      // 1 - r[0]
    double delta_bl = 0.0;        // 1 - r[n-1]
    double pe_target = 0.0;
    double r_core = 0.0;          // eta taper radius
    double scale_coeff = 0.0;     // c(Pe) = log^{1/6}(Pe) / Pe^{1/3}

    double ell(double radius) const;      // interpolating scale c sqrt(1-r)
    double delta(int k) const;            // r[k+1]-r[k], last one = delta_bl

    // Closed-form evaluation of the branching cooling estimate
    //   M = l1^2 + int (ell')^2 + d_bl + (1/Pe^2)(1/l1^2 + int 1/ell^2 + d_bl/ln^2)^2.
    double m_estimate(double pe) const;
};

// Parameter selection at a given Peclet number: scale rule
// ell(r) = (log^{1/6}Pe / Pe^{1/3}) sqrt(1-r), dyadic scales with the
// smallest admissible integer 1/l_1 in [2, 4] * Pe^{1/3}/log^{1/6}Pe, and
// n = floor(log2(Pe^{1/3}/log^{1/6}Pe)) layers. Requires pe >= 70.
BranchingPlan branching_plan(double pe);

// Radial partition used to glue layers; satisfies sum chi_k^2 = 1 on
// (0, r_bl), overlapping supports only for adjacent layers, and
// chi_n(1) = chi_n'(1) = 0. The final descent to the wall happens over
// ramp_width (at most 1 - r_bl); the last layer holds its plateau between
// r_bl and the ramp.
class CutoffSet {
  public:
    CutoffSet(std::vector<double> radii, double ramp_width);

    int layers() const { return static_cast<int>(radii_.size()); }
    // chi_k and its first two derivatives at radius r (k is 0-based).
    void eval(int k, double r, double& chi, double& dchi, double& d2chi) const;

  private:
    std::vector<double> radii_;
    std::vector<double> delta_;  // transition widths per layer boundary
};

CutoffSet cutoff_family(const BranchingPlan& plan);

enum class FlowKind { roll, branching, energy_roll };

std::string to_string(FlowKind kind);

// Pointwise values of a design at one grid node.
struct FlowSample {
    double psi = 0.0;
    double u_r = 0.0;
    double u_t = 0.0;
    double eta = 0.0;
    double eta_r = 0.0;   // d eta / d r
    double eta_t = 0.0;   // d eta / d theta
    double gradu_sq = 0.0;
};

class FlowDesign {
  public:
    FlowKind kind() const { return kind_; }
    const PolarGrid& grid() const { return source_->grid(); }
    const Source& source() const { return *source_; }
    const std::optional<BranchingPlan>& plan() const { return plan_; }

    // Sampled fields (the stored velocity is perp_gradient of sampled psi).
    const SpectralScalar& psi() const { return *psi_; }
    const VectorFieldPolar& velocity() const { return *u_; }
    const SpectralScalar& eta() const { return *eta_; }

    double enstrophy() const { return enstrophy_; }  // fint |grad u|^2
    double energy() const { return energy_; }        // fint |u|^2
    double grad_eta() const { return grad_eta_; }    // fint |grad eta|^2
    double norm_for(bool energy_constraint) const {
        return energy_constraint ? energy_ : enstrophy_;
    }

    double u_scale() const { return u_scale_; }
    double eta_scale() const { return eta_scale_; }

    // Analytic evaluation at grid node (i, j), including the current scaling.
    FlowSample eval(int i, int j) const;

    // Azimuthal roll count parameter: rolls report n, branching reports the
    // active layer count.
    int rolls() const { return n_rolls_; }

  private:
    friend FlowDesign roll_flow(const Source&, int, double);
    friend FlowDesign branching_flow(const Source&, const BranchingPlan&);
    friend FlowDesign energy_roll_design(const Source&, double);
    friend FlowDesign rescale_to_pe(const FlowDesign&, double, bool);

    FlowDesign() = default;
    void build(bool check_noslip);
    void eval_raw(int i, int j, FlowSample& out) const;

    FlowKind kind_ = FlowKind::roll;
    std::shared_ptr<const Source> source_;
    std::optional<BranchingPlan> plan_;
    std::optional<CutoffSet> cutoffs_;
    int n_rolls_ = 0;       // roll kind only
    double taper_ = 0.0;    // core taper radius (0 disables)
    double u_scale_ = 1.0;
    double eta_scale_ = 1.0;

    // Per-radius precomputations and exact-angle trig tables.
    std::vector<double> chi_, dchi_, d2chi_;  // [layer][i], flattened
    std::vector<double> tap_, dtap_;
    std::vector<double> cos_tab_, sin_tab_;

    std::shared_ptr<SpectralScalar> psi_, eta_;
    std::shared_ptr<VectorFieldPolar> u_;
    double enstrophy_ = 0.0, energy_ = 0.0, grad_eta_ = 0.0;
};

// Single-scale roll design; taper in [0, 1/4] regularizes eta near the pole
// (0 disables). Rolls do not satisfy no-slip and are tagged accordingly.
FlowDesign roll_flow(const Source& s, int n, double taper = 0.0);

// Branching design for the given plan; requires grid modes >= 4 / l_n.
FlowDesign branching_flow(const Source& s, const BranchingPlan& plan);

// Single-layer design with 1/l = round(sqrt(pe)) and delta_bl = l, the
// bounded-energy roll family. Requires pe >= 4.
FlowDesign energy_roll_design(const Source& s, double pe);

// u -> lambda u, eta -> eta / lambda with lambda = pe / sqrt(norm); the
// selected constraint norm of the result is pe^2.
FlowDesign rescale_to_pe(const FlowDesign& d, double pe, bool energy_constraint);

}  // namespace discflow
