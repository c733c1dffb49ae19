// Heat source library. A Source bundles the pointwise values of f and its
// first two derivatives together with the derived radial objects
//   F(r) = (1/2 pi r) int_{D_r} f,     g(r,theta) = (1/r) int_0^r rho f d rho,
// all evaluated at the nodes of one grid. The named kinds are separable,
// f = R(r) Q(theta), and use closed-form radial integrals; custom sources
// supply analytic evaluators for f, grad f, and the Hessian entries, and get
// their cumulative integrals from the grid quadrature.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "discflow/spectral.hpp"

namespace discflow {

enum class SourceKind { constant, gaussian_center, gaussian_ring, quadrupole, custom };

std::string to_string(SourceKind kind);

// Pointwise evaluators for a custom source; all six are required.
struct CustomSource {
    std::function<double(double, double)> f;     // f(r, theta)
    std::function<double(double, double)> f_r;   // d f / d r
    std::function<double(double, double)> f_t;   // d f / d theta
    std::function<double(double, double)> f_rr;  // d2 f / d r2
    std::function<double(double, double)> f_rt;  // d2 f / d r d theta
    std::function<double(double, double)> f_tt;  // d2 f / d theta2
    std::string name = "custom";
};

class Source {
  public:
    // kind != custom; params: constant -> {value}, gaussians -> {a} in
    // exp(-a r^2) / exp(-a (1-r)^2), quadrupole -> {}. Missing params default
    // to value = 1, a = 4.
    Source(SourceKind kind, const std::vector<double>& params, const PolarGrid& grid);
    Source(const CustomSource& custom, const PolarGrid& grid);

    const PolarGrid& grid() const { return *grid_; }
    SourceKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    // Values at grid node (radius index i, collocation angle index j).
    double f(int i, int j) const;
    double f_r(int i, int j) const;
    double f_t(int i, int j) const;
    double f_rr(int i, int j) const;
    double f_rt(int i, int j) const;
    double f_tt(int i, int j) const;
    double g(int i, int j) const;
    double g_t(int i, int j) const;
    double g_tt(int i, int j) const;

    // Cumulative flux profile F(r_i).
    double F(int i) const;
    const std::vector<double>& flux_profile() const { return F_; }

    double mean() const { return mean_; }  // <f> over the disc
    double c0() const { return c0_; }      // <|f|^2 + |grad f|^2 + |grad grad f|^2>

    SpectralScalar sample_f() const;
    SpectralScalar sample_g() const;

  private:
    void finalize();

    const PolarGrid* grid_;
    SourceKind kind_;
    std::string name_;
    bool separable_ = true;

    // Separable storage: f = R(r) Q(theta), g = G(r) Q(theta).
    std::vector<double> R_, Rp_, Rpp_, G_;
    std::vector<double> Q_, Qp_, Qpp_;

    // General storage (custom kind): tables indexed [i * ntheta + j].
    std::vector<double> tf_, tfr_, tft_, tfrr_, tfrt_, tftt_, tg_, tgt_, tgtt_;

    std::vector<double> F_;
    double mean_ = 0.0;
    double c0_ = 0.0;
};

// Parse "name" or "name:p1,p2" and build the source. Recognized names:
// constant, gaussian-center, gaussian-ring, quadrupole.
Source make_source(const std::string& spec, const PolarGrid& grid);
Source make_source(SourceKind kind, const std::vector<double>& params,
                   const PolarGrid& grid);

}  // namespace discflow
