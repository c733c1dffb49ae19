// Polar grid on the unit disc: boundary-clustered radial nodes crossed with
// uniform theta collocation. Radial nodes come from the map r(s) = 1-(1-s)^p
// on a uniform s-grid, so spacing near r=1 shrinks like (1/nr)^p while the
// bulk stays close to uniform. There is no node at r=0; fields are closed at
// the pole by parity (a Fourier mode m is even/odd in r according to m).
//
// All radial calculus (first/second derivative rows, disc quadrature,
// cumulative integrals) is built once per grid from local 5-point polynomial
// stencils on the mapped nodes.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace discflow {

// Finite-difference weights for the m-th derivative at point x0 from
// arbitrary nodes (Fornberg's recursion). weights[k][j] multiplies f(x[j])
// in the k-th derivative, k = 0..maxorder.
std::vector<std::vector<double>> fornberg_weights(double x0,
                                                  const std::vector<double>& x,
                                                  int maxorder);

// One row of a banded derivative operator: columns [first, first+weights.size())
// of the coefficient vector, with pole-ghost contributions already folded in.
struct StencilRow {
    int first = 0;
    std::vector<double> w;
};

class PolarGrid {
  public:
    // nr >= 16 radial nodes, modes >= 4 theta-Fourier modes (m = 0..modes-1),
    // stretch_exponent >= 1 controls boundary clustering.
    PolarGrid(int nr, int modes, double stretch_exponent);

    int nr() const { return nr_; }
    int modes() const { return modes_; }
    int ntheta() const { return ntheta_; }
    double stretch_exponent() const { return stretch_; }

    const std::vector<double>& r_nodes() const { return r_; }
    double r(int i) const { return r_[i]; }
    double theta(int j) const { return theta_[j]; }
    const std::vector<double>& theta_nodes() const { return theta_; }

    // Weights w_i for integrals over the disc: int_0^1 phi(r) r dr = sum w_i phi(r_i).
    // sum(w) = 1/2, so 2*pi*sum(w) is the disc area.
    const std::vector<double>& quad_weights() const { return w_; }

    // int_0^1 phi(r) r dr by the grid quadrature.
    double integrate_radial(const std::vector<double>& phi) const;

    // Cumulative integral G(r_i) = int_0^{r_i} phi(rho) rho d rho for samples
    // phi(r_j); the integrand is taken to vanish at rho = 0 together with the
    // rho factor, which closes the first panel.
    std::vector<double> cumulative_radial(const std::vector<double>& phi) const;

    // d/dr rows for general differentiation: interior centered stencils with
    // one-sided closures at both endpoints (no assumption about behavior
    // across the pole). Mode-independent; the argument is kept so call sites
    // read naturally.
    const std::vector<StencilRow>& deriv1(int = 0) const { return d1_; }
    const std::vector<StencilRow>& deriv2(int = 0) const { return d2_; }

    // Parity-closed variants for radial boundary-value operators: the rows
    // next to the pole fold ghost nodes at -r_j with the sign (-1)^m, which
    // encodes regularity of Fourier mode m across the origin.
    const std::vector<StencilRow>& parity_deriv1(int m) const {
        return (m % 2 == 0) ? d1_even_ : d1_odd_;
    }
    const std::vector<StencilRow>& parity_deriv2(int m) const {
        return (m % 2 == 0) ? d2_even_ : d2_odd_;
    }

    // Apply a stencil-row operator to a radial array.
    static std::vector<double> apply(const std::vector<StencilRow>& rows,
                                     const std::vector<double>& a);

    bool same_as(const PolarGrid& other) const { return this == &other; }

  private:
    void build_nodes();
    void build_quadrature();
    void build_derivatives();

    int nr_;
    int modes_;
    int ntheta_;
    double stretch_;
    std::vector<double> r_;
    std::vector<double> theta_;
    std::vector<double> w_;
    // Per-interval cumulative weights: cw_[i] holds weights on nodes
    // [cfirst_[i], ...) for int_{r_{i-1}}^{r_i} phi rho d rho (r_0 := 0).
    std::vector<std::vector<double>> cw_;
    std::vector<int> cfirst_;
    std::vector<StencilRow> d1_, d2_;
    std::vector<StencilRow> d1_even_, d1_odd_, d2_even_, d2_odd_;
};

PolarGrid make_grid(int nr, int modes, double stretch_exponent);

}  // namespace discflow
