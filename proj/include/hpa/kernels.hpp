#pragma once

#include <complex>
#include <utility>

#include "hpa/errors.hpp"

namespace hpa {

/// A delay kernel: a probability density on [0, inf) weighting past states.
/// Two variants are supported:
///   Dirac(tau):    h(s) = delta(s - tau),  Laplace transform e^{-tau z}
///   Gamma(n,beta): h(s) = s^{n-1} e^{-s/beta} / (beta^n (n-1)!),
///                  Laplace transform (beta z + 1)^{-n}, integer shape n >= 1.
///
/// Every kernel's transform has the form e^{-tau z} (beta z + 1)^{-n}; the
/// exp_delay()/pole_order()/scale() accessors expose that factorization,
/// which is what the admissibility checks and the characteristic equation
/// operate on.
class DelayKernel {
  public:
    enum class Kind { dirac, gamma };

    static DelayKernel dirac(double tau);
    static DelayKernel gamma(int n, double beta);

    Kind kind() const { return kind_; }
    bool is_dirac() const { return kind_ == Kind::dirac; }

    /// Mean delay: tau for Dirac, n*beta for Gamma.
    double mean() const;

    /// Laplace transform H(z). Throws pole_error when beta*z+1 ~= 0.
    std::complex<double> laplace(std::complex<double> z) const;

    /// Density h(s), s >= 0 (Dirac returns 0 for s != tau; use only for
    /// Gamma quadrature).
    double density(double s) const;

    double exp_delay() const { return tau_; } ///< tau (0 for Gamma)
    int pole_order() const { return n_; }     ///< n (0 for Dirac)
    double scale() const { return beta_; }    ///< beta (0 for Dirac)

    double dirac_tau() const;  ///< throws unless Dirac
    int gamma_n() const;       ///< throws unless Gamma
    double gamma_beta() const; ///< throws unless Gamma

  private:
    DelayKernel(Kind kind, double tau, int n, double beta)
        : kind_(kind), tau_(tau), n_(n), beta_(beta) {}

    Kind kind_;
    double tau_;  // dirac only
    int n_;       // gamma only
    double beta_; // gamma only
};

/// The kernel quadruple of the model: h1 (CRH->ACTH transport), h2
/// (ACTH->CORT transport), h31/h32 (CORT feedback onto CRH/ACTH).
struct KernelSet {
    DelayKernel h1, h2, h31, h32;

    /// True when H32(z) = H1(z)*H31(z) holds structurally, i.e. the delays
    /// satisfy tau32 = tau1 + tau31, the pole orders satisfy n32 = n1 + n31,
    /// and all Gamma scales coincide. Required by the bifurcation analysis;
    /// simulation does not need it.
    bool admissible() const;

    /// True when H2*H32 = e^{-tau z} (beta z + 1)^{-n}: a single common Gamma
    /// scale (or none). Heterogeneous scales are simulation-only.
    bool product_form() const;
};

/// Mean of the convolution h1 * h2 (sum of independent delays).
double convolution_mean(const DelayKernel& k1, const DelayKernel& k2);

/// The two kernel products entering the characteristic equation:
/// {H2(z)H32(z), H1(z)H2(z)H31(z)}. Equal when the set is admissible.
std::pair<std::complex<double>, std::complex<double>>
combined_laplace(const KernelSet& ks, std::complex<double> z);

} // namespace hpa
