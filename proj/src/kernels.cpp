#include "hpa/kernels.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>

namespace hpa {

DelayKernel DelayKernel::dirac(double tau) {
    if (!(tau >= 0.0))
        throw validation_error("DelayKernel::dirac: tau must be >= 0");
    return DelayKernel(Kind::dirac, tau, 0, 0.0);
}

DelayKernel DelayKernel::gamma(int n, double beta) {
    if (n < 1)
        throw validation_error("DelayKernel::gamma: integer shape n must be >= 1");
    if (!(beta > 0.0))
        throw validation_error("DelayKernel::gamma: beta must be positive");
    return DelayKernel(Kind::gamma, 0.0, n, beta);
}

double DelayKernel::mean() const {
    return is_dirac() ? tau_ : static_cast<double>(n_) * beta_;
}

std::complex<double> DelayKernel::laplace(std::complex<double> z) const {
    if (is_dirac())
        return std::exp(-tau_ * z);
    const std::complex<double> d = beta_ * z + 1.0;
    if (std::abs(d) < 1e-12)
        throw pole_error("DelayKernel::laplace: evaluation at the Gamma transform pole");
    return std::pow(d, -n_);
}

double DelayKernel::density(double s) const {
    if (s < 0.0)
        return 0.0;
    if (is_dirac())
        return s == tau_ ? std::numeric_limits<double>::infinity() : 0.0;
    // s^{n-1} e^{-s/beta} / (beta^n (n-1)!), via logs for large n
    double logf = -s / beta_ - static_cast<double>(n_) * std::log(beta_) -
                  std::lgamma(static_cast<double>(n_));
    if (n_ > 1)
        logf += (n_ - 1) * std::log(s);
    else if (s == 0.0)
        return 1.0 / beta_; // n=1: exponential density
    return std::exp(logf);
}

double DelayKernel::dirac_tau() const {
    if (!is_dirac())
        throw validation_error("DelayKernel: not a Dirac kernel");
    return tau_;
}

int DelayKernel::gamma_n() const {
    if (is_dirac())
        throw validation_error("DelayKernel: not a Gamma kernel");
    return n_;
}

double DelayKernel::gamma_beta() const {
    if (is_dirac())
        throw validation_error("DelayKernel: not a Gamma kernel");
    return beta_;
}

namespace {

// common Gamma scale of a group of kernels, or -1 when scales conflict
double common_scale(std::initializer_list<const DelayKernel*> ks) {
    double beta = 0.0;
    for (const auto* k : ks) {
        if (k->pole_order() == 0)
            continue;
        if (beta == 0.0)
            beta = k->scale();
        else if (std::abs(beta - k->scale()) > 1e-12 * beta)
            return -1.0;
    }
    return beta;
}

} // namespace

bool KernelSet::admissible() const {
    // H32 = H1*H31 in the e^{-tau z}(beta z+1)^{-n} factorization
    const double tau_sum = h1.exp_delay() + h31.exp_delay();
    if (std::abs(h32.exp_delay() - tau_sum) > 1e-12 * (1.0 + tau_sum))
        return false;
    if (h32.pole_order() != h1.pole_order() + h31.pole_order())
        return false;
    return common_scale({&h1, &h31, &h32}) >= 0.0 && product_form();
}

bool KernelSet::product_form() const {
    return common_scale({&h1, &h2, &h31, &h32}) >= 0.0;
}

double convolution_mean(const DelayKernel& k1, const DelayKernel& k2) {
    return k1.mean() + k2.mean();
}

std::pair<std::complex<double>, std::complex<double>>
combined_laplace(const KernelSet& ks, std::complex<double> z) {
    const auto H1 = ks.h1.laplace(z);
    const auto H2 = ks.h2.laplace(z);
    const auto H31 = ks.h31.laplace(z);
    const auto H32 = ks.h32.laplace(z);
    return {H2 * H32, H1 * H2 * H31};
}

} // namespace hpa
