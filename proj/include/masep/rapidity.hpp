#pragma once

#include "masep/transfer.hpp"

namespace masep {

/// Spectral-parameter change to the difference form: q/p = e^{-2 eta},
/// lambda~(u) = (1/p) e^{eta} sh(eta u / 2) / sh(eta (u+2)/2), with the
/// Bethe roots sitting at lambda_j = lambda~(u_j - 1).
class RapidityMap {
public:
    RapidityMap(double p, double q) : p_(p), q_(q) {
        if (p <= 0 || q <= 0) throw InvalidArgument("rapidity form needs p, q > 0 (eta would be infinite)");
        eta_ = 0.5 * std::log(p / q);
    }

    double eta() const { return eta_; }
    double delta() const { return std::cosh(eta_); }

    Complex lambda_tilde(Complex u) const {
        return std::exp(eta_) / p_ * std::sinh(eta_ * u / 2.0) / std::sinh(eta_ * (u + 2.0) / 2.0);
    }

    Complex momentum_tilde(Complex u) const {
        return -Complex(0, 1) * std::log(std::sinh(eta_ * u / 2.0) / std::sinh(eta_ * (u + 2.0) / 2.0));
    }

    Complex u_to_lambda(Complex u) const { return lambda_tilde(u - 1.0); }

    /// Inverse of u_to_lambda on the principal strip:
    /// u = (2/eta) artanh[ th(eta/2) (1 + p lambda e^{-eta}) / (1 - p lambda e^{-eta}) ].
    Complex lambda_to_u(Complex lambda) const {
        Complex mu = p_ * lambda * std::exp(-eta_);
        if (mu == Complex(1.0)) throw PoleError("lambda at the image of u = infinity");
        Complex w = std::atanh(std::tanh(eta_ / 2.0) * (1.0 + mu) / (1.0 - mu));
        return 2.0 * w / eta_;
    }

    Complex lambda_to_momentum(Complex lambda) const {
        return -Complex(0, 1) * std::log(p_ * lambda * std::exp(-eta_));
    }

    /// E-contribution of one first-level root in rapidity form.
    Complex energy_term(Complex u) const {
        Complex den = std::cosh(eta_ * u) - std::cosh(eta_);
        if (std::abs(den) == 0.0) throw PoleError("rapidity energy pole");
        return 2.0 * std::sqrt(p_ * q_) * std::pow(std::sinh(eta_), 2) / den;
    }

    /// R~(u) = R(lambda~(u)): six-vertex weights with the asymmetry gauge.
    RMatrix<Complex> r_matrix(Complex u, int N) const {
        return build_r_matrix<Complex>(lambda_tilde(u), p_, q_, N);
    }

    /// Entries of Eq.-form weights, for checking against the R-matrix route.
    Complex weight_pass(Complex u, bool lower_to_upper) const {
        double sgn = lower_to_upper ? -1.0 : 1.0;  // alpha<beta carries e^{-eta}
        return std::exp(sgn * eta_) * std::sinh(eta_ * u / 2.0) / std::sinh(eta_ * (u + 2.0) / 2.0);
    }
    Complex weight_swap(Complex u, bool lower_to_upper) const {
        double sgn = lower_to_upper ? 1.0 : -1.0;  // alpha<beta carries e^{+eta u/2}
        return std::exp(sgn * eta_ * u / 2.0) * std::sinh(eta_) / std::sinh(eta_ * (u + 2.0) / 2.0);
    }

    /// Difference-form Yang-Baxter residual:
    /// R~23(u2) R~13(u1) R~12(u1-u2) - R~12(u1-u2) R~13(u1) R~23(u2).
    double ybe_residual(Complex u1, Complex u2, int N) const {
        auto R12 = r_matrix(u1 - u2, N);
        auto R13 = r_matrix(u1, N);
        auto R23 = r_matrix(u2, N);
        std::size_t dim = std::size_t(N) * N * N;
        double mx = 0;
        for (std::size_t col = 0; col < dim; ++col) {
            std::vector<Complex> e(dim, 0.0);
            e[col] = 1.0;
            auto lhs = apply_r_sites(R23, 2, 3, 3, apply_r_sites(R13, 1, 3, 3, apply_r_sites(R12, 1, 2, 3, e)));
            auto rhs = apply_r_sites(R12, 1, 2, 3, apply_r_sites(R13, 1, 3, 3, apply_r_sites(R23, 2, 3, 3, e)));
            for (std::size_t r = 0; r < dim; ++r) mx = std::max(mx, std::abs(lhs[r] - rhs[r]));
        }
        return mx;
    }

private:
    double p_, q_, eta_;
};

enum class RapidityDirection { lambda_to_u, u_to_lambda, lambda_to_momentum };

inline Complex rapidity_transform(Complex value, RapidityDirection dir, double p, double q) {
    RapidityMap map(p, q);
    switch (dir) {
        case RapidityDirection::lambda_to_u:
            return map.lambda_to_u(value);
        case RapidityDirection::u_to_lambda:
            return map.u_to_lambda(value);
        case RapidityDirection::lambda_to_momentum:
            return map.lambda_to_momentum(value);
    }
    throw InvalidArgument("unknown rapidity direction");
}

}  // namespace masep
