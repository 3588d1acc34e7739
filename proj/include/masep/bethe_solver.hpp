#pragma once

#include "masep/eigen_setup.hpp"
#include <Eigen/LU>

#include <numeric>
#include <random>

#include "masep/bethe.hpp"
#include "masep/spectra.hpp"

namespace masep {

/// Quantum numbers I_j of the second-largest (gap) state: the symmetric band
/// with the top entry pushed up by one unit. sign = -1 picks I^-, +1 the
/// mirrored I^+ = -I^-. Half-integers for even n1, integers for odd n1.
inline std::vector<double> gap_quantum_numbers(int n1, int sign = -1) {
    std::vector<double> I(n1);
    for (int j = 1; j <= n1 - 1; ++j) I[j - 1] = -(n1 + 1) / 2.0 + j;
    I[n1 - 1] = (n1 + 1) / 2.0;
    if (sign > 0)
        for (double& v : I) v = -v;
    return I;
}

struct OneSpeciesSolution {
    BetheRootSet roots;
    std::vector<Complex> x;  // roots in the hop-count variable
    Complex energy = 0;
    double residual = 0;
    int newton_iterations = 0;
    bool converged = false;
};

namespace detail {

/// Logarithmic one-species Bethe system in the x variable,
/// p lambda_j = (1-x_j)/(1-t x_j) with t = q/p:
///   F_j = (L/2pi i)[log(1-x_j) - rho log x_j - log(1-t x_j)] - I_j
///         + (1/2pi i) sum_k [log x_k - log(1-t x_k/x_j) + log(1-t x_j/x_k)]
struct OneSpeciesSystem {
    int L;
    int n1;
    double t;  // q/p
    std::vector<double> I;

    Eigen::VectorXcd residual(const Eigen::VectorXcd& x) const {
        const Complex two_pi_i(0, 2 * M_PI);
        const double rho = double(n1) / L;
        Complex sum_log = 0;
        for (int k = 0; k < n1; ++k) sum_log += std::log(x(k));
        Eigen::VectorXcd F(n1);
        for (int j = 0; j < n1; ++j) {
            Complex v = double(L) * (std::log(1.0 - x(j)) - rho * std::log(x(j)) - std::log(1.0 - t * x(j)));
            v += sum_log;
            for (int k = 0; k < n1; ++k) {
                if (k == j) continue;
                v -= std::log(1.0 - t * x(k) / x(j));
                v += std::log(1.0 - t * x(j) / x(k));
            }
            F(j) = v / two_pi_i - I[j];
        }
        return F;
    }

    Eigen::MatrixXcd jacobian(const Eigen::VectorXcd& x) const {
        const Complex two_pi_i(0, 2 * M_PI);
        const double rho = double(n1) / L;
        Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n1, n1);
        for (int j = 0; j < n1; ++j) {
            Complex diag = double(L) * (-1.0 / (1.0 - x(j)) - rho / x(j) + t / (1.0 - t * x(j)));
            diag += 1.0 / x(j);
            for (int k = 0; k < n1; ++k) {
                if (k == j) continue;
                diag -= (t * x(k) / (x(j) * x(j))) / (1.0 - t * x(k) / x(j));
                diag -= (t / x(k)) / (1.0 - t * x(j) / x(k));
                Complex off = 1.0 / x(k);
                off += (t / x(j)) / (1.0 - t * x(k) / x(j));
                off += (t * x(j) / (x(k) * x(k))) / (1.0 - t * x(j) / x(k));
                J(j, k) = off / two_pi_i;
            }
            J(j, j) = diag / two_pi_i;
        }
        return J;
    }
};

inline bool newton_solve(const OneSpeciesSystem& sys, Eigen::VectorXcd& x, double tol, int max_iter, int& iters,
                         double& final_resid) {
    for (iters = 0; iters < max_iter; ++iters) {
        Eigen::VectorXcd F = sys.residual(x);
        final_resid = F.cwiseAbs().maxCoeff();
        if (!std::isfinite(final_resid)) return false;
        if (final_resid <= tol) return true;
        Eigen::VectorXcd step = sys.jacobian(x).partialPivLu().solve(-F);
        if (!step.allFinite()) return false;
        double damp = 1.0;
        for (int h = 0; h < 12; ++h) {
            double r = sys.residual(x + damp * step).cwiseAbs().maxCoeff();
            if (std::isfinite(r) && r < final_resid) break;
            damp /= 2;
        }
        x += damp * step;
    }
    final_resid = sys.residual(x).cwiseAbs().maxCoeff();
    return final_resid <= tol;
}

/// Scalar solve of (L/2pi i)[log(1-x) - rho log x - log(1-t x)] + c = I by
/// Newton from a polar grid seed; used only to assemble base-case states.
inline Complex decoupled_seed(int L, double rho, double t, double target, Complex correction) {
    auto h = [&](Complex x) {
        return (double(L) * (std::log(1.0 - x) - rho * std::log(x) - std::log(1.0 - t * x))) /
                   Complex(0, 2 * M_PI) +
               correction - target;
    };
    Complex best_x = 0.5;
    double best = std::numeric_limits<double>::infinity();
    for (double r : {0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.5, 5.0}) {
        for (int a = 0; a < 48; ++a) {
            Complex x = std::polar(r, 2 * M_PI * (a + 0.5) / 48);
            double v = std::abs(h(x));
            if (std::isfinite(v) && v < best) {
                best = v;
                best_x = x;
            }
        }
    }
    Complex x = best_x;
    for (int it = 0; it < 80; ++it) {
        Complex F = h(x);
        if (std::abs(F) < 1e-13) break;
        Complex dh = (double(L) * (-1.0 / (1.0 - x) - rho / x + t / (1.0 - t * x))) / Complex(0, 2 * M_PI);
        Complex step = -F / dh;
        if (std::abs(step) > 0.5 * std::abs(x)) step *= 0.5 * std::abs(x) / std::abs(step);
        x += step;
    }
    return x;
}

}  // namespace detail

/// Solves the one-species logarithmic Bethe equations for given quantum
/// numbers. Expects p > q >= 0 and n1 <= L/2 (relabel via the reflection and
/// particle-hole symmetries otherwise); p == q is answered by the closed
/// one-magnon form. Gap states at large L are reached by continuation in L
/// at fixed density, reusing solved sizes as Newton starts.
class OneSpeciesSolver {
public:
    OneSpeciesSolver(double p, double q) : p_(p), q_(q) {
        if (p < 0 || q < 0 || p + q <= 0) throw InvalidArgument("need nonnegative rates with p+q > 0");
        if (p < q) throw InvalidArgument("solver expects p >= q (relabel via reflection)");
    }

    /// Gap (second-largest) state for the sector (L-n1, n1).
    const OneSpeciesSolution& solve_gap(int L, int n1, int sign = -1) {
        if (n1 < 1 || 2 * n1 > L) throw InvalidArgument("need 1 <= n1 <= L/2");
        auto key = std::make_tuple(L, n1, sign);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        if (p_ == q_) return cache_.emplace(key, ssep_one_magnon(L, n1)).first->second;

        const int g = std::gcd(L, n1);
        const int b = L / g, a = n1 / g;  // density a/b in lowest terms
        std::vector<int> ladder;          // multipliers m: ring sizes m*b
        int m0 = std::max(1, (11 + b) / b);
        if (m0 >= g) {
            ladder = {g};
        } else {
            for (int m = m0; m < g; m = std::min(g, std::max(m + 1, m * 3 / 2))) ladder.push_back(m);
            ladder.push_back(g);
        }
        const OneSpeciesSolution* prev = nullptr;
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            int m = ladder[i];
            auto k = std::make_tuple(m * b, m * a, sign);
            auto hit = cache_.find(k);
            if (hit != cache_.end()) {
                prev = &hit->second;
                continue;
            }
            auto attempt = try_solve(m * b, m * a, sign, prev);
            if (!attempt.converged && prev) {
                // bisect the continuation step once
                int pm = prev->roots.L / b;
                int mid = (pm + m) / 2;
                if (mid > pm && mid < m) {
                    auto midsol = try_solve(mid * b, mid * a, sign, prev);
                    if (midsol.converged) {
                        prev = &cache_.emplace(std::make_tuple(mid * b, mid * a, sign), std::move(midsol))
                                    .first->second;
                        attempt = try_solve(m * b, m * a, sign, prev);
                    }
                }
            }
            if (!attempt.converged)
                throw NonConvergence("one-species Newton failed at L=" + std::to_string(m * b));
            prev = &cache_.emplace(k, std::move(attempt)).first->second;
        }
        return *prev;
    }

    OneSpeciesSolution solve(int L, int n1, const std::vector<double>& quantum_numbers,
                             const std::vector<Complex>& start) {
        check_parity(n1, quantum_numbers);
        detail::OneSpeciesSystem sys{L, n1, q_ / p_, quantum_numbers};
        Eigen::VectorXcd x(n1);
        for (int j = 0; j < n1; ++j) x(j) = start[j];
        OneSpeciesSolution sol;
        sol.converged = detail::newton_solve(sys, x, 1e-12, 200, sol.newton_iterations, sol.residual);
        if (!sol.converged) throw NonConvergence("one-species Newton did not reach 1e-12");
        sol.x.assign(x.data(), x.data() + n1);
        finalize(L, n1, sol);
        return sol;
    }

    /// Seed-free variant: decoupled scalar solves provide the Newton start,
    /// with widening multistart wobbles on divergence.
    OneSpeciesSolution solve(int L, int n1, const std::vector<double>& quantum_numbers) {
        check_parity(n1, quantum_numbers);
        const double t = q_ / p_, rho = double(n1) / L;
        std::vector<Complex> seed(n1);
        Complex corr = 0;
        for (int pass = 0; pass < 40; ++pass) {
            Complex sum_log = 0;
            for (int j = 0; j < n1; ++j) {
                seed[j] = detail::decoupled_seed(L, rho, t, quantum_numbers[j], corr);
                sum_log += std::log(seed[j]);
            }
            Complex new_corr = sum_log / Complex(0, 2 * M_PI);
            if (std::abs(new_corr - corr) < 1e-10) break;
            corr = 0.5 * corr + 0.5 * new_corr;
        }
        std::mt19937 rng(13579u);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int attempt = 0; attempt < 120; ++attempt) {
            std::vector<Complex> start(n1);
            double wobble = attempt == 0 ? 0.0 : 0.05 + 0.2 * ((attempt - 1) % 5);
            for (int j = 0; j < n1; ++j) start[j] = seed[j] * (1.0 + wobble * Complex(g(rng), g(rng)));
            try {
                return solve(L, n1, quantum_numbers, start);
            } catch (const NonConvergence&) {
            }
        }
        throw NonConvergence("one-species Newton did not converge from the decoupled seeds");
    }

    double p() const { return p_; }
    double q() const { return q_; }

private:
    static void check_parity(int n1, const std::vector<double>& I) {
        const double frac = (n1 % 2 == 0) ? 0.5 : 0.0;  // I_j in Z + (1+(-1)^n1)/4
        for (double v : I) {
            double r = v - std::floor(v);
            if (std::abs(r - frac) > 1e-9 && std::abs(r - frac - 1) > 1e-9 && std::abs(r - frac + 1) > 1e-9)
                throw InvalidArgument("quantum numbers violate the parity rule");
        }
    }

    OneSpeciesSolution ssep_one_magnon(int L, int n1) const {
        OneSpeciesSolution sol;
        sol.converged = true;
        std::vector<Complex> level(n1, 1.0 / p_);
        level[0] = std::polar(1.0, 2 * M_PI / L) / p_;
        sol.roots.L = L;
        sol.roots.p = p_;
        sol.roots.q = q_;
        sol.roots.nesting = NestingOrder::standard(2);
        sol.roots.counts = {L - n1, n1};
        sol.roots.levels = {level};
        sol.energy = -4.0 * p_ * std::pow(std::sin(M_PI / L), 2);
        return sol;
    }

    OneSpeciesSolution try_solve(int L, int n1, int sign, const OneSpeciesSolution* prev) {
        if (!(prev && int(prev->x.size()) >= 3)) return base_solve(L, n1, sign);
        auto I = gap_quantum_numbers(n1, sign);
        std::vector<Complex> start(n1);
        interpolate_start(*prev, L, n1, sign, start);
        detail::OneSpeciesSystem sys{L, n1, q_ / p_, I};
        Eigen::VectorXcd x(n1);
        for (int j = 0; j < n1; ++j) x(j) = start[j];
        OneSpeciesSolution sol;
        sol.converged = detail::newton_solve(sys, x, 1e-12, 200, sol.newton_iterations, sol.residual);
        if (sol.converged) {
            sol.x.assign(x.data(), x.data() + n1);
            finalize(L, n1, sol);
        }
        return sol;
    }

    /// Base rung of the continuation ladder: deterministic multistart around
    /// the decoupled seeds, anchored to the exact second-largest eigenvalue
    /// from diagonalization whenever the sector is small enough to afford it
    /// (the log-form system has spurious same-quantum-number solutions).
    OneSpeciesSolution base_solve(int L, int n1, int sign) {
        auto I = gap_quantum_numbers(n1, sign);
        const double t = q_ / p_, rho = double(n1) / L;
        std::vector<Complex> seed(n1);
        Complex corr = 0;
        for (int pass = 0; pass < 40; ++pass) {
            Complex sum_log = 0;
            for (int j = 0; j < n1; ++j) {
                seed[j] = detail::decoupled_seed(L, rho, t, I[j], corr);
                sum_log += std::log(seed[j]);
            }
            Complex new_corr = sum_log / Complex(0, 2 * M_PI);
            if (std::abs(new_corr - corr) < 1e-10) break;
            corr = 0.5 * corr + 0.5 * new_corr;
        }

        std::optional<Complex> anchor;
        if (sector_dimension(Sector::from_parts({L - n1, n1})) <= 2500) {
            auto sl = second_largest(sector_spectrum(Sector::from_parts({L - n1, n1}), p_, q_));
            anchor = sl.Eplus;
        }

        detail::OneSpeciesSystem sys{L, n1, t, I};
        std::mt19937 rng(987654321u);
        std::normal_distribution<double> g(0.0, 1.0);
        OneSpeciesSolution best;
        for (int attempt = 0; attempt < 400; ++attempt) {
            Eigen::VectorXcd x(n1);
            double wobble = attempt == 0 ? 0.0 : 0.05 + 0.25 * ((attempt - 1) % 4);
            for (int j = 0; j < n1; ++j)
                x(j) = seed[j] * (1.0 + wobble * Complex(g(rng), g(rng))) + 0.02 * wobble * Complex(g(rng), g(rng));
            OneSpeciesSolution sol;
            sol.converged = detail::newton_solve(sys, x, 1e-12, 150, sol.newton_iterations, sol.residual);
            if (!sol.converged) continue;
            sol.x.assign(x.data(), x.data() + n1);
            finalize(L, n1, sol);
            if (anchor) {
                if (std::abs(sol.energy.real() - anchor->real()) < 1e-6 &&
                    std::abs(std::abs(sol.energy.imag()) - std::abs(anchor->imag())) < 1e-6)
                    return sol;
                continue;  // converged to a spurious branch
            }
            // unanchored fallback: keep the largest real part
            if (!best.converged || sol.energy.real() > best.energy.real()) best = sol;
        }
        if (!anchor && best.converged) return best;
        return {};  // unconverged marker
    }

    /// Seed the size-(L,n1) state from a smaller solved state: band roots are
    /// interpolated in the filling parameter I_j/L, the excited endpoint root
    /// carried over directly.
    void interpolate_start(const OneSpeciesSolution& prev, int L, int n1, int sign,
                           std::vector<Complex>& start) const {
        const int pn = int(prev.x.size());
        const int pL = prev.roots.L;
        auto pI = gap_quantum_numbers(pn, sign);
        auto I = gap_quantum_numbers(n1, sign);
        std::vector<int> order(pn - 1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) { return pI[i] < pI[j]; });
        std::vector<double> tau(pn - 1);
        std::vector<Complex> px(pn - 1);
        for (int j = 0; j < pn - 1; ++j) {
            tau[j] = pI[order[j]] / pL;
            px[j] = prev.x[order[j]];
        }
        for (int j = 0; j < n1 - 1; ++j) {
            double t = I[j] / L;
            if (t <= tau.front()) {
                start[j] = px.front();
            } else if (t >= tau.back()) {
                start[j] = px.back();
            } else {
                auto hi = std::upper_bound(tau.begin(), tau.end(), t);
                int i1 = int(hi - tau.begin()), i0 = i1 - 1;
                double w = (t - tau[i0]) / (tau[i1] - tau[i0]);
                start[j] = (1 - w) * px[i0] + w * px[i1];
            }
        }
        start[n1 - 1] = prev.x[pn - 1];
    }

    void finalize(int L, int n1, OneSpeciesSolution& sol) const {
        const double t = q_ / p_;
        std::vector<Complex> level(n1);
        Complex e = 0;
        for (int j = 0; j < n1; ++j) {
            level[j] = (1.0 - sol.x[j]) / (p_ * (1.0 - t * sol.x[j]));
            e += (p_ - q_) * (sol.x[j] / (1.0 - sol.x[j]) - t * sol.x[j] / (1.0 - t * sol.x[j]));
        }
        sol.roots.L = L;
        sol.roots.p = p_;
        sol.roots.q = q_;
        sol.roots.nesting = NestingOrder::standard(2);
        sol.roots.counts = {L - n1, n1};
        sol.roots.levels = {level};
        sol.energy = e;
    }

    double p_, q_;
    std::map<std::tuple<int, int, int>, OneSpeciesSolution> cache_;
};

}  // namespace masep
