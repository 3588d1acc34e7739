#pragma once

#include "masep/spectra.hpp"
#include "masep/transfer.hpp"

namespace masep {

/// Weight functions of the nested Bethe ansatz.
struct Weights {
    Complex f, g, fbar, gbar, xi, d;
};

inline Complex weight_f(Complex lambda, Complex mu, double p, double q) {
    Complex den = p * (lambda - mu);
    if (std::abs(den) == 0.0) throw PoleError("f(lambda,mu) pole at lambda == mu");
    return (1.0 - (p + q) * mu + p * q * lambda * mu) / den;
}

inline Weights weight_functions(Complex lambda, Complex mu, double p, double q, int L = 1) {
    Weights w;
    w.f = weight_f(lambda, mu, p, q);
    w.g = (1.0 - q * lambda) * (1.0 - p * mu) / (p * (lambda - mu));
    w.fbar = (p / q) * w.f;
    w.gbar = (1.0 - p * lambda) * (1.0 - q * mu) / (q * (lambda - mu));
    w.xi = ybe_argument<Complex>(lambda, mu, p, q);
    w.d = std::pow(Complex(p) * lambda, L);
    return w;
}

/// Which species plays the vacuum at each nesting level.
struct NestingOrder {
    std::vector<int> a;  // permutation of 1..N

    int N() const { return int(a.size()); }

    void validate() const {
        std::vector<int> seen(a.size() + 1, 0);
        for (int v : a) {
            if (v < 1 || v > N() || seen[v]++) throw InvalidArgument("nesting order must permute 1..N");
        }
    }

    /// theta_{ij} = 1 if a_i > a_j else 0 (1-based levels).
    int theta(int i, int j) const { return a[i - 1] > a[j - 1] ? 1 : 0; }

    static NestingOrder standard(int N) {
        NestingOrder o;
        o.a.resize(N);
        for (int i = 0; i < N; ++i) o.a[i] = i + 1;
        return o;
    }
};

/// Nested root families lambda^{(l)}_j with the particle content and rates
/// they belong to. levels[l-1] holds level l; level sizes must satisfy
/// n_k = sum_{j>k} m_{a_j}.
struct BetheRootSet {
    int L = 0;
    double p = 0, q = 0;
    NestingOrder nesting;
    std::vector<int> counts;  // counts[j-1] = m_{a_j}
    std::vector<std::vector<Complex>> levels;

    int N() const { return nesting.N(); }

    /// n_k for k = 0..N-1 (n_0 = L).
    std::vector<int> level_sizes() const {
        std::vector<int> suffix(N() + 1, 0);
        for (int j = N(); j >= 1; --j) suffix[j - 1] = suffix[j] + counts[j - 1];
        std::vector<int> out(N());
        out[0] = L;
        for (int k = 1; k < N(); ++k) out[k] = suffix[k];
        return out;
    }

    /// nbar_k = sum_{j>k} m_{a_j} theta_{kj} for k = 1..N-1.
    std::vector<int> level_biases() const {
        std::vector<int> nbar(N(), 0);
        for (int k = 1; k <= N() - 1; ++k)
            for (int j = k + 1; j <= N(); ++j) nbar[k - 1] += counts[j - 1] * nesting.theta(k, j);
        return nbar;
    }

    void validate() const {
        nesting.validate();
        if (int(counts.size()) != N()) throw InvalidArgument("counts size must match nesting order");
        int total = 0;
        for (int c : counts) {
            if (c < 0) throw InvalidArgument("negative species count");
            total += c;
        }
        if (total != L) throw InvalidArgument("species counts must sum to L");
        if (int(levels.size()) != std::max(N() - 1, 0)) throw InvalidArgument("level list size must be N-1");
        auto n = level_sizes();
        for (int l = 1; l <= N() - 1; ++l)
            if (int(levels[l - 1].size()) != n[l])
                throw InvalidArgument("level " + std::to_string(l) + " must hold n_l = " + std::to_string(n[l]) +
                                      " roots");
    }

    /// Canonical within-level order (sort by real, then imaginary part).
    BetheRootSet canonicalized() const {
        BetheRootSet out = *this;
        for (auto& lv : out.levels)
            std::sort(lv.begin(), lv.end(), [](const Complex& x, const Complex& y) {
                if (x.real() != y.real()) return x.real() < y.real();
                return x.imag() < y.imag();
            });
        return out;
    }
};

namespace detail {

inline Complex qp_pow(double p, double q, int expo) {
    if (expo == 0) return 1.0;
    return std::pow(Complex(q / p), expo);
}

/// N(lambda, mu) = 1 - (p+q) mu + p q lambda mu; f = N / (p (lambda-mu)).
inline Complex weight_num(Complex lambda, Complex mu, double p, double q) {
    return 1.0 - (p + q) * mu + p * q * lambda * mu;
}

}  // namespace detail

/// Eigenvalue formula of the transfer matrix for an arbitrary nesting order.
/// Evaluation at (or near) a root uses a symmetric two-sided offset whose
/// Richardson average cancels a simple pole; the antisymmetric part is a
/// residual diagnostic (zero for true Bethe roots).
inline Complex transfer_eigenvalue(const BetheRootSet& roots, Complex lambda, double* pole_residual = nullptr) {
    roots.validate();
    const int N = roots.N();
    if (N == 0) throw InvalidArgument("empty nesting order");
    const double p = roots.p, q = roots.q;
    auto n = roots.level_sizes();
    auto nbar = roots.level_biases();

    auto evaluate = [&](Complex lam) {
        if (N == 1) return Complex(1.0);
        Complex d = std::pow(Complex(p) * lam, roots.L);
        Complex total = detail::qp_pow(p, q, -nbar[0]);
        for (Complex r : roots.levels[0]) total *= weight_f(r, lam, p, q);
        for (int k = 1; k <= N - 2; ++k) {
            int expo = -nbar[k];
            for (int j = 1; j <= k; ++j) expo += (n[j - 1] - n[j]) * roots.nesting.theta(j, k + 1);
            Complex term = d * detail::qp_pow(p, q, expo);
            for (Complex r : roots.levels[k - 1]) term *= weight_f(lam, r, p, q);
            for (Complex r : roots.levels[k]) term *= weight_f(r, lam, p, q);
            total += term;
        }
        int expo = 0;
        for (int j = 1; j <= N - 1; ++j) expo += (n[j - 1] - n[j]) * roots.nesting.theta(j, N);
        Complex last = d * detail::qp_pow(p, q, expo);
        for (Complex r : roots.levels[N - 2]) last *= weight_f(lam, r, p, q);
        return total + last;
    };

    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& lv : roots.levels)
        for (const auto& r : lv) nearest = std::min(nearest, std::abs(lambda - r));
    const double scale = std::max(1.0, std::abs(lambda));
    if (nearest > 1e-9 * scale) {
        if (pole_residual) *pole_residual = 0;
        return evaluate(lambda);
    }
    const Complex h = 1e-6 * scale * std::polar(1.0, 0.3);
    Complex plus = evaluate(lambda + h), minus = evaluate(lambda - h);
    if (pole_residual) *pole_residual = std::abs(plus - minus) * std::abs(h) / 2.0;
    return (plus + minus) / 2.0;
}

/// Polynomial coefficients c_0..c_L of Lambda(lambda), read off at L+1
/// nodes on a circle by the inverse DFT (the formula is a polynomial of
/// degree <= L exactly when the roots satisfy the Bethe equations).
inline std::vector<Complex> transfer_eigenvalue_coefficients(const BetheRootSet& roots, double radius = 0.7) {
    const int L = roots.L;
    const int n = L + 1;
    std::vector<Complex> samples(n);
    for (int k = 0; k < n; ++k)
        samples[k] = transfer_eigenvalue(roots, std::polar(radius, 2 * M_PI * k / n));
    std::vector<Complex> coeff(n);
    for (int m = 0; m < n; ++m) {
        Complex acc = 0;
        for (int k = 0; k < n; ++k) acc += samples[k] * std::polar(1.0, -2 * M_PI * k * m / n);
        coeff[m] = acc / (double(n) * std::pow(radius, m));
    }
    return coeff;
}

/// One cleared-denominator Bethe equation: both polynomial sides for level l
/// (1-based), root index j (0-based).
struct BetheEquationSides {
    Complex lhs, rhs;
};

inline BetheEquationSides bethe_equation_sides(const BetheRootSet& roots, int l, int j) {
    const int N = roots.N();
    const double p = roots.p, q = roots.q;
    auto n = roots.level_sizes();
    auto nbar = roots.level_biases();
    const auto& level = roots.levels[l - 1];
    const Complex x = level[j];

    int lhs_expo = 0;
    for (int jp = 1; jp <= l; ++jp) lhs_expo += (n[jp - 1] - n[jp]) * roots.nesting.theta(jp, l + 1);
    for (int jp = 1; jp <= l - 1; ++jp) lhs_expo -= (n[jp - 1] - n[jp]) * roots.nesting.theta(jp, l);
    int rhs_expo = -nbar[l - 1] + (l < N - 1 ? nbar[l] : 0);

    Complex lhs = detail::qp_pow(p, q, lhs_expo);
    if (l == 1) lhs *= std::pow(Complex(p) * x, roots.L);
    Complex rhs = double(n[l] % 2 == 0 ? -1 : 1) * detail::qp_pow(p, q, rhs_expo);
    // same level: product over k != j of N(x, x_k) on the left(denominators)
    // and N(x_k, x) on the right
    for (int k = 0; k < int(level.size()); ++k) {
        if (k == j) continue;
        lhs *= detail::weight_num(x, level[k], p, q);
        rhs *= detail::weight_num(level[k], x, p, q);
    }
    if (l >= 2) {  // coupling to the lower level: f(x, mu) in the numerator
        for (Complex mu : roots.levels[l - 2]) {
            lhs *= p * (x - mu);
            rhs *= detail::weight_num(x, mu, p, q);
        }
    }
    if (l <= N - 2) {  // coupling to the upper level: f(mu, x) in the denominator
        for (Complex mu : roots.levels[l]) {
            lhs *= detail::weight_num(mu, x, p, q);
            rhs *= p * (mu - x);
        }
    }
    return {lhs, rhs};
}

/// Residuals of every cleared Bethe equation, normalized by the equation's
/// sensitivity to relative root perturbations (so roots printed to d digits
/// score ~10^(1-d) and non-roots score O(1)). The zero vector certifies a
/// Bethe root. Coincident roots are rejected unless they sit at 1/p (the
/// stationary family, where the cleared sides vanish identically).
inline std::vector<Complex> bethe_residuals(const BetheRootSet& roots) {
    roots.validate();
    const int N = roots.N();
    for (const auto& lv : roots.levels)
        for (std::size_t a = 0; a < lv.size(); ++a)
            for (std::size_t b = a + 1; b < lv.size(); ++b)
                if (std::abs(lv[a] - lv[b]) < 1e-12 && std::abs(lv[a] - 1.0 / roots.p) > 1e-9)
                    throw StructuralError("coincident roots within a level (degenerate root)");
    const double step = 1e-6;
    std::vector<Complex> out;
    for (int l = 1; l <= N - 1; ++l)
        for (int j = 0; j < int(roots.levels[l - 1].size()); ++j) {
            auto sides = bethe_equation_sides(roots, l, j);
            Complex diff = sides.lhs - sides.rhs;
            double scale = 0;
            for (int lp = 1; lp <= N - 1; ++lp)
                for (int k = 0; k < int(roots.levels[lp - 1].size()); ++k) {
                    BetheRootSet pert = roots;
                    Complex& r = pert.levels[lp - 1][k];
                    double h = step * std::max(1.0, std::abs(r));
                    r += h;
                    auto ps = bethe_equation_sides(pert, l, j);
                    scale = std::max(scale, std::abs((ps.lhs - ps.rhs) - diff) / step);
                }
            out.push_back(diff / std::max({scale, std::abs(sides.lhs), std::abs(sides.rhs), 1e-300}));
        }
    return out;
}

/// Regular root: no root equals 1/p and both sides of every cleared Bethe
/// equation stay away from zero. A side counts as vanishing relative to its
/// own sensitivity under root perturbations (zero-side families keep the two
/// sides equal, so comparing them against each other is not enough).
inline bool is_regular(const BetheRootSet& roots, double threshold = 1e-8) {
    const double inv_p = 1.0 / roots.p;
    for (const auto& lv : roots.levels)
        for (const auto& r : lv)
            if (std::abs(r - inv_p) <= threshold * std::max(1.0, inv_p)) return false;
    const double step = 1e-6;
    const int N = roots.N();
    for (int l = 1; l <= N - 1; ++l)
        for (int j = 0; j < int(roots.levels[l - 1].size()); ++j) {
            auto sides = bethe_equation_sides(roots, l, j);
            double s_lhs = std::abs(sides.lhs), s_rhs = std::abs(sides.rhs);
            for (int lp = 1; lp <= N - 1; ++lp)
                for (int k = 0; k < int(roots.levels[lp - 1].size()); ++k) {
                    BetheRootSet pert = roots;
                    Complex& r = pert.levels[lp - 1][k];
                    r += step * std::max(1.0, std::abs(r));
                    auto ps = bethe_equation_sides(pert, l, j);
                    s_lhs = std::max(s_lhs, std::abs(ps.lhs - sides.lhs) / step);
                    s_rhs = std::max(s_rhs, std::abs(ps.rhs - sides.rhs) / step);
                }
            double scale = std::max({s_lhs, s_rhs, 1e-300});
            if (std::abs(sides.lhs) < threshold * scale || std::abs(sides.rhs) < threshold * scale) return false;
        }
    return true;
}

/// E = d/dlambda ln Lambda |_0 = sum_j (1 - p l_j)(1 - q l_j)/l_j over the
/// first-level roots.
inline Complex energy_from_roots(const BetheRootSet& roots) {
    if (roots.N() < 2) return 0.0;
    Complex e = 0;
    for (Complex r : roots.levels[0]) {
        if (std::abs(r) == 0.0) throw PoleError("energy formula has a pole at a zero root");
        e += (1.0 - roots.p * r) * (1.0 - roots.q * r) / r;
    }
    return e;
}

/// Stationary specialization: all roots at 1/p, eigen-polynomial
/// 1 + sum_k (q/p)^{n_k} (p lambda)^L.
inline BetheRootSet stationary_roots(const Sector& s, double p, double q) {
    BetheRootSet roots;
    roots.L = s.L();
    roots.p = p;
    roots.q = q;
    const int N = s.L();  // ambient species count, trailing zeros allowed
    roots.nesting = NestingOrder::standard(N);
    roots.counts.assign(N, 0);
    for (int i = 0; i < s.species(); ++i) roots.counts[i] = s.parts()[i];
    auto n = roots.level_sizes();
    roots.levels.resize(N - 1);
    for (int l = 1; l <= N - 1; ++l) roots.levels[l - 1].assign(n[l], 1.0 / p);
    return roots;
}

inline std::vector<Complex> stationary_polynomial_coefficients(const Sector& s, double p, double q) {
    BetheRootSet roots = stationary_roots(s, p, q);
    auto n = roots.level_sizes();
    std::vector<Complex> coeff(s.L() + 1, 0.0);
    coeff[0] = 1.0;
    Complex sum = 0;
    for (int k = 1; k <= roots.N() - 1; ++k) sum += detail::qp_pow(p, q, n[k]);
    coeff[s.L()] = sum * std::pow(p, s.L());
    return coeff;
}

}  // namespace masep
