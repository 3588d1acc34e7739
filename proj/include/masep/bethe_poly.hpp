#pragma once

#include "masep/bethe.hpp"

namespace masep {

/// Lambda(lambda) = sum c_k lambda^k, an eigenvalue of the commuting family
/// T(lambda) in one sector.
struct EigenPolynomial {
    std::vector<Complex> coeff;  // c_0..c_L
    Sector sector;
    enum class Provenance { interpolated, bethe_formula } provenance = Provenance::interpolated;

    Complex operator()(Complex lambda) const {
        Complex acc = 0;
        for (int k = int(coeff.size()) - 1; k >= 0; --k) acc = acc * lambda + coeff[k];
        return acc;
    }

    /// E = Lambda'(0)/Lambda(0) = c_1/c_0.
    Complex energy() const {
        if (std::abs(coeff[0]) < 1e-300) throw StructuralError("eigen-polynomial with vanishing Lambda(0)");
        return coeff[1] / coeff[0];
    }
};

inline double polynomial_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = 0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        Complex ca = i < a.size() ? a[i] : 0.0, cb = i < b.size() ? b[i] : 0.0;
        d = std::max(d, std::abs(ca - cb));
    }
    return d;
}

/// All eigen-polynomials of T(lambda) on a sector, interpolated from shared
/// left/right eigenvectors of one generic sample T(lambda*). A degenerate
/// sample triggers one retry at a second lambda*.
inline std::vector<EigenPolynomial> extract_eigen_polynomials(const Sector& s, double p, double q,
                                                              std::size_t capacity = 6000,
                                                              double* worst_residual = nullptr) {
    auto basis = build_basis(s, capacity);
    const int L = s.L();
    const int dim = basis->dim();
    auto transfer_at = [&](Complex lam) {
        return dense(build_transfer<Complex>(lam, basis, Complex(p), Complex(q)));
    };

    const Complex candidates[2] = {{0.31, 0.43}, {0.52, -0.29}};
    Eigen::MatrixXcd right, left;
    bool separated = false;
    for (const Complex& sample : candidates) {
        auto ed = eigendecompose(transfer_at(sample), true, true);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) min_gap = std::min(min_gap, std::abs(ed.values(i) - ed.values(j)));
        if (dim > 1 && min_gap < 1e-8) continue;
        right = ed.right;
        left = ed.left;
        separated = true;
        break;
    }
    if (!separated)
        throw StructuralError("transfer matrix is degenerate at both sample points in sector " + s.str());

    // Lambda_g at L+1 circle nodes via Rayleigh quotients of the whole family
    const double radius = 0.7;
    Eigen::MatrixXcd samples(dim, L + 1);
    for (int k = 0; k <= L; ++k) {
        Eigen::MatrixXcd D = left * transfer_at(std::polar(radius, 2 * M_PI * k / (L + 1))) * right;
        samples.col(k) = D.diagonal();
    }
    std::vector<EigenPolynomial> polys(dim);
    for (int g = 0; g < dim; ++g) {
        polys[g].sector = s;
        polys[g].coeff.resize(L + 1);
        for (int m = 0; m <= L; ++m) {
            Complex acc = 0;
            for (int k = 0; k <= L; ++k)
                acc += samples(g, k) * std::polar(1.0, -2 * M_PI * k * m / (L + 1));
            polys[g].coeff[m] = acc / (double(L + 1) * std::pow(radius, m));
        }
    }

    // held-out residual: ||T(l) r_g - Lambda_g(l) r_g|| <= 1e-8 ||T||
    const Complex held_out(0.57, 0.21);
    Eigen::MatrixXcd T = transfer_at(held_out);
    double scale = T.cwiseAbs().maxCoeff();
    double worst = 0;
    for (int g = 0; g < dim; ++g) {
        Eigen::VectorXcd r = right.col(g);
        worst = std::max(worst, (T * r - polys[g](held_out) * r).norm() / (scale * r.norm()));
    }
    if (worst_residual) *worst_residual = worst;
    if (worst > 1e-8)
        throw StructuralError("eigen-polynomial interpolation residual " + std::to_string(worst) + " in sector " +
                              s.str());
    return polys;
}

struct CompletenessRow {
    BetheRootSet roots;
    bool regular = false;
    double residual = 0;  // max |cleared Bethe equation residual|
    Complex energy;
    std::vector<Complex> polynomial;
};

struct CompletenessReport {
    Sector sector;
    std::vector<CompletenessRow> rows;
    int regular_count = 0;
    BigInt genuine_dim;
    bool regular_matches_genuine = false;
    bool regular_energies_match_genuine_spectrum = false;
    MatchCertificate energy_cert;
};

/// Classifies supplied root sets (fixtures or solver output), counts the
/// regular ones against the genuine dimension, and compares the regular
/// roots' energies with the kernel-method genuine spectrum. Report-only:
/// conjecture failures are findings, not errors.
inline CompletenessReport verify_completeness(const Sector& s, double p, double q,
                                              const std::vector<BetheRootSet>& roots_list,
                                              Tolerance tol = {}, std::size_t capacity = 6000) {
    CompletenessReport rep;
    rep.sector = s;
    rep.genuine_dim = genuine_dimension(s);
    std::vector<Complex> regular_energies;
    for (const auto& roots : roots_list) {
        CompletenessRow row;
        row.roots = roots;
        double worst = 0;
        for (const Complex& r : bethe_residuals(roots)) worst = std::max(worst, std::abs(r));
        row.residual = worst;
        row.regular = is_regular(roots);
        row.energy = energy_from_roots(roots);
        row.polynomial = transfer_eigenvalue_coefficients(roots);
        if (row.regular) {
            ++rep.regular_count;
            regular_energies.push_back(row.energy);
        }
        rep.rows.push_back(std::move(row));
    }
    rep.regular_matches_genuine = BigInt(rep.regular_count) == rep.genuine_dim;
    Spectrum genuine = genuine_spectrum(s, p, q, GenuineMethod::kernel, tol, capacity);
    rep.energy_cert = multiset_contains(genuine, Spectrum::of(regular_energies, tol), tol);
    rep.regular_energies_match_genuine_spectrum = rep.energy_cert.ok;
    return rep;
}

struct ReductionReport {
    double worst_residual = 0;
    bool ok = false;
    Complex energy_full, energy_merged;
};

/// Reduction relation: with a_N = a_{N-1}+1 and every top-level root sent to
/// 1/p, Lambda equals the (N-1)-state formula on the merged sector plus the
/// d(lambda) correction term. Checked at sample points off the root loci.
inline ReductionReport check_reduction(const BetheRootSet& input, int samples = 5) {
    input.validate();
    const int N = input.N();
    if (N < 2) throw InvalidArgument("reduction needs N >= 2");
    if (input.nesting.a[N - 1] != input.nesting.a[N - 2] + 1)
        throw InvalidArgument("reduction needs nesting with a_N = a_{N-1} + 1");

    BetheRootSet full = input;
    auto n = full.level_sizes();
    full.levels[N - 2].assign(n[N - 1], 1.0 / full.p);

    BetheRootSet merged;
    merged.L = full.L;
    merged.p = full.p;
    merged.q = full.q;
    merged.nesting.a.resize(N - 1);
    for (int j = 0; j < N - 1; ++j)
        merged.nesting.a[j] = full.nesting.a[j] - (full.nesting.a[j] >= full.nesting.a[N - 1] ? 1 : 0);
    merged.counts.assign(full.counts.begin(), full.counts.end() - 1);
    merged.counts[N - 2] += full.counts[N - 1];
    merged.levels.assign(full.levels.begin(), full.levels.end() - 1);

    int expo = n[N - 1];
    for (int j = 1; j <= N - 2; ++j) expo += (n[j - 1] - n[j]) * full.nesting.theta(j, N);

    ReductionReport rep;
    for (int i = 0; i < samples; ++i) {
        Complex lam = std::polar(0.45 + 0.1 * i, 0.8 + 0.6 * i);
        Complex lhs = transfer_eigenvalue(full, lam);
        Complex rhs = transfer_eigenvalue(merged, lam) +
                      std::pow(Complex(full.p) * lam, full.L) * detail::qp_pow(full.p, full.q, expo);
        rep.worst_residual =
            std::max(rep.worst_residual, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0}));
    }
    rep.energy_full = energy_from_roots(full);
    rep.energy_merged = energy_from_roots(merged);
    rep.ok = rep.worst_residual <= 1e-9;
    return rep;
}

}  // namespace masep
