#pragma once

#include "masep/eigen_setup.hpp"
#include <Eigen/Eigenvalues>

#include "masep/operators.hpp"
#include "masep/spectrum.hpp"

namespace masep {

struct EigenDecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd right;  // columns; empty unless requested
    Eigen::MatrixXcd left;   // rows biorthogonal to right; empty unless requested
};

/// Full eigen-decomposition of a real square matrix. Symmetric input is
/// routed to the self-adjoint solver (SSEP needs the extra accuracy); the
/// general path is the balanced Hessenberg + Francis QR underneath
/// dgees/dgeev. Left eigenvectors come from inverting the right-vector
/// matrix, which keeps the family biorthonormal.
inline EigenDecomposition eigendecompose(const Eigen::MatrixXd& M, bool vectors = false, bool left = false) {
    if (M.rows() != M.cols()) throw InvalidArgument("eigendecompose needs a square matrix");
    EigenDecomposition out;
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, vectors ? Eigen::ComputeEigenvectors
                                                                     : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NonConvergence("self-adjoint eigensolver failed");
        out.values = es.eigenvalues().cast<Complex>();
        if (vectors) out.right = es.eigenvectors().cast<Complex>();
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(M, vectors);
        if (es.info() != Eigen::Success)
            throw NonConvergence("QR iteration did not converge within the solver's iteration budget");
        out.values = es.eigenvalues();
        if (vectors) out.right = es.eigenvectors();
    }
    if (left) {
        if (!vectors) throw InvalidArgument("left eigenvectors need right ones");
        out.left = out.right.inverse();
    }
    return out;
}

inline EigenDecomposition eigendecompose(const Eigen::MatrixXcd& M, bool vectors = false, bool left = false) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, vectors);
    if (es.info() != Eigen::Success) throw NonConvergence("complex QR iteration did not converge");
    EigenDecomposition out;
    out.values = es.eigenvalues();
    if (vectors) out.right = es.eigenvectors();
    if (left) out.left = out.right.inverse();
    return out;
}

/// max_i ||M v_i - lambda_i v_i|| / ||M||, the per-pair backward error.
inline double eigen_backward_error(const Eigen::MatrixXd& M, const EigenDecomposition& ed) {
    double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    double worst = 0;
    Eigen::MatrixXcd Mc = M.cast<Complex>();
    for (int i = 0; i < ed.values.size(); ++i) {
        Eigen::VectorXcd v = ed.right.col(i);
        worst = std::max(worst, (Mc * v - ed.values(i) * v).norm() / (scale * v.norm()));
    }
    return worst;
}

inline Spectrum sector_spectrum(const Sector& s, double p, double q, Tolerance tol = {},
                                std::size_t capacity = 6000) {
    auto basis = build_basis(s, capacity);
    auto H = build_hamiltonian(basis, p, q);
    auto ed = eigendecompose(dense(H));
    std::vector<Complex> vals(ed.values.data(), ed.values.data() + ed.values.size());
    Spectrum spec = Spectrum::of(std::move(vals), tol);
    spec.sector = s;
    spec.p = p;
    spec.q = q;
    return spec;
}

/// Memo for sweeps that revisit sectors (Mobius route, inclusion scans).
class SpectrumCache {
public:
    SpectrumCache(double p, double q, Tolerance tol = {}, std::size_t capacity = 6000)
        : p_(p), q_(q), tol_(tol), capacity_(capacity) {}

    const Spectrum& get(const Sector& s) {
        auto it = cache_.find(s.parts());
        if (it != cache_.end()) return it->second;
        // reversed-parts sectors share their spectrum (charge conjugation)
        auto rev = cache_.find(s.reversed().parts());
        if (rev != cache_.end()) {
            Spectrum copy = rev->second;
            copy.sector = s;
            return cache_.emplace(s.parts(), std::move(copy)).first->second;
        }
        return cache_.emplace(s.parts(), sector_spectrum(s, p_, q_, tol_, capacity_)).first->second;
    }

    double p() const { return p_; }
    double q() const { return q_; }
    Tolerance tol() const { return tol_; }
    std::size_t capacity() const { return capacity_; }

private:
    double p_, q_;
    Tolerance tol_;
    std::size_t capacity_;
    std::map<std::vector<int>, Spectrum> cache_;
};

/// Columns spanning Y_s = intersection of the kernels of the cover-step phi
/// maps inside V_s.
struct GenuineComponent {
    Sector sector;
    Eigen::MatrixXd basis_matrix;
    int dimension = 0;
};

inline GenuineComponent genuine_component(const Sector& s, std::size_t capacity = 6000) {
    auto basis = build_basis(s, capacity);
    const int dim = basis->dim();
    GenuineComponent out;
    out.sector = s;
    auto covers = lower_covers(s);
    if (covers.empty()) {
        out.basis_matrix = Eigen::MatrixXd::Identity(dim, dim);
        out.dimension = dim;
        return out;
    }
    int total_rows = 0;
    std::vector<Eigen::MatrixXd> blocks;
    for (const Sector& u : covers) {
        blocks.push_back(dense(build_phi(build_basis(u, capacity), basis)));
        total_rows += int(blocks.back().rows());
    }
    Eigen::MatrixXd stack(total_rows, dim);
    int row = 0;
    for (const auto& b : blocks) {
        stack.middleRows(row, int(b.rows())) = b;
        row += int(b.rows());
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double rank_tol = 1e-10 * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol) ++rank;
    out.dimension = dim - rank;
    out.basis_matrix = svd.matrixV().rightCols(out.dimension);
    BigInt g = genuine_dimension(s);
    if (BigInt(out.dimension) != g)
        throw StructuralError("null-space dimension " + std::to_string(out.dimension) + " != genuine dimension " +
                              g.str() + " in sector " + s.str());
    return out;
}

enum class GenuineMethod { kernel, mobius };

/// Genuine spectrum of a sector. `kernel` restricts H to Y_s through an
/// orthonormal null-space basis; `mobius` combines full sector spectra with
/// the boolean-lattice Mobius signs.
inline Spectrum genuine_spectrum(const Sector& s, double p, double q, GenuineMethod method, Tolerance tol = {},
                                 std::size_t capacity = 6000, SpectrumCache* cache = nullptr,
                                 double* invariance_residual = nullptr) {
    std::vector<Complex> vals;
    if (method == GenuineMethod::kernel) {
        auto comp = genuine_component(s, capacity);
        auto basis = build_basis(s, capacity);
        Eigen::MatrixXd H = dense(build_hamiltonian(basis, p, q));
        const Eigen::MatrixXd& B = comp.basis_matrix;
        Eigen::MatrixXd HB = H * B;
        Eigen::MatrixXd M = B.transpose() * HB;
        double resid = (HB - B * M).norm() / std::max(1.0, H.norm());
        if (invariance_residual) *invariance_residual = resid;
        if (resid > 1e-9)
            throw StructuralError("Y_s is not H-invariant within tolerance: residual " + std::to_string(resid));
        auto ed = eigendecompose(M);
        vals.assign(ed.values.data(), ed.values.data() + ed.values.size());
    } else {
        std::optional<SpectrumCache> local;
        if (!cache) {
            local.emplace(p, q, tol, capacity);
            cache = &*local;
        }
        std::vector<std::pair<const std::vector<Complex>*, int>> lists;
        for (const Sector& u : lower_set(s)) lists.push_back({&cache->get(u).values, mobius(u, s)});
        auto [ok, combined] = signed_combine(lists, tol);
        if (!ok) throw StructuralError("Mobius combination went negative in sector " + s.str());
        vals = std::move(combined);
    }
    BigInt g = genuine_dimension(s);
    if (BigInt(vals.size()) != g)
        throw StructuralError("genuine spectrum size " + std::to_string(vals.size()) + " != genuine dimension " +
                              g.str() + " in sector " + s.str());
    Spectrum spec = Spectrum::of(std::move(vals), tol);
    spec.sector = s;
    spec.p = p;
    spec.q = q;
    return spec;
}

struct DualityReport {
    Sector sector, complement;
    bool spectra_match = false;
    MatchCertificate cert;
    bool omega_rank_ok = false;
    int omega_rank = 0;
    double omega_kill_residual = 0;  // max over cover-step phi of |phi * omega_image|
    bool ok() const { return spectra_match && omega_rank_ok; }
};

/// Spec(complement(s)) vs -L(p+q) - Spec(s) on genuine spectra, plus the
/// explicit spectrum-reversing map omega into Y_s (rank and kernel checks).
inline DualityReport check_spectral_duality(const Sector& s, double p, double q, Tolerance tol = {},
                                            std::size_t capacity = 6000, SpectrumCache* cache = nullptr) {
    DualityReport rep;
    rep.sector = s;
    rep.complement = s.complement();
    const double shift = s.L() * (p + q);

    Spectrum spec_s = genuine_spectrum(s, p, q, GenuineMethod::kernel, tol, capacity, cache);
    Spectrum spec_c = genuine_spectrum(rep.complement, p, q, GenuineMethod::kernel, tol, capacity, cache);
    rep.cert = multiset_equal(spec_c, spec_s.shifted_negated(shift), tol);
    rep.spectra_match = rep.cert.ok;

    // omega_deg(<phi|) = phi->_{s,Omega} omega (<phi| phi<-_{sbar,Omega})
    auto omega_basis = build_basis(Sector::from_parts(std::vector<int>(s.L(), 1)), capacity);
    auto basis_s = build_basis(s, capacity);
    auto basis_c = build_basis(rep.complement, capacity);
    Eigen::MatrixXd K = dense(build_phi(basis_s, omega_basis)) * dense(build_omega(omega_basis)) *
                        dense(build_phi(basis_c, omega_basis)).transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(K);
    const auto& sv = svd.singularValues();
    double rank_tol = 1e-10 * std::max(sv.size() ? sv(0) : 0.0, 1e-300);
    rep.omega_rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol) ++rep.omega_rank;
    rep.omega_rank_ok = BigInt(rep.omega_rank) == genuine_dimension(s);
    double kill = 0;
    for (const Sector& u : lower_covers(s)) {
        Eigen::MatrixXd phi = dense(build_phi(build_basis(u, capacity), basis_s));
        kill = std::max(kill, (phi * K).cwiseAbs().maxCoeff() / std::max(1.0, K.cwiseAbs().maxCoeff()));
    }
    rep.omega_kill_residual = kill;
    if (kill > 1e-10) rep.omega_rank_ok = false;
    return rep;
}

struct SecondLargest {
    Complex Eplus, Eminus;          // Im >= 0 and Im <= 0 representatives
    std::vector<Complex> achieving;  // every eigenvalue at the maximal real part
};

/// All nonzero eigenvalues achieving the maximal real part. The tie window
/// equals the matching tolerance. Degenerate real values simply repeat.
inline SecondLargest second_largest(const Spectrum& spec) {
    std::vector<Complex> nonzero;
    for (const auto& z : spec.values)
        if (std::abs(z) > spec.tol.window(0.0)) nonzero.push_back(z);
    if (nonzero.empty()) throw StructuralError("spectrum has no nonzero eigenvalue");
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& z : nonzero) max_re = std::max(max_re, z.real());
    SecondLargest out;
    for (const auto& z : nonzero)
        if (z.real() >= max_re - spec.tol.window(z)) out.achieving.push_back(z);
    sort_eigenvalues(out.achieving);
    out.Eplus = *std::max_element(out.achieving.begin(), out.achieving.end(),
                                  [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
    out.Eminus = *std::min_element(out.achieving.begin(), out.achieving.end(),
                                   [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
    return out;
}

struct NextLeading {
    int split = 0;  // j: first j species collapsed to vacancies
    Sector collapsed;
    Complex Eplus, Eminus;
};

/// E^pm_j: second-largest pair of the one-species sector obtained by merging
/// the first j species and the remaining n-j species.
inline std::vector<NextLeading> next_leading(const Sector& s, double p, double q, Tolerance tol = {},
                                             std::size_t capacity = 6000, const Spectrum* full = nullptr) {
    if (s.species() < 2) throw InvalidArgument("next-leading needs at least two species");
    std::vector<NextLeading> out;
    const auto& m = s.parts();
    for (int j = 1; j < s.species(); ++j) {
        int left = 0, right = 0;
        for (int i = 0; i < j; ++i) left += m[i];
        for (int i = j; i < s.species(); ++i) right += m[i];
        Sector collapsed = Sector::from_parts({left, right});
        auto sl = second_largest(sector_spectrum(collapsed, p, q, tol, capacity));
        if (full) {
            // the degenerate real case doubles one value by convention
            std::vector<Complex> probe = {sl.Eplus};
            if (std::abs(sl.Eplus - sl.Eminus) > tol.window(sl.Eplus)) probe.push_back(sl.Eminus);
            if (!multiset_contains(*full, Spectrum::of(probe, tol), tol).ok)
                throw StructuralError("next-leading pair not found in the sector spectrum");
        }
        out.push_back({j, collapsed, sl.Eplus, sl.Eminus});
    }
    return out;
}

struct GapConjectureReport {
    Sector sector;
    bool holds = false;
    double threshold = 0;  // max_j Re E^pm_j
    Complex violator;      // defined when !holds
    std::vector<NextLeading> next;
};

/// No nonzero eigenvalue may lie strictly between the next-leading band and
/// zero: Re E <= max_j Re E^pm_j + tol for every nonzero E.
inline GapConjectureReport check_gap_conjecture(const Sector& s, double p, double q, Tolerance tol = {},
                                                std::size_t capacity = 6000) {
    GapConjectureReport rep;
    rep.sector = s;
    Spectrum spec = sector_spectrum(s, p, q, tol, capacity);
    if (s.species() < 2) {
        rep.holds = true;  // one-species and vacuum sectors hold by definition
        return rep;
    }
    rep.next = next_leading(s, p, q, tol, capacity, &spec);
    rep.threshold = -std::numeric_limits<double>::infinity();
    for (const auto& nl : rep.next) rep.threshold = std::max(rep.threshold, nl.Eplus.real());
    rep.holds = true;
    for (const auto& z : spec.values) {
        if (std::abs(z) <= spec.tol.window(0.0)) continue;
        if (z.real() > rep.threshold + spec.tol.window(z)) {
            rep.holds = false;
            rep.violator = z;
            break;
        }
    }
    return rep;
}

/// Normalized stationary distribution: the null vector of H with sum 1.
/// Solved by replacing the (redundant) last row of H with the normalization
/// row; a rank probe guards against disconnected/multiple stationary states.
inline Eigen::VectorXd stationary_vector(const Sector& s, double p, double q, std::size_t capacity = 6000) {
    auto basis = build_basis(s, capacity);
    Eigen::MatrixXd H = dense(build_hamiltonian(basis, p, q));
    const int dim = int(H.rows());
    if (dim == 1) return Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd A = H;
    A.row(dim - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    b(dim - 1) = 1.0;
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    double resid = (H * x).cwiseAbs().maxCoeff() / scale;
    double min_comp = x.minCoeff();
    if (resid > 1e-10 || min_comp < -1e-12) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
        lu.setThreshold(1e-10);
        if (lu.rank() < dim - 1)
            throw StructuralError("multiple stationary states detected in sector " + s.str());
        throw StructuralError("stationary solve failed: residual " + std::to_string(resid));
    }
    x = x.cwiseMax(0.0);
    return x / x.sum();
}

}  // namespace masep
