#pragma once

#include "masep/sparse.hpp"

namespace masep {

/// Markov generator restricted to a sector. Bonds are (i, i+1 mod L) for
/// i = 1..L, so at L=2 both bonds connect the same pair and the rate doubles.
/// Off-diagonal entries are p (right hop, k_i > k_{i+1}) or q (left hop),
/// diagonals make every column sum to zero exactly.
template <class T>
SparseMatrix<T> build_hamiltonian(const BasisPtr& basis, const T& p, const T& q) {
    const int L = basis->sector.L();
    SparseMatrix<T> H(basis->dim(), basis->dim(), basis, basis);
    for (int col = 0; col < basis->dim(); ++col) {
        Config k = basis->states[col];
        for (int i = 0; i < L; ++i) {
            int j = (i + 1) % L;
            if (k[i] == k[j]) continue;
            T rate = k[i] > k[j] ? p : q;
            std::swap(k[i], k[j]);
            H.add(basis->index_of(k), col, rate);
            std::swap(k[i], k[j]);
            H.add(col, col, T(0) - rate);
        }
    }
    return H;
}

inline SparseD build_hamiltonian(const BasisPtr& basis, double p, double q) {
    if (p < 0 || q < 0) throw InvalidArgument("hopping rates must be nonnegative");
    return build_hamiltonian<double>(basis, p, q);
}

enum class SymmetryKind { shift, reflection, charge };

/// C (cyclic shift), R (reflection) act within the sector; Q (charge
/// conjugation) maps onto the reversed-parts sector, relabeling a -> n+1-a.
template <class T = double>
SparseMatrix<T> build_symmetry(const BasisPtr& basis, SymmetryKind kind) {
    const int L = basis->sector.L();
    const int n = basis->sector.species();
    BasisPtr codomain = basis;
    if (kind == SymmetryKind::charge) codomain = build_basis(basis->sector.reversed());
    SparseMatrix<T> M(codomain->dim(), basis->dim(), codomain, basis);
    for (int col = 0; col < basis->dim(); ++col) {
        const Config& k = basis->states[col];
        Config img(L);
        switch (kind) {
            case SymmetryKind::shift:
                img[0] = k[L - 1];
                for (int i = 1; i < L; ++i) img[i] = k[i - 1];
                break;
            case SymmetryKind::reflection:
                for (int i = 0; i < L; ++i) img[i] = k[L - 1 - i];
                break;
            case SymmetryKind::charge:
                for (int i = 0; i < L; ++i) img[i] = n + 1 - k[i];
                break;
        }
        M.set(codomain->index_of(img), col, T(1));
    }
    return M;
}

namespace detail {

/// Relabeling x -> x' = x - #{removed positions < x} for phi_{s,t}.
inline std::vector<int> phi_relabel(const Sector& s, const Sector& t) {
    if (!t.contains(s)) throw InvalidArgument("phi needs nested sectors s subseteq t");
    auto ts = t.subset();
    auto mask_s = s.subset_mask();
    std::vector<int> removed_index;  // 1-based positions of t\s inside t's sorted subset
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!(mask_s >> (ts[i] - 1) & 1)) removed_index.push_back(int(i) + 1);
    std::vector<int> map(t.species() + 1);
    for (int x = 1; x <= t.species(); ++x) {
        int drop = 0;
        for (int ij : removed_index)
            if (ij < x) ++drop;
        map[x] = x - drop;
    }
    return map;
}

}  // namespace detail

/// Species-merging intertwiner phi_{s,t}: V_t -> V_s, each basis ket of V_t
/// maps to exactly one basis ket of V_s. Identity when s == t.
template <class T = double>
SparseMatrix<T> build_phi(const BasisPtr& basis_s, const BasisPtr& basis_t) {
    const Sector &s = basis_s->sector, &t = basis_t->sector;
    auto map = detail::phi_relabel(s, t);
    SparseMatrix<T> M(basis_s->dim(), basis_t->dim(), basis_s, basis_t);
    for (int col = 0; col < basis_t->dim(); ++col) {
        Config img = basis_t->states[col];
        for (int& x : img) x = map[x];
        M.set(basis_s->index_of(img), col, T(1));
    }
    return M;
}

template <class T = double>
SparseMatrix<T> build_phi_transpose(const BasisPtr& basis_s, const BasisPtr& basis_t) {
    return build_phi<T>(basis_s, basis_t).transpose();
}

inline int permutation_sign(const Config& k) {
    int inversions = 0;
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = i + 1; j < k.size(); ++j)
            if (k[i] > k[j]) ++inversions;
    return inversions % 2 == 0 ? 1 : -1;
}

/// Sign-reversal map on the maximal sector: the bra <k_1...k_L| goes to
/// sgn(k) |k_L...k_1>. Columns index bra coefficients, rows kets.
template <class T = double>
SparseMatrix<T> build_omega(const BasisPtr& omega_basis) {
    if (omega_basis->sector.species() != omega_basis->sector.L())
        throw InvalidArgument("omega lives on the maximal sector");
    const int L = omega_basis->sector.L();
    SparseMatrix<T> W(omega_basis->dim(), omega_basis->dim(), omega_basis, omega_basis);
    for (int col = 0; col < omega_basis->dim(); ++col) {
        const Config& k = omega_basis->states[col];
        Config rev(k.rbegin(), k.rend());
        W.set(omega_basis->index_of(rev), col, T(permutation_sign(k)));
    }
    return W;
}

}  // namespace masep
