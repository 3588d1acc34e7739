#pragma once

#include "masep/operators.hpp"

namespace masep {

/// Perk-Schultz R-matrix on W (x) W, W = C^N, entries from the local
/// Hamiltonian via R(lambda) = P(1 + lambda h).
template <class T>
struct RMatrix {
    int N = 0;
    std::vector<T> w;  // [(gamma,delta),(alpha,beta)] flat, N^4 entries

    const T& entry(int g, int d, int a, int b) const { return w[idx(g, d, a, b)]; }
    T& entry(int g, int d, int a, int b) { return w[idx(g, d, a, b)]; }

    std::size_t idx(int g, int d, int a, int b) const {
        return ((std::size_t(g - 1) * N + (d - 1)) * N + (a - 1)) * N + (b - 1);
    }
};

template <class T>
RMatrix<T> build_r_matrix(const T& lambda, const T& p, const T& q, int N) {
    if (N < 1) throw InvalidArgument("R-matrix needs N >= 1");
    RMatrix<T> R;
    R.N = N;
    R.w.assign(std::size_t(N) * N * N * N, T(0));
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) {
            if (a == b) {
                R.entry(a, a, a, a) = T(1);
                continue;
            }
            // state-preserving entry and exchange entry
            R.entry(a, b, a, b) = (a < b ? q : p) * lambda;
            R.entry(b, a, a, b) = T(1) - (a < b ? q : p) * lambda;
        }
    return R;
}

/// xi(lambda1, lambda2) of the Yang-Baxter equation; pole error on zero
/// denominator.
template <class T>
T ybe_argument(const T& l1, const T& l2, const T& p, const T& q) {
    T den = T(1) - (p + q) * l2 + p * q * l1 * l2;
    if (den == T(0)) throw PoleError("xi denominator vanishes");
    return (l1 - l2) / den;
}

/// Applies R on sites (si, sj) of W^{(x) nsites}, site 1 most significant.
template <class T>
std::vector<T> apply_r_sites(const RMatrix<T>& R, int si, int sj, int nsites, const std::vector<T>& v) {
    const int N = R.N;
    std::vector<int> stride(nsites);
    int acc = 1;
    for (int s = nsites - 1; s >= 0; --s) {
        stride[s] = acc;
        acc *= N;
    }
    std::vector<T> out(v.size(), T(0));
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        if (v[idx] == T(0)) continue;
        int a = int(idx / stride[si - 1]) % N + 1;
        int b = int(idx / stride[sj - 1]) % N + 1;
        std::size_t base = idx - std::size_t(a - 1) * stride[si - 1] - std::size_t(b - 1) * stride[sj - 1];
        for (int g = 1; g <= N; ++g)
            for (int d = 1; d <= N; ++d) {
                const T& wgt = R.entry(g, d, a, b);
                if (wgt == T(0)) continue;
                out[base + std::size_t(g - 1) * stride[si - 1] + std::size_t(d - 1) * stride[sj - 1]] += wgt * v[idx];
            }
    }
    return out;
}

/// Residual of R23(l2) R13(l1) R12(xi) - R12(xi) R13(l1) R23(l2) applied to
/// every basis vector of W^(x)3; exact zero for exact scalar types.
template <class T>
std::vector<T> ybe_difference(const T& l1, const T& l2, const T& p, const T& q, int N) {
    T xi = ybe_argument(l1, l2, p, q);
    auto R12 = build_r_matrix(xi, p, q, N);
    auto R13 = build_r_matrix(l1, p, q, N);
    auto R23 = build_r_matrix(l2, p, q, N);
    std::size_t dim = std::size_t(N) * N * N;
    std::vector<T> diff;
    diff.reserve(dim * dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::vector<T> e(dim, T(0));
        e[col] = T(1);
        auto lhs = apply_r_sites(R23, 2, 3, 3, apply_r_sites(R13, 1, 3, 3, apply_r_sites(R12, 1, 2, 3, e)));
        auto rhs = apply_r_sites(R12, 1, 2, 3, apply_r_sites(R13, 1, 3, 3, apply_r_sites(R23, 2, 3, 3, e)));
        for (std::size_t r = 0; r < dim; ++r) diff.push_back(lhs[r] - rhs[r]);
    }
    return diff;
}

inline double ybe_residual(Complex l1, Complex l2, double p, double q, int N) {
    auto diff = ybe_difference<Complex>(l1, l2, p, q, N);
    double mx = 0;
    for (const auto& v : diff) mx = std::max(mx, std::abs(v));
    return mx;
}

/// Transfer matrix T(lambda) = tr_0 [R_{0L}...R_{01}] restricted to a sector,
/// contracted one site at a time over the auxiliary index; the ambient
/// N^L space is never materialized. N defaults to L (basic-sector setup).
template <class T>
SparseMatrix<T> build_transfer(const T& lambda, const BasisPtr& basis, const T& p, const T& q, int N = -1) {
    const Sector& sec = basis->sector;
    const int L = sec.L();
    if (N < 0) N = L;
    if (N < sec.species()) throw InvalidArgument("ambient N smaller than species count");
    const int bits = bits_for_states(N);
    if (std::size_t(L + 1) * bits > 64) throw CapacityError("transfer packing exceeds 64 bits");

    const T pass_lt = q * lambda, pass_gt = p * lambda;
    const T swap_lt = T(1) - q * lambda, swap_gt = T(1) - p * lambda;

    SparseMatrix<T> M(basis->dim(), basis->dim(), basis, basis);
    std::unordered_map<std::uint64_t, T> cur, next;
    for (int col = 0; col < basis->dim(); ++col) {
        const Config& k0 = basis->states[col];
        const std::uint64_t base_key = encode_config(k0, bits);
        for (int a0 = 1; a0 <= N; ++a0) {
            cur.clear();
            cur.emplace(base_key | (std::uint64_t(a0) << (bits * L)), T(1));
            for (int site = 0; site < L; ++site) {
                next.clear();
                for (const auto& [key, amp] : cur) {
                    const int aux = int(key >> (bits * L));
                    const int beta = int(key >> (bits * site)) & ((1 << bits) - 1);
                    if (aux == beta) {
                        next[key] += amp;
                        continue;
                    }
                    const T& pass = aux < beta ? pass_lt : pass_gt;
                    const T& swap = aux < beta ? swap_lt : swap_gt;
                    if (!(pass == T(0))) next[key] += amp * pass;
                    if (!(swap == T(0))) {
                        std::uint64_t swapped = key;
                        swapped &= ~(std::uint64_t((1 << bits) - 1) << (bits * site));
                        swapped |= std::uint64_t(aux) << (bits * site);
                        swapped &= ~(std::uint64_t((1 << bits) - 1) << (bits * L));
                        swapped |= std::uint64_t(beta) << (bits * L);
                        next[swapped] += amp * swap;
                    }
                }
                cur.swap(next);
            }
            const std::uint64_t close_key = std::uint64_t(a0) << (bits * L);
            for (const auto& [key, amp] : cur) {
                if ((key >> (bits * L)) != std::uint64_t(a0)) continue;
                std::uint64_t cfg = key ^ close_key;
                Config out(L);
                for (int i = 0; i < L; ++i) out[i] = int(cfg >> (bits * i)) & ((1 << bits) - 1);
                M.add(basis->index_of(out), col, amp);
            }
        }
    }
    return M;
}

/// Exact T(0) and T'(0) via first-order dual numbers; with T(0) = C this
/// gives the structural identity T(0)^{-1} T'(0) = H in rational arithmetic.
inline std::pair<SparseQ, SparseQ> transfer_at_zero(const BasisPtr& basis, const Rational& p, const Rational& q,
                                                    int N = -1) {
    using D = Dual<Rational>;
    auto Td = build_transfer<D>(D(Rational(0), Rational(1)), basis, D(p), D(q), N);
    SparseQ value(Td.rows(), Td.cols(), basis, basis), deriv(Td.rows(), Td.cols(), basis, basis);
    Td.for_each([&](int r, int c, const D& v) {
        value.set(r, c, v.a);
        deriv.set(r, c, v.b);
    });
    return {value, deriv};
}

}  // namespace masep
