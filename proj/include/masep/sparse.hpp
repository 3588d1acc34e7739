#pragma once

#include "masep/eigen_setup.hpp"

#include <unordered_map>

#include "masep/basis.hpp"

namespace masep {

/// Sparse matrix with exact or floating entries, optionally tied to sector
/// bases. Hamiltonians, symmetry operators, the phi intertwiners, omega and
/// transfer-matrix evaluations are all instances of this. Explicit zeros are
/// dropped on insertion.
template <class T>
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}
    SparseMatrix(int rows, int cols, BasisPtr codomain, BasisPtr domain)
        : rows_(rows), cols_(cols), codomain_(std::move(codomain)), domain_(std::move(domain)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const BasisPtr& domain_basis() const { return domain_; }
    const BasisPtr& codomain_basis() const { return codomain_; }

    void add(int r, int c, const T& v) {
        if (v == T(0)) return;
        auto [it, inserted] = entries_.try_emplace(key(r, c), v);
        if (!inserted) {
            it->second += v;
            if (it->second == T(0)) entries_.erase(it);
        }
    }

    void set(int r, int c, const T& v) {
        if (v == T(0))
            entries_.erase(key(r, c));
        else
            entries_[key(r, c)] = v;
    }

    T at(int r, int c) const {
        auto it = entries_.find(key(r, c));
        return it == entries_.end() ? T(0) : it->second;
    }

    std::size_t nonzeros() const { return entries_.size(); }

    template <class F>
    void for_each(F&& f) const {
        for (const auto& [k, v] : entries_) f(int(k >> 32), int(k & 0xffffffffu), v);
    }

    SparseMatrix transpose() const {
        SparseMatrix t(cols_, rows_, domain_, codomain_);
        for_each([&](int r, int c, const T& v) { t.set(c, r, v); });
        return t;
    }

    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.cols_ != b.rows_) throw InvalidArgument("sparse product shape mismatch");
        SparseMatrix p(a.rows_, b.cols_, a.codomain_, b.domain_);
        // group A entries by column for the middle index
        std::unordered_map<int, std::vector<std::pair<int, T>>> a_by_col;
        a.for_each([&](int r, int c, const T& v) { a_by_col[c].emplace_back(r, v); });
        b.for_each([&](int m, int c, const T& vb) {
            auto it = a_by_col.find(m);
            if (it == a_by_col.end()) return;
            for (const auto& [r, va] : it->second) p.add(r, c, va * vb);
        });
        return p;
    }

    friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidArgument("sparse difference shape mismatch");
        SparseMatrix d = a;
        b.for_each([&](int r, int c, const T& v) { d.add(r, c, T(0) - v); });
        return d;
    }

    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        if (a.entries_.size() != b.entries_.size()) return false;
        for (const auto& [k, v] : a.entries_) {
            auto it = b.entries_.find(k);
            if (it == b.entries_.end() || it->second != v) return false;
        }
        return true;
    }

    std::vector<T> apply(const std::vector<T>& x) const {
        if (int(x.size()) != cols_) throw InvalidArgument("apply shape mismatch");
        std::vector<T> y(rows_, T(0));
        for_each([&](int r, int c, const T& v) { y[r] += v * x[c]; });
        return y;
    }

    std::vector<T> column_sums() const {
        std::vector<T> s(cols_, T(0));
        for_each([&](int, int c, const T& v) { s[c] += v; });
        return s;
    }

    bool is_zero() const { return entries_.empty(); }

    template <class M>
    M to_dense() const {
        M d = M::Zero(rows_, cols_);
        for_each([&](int r, int c, const T& v) { d(r, c) = v; });
        return d;
    }

private:
    static std::uint64_t key(int r, int c) { return (std::uint64_t(std::uint32_t(r)) << 32) | std::uint32_t(c); }

    int rows_ = 0, cols_ = 0;
    BasisPtr codomain_, domain_;
    std::unordered_map<std::uint64_t, T> entries_;
};

using SparseD = SparseMatrix<double>;
using SparseQ = SparseMatrix<Rational>;

inline Eigen::MatrixXd dense(const SparseD& m) { return m.to_dense<Eigen::MatrixXd>(); }

inline Eigen::MatrixXcd dense(const SparseMatrix<Complex>& m) { return m.to_dense<Eigen::MatrixXcd>(); }

template <class T>
double max_abs(const SparseMatrix<T>& m) {
    double mx = 0;
    m.for_each([&](int, int, const T& v) { mx = std::max(mx, std::abs(double(v))); });
    return mx;
}

inline double max_abs(const SparseMatrix<Complex>& m) {
    double mx = 0;
    m.for_each([&](int, int, const Complex& v) { mx = std::max(mx, std::abs(v)); });
    return mx;
}

}  // namespace masep
