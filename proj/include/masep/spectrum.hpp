#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "masep/sector.hpp"

namespace masep {

inline void sort_eigenvalues(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
}

/// Tolerance-aware multiset of complex eigenvalues. Multiplicity is carried
/// by repetition; grouping happens only on export and in certificates.
struct Spectrum {
    std::vector<Complex> values;  // kept sorted by (-re, im)
    Tolerance tol;
    std::optional<Sector> sector;
    double p = 0, q = 0;

    int size() const { return int(values.size()); }

    static Spectrum of(std::vector<Complex> vals, Tolerance tol = {}) {
        sort_eigenvalues(vals);
        return Spectrum{std::move(vals), tol, std::nullopt, 0, 0};
    }

    Spectrum shifted_negated(double shift) const {
        std::vector<Complex> out;
        out.reserve(values.size());
        for (const auto& v : values) out.push_back(-shift - v);
        return of(std::move(out), tol);
    }

    /// Conjugate-symmetric within tolerance (real-matrix spectra).
    bool conjugation_closed() const;
};

struct MatchedPair {
    Complex a, b;
    double distance;
};

struct MatchCertificate {
    bool ok = true;
    double worst_distance = 0;
    std::vector<MatchedPair> pairs;
    std::vector<Complex> unmatched;  // values of B (or deficit side) with no partner
    std::vector<std::string> notes;
};

namespace detail {

struct Tagged {
    Complex z;
    int list;  // which input list
    int sign;  // +1 / -1 for signed combination
};

/// Union of the inputs clustered by tolerance connectivity (union-find over
/// pairs within the matching window).
inline std::vector<std::vector<Tagged>> cluster(std::vector<Tagged> items, const Tolerance& tol) {
    std::sort(items.begin(), items.end(), [](const Tagged& x, const Tagged& y) {
        if (x.z.real() != y.z.real()) return x.z.real() < y.z.real();
        return x.z.imag() < y.z.imag();
    });
    const std::size_t n = items.size();
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = int(i);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = tol.window(std::max(std::abs(items[i].z), std::abs(items[j].z)));
            if (items[j].z.real() - items[i].z.real() > w) break;
            if (std::abs(items[j].z - items[i].z) <= w) parent[find(int(j))] = find(int(i));
        }
    }
    std::map<int, std::vector<Tagged>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(int(i))].push_back(items[i]);
    std::vector<std::vector<Tagged>> out;
    for (auto& [root, g] : groups) out.push_back(std::move(g));
    return out;
}

/// O(n^3) rectangular assignment (rows <= cols), minimizing total distance.
/// Returns, for each row, the chosen column.
inline std::vector<int> min_cost_assign(const std::vector<std::vector<double>>& cost) {
    const int nr = int(cost.size());
    if (nr == 0) return {};
    const int nc = int(cost[0].size());
    // Hungarian with potentials, 1-based internal arrays.
    std::vector<double> u(nr + 1, 0), v(nc + 1, 0);
    std::vector<int> match(nc + 1, 0), way(nc + 1, 0);
    for (int i = 1; i <= nr; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(nc + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(nc + 1, false);
        do {
            used[j0] = true;
            int i0 = match[j0], j1 = -1;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= nc; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= nc; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(nr, -1);
    for (int j = 1; j <= nc; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

/// Pairs every "needle" with a distinct "hay" value inside one cluster by
/// minimal total distance; falls back to sorted greedy on big clusters.
inline void pair_within_cluster(const std::vector<Complex>& needles, std::vector<Complex> hay,
                                MatchCertificate& cert) {
    if (needles.empty()) return;
    if (needles.size() <= 64 && hay.size() <= 64) {
        std::vector<std::vector<double>> cost(needles.size(), std::vector<double>(hay.size()));
        for (std::size_t i = 0; i < needles.size(); ++i)
            for (std::size_t j = 0; j < hay.size(); ++j) cost[i][j] = std::abs(needles[i] - hay[j]);
        auto assign = min_cost_assign(cost);
        for (std::size_t i = 0; i < needles.size(); ++i) {
            double d = std::abs(needles[i] - hay[assign[i]]);
            cert.pairs.push_back({hay[assign[i]], needles[i], d});
            cert.worst_distance = std::max(cert.worst_distance, d);
        }
        return;
    }
    cert.notes.push_back("large degenerate cluster: greedy pairing used");
    for (const auto& b : needles) {
        auto best = std::min_element(hay.begin(), hay.end(), [&](const Complex& x, const Complex& y) {
            return std::abs(x - b) < std::abs(y - b);
        });
        double d = std::abs(*best - b);
        cert.pairs.push_back({*best, b, d});
        cert.worst_distance = std::max(cert.worst_distance, d);
        hay.erase(best);
    }
}

}  // namespace detail

inline bool Spectrum::conjugation_closed() const {
    std::vector<detail::Tagged> items;
    for (const auto& z : values) {
        items.push_back({z, 0, +1});
        items.push_back({std::conj(z), 1, +1});
    }
    for (const auto& g : detail::cluster(std::move(items), tol)) {
        long netA = 0, netB = 0;
        for (const auto& t : g) (t.list == 0 ? netA : netB)++;
        if (netA != netB) return false;
    }
    return true;
}

/// true iff B injects into A respecting multiplicity; the certificate lists
/// matched pairs, the worst matched distance and any deficits.
inline MatchCertificate multiset_contains(const Spectrum& A, const Spectrum& B, std::optional<Tolerance> tol = {}) {
    Tolerance t = tol.value_or(A.tol);
    std::vector<detail::Tagged> items;
    for (const auto& z : A.values) items.push_back({z, 0, +1});
    for (const auto& z : B.values) items.push_back({z, 1, +1});
    MatchCertificate cert;
    for (const auto& g : detail::cluster(std::move(items), t)) {
        std::vector<Complex> hay, needles;
        for (const auto& it : g) (it.list == 0 ? hay : needles).push_back(it.z);
        if (needles.size() > hay.size()) {
            cert.ok = false;
            for (std::size_t i = hay.size(); i < needles.size(); ++i) cert.unmatched.push_back(needles[i]);
            continue;
        }
        if (needles.size() > 1 && needles.size() < hay.size())
            cert.notes.push_back("ambiguous matching resolved by minimal total distance");
        detail::pair_within_cluster(needles, hay, cert);
    }
    return cert;
}

inline MatchCertificate multiset_equal(const Spectrum& A, const Spectrum& B, std::optional<Tolerance> tol = {}) {
    Tolerance t = tol.value_or(A.tol);
    if (A.size() != B.size()) {
        MatchCertificate cert;
        cert.ok = false;
        cert.notes.push_back("size mismatch " + std::to_string(A.size()) + " vs " + std::to_string(B.size()));
        return cert;
    }
    MatchCertificate cert = multiset_contains(A, B, t);
    return cert;  // equal sizes + injection = bijection
}

/// Signed multiset combination sum_i sign_i * values_i; fails when a cluster
/// goes negative. Used by the Mobius route to the genuine spectrum.
inline std::pair<bool, std::vector<Complex>> signed_combine(
    const std::vector<std::pair<const std::vector<Complex>*, int>>& lists, const Tolerance& tol,
    MatchCertificate* cert_out = nullptr) {
    std::vector<detail::Tagged> items;
    for (std::size_t i = 0; i < lists.size(); ++i)
        for (const auto& z : *lists[i].first) items.push_back({z, int(i), lists[i].second});
    MatchCertificate cert;
    std::vector<Complex> result;
    bool ok = true;
    for (const auto& g : detail::cluster(std::move(items), tol)) {
        std::vector<Complex> plus, minus;
        for (const auto& it : g) (it.sign > 0 ? plus : minus).push_back(it.z);
        if (minus.size() > plus.size()) {
            ok = false;
            for (std::size_t i = plus.size(); i < minus.size(); ++i) cert.unmatched.push_back(minus[i]);
            continue;
        }
        // cancel minus entries against nearest plus entries, keep the rest
        std::vector<char> taken(plus.size(), 0);
        if (!minus.empty()) {
            std::vector<std::vector<double>> cost(minus.size(), std::vector<double>(plus.size()));
            for (std::size_t i = 0; i < minus.size(); ++i)
                for (std::size_t j = 0; j < plus.size(); ++j) cost[i][j] = std::abs(minus[i] - plus[j]);
            auto assign = detail::min_cost_assign(cost);
            for (std::size_t i = 0; i < minus.size(); ++i) {
                taken[assign[i]] = 1;
                double d = std::abs(minus[i] - plus[assign[i]]);
                cert.pairs.push_back({plus[assign[i]], minus[i], d});
                cert.worst_distance = std::max(cert.worst_distance, d);
            }
        }
        for (std::size_t j = 0; j < plus.size(); ++j)
            if (!taken[j]) result.push_back(plus[j]);
    }
    cert.ok = ok;
    sort_eigenvalues(result);
    if (cert_out) *cert_out = std::move(cert);
    return {ok, std::move(result)};
}

/// (value, multiplicity) groups for export, clustering within tolerance.
inline std::vector<std::pair<Complex, int>> grouped_values(const Spectrum& s) {
    std::vector<detail::Tagged> items;
    for (const auto& z : s.values) items.push_back({z, 0, +1});
    std::vector<std::pair<Complex, int>> out;
    for (const auto& g : detail::cluster(std::move(items), s.tol)) {
        Complex mean = 0;
        for (const auto& it : g) mean += it.z;
        mean /= double(g.size());
        out.push_back({mean, int(g.size())});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real()) return a.first.real() > b.first.real();
        return a.first.imag() < b.first.imag();
    });
    return out;
}

}  // namespace masep
