#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "masep/common.hpp"
#include "masep/rational.hpp"

namespace masep {

/// A basic sector of the length-L ring: a composition m_1+...+m_n = L with
/// every part positive, equivalently the subset {s_j = m_1+...+m_j} of
/// {1,...,L-1}. Immutable once built.
class Sector {
public:
    Sector() = default;

    static Sector from_parts(std::vector<int> parts) {
        if (parts.empty()) throw InvalidArgument("sector needs at least one part");
        int L = 0;
        for (int m : parts) {
            if (m < 1) throw InvalidArgument("sector parts must be positive");
            L += m;
        }
        Sector s;
        s.L_ = L;
        s.parts_ = std::move(parts);
        return s;
    }

    static Sector from_subset(int L, std::vector<int> subset) {
        if (L < 1) throw InvalidArgument("ring length must be >= 1");
        std::sort(subset.begin(), subset.end());
        std::vector<int> parts;
        int prev = 0;
        for (int s : subset) {
            if (s < 1 || s > L - 1) throw InvalidArgument("subset element out of {1,...,L-1}");
            if (s == prev) throw InvalidArgument("subset elements must be distinct");
            parts.push_back(s - prev);
            prev = s;
        }
        parts.push_back(L - prev);
        return from_parts(std::move(parts));
    }

    static Sector from_mask(int L, std::uint32_t mask) {
        std::vector<int> subset;
        for (int r = 1; r < L; ++r)
            if (mask >> (r - 1) & 1) subset.push_back(r);
        return from_subset(L, std::move(subset));
    }

    int L() const { return L_; }
    /// Number of species present (parts count).
    int species() const { return int(parts_.size()); }
    const std::vector<int>& parts() const { return parts_; }

    std::vector<int> subset() const {
        std::vector<int> s;
        int acc = 0;
        for (std::size_t j = 0; j + 1 < parts_.size(); ++j) {
            acc += parts_[j];
            s.push_back(acc);
        }
        return s;
    }

    std::uint32_t subset_mask() const {
        std::uint32_t mask = 0;
        for (int s : subset()) mask |= 1u << (s - 1);
        return mask;
    }

    Sector complement() const {
        std::uint32_t full = (L_ >= 2) ? ((1u << (L_ - 1)) - 1) : 0;
        return from_mask(L_, full & ~subset_mask());
    }

    Sector reversed() const {
        std::vector<int> rev(parts_.rbegin(), parts_.rend());
        return from_parts(std::move(rev));
    }

    /// true when other.subset is contained in this sector's subset.
    bool contains(const Sector& other) const {
        if (other.L_ != L_) return false;
        std::uint32_t a = other.subset_mask(), b = subset_mask();
        return (a & ~b) == 0;
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) os << ',';
            os << parts_[i];
        }
        return os.str();
    }

    friend bool operator==(const Sector& a, const Sector& b) { return a.parts_ == b.parts_; }
    friend bool operator!=(const Sector& a, const Sector& b) { return !(a == b); }
    /// Canonical order: subset cardinality, then lexicographic subset.
    friend bool operator<(const Sector& a, const Sector& b) {
        if (a.L_ != b.L_) return a.L_ < b.L_;
        auto sa = a.subset(), sb = b.subset();
        if (sa.size() != sb.size()) return sa.size() < sb.size();
        return sa < sb;
    }

private:
    int L_ = 0;
    std::vector<int> parts_;
};

/// Parses "2,1,3,1" (parts) or "s:1,3" (subset form, needs L).
inline Sector parse_sector(const std::string& text, int L = -1) {
    auto parse_ints = [](const std::string& csv) {
        std::vector<int> out;
        std::istringstream is(csv);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) throw InvalidArgument("empty field in sector spec");
            out.push_back(std::stoi(tok));
        }
        return out;
    };
    if (text.rfind("s:", 0) == 0) {
        if (L < 1) throw InvalidArgument("subset sector form needs the ring length");
        return Sector::from_subset(L, parse_ints(text.substr(2)));
    }
    Sector s = Sector::from_parts(parse_ints(text));
    if (L >= 1 && s.L() != L) throw InvalidArgument("sector parts do not sum to L");
    return s;
}

struct PosetRelation {
    Sector lower;
    Sector upper;
    bool covers = false;
};

/// All 2^(L-1) basic sectors, ordered by (subset cardinality, lex subset).
inline std::vector<Sector> enumerate_basic_sectors(int L) {
    if (L < 1) throw InvalidArgument("ring length must be >= 1");
    std::vector<Sector> out;
    out.reserve(std::size_t(1) << (L - 1));
    for (std::uint32_t mask = 0; mask < (1u << (L - 1)); ++mask) out.push_back(Sector::from_mask(L, mask));
    std::sort(out.begin(), out.end());
    return out;
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// dim V(m) = L!/(m_1! ... m_n!), exact.
inline BigInt sector_dimension(const Sector& s) {
    BigInt d = factorial(s.L());
    for (int m : s.parts()) d /= factorial(m);
    return d;
}

inline BigInt multinomial(int L, const std::vector<int>& parts) {
    BigInt d = factorial(L);
    for (int m : parts) d /= factorial(m);
    return d;
}

namespace detail {

/// g(m_1,...,m_n) = C(L,m_1) g(m_2,...,m_n) - g(m_1+m_2,m_3,...,m_n),
/// memoized on the parts tuple; base case g(single part) = 1.
inline BigInt genuine_dimension_rec(std::vector<int> parts, std::map<std::vector<int>, BigInt>& memo) {
    if (parts.size() == 1) return 1;
    auto it = memo.find(parts);
    if (it != memo.end()) return it->second;
    int L = std::accumulate(parts.begin(), parts.end(), 0);
    int m1 = parts[0];
    std::vector<int> tail(parts.begin() + 1, parts.end());
    std::vector<int> merged = tail;
    merged[0] += m1;
    BigInt binom = multinomial(L, {m1, L - m1});
    BigInt value = binom * genuine_dimension_rec(tail, memo) - genuine_dimension_rec(merged, memo);
    memo.emplace(std::move(parts), value);
    return value;
}

}  // namespace detail

/// Number of genuine eigenvalues born in the sector (dim of the genuine
/// component): the signed sum of multinomials over adjacent-merge
/// contractions of the composition.
inline BigInt genuine_dimension(const Sector& s) {
    static thread_local std::map<std::vector<int>, BigInt> memo;
    return detail::genuine_dimension_rec(s.parts(), memo);
}

/// Mobius function of the boolean lattice of basic sectors:
/// (-1)^(cardinality gap) on comparable pairs, 0 otherwise.
inline int mobius(const Sector& lower, const Sector& upper) {
    if (!upper.contains(lower)) return 0;
    int gap = upper.species() - lower.species();
    return (gap % 2 == 0) ? 1 : -1;
}

/// Cover pairs (s, s + {r}) of the Hasse diagram, (L-1)*2^(L-2) edges.
inline std::vector<PosetRelation> hasse_cover_edges(int L) {
    if (L < 1) throw InvalidArgument("ring length must be >= 1");
    std::vector<PosetRelation> edges;
    for (const Sector& s : enumerate_basic_sectors(L)) {
        std::uint32_t mask = s.subset_mask();
        for (int r = 1; r < L; ++r) {
            if (mask >> (r - 1) & 1) continue;
            edges.push_back({s, Sector::from_mask(L, mask | (1u << (r - 1))), true});
        }
    }
    return edges;
}

/// Covers of s from below inside s: the sectors s \ {r} for r in s.subset.
inline std::vector<Sector> lower_covers(const Sector& s) {
    std::vector<Sector> out;
    for (int r : s.subset()) out.push_back(Sector::from_mask(s.L(), s.subset_mask() & ~(1u << (r - 1))));
    return out;
}

/// All subsets u of s's subset, as sectors.
inline std::vector<Sector> lower_set(const Sector& s) {
    auto subset = s.subset();
    std::vector<Sector> out;
    for (std::uint32_t pick = 0; pick < (1u << subset.size()); ++pick) {
        std::vector<int> u;
        for (std::size_t i = 0; i < subset.size(); ++i)
            if (pick >> i & 1) u.push_back(subset[i]);
        out.push_back(Sector::from_subset(s.L(), std::move(u)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace masep
