#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <masep/sector.hpp>

using namespace masep;

namespace {

// independent oracle: inclusion-exclusion over all adjacent-merge
// contractions, enumerated as subsets of the composition's boundary set
BigInt genuine_dimension_oracle(const Sector& s) {
    auto subset = s.subset();
    const int L = s.L();
    BigInt total = 0;
    for (std::uint32_t pick = 0; pick < (1u << subset.size()); ++pick) {
        std::vector<int> kept;
        for (std::size_t i = 0; i < subset.size(); ++i)
            if (pick >> i & 1) kept.push_back(subset[i]);
        Sector contraction = Sector::from_subset(L, kept);
        int sign = ((int(subset.size()) - int(kept.size())) % 2 == 0) ? 1 : -1;
        total += sign * sector_dimension(contraction);
    }
    return total;
}

}  // namespace

TEST_CASE("composition/subset bijection") {
    CHECK(Sector::from_parts({2, 1, 3, 1}).subset() == std::vector<int>{2, 3, 6});
    CHECK(Sector::from_subset(7, {2, 3, 6}).parts() == std::vector<int>{2, 1, 3, 1});
    for (int L = 1; L <= 8; ++L)
        for (const Sector& s : enumerate_basic_sectors(L)) {
            CHECK(Sector::from_subset(L, s.subset()) == s);
            CHECK(Sector::from_parts(s.parts()).subset() == s.subset());
        }
    CHECK_THROWS_AS(Sector::from_parts({2, 0, 1}), InvalidArgument);
    CHECK_THROWS_AS(Sector::from_subset(4, {4}), InvalidArgument);
}

TEST_CASE("enumerate_basic_sectors") {
    auto l2 = enumerate_basic_sectors(2);
    REQUIRE(l2.size() == 2);
    CHECK(l2[0].parts() == std::vector<int>{2});
    CHECK(l2[1].parts() == std::vector<int>{1, 1});

    auto l4 = enumerate_basic_sectors(4);
    CHECK(l4.size() == 8);
    bool found = false;
    for (const auto& s : l4)
        if (s.parts() == std::vector<int>{1, 2, 1}) {
            found = true;
            CHECK(s.subset() == std::vector<int>{1, 3});
        }
    CHECK(found);

    CHECK(enumerate_basic_sectors(5).size() == 16);
    CHECK_THROWS_AS(enumerate_basic_sectors(0), InvalidArgument);

    // canonical order: subset cardinality, then lex subset
    for (std::size_t i = 1; i < l4.size(); ++i) CHECK(l4[i - 1] < l4[i]);
}

TEST_CASE("complement") {
    CHECK(Sector::from_parts({1, 3}).complement().parts() == std::vector<int>{2, 1, 1});
    CHECK(Sector::from_parts({4}).complement().parts() == std::vector<int>{1, 1, 1, 1});
    for (int L = 1; L <= 7; ++L)
        for (const Sector& s : enumerate_basic_sectors(L)) CHECK(s.complement().complement() == s);
}

TEST_CASE("sector_dimension") {
    CHECK(sector_dimension(Sector::from_parts({2, 1, 3, 1})) == 420);
    CHECK(sector_dimension(Sector::from_parts({9})) == 1);
    CHECK(sector_dimension(Sector::from_parts({1, 1, 1, 1})) == 24);
    // exact big-integer arithmetic past the 64-bit range
    Sector ones30 = Sector::from_parts(std::vector<int>(30, 1));
    CHECK(sector_dimension(ones30) == factorial(30));
}

TEST_CASE("genuine_dimension examples and oracle") {
    CHECK(genuine_dimension(Sector::from_parts({1, 2, 1, 1})) == 9);
    CHECK(genuine_dimension(Sector::from_parts({2, 3})) == 9);
    const std::vector<std::pair<std::vector<int>, int>> l4_table = {
        {{4}, 1},       {{1, 3}, 3},    {{2, 2}, 5},    {{3, 1}, 3},
        {{1, 1, 2}, 3}, {{1, 2, 1}, 5}, {{2, 1, 1}, 3}, {{1, 1, 1, 1}, 1}};
    for (const auto& [parts, expected] : l4_table)
        CHECK(genuine_dimension(Sector::from_parts(parts)) == expected);
    for (int L = 1; L <= 8; ++L)
        for (const Sector& s : enumerate_basic_sectors(L))
            CHECK(genuine_dimension(s) == genuine_dimension_oracle(s));
    CHECK(genuine_dimension(Sector::from_parts({11})) == 1);
}

TEST_CASE("dimensional duality and partition of dimension") {
    for (int L = 1; L <= 12; ++L) {
        BigInt total = 0;
        for (const Sector& s : enumerate_basic_sectors(L)) {
            CHECK(genuine_dimension(s) == genuine_dimension(s.complement()));
            total += genuine_dimension(s);
        }
        CHECK(total == factorial(L));
    }
    for (int L = 1; L <= 10; ++L)
        for (const Sector& s : enumerate_basic_sectors(L)) {
            BigInt sum = 0;
            for (const Sector& u : lower_set(s)) sum += genuine_dimension(u);
            CHECK(sum == sector_dimension(s));
        }
}

TEST_CASE("mobius") {
    Sector s123 = Sector::from_subset(4, {1, 2, 3});
    CHECK(mobius(Sector::from_subset(4, {1}), s123) == 1);
    CHECK(mobius(Sector::from_subset(4, {1, 2}), s123) == -1);
    CHECK(mobius(s123, Sector::from_subset(4, {1})) == 0);  // non-comparable direction

    // mu * zeta = identity on the subset lattice
    for (int L = 2; L <= 6; ++L) {
        auto sectors = enumerate_basic_sectors(L);
        const int n = int(sectors.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long acc = 0;
                for (int k = 0; k < n; ++k) {
                    int zeta = sectors[j].contains(sectors[k]) ? 1 : 0;
                    acc += mobius(sectors[i], sectors[k]) * zeta;
                }
                CHECK(acc == (i == j ? 1 : 0));
            }
    }

    // Mobius inversion recovers the genuine dimension at L=4
    for (const Sector& s : enumerate_basic_sectors(4)) {
        BigInt acc = 0;
        for (const Sector& u : lower_set(s)) acc += mobius(u, s) * sector_dimension(u);
        CHECK(acc == genuine_dimension(s));
    }
}

TEST_CASE("hasse_cover_edges") {
    auto e2 = hasse_cover_edges(2);
    REQUIRE(e2.size() == 1);
    CHECK(e2[0].lower.parts() == std::vector<int>{2});
    CHECK(e2[0].upper.parts() == std::vector<int>{1, 1});
    CHECK(e2[0].covers);
    CHECK(hasse_cover_edges(4).size() == 12);
    CHECK(hasse_cover_edges(5).size() == 32);
    for (const auto& edge : hasse_cover_edges(5)) {
        CHECK(edge.upper.contains(edge.lower));
        CHECK(edge.upper.species() == edge.lower.species() + 1);
    }
}

TEST_CASE("sector text format") {
    CHECK(parse_sector("2,1,3,1").str() == "2,1,3,1");
    CHECK(parse_sector("s:2,3,6", 7).parts() == std::vector<int>{2, 1, 3, 1});
    CHECK_THROWS_AS(parse_sector("s:1,3"), InvalidArgument);  // subset form needs L
    CHECK_THROWS_AS(parse_sector("2,2", 7), InvalidArgument);
}
