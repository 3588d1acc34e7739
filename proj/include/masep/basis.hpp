#pragma once

#include <memory>
#include <unordered_map>

#include "masep/sector.hpp"

namespace masep {

/// Ordered enumeration of the configurations of a sector, with an index map.
/// States are listed in lexicographic order on (k_1,...,k_L).
struct SectorBasis {
    Sector sector;
    std::vector<Config> states;
    std::unordered_map<std::uint64_t, int> index;
    int bits = 0;  // bits per site in the packed key

    int dim() const { return int(states.size()); }

    int index_of(const Config& k) const {
        auto it = index.find(encode_config(k, bits));
        if (it == index.end()) throw InvalidArgument("configuration not in sector basis");
        return it->second;
    }
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

inline BasisPtr build_basis(const Sector& s, std::size_t capacity = 1000000) {
    BigInt dim = sector_dimension(s);
    if (dim > BigInt(capacity))
        throw CapacityError("sector " + s.str() + " has dimension " + dim.str() +
                            " > capacity " + std::to_string(capacity));
    auto basis = std::make_shared<SectorBasis>();
    basis->sector = s;
    basis->bits = bits_for_states(s.species());
    if (std::size_t(s.L()) * basis->bits > 64)
        throw CapacityError("configuration does not fit the 64-bit packing");

    Config word;
    int value = 1;
    for (int m : s.parts()) {
        word.insert(word.end(), m, value);
        ++value;
    }
    // std::next_permutation from the sorted word yields lex order.
    int pos = 0;
    do {
        basis->states.push_back(word);
        basis->index.emplace(encode_config(word, basis->bits), pos++);
    } while (std::next_permutation(word.begin(), word.end()));
    return basis;
}

}  // namespace masep
