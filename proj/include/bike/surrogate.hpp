#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bike/numerics.hpp"

namespace bike {

// Lowercases (ASCII) and splits on whitespace. Empty result for blank input.
std::vector<std::string> tokenize(std::string_view text);

// Deterministic stand-in for a text encoder: each token maps to a unit vector
// fully determined by (token bytes, seed), the output is the normalized mean
// of the token vectors. Token vectors are summed in sorted-token order so the
// result is bitwise invariant under word reordering.
Vec surrogate_encode(std::string_view text, std::size_t dim, std::uint64_t seed);

// One surrogate row per whitespace-separated word, in the order written.
Mat word_embeddings_of(std::string_view name, std::size_t dim, std::uint64_t seed);

}  // namespace bike
