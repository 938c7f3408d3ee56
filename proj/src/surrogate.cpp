#include "bike/surrogate.hpp"

#include <algorithm>
#include <cctype>

#include "bike/rng.hpp"

namespace bike {

namespace {

Vec token_vector(std::string_view token, std::size_t dim, std::uint64_t seed) {
  // A fresh keyed stream per (token, seed); redraw on the absurd all-zero case
  // to keep the function total.
  for (std::uint64_t attempt = 0;; ++attempt) {
    SplitMix64 g(mix64(fnv1a64(token), seed + attempt));
    Vec v(dim);
    for (double& x : v) x = g.uniform_pm1();
    if (norm2(v) >= 1e-12) return l2_normalize(v);
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Vec surrogate_encode(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidArgumentError("surrogate_encode needs dim >= 2");
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) throw EmptyTextError("surrogate_encode of blank text");

  std::sort(tokens.begin(), tokens.end());
  Vec sum(dim, 0.0);
  for (const std::string& tok : tokens) {
    const Vec tv = token_vector(tok, dim, seed);
    for (std::size_t i = 0; i < dim; ++i) sum[i] += tv[i];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (double& x : sum) x *= inv;
  return l2_normalize(sum);
}

Mat word_embeddings_of(std::string_view name, std::size_t dim, std::uint64_t seed) {
  const std::vector<std::string> tokens = tokenize(name);
  if (tokens.empty()) throw EmptyTextError("word_embeddings_of blank name");
  Mat rows(tokens.size(), dim);
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    const Vec v = surrogate_encode(tokens[r], dim, seed);
    std::copy(v.begin(), v.end(), rows.row(r).begin());
  }
  return rows;
}

}  // namespace bike
