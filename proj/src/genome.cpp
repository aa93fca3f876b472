#include "cmcnn/genome.hpp"

#include <algorithm>

#include "cmcnn/errors.hpp"

namespace cmcnn {

std::string Genome::str() const {
  std::string out;
  for (std::size_t i = 0; i < genes_.size(); ++i) {
    if (i > 0) {
      out += '-';
    }
    out += activationName(genes_[i]);
  }
  return out;
}

Genome Genome::fromString(std::string_view text) {
  std::vector<Activation> genes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dash = text.find('-', pos);
    const std::string_view token =
        text.substr(pos, dash == std::string_view::npos ? text.size() - pos
                                                        : dash - pos);
    genes.push_back(activationFromString(token));
    if (dash == std::string_view::npos) {
      break;
    }
    pos = dash + 1;
  }
  return Genome(std::move(genes));
}

Genome randomGenome(std::size_t n, const FunctionSet& set, RngStream& rng) {
  if (n == 0) {
    throw GenomeArityError("randomGenome: genome length must be >= 1");
  }
  if (set.empty()) {
    throw ConfigError("randomGenome: empty function set");
  }
  std::vector<Activation> genes(n);
  for (auto& gene : genes) {
    gene = set[rng.nextBelow(set.size())];
  }
  return Genome(std::move(genes));
}

Genome mutate(const Genome& g, std::size_t j, const FunctionSet& set,
              RngStream& rng) {
  if (j < 1 || j > g.size()) {
    throw IndexError("mutate: point " + std::to_string(j) +
                     " outside [1, " + std::to_string(g.size()) + "]");
  }
  const Activation current = g[j - 1];
  FunctionSet candidates;
  candidates.reserve(set.size());
  for (const Activation f : set) {
    if (f != current) {
      candidates.push_back(f);
    }
  }
  if (candidates.empty()) {
    throw DomainError("mutate: function set offers no alternative gene");
  }
  std::vector<Activation> genes = g.genes();
  genes[j - 1] = candidates[rng.nextBelow(candidates.size())];
  return Genome(std::move(genes));
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b,
                                    std::size_t k) {
  const std::size_t n = a.size();
  if (n != b.size()) {
    throw CrossoverError("crossover: parents have different lengths");
  }
  if (n < 3) {
    throw CrossoverError("crossover: needs genome length >= 3");
  }
  if (k < 2 || k > n - 1) {
    throw CrossoverError("crossover: point " + std::to_string(k) +
                         " outside [2, " + std::to_string(n - 1) + "]");
  }
  std::vector<Activation> c1 = a.genes();
  std::vector<Activation> c2 = b.genes();
  for (std::size_t i = k; i < n; ++i) {
    std::swap(c1[i], c2[i]);
  }
  return {Genome(std::move(c1)), Genome(std::move(c2))};
}

SearchSpaceSize searchSpaceSize(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) {
    throw DomainError("searchSpaceSize: need n >= 1 and m >= 1");
  }
  SearchSpaceSize out;
  out.single_function = m;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > UINT64_MAX / m) {
      out.representable = false;
      out.total = 0;
      out.multi_function = 0;
      return out;
    }
    total *= m;
  }
  out.total = total;
  out.multi_function = total - m;
  return out;
}

}  // namespace cmcnn
