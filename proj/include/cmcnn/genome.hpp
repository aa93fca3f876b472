#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmcnn/activation.hpp"
#include "cmcnn/rng.hpp"

namespace cmcnn {

/// An activation-function string [g1 g2 ... gn]: one gene per convolutional
/// layer. Immutable value type; the variation operators return new genomes.
class Genome {
 public:
  Genome() = default;
  explicit Genome(std::vector<Activation> genes) : genes_(std::move(genes)) {}

  std::size_t size() const { return genes_.size(); }
  bool empty() const { return genes_.empty(); }
  Activation operator[](std::size_t i) const { return genes_[i]; }
  const std::vector<Activation>& genes() const { return genes_; }

  auto begin() const { return genes_.begin(); }
  auto end() const { return genes_.end(); }

  bool operator==(const Genome& other) const = default;

  /// Hyphenated form, e.g. "RELU-SIG-TANH-ELU".
  std::string str() const;
  static Genome fromString(std::string_view text);

 private:
  std::vector<Activation> genes_;
};

/// Uniform random genome: every position i.i.d. over the function set.
/// Accepts a single-function set (the degenerate one-genome space).
Genome randomGenome(std::size_t n, const FunctionSet& set, RngStream& rng);

/// Point mutation at 1-based position j: the gene at j is replaced by a
/// uniformly chosen *different* function from the set.
Genome mutate(const Genome& g, std::size_t j, const FunctionSet& set,
              RngStream& rng);

/// Single-point crossover at 1-based point k in [2, n-1]:
/// returns (a[1..k] ++ b[k+1..n], b[1..k] ++ a[k+1..n]).
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b,
                                    std::size_t k);

struct SearchSpaceSize {
  bool representable = true;  // false when m^n overflows 64 bits
  std::uint64_t total = 0;          // m^n
  std::uint64_t multi_function = 0;  // m^n - m
  std::uint64_t single_function = 0;  // m
};

/// Counts the genome space of length n over m functions.
SearchSpaceSize searchSpaceSize(std::size_t n, std::size_t m);

}  // namespace cmcnn
