#include <algorithm>
#include <array>
#include <map>

#include <doctest.h>

#include "cmcnn/errors.hpp"
#include "cmcnn/genome.hpp"

using namespace cmcnn;

TEST_CASE("genome strings round-trip") {
  const Genome g = Genome::fromString("RELU-SIG-TANH-ELU");
  REQUIRE(g.size() == 4);
  CHECK(g[0] == Activation::Relu);
  CHECK(g[3] == Activation::Elu);
  CHECK(g.str() == "RELU-SIG-TANH-ELU");
  CHECK_THROWS_AS(Genome::fromString("RELU-XYZ"), ConfigError);
}

TEST_CASE("randomGenome: single-function set gives the single genome") {
  RngStream rng(1);
  const Genome g = randomGenome(1, {Activation::Tanh}, rng);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == Activation::Tanh);
}

TEST_CASE("randomGenome rejects n = 0") {
  RngStream rng(1);
  CHECK_THROWS_AS(randomGenome(0, defaultFunctionSet(), rng),
                  GenomeArityError);
}

TEST_CASE("randomGenome is uniform per position (1e5 draws, 0.25 +- 0.01)") {
  RngStream rng(77);
  const FunctionSet set = defaultFunctionSet();
  const int draws = 100000;
  std::array<std::array<int, 4>, 4> counts{};  // [position][function]
  for (int i = 0; i < draws; ++i) {
    const Genome g = randomGenome(4, set, rng);
    for (std::size_t pos = 0; pos < 4; ++pos) {
      ++counts[pos][static_cast<std::size_t>(g[pos])];
    }
  }
  for (std::size_t pos = 0; pos < 4; ++pos) {
    for (std::size_t f = 0; f < 4; ++f) {
      const double freq = static_cast<double>(counts[pos][f]) / draws;
      CHECK(std::abs(freq - 0.25) <= 0.01);
    }
  }
}

TEST_CASE("randomGenome is deterministic for a fixed stream") {
  RngStream a(55);
  RngStream b(55);
  CHECK(randomGenome(8, defaultFunctionSet(), a) ==
        randomGenome(8, defaultFunctionSet(), b));
}

TEST_CASE("mutate changes exactly the requested point to a different gene") {
  const Genome g = Genome::fromString("RELU-SIG-TANH-ELU");
  RngStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const Genome m = mutate(g, 2, defaultFunctionSet(), rng);
    CHECK(m[0] == Activation::Relu);
    CHECK(m[1] != Activation::Sig);
    CHECK(m[2] == Activation::Tanh);
    CHECK(m[3] == Activation::Elu);
  }
  // Input untouched.
  CHECK(g.str() == "RELU-SIG-TANH-ELU");
}

TEST_CASE("mutate with m = 2 and n = 1 deterministically flips") {
  const FunctionSet pair = {Activation::Relu, Activation::Sig};
  RngStream rng(9);
  const Genome g(std::vector<Activation>{Activation::Relu});
  const Genome m = mutate(g, 1, pair, rng);
  CHECK(m[0] == Activation::Sig);
}

TEST_CASE("mutate validates the point and the set") {
  const Genome g = Genome::fromString("RELU-SIG");
  RngStream rng(2);
  CHECK_THROWS_AS(mutate(g, 0, defaultFunctionSet(), rng), IndexError);
  CHECK_THROWS_AS(mutate(g, 3, defaultFunctionSet(), rng), IndexError);
  CHECK_THROWS_AS(mutate(g, 1, {Activation::Relu}, rng), DomainError);
}

TEST_CASE("10^4 random mutations are Hamming distance exactly 1") {
  RngStream rng(123);
  const FunctionSet set = defaultFunctionSet();
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.nextBelow(12);
    const Genome g = randomGenome(n, set, rng);
    const std::size_t j = 1 + rng.nextBelow(n);
    const Genome m = mutate(g, j, set, rng);
    std::size_t distance = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (g[i] != m[i]) {
        ++distance;
        CHECK(i == j - 1);
      }
    }
    CHECK(distance == 1);
  }
}

TEST_CASE("crossover splices at the requested point") {
  const Genome a = Genome::fromString("RELU-RELU-RELU-RELU");
  const Genome b = Genome::fromString("SIG-SIG-SIG-SIG");
  const auto [c1, c2] = crossover(a, b, 2);
  CHECK(c1.str() == "RELU-RELU-SIG-SIG");
  CHECK(c2.str() == "SIG-SIG-RELU-RELU");
  CHECK(a.str() == "RELU-RELU-RELU-RELU");
  CHECK(b.str() == "SIG-SIG-SIG-SIG");
}

TEST_CASE("self-crossover returns two copies") {
  const Genome a = Genome::fromString("TANH-ELU-SIG-RELU-TANH");
  const auto [c1, c2] = crossover(a, a, 3);
  CHECK(c1 == a);
  CHECK(c2 == a);
}

TEST_CASE("crossover validates lengths and point range") {
  const Genome a = Genome::fromString("RELU-SIG-TANH");
  const Genome b = Genome::fromString("ELU-ELU-ELU");
  CHECK_THROWS_AS(crossover(a, Genome::fromString("RELU-SIG"), 2),
                  CrossoverError);
  CHECK_THROWS_AS(crossover(a, b, 1), CrossoverError);
  CHECK_THROWS_AS(crossover(a, b, 3), CrossoverError);
  CHECK_THROWS_AS(
      crossover(Genome::fromString("RELU-SIG"),
                Genome::fromString("ELU-ELU"), 2),
      CrossoverError);
}

TEST_CASE("10^4 random crossovers preserve gene multiset and point") {
  RngStream rng(321);
  const FunctionSet set = defaultFunctionSet();
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 3 + rng.nextBelow(10);
    const Genome a = randomGenome(n, set, rng);
    const Genome b = randomGenome(n, set, rng);
    const std::size_t k = 2 + rng.nextBelow(n - 2);
    const auto [c1, c2] = crossover(a, b, k);

    CHECK(c1.size() == n);
    CHECK(c2.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < k) {
        CHECK(c1[i] == a[i]);
        CHECK(c2[i] == b[i]);
      } else {
        CHECK(c1[i] == b[i]);
        CHECK(c2[i] == a[i]);
      }
    }

    std::map<Activation, int> parents;
    std::map<Activation, int> children;
    for (std::size_t i = 0; i < n; ++i) {
      ++parents[a[i]];
      ++parents[b[i]];
      ++children[c1[i]];
      ++children[c2[i]];
    }
    CHECK(parents == children);
  }
}

TEST_CASE("search space size formula") {
  SearchSpaceSize s = searchSpaceSize(4, 4);
  CHECK(s.representable);
  CHECK(s.total == 256);
  CHECK(s.multi_function == 252);
  CHECK(s.single_function == 4);

  s = searchSpaceSize(1, 4);
  CHECK(s.total == 4);
  CHECK(s.multi_function == 0);
  CHECK(s.single_function == 4);

  s = searchSpaceSize(10, 4);
  CHECK(s.total == 1048576);
  CHECK(s.multi_function == 1048572);

  s = searchSpaceSize(50, 4);  // 4^50 = 2^100 does not fit in 64 bits
  CHECK_FALSE(s.representable);
  CHECK(s.single_function == 4);

  CHECK_THROWS_AS(searchSpaceSize(0, 4), DomainError);
}
