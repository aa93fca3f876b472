#include "cmcnn/ga.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "cmcnn/errors.hpp"

namespace cmcnn {

namespace {

void evaluateSlots(std::vector<Individual>& slots,
                   const GenomeEvaluator& evaluator, int jobs) {
  const auto evaluateOne = [&](Individual& ind) {
    try {
      const EvalOutcome outcome = evaluator(ind.genome, ind.eval_seed);
      ind.fitness = outcome.fitness;
      ind.record = outcome.record;
    } catch (const std::exception&) {
      ind.fitness = 0.0;
      ind.failed = true;
      ind.record.reset();
    }
    ind.evaluated = true;
  };

  if (jobs <= 1 || slots.size() <= 1) {
    for (Individual& ind : slots) {
      evaluateOne(ind);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), slots.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= slots.size()) {
          return;
        }
        evaluateOne(slots[i]);
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
}

/// Fitness-proportionate pick; falls back to uniform when all fitnesses are
/// equal or non-positive.
std::size_t pickParent(const std::vector<Individual>& population,
                       SelectionScheme scheme, RngStream& rng) {
  const std::size_t n = population.size();
  if (scheme == SelectionScheme::UniformRandom) {
    return static_cast<std::size_t>(rng.nextBelow(n));
  }
  double total = 0.0;
  double lo = population.front().fitness;
  double hi = lo;
  for (const Individual& ind : population) {
    total += ind.fitness;
    lo = std::min(lo, ind.fitness);
    hi = std::max(hi, ind.fitness);
  }
  // Roulette needs non-negative masses and some spread; otherwise uniform.
  if (total <= 0.0 || lo == hi || lo < 0.0) {
    return static_cast<std::size_t>(rng.nextBelow(n));
  }
  const double r = rng.nextReal() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += population[i].fitness;
    if (r < acc) {
      return i;
    }
  }
  return n - 1;
}

void accumulateTimings(const std::vector<Individual>& slots, GaResult& result) {
  for (const Individual& ind : slots) {
    if (ind.record) {
      result.total_train_seconds += ind.record->t_train_seconds;
      result.total_predict_seconds += ind.record->t_predict_seconds;
    }
  }
}

GenerationStats statsOf(const std::vector<Individual>& population,
                        int generation, double bestEver) {
  GenerationStats stats;
  stats.generation = generation;
  std::size_t best = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    sum += population[i].fitness;
    if (population[i].fitness > population[best].fitness) {
      best = i;
    }
  }
  stats.best_f = population[best].fitness;
  stats.mean_f = sum / static_cast<double>(population.size());
  stats.best_genome = population[best].genome;
  stats.best_ever_f = std::max(bestEver, stats.best_f);
  return stats;
}

/// Highest fitness; ties keep the earliest slot for determinism.
const Individual& bestOf(const std::vector<Individual>& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i].fitness > population[best].fitness) {
      best = i;
    }
  }
  return population[best];
}

}  // namespace

void GaConfig::validate() const {
  if (population_size < 2 || population_size % 2 != 0) {
    throw ConfigError("GaConfig: population_size must be even and >= 2");
  }
  if (generations < 0) {
    throw ConfigError("GaConfig: generations must be >= 0");
  }
  if (mutation_prob < 0.0 || mutation_prob > 1.0) {
    throw ConfigError("GaConfig: mutation_prob must be in [0, 1]");
  }
  FunctionSet dedup = function_set;
  std::sort(dedup.begin(), dedup.end());
  dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
  if (dedup.size() < 2 || dedup.size() != function_set.size()) {
    throw ConfigError("GaConfig: function_set needs >= 2 distinct functions");
  }
  if (jobs < 1) {
    throw ConfigError("GaConfig: jobs must be >= 1");
  }
  train_config.validate();
}

GaResult runGa(std::size_t genomeLength, const GaConfig& cfg,
               const GenomeEvaluator& evaluator) {
  cfg.validate();
  if (genomeLength < 1) {
    throw GenomeArityError("runGa: genome length must be >= 1");
  }
  const auto n = genomeLength;
  const auto popSize = static_cast<std::size_t>(cfg.population_size);

  GaResult result;

  // Uniform random initial population.
  std::vector<Individual> population(popSize);
  {
    RngStream init(deriveSeed(cfg.master_seed, "ga-init"));
    for (std::size_t i = 0; i < popSize; ++i) {
      population[i].genome = randomGenome(n, cfg.function_set, init);
      population[i].eval_seed = deriveSeed(cfg.master_seed, "eval", 0, i);
    }
  }

  // Score the initial population and remember the elite.
  evaluateSlots(population, evaluator, cfg.jobs);
  accumulateTimings(population, result);
  result.evaluations += static_cast<std::int64_t>(popSize);
  Individual bestEver = bestOf(population);
  result.history.push_back(statsOf(population, 0, bestEver.fitness));

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    const auto g = static_cast<std::uint64_t>(gen);
    RngStream selectRng(deriveSeed(cfg.master_seed, "selection", g));
    RngStream crossRng(deriveSeed(cfg.master_seed, "crossover", g));
    RngStream mutateRng(deriveSeed(cfg.master_seed, "mutation", g));

    // Pair selection and crossover.
    std::vector<Individual> children;
    children.reserve(popSize);
    for (std::size_t pair = 0; pair < popSize / 2; ++pair) {
      const std::size_t ia = pickParent(population, cfg.selection, selectRng);
      const std::size_t ib = pickParent(population, cfg.selection, selectRng);
      Genome childA = population[ia].genome;
      Genome childB = population[ib].genome;
      if (n >= 3) {
        // k uniform in [2, n-1]; genomes shorter than 3 have no valid
        // crossover point and evolve by mutation alone.
        const std::size_t k =
            2 + static_cast<std::size_t>(crossRng.nextBelow(n - 2));
        std::tie(childA, childB) = crossover(childA, childB, k);
      }
      Individual a;
      a.genome = std::move(childA);
      Individual b;
      b.genome = std::move(childB);
      children.push_back(std::move(a));
      children.push_back(std::move(b));
    }

    // Per-child Bernoulli mutation at a uniform point.
    for (Individual& child : children) {
      if (mutateRng.nextReal() < cfg.mutation_prob) {
        const std::size_t j =
            1 + static_cast<std::size_t>(mutateRng.nextBelow(n));
        child.genome = mutate(child.genome, j, cfg.function_set, mutateRng);
      }
    }

    // Score the offspring.
    for (std::size_t i = 0; i < children.size(); ++i) {
      children[i].eval_seed = deriveSeed(cfg.master_seed, "eval", g, i);
    }
    evaluateSlots(children, evaluator, cfg.jobs);
    accumulateTimings(children, result);
    result.evaluations += static_cast<std::int64_t>(children.size());

    // Parents and children compete; the top N by fitness survive, so the
    // elite can never be lost.
    population.insert(population.end(),
                      std::make_move_iterator(children.begin()),
                      std::make_move_iterator(children.end()));
    std::stable_sort(population.begin(), population.end(),
                     [](const Individual& a, const Individual& b) {
                       return a.fitness > b.fitness;
                     });
    population.resize(popSize);

    if (population.front().fitness > bestEver.fitness) {
      bestEver = population.front();
    }
    result.history.push_back(statsOf(population, gen, bestEver.fitness));
  }

  result.best = std::move(bestEver);
  result.final_population = std::move(population);
  return result;
}

GaResult runRandomSelection(std::size_t genomeLength, const GaConfig& cfg,
                            const GenomeEvaluator& evaluator) {
  cfg.validate();
  if (genomeLength < 1) {
    throw GenomeArityError("runRandomSelection: genome length must be >= 1");
  }
  const auto popSize = static_cast<std::size_t>(cfg.population_size);
  const int rounds = cfg.generations + 1;  // same budget as runGa

  GaResult result;
  RngStream draw(deriveSeed(cfg.master_seed, "random-selection"));
  Individual bestEver;
  bool haveBest = false;
  for (int round = 0; round < rounds; ++round) {
    std::vector<Individual> batch(popSize);
    for (std::size_t i = 0; i < popSize; ++i) {
      batch[i].genome = randomGenome(genomeLength, cfg.function_set, draw);
      batch[i].eval_seed = deriveSeed(cfg.master_seed, "eval",
                                      static_cast<std::uint64_t>(round), i);
    }
    evaluateSlots(batch, evaluator, cfg.jobs);
    accumulateTimings(batch, result);
    result.evaluations += static_cast<std::int64_t>(batch.size());
    for (const Individual& ind : batch) {
      if (!haveBest || ind.fitness > bestEver.fitness) {
        bestEver = ind;
        haveBest = true;
      }
    }
    result.history.push_back(
        statsOf(batch, round, haveBest ? bestEver.fitness : 0.0));
    if (round + 1 == rounds) {
      result.final_population = std::move(batch);
    }
  }
  result.best = std::move(bestEver);
  return result;
}

namespace {

template <class Visit>
void forEachGenomeLex(std::size_t n, const FunctionSet& set, Visit&& visit) {
  std::vector<std::size_t> odometer(n, 0);
  std::vector<Activation> genes(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      genes[i] = set[odometer[i]];
    }
    visit(Genome(genes));
    // Advance the least-significant (rightmost) position.
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++odometer[pos] < set.size()) {
        break;
      }
      odometer[pos] = 0;
      if (pos == 0) {
        return;
      }
    }
  }
}

std::uint64_t checkedSpaceSize(std::size_t n, const FunctionSet& set,
                               std::uint64_t cap) {
  if (n < 1 || set.size() < 1) {
    throw DomainError("enumeration: need n >= 1 and a non-empty set");
  }
  const SearchSpaceSize space = searchSpaceSize(n, set.size());
  if (!space.representable || space.total > cap) {
    const std::string size =
        space.representable ? std::to_string(space.total)
                            : (std::to_string(set.size()) + "^" +
                               std::to_string(n) + " (overflows 64 bits)");
    throw SearchSpaceError("enumeration refused: " + size +
                           " genomes exceed the cap of " +
                           std::to_string(cap));
  }
  return space.total;
}

}  // namespace

ExhaustiveResult exhaustiveSearch(
    std::size_t n, const FunctionSet& set,
    const std::function<double(const Genome&)>& score, std::uint64_t cap) {
  checkedSpaceSize(n, set, cap);
  ExhaustiveResult out;
  bool first = true;
  forEachGenomeLex(n, set, [&](const Genome& g) {
    const double f = score(g);
    ++out.evaluated;
    if (first || f > out.best_f) {  // strict: earliest (lex-first) tie wins
      out.best = g;
      out.best_f = f;
      first = false;
    }
  });
  return out;
}

std::vector<std::pair<Genome, double>> enumerateRanked(
    std::size_t n, const FunctionSet& set,
    const std::function<double(const Genome&)>& score, std::uint64_t cap) {
  const std::uint64_t total = checkedSpaceSize(n, set, cap);
  std::vector<std::pair<Genome, double>> all;
  all.reserve(static_cast<std::size_t>(total));
  forEachGenomeLex(n, set,
                   [&](const Genome& g) { all.emplace_back(g, score(g)); });
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return all;
}

}  // namespace cmcnn
