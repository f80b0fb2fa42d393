#include "tsm/population.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

namespace tsm {

namespace {

// Stream tags keep provider substreams apart from any other consumer of the
// same seed.
constexpr std::uint32_t kProviderStream = 0x70726f76;

double draw(const Distribution& d, std::mt19937_64& rng, const char* name) {
  switch (d.kind) {
    case Distribution::Kind::fixed:
      return d.a;
    case Distribution::Kind::uniform: {
      if (d.a == d.b) return d.a;
      std::uniform_real_distribution<double> u(d.a, d.b);
      return u(rng);
    }
    case Distribution::Kind::normal: {
      std::normal_distribution<double> n(d.a, d.b);
      for (std::size_t attempt = 0; attempt < kMaxRejections; ++attempt) {
        const double x = n(rng);
        if (x >= d.lo && x <= d.hi) return x;
      }
      throw SamplingExhausted(std::string("truncation window for ") + name + " is unsatisfiable");
    }
  }
  return d.a;
}

void check_distribution(const Distribution& d, const char* name) {
  const std::string n(name);
  if (!std::isfinite(d.a) || !std::isfinite(d.b) || !std::isfinite(d.lo) || !std::isfinite(d.hi))
    throw std::invalid_argument(n + " distribution must be finite");
  if (d.kind == Distribution::Kind::uniform && d.b < d.a)
    throw std::invalid_argument(n + " uniform bounds are reversed");
  if (d.kind == Distribution::Kind::normal && (!(d.b > 0) || d.hi < d.lo))
    throw std::invalid_argument(n + " normal needs sd > 0 and lo <= hi");
}

}  // namespace

void validate(const PopulationSpec& spec) {
  if (spec.n_providers == 0) throw std::invalid_argument("n_providers must be positive");
  check_distribution(spec.price, "price");
  check_distribution(spec.alpha, "alpha");
  check_distribution(spec.gamma, "gamma");
  check_distribution(spec.psi, "psi");
  check_distribution(spec.phi, "phi");
  check_distribution(spec.k1, "k1");
  if (!(spec.beta_product_cap > 0 && spec.beta_product_cap <= kMaxExternalityProduct))
    throw std::invalid_argument("beta_product_cap must lie in (0, 0.999]");
  if (!(spec.k2 > 0) || !(spec.p_s > 0) || spec.f_s < 0 || spec.fc_ratio < 0)
    throw std::invalid_argument("k2 and p_s must be positive, f_s and fc_ratio non-negative");
}

Provider sample_provider(const PopulationSpec& spec, std::size_t id) {
  // seed_seq mixes (seed, id, stream) into one 64-bit engine seed; seeding
  // the engine from the sequence directly would cost ~3x more per provider.
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(std::uint64_t(id) >> 32),
                    kProviderStream};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  std::mt19937_64 rng((std::uint64_t(words[0]) << 32) | words[1]);

  Provider out;
  out.id = id;
  out.declared_price = draw(spec.price, rng, "price");
  MarketParams& p = out.params;
  p.alpha = draw(spec.alpha, rng, "alpha");

  std::uniform_real_distribution<double> beta_dist(0.0, 1.0 / p.alpha);
  bool accepted = false;
  for (std::size_t attempt = 0; attempt < kMaxRejections && !accepted; ++attempt) {
    p.beta = beta_dist(rng);
    accepted = p.beta > 0 && p.alpha * p.beta < spec.beta_product_cap;
  }
  if (!accepted) throw SamplingExhausted("beta window is unsatisfiable");

  p.gamma = draw(spec.gamma, rng, "gamma");
  p.psi = draw(spec.psi, rng, "psi");
  p.phi = draw(spec.phi, rng, "phi");
  p.k1 = draw(spec.k1, rng, "k1");
  p.k2 = spec.k2;
  p.f_s = spec.f_s;
  p.p_s = spec.p_s;
  p.f_c = spec.fc_ratio * out.declared_price;
  validate(p);
  return out;
}

Population sample_population(const PopulationSpec& spec, Execution exec) {
  validate(spec);
  Population out(spec.n_providers);
  for_each_index(spec.n_providers, exec, [&](std::size_t i) { out[i] = sample_provider(spec, i); });
  return out;
}

}  // namespace tsm
