#pragma once

#include "fair_amdp/mdp.hpp"

#include <cstdint>
#include <string_view>

namespace fairmdp {

/**
 * Deterministic pseudorandom stream (SplitMix64: a counter-based generator
 * with period 2^64). Identical seeds produce identical sequences on every
 * platform. Child streams are derived from the root seed and a label, so a
 * fork is independent of how much the parent has already consumed.
 */
class RngStream {
  public:
    explicit RngStream(uint64_t seed) : seed_(seed), state_(seed) {}

    uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double next_uniform();

    RngStream fork(std::string_view label) const;
    RngStream fork(uint64_t index) const;

    uint64_t seed() const { return seed_; }

  private:
    uint64_t seed_;
    uint64_t state_;
};

/// Result of one generative-model query at a state-action pair.
struct SampleOutcome {
    int next_state;
    double reward;
};

/**
 * Samples index i with probability weights[i] / sum(weights) by inverse CDF
 * on a single uniform draw. Consumes exactly one variate, which makes run
 * transcripts reproducible across refactors.
 *
 * Throws std::invalid_argument when the weights sum to zero (or contain a
 * negative entry).
 */
int sample_categorical(const Vec& weights, RngStream& rng);

/// Next state drawn from Gamma((s,a), .), reward r_{s,a} returned exactly.
SampleOutcome sample_transition(const MdpModel& model, int s, int a, RngStream& rng);

/// Flat pair index uniform over [pair_count); one variate.
int sample_pair_uniform(int pair_count, RngStream& rng);

/// Flat pair index distributed as the occupancy-style vector x; one variate.
int sample_pair_from(const Vec& x, RngStream& rng);

/**
 * Generative-model boundary: the only view of the MDP the stochastic solver
 * is allowed to touch. Exposes dimensions and sampled transitions; the
 * transition matrix itself stays private.
 */
class GenerativeOracle {
  public:
    explicit GenerativeOracle(const MdpModel& model) : model_(&model) {}

    int n_states() const { return model_->n_states; }
    int n_actions() const { return model_->n_actions; }
    int pair_count() const { return model_->pair_count(); }

    SampleOutcome sample(int s, int a, RngStream& rng) const {
        return sample_transition(*model_, s, a, rng);
    }
    SampleOutcome sample_pair(int pair, RngStream& rng) const {
        return sample(pair / model_->n_actions, pair % model_->n_actions, rng);
    }

  private:
    const MdpModel* model_;
};

} // namespace fairmdp
