#ifndef AOIMDS_CHANNEL_MODEL_H_
#define AOIMDS_CHANNEL_MODEL_H_

#include <cstdint>
#include <random>

namespace aoimds {

// All randomness in the library flows through this engine so that a seed
// fully determines a trace.
using Rng = std::mt19937_64;

// Uniform draw in [0, 1) from the top 53 bits of one engine output. Used
// instead of std::uniform_real_distribution so traces do not depend on the
// standard library implementation.
double uniform01(Rng& rng);

// Bernoulli(p) draw. p <= 0 never fires, p >= 1 always fires.
bool bernoulli(Rng& rng, double p);

// Parameters of the two-state Gilbert-Elliott packet erasure channel.
//   alpha: P(Good -> Bad), beta: P(Bad -> Good)
//   eps0:  erasure probability in Good, eps1: erasure probability in Bad
struct GEParams {
  double alpha = 0.0;
  double beta = 0.0;
  double eps0 = 0.0;
  double eps1 = 0.0;

  // Throws std::invalid_argument if a field is outside [0,1] or NaN, and
  // std::domain_error if alpha + beta == 0 (no steady state).
  void validate() const;

  friend bool operator==(const GEParams&, const GEParams&) = default;
};

enum class ChannelState : int { kGood = 0, kBad = 1 };

struct StepResult {
  ChannelState next;
  bool erased;
};

// pi_g = beta / (alpha + beta).
double steady_state_good(const GEParams& params);

// Stationary per-use erasure probability eps0*pi_g + eps1*(1 - pi_g).
double marginal_erasure_prob(const GEParams& params);

// Relabels Good <-> Bad. Involutive; leaves the erasure law unchanged.
GEParams reverse_states(const GEParams& params);

// One channel use: the erasure is drawn from the current state, then the
// state advances.
StepResult step(const GEParams& params, ChannelState state, Rng& rng);

// Draws a state from the stationary distribution.
ChannelState stationary_state(const GEParams& params, Rng& rng);

// Stateful sampler owning one continuous channel trajectory. Not thread-safe;
// use one instance per thread.
class GilbertElliottChannel {
 public:
  // Starts from a stationary draw.
  GilbertElliottChannel(const GEParams& params, std::uint64_t seed);
  GilbertElliottChannel(const GEParams& params, ChannelState initial,
                        std::uint64_t seed);

  // Transmits one packet; returns true if it was erased.
  bool transmit();

  // Restarts the trajectory from a fresh stationary draw (the RNG stream
  // continues).
  void restart_stationary();

  ChannelState state() const { return state_; }
  const GEParams& params() const { return params_; }
  Rng& rng() { return rng_; }

 private:
  GEParams params_;
  Rng rng_;
  ChannelState state_;
};

}  // namespace aoimds

#endif  // AOIMDS_CHANNEL_MODEL_H_
