#include "aoimds/channel_model.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoimds {

namespace {

void check_probability(const char* name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) +
                                " must be a probability in [0,1], got " +
                                std::to_string(v));
  }
}

}  // namespace

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool bernoulli(Rng& rng, double p) {
  // Always consume one draw so the stream layout does not depend on p.
  const double u = uniform01(rng);
  return u < p;
}

void GEParams::validate() const {
  check_probability("alpha", alpha);
  check_probability("beta", beta);
  check_probability("eps0", eps0);
  check_probability("eps1", eps1);
  if (alpha + beta <= 0.0) {
    throw std::domain_error(
        "alpha + beta must be positive for a steady state to exist");
  }
}

double steady_state_good(const GEParams& params) {
  if (!(params.alpha + params.beta > 0.0)) {
    throw std::domain_error(
        "alpha + beta must be positive for a steady state to exist");
  }
  return params.beta / (params.alpha + params.beta);
}

double marginal_erasure_prob(const GEParams& params) {
  const double pi_g = steady_state_good(params);
  return params.eps0 * pi_g + params.eps1 * (1.0 - pi_g);
}

GEParams reverse_states(const GEParams& params) {
  return GEParams{params.beta, params.alpha, params.eps1, params.eps0};
}

StepResult step(const GEParams& params, ChannelState state, Rng& rng) {
  const bool good = state == ChannelState::kGood;
  const bool erased = bernoulli(rng, good ? params.eps0 : params.eps1);
  const bool flip = bernoulli(rng, good ? params.alpha : params.beta);
  ChannelState next = state;
  if (flip) next = good ? ChannelState::kBad : ChannelState::kGood;
  return {next, erased};
}

ChannelState stationary_state(const GEParams& params, Rng& rng) {
  return bernoulli(rng, steady_state_good(params)) ? ChannelState::kGood
                                                   : ChannelState::kBad;
}

GilbertElliottChannel::GilbertElliottChannel(const GEParams& params,
                                             std::uint64_t seed)
    : params_(params), rng_(seed), state_(ChannelState::kGood) {
  params_.validate();
  state_ = stationary_state(params_, rng_);
}

GilbertElliottChannel::GilbertElliottChannel(const GEParams& params,
                                             ChannelState initial,
                                             std::uint64_t seed)
    : params_(params), rng_(seed), state_(initial) {
  params_.validate();
}

bool GilbertElliottChannel::transmit() {
  const StepResult r = step(params_, state_, rng_);
  state_ = r.next;
  return r.erased;
}

void GilbertElliottChannel::restart_stationary() {
  state_ = stationary_state(params_, rng_);
}

}  // namespace aoimds
