#pragma once

#include "dlgain/precoding.hpp"

namespace dlgain {

// One coherence block: channels and estimates, precoders and effective gains.
struct ChannelBlock {
  ChannelEstimates estimates;
  PrecoderSet precoders;
  EffectiveGains gains;
};

// Fills `block` in place so repeated calls reuse its storage.
void generate_block(const Scenario& s, const UplinkStatistics& stats, const PrecodingPlan& plan,
                    Rng& rng, ChannelBlock& block);

ChannelBlock generate_block(const Scenario& s, const UplinkStatistics& stats,
                            const PrecodingPlan& plan, Rng& rng);

}  // namespace dlgain
