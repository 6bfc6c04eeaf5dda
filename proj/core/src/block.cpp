#include "dlgain/block.hpp"

namespace dlgain {

void generate_block(const Scenario& s, const UplinkStatistics& stats, const PrecodingPlan& plan,
                    Rng& rng, ChannelBlock& block) {
  run_uplink_training(s, stats, rng, block.estimates);
  build_precoders(s, block.estimates, plan, block.precoders);
  effective_gains(s, block.estimates, block.precoders, block.gains);
}

ChannelBlock generate_block(const Scenario& s, const UplinkStatistics& stats,
                            const PrecodingPlan& plan, Rng& rng) {
  ChannelBlock block;
  generate_block(s, stats, plan, rng, block);
  return block;
}

}  // namespace dlgain
