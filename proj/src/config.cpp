#include "smartrar/config.hpp"

#include <stdexcept>

namespace smartrar {

void EventOffsets::validate() const {
  if (!(0 < stage1_eval && stage1_eval < y1_record && stage1_eval < stage2_eval &&
        stage2_eval < y2_record && stage2_eval < y3_record)) {
    throw std::invalid_argument("event offsets must be positive and ordered");
  }
}

void TrialConfig::validate() const {
  if (!arms.stage1.empty() || !arms.stage2.empty()) arms.validate();
  if (n_subjects <= 0) throw std::invalid_argument("n_subjects must be positive");
  if (t_enroll <= 0) throw std::invalid_argument("t_enroll must be positive");
  if (t_end < t_enroll + offsets.stage1_eval) {
    throw std::invalid_argument("t_end must leave room for stage-2 assignment of "
                                "the last enrollee (t_end >= t_enroll + stage-1 eval offset)");
  }
  if (burn_in_count < 0) throw std::invalid_argument("burn_in_count must be >= 0");
  if (posterior_draws <= 0) throw std::invalid_argument("posterior_draws must be positive");
  if (!(clip_lo >= 0.0 && clip_lo < clip_hi && clip_hi <= 1.0)) {
    throw std::invalid_argument("clip bounds must satisfy 0 <= lo < hi <= 1");
  }
  offsets.validate();
}

}  // namespace smartrar
