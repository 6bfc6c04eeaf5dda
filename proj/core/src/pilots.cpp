#include "dlgain/pilots.hpp"

#include <numbers>

#include "dlgain/error.hpp"

namespace dlgain {

PilotBook::PilotBook(int cells, int users, int reuse)
    : users_(users), length_(reuse * users), group_of_cell_(cells) {
  if (cells < 1 || users < 1 || reuse < 1 || cells % reuse != 0) {
    throw Error(ErrorCode::kConfigInvalid, "pilot reuse must divide the number of cells");
  }
  for (int l = 0; l < cells; ++l) group_of_cell_[l] = l % reuse;

  sequences_.resize(length_, length_);
  for (int n = 0; n < length_; ++n) {
    for (int c = 0; c < length_; ++c) {
      const double phase = -2.0 * std::numbers::pi * n * c / length_;
      sequences_(n, c) = std::polar(1.0, phase);
    }
  }
}

int PilotBook::column(int cell, int user) const {
  return group_of_cell_[cell] * users_ + user;
}

Complex PilotBook::inner_product(int cell_a, int user_a, int cell_b, int user_b) const {
  return sequences_.col(column(cell_a, user_a)).dot(sequences_.col(column(cell_b, user_b)));
}

PilotBook assign_pilots(const NetworkConfig& cfg) {
  if (cfg.pilot_length() > cfg.coherence_length) {
    throw Error(ErrorCode::kConfigInvalid, "pilot length exceeds coherence length");
  }
  return PilotBook(cfg.num_cells, cfg.users_per_cell, cfg.pilot_reuse);
}

}  // namespace dlgain
