#pragma once

#include <vector>

#include "dlgain/config.hpp"
#include "dlgain/linalg.hpp"

namespace dlgain {

// Pilot sequences are the columns of a tau_p x tau_p DFT matrix (each with
// squared norm tau_p). Cells are split round-robin into `pilot_reuse` groups;
// group g owns columns [g*K, (g+1)*K) and user k of every cell in the group
// uses column g*K + k.
class PilotBook {
 public:
  PilotBook() = default;
  PilotBook(int cells, int users, int reuse);

  int length() const { return length_; }
  int group_of_cell(int cell) const { return group_of_cell_[cell]; }
  int column(int cell, int user) const;
  bool shares_pilots(int cell_a, int cell_b) const {
    return group_of_cell_[cell_a] == group_of_cell_[cell_b];
  }

  const CMatrix& sequences() const { return sequences_; }
  CVector sequence(int cell, int user) const { return sequences_.col(column(cell, user)); }

  // phi_{lk}^H phi_{l'k'} evaluated on the stored sequences.
  Complex inner_product(int cell_a, int user_a, int cell_b, int user_b) const;

 private:
  int users_ = 0;
  int length_ = 0;
  std::vector<int> group_of_cell_;
  CMatrix sequences_;
};

PilotBook assign_pilots(const NetworkConfig& cfg);

}  // namespace dlgain
