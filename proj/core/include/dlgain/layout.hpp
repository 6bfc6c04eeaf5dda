#pragma once

#include <cstddef>

namespace dlgain {

// Flat indexing for per-user, per-link and per-gain arrays.
//   user (l, k)                     -> l*K + k
//   link: user (l', k') to BS l     -> (l'*K + k')*L + l
//   gain alpha_{lk}^{l'k'}          -> user(l, k)*L*K + user(l', k')
struct Layout {
  int cells = 0;
  int users = 0;

  int num_users() const { return cells * users; }
  int num_links() const { return cells * users * cells; }
  int num_gains() const { return num_users() * num_users(); }

  int user(int l, int k) const { return l * users + k; }
  int link(int user_cell, int k, int bs) const { return (user_cell * users + k) * cells + bs; }
  int gain(int l, int k, int l2, int k2) const { return user(l, k) * num_users() + user(l2, k2); }
};

}  // namespace dlgain
