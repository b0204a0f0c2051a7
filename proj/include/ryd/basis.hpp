#pragma once
// Product-basis indexing for a chain of three-level atoms.
//
// A basis state is a base-3 integer: digit i holds the level of atom i,
// with atom 0 in the least-significant position.  Levels are g=0, e=1, r=2.

#include <array>
#include <cstdint>
#include <vector>

#include "ryd/params.hpp"

namespace ryd {

enum Level : int { lvl_g = 0, lvl_e = 1, lvl_r = 2 };

class BasisIndex {
 public:
  explicit BasisIndex(int n_atoms) : n_(n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("BasisIndex: n_atoms must be >= 1");
    if (n_atoms > kMaxAtoms)
      throw ResourceCapError("BasisIndex: n_atoms exceeds cap");
    pow3_[0] = 1;
    for (int i = 1; i <= n_; ++i) pow3_[i] = 3 * pow3_[i - 1];
  }

  int n_atoms() const { return n_; }
  std::int64_t dim() const { return pow3_[n_]; }

  // Level of one atom in the packed state.
  int level(std::int64_t state, int atom) const {
    return static_cast<int>((state / pow3_[atom]) % 3);
  }

  // Packed state with one atom's level replaced.
  std::int64_t with_level(std::int64_t state, int atom, int level) const {
    return state + (level - this->level(state, atom)) * pow3_[atom];
  }

  // Decode into one level per atom, index = atom.
  std::vector<int> levels(std::int64_t state) const {
    std::vector<int> out(n_);
    for (int i = 0; i < n_; ++i) {
      out[i] = static_cast<int>(state % 3);
      state /= 3;
    }
    return out;
  }

  // Inverse of levels().
  std::int64_t pack(const std::vector<int>& levels) const {
    if (static_cast<int>(levels.size()) != n_)
      throw std::invalid_argument("BasisIndex::pack: wrong number of levels");
    std::int64_t s = 0;
    for (int i = n_ - 1; i >= 0; --i) {
      if (levels[i] < 0 || levels[i] > 2)
        throw std::invalid_argument("BasisIndex::pack: level out of range");
      s = 3 * s + levels[i];
    }
    return s;
  }

  std::int64_t pow3(int k) const { return pow3_[k]; }

 private:
  int n_;
  std::array<std::int64_t, kMaxAtoms + 1> pow3_{};
};

}  // namespace ryd
