#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace satocensus {

struct Atom {
  Rational value;
  Rational mass;
};

struct TailMass {
  Rational mass;
  Rational value;
  // exact sum of mass*value and mass*value^2 over the entries the tail stands for
  Rational first_moment = 0;
  Rational second_moment = 0;
  bool exact_moments = false;
};

/// Finite law with exact rational values and masses. Atoms are kept sorted by
/// value with no repeats; a table-truncated law may park leftover mass in tail.
class DiscreteDist {
 public:
  DiscreteDist() = default;

  /// Sorts, merges equal values and drops zero masses.
  static DiscreteDist from_atoms(std::vector<Atom> atoms, std::optional<TailMass> tail = std::nullopt) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
    DiscreteDist d;
    for (auto& a : atoms) {
      if (a.mass < 0) throw std::invalid_argument("DiscreteDist: negative mass");
      if (a.mass == 0) continue;
      if (!d.atoms_.empty() && d.atoms_.back().value == a.value) {
        d.atoms_.back().mass += a.mass;
      } else {
        d.atoms_.push_back(std::move(a));
      }
    }
    if (tail && tail->mass != 0) d.tail_ = std::move(tail);
    d.validate();
    return d;
  }

  static DiscreteDist point_mass(const Rational& v) { return from_atoms({{v, Rational(1)}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<TailMass>& tail() const { return tail_; }
  std::size_t size() const { return atoms_.size(); }

  Rational total_mass() const {
    Rational s = 0;
    for (const auto& a : atoms_) s += a.mass;
    if (tail_) s += tail_->mass;
    return s;
  }

  /// Mass sitting exactly at v, tail excluded.
  Rational mass_at(const Rational& v) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v,
                               [](const Atom& a, const Rational& x) { return a.value < x; });
    if (it != atoms_.end() && it->value == v) return it->mass;
    return 0;
  }

  /// Same law with the tail folded into an ordinary atom.
  DiscreteDist collapsed() const {
    if (!tail_) return *this;
    auto atoms = atoms_;
    atoms.push_back({tail_->value, tail_->mass});
    return from_atoms(std::move(atoms));
  }

  void validate() const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].mass <= 0) throw std::logic_error("DiscreteDist: non-positive mass");
      if (i && !(atoms_[i - 1].value < atoms_[i].value)) throw std::logic_error("DiscreteDist: unsorted values");
    }
    if (tail_ && tail_->mass < 0) throw std::logic_error("DiscreteDist: negative tail");
    if (total_mass() != 1) throw std::logic_error("DiscreteDist: masses sum to " + to_string(total_mass()));
  }

  bool operator==(const DiscreteDist& o) const {
    if (atoms_.size() != o.atoms_.size()) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i].value != o.atoms_[i].value || atoms_[i].mass != o.atoms_[i].mass) return false;
    if (tail_.has_value() != o.tail_.has_value()) return false;
    if (tail_ && (tail_->mass != o.tail_->mass || tail_->value != o.tail_->value)) return false;
    return true;
  }

 private:
  std::vector<Atom> atoms_;
  std::optional<TailMass> tail_;
};

}  // namespace satocensus
