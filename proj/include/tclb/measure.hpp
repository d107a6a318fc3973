#pragma once

#include <map>
#include <vector>

#include "tclb/rational.hpp"
#include "tclb/stgraph.hpp"

namespace tclb {

// Rational-valued signed measure on vertex ids with zero total mass.
class SignedMeasure {
 public:
  SignedMeasure() = default;

  explicit SignedMeasure(std::map<VertexId, Rational> atoms) {
    Rational total(0);
    for (auto& [v, q] : atoms) {
      total += q;
      if (q != 0) atoms_[v] = q;
    }
    if (total != 0)
      throw std::invalid_argument("SignedMeasure: nonzero total mass " + to_string(total));
  }

  static SignedMeasure dirac_difference(VertexId u, VertexId v, const Rational& amount = Rational(1)) {
    std::map<VertexId, Rational> a;
    a[u] += amount;
    a[v] -= amount;
    return SignedMeasure(std::move(a));
  }

  const std::map<VertexId, Rational>& atoms() const { return atoms_; }
  bool is_zero() const { return atoms_.empty(); }

  Rational at(VertexId v) const {
    auto it = atoms_.find(v);
    return it == atoms_.end() ? Rational(0) : it->second;
  }

  std::vector<VertexId> support() const {
    std::vector<VertexId> s;
    s.reserve(atoms_.size());
    for (auto& [v, q] : atoms_) (void)q, s.push_back(v);
    return s;
  }

  // mu(A)
  template <class Contains>
  Rational mass_on(Contains&& in_a) const {
    Rational m(0);
    for (auto& [v, q] : atoms_)
      if (in_a(v)) m += q;
    return m;
  }

  SignedMeasure operator+(const SignedMeasure& o) const {
    SignedMeasure r(*this);
    for (auto& [v, q] : o.atoms_) {
      Rational nv = r.at(v) + q;
      if (nv == 0)
        r.atoms_.erase(v);
      else
        r.atoms_[v] = nv;
    }
    return r;
  }
  SignedMeasure operator-(const SignedMeasure& o) const { return *this + (o * Rational(-1)); }
  SignedMeasure operator*(const Rational& c) const {
    SignedMeasure r;
    if (c == 0) return r;
    for (auto& [v, q] : atoms_) r.atoms_[v] = q * c;
    return r;
  }

  // integral of f against the measure; f must cover the support
  Rational integrate(const std::map<VertexId, Rational>& f) const {
    Rational s(0);
    for (auto& [v, q] : atoms_) {
      auto it = f.find(v);
      if (it == f.end())
        throw std::invalid_argument("integrate: function missing a support point");
      s += q * it->second;
    }
    return s;
  }

  bool operator==(const SignedMeasure& o) const { return atoms_ == o.atoms_; }

 private:
  std::map<VertexId, Rational> atoms_;  // nonzero entries only
};

}  // namespace tclb
