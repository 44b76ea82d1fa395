#pragma once

#include <string>

#include "holo/lie.hpp"

// G-torsors at desk scale.  Every G-torsor is isomorphic to G itself, so
// torsors are modeled as labeled copies of G with right multiplication; the
// difference map d and the identification Aut(X) ~ G are then exact.

namespace holo {

struct Torsor {
  lie::GroupSpec group;
  std::string label;

  bool operator==(const Torsor&) const = default;
};

/// A point of the torsor, i.e. a group element of the labeled copy.
struct TorsorElement {
  Torsor torsor;
  lie::GroupElement value;
};

/// Equivariant map between torsors, represented by left multiplication:
/// f(x) = value . x, so f(x . g) = f(x) . g holds identically.
struct TorsorMorphism {
  Torsor source;
  Torsor target;
  lie::GroupElement value;
};

TorsorElement act(const TorsorElement& x, const lie::GroupElement& g);

/// The unique d with x . d(x,y) = y; in the model d(x,y) = x^-1 y.
lie::GroupElement d_map(const TorsorElement& x, const TorsorElement& y);

TorsorMorphism identity_morphism(const Torsor& t);
TorsorElement apply(const TorsorMorphism& f, const TorsorElement& x);

/// compose(f, h) = f after h.
TorsorMorphism compose(const TorsorMorphism& f, const TorsorMorphism& h);
TorsorMorphism invert(const TorsorMorphism& f);

/// psi_x(f) = d(x, f(x)): the base-point identification Aut(X) -> G.
/// Multiplicative, with base change psi_{x.b} = b^-1 psi_x b.
lie::GroupElement psi(const TorsorElement& x, const TorsorMorphism& f);

}  // namespace holo
