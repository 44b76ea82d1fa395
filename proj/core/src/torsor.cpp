#include "holo/torsor.hpp"

#include "holo/errors.hpp"

namespace holo {

namespace {

void require_same_torsor(const Torsor& a, const Torsor& b, const char* op) {
  if (!(a == b))
    throw TorsorMismatch(std::string(op) + ": elements of '" + a.label + "' and '" + b.label +
                         "'");
}

}  // namespace

TorsorElement act(const TorsorElement& x, const lie::GroupElement& g) {
  return {x.torsor, lie::mul(x.value, g)};
}

lie::GroupElement d_map(const TorsorElement& x, const TorsorElement& y) {
  require_same_torsor(x.torsor, y.torsor, "d_map");
  return lie::mul(lie::inverse(x.value), y.value);
}

TorsorMorphism identity_morphism(const Torsor& t) {
  return {t, t, lie::identity(t.group)};
}

TorsorElement apply(const TorsorMorphism& f, const TorsorElement& x) {
  require_same_torsor(f.source, x.torsor, "apply");
  return {f.target, lie::mul(f.value, x.value)};
}

TorsorMorphism compose(const TorsorMorphism& f, const TorsorMorphism& h) {
  require_same_torsor(f.source, h.target, "compose");
  return {h.source, f.target, lie::mul(f.value, h.value)};
}

TorsorMorphism invert(const TorsorMorphism& f) {
  return {f.target, f.source, lie::inverse(f.value)};
}

lie::GroupElement psi(const TorsorElement& x, const TorsorMorphism& f) {
  require_same_torsor(f.source, f.target, "psi");
  return d_map(x, apply(f, x));
}

}  // namespace holo
