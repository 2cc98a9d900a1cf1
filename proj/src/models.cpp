#include "pst/models.hpp"

namespace pst::models {

namespace {

Site unit(int axis) {
  Site s;
  s.t[axis] = 1;
  return s;
}

InteractionTerm pair(Site a, Site b, Energy same_00, Energy e01, Energy e10, Energy e11) {
  return InteractionTerm{{a, b}, {same_00, e01, e10, e11}};
}

}  // namespace

Model ising(Rational J, Rational h, int dimension) {
  Model m;
  m.name = "ising";
  m.geometry = PointSet::cubic(dimension);
  m.spins = SpinSpace({"plus", "minus"});
  for (int axis = 0; axis < dimension; ++axis) m.terms.push_back(pair(Site{}, unit(axis), -J, J, J, -J));
  if (h.numerator() != 0) m.terms.push_back(InteractionTerm{{Site{}}, {Energy(-h), Energy(h)}});
  m.collar = 0;
  return m;
}

Model hard_square(Rational mu, int dimension) {
  Model m;
  m.name = "hardsquare";
  m.geometry = PointSet::cubic(dimension);
  m.spins = SpinSpace({"empty", "occupied"});
  for (int axis = 0; axis < dimension; ++axis) m.terms.push_back(pair(Site{}, unit(axis), 0, 0, 0, Energy::infinite()));
  m.terms.push_back(InteractionTerm{{Site{}}, {Energy(0), Energy(-mu)}});
  m.collar = 1;
  return m;
}

Model equal_neighbor(int dimension) {
  Model m;
  m.name = "equalneighbor";
  m.geometry = PointSet::cubic(dimension);
  m.spins = SpinSpace({"0", "1"});
  for (int axis = 0; axis < dimension; ++axis)
    m.terms.push_back(pair(Site{}, unit(axis), 0, Energy::infinite(), Energy::infinite(), 0));
  m.terms.push_back(InteractionTerm{{Site{}}, {Energy(0), Energy(0)}});
  m.collar = 1;
  return m;
}

Model antiferromagnet(int dimension) {
  Model m = ising(-1, 0, dimension);
  m.name = "antiferromagnet";
  return m;
}

Model honeycomb_hard_core(Rational mu) {
  Model m;
  m.name = "hardsquare-honeycomb";
  m.geometry = PointSet({{1, 0}, {0, 1}}, {{Rational(1, 3), Rational(1, 3)}, {Rational(2, 3), Rational(2, 3)}});
  m.spins = SpinSpace({"empty", "occupied"});
  const Energy inf = Energy::infinite();
  const Site b = make_site({0, 0}, 1);
  m.terms.push_back(pair(make_site({0, 0}, 0), b, 0, 0, 0, inf));
  m.terms.push_back(pair(make_site({1, 0}, 0), b, 0, 0, 0, inf));
  m.terms.push_back(pair(make_site({0, 1}, 0), b, 0, 0, 0, inf));
  for (int k = 0; k < 2; ++k) m.terms.push_back(InteractionTerm{{make_site({0, 0}, k)}, {Energy(0), Energy(-mu)}});
  m.collar = 1;
  return m;
}

}  // namespace pst::models
