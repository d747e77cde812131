#include "gevrey_mkdv/energies.hpp"

namespace gmkdv {

EnergyTerms energy_terms(const Field& weighted) {
  const Field& U = weighted;
  const Field ux = derivative(U, 1);
  const Field uxx = derivative(U, 2);
  EnergyTerms t;
  t.l2 = integrate_product(U, U);
  t.grad2 = integrate_product(ux, ux);
  t.quartic = integrate_product(U, U, U, U);
  t.lap2 = integrate_product(uxx, uxx);
  t.sextic = integrate_product(U, U, U, U, U, U);
  t.mixed = integrate_product(U, U, ux, ux);
  return t;
}

double level0(const EnergyTerms& terms) { return terms.l2; }

double level1(const EnergyTerms& terms, double mu) {
  return terms.grad2 - mu / 6.0 * terms.quartic;
}

double level2(const EnergyTerms& terms, double mu) {
  return terms.lap2 + terms.sextic / 18.0 - 5.0 * mu / 3.0 * terms.mixed;
}

EnergyLedger modified_energy(const Field& u, double sigma, double mu,
                             WeightKind kind, double t) {
  if (!u.is_real()) throw InvalidInput("modified_energy: field must be real");
  require_sigma_gate(u.grid(), sigma);

  EnergyLedger ledger;
  ledger.t = t;
  ledger.sigma = sigma;
  ledger.mu = mu;
  ledger.kind = kind;

  const EnergyTerms base = energy_terms(u);
  ledger.mass = level0(base);
  ledger.h1_energy = level1(base, mu);
  ledger.i2_at_zero = level2(base, mu);

  ledger.terms = sigma == 0.0 ? base : energy_terms(apply_weight(u, kind, sigma));
  ledger.i0 = level0(ledger.terms);
  ledger.i1 = level1(ledger.terms, mu);
  ledger.i2 = level2(ledger.terms, mu);
  ledger.a_sigma = ledger.i0 + ledger.i1 + ledger.i2;
  return ledger;
}

ClassicalInvariants classical_invariants(const Field& u, double mu) {
  if (!u.is_real()) throw InvalidInput("classical_invariants: field must be real");
  const EnergyTerms base = energy_terms(u);
  return {level0(base), level1(base, mu), level2(base, mu)};
}

double h1_level_energy(const Field& u, double sigma, double mu,
                       WeightKind kind) {
  if (!u.is_real()) throw InvalidInput("h1_level_energy: field must be real");
  require_sigma_gate(u.grid(), sigma);
  const Field U = apply_weight(u, kind, sigma);
  const Field ux = derivative(U, 1);
  return integrate_product(U, U) + integrate_product(ux, ux) -
         mu / 6.0 * integrate_product(U, U, U, U);
}

}  // namespace gmkdv
