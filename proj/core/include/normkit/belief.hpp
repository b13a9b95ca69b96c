#pragma once

#include <string>

namespace normkit {

/// Dempster-Shafer support/plausibility bounds [alpha, beta] on a proposition
/// or rule. Always satisfies 0 <= alpha <= beta <= 1.
///
/// alpha = beta = 1 reads as "logically true"; [0, 1] is maximal uncertainty.
class BeliefInterval {
 public:
  /// Throws DomainError unless both bounds are finite and 0 <= alpha <= beta <= 1.
  BeliefInterval(double alpha, double beta);

  /// Lifts a scalar mass m to [m, 1]: m supports the proposition, the rest is
  /// left uncommitted.
  static BeliefInterval from_mass(double mass);

  static BeliefInterval certain() noexcept { return BeliefInterval(Unchecked{}, 1.0, 1.0); }
  static BeliefInterval vacuous() noexcept { return BeliefInterval(Unchecked{}, 0.0, 1.0); }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double uncertainty() const noexcept { return beta_ - alpha_; }

  friend bool operator==(const BeliefInterval&, const BeliefInterval&) = default;

 private:
  struct Unchecked {};
  BeliefInterval(Unchecked, double alpha, double beta) noexcept : alpha_(alpha), beta_(beta) {}

  // Results of the algebra may drift by an ulp past the bounds; this clamps
  // them back onto the valid region.
  static BeliefInterval clamped(double alpha, double beta) noexcept;

  friend BeliefInterval conjoin(const BeliefInterval&, const BeliefInterval&) noexcept;
  friend BeliefInterval modus_ponens(const BeliefInterval&, const BeliefInterval&) noexcept;
  friend BeliefInterval combine_evidence(const BeliefInterval&, const BeliefInterval&);

  double alpha_;
  double beta_;
};

/// Uncertain-logic AND: independence product on both bounds.
/// Commutative, associative, [1,1] is the identity.
BeliefInterval conjoin(const BeliefInterval& a, const BeliefInterval& b) noexcept;

/// Uncertain modus ponens from an antecedent through a rule:
/// [a.alpha * r.alpha, 1 - a.alpha * (1 - r.beta)].
BeliefInterval modus_ponens(const BeliefInterval& antecedent, const BeliefInterval& rule) noexcept;

double uncertainty(const BeliefInterval& iv) noexcept;

/// Dempster's rule on the frame {a, not a}, with m(a) = alpha,
/// m(not a) = 1 - beta and m(frame) = beta - alpha for each operand.
/// Throws TotalConflictError when the operands are fully contradictory.
BeliefInterval combine_evidence(const BeliefInterval& a, const BeliefInterval& b);

/// Renders as `[alpha, beta]` with at most four decimals, trailing zeros trimmed.
std::string to_string(const BeliefInterval& iv);

}  // namespace normkit
