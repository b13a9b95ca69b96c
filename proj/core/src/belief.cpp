#include "normkit/belief.hpp"

#include <algorithm>
#include <cmath>

#include "normkit/error.hpp"
#include "normkit/format.hpp"

namespace normkit {

BeliefInterval::BeliefInterval(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("belief interval bounds must be finite");
  }
  if (alpha < 0.0 || beta > 1.0 || alpha > beta) {
    throw DomainError("belief interval [" + format_exact(alpha) + "," + format_exact(beta) +
                      "] violates 0 <= alpha <= beta <= 1");
  }
}

BeliefInterval BeliefInterval::from_mass(double mass) {
  if (!std::isfinite(mass) || mass < 0.0 || mass > 1.0) {
    throw DomainError("mass " + format_exact(mass) + " outside [0,1]");
  }
  return BeliefInterval(Unchecked{}, mass, 1.0);
}

BeliefInterval BeliefInterval::clamped(double alpha, double beta) noexcept {
  alpha = std::clamp(alpha, 0.0, 1.0);
  beta = std::clamp(beta, 0.0, 1.0);
  if (alpha > beta) alpha = beta;
  return BeliefInterval(Unchecked{}, alpha, beta);
}

BeliefInterval conjoin(const BeliefInterval& a, const BeliefInterval& b) noexcept {
  return BeliefInterval::clamped(a.alpha_ * b.alpha_, a.beta_ * b.beta_);
}

BeliefInterval modus_ponens(const BeliefInterval& antecedent, const BeliefInterval& rule) noexcept {
  const double lower = antecedent.alpha_ * rule.alpha_;
  const double upper = 1.0 - antecedent.alpha_ * (1.0 - rule.beta_);
  return BeliefInterval::clamped(lower, upper);
}

double uncertainty(const BeliefInterval& iv) noexcept { return iv.uncertainty(); }

BeliefInterval combine_evidence(const BeliefInterval& a, const BeliefInterval& b) {
  const double a_yes = a.alpha_, a_no = 1.0 - a.beta_, a_any = a.beta_ - a.alpha_;
  const double b_yes = b.alpha_, b_no = 1.0 - b.beta_, b_any = b.beta_ - b.alpha_;

  const double conflict = a_yes * b_no + a_no * b_yes;
  const double normalizer = 1.0 - conflict;
  if (normalizer <= 1e-12) {
    throw TotalConflictError("total conflict combining " + to_string(a) + " with " + to_string(b));
  }
  const double yes = (a_yes * b_yes + a_yes * b_any + a_any * b_yes) / normalizer;
  const double no = (a_no * b_no + a_no * b_any + a_any * b_no) / normalizer;
  return BeliefInterval::clamped(yes, 1.0 - no);
}

std::string to_string(const BeliefInterval& iv) {
  return "[" + format_trimmed4(iv.alpha()) + ", " + format_trimmed4(iv.beta()) + "]";
}

}  // namespace normkit
