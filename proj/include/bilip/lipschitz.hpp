#pragma once

namespace bilip {

/// Certified (L1, L2): the flow F is L1-Lipschitz and F^{-1} is L2-Lipschitz.
/// For a genuine bijection l1 * l2 >= 1.
struct BiLipschitzConstants {
  double l1 = 1.0;
  double l2 = 1.0;
};

/// Throws std::domain_error unless both constants are positive and finite.
void validate(const BiLipschitzConstants& c);

}  // namespace bilip
