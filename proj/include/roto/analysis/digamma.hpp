#pragma once

namespace roto::analysis {

// psi(x) for x > 0: upward recurrence to x >= 6, then the asymptotic series.
// Throws std::domain_error for x <= 0 or non-finite x.
double digamma(double x);

}  // namespace roto::analysis
