#pragma once

namespace mtfd {

/// Two-parameter Mittag-Leffler function E_{α,β}(z) on the negative real axis.
///
/// Power series where it is well conditioned, otherwise the real-line integral
/// representation (0 < α < 1) or the β-recurrence (α = 1). Relative error <= 1e-8.
/// Throws DomainError for α ∉ (0,1] or z > 0.
double mittag_leffler(double alpha, double beta, double z);

/// Mainardi's M-Wright function M_α(z), z >= 0, 0 < α < 1. Nonnegative; the
/// probability density of the single-term subordinator.
///
/// Power series for moderate z, Kanter's positive integral representation of the
/// one-sided stable law beyond that.
double wright_m(double alpha, double z);

}  // namespace mtfd
