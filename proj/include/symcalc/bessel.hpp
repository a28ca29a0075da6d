#pragma once

namespace symcalc {

/// Spherical Bessel function j_l(x). Downward recurrence with Miller
/// normalization for x <= l (stability at small argument), upward otherwise.
double sph_bessel_jl(int l, double x);

}  // namespace symcalc
