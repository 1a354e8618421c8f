#pragma once

#include "pencilspec/types.hpp"

namespace pencilspec {

// exp_moment(j, mu, h) = integral over (-h,h) of (i t)^j e^{i mu t} dt.
// j = 0 is the sinc-type kernel 2 sin(h mu)/mu; higher j are its mu-derivatives.
// Exact up to rounding; stable both near mu = 0 (Taylor series) and away from
// it (closed form from integrating the Leibniz expansion of 2 sin(h mu)/mu).
Cplx exp_moment(int j, Cplx mu, double h);

// d/dmu exp_moment(0, mu, h) family convenience: diric-style evaluation of the
// cardinal kernel and its first two derivatives at scale h = pi.
Cplx sinc_pi(Cplx mu);        // sin(pi mu)/(pi mu), value 1 at 0

}  // namespace pencilspec
