#pragma once

#include <functional>

#include "orbitlab/error.hpp"

namespace orbitlab
{
	struct QuadResult
	{
		double value = 0.0;
		double error_estimate = 0.0;
		long evaluations = 0;
	};

	// Adaptive Gauss-Kronrod (7/15) quadrature with interval bisection.
	// Guarantees |value - integral| <= max(tol, tol*|value|); splits the
	// worst panel first and raises NonConvergent once a panel would need
	// bisection beyond depth 50.  DomainError from f propagates.
	QuadResult quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol);

	// Shifted sine integral: si(x) = -pi/2 + integral_0^x sin(t)/t dt.
	double si(double x);

	// Cosine integral: Ci(x) = gamma + log(x) + integral_0^x (cos(t)-1)/t dt;
	// DomainError for x <= 0.
	double ci(double x);

	// Legendre function of the first kind of real degree on z >= 1, by the
	// Laplace integral (1/pi) integral_0^pi [z + sqrt(z^2-1) cos(xi)]^nu dxi.
	// The degree symmetry nu <-> -nu-1 identifies the second convention.
	// DomainError for z < 1.
	double legendre_p(double nu, double z);

	inline constexpr double euler_gamma = 0.5772156649015329;
}
