#pragma once

#include "orbitlab/core.hpp"
#include "orbitlab/integrate.hpp"
#include "orbitlab/models.hpp"

namespace orbitlab
{
	// Period and conic elements of one bound orbit.  l = R(1 - e^2) holds by
	// construction; law_residual records the cross-check of the producing
	// call (closed form vs quadrature for generalized_period, zero for
	// measured_elements).
	struct PeriodReport
	{
		double T = 0.0;
		double R = 0.0;
		double l = 0.0;
		double e = 0.0;
		double law_residual = 0.0;
	};

	// Bound two-body period 2 pi mu / (-2E)^(3/2).  Raises BadParameter
	// unless mu > 0 and E < 0.
	double kepler_period(double mu, double E);

	// Period of the bound power-law orbit with integrals (k_const, E, J):
	// the Legendre closed form
	//     T = (2 pi / k) ((-2E)/k^2)^((alpha-1)/4) P_((alpha-1)/2)(z),
	//     z = mu / (k sqrt(-2E)),
	// cross-checked against the half-orbit quadrature
	//     T = (2/k) int_0^pi (mu/k^2 + J cos u)^((alpha-1)/2) du,
	// whose relative gap is stored in law_residual.  Elements come from the
	// integrals: R = mu/(-2E), l = k^2/mu, e = |J| k^2 / mu.  Raises
	// BadParameter unless mu > 0, k_const > 0, E < 0 and e < 1.
	PeriodReport generalized_period(double alpha, double mu, double k_const, double E,
	                                double J);

	// Elements measured from an integrated closed orbit: T is the time of
	// one full angular turn, the apsidal radii are refined on the dense
	// output over that turn, R = (rmax + rmin)/2 and
	// e = (rmax - rmin)/(rmax + rmin).  law_residual is zero; the law
	// evaluations live in third_law_residual and micz_third_law.  Raises
	// NotPeriodic when the trajectory covers less than a full turn.
	PeriodReport measured_elements(const Trajectory& traj);

	// Absolute defect |T^2 R^alpha - (4 pi^2 / mu) (1-e^2)^(-(alpha+1)/2)
	// P^2_((alpha-1)/2)((1-e^2)^(-1/2))| of the period law for an integrated
	// closed orbit, with T, R and e measured as in measured_elements.
	double third_law_residual(double alpha, double mu, const Trajectory& traj);

	// Period law on the cone: |T^2/R^3 - 4 pi^2 / mu| for an integrated
	// monopole-Coulomb orbit.  T is the apsis-to-apsis radial period and R
	// half the chord between the perihelion and aphelion points, which are
	// the ends of the orbit ellipse's major axis.  Raises BadParameter for
	// other families and NotPeriodic for unbound data.
	double micz_third_law(const Trajectory& traj);

	// Integrals of one bound power-law orbit, anchored at a perihelion:
	// theta0 is the azimuth of the conserved apse vector and t0 a perihelion
	// passage time.
	struct PowerLawConsts
	{
		double mu = 1.0;
		double k = 1.0;
		double E = -0.5;
		double J = 0.0;
		double theta0 = 0.0;
		double t0 = 0.0;
	};

	// Constants of the orbit through state s, with t0 the perihelion passage
	// nearest s.t (closed-form phase inversion; exact for alpha = -1 and
	// alpha = +1, the degrees whose explicit solutions exist).  Raises
	// BadParameter for other alpha or an unbound state and
	// ZeroAngularMomentum for radial motion.
	PowerLawConsts power_law_consts(const PowerLaw& m, const PhaseState& s);

	// Closed-form state of the power-law orbit at time t for alpha = -1 or
	// alpha = +1, with theta continuous across revolutions.  Raises
	// BadParameter for other alpha.
	PolarState explicit_solution(double alpha, const PowerLawConsts& c, double t);

	// Area swept from t0 to t by the closed-form orbit of explicit_solution,
	// continuous across revolutions.  Raises BadParameter for alpha outside
	// {-1, +1}.
	double explicit_swept_area(double alpha, const PowerLawConsts& c, double t);
}
