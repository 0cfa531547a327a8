#pragma once

#include "orbitlab/core.hpp"
#include "orbitlab/invariants.hpp"
#include "orbitlab/models.hpp"

namespace orbitlab
{
	// -----------------------------------------------------------------
	// Closed-form orbit equations r(theta), azimuth and time quadratures,
	// Kepler's equation, and the conic geometry of the monopole-Coulomb
	// system.  Every closed form is driven by the first integrals frozen
	// at one anchor state; the helpers below capture them once.
	// -----------------------------------------------------------------

	// First integrals plus the anchor bookkeeping the closed forms need.
	// The embedded oscillator accumulator memoizes its walk, so evaluating
	// an angle grid in order is cheap; calls mutate that shared cache and
	// are not safe concurrently on one copy.
	struct OrbitConsts
	{
		InvariantSet inv;      // first integrals at the anchor state
		InvariantContext ctx;  // anchor angle and shared oscillator state
		PhaseState anchor;     // the state the constants were captured at
		double L0 = 0.0;       // |r x v| at the anchor
	};

	// Captures the family's first integrals at s0.
	OrbitConsts orbit_consts(const ForceModel& m, const PhaseState& s0);

	// Focus-centred conic r = scale / (1 + ratio cos(theta - theta0)).
	struct ConicParams
	{
		double scale = 1.0;   // semilatus rectum L^2/mu
		double ratio = 0.0;   // eccentricity |J|/mu
		double theta0 = 0.0;  // azimuth of the perihelion direction
	};

	// Conic of an inverse-square orbit from its evaluated integrals.
	ConicParams conic_params(const Kepler& m, const InvariantSet& inv);

	// Plane-and-cone geometry of the monopole-Coulomb orbit.
	struct MICZGeometry
	{
		double cone_half_angle = 0.0;  // half-angle of the cone traced by r
		Vec3 normal{};                 // unit normal of the orbital plane
		double plane_offset = 0.0;     // constant value of normal . r
		double gamma = 0.0;            // angle between the axis vector P and the plane
		double beta = 0.0;             // angle between P and the eccentric vector J
	};

	// Radius at the requested angle from the family's closed form.  For
	// the planar families theta is the unwrapped azimuth on the branch of
	// the anchor state; for the spatial families (MagnitudeConserved,
	// MICZ) it is the angle between r and the conserved vector J.  Raises
	// UnboundedOrbit where the orbit-equation denominator is not positive,
	// SingularOrbit when an embedded angular-momentum profile collapses
	// first, and UnsupportedFamily where no closed form exists (FLGR,
	// Monopole).
	double orbit_radius(const ForceModel& m, const OrbitConsts& c, double theta);

	// Azimuth swept around the symmetry axis J while the polar angle moves
	// from the anchor's value to theta, on the ascending-polar branch; for
	// descending motion negate.  Raises ZoneBoundary when the quadrature
	// touches a polar turning point or a pole of the surface of revolution.
	double azimuth_of_polar(const MagnitudeConserved& m, const OrbitConsts& c, double theta);

	// Same azimuth sweep for the transverse profile h(r) = -lambda/r in
	// closed form: an arcsec antiderivative when the radial constant k
	// vanishes and arctan antiderivatives otherwise, with the degenerate
	// J = k and J = -k branches taken as the exact limits of the general
	// form.  Each antiderivative is continuous across the zone, so the
	// sweep is a plain difference of endpoint values.
	double azimuth_closed_inverse_r(double lambda, double k, double L, double J,
	                                double theta0, double theta);

	// Elapsed time from the anchor state until the orbit reaches theta
	// (same angle conventions as orbit_radius), by quadrature of the
	// family's angular rate along the closed-form orbit.  Spatial motion
	// uses the ascending-polar branch, as in azimuth_of_polar.  Raises
	// UnboundedOrbit past an escape direction and UnsupportedFamily where
	// no closed form exists (FLGR, Monopole, MICZ).
	double time_of_angle(const ForceModel& m, const OrbitConsts& c, double theta);

	// Time since perihelion passage for a bound inverse-square orbit, from
	// the closed form in the true anomaly; theta counts from cp.theta0 and
	// may span any number of revolutions.  Raises DomainError unless the
	// conic is an ellipse (ratio < 1).
	double kepler_time_closed(const Kepler& m, const ConicParams& cp, double theta);

	// Time along the outbound radial branch from r0 to r of the same bound
	// orbit, from the closed form in the radius.  Both radii must lie in
	// [perihelion, aphelion] with r0 <= r.  Raises DomainError otherwise.
	double kepler_time_closed_radial(const Kepler& m, const ConicParams& cp, double r0,
	                                 double r);

	// Solves psi - e sin(psi) = M for the eccentric anomaly by Newton
	// iteration with a bisection fallback; |residual| <= 1e-13.  Raises
	// BadParameter unless 0 <= e < 1.
	double kepler_solve(double e, double M);

	struct Anomalies
	{
		double r = 0.0;
		double theta = 0.0;
	};

	// Radius and true anomaly of the eccentric anomaly psi on an ellipse
	// with semimajor axis R: r = R(1 - e cos psi) and the half-angle map
	// tan(theta/2) = sqrt((1+e)/(1-e)) tan(psi/2), with theta kept on the
	// same revolution as psi.  Raises BadParameter unless 0 <= e < 1 and
	// R > 0.
	Anomalies anomalies(double e, double R, double psi);

	// Geometry of the monopole-Coulomb orbit from its integrals: the cone
	// half-angle (cos = lambda/P), the orbital-plane normal along
	// P - (lambda/mu) J with its constant offset normal . r = -lambda
	// L^2 / (mu |N|), the plane's inclination gamma against P, and the
	// angle beta between P and J.  Raises BadParameter when mu = 0.
	MICZGeometry micz_geometry(double lambda, double mu, const InvariantSet& inv);

	// Angle between -J and r at azimuth phi around the cone axis, for the
	// frame with P along -z and the major axis in the xz-plane.
	double micz_anomaly_of_azimuth(double lambda, double mu, const InvariantSet& inv,
	                               double phi);

	// Area swept in time t at constant areal velocity L/2.
	double areal(double L, double t);
}
