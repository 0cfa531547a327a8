#pragma once

#include <optional>
#include <variant>

#include "orbitlab/core.hpp"
#include "orbitlab/expr.hpp"

namespace orbitlab
{
	class Trajectory;

	// ---------------------------------------------------------------------
	// Force-law catalog.  Planar families run in the z = 0 plane with angle
	// measured counterclockwise about +z; spatial families are full 3-D.
	// Factory functions fill the cached derivative expressions, so prefer
	// them over aggregate construction whenever the family carries an Expr.
	// ---------------------------------------------------------------------

	// rddot = -mu r / r^3
	struct Kepler
	{
		double mu = 1.0;
	};

	// rddot = -v(theta) (L/r^3) r: transverse strength profile v(theta),
	// with theta-dot eliminated through L = r^2 theta-dot.
	struct CentralAngle
	{
		Expr v;
	};

	// rddot = -(L v(theta) / (g(t) r^3)) r + (gddot(t)/g(t)) r
	struct TimeDependent
	{
		Expr g;
		Expr v;
		Expr g_dot;
		Expr g_ddot;
	};

	// rddot = -[(U''(th)+U(th))/r^2 + 2 V'(th)/r^(3/2)] rhat - (V(th)/r^(3/2)) thhat
	struct DirectionOnly
	{
		Expr U;
		Expr V;
		Expr U_prime;
		Expr U_prime2;
		Expr V_prime;
	};

	// DirectionOnly specialization U = mu, V = (alpha/2) sin((theta-beta)/2)
	// derived from a Hamiltonian; the half-angle force uses unwrapped theta.
	struct HamiltonianAngle
	{
		double mu = 1.0;
		double alpha = 0.1;
		double beta = 0.0;
	};

	// rddot = -f rdot - (mu/r^3) r for the drag strengths below.
	enum class DragKind
	{
		inverse_square,        // f = alpha / r^2
		cosine,                // f = (a cos(theta) + b) / r^2
		cosine_over_l,         // f = (a cos(theta) + b) / (L r^2)
		exponential,           // f = -a exp(-theta) L^3 / (2 r^2)
	};

	struct Drag
	{
		DragKind kind = DragKind::inverse_square;
		double alpha = 0.0;  // inverse_square strength
		double mu = 1.0;     // central strength
		double a = 0.0;      // angle-modulated strengths
		double b = 0.0;
		double k = 0.0;      // angular-momentum seed L(theta) at theta = 0
	};

	// rddot = (1/2)(g'(r) rdot / g(r) + 3 rdot / r) v - g(r) r: every orbit
	// is a conic of the g-independent shape.
	struct KeplerOrbitFamily
	{
		Expr g;
		Expr g_prime;
	};

	// KeplerOrbitFamily specialization g(r) = mu r^alpha.
	struct PowerLaw
	{
		double mu = 1.0;
		double alpha = -3.0;
	};

	// rddot = -(h'(r)/r) L - (h(r) h'(r) + k/r^2) rhat: |L| conserved while
	// its direction precesses.
	struct MagnitudeConserved
	{
		Expr h;
		double k = 0.0;
		Expr h_prime;
	};

	// rddot = -f(r) L - g(r) r
	struct FLGR
	{
		Expr f;
		Expr g;
	};

	// rddot = -(lambda/r^3) L - (mu/r^2 - lambda^2/r^3) rhat
	struct MICZ
	{
		double lambda = 0.0;
		double mu = 1.0;
	};

	// rddot = -(mu/r^3) L
	struct Monopole
	{
		double mu = 1.0;
	};

	using ForceModel = std::variant<Kepler, CentralAngle, TimeDependent, DirectionOnly,
	                                HamiltonianAngle, Drag, KeplerOrbitFamily, PowerLaw,
	                                MagnitudeConserved, FLGR, MICZ, Monopole>;

	// Factories that populate the cached symbolic derivatives.
	CentralAngle make_central_angle(Expr v);
	TimeDependent make_time_dependent(Expr g, Expr v);
	DirectionOnly make_direction_only(Expr U, Expr V);
	KeplerOrbitFamily make_kepler_orbit_family(Expr g);
	MagnitudeConserved make_magnitude_conserved(Expr h, double k);

	const char* family_name(const ForceModel& m);

	// Planar families run in the z = 0 plane; spatial families are 3-D.
	bool is_planar(const ForceModel& m);

	// Right side of the equation of motion at state s.  theta supplies the
	// unwrapped in-plane angle for the planar families whose force is not
	// single-valued in the position (half-angle and spiral strengths); when
	// absent the principal angle atan2(y, x) is used.  L-dependent terms use
	// the instantaneous |r x v|.  Raises ZeroRadius below the collision
	// guard, ZeroAngularMomentum where the force divides by or scales with a
	// vanishing L, and DomainError from expression evaluation.
	Vec3 acceleration(const ForceModel& m, const PhaseState& s,
	                  std::optional<double> theta = std::nullopt);

	// Largest finite-difference residual of the projected oscillator form:
	// w = r x P with P = L - lambda rhat reduces to w = r x L, and along
	// solutions of FLGR{f = lambda/r^3, g = mu/r^4} it obeys
	// wddot = -(L^4 (lambda^2 + mu) / |w|^4) w, whose coefficient equals
	// lambda^2/r^4 + g(r).  The trajectory is resampled uniformly through
	// its dense output when available.  Raises InsufficientSamples below 5
	// points and BadParameter when the trajectory is not an FLGR run.
	double poincare_project(const Trajectory& traj, double lambda);

	// Similarity map of the power-law family: t' = gamma t,
	// r' = gamma^(-2/alpha) r, v' = gamma^(-2/alpha - 1) v.  The image solves
	// the same equation of motion.  Raises BadParameter for gamma <= 0 or
	// alpha = 0.
	Trajectory rescale_similarity(const PowerLaw& m, const Trajectory& traj, double gamma);
}
