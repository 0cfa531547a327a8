#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "orbitlab/core.hpp"
#include "orbitlab/expr.hpp"
#include "orbitlab/integrate.hpp"
#include "orbitlab/models.hpp"

namespace orbitlab
{
	// A first integral is either a scalar or a Cartesian vector.
	using InvariantValue = std::variant<double, Vec3>;
	using InvariantSet = std::map<std::string, InvariantValue>;

	double invariant_norm(const InvariantValue& v);
	double invariant_distance(const InvariantValue& a, const InvariantValue& b);

	// State of the driven oscillator z'' + z = v(theta) started from
	// z(theta0) = 0, z'(theta0) = 0.
	struct ZPair
	{
		double theta0 = 0.0;
		double z = 0.0;
		double zprime = 0.0;
	};

	// Solves the oscillator as an initial-value problem.
	ZPair z_pair(const Expr& v, double theta0, double theta);

	// Same solution through the convolution quadratures
	// z = int v(eta) sin(theta-eta), z' = int v(eta) cos(theta-eta).
	ZPair z_pair_convolution(const Expr& v, double theta0, double theta);

	// Memoizing solver for the driven oscillator: at(theta) advances or
	// rewinds an adaptive walk from the last visited angle, so grids
	// evaluated in order cost one pass.  Stateful, not safe concurrently.
	class ZAccumulator
	{
	public:
		ZAccumulator(Expr v, double theta0) : v_(std::move(v)), theta0_(theta0), th_(theta0) {}

		ZPair at(double theta)
		{
			advance(theta);
			return {theta0_, z_, zp_};
		}

	private:
		void advance(double target);

		Expr v_;
		double theta0_;
		double th_;
		double z_ = 0.0;
		double zp_ = 0.0;
	};

	// Anchor data and the oscillator accumulator shared by invariant
	// evaluations along one trajectory.  The anchor is fixed once; the
	// unwrap ladder keeps in-plane angles on a continuous branch.
	struct InvariantContext
	{
		double theta0 = 0.0;
		double L0 = 0.0;
		double last_theta = 0.0;
		std::shared_ptr<ZAccumulator> osc;
	};

	// Anchors a context at s0 and seeds the oscillator source for the
	// families whose conserved vectors carry z terms.
	InvariantContext make_context(const ForceModel& m, const PhaseState& s0);

	// Every first integral the family admits, evaluated at s.  Planar
	// families follow the counterclockwise orientation convention.
	InvariantSet evaluate(const ForceModel& m, const PhaseState& s, InvariantContext& ctx);
	InvariantSet evaluate(const ForceModel& m, const PhaseState& s);

	// Angular momentum magnitude against azimuth for the direction-only
	// force: 1/L = 1/L0 + int V(eta) / (U(eta) + J cos(eta-theta0))^{3/2},
	// with J the orbit constant of r = L^2/(U + J cos(theta-theta0)).
	double l_of_theta(const DirectionOnly& m, double L0, double J, double theta0, double theta);

	// Closed form of the oscillator pair for the source
	// v = mu/(k - alpha*theta)^2, written with the trigonometric
	// integrals; valid while k - alpha*theta stays positive.
	ZPair danby_z(double k, double alpha, double mu, double theta0, double theta);

	// Absolute residuals of the scalar identities tying the family's
	// integrals together.  Identities involving the scalar orbit constant
	// presume the set was evaluated with an apse-anchored context.
	std::map<std::string, double> relations_check(const ForceModel& m, const InvariantSet& inv);

	struct DriftEntry
	{
		std::string name;
		InvariantValue initial{0.0};
		double max_abs_drift = 0.0;
		double max_rel_drift = 0.0;
	};

	struct InvariantReport
	{
		std::vector<DriftEntry> entries;

		const DriftEntry& entry(const std::string& name) const;
		double worst_rel() const;
	};

	// Evaluates the family invariants at every sample of the trajectory
	// and reports the largest excursion from their initial values.
	InvariantReport drift_report(const ForceModel& m, const Trajectory& traj);
}
