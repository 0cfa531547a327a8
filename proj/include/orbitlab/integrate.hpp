#pragma once

#include <array>
#include <vector>

#include "orbitlab/core.hpp"
#include "orbitlab/models.hpp"

namespace orbitlab
{
	struct IntegrationConfig
	{
		double rel_tol = 1e-10;
		double abs_tol = 1e-12;
		long max_steps = 2000000;
		double t0 = 0.0;
		double t1 = 10.0;
		// When true, a step underflow ends the integration and the partial
		// trajectory is returned (collapse orbits); otherwise it raises.
		bool partial_on_underflow = false;
	};

	// Interpolation coefficients of one accepted step over the 7-component
	// internal state (position, velocity, autonomized time).
	struct DenseStep
	{
		double t0 = 0.0;
		double h = 0.0;
		std::array<std::array<double, 7>, 5> rcont{};
	};

	enum class Termination
	{
		completed,
		step_underflow,
	};

	// Time-ordered samples with per-step dense output and the unwrapped
	// in-plane angle (planar families) or azimuth (spatial families).
	class Trajectory
	{
	public:
		Trajectory() = default;
		Trajectory(ForceModel model, std::vector<PhaseState> samples, std::vector<double> angles,
		           std::vector<DenseStep> dense = {},
		           Termination termination = Termination::completed);

		const ForceModel& model() const { return model_; }
		size_t size() const { return samples_.size(); }
		const PhaseState& state(size_t i) const { return samples_[i]; }
		double angle(size_t i) const { return angles_[i]; }
		const std::vector<PhaseState>& samples() const { return samples_; }
		const std::vector<double>& angles() const { return angles_; }
		double t_begin() const { return samples_.front().t; }
		double t_end() const { return samples_.back().t; }
		Termination termination() const { return termination_; }
		bool has_dense() const { return !dense_.empty(); }

		// Dense-output state at any time inside the span; endpoint
		// evaluations reproduce the stored samples.
		PhaseState state_at(double t) const;

		// Unwrapped angle at any time inside the span.
		double angle_at(double t) const;

	private:
		size_t step_index(double t) const;

		ForceModel model_;
		std::vector<PhaseState> samples_;
		std::vector<double> angles_;
		std::vector<DenseStep> dense_;
		Termination termination_ = Termination::completed;
	};

	// Adaptive embedded 5(4) Runge-Kutta integration of the model from s0
	// over cfg's span (backward spans allowed).  Per-step local error is
	// held to rel_tol*|y| + abs_tol componentwise; every family integrates
	// the autonomized system with time appended as a state variable.
	// Raises StepUnderflow when the step falls below 1e-14 of the span
	// (unless cfg.partial_on_underflow) and MaxStepsExceeded past
	// cfg.max_steps.
	Trajectory integrate(const ForceModel& m, const PhaseState& s0, const IntegrationConfig& cfg);

	// First time at which the unwrapped angle has advanced a full turn from
	// the initial sample, by bisection on the dense output to 1e-12
	// relative; returns the elapsed period.  Raises NotPeriodic when the
	// trajectory covers less than a full turn.
	double find_period(const Trajectory& traj);

	// Elapsed time between the first two radial minima (apsis-to-apsis
	// radial period), refined on the dense output.  Raises NotPeriodic when
	// fewer than two minima are spanned.
	double find_radial_period(const Trajectory& traj);
}
