#pragma once

#include <stdexcept>
#include <string>

namespace orbitlab
{
	// Failure categories shared by all modules; the CLI maps them to
	// machine-readable codes on stderr.
	enum class errc
	{
		zero_radius,
		zero_angular_momentum,
		domain_error,
		syntax_error,
		unknown_identifier,
		step_underflow,
		max_steps_exceeded,
		not_periodic,
		singular_orbit,
		bad_parameter,
		unbounded_orbit,
		zone_boundary,
		non_convergent,
		numerical_breakdown,
		regime_violation,
		non_monotone_angle,
		unsupported_family,
		insufficient_samples,
		config_error,
	};

	inline const char* errc_name(errc code)
	{
		switch (code)
		{
			case errc::zero_radius: return "ZeroRadius";
			case errc::zero_angular_momentum: return "ZeroAngularMomentum";
			case errc::domain_error: return "DomainError";
			case errc::syntax_error: return "SyntaxError";
			case errc::unknown_identifier: return "UnknownIdentifier";
			case errc::step_underflow: return "StepUnderflow";
			case errc::max_steps_exceeded: return "MaxStepsExceeded";
			case errc::not_periodic: return "NotPeriodic";
			case errc::singular_orbit: return "SingularOrbit";
			case errc::bad_parameter: return "BadParameter";
			case errc::unbounded_orbit: return "UnboundedOrbit";
			case errc::zone_boundary: return "ZoneBoundary";
			case errc::non_convergent: return "NonConvergent";
			case errc::numerical_breakdown: return "NumericalBreakdown";
			case errc::regime_violation: return "RegimeViolation";
			case errc::non_monotone_angle: return "NonMonotoneAngle";
			case errc::unsupported_family: return "UnsupportedFamily";
			case errc::insufficient_samples: return "InsufficientSamples";
			case errc::config_error: return "ConfigError";
		}
		return "Unknown";
	}

	class Error : public std::runtime_error
	{
	public:
		Error(errc code, const std::string& message, long long offset = -1)
			: std::runtime_error(message), code_(code), offset_(offset)
		{
		}

		errc code() const { return code_; }

		// Byte offset into the offending input for syntax errors; -1 otherwise.
		long long offset() const { return offset_; }

	private:
		errc code_;
		long long offset_;
	};

	[[noreturn]] inline void raise(errc code, const std::string& message, long long offset = -1)
	{
		throw Error(code, message, offset);
	}
}
