#pragma once

#include <cmath>
#include <optional>

#include "orbitlab/error.hpp"

namespace orbitlab
{
	// Collision guard: every force law in the catalog is singular at the origin.
	inline constexpr double r_min = 1e-10;

	struct Vec3
	{
		double x = 0.0;
		double y = 0.0;
		double z = 0.0;
	};

	inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
	inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
	inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
	inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
	inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
	inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
	inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }
	inline Vec3& operator-=(Vec3& a, const Vec3& b) { a = a - b; return a; }

	inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
	inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

	Vec3 cross(const Vec3& a, const Vec3& b);

	// a / |a|; raises ZeroRadius when |a| < r_min.
	Vec3 hat(const Vec3& a);

	// Position-velocity state; mass is fixed to 1 throughout.
	struct PhaseState
	{
		double t = 0.0;
		Vec3 r;
		Vec3 v;
	};

	// Plane polar coordinates in the orbit plane, oriented by the angular
	// momentum direction so that thetadot >= 0 along generic motion.
	struct PolarState
	{
		double t = 0.0;
		double r = 0.0;
		double theta = 0.0;
		double rdot = 0.0;
		double thetadot = 0.0;
	};

	struct SphericalState
	{
		double t = 0.0;
		double r = 0.0;
		double theta = 0.0;  // polar angle from +z, in (0, pi)
		double phi = 0.0;    // azimuth, unwrapped
		double rdot = 0.0;
		double thetadot = 0.0;
		double phidot = 0.0;
	};

	// Nearest-branch continuation: shifts raw by a multiple of 2*pi so the
	// result lies within pi of prev.
	double unwrap_angle(double raw, double prev);

	// Polar decomposition of a planar state (plane through the origin; the
	// caller asserts planarity).  theta is measured about the angular-momentum
	// direction and unwrapped against prev_theta when given; rdot = rhat.v;
	// thetadot = (rhat x v).Lhat / r (zero when the motion is radial).
	// Raises ZeroRadius when |r| < r_min.
	PolarState cartesian_to_polar(const PhaseState& s, std::optional<double> prev_theta = std::nullopt);

	// Canonical embedding of a PolarState into the z = 0 plane with
	// counterclockwise angle; inverse of cartesian_to_polar for states whose
	// angular momentum points along +z.
	PhaseState polar_to_cartesian(const PolarState& p);

	// Spherical decomposition; phi unwrapped against prev_phi when given.
	// Raises ZeroRadius when |r| < r_min and DomainError when the state lies
	// on the polar axis (sin(theta) too small for azimuthal rates).
	SphericalState cartesian_to_spherical(const PhaseState& s, std::optional<double> prev_phi = std::nullopt);

	PhaseState spherical_to_cartesian(const SphericalState& s);
}
