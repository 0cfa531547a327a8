#include "orbitlab/core.hpp"

#include <numbers>

namespace orbitlab
{
	namespace
	{
		constexpr double two_pi = 2.0 * std::numbers::pi;

		// Unit vector spanning the reference direction of the angle in the
		// plane normal to n: the projection of x-hat, or of y-hat when x-hat
		// is too close to the normal.
		Vec3 plane_reference(const Vec3& n)
		{
			Vec3 e1{1.0 - n.x * n.x, -n.x * n.y, -n.x * n.z};
			double m = norm(e1);
			if (m < 1e-8)
			{
				e1 = Vec3{-n.y * n.x, 1.0 - n.y * n.y, -n.y * n.z};
				m = norm(e1);
			}
			return e1 / m;
		}
	}

	Vec3 cross(const Vec3& a, const Vec3& b)
	{
		return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
	}

	Vec3 hat(const Vec3& a)
	{
		const double m = norm(a);
		if (m < r_min)
			raise(errc::zero_radius, "cannot normalize vector of norm " + std::to_string(m));
		return a / m;
	}

	double unwrap_angle(double raw, double prev)
	{
		return raw + two_pi * std::round((prev - raw) / two_pi);
	}

	PolarState cartesian_to_polar(const PhaseState& s, std::optional<double> prev_theta)
	{
		const double r = norm(s.r);
		if (r < r_min)
			raise(errc::zero_radius, "radius " + std::to_string(r) + " below collision guard");

		const Vec3 rh = s.r / r;
		const Vec3 L = cross(s.r, s.v);
		const double Lm = norm(L);

		// Plane normal: the angular-momentum direction, or a fixed axis not
		// parallel to r when the motion is purely radial.
		Vec3 n;
		if (Lm > 1e-14 * r * (1.0 + norm(s.v)))
			n = L / Lm;
		else
			n = (std::abs(rh.z) < 0.9) ? Vec3{0.0, 0.0, 1.0} : Vec3{0.0, 1.0, 0.0};

		const Vec3 e1 = plane_reference(n);
		const Vec3 e2 = cross(n, e1);
		const double raw = std::atan2(dot(s.r, e2), dot(s.r, e1));

		PolarState p;
		p.t = s.t;
		p.r = r;
		p.theta = prev_theta ? unwrap_angle(raw, *prev_theta) : raw;
		p.rdot = dot(rh, s.v);
		p.thetadot = (Lm > 0.0) ? dot(cross(rh, s.v), L / Lm) / r : 0.0;
		return p;
	}

	PhaseState polar_to_cartesian(const PolarState& p)
	{
		const double c = std::cos(p.theta);
		const double s = std::sin(p.theta);
		PhaseState out;
		out.t = p.t;
		out.r = {p.r * c, p.r * s, 0.0};
		out.v = {p.rdot * c - p.r * p.thetadot * s, p.rdot * s + p.r * p.thetadot * c, 0.0};
		return out;
	}

	SphericalState cartesian_to_spherical(const PhaseState& s, std::optional<double> prev_phi)
	{
		const double r = norm(s.r);
		if (r < r_min)
			raise(errc::zero_radius, "radius " + std::to_string(r) + " below collision guard");

		const double rho2 = s.r.x * s.r.x + s.r.y * s.r.y;
		if (rho2 < 1e-24 * r * r)
			raise(errc::domain_error, "state on the polar axis: azimuthal rates undefined");

		SphericalState out;
		out.t = s.t;
		out.r = r;
		out.theta = std::acos(s.r.z / r);
		const double raw = std::atan2(s.r.y, s.r.x);
		out.phi = prev_phi ? unwrap_angle(raw, *prev_phi) : raw;
		out.rdot = dot(s.r, s.v) / r;
		// z = r cos(theta)  =>  thetadot = (rdot cos(theta) - vz) / (r sin(theta))
		const double sin_theta = std::sqrt(rho2) / r;
		out.thetadot = (out.rdot * std::cos(out.theta) - s.v.z) / (r * sin_theta);
		out.phidot = (s.r.x * s.v.y - s.r.y * s.v.x) / rho2;
		return out;
	}

	PhaseState spherical_to_cartesian(const SphericalState& s)
	{
		const double st = std::sin(s.theta), ct = std::cos(s.theta);
		const double sp = std::sin(s.phi), cp = std::cos(s.phi);
		PhaseState out;
		out.t = s.t;
		out.r = {s.r * st * cp, s.r * st * sp, s.r * ct};
		const double vr = s.rdot;
		const double vt = s.r * s.thetadot;
		const double vp = s.r * st * s.phidot;
		out.v = {vr * st * cp + vt * ct * cp - vp * sp,
		         vr * st * sp + vt * ct * sp + vp * cp,
		         vr * ct - vt * st};
		return out;
	}
}
