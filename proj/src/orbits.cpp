#include "orbitlab/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "orbitlab/expr.hpp"
#include "orbitlab/specialfn.hpp"

namespace orbitlab
{
	namespace
	{
		constexpr double pi = std::numbers::pi;

		// Quadrature tolerances: closed-form radii feed tests pinned at
		// 1e-6, sweeps (times, azimuths) are pinned at 1e-8.
		constexpr double profile_tol = 1e-12;
		constexpr double sweep_tol = 1e-11;

		double scalar_of(const InvariantSet& inv, const char* name)
		{
			const auto it = inv.find(name);
			if (it == inv.end() || !std::holds_alternative<double>(it->second))
				raise(errc::bad_parameter,
				      std::string("orbit constants lack the scalar ") + name);
			return std::get<double>(it->second);
		}

		Vec3 vector_of(const InvariantSet& inv, const char* name)
		{
			const auto it = inv.find(name);
			if (it == inv.end() || !std::holds_alternative<Vec3>(it->second))
				raise(errc::bad_parameter,
				      std::string("orbit constants lack the vector ") + name);
			return std::get<Vec3>(it->second);
		}

		double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

		// Magnitude and azimuth of an in-plane conserved vector.  The
		// azimuth sets the phase of the conic denominator; the quadrature
		// anchor stays at the capture angle, so the two coincide only when
		// the anchor is an apse.
		struct Ecc
		{
			double mag = 0.0;
			double az = 0.0;
		};

		Ecc ecc_of(const Vec3& j)
		{
			if (j.x == 0.0 && j.y == 0.0)
				return {norm(j), 0.0};
			return {norm(j), std::atan2(j.y, j.x)};
		}

		Ecc planar_ecc(const InvariantSet& inv) { return ecc_of(vector_of(inv, "J")); }

		Ecc ham_ecc(const InvariantSet& inv)
		{
			return ecc_of(Vec3{scalar_of(inv, "J1"), scalar_of(inv, "J2"), 0.0});
		}

		[[noreturn]] void raise_unbounded()
		{
			raise(errc::unbounded_orbit,
			      "orbit denominator is not positive at the requested angle");
		}

		double checked_ratio(double num, double den)
		{
			if (den <= 0.0)
				raise_unbounded();
			return num / den;
		}

		double conic_den(double base, const Ecc& e, double theta)
		{
			return base + e.mag * std::cos(theta - e.az);
		}

		double z_at(const OrbitConsts& c, double theta)
		{
			if (!c.ctx.osc)
				raise(errc::bad_parameter, "orbit constants lack the oscillator state");
			return c.ctx.osc->at(theta).z;
		}

		// Orientation of the anchor's in-plane motion: +1 counterclockwise.
		double spin_of(const PhaseState& s)
		{
			return cross(s.r, s.v).z < 0.0 ? -1.0 : 1.0;
		}

		// Angular-momentum magnitude along a drag spiral, one closed form
		// per kind, anchored like the oscillator source; values <= 0 mean
		// the spiral has exhausted its angular momentum.
		double drag_profile(const Drag& m, double l0, double theta0, double theta)
		{
			switch (m.kind)
			{
				case DragKind::inverse_square:
					return l0 + m.alpha * (theta0 - theta);
				case DragKind::cosine:
					return l0 + m.a * (std::sin(theta0) - std::sin(theta)) +
					       m.b * (theta0 - theta);
				case DragKind::cosine_over_l:
				{
					const double half = 0.5 * l0 * l0 +
					                    m.a * (std::sin(theta0) - std::sin(theta)) +
					                    m.b * (theta0 - theta);
					return half > 0.0 ? std::sqrt(2.0 * half) : 0.0;
				}
				case DragKind::exponential:
				{
					const double inv2 = 1.0 / (l0 * l0) +
					                    m.a * (std::exp(-theta) - std::exp(-theta0));
					return inv2 > 0.0 ? 1.0 / std::sqrt(inv2) : 0.0;
				}
			}
			raise(errc::bad_parameter, "unknown drag kind");
		}

		double drag_profile_checked(const Drag& m, const OrbitConsts& c, double theta)
		{
			const double l = drag_profile(m, c.L0, c.ctx.theta0, theta);
			if (l <= 0.0)
				raise(errc::singular_orbit,
				      "angular momentum is exhausted before the requested angle");
			return l;
		}

		// 1/L(theta) for a transverse-profile force, by the quadrature of
		// the transverse strength against the conic denominator.
		double transverse_inv_l(const std::function<double(double)>& u,
		                        const std::function<double(double)>& v, double l0,
		                        const Ecc& e, double theta0, double theta)
		{
			if (l0 <= 0.0)
				raise(errc::zero_angular_momentum,
				      "transverse profiles need a positive anchor angular momentum");
			const auto integrand = [&](double eta) {
				const double den = conic_den(u(eta), e, eta);
				if (den <= 0.0)
					raise_unbounded();
				return v(eta) / (den * std::sqrt(den));
			};
			const double inv =
				1.0 / l0 + quad_adaptive(integrand, theta0, theta, profile_tol).value;
			if (inv <= 0.0)
				raise(errc::singular_orbit,
				      "angular momentum diverges before the requested angle");
			return inv;
		}

		std::function<double(double)> profile_fn(const Expr& e)
		{
			return [&e](double x) { return eval(e, x); };
		}

		std::function<double(double)> const_fn(double v)
		{
			return [v](double) { return v; };
		}

		std::function<double(double)> half_sine_fn(double alpha, double beta)
		{
			return [alpha, beta](double th) {
				return 0.5 * alpha * std::sin(0.5 * (th - beta));
			};
		}

		// Polar angle of the anchor state against the conserved vector.
		double polar_of(const PhaseState& anchor, const Vec3& jv)
		{
			const double rn = norm(anchor.r);
			const double jn = norm(jv);
			if (rn < r_min)
				raise(errc::zero_radius, "polar anchor needs a nonzero radius");
			if (jn < 1e-250)
				raise(errc::bad_parameter, "polar anchor needs a nonzero conserved vector");
			return std::acos(clamp_unit(dot(anchor.r, jv) / (rn * jn)));
		}

		// ---------------------------------------------------------------
		// Closed-form radii.
		// ---------------------------------------------------------------

		double radius_at(const Kepler& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double l = norm(vector_of(c.inv, "L"));
			return checked_ratio(l * l, conic_den(m.mu, e, theta));
		}

		double radius_at(const CentralAngle&, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double l = norm(vector_of(c.inv, "L"));
			return checked_ratio(l, conic_den(z_at(c, theta), e, theta));
		}

		double time_at(const TimeDependent& m, const OrbitConsts& c, double theta);

		double radius_at(const TimeDependent& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double l = norm(vector_of(c.inv, "L"));
			const double den = conic_den(z_at(c, theta), e, theta);
			if (den <= 0.0)
				raise_unbounded();
			const double t = c.anchor.t + time_at(m, c, theta);
			const double g = eval(m.g, t);
			if (g <= 0.0)
				raise(errc::domain_error, "time scale g(t) must stay positive on the orbit");
			return l * g / den;
		}

		double radius_at(const DirectionOnly& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double den = conic_den(eval(m.U, theta), e, theta);
			if (den <= 0.0)
				raise_unbounded();
			const double invl = transverse_inv_l(profile_fn(m.U), profile_fn(m.V), c.L0,
			                                     e, c.ctx.theta0, theta);
			return 1.0 / (invl * invl * den);
		}

		double radius_at(const HamiltonianAngle& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = ham_ecc(c.inv);
			const double den = conic_den(m.mu, e, theta);
			if (den <= 0.0)
				raise_unbounded();
			const double invl = transverse_inv_l(const_fn(m.mu),
			                                     half_sine_fn(m.alpha, m.beta), c.L0, e,
			                                     c.ctx.theta0, theta);
			return 1.0 / (invl * invl * den);
		}

		double radius_at(const Drag& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			drag_profile_checked(m, c, theta);
			return checked_ratio(1.0, conic_den(z_at(c, theta), e, theta));
		}

		double radius_at(const KeplerOrbitFamily&, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double a = scalar_of(c.inv, "A");
			const double den = a * (1.0 - std::cos(theta - c.ctx.theta0)) +
			                   e.mag * std::cos(theta - e.az);
			return checked_ratio(1.0, den);
		}

		double radius_at(const PowerLaw& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double k = scalar_of(c.inv, "k");
			return checked_ratio(1.0, conic_den(m.mu / (k * k), e, theta));
		}

		double radius_at(const MagnitudeConserved& m, const OrbitConsts& c, double theta)
		{
			const double j = norm(vector_of(c.inv, "J"));
			const double l = scalar_of(c.inv, "L_norm");
			return checked_ratio(l * l, m.k + j * std::cos(theta));
		}

		double radius_at(const FLGR&, const OrbitConsts&, double)
		{
			raise(errc::unsupported_family,
			      "no closed orbit equation for the gyroscopic family");
		}

		double radius_at(const MICZ& m, const OrbitConsts& c, double theta)
		{
			const double j = norm(vector_of(c.inv, "J"));
			const double l = scalar_of(c.inv, "L_norm");
			return checked_ratio(l * l, m.mu + j * std::cos(theta));
		}

		double radius_at(const Monopole&, const OrbitConsts&, double)
		{
			raise(errc::unsupported_family,
			      "no closed orbit equation for the bare monopole");
		}

		// ---------------------------------------------------------------
		// Time sweeps dt = (r^2 / L) dtheta along the closed-form orbits.
		// ---------------------------------------------------------------

		double planar_sweep(const OrbitConsts& c, double theta,
		                    const std::function<double(double)>& dt_dtheta)
		{
			return spin_of(c.anchor) *
			       quad_adaptive(dt_dtheta, c.ctx.theta0, theta, sweep_tol).value;
		}

		double time_at(const Kepler& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double l = norm(vector_of(c.inv, "L"));
			return planar_sweep(c, theta, [&](double eta) {
				const double den = conic_den(m.mu, e, eta);
				if (den <= 0.0)
					raise_unbounded();
				return l * l * l / (den * den);
			});
		}

		double time_at(const CentralAngle&, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double l = norm(vector_of(c.inv, "L"));
			return planar_sweep(c, theta, [&](double eta) {
				const double den = conic_den(z_at(c, eta), e, eta);
				if (den <= 0.0)
					raise_unbounded();
				return l / (den * den);
			});
		}

		// Inverts the monotone time-scale measure M(t) = int g(t)^-2 dt for
		// the instant at which the measure reaches the target, by bracket
		// expansion and bisection with incremental quadratures.
		double invert_time_scale(const Expr& g, double t0, double target)
		{
			const auto rate = [&](double t) {
				const double gt = eval(g, t);
				if (gt == 0.0)
					raise(errc::domain_error, "time scale g(t) vanishes");
				return 1.0 / (gt * gt);
			};
			if (target == 0.0)
				return t0;
			const double dir = target > 0.0 ? 1.0 : -1.0;
			const double g0 = eval(g, t0);
			double step =
				dir * std::max(1e-6 * (1.0 + std::abs(t0)), std::abs(target) * g0 * g0);
			double lo = t0, lo_m = 0.0;
			double hi = t0, hi_m = 0.0;
			bool bracketed = false;
			for (int i = 0; i < 200 && !bracketed; ++i)
			{
				const double next = hi + step;
				const double m = hi_m + quad_adaptive(rate, hi, next, profile_tol).value;
				lo = hi;
				lo_m = hi_m;
				hi = next;
				hi_m = m;
				if ((m - target) * dir >= 0.0)
					bracketed = true;
				step *= 2.0;
				if (std::abs(hi - t0) > 1e12)
					break;
			}
			if (!bracketed)
				raise(errc::non_convergent,
				      "time-scale inversion failed to bracket the target measure");
			for (int i = 0; i < 300; ++i)
			{
				if (std::abs(hi - lo) <= 1e-13 * (1.0 + std::abs(lo)))
					break;
				const double mid = 0.5 * (lo + hi);
				const double m = lo_m + quad_adaptive(rate, lo, mid, profile_tol).value;
				if ((m - target) * dir >= 0.0)
					hi = mid;
				else
				{
					lo = mid;
					lo_m = m;
				}
			}
			return 0.5 * (lo + hi);
		}

		double time_at(const TimeDependent& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double l = norm(vector_of(c.inv, "L"));
			const auto integrand = [&](double eta) {
				const double den = conic_den(z_at(c, eta), e, eta);
				if (den <= 0.0)
					raise_unbounded();
				return l / (den * den);
			};
			const double measure =
				spin_of(c.anchor) *
				quad_adaptive(integrand, c.ctx.theta0, theta, sweep_tol).value;
			return invert_time_scale(m.g, c.anchor.t, measure) - c.anchor.t;
		}

		double time_at(const DirectionOnly& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const auto u = profile_fn(m.U);
			const auto v = profile_fn(m.V);
			return planar_sweep(c, theta, [&](double eta) {
				const double den = conic_den(u(eta), e, eta);
				if (den <= 0.0)
					raise_unbounded();
				const double invl = transverse_inv_l(u, v, c.L0, e, c.ctx.theta0, eta);
				return 1.0 / (invl * invl * invl * den * den);
			});
		}

		double time_at(const HamiltonianAngle& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = ham_ecc(c.inv);
			const auto u = const_fn(m.mu);
			const auto v = half_sine_fn(m.alpha, m.beta);
			return planar_sweep(c, theta, [&](double eta) {
				const double den = conic_den(u(eta), e, eta);
				if (den <= 0.0)
					raise_unbounded();
				const double invl = transverse_inv_l(u, v, c.L0, e, c.ctx.theta0, eta);
				return 1.0 / (invl * invl * invl * den * den);
			});
		}

		double time_at(const Drag& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			return planar_sweep(c, theta, [&](double eta) {
				const double l = drag_profile(m, c.L0, c.ctx.theta0, eta);
				if (l <= 0.0)
					raise(errc::singular_orbit,
					      "angular momentum is exhausted inside the time range");
				const double den = conic_den(z_at(c, eta), e, eta);
				if (den <= 0.0)
					raise_unbounded();
				return 1.0 / (l * den * den);
			});
		}

		double time_at(const KeplerOrbitFamily& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double a = scalar_of(c.inv, "A");
			const double k = scalar_of(c.inv, "k");
			const double th0 = c.ctx.theta0;
			return planar_sweep(c, theta, [&](double eta) {
				const double den = a * (1.0 - std::cos(eta - th0)) +
				                   e.mag * std::cos(eta - e.az);
				if (den <= 0.0)
					raise_unbounded();
				const double r = 1.0 / den;
				const double g = eval(m.g, r);
				if (g <= 0.0)
					raise(errc::domain_error, "time quadrature needs g(r) > 0");
				return std::sqrt(r) / (k * std::sqrt(g));
			});
		}

		double time_at(const PowerLaw& m, const OrbitConsts& c, double theta)
		{
			const Ecc e = planar_ecc(c.inv);
			const double k = scalar_of(c.inv, "k");
			const double base = m.mu / (k * k);
			const double p = 0.5 * (m.alpha - 1.0);
			return planar_sweep(c, theta, [&](double eta) {
				const double den = conic_den(base, e, eta);
				if (den <= 0.0)
					raise_unbounded();
				return std::pow(den, p) / k;
			});
		}

		double time_at(const MagnitudeConserved& m, const OrbitConsts& c, double theta)
		{
			const Vec3 jv = vector_of(c.inv, "J");
			const double j = norm(jv);
			const double l = scalar_of(c.inv, "L_norm");
			const double ti = polar_of(c.anchor, jv);
			const auto integrand = [&](double eta) {
				const double s = std::sin(eta);
				if (s <= 0.0)
					raise(errc::zone_boundary, "time quadrature touches a pole");
				const double den = m.k + j * std::cos(eta);
				if (den <= 0.0)
					raise_unbounded();
				const double h = eval(m.h, l * l / den);
				const double rad = j * j * s * s - h * h * l * l;
				if (rad <= 0.0)
					raise(errc::zone_boundary,
					      "time quadrature touches a polar turning point");
				return j * l * l * l * s / (den * den * std::sqrt(rad));
			};
			return quad_adaptive(integrand, ti, theta, sweep_tol).value;
		}

		double time_at(const FLGR&, const OrbitConsts&, double)
		{
			raise(errc::unsupported_family,
			      "no closed time quadrature for the gyroscopic family");
		}

		double time_at(const MICZ&, const OrbitConsts&, double)
		{
			raise(errc::unsupported_family,
			      "no closed time quadrature for the monopole-Coulomb family");
		}

		double time_at(const Monopole&, const OrbitConsts&, double)
		{
			raise(errc::unsupported_family,
			      "no closed time quadrature for the bare monopole");
		}

		double half_atan(double num, double den)
		{
			if (num == 0.0 && den == 0.0)
				return 0.0;
			return 0.5 * std::atan(num / den);
		}
	}

	OrbitConsts orbit_consts(const ForceModel& m, const PhaseState& s0)
	{
		OrbitConsts c;
		c.ctx = make_context(m, s0);
		c.inv = evaluate(m, s0, c.ctx);
		c.anchor = s0;
		c.L0 = c.ctx.L0;
		return c;
	}

	ConicParams conic_params(const Kepler& m, const InvariantSet& inv)
	{
		if (m.mu <= 0.0)
			raise(errc::bad_parameter, "conic parameters need mu > 0");
		const Vec3 lv = vector_of(inv, "L");
		const Vec3 jv = vector_of(inv, "J");
		const double l = norm(lv);
		if (l < 1e-250)
			raise(errc::zero_angular_momentum,
			      "conic parameters need a nonzero angular momentum");
		ConicParams cp;
		cp.scale = l * l / m.mu;
		cp.ratio = norm(jv) / m.mu;
		cp.theta0 = ecc_of(jv).az;
		return cp;
	}

	double orbit_radius(const ForceModel& m, const OrbitConsts& c, double theta)
	{
		return std::visit([&](const auto& fam) { return radius_at(fam, c, theta); }, m);
	}

	double azimuth_of_polar(const MagnitudeConserved& m, const OrbitConsts& c, double theta)
	{
		const Vec3 jv = vector_of(c.inv, "J");
		const double j = norm(jv);
		const double l = scalar_of(c.inv, "L_norm");
		const double ti = polar_of(c.anchor, jv);
		const auto integrand = [&](double eta) {
			const double s = std::sin(eta);
			if (s <= 0.0)
				raise(errc::zone_boundary, "azimuth quadrature touches a pole");
			const double den = m.k + j * std::cos(eta);
			if (den <= 0.0)
				raise_unbounded();
			const double h = eval(m.h, l * l / den);
			const double rad = j * j * s * s - h * h * l * l;
			if (rad <= 0.0)
				raise(errc::zone_boundary,
				      "azimuth quadrature touches a polar turning point");
			return -h * l / (s * std::sqrt(rad));
		};
		return quad_adaptive(integrand, ti, theta, 1e-10).value;
	}

	double azimuth_closed_inverse_r(double lambda, double k, double L, double J,
	                                double theta0, double theta)
	{
		if (L <= 0.0)
			raise(errc::bad_parameter, "closed azimuth needs L > 0");
		if (J <= 0.0)
			raise(errc::bad_parameter, "closed azimuth needs J > 0");
		if (lambda == 0.0)
			return 0.0;
		const double c = L * L / (lambda * lambda);
		const auto radicand = [&](double th) {
			const double s = std::sin(th);
			const double base = k + J * std::cos(th);
			return J * J * c * s * s - base * base;
		};
		const double scale = J * J * c + (std::abs(k) + J) * (std::abs(k) + J);
		for (double th : {theta0, theta})
		{
			if (std::sin(th) <= 0.0)
				raise(errc::zone_boundary,
				      "polar angles must lie strictly between the poles");
			if (radicand(th) < -1e-12 * scale)
				raise(errc::zone_boundary, "polar angle outside the orbit's zone");
		}
		const double sgn = lambda > 0.0 ? 1.0 : -1.0;
		if (k == 0.0)
		{
			// Plain arcsec antiderivative: its fold at the sine's peak
			// mirrors the integrand's own sign change there.
			const auto f = [&](double th) {
				return std::acos(clamp_unit(1.0 / (std::sqrt(1.0 + c) * std::sin(th))));
			};
			return sgn * (f(theta) - f(theta0));
		}
		// The arctan antiderivatives are fold-free inside the zone: their
		// denominators keep one sign while the radicand stays positive.
		// The degenerate branches are the exact limits of the general one;
		// J = -k is the J = k branch reflected through the equatorial plane.
		const auto antiderivative = [&](double th) {
			const double u = std::cos(th);
			const double w = std::sqrt(std::max(radicand(th), 0.0));
			if (J == k)
				return half_atan(c - 2.0 - (c + 2.0) * u, 2.0 * w / std::abs(k));
			if (J == -k)
				return half_atan(c - 2.0 + (c + 2.0) * u, 2.0 * w / std::abs(k));
			const double n1 = J * J * c - k * k - J * k - J * (J * c + J + k) * u;
			const double n2 = J * J * c - k * k + J * k + J * (J * c + J - k) * u;
			return half_atan(n1, (J + k) * w) + half_atan(n2, (J - k) * w);
		};
		return sgn * (antiderivative(theta) - antiderivative(theta0));
	}

	double time_of_angle(const ForceModel& m, const OrbitConsts& c, double theta)
	{
		return std::visit([&](const auto& fam) { return time_at(fam, c, theta); }, m);
	}

	double kepler_time_closed(const Kepler& m, const ConicParams& cp, double theta)
	{
		if (m.mu <= 0.0 || cp.scale <= 0.0 || cp.ratio < 0.0)
			raise(errc::bad_parameter,
			      "closed time needs mu > 0, scale > 0 and ratio >= 0");
		if (cp.ratio >= 1.0)
			raise(errc::domain_error,
			      "closed time exists only for bound ellipses (ratio < 1)");
		const double mu = m.mu;
		const double l = std::sqrt(mu * cp.scale);
		const double j = mu * cp.ratio;
		const double twice_e = mu * (cp.ratio * cp.ratio - 1.0) / cp.scale;
		const double root = std::sqrt(-twice_e);
		const double d = theta - cp.theta0;
		const double den = mu + j * std::cos(d);
		const double q = l * root / (mu + j);
		// Keep the arctan on the branch that grows with the angle.
		const double x = 0.5 * d;
		const double n = std::round(x / pi);
		const double swing = std::atan(q * std::tan(x - n * pi)) + n * pi;
		return (l / twice_e) * (j * std::sin(d) / den - (2.0 * mu / (l * root)) * swing);
	}

	double kepler_time_closed_radial(const Kepler& m, const ConicParams& cp, double r0,
	                                 double r)
	{
		if (m.mu <= 0.0 || cp.scale <= 0.0 || cp.ratio < 0.0)
			raise(errc::bad_parameter,
			      "closed time needs mu > 0, scale > 0 and ratio >= 0");
		if (cp.ratio >= 1.0)
			raise(errc::domain_error,
			      "closed time exists only for bound ellipses (ratio < 1)");
		if (r0 > r)
			raise(errc::domain_error, "the outbound branch needs r0 <= r");
		const double e = cp.ratio;
		const double rp = cp.scale / (1.0 + e);
		const double ra = cp.scale / (1.0 - e);
		const double slack = 1e-9 * cp.scale;
		if (r0 < rp - slack || r > ra + slack)
			raise(errc::domain_error, "radii must lie between perihelion and aphelion");
		if (e < 1e-14)
			return 0.0;
		const double mu = m.mu;
		const double twice_e = mu * (e * e - 1.0) / cp.scale;
		const double j = mu * e;
		const double root = std::sqrt(-twice_e);
		// Factor the radial quadratic through its apsidal roots; the direct
		// form cancels catastrophically near either turning point.
		const auto antiderivative = [&](double rc) {
			const double dp = std::max(rc - rp, 0.0);
			const double da = std::max(ra - rc, 0.0);
			const double q = -twice_e * dp * da;
			const double arg = dp <= da ? 1.0 + twice_e * dp / j : -1.0 - twice_e * da / j;
			const double swing = std::atan2(clamp_unit(arg), -twice_e * std::sqrt(dp * da) / j);
			return std::sqrt(q) / twice_e + (mu / (twice_e * root)) * swing;
		};
		return antiderivative(r) - antiderivative(r0);
	}

	double kepler_solve(double e, double M)
	{
		if (!(e >= 0.0 && e < 1.0))
			raise(errc::bad_parameter, "eccentric-anomaly solve needs 0 <= e < 1");
		const double n = std::round(M / (2.0 * pi));
		const double m0 = M - 2.0 * pi * n;
		double lo = m0 - e;
		double hi = m0 + e;
		double psi = m0 + e * std::sin(m0);
		for (int i = 0; i < 100; ++i)
		{
			const double f = psi - e * std::sin(psi) - m0;
			if (std::abs(f) <= 1e-14)
				break;
			if (f > 0.0)
				hi = std::min(hi, psi);
			else
				lo = std::max(lo, psi);
			double next = psi - f / (1.0 - e * std::cos(psi));
			if (!(next > lo && next < hi))
				next = 0.5 * (lo + hi);
			psi = next;
		}
		if (std::abs(psi - e * std::sin(psi) - m0) > 1e-13)
			raise(errc::non_convergent, "eccentric-anomaly iteration stalled");
		return psi + 2.0 * pi * n;
	}

	Anomalies anomalies(double e, double R, double psi)
	{
		if (!(e >= 0.0 && e < 1.0) || R <= 0.0)
			raise(errc::bad_parameter, "anomalies need 0 <= e < 1 and R > 0");
		const double n = std::round(psi / (2.0 * pi));
		const double pr = psi - 2.0 * pi * n;
		const double theta = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * pr),
		                                      std::sqrt(1.0 - e) * std::cos(0.5 * pr)) +
		                     2.0 * pi * n;
		return {R * (1.0 - e * std::cos(psi)), theta};
	}

	MICZGeometry micz_geometry(double lambda, double mu, const InvariantSet& inv)
	{
		if (mu == 0.0)
			raise(errc::bad_parameter, "the orbit geometry needs mu != 0");
		const Vec3 pv = vector_of(inv, "P");
		const Vec3 jv = vector_of(inv, "J");
		const double l = scalar_of(inv, "L_norm");
		const double h = scalar_of(inv, "H");
		const double p = norm(pv);
		if (p < 1e-250)
			raise(errc::zero_angular_momentum, "the orbit geometry needs a nonzero axis vector");
		const Vec3 n = pv - (lambda / mu) * jv;
		const double nn = norm(n);
		if (nn < 1e-250)
			raise(errc::bad_parameter, "the orbital plane degenerates; its normal vanishes");
		MICZGeometry g;
		g.cone_half_angle = std::acos(clamp_unit(lambda / p));
		g.normal = n / nn;
		g.plane_offset = -lambda * l * l / (mu * nn);
		const double disc = std::max(mu * mu + 2.0 * h * lambda * lambda, 1e-300);
		g.gamma = std::asin(clamp_unit(mu * l / (p * std::sqrt(disc))));
		const double j = norm(jv);
		g.beta = j < 1e-250 ? 0.0 : std::acos(clamp_unit(lambda * mu / (p * j)));
		return g;
	}

	double micz_anomaly_of_azimuth(double lambda, double mu, const InvariantSet& inv,
	                               double phi)
	{
		const double l = scalar_of(inv, "L_norm");
		const double h = scalar_of(inv, "H");
		const double p = norm(vector_of(inv, "P"));
		const double j = norm(vector_of(inv, "J"));
		if (j < 1e-250)
			raise(errc::bad_parameter, "the anomaly is undefined on a circular orbit");
		if (p < 1e-250)
			raise(errc::zero_angular_momentum, "the anomaly needs a nonzero axis vector");
		const double s = std::sqrt(std::max(2.0 * h * p * p + mu * mu, 0.0));
		const double arg = (lambda * lambda * mu - l * l * s * std::cos(phi)) / (p * p * j);
		if (std::abs(arg) > 1.0 + 1e-12)
			raise(errc::domain_error, "azimuth outside the bound orbit's range");
		return std::acos(clamp_unit(arg));
	}

	double areal(double L, double t) { return 0.5 * L * t; }
}
