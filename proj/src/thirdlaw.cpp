#include "orbitlab/thirdlaw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "orbitlab/specialfn.hpp"

namespace orbitlab
{
	namespace
	{
		constexpr double pi = 3.141592653589793238462643383279502884;

		// arctan(q tan x) continued across the poles of the tangent.
		double atan_continued(double q, double x)
		{
			const double n = std::round(x / pi);
			return std::atan(q * std::tan(x - n * pi)) + n * pi;
		}

		// Golden-section minimum of a smooth f on [a, b].
		double golden_min(const std::function<double(double)>& f, double a, double b)
		{
			constexpr double w = 0.6180339887498949;
			double x1 = b - w * (b - a), x2 = a + w * (b - a);
			double f1 = f(x1), f2 = f(x2);
			for (int it = 0; it < 90; ++it)
			{
				if (f1 < f2)
				{
					b = x2;
					x2 = x1;
					f2 = f1;
					x1 = b - w * (b - a);
					f1 = f(x1);
				}
				else
				{
					a = x1;
					x1 = x2;
					f1 = f2;
					x2 = a + w * (b - a);
					f2 = f(x2);
				}
			}
			return 0.5 * (a + b);
		}

		double radius_at(const Trajectory& traj, double t)
		{
			return norm(traj.state_at(t).r);
		}

		// Apsidal times of r(t) over [ta, tb]: coarse grid argmin/argmax,
		// each refined on the dense output.
		struct Apsides
		{
			double t_min = 0.0;
			double t_max = 0.0;
		};

		Apsides refine_apsides(const Trajectory& traj, double ta, double tb)
		{
			constexpr int n = 1024;
			int imin = 0, imax = 0;
			double rmin = radius_at(traj, ta), rmax = rmin;
			for (int i = 1; i <= n; ++i)
			{
				const double r = radius_at(traj, ta + (tb - ta) * i / n);
				if (r < rmin)
				{
					rmin = r;
					imin = i;
				}
				if (r > rmax)
				{
					rmax = r;
					imax = i;
				}
			}
			const auto bracket = [&](int i) {
				const double lo = ta + (tb - ta) * std::max(i - 1, 0) / n;
				const double hi = ta + (tb - ta) * std::min(i + 1, n) / n;
				return std::pair{lo, hi};
			};
			const auto [alo, ahi] = bracket(imin);
			const auto [blo, bhi] = bracket(imax);
			Apsides out;
			out.t_min = golden_min([&](double t) { return radius_at(traj, t); }, alo, ahi);
			out.t_max = golden_min([&](double t) { return -radius_at(traj, t); }, blo, bhi);
			return out;
		}

		// Right side of the period law at eccentricity e.
		double law_rhs(double alpha, double mu, double e)
		{
			const double one_m = 1.0 - e * e;
			const double p = legendre_p(0.5 * (alpha - 1.0), 1.0 / std::sqrt(one_m));
			return 4.0 * pi * pi / mu * std::pow(one_m, -0.5 * (alpha + 1.0)) * p * p;
		}
	}

	double kepler_period(double mu, double E)
	{
		if (mu <= 0.0)
			raise(errc::bad_parameter, "central strength mu must be positive");
		if (E >= 0.0)
			raise(errc::bad_parameter, "bound period needs negative energy");
		return 2.0 * pi * mu / std::pow(-2.0 * E, 1.5);
	}

	PeriodReport generalized_period(double alpha, double mu, double k_const, double E,
	                                double J)
	{
		if (mu <= 0.0 || k_const <= 0.0)
			raise(errc::bad_parameter, "mu and k must be positive");
		if (E >= 0.0)
			raise(errc::bad_parameter, "bound period needs negative energy");
		const double k2 = k_const * k_const;
		const double e = std::abs(J) * k2 / mu;
		if (e >= 1.0)
			raise(errc::bad_parameter, "orbit is not elliptical");
		const double z = mu / (k_const * std::sqrt(-2.0 * E));
		if (z < 1.0)
			raise(errc::bad_parameter, "integrals lie outside the elliptical regime");

		PeriodReport out;
		out.T = 2.0 * pi / k_const * std::pow(-2.0 * E / k2, 0.25 * (alpha - 1.0)) *
		        legendre_p(0.5 * (alpha - 1.0), z);
		out.R = mu / (-2.0 * E);
		out.l = k2 / mu;
		out.e = e;

		const double c0 = mu / k2;
		const double expo = 0.5 * (alpha - 1.0);
		const double quad =
			2.0 / k_const *
			quad_adaptive([&](double u) { return std::pow(c0 + std::abs(J) * std::cos(u), expo); },
		                  0.0, pi, 1e-12)
				.value;
		out.law_residual = std::abs(out.T - quad) / out.T;
		return out;
	}

	PeriodReport measured_elements(const Trajectory& traj)
	{
		PeriodReport out;
		out.T = find_period(traj);
		const double t0 = traj.t_begin();
		const Apsides ap = refine_apsides(traj, t0, t0 + out.T);
		const double rmin = radius_at(traj, ap.t_min);
		const double rmax = radius_at(traj, ap.t_max);
		out.R = 0.5 * (rmax + rmin);
		out.e = (rmax - rmin) / (rmax + rmin);
		out.l = out.R * (1.0 - out.e * out.e);
		return out;
	}

	double third_law_residual(double alpha, double mu, const Trajectory& traj)
	{
		if (mu <= 0.0)
			raise(errc::bad_parameter, "central strength mu must be positive");
		const PeriodReport m = measured_elements(traj);
		return std::abs(m.T * m.T * std::pow(m.R, alpha) - law_rhs(alpha, mu, m.e));
	}

	double micz_third_law(const Trajectory& traj)
	{
		const auto* m = std::get_if<MICZ>(&traj.model());
		if (m == nullptr)
			raise(errc::bad_parameter, "cone period law needs a monopole-Coulomb run");
		const double T = find_radial_period(traj);

		// First perihelion: the first sign change of the radial rate from
		// negative to positive (or an apsidal start).
		const auto rate = [&](double t) {
			const PhaseState s = traj.state_at(t);
			return dot(s.r, s.v) / norm(s.r);
		};
		double t_peri = traj.t_begin();
		double prev = rate(t_peri);
		bool found = std::abs(prev) <= 1e-12 && rate(t_peri + 1e-9 * T) > 0.0;
		for (size_t i = 1; i < traj.size() && !found; ++i)
		{
			const double cur = rate(traj.state(i).t);
			if (prev < 0.0 && cur >= 0.0)
			{
				double lo = traj.state(i - 1).t, hi = traj.state(i).t;
				for (int it = 0; it < 80; ++it)
				{
					const double mid = 0.5 * (lo + hi);
					(rate(mid) < 0.0 ? lo : hi) = mid;
				}
				t_peri = 0.5 * (lo + hi);
				found = true;
			}
			prev = cur;
		}
		if (!found)
			raise(errc::not_periodic, "no perihelion passage in the trajectory span");

		const double t_apo =
			golden_min([&](double t) { return -radius_at(traj, t); }, t_peri, t_peri + T);
		const Vec3 chord = traj.state_at(t_peri).r - traj.state_at(t_apo).r;
		const double R = 0.5 * norm(chord);
		return std::abs(T * T / (R * R * R) - 4.0 * pi * pi / m->mu);
	}

	PowerLawConsts power_law_consts(const PowerLaw& m, const PhaseState& s)
	{
		if (m.alpha != -1.0 && m.alpha != 1.0)
			raise(errc::bad_parameter, "perihelion phase is closed-form only for alpha = -1, +1");
		const double r = norm(s.r);
		const Vec3 Lv = cross(s.r, s.v);
		const double L = norm(Lv);
		if (L <= 1e-12 * (r + norm(s.v)))
			raise(errc::zero_angular_momentum, "radial motion carries no orbit constants");

		PowerLawConsts c;
		c.mu = m.mu;
		c.k = L / std::pow(r, 0.5 * (m.alpha + 3.0));
		c.E = 0.5 * dot(s.v, s.v) / std::pow(r, m.alpha + 3.0) - m.mu / r;
		if (c.E >= 0.0)
			raise(errc::bad_parameter, "state is not on a bound orbit");
		const Vec3 Jv = cross(s.v, Lv) / (L * L) - (m.mu / (c.k * c.k)) * hat(s.r);
		c.J = norm(Jv);
		if (c.J * c.k * c.k >= c.mu)
			raise(errc::bad_parameter, "state is not on a bound orbit");

		// Angles measured about the angular-momentum direction.
		const double sgn = Lv.z >= 0.0 ? 1.0 : -1.0;
		c.theta0 = c.J > 1e-14 ? std::atan2(sgn * Jv.y, Jv.x) : 0.0;

		// Perihelion passage nearest s.t from the closed radial phase.
		const double rdot = dot(s.r, s.v) / r;
		if (c.J <= 1e-14)
			c.t0 = s.t;
		else if (m.alpha == -1.0)
		{
			const double om = std::sqrt(-2.0 * c.E);
			const double amp = c.k * c.k * c.J / (-2.0 * c.E);
			const double phase =
				std::atan2(rdot / (amp * om), (c.mu / (-2.0 * c.E) - r) / amp);
			c.t0 = s.t - phase / om;
		}
		else
		{
			const double phase = std::atan2(rdot / (c.J * c.k * r * r),
			                                (1.0 / r - c.mu / (c.k * c.k)) / c.J);
			c.t0 = s.t - phase / c.k;
		}
		return c;
	}

	PolarState explicit_solution(double alpha, const PowerLawConsts& c, double t)
	{
		PolarState out;
		out.t = t;
		const double dt = t - c.t0;
		if (alpha == -1.0)
		{
			const double om = std::sqrt(-2.0 * c.E);
			const double amp = c.k * c.k * c.J / (-2.0 * c.E);
			out.r = c.mu / (-2.0 * c.E) - amp * std::cos(om * dt);
			out.theta = c.theta0 + 2.0 * atan_continued(
				c.k * om / (c.mu - c.k * c.k * c.J), 0.5 * om * dt);
			out.rdot = amp * om * std::sin(om * dt);
		}
		else if (alpha == 1.0)
		{
			out.r = 1.0 / (c.mu / (c.k * c.k) + c.J * std::cos(c.k * dt));
			out.theta = c.theta0 + c.k * dt;
			out.rdot = c.J * c.k * out.r * out.r * std::sin(c.k * dt);
		}
		else
			raise(errc::bad_parameter, "explicit orbit exists only for alpha = -1, +1");
		out.thetadot = c.k * std::pow(out.r, 0.5 * (alpha - 1.0));
		return out;
	}

	double explicit_swept_area(double alpha, const PowerLawConsts& c, double t)
	{
		const double dt = t - c.t0;
		if (alpha == -1.0)
		{
			const double om = std::sqrt(-2.0 * c.E);
			return 0.5 * (c.mu * c.k * dt / (-2.0 * c.E) -
			              std::pow(c.k, 3.0) * c.J * std::sin(om * dt) / std::pow(om, 3.0));
		}
		if (alpha != 1.0)
			raise(errc::bad_parameter, "explicit orbit exists only for alpha = -1, +1");
		const double om = std::sqrt(-2.0 * c.E);
		const double k2 = c.k * c.k;
		const double swing =
			atan_continued(c.k * om / (c.mu + k2 * c.J), 0.5 * c.k * dt);
		return 0.5 * (2.0 * c.mu * c.k / std::pow(om, 3.0) * swing -
		              k2 * c.J * std::sin(c.k * dt) /
		                  ((-2.0 * c.E) * (c.mu / k2 + c.J * std::cos(c.k * dt))));
	}
}
