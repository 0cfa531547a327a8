#include "orbitlab/models.hpp"

#include <algorithm>
#include <cmath>

#include "orbitlab/integrate.hpp"

namespace orbitlab
{
	namespace
	{
		// Radius with the collision guard applied.
		double guarded_radius(const PhaseState& s)
		{
			const double r = norm(s.r);
			if (r < r_min)
				raise(errc::zero_radius, "radius " + std::to_string(r) + " below collision guard");
			return r;
		}

		double angular_momentum_or_raise(const PhaseState& s, double r)
		{
			const double L = norm(cross(s.r, s.v));
			if (L <= 1e-14 * r * norm(s.v) || L < 1e-250)
				raise(errc::zero_angular_momentum,
				      "force law requires nonzero angular momentum");
			return L;
		}

		double in_plane_angle(const PhaseState& s, const std::optional<double>& theta)
		{
			const double raw = std::atan2(s.r.y, s.r.x);
			return theta ? unwrap_angle(raw, *theta) : raw;
		}

		// Transverse unit vector of the z = 0 plane, counterclockwise.
		Vec3 transverse_unit(const Vec3& rhat)
		{
			return {-rhat.y, rhat.x, 0.0};
		}

		double drag_strength(const Drag& m, const PhaseState& s, double r, double th)
		{
			switch (m.kind)
			{
				case DragKind::inverse_square:
					return m.alpha / (r * r);
				case DragKind::cosine:
					return (m.a * std::cos(th) + m.b) / (r * r);
				case DragKind::cosine_over_l:
				{
					const double L = angular_momentum_or_raise(s, r);
					return (m.a * std::cos(th) + m.b) / (L * r * r);
				}
				case DragKind::exponential:
				{
					const double L = angular_momentum_or_raise(s, r);
					return -m.a * std::exp(-th) * L * L * L / (2.0 * r * r);
				}
			}
			raise(errc::bad_parameter, "unknown drag kind");
		}

		struct AccelVisitor
		{
			const PhaseState& s;
			const std::optional<double>& theta;

			Vec3 operator()(const Kepler& m) const
			{
				const double r = guarded_radius(s);
				return (-m.mu / (r * r * r)) * s.r;
			}

			Vec3 operator()(const CentralAngle& m) const
			{
				const double r = guarded_radius(s);
				const double L = angular_momentum_or_raise(s, r);
				const double th = in_plane_angle(s, theta);
				return (-eval(m.v, th) * L / (r * r * r)) * s.r;
			}

			Vec3 operator()(const TimeDependent& m) const
			{
				const double r = guarded_radius(s);
				const double L = angular_momentum_or_raise(s, r);
				const double th = in_plane_angle(s, theta);
				const double gt = eval(m.g, s.t);
				if (gt == 0.0)
					raise(errc::domain_error, "time scale g(t) vanishes");
				const double gddot = eval(m.g_ddot, s.t);
				const double coeff = -L * eval(m.v, th) / (gt * r * r * r) + gddot / gt;
				return coeff * s.r;
			}

			Vec3 operator()(const DirectionOnly& m) const
			{
				const double r = guarded_radius(s);
				const double th = in_plane_angle(s, theta);
				const Vec3 rhat = s.r / r;
				const Vec3 thhat = transverse_unit(rhat);
				const double r32 = r * std::sqrt(r);
				const double radial =
					(eval(m.U_prime2, th) + eval(m.U, th)) / (r * r) + 2.0 * eval(m.V_prime, th) / r32;
				const double transverse = eval(m.V, th) / r32;
				return (-radial) * rhat + (-transverse) * thhat;
			}

			Vec3 operator()(const HamiltonianAngle& m) const
			{
				const double r = guarded_radius(s);
				const double th = in_plane_angle(s, theta);
				const Vec3 rhat = s.r / r;
				const Vec3 thhat = transverse_unit(rhat);
				const double r32 = r * std::sqrt(r);
				const double half = 0.5 * (th - m.beta);
				const double radial = m.mu / (r * r) + m.alpha * std::cos(half) / (2.0 * r32);
				const double transverse = m.alpha * std::sin(half) / (2.0 * r32);
				return (-radial) * rhat + (-transverse) * thhat;
			}

			Vec3 operator()(const Drag& m) const
			{
				const double r = guarded_radius(s);
				const double th = in_plane_angle(s, theta);
				const double f = drag_strength(m, s, r, th);
				return (-f) * s.v + (-m.mu / (r * r * r)) * s.r;
			}

			Vec3 operator()(const KeplerOrbitFamily& m) const
			{
				const double r = guarded_radius(s);
				angular_momentum_or_raise(s, r);
				const double g = eval(m.g, r);
				if (g == 0.0)
					raise(errc::domain_error, "orbit-family strength g(r) vanishes");
				const double gp = eval(m.g_prime, r);
				const double rdot = dot(s.r, s.v) / r;
				const double fcoef = 0.5 * (gp * rdot / g + 3.0 * rdot / r);
				return fcoef * s.v + (-g) * s.r;
			}

			Vec3 operator()(const PowerLaw& m) const
			{
				const double r = guarded_radius(s);
				angular_momentum_or_raise(s, r);
				const double rdot = dot(s.r, s.v) / r;
				const double fcoef = 0.5 * (m.alpha + 3.0) * rdot / r;
				return fcoef * s.v + (-m.mu * std::pow(r, m.alpha)) * s.r;
			}

			Vec3 operator()(const MagnitudeConserved& m) const
			{
				const double r = guarded_radius(s);
				const Vec3 L = cross(s.r, s.v);
				const Vec3 rhat = s.r / r;
				const double h = eval(m.h, r);
				const double hp = eval(m.h_prime, r);
				return (-hp / r) * L + (-(h * hp + m.k / (r * r))) * rhat;
			}

			Vec3 operator()(const FLGR& m) const
			{
				const double r = guarded_radius(s);
				const Vec3 L = cross(s.r, s.v);
				return (-eval(m.f, r)) * L + (-eval(m.g, r)) * s.r;
			}

			Vec3 operator()(const MICZ& m) const
			{
				const double r = guarded_radius(s);
				const Vec3 L = cross(s.r, s.v);
				const Vec3 rhat = s.r / r;
				return (-m.lambda / (r * r * r)) * L +
				       (-(m.mu / (r * r) - m.lambda * m.lambda / (r * r * r))) * rhat;
			}

			Vec3 operator()(const Monopole& m) const
			{
				const double r = guarded_radius(s);
				const Vec3 L = cross(s.r, s.v);
				return (-m.mu / (r * r * r)) * L;
			}
		};
	}

	CentralAngle make_central_angle(Expr v)
	{
		return CentralAngle{std::move(v)};
	}

	TimeDependent make_time_dependent(Expr g, Expr v)
	{
		TimeDependent m;
		m.g_dot = diff(g);
		m.g_ddot = diff(m.g_dot);
		m.g = std::move(g);
		m.v = std::move(v);
		return m;
	}

	DirectionOnly make_direction_only(Expr U, Expr V)
	{
		DirectionOnly m;
		m.U_prime = diff(U);
		m.U_prime2 = diff(m.U_prime);
		m.V_prime = diff(V);
		m.U = std::move(U);
		m.V = std::move(V);
		return m;
	}

	KeplerOrbitFamily make_kepler_orbit_family(Expr g)
	{
		KeplerOrbitFamily m;
		m.g_prime = diff(g);
		m.g = std::move(g);
		return m;
	}

	MagnitudeConserved make_magnitude_conserved(Expr h, double k)
	{
		MagnitudeConserved m;
		m.h_prime = diff(h);
		m.h = std::move(h);
		m.k = k;
		return m;
	}

	const char* family_name(const ForceModel& m)
	{
		struct Visitor
		{
			const char* operator()(const Kepler&) const { return "Kepler"; }
			const char* operator()(const CentralAngle&) const { return "CentralAngle"; }
			const char* operator()(const TimeDependent&) const { return "TimeDependent"; }
			const char* operator()(const DirectionOnly&) const { return "DirectionOnly"; }
			const char* operator()(const HamiltonianAngle&) const { return "HamiltonianAngle"; }
			const char* operator()(const Drag&) const { return "Drag"; }
			const char* operator()(const KeplerOrbitFamily&) const { return "KeplerOrbitFamily"; }
			const char* operator()(const PowerLaw&) const { return "PowerLaw"; }
			const char* operator()(const MagnitudeConserved&) const { return "MagnitudeConserved"; }
			const char* operator()(const FLGR&) const { return "FLGR"; }
			const char* operator()(const MICZ&) const { return "MICZ"; }
			const char* operator()(const Monopole&) const { return "Monopole"; }
		};
		return std::visit(Visitor{}, m);
	}

	bool is_planar(const ForceModel& m)
	{
		return std::holds_alternative<CentralAngle>(m) || std::holds_alternative<TimeDependent>(m) ||
		       std::holds_alternative<DirectionOnly>(m) ||
		       std::holds_alternative<HamiltonianAngle>(m) || std::holds_alternative<Drag>(m) ||
		       std::holds_alternative<KeplerOrbitFamily>(m) || std::holds_alternative<PowerLaw>(m);
	}

	Vec3 acceleration(const ForceModel& m, const PhaseState& s, std::optional<double> theta)
	{
		return std::visit(AccelVisitor{s, theta}, m);
	}

	double poincare_project(const Trajectory& traj, double lambda)
	{
		if (traj.size() < 5)
			raise(errc::insufficient_samples,
			      "projection residual needs at least 5 samples, got " +
			          std::to_string(traj.size()));
		const FLGR* model = std::get_if<FLGR>(&traj.model());
		if (!model)
			raise(errc::bad_parameter, "projection expects an FLGR trajectory");

		// Uniform grid over the span, through dense output when available.
		std::vector<double> ts;
		std::vector<Vec3> w;
		std::vector<double> coef;  // lambda^2/r^4 + g(r) per node
		auto push = [&](double t, const PhaseState& s) {
			const double r = norm(s.r);
			ts.push_back(t);
			w.push_back(cross(s.r, cross(s.r, s.v)));
			coef.push_back(lambda * lambda / (r * r * r * r) + eval(model->g, r));
		};
		if (traj.has_dense())
		{
			const size_t n = std::max<size_t>(2001, 4 * traj.size() + 1);
			const double t0 = traj.t_begin(), t1 = traj.t_end();
			for (size_t i = 0; i < n; ++i)
			{
				const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
				push(t, traj.state_at(t));
			}
		}
		else
		{
			for (size_t i = 0; i < traj.size(); ++i)
				push(traj.state(i).t, traj.state(i));
		}

		double worst = 0.0;
		for (size_t i = 1; i + 1 < ts.size(); ++i)
		{
			const double hm = ts[i] - ts[i - 1], hp = ts[i + 1] - ts[i];
			// Second derivative on a possibly nonuniform 3-point stencil.
			const Vec3 wdd = 2.0 * ((w[i + 1] - w[i]) / (hp * (hp + hm)) +
			                        (w[i - 1] - w[i]) / (hm * (hp + hm)));
			worst = std::max(worst, norm(wdd + coef[i] * w[i]));
		}
		return worst;
	}

	Trajectory rescale_similarity(const PowerLaw& m, const Trajectory& traj, double gamma)
	{
		if (gamma <= 0.0)
			raise(errc::bad_parameter, "similarity scale gamma must be positive");
		if (m.alpha == 0.0)
			raise(errc::bad_parameter, "similarity map undefined for alpha = 0");

		const double c = std::pow(gamma, -2.0 / m.alpha);
		std::vector<PhaseState> samples;
		samples.reserve(traj.size());
		for (size_t i = 0; i < traj.size(); ++i)
		{
			const PhaseState& s = traj.state(i);
			samples.push_back({gamma * s.t, c * s.r, (c / gamma) * s.v});
		}
		return Trajectory(ForceModel{m}, std::move(samples),
		                  std::vector<double>(traj.angles()));
	}
}
