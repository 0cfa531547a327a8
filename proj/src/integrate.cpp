#include "orbitlab/integrate.hpp"

#include "dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orbitlab
{
	namespace
	{
		using namespace dopri5;

		constexpr double two_pi = 2.0 * std::numbers::pi;

		using Y = std::array<double, 7>;

		Y pack(const PhaseState& s)
		{
			return {s.r.x, s.r.y, s.r.z, s.v.x, s.v.y, s.v.z, s.t};
		}

		PhaseState unpack(const Y& y)
		{
			return {y[6], {y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
		}

		// Right side of the autonomized system; theta_ref keeps the
		// in-plane angle on the branch of the current step.
		Y derivative(const ForceModel& m, const Y& y, double theta_ref)
		{
			const PhaseState s = unpack(y);
			const Vec3 a = acceleration(m, s, unwrap_angle(std::atan2(y[1], y[0]), theta_ref));
			return {y[3], y[4], y[5], a.x, a.y, a.z, 1.0};
		}
	}

	Trajectory::Trajectory(ForceModel model, std::vector<PhaseState> samples,
	                       std::vector<double> angles, std::vector<DenseStep> dense,
	                       Termination termination)
		: model_(std::move(model)),
		  samples_(std::move(samples)),
		  angles_(std::move(angles)),
		  dense_(std::move(dense)),
		  termination_(termination)
	{
		if (samples_.empty() || samples_.size() != angles_.size())
			raise(errc::bad_parameter, "trajectory needs matching samples and angles");
	}

	size_t Trajectory::step_index(double t) const
	{
		if (dense_.empty())
			raise(errc::bad_parameter, "trajectory carries no dense output");
		const double dir = t_end() >= t_begin() ? 1.0 : -1.0;
		if (dir * (t - t_begin()) < -1e-12 || dir * (t - t_end()) > 1e-12)
			raise(errc::bad_parameter, "time " + std::to_string(t) + " outside trajectory span");
		// Largest step whose start is at or before t.
		size_t lo = 0, hi = dense_.size() - 1;
		while (lo < hi)
		{
			const size_t mid = (lo + hi + 1) / 2;
			if (dir * (samples_[mid].t - t) <= 0.0)
				lo = mid;
			else
				hi = mid - 1;
		}
		return lo;
	}

	PhaseState Trajectory::state_at(double t) const
	{
		const DenseStep& ds = dense_[step_index(t)];
		const double s = (t - ds.t0) / ds.h;
		const double s1 = 1.0 - s;
		Y y;
		for (int i = 0; i < 7; ++i)
		{
			const auto& rc = ds.rcont;
			y[i] = rc[0][i] + s * (rc[1][i] + s1 * (rc[2][i] + s * (rc[3][i] + s1 * rc[4][i])));
		}
		PhaseState out = unpack(y);
		out.t = t;
		return out;
	}

	double Trajectory::angle_at(double t) const
	{
		const size_t i = step_index(t);
		const PhaseState s = state_at(t);
		const double w = (t - samples_[i].t) / (samples_[i + 1].t - samples_[i].t);
		const double guess = angles_[i] + w * (angles_[i + 1] - angles_[i]);
		return unwrap_angle(std::atan2(s.r.y, s.r.x), guess);
	}

	Trajectory integrate(const ForceModel& m, const PhaseState& s0, const IntegrationConfig& cfg)
	{
		if (cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0)
			raise(errc::bad_parameter, "integration tolerances must be positive");
		if (cfg.t1 == cfg.t0)
			raise(errc::bad_parameter, "integration span is empty");
		if (cfg.max_steps < 1)
			raise(errc::bad_parameter, "max_steps must be positive");

		const double span = cfg.t1 - cfg.t0;
		const double dir = span > 0.0 ? 1.0 : -1.0;

		PhaseState start = s0;
		start.t = cfg.t0;
		Y y = pack(start);

		std::vector<PhaseState> samples{start};
		std::vector<double> angles{std::atan2(start.r.y, start.r.x)};
		std::vector<DenseStep> dense;
		Termination term = Termination::completed;

		Y k1 = derivative(m, y, angles.back());

		// Initial step from the scaled size of the first derivative.
		double h;
		{
			double d0 = 0.0, d1n = 0.0;
			for (int i = 0; i < 7; ++i)
			{
				const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
				d0 += (y[i] / sc) * (y[i] / sc);
				d1n += (k1[i] / sc) * (k1[i] / sc);
			}
			h = 0.01 * std::sqrt(d0 / std::max(d1n, 1e-300));
			h = std::clamp(h, 1e-8 * std::abs(span), 0.1 * std::abs(span)) * dir;
		}

		long attempts = 0;
		bool last = false;
		bool rejected = false;
		while (!last)
		{
			if (++attempts > cfg.max_steps)
				raise(errc::max_steps_exceeded,
				      "exceeded " + std::to_string(cfg.max_steps) + " steps");
			if (std::abs(h) < 1e-14 * std::abs(span))
			{
				if (cfg.partial_on_underflow)
				{
					term = Termination::step_underflow;
					break;
				}
				raise(errc::step_underflow, "step size underflow at t = " +
				                                std::to_string(samples.back().t));
			}
			if (dir * (y[6] + h - cfg.t1) >= 0.0)
			{
				h = cfg.t1 - y[6];
				last = true;
			}

			const double theta_ref = angles.back();
			Y k2, k3, k4, k5, k6, k7, y1;
			bool stage_ok = true;
			try
			{
				Y w;
				for (int i = 0; i < 7; ++i) w[i] = y[i] + h * a21 * k1[i];
				k2 = derivative(m, w, theta_ref);
				for (int i = 0; i < 7; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
				k3 = derivative(m, w, theta_ref);
				for (int i = 0; i < 7; ++i)
					w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
				k4 = derivative(m, w, theta_ref);
				for (int i = 0; i < 7; ++i)
					w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
				k5 = derivative(m, w, theta_ref);
				for (int i = 0; i < 7; ++i)
					w[i] = y[i] +
					       h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
				k6 = derivative(m, w, theta_ref);
				for (int i = 0; i < 7; ++i)
					y1[i] = y[i] +
					        h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
				y1[6] = last ? cfg.t1 : y[6] + h;  // keep the clock exact
				k7 = derivative(m, y1, theta_ref);
			}
			catch (const Error&)
			{
				// Force evaluation failed inside the step (collision or
				// domain edge): retry shorter.
				stage_ok = false;
			}

			if (!stage_ok)
			{
				h *= 0.5;
				last = false;
				rejected = true;
				continue;
			}

			double err = 0.0;
			for (int i = 0; i < 7; ++i)
			{
				const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
				                      e6 * k6[i] + e7 * k7[i]);
				const double sc =
					cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
				err += (e / sc) * (e / sc);
			}
			err = std::sqrt(err / 7.0);

			if (err <= 1.0)
			{
				DenseStep ds;
				ds.t0 = y[6];
				ds.h = h;
				for (int i = 0; i < 7; ++i)
				{
					const double ydiff = y1[i] - y[i];
					const double bspl = h * k1[i] - ydiff;
					ds.rcont[0][i] = y[i];
					ds.rcont[1][i] = ydiff;
					ds.rcont[2][i] = bspl;
					ds.rcont[3][i] = ydiff - h * k7[i] - bspl;
					ds.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
					                      d6 * k6[i] + d7 * k7[i]);
				}
				dense.push_back(ds);

				y = y1;
				k1 = k7;  // first-same-as-last
				samples.push_back(unpack(y));
				angles.push_back(unwrap_angle(std::atan2(y[1], y[0]), angles.back()));

				const double cap = rejected ? 1.0 : 6.0;
				if (!last)
					h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, cap);
				rejected = false;
			}
			else
			{
				h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
				last = false;
				rejected = true;
			}
		}

		return Trajectory(m, std::move(samples), std::move(angles), std::move(dense), term);
	}

	double find_period(const Trajectory& traj)
	{
		const double a0 = traj.angle(0);
		const double dir = traj.angle(traj.size() - 1) >= a0 ? 1.0 : -1.0;

		size_t k = traj.size();
		for (size_t i = 1; i < traj.size(); ++i)
		{
			if (dir * (traj.angle(i) - a0) >= two_pi)
			{
				k = i;
				break;
			}
		}
		if (k == traj.size())
			raise(errc::not_periodic, "trajectory covers less than one full turn");

		double lo = traj.state(k - 1).t, hi = traj.state(k).t;
		for (int it = 0; it < 40 && std::abs(hi - lo) > 1e-12 * std::max(1.0, std::abs(hi)); ++it)
		{
			const double mid = 0.5 * (lo + hi);
			if (dir * (traj.angle_at(mid) - a0) >= two_pi)
				hi = mid;
			else
				lo = mid;
		}
		return 0.5 * (lo + hi) - traj.t_begin();
	}

	namespace
	{
		double radial_rate_at(const Trajectory& traj, double t)
		{
			const PhaseState s = traj.state_at(t);
			return dot(s.r, s.v) / norm(s.r);
		}
	}

	double find_radial_period(const Trajectory& traj)
	{
		std::vector<double> minima;
		const double scale = norm(traj.state(0).r) + norm(traj.state(0).v);

		double prev = dot(traj.state(0).r, traj.state(0).v) / norm(traj.state(0).r);
		if (std::abs(prev) <= 1e-12 * scale)
		{
			const double t0 = traj.t_begin();
			const double probe = radial_rate_at(
				traj, t0 + 1e-6 * (traj.t_end() - t0));
			if (probe > 0.0)
				minima.push_back(t0);
		}

		for (size_t i = 1; i < traj.size() && minima.size() < 2; ++i)
		{
			const double cur = dot(traj.state(i).r, traj.state(i).v) / norm(traj.state(i).r);
			if (prev < 0.0 && cur >= 0.0)
			{
				double lo = traj.state(i - 1).t, hi = traj.state(i).t;
				for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it)
				{
					const double mid = 0.5 * (lo + hi);
					if (radial_rate_at(traj, mid) < 0.0)
						lo = mid;
					else
						hi = mid;
				}
				minima.push_back(0.5 * (lo + hi));
			}
			prev = cur;
		}

		if (minima.size() < 2)
			raise(errc::not_periodic, "trajectory spans fewer than two radial minima");
		return minima[1] - minima[0];
	}
}
