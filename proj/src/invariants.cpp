#include "orbitlab/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "dopri5.hpp"
#include "orbitlab/specialfn.hpp"

namespace orbitlab
{
	namespace
	{
		using namespace dopri5;

		using Z2 = std::array<double, 2>;

		Z2 osc_rhs(const Expr& v, double th, const Z2& y)
		{
			return {y[1], eval(v, th) - y[0]};
		}
	}

	void ZAccumulator::advance(double target)
	{
		if (target == th_)
			return;
		constexpr double rel = 1e-12, abs_tol = 1e-14;
		const double dir = target > th_ ? 1.0 : -1.0;
		double th = th_;
		Z2 y{z_, zp_};
		Z2 k1 = osc_rhs(v_, th, y);
		double h = dir * std::min(0.1, std::abs(target - th_));
		bool rejected = false;
		for (long attempts = 0;; ++attempts)
		{
			if (attempts >= 4000000)
				raise(errc::non_convergent, "oscillator accumulator exceeded its step budget");
			if (std::abs(h) < 1e-15 * (1.0 + std::abs(th)))
				raise(errc::non_convergent, "oscillator accumulator step size underflowed");
			bool last = false;
			if ((th + h - target) * dir >= 0.0)
			{
				h = target - th;
				last = true;
			}

			Z2 t, k2, k3, k4, k5, k6, k7, ynew;
			for (int i = 0; i < 2; ++i)
				t[i] = y[i] + h * a21 * k1[i];
			k2 = osc_rhs(v_, th + c2 * h, t);
			for (int i = 0; i < 2; ++i)
				t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
			k3 = osc_rhs(v_, th + c3 * h, t);
			for (int i = 0; i < 2; ++i)
				t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
			k4 = osc_rhs(v_, th + c4 * h, t);
			for (int i = 0; i < 2; ++i)
				t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
			k5 = osc_rhs(v_, th + c5 * h, t);
			for (int i = 0; i < 2; ++i)
				t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
			k6 = osc_rhs(v_, th + h, t);
			for (int i = 0; i < 2; ++i)
				ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
			k7 = osc_rhs(v_, th + h, ynew);

			double err = 0.0;
			for (int i = 0; i < 2; ++i)
			{
				const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
				const double sc = abs_tol + rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
				err += (e / sc) * (e / sc);
			}
			err = std::sqrt(err / 2.0);

			if (err <= 1.0)
			{
				th = last ? target : th + h;
				y = ynew;
				k1 = k7;
				if (last)
					break;
				const double cap = rejected ? 1.0 : 6.0;
				h *= std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, cap);
				rejected = false;
			}
			else
			{
				h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
				rejected = true;
			}
		}
		th_ = target;
		z_ = y[0];
		zp_ = y[1];
	}

	double invariant_norm(const InvariantValue& v)
	{
		if (const double* d = std::get_if<double>(&v))
			return std::abs(*d);
		return norm(std::get<Vec3>(v));
	}

	double invariant_distance(const InvariantValue& a, const InvariantValue& b)
	{
		if (a.index() != b.index())
			raise(errc::bad_parameter, "cannot compare a scalar invariant with a vector one");
		if (const double* d = std::get_if<double>(&a))
			return std::abs(*d - std::get<double>(b));
		return norm(std::get<Vec3>(a) - std::get<Vec3>(b));
	}

	ZPair z_pair(const Expr& v, double theta0, double theta)
	{
		return ZAccumulator(v, theta0).at(theta);
	}

	ZPair z_pair_convolution(const Expr& v, double theta0, double theta)
	{
		const auto zf = [&](double eta) { return eval(v, eta) * std::sin(theta - eta); };
		const auto zpf = [&](double eta) { return eval(v, eta) * std::cos(theta - eta); };
		return {theta0, quad_adaptive(zf, theta0, theta, 1e-13).value,
		        quad_adaptive(zpf, theta0, theta, 1e-13).value};
	}

	namespace
	{
		std::string lit(double x)
		{
			char buf[48];
			std::snprintf(buf, sizeof buf, "(%.17g)", x);
			return buf;
		}

		// Effective oscillator source in the anchor's angular-momentum
		// gauge.  Families whose conserved vectors carry no z terms have
		// no source.
		std::optional<Expr> oscillator_source(const ForceModel& m, double theta0, double L0)
		{
			if (const auto* ca = std::get_if<CentralAngle>(&m))
				return ca->v;
			if (const auto* td = std::get_if<TimeDependent>(&m))
				return td->v;
			const auto* dg = std::get_if<Drag>(&m);
			if (!dg)
				return std::nullopt;
			if (L0 <= 1e-250)
				raise(errc::zero_angular_momentum, "drag invariants need a nonzero anchor angular momentum");
			switch (dg->kind)
			{
				case DragKind::inverse_square:
				{
					const double k = L0 + dg->alpha * theta0;
					return parse(lit(dg->mu) + "/(" + lit(k) + "-" + lit(dg->alpha) + "*th)^2", "th");
				}
				case DragKind::cosine:
				{
					const double k = L0 + dg->a * std::sin(theta0) + dg->b * theta0;
					return parse(lit(dg->mu) + "/(" + lit(k) + "-" + lit(dg->a) + "*sin(th)-" +
					                 lit(dg->b) + "*th)^2",
					             "th");
				}
				case DragKind::cosine_over_l:
				{
					const double k = 0.5 * L0 * L0 + dg->a * std::sin(theta0) + dg->b * theta0;
					return parse(lit(dg->mu) + "/(2*(" + lit(k) + "-" + lit(dg->a) + "*sin(th)-" +
					                 lit(dg->b) + "*th))",
					             "th");
				}
				case DragKind::exponential:
				{
					const double c = 1.0 / (L0 * L0) - dg->a * std::exp(-theta0);
					return parse(lit(dg->mu) + "*(" + lit(dg->a) + "*exp(-th)+" + lit(c) + ")", "th");
				}
			}
			raise(errc::bad_parameter, "unknown drag kind");
		}

		// In-plane decomposition shared by the family evaluators.
		struct Frame
		{
			double r = 0.0;
			Vec3 rhat{};
			Vec3 thhat{};
			double theta = 0.0;
			Vec3 L{};
			double Lmag = 0.0;
			double rdot = 0.0;
		};

		Frame make_frame(const PhaseState& s, InvariantContext& ctx)
		{
			Frame f;
			f.r = norm(s.r);
			if (f.r < r_min)
				raise(errc::zero_radius, "invariants undefined at the collision guard radius");
			f.rhat = s.r / f.r;
			f.thhat = Vec3{-f.rhat.y, f.rhat.x, 0.0};
			f.theta = unwrap_angle(std::atan2(s.r.y, s.r.x), ctx.last_theta);
			ctx.last_theta = f.theta;
			f.L = cross(s.r, s.v);
			f.Lmag = norm(f.L);
			f.rdot = dot(s.r, s.v) / f.r;
			return f;
		}

		double require_L(const Frame& f, const PhaseState& s)
		{
			if (f.Lmag <= 1e-14 * f.r * norm(s.v) || f.Lmag < 1e-250)
				raise(errc::zero_angular_momentum, "invariants divide by the angular momentum");
			return f.Lmag;
		}

		InvariantSet eval_family(const Kepler& m, const PhaseState& s, const Frame& f,
		                         InvariantContext&)
		{
			const double L = require_L(f, s);
			InvariantSet out;
			out["L"] = f.L;
			out["E"] = 0.5 * dot(s.v, s.v) - m.mu / f.r;
			out["J"] = cross(s.v, f.L) - m.mu * f.rhat;
			out["K"] = s.v - (m.mu / (L * L)) * cross(f.L, f.rhat);
			return out;
		}

		InvariantSet eval_family(const CentralAngle&, const PhaseState& s, const Frame& f,
		                         InvariantContext& ctx)
		{
			const double L = require_L(f, s);
			const ZPair zp = ctx.osc->at(f.theta);
			InvariantSet out;
			out["L"] = f.L;
			out["K"] = s.v + zp.zprime * f.rhat - zp.z * f.thhat;
			out["J"] = cross(s.v, f.L / L) - zp.z * f.rhat - zp.zprime * f.thhat;
			return out;
		}

		InvariantSet eval_family(const TimeDependent& m, const PhaseState& s, const Frame& f,
		                         InvariantContext& ctx)
		{
			const double L = require_L(f, s);
			const double g = eval(m.g, s.t);
			if (g == 0.0)
				raise(errc::domain_error, "time scale g(t) vanishes");
			const double gdot = eval(m.g_dot, s.t);
			const ZPair zp = ctx.osc->at(f.theta);
			const Vec3 base = g * s.v - gdot * s.r;
			InvariantSet out;
			out["L"] = f.L;
			out["K"] = base + zp.zprime * f.rhat - zp.z * f.thhat;
			out["J"] = cross(base, f.L / L) - zp.z * f.rhat - zp.zprime * f.thhat;
			// For a constant source the energylike integral exists for any
			// time scale; its strength is the source value times the
			// (conserved) angular momentum.
			if (to_string(diff(m.v)) == "0")
			{
				const double mu = eval(m.v, 0.0) * ctx.L0;
				out["I"] = 0.5 * dot(base, base) - mu * g / f.r;
			}
			return out;
		}

		InvariantSet eval_family(const DirectionOnly& m, const PhaseState& s, const Frame& f,
		                         InvariantContext&)
		{
			const double U = eval(m.U, f.theta);
			const double swing = eval(m.U_prime, f.theta) + 2.0 * std::sqrt(f.r) * eval(m.V, f.theta);
			InvariantSet out;
			out["J"] = cross(s.v, f.L) - U * f.rhat - swing * f.thhat;
			out["K"] = f.Lmag * s.v - U * f.thhat + swing * f.rhat;
			return out;
		}

		InvariantSet eval_family(const HamiltonianAngle& m, const PhaseState&, const Frame& f,
		                         InvariantContext&)
		{
			const double pr = f.rdot;
			const double pth = f.L.z;  // signed in-plane angular momentum
			const double sq = std::sqrt(f.r);
			const double half = 0.5 * (f.theta - m.beta);
			const double H =
				0.5 * (pr * pr + pth * pth / (f.r * f.r)) - m.mu / f.r - m.alpha * std::cos(half) / sq;
			const double swing = m.alpha * sq * std::sin(half);
			const double sth = std::sin(f.theta), cth = std::cos(f.theta);
			InvariantSet out;
			out["J1"] = pr * pth * sth + pth * pth * cth / f.r - m.mu * cth + swing * sth;
			out["J2"] = -pr * pth * cth + pth * pth * sth / f.r - m.mu * sth - swing * cth;
			out["I"] = 2.0 * pth * H + pr * swing + pth * m.alpha * std::cos(half) / sq;
			out["H"] = H;
			return out;
		}

		InvariantSet eval_family(const Drag&, const PhaseState& s, const Frame& f,
		                         InvariantContext& ctx)
		{
			const double L = require_L(f, s);
			const ZPair zp = ctx.osc->at(f.theta);
			InvariantSet out;
			out["K"] = s.v / L + zp.zprime * f.rhat - zp.z * f.thhat;
			out["J"] = cross(s.v, f.L / L) / L - zp.z * f.rhat - zp.zprime * f.thhat;
			out["I"] = 0.5 * dot(s.v, s.v) / (L * L) +
			           (f.rdot * zp.zprime - (L / f.r) * zp.z) / L +
			           0.5 * (zp.z * zp.z + zp.zprime * zp.zprime);
			return out;
		}

		InvariantSet eval_family(const KeplerOrbitFamily& m, const PhaseState& s, const Frame& f,
		                         InvariantContext& ctx)
		{
			const double L = require_L(f, s);
			const double gr3 = eval(m.g, f.r) * f.r * f.r * f.r;
			if (gr3 <= 0.0)
				raise(errc::domain_error, "orbit-family invariants need g(r) r^3 > 0");
			const double A = gr3 / (L * L);
			const Vec3 rhat0{std::cos(ctx.theta0), std::sin(ctx.theta0), 0.0};
			const Vec3 thhat0{-std::sin(ctx.theta0), std::cos(ctx.theta0), 0.0};
			const Vec3 J = cross(s.v, f.L) / (L * L) - A * (f.rhat - rhat0);
			InvariantSet out;
			out["k"] = L / std::sqrt(gr3);
			out["A"] = A;
			out["E"] = 0.5 * dot(s.v, s.v) / gr3 - 1.0 / f.r;
			out["J"] = J;
			out["K"] = s.v / L - A * (f.thhat - thhat0);
			out["I"] = 0.5 * A * dot(s.v, s.v) / gr3 - A / f.r + A * norm(J);
			return out;
		}

		InvariantSet eval_family(const PowerLaw& m, const PhaseState& s, const Frame& f,
		                         InvariantContext&)
		{
			const double L = require_L(f, s);
			const double ra3 = std::pow(f.r, m.alpha + 3.0);
			const double k = L / std::sqrt(ra3);
			const double c = m.mu / (k * k);
			InvariantSet out;
			out["k"] = k;
			out["E"] = 0.5 * dot(s.v, s.v) / ra3 - m.mu / f.r;
			out["J"] = cross(s.v, f.L) / (L * L) - c * f.rhat;
			out["K"] = s.v / L - c * f.thhat;
			return out;
		}

		InvariantSet eval_family(const MagnitudeConserved& m, const PhaseState& s, const Frame& f,
		                         InvariantContext&)
		{
			const double h = eval(m.h, f.r);
			InvariantSet out;
			out["L_norm"] = f.Lmag;
			out["J"] = cross(s.v, f.L) - h * f.L - m.k * f.rhat;
			out["I"] = 0.5 * dot(s.v, s.v) + 0.5 * h * h - m.k / f.r;
			return out;
		}

		InvariantSet eval_family(const FLGR& m, const PhaseState&, const Frame& f,
		                         InvariantContext&)
		{
			InvariantSet out;
			out["L_norm"] = f.Lmag;
			// The transverse vector survives exactly when the gyroscopic
			// strength has the magnetic 1/r^3 profile.
			const double f1 = eval(m.f, 1.0);
			const double tol = 1e-9 * (1.0 + std::abs(f1));
			if (std::abs(eval(m.f, 2.0) - f1 / 8.0) <= tol &&
			    std::abs(eval(m.f, 3.0) - f1 / 27.0) <= tol)
				out["P"] = f.L - f1 * f.rhat;
			return out;
		}

		InvariantSet eval_family(const MICZ& m, const PhaseState& s, const Frame& f,
		                         InvariantContext&)
		{
			const Vec3 P = f.L - m.lambda * f.rhat;
			const Vec3 J = cross(s.v, f.L) + (m.lambda / f.r) * f.L - m.mu * f.rhat;
			InvariantSet out;
			out["L_norm"] = f.Lmag;
			out["P"] = P;
			out["J"] = J;
			out["K"] = cross(J, P);
			out["H"] = 0.5 * (dot(s.v, s.v) + m.lambda * m.lambda / (f.r * f.r)) - m.mu / f.r;
			return out;
		}

		InvariantSet eval_family(const Monopole&, const PhaseState& s, const Frame& f,
		                         InvariantContext&)
		{
			InvariantSet out;
			out["E"] = 0.5 * dot(s.v, s.v);
			out["L_norm"] = f.Lmag;
			return out;
		}

		double scalar_of(const InvariantSet& inv, const char* name)
		{
			const auto it = inv.find(name);
			if (it == inv.end() || !std::holds_alternative<double>(it->second))
				raise(errc::bad_parameter, std::string("invariant set lacks the scalar ") + name);
			return std::get<double>(it->second);
		}

		Vec3 vector_of(const InvariantSet& inv, const char* name)
		{
			const auto it = inv.find(name);
			if (it == inv.end() || !std::holds_alternative<Vec3>(it->second))
				raise(errc::bad_parameter, std::string("invariant set lacks the vector ") + name);
			return std::get<Vec3>(it->second);
		}
	}

	InvariantContext make_context(const ForceModel& m, const PhaseState& s0)
	{
		InvariantContext ctx;
		ctx.theta0 = std::atan2(s0.r.y, s0.r.x);
		ctx.L0 = norm(cross(s0.r, s0.v));
		ctx.last_theta = ctx.theta0;
		if (auto src = oscillator_source(m, ctx.theta0, ctx.L0))
			ctx.osc = std::make_shared<ZAccumulator>(std::move(*src), ctx.theta0);
		return ctx;
	}

	InvariantSet evaluate(const ForceModel& m, const PhaseState& s, InvariantContext& ctx)
	{
		const Frame f = make_frame(s, ctx);
		return std::visit([&](const auto& fam) { return eval_family(fam, s, f, ctx); }, m);
	}

	InvariantSet evaluate(const ForceModel& m, const PhaseState& s)
	{
		InvariantContext ctx = make_context(m, s);
		return evaluate(m, s, ctx);
	}

	double l_of_theta(const DirectionOnly& m, double L0, double J, double theta0, double theta)
	{
		if (L0 <= 0.0)
			raise(errc::bad_parameter, "anchor angular momentum must be positive");
		const auto integrand = [&](double eta) {
			const double den = eval(m.U, eta) + J * std::cos(eta - theta0);
			if (den <= 0.0)
				raise(errc::singular_orbit, "orbit denominator vanished inside the quadrature range");
			return eval(m.V, eta) / (den * std::sqrt(den));
		};
		const double inv = 1.0 / L0 + quad_adaptive(integrand, theta0, theta, 1e-12).value;
		if (inv <= 0.0)
			raise(errc::singular_orbit, "angular momentum diverges on the quadrature range");
		return 1.0 / inv;
	}

	ZPair danby_z(double k, double alpha, double mu, double theta0, double theta)
	{
		if (alpha == 0.0)
			raise(errc::bad_parameter, "the linear-decay closed form needs alpha != 0");
		const double u = k / alpha - theta;
		const double u0 = k / alpha - theta0;
		if (u <= 0.0 || u0 <= 0.0)
			raise(errc::bad_parameter, "angular momentum k - alpha*theta must stay positive");
		const double c = mu / (alpha * alpha);
		const double dsi = si(u) - si(u0);
		const double dci = ci(u) - ci(u0);
		return {theta0,
		        c * (std::sin(u - u0) / u0 - std::sin(u) * dsi - std::cos(u) * dci),
		        -c * (std::cos(u - u0) / u0 - 1.0 / u + std::sin(u) * dci - std::cos(u) * dsi)};
	}

	std::map<std::string, double> relations_check(const ForceModel& m, const InvariantSet& inv)
	{
		std::map<std::string, double> res;
		if (const auto* kp = std::get_if<Kepler>(&m))
		{
			const Vec3 L = vector_of(inv, "L");
			const Vec3 J = vector_of(inv, "J");
			const Vec3 K = vector_of(inv, "K");
			const double E = scalar_of(inv, "E");
			const double L2 = dot(L, L);
			res["K_sq_energy"] = std::abs(dot(K, K) - (2.0 * E + kp->mu * kp->mu / L2));
			res["J_sq_energy"] = std::abs(dot(J, J) - (2.0 * L2 * E + kp->mu * kp->mu));
			res["J_dot_L"] = std::abs(dot(J, L));
			res["K_dot_L"] = std::abs(dot(K, L));
			res["J_dot_K"] = std::abs(dot(J, K));
		}
		else if (std::holds_alternative<CentralAngle>(m) || std::holds_alternative<TimeDependent>(m))
		{
			const Vec3 L = vector_of(inv, "L");
			res["J_from_K"] =
				norm(vector_of(inv, "J") - cross(vector_of(inv, "K"), L / norm(L)));
		}
		else if (std::holds_alternative<DirectionOnly>(m))
		{
			// planar counterclockwise convention: Lhat = +z
			res["K_from_J"] =
				norm(vector_of(inv, "K") - cross(Vec3{0.0, 0.0, 1.0}, vector_of(inv, "J")));
		}
		else if (const auto* ha = std::get_if<HamiltonianAngle>(&m))
		{
			const double J1 = scalar_of(inv, "J1");
			const double J2 = scalar_of(inv, "J2");
			const double I = scalar_of(inv, "I");
			const double H = scalar_of(inv, "H");
			const double a2 = ha->alpha * ha->alpha;
			if (std::abs(H) > 1e-10)
			{
				const double t1 = J1 + a2 * std::cos(ha->beta) / (4.0 * H);
				const double t2 = J2 + a2 * std::sin(ha->beta) / (4.0 * H);
				const double t3 = ha->mu - a2 / (4.0 * H);
				res["closure"] = std::abs((t1 * t1 + t2 * t2 - t3 * t3) / (2.0 * H) -
				                          (I / (2.0 * H)) * (I / (2.0 * H)));
			}
			else
				res["zero_energy_plane"] = std::abs(J1 * std::cos(ha->beta) + J2 * std::sin(ha->beta) -
				                                    (I * I / a2 - ha->mu));
		}
		else if (std::holds_alternative<Drag>(m))
		{
			const double I = scalar_of(inv, "I");
			const Vec3 K = vector_of(inv, "K");
			const Vec3 J = vector_of(inv, "J");
			res["half_K_sq"] = std::abs(I - 0.5 * dot(K, K));
			res["half_J_sq"] = std::abs(I - 0.5 * dot(J, J));
		}
		else if (std::holds_alternative<KeplerOrbitFamily>(m))
		{
			const double E = scalar_of(inv, "E");
			const double I = scalar_of(inv, "I");
			const double A = scalar_of(inv, "A");
			const double Jn = norm(vector_of(inv, "J"));
			res["energy_amplitude"] = std::abs(E - (Jn * Jn / (2.0 * A) - Jn));
			res["half_J_sq"] = std::abs(I - 0.5 * Jn * Jn);
		}
		else if (const auto* pl = std::get_if<PowerLaw>(&m))
		{
			const double E = scalar_of(inv, "E");
			const double k = scalar_of(inv, "k");
			const Vec3 J = vector_of(inv, "J");
			const Vec3 K = vector_of(inv, "K");
			const double k2 = k * k;
			res["J_sq_energy"] = std::abs(dot(J, J) - (2.0 * E / k2 + pl->mu * pl->mu / (k2 * k2)));
			res["K_sq_J_sq"] = std::abs(dot(K, K) - dot(J, J));
		}
		else if (const auto* mc = std::get_if<MagnitudeConserved>(&m))
		{
			const double Ln = scalar_of(inv, "L_norm");
			const double I = scalar_of(inv, "I");
			const Vec3 J = vector_of(inv, "J");
			res["J_sq_energy"] = std::abs(dot(J, J) - (2.0 * Ln * Ln * I + mc->k * mc->k));
		}
		else if (const auto* mz = std::get_if<MICZ>(&m))
		{
			const double Ln = scalar_of(inv, "L_norm");
			const double H = scalar_of(inv, "H");
			const Vec3 P = vector_of(inv, "P");
			const Vec3 J = vector_of(inv, "J");
			res["P_sq"] = std::abs(dot(P, P) - (Ln * Ln + mz->lambda * mz->lambda));
			res["J_sq_energy"] = std::abs(dot(J, J) - (2.0 * Ln * Ln * H + mz->mu * mz->mu));
			res["J_dot_P"] = std::abs(dot(J, P) - mz->lambda * mz->mu);
		}
		return res;
	}

	const DriftEntry& InvariantReport::entry(const std::string& name) const
	{
		for (const auto& e : entries)
			if (e.name == name)
				return e;
		raise(errc::bad_parameter, "no drift entry named " + name);
	}

	double InvariantReport::worst_rel() const
	{
		double w = 0.0;
		for (const auto& e : entries)
			w = std::max(w, e.max_rel_drift);
		return w;
	}

	InvariantReport drift_report(const ForceModel& m, const Trajectory& traj)
	{
		InvariantContext ctx = make_context(m, traj.state(0));
		InvariantReport rep;
		for (const auto& [name, value] : evaluate(m, traj.state(0), ctx))
			rep.entries.push_back({name, value, 0.0, 0.0});
		for (size_t i = 1; i < traj.size(); ++i)
		{
			// Stay on the integrator's own angle branch.
			ctx.last_theta = traj.angle(i);
			const InvariantSet cur = evaluate(m, traj.state(i), ctx);
			for (auto& e : rep.entries)
			{
				const double d = invariant_distance(cur.at(e.name), e.initial);
				e.max_abs_drift = std::max(e.max_abs_drift, d);
				e.max_rel_drift =
					std::max(e.max_rel_drift, d / std::max(invariant_norm(e.initial), 1e-12));
			}
		}
		return rep;
	}
}
