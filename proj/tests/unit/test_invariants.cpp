#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orbitlab/integrate.hpp"
#include "orbitlab/invariants.hpp"
#include "orbitlab/models.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

using namespace orbitlab;

namespace
{
	constexpr double pi = std::numbers::pi;

	std::mt19937 rng(271828);

	double uniform(double lo, double hi)
	{
		return std::uniform_real_distribution<double>(lo, hi)(rng);
	}

	// Counterclockwise in-plane state with a mostly transverse velocity, so
	// every planar family stays clear of collision over a few characteristic
	// times.
	PhaseState planar_state()
	{
		const double th = uniform(0.0, 2.0 * pi);
		const double r = uniform(0.8, 1.6);
		const Vec3 rhat{std::cos(th), std::sin(th), 0.0};
		const Vec3 thhat{-std::sin(th), std::cos(th), 0.0};
		return {uniform(0.0, 3.0), r * rhat,
		        uniform(-0.25, 0.25) * rhat + uniform(0.8, 1.1) * thhat};
	}

	PhaseState spatial_state()
	{
		for (;;)
		{
			Vec3 r{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
			if (norm(r) < 0.3)
				continue;
			r = (uniform(0.8, 1.6) / norm(r)) * r;
			const Vec3 v{uniform(-0.9, 0.9), uniform(-0.9, 0.9), uniform(-0.9, 0.9)};
			if (norm(v) < 0.4 || norm(cross(r, v)) < 0.3)
				continue;
			return {uniform(0.0, 3.0), r, v};
		}
	}

	Trajectory short_run(const ForceModel& m, const PhaseState& s0, double spans = 5.0)
	{
		IntegrationConfig cfg;
		cfg.rel_tol = 1e-12;
		cfg.abs_tol = 1e-14;
		cfg.t0 = s0.t;
		cfg.t1 = s0.t + spans * norm(s0.r) / norm(s0.v);
		cfg.partial_on_underflow = true;
		return integrate(m, s0, cfg);
	}

	// Every advertised first integral of the family must hold along
	// accurately integrated arcs from random states.
	void battery(const ForceModel& m, const char* label, int states = 20)
	{
		for (int i = 0; i < states; ++i)
		{
			CAPTURE(label);
			CAPTURE(i);
			const PhaseState s0 = is_planar(m) ? planar_state() : spatial_state();
			const Trajectory traj = short_run(m, s0);
			for (const auto& e : drift_report(m, traj).entries)
			{
				CAPTURE(e.name);
				CHECK(e.max_rel_drift <= 1e-8);
			}
		}
	}

	void relation_residuals(const ForceModel& m, const PhaseState& s0, double tol)
	{
		InvariantContext ctx = make_context(m, s0);
		for (const auto& [name, residual] : relations_check(m, evaluate(m, s0, ctx)))
		{
			CAPTURE(name);
			CHECK(residual <= tol);
		}
	}

	// Relations evaluated at the far end of an arc that shares the anchor's
	// context, so accumulated quantities enter with nontrivial values.
	void relation_residuals_along(const ForceModel& m, const PhaseState& s0, double tol)
	{
		InvariantContext ctx = make_context(m, s0);
		const Trajectory traj = short_run(m, s0);
		(void)evaluate(m, traj.state(0), ctx);
		ctx.last_theta = traj.angle(traj.size() - 1);
		for (const auto& [name, residual] :
		     relations_check(m, evaluate(m, traj.state(traj.size() - 1), ctx)))
		{
			CAPTURE(name);
			CHECK(residual <= tol);
		}
	}

	template <typename F>
	std::optional<errc> code_of(F&& f)
	{
		try
		{
			std::forward<F>(f)();
		}
		catch (const Error& e)
		{
			return e.code();
		}
		return std::nullopt;
	}

	double half_angle_shell_invariant(const HamiltonianAngle& m, const PhaseState& s, double theta)
	{
		const double r = norm(s.r);
		const double pr = dot(s.r, s.v) / r;
		const double pth = cross(s.r, s.v).z;
		const double half = 0.5 * (theta - m.beta);
		return pr * m.alpha * std::sqrt(r) * std::sin(half) +
		       pth * m.alpha * std::cos(half) / std::sqrt(r);
	}
}

TEST_CASE("inverse square invariants at a reference state")
{
	const ForceModel m = Kepler{1.0};
	const InvariantSet inv = evaluate(m, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.2, 0.0}});

	const Vec3 L = std::get<Vec3>(inv.at("L"));
	CHECK(L.x == 0.0);
	CHECK(L.y == 0.0);
	CHECK(L.z == doctest::Approx(1.2).epsilon(1e-15));

	CHECK(std::get<double>(inv.at("E")) == doctest::Approx(-0.28).epsilon(1e-14));

	const Vec3 J = std::get<Vec3>(inv.at("J"));
	CHECK(J.x == doctest::Approx(0.44).epsilon(1e-14));
	CHECK(std::abs(J.y) <= 1e-15);
	CHECK(std::abs(J.z) <= 1e-15);

	const Vec3 K = std::get<Vec3>(inv.at("K"));
	CHECK(std::abs(K.x) <= 1e-15);
	CHECK(K.y == doctest::Approx(1.2 - 1.0 / 1.2).epsilon(1e-14));
	CHECK(std::abs(K.z) <= 1e-15);

	// circular data annihilate the eccentric vector
	const InvariantSet circ = evaluate(m, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
	CHECK(norm(std::get<Vec3>(circ.at("J"))) <= 1e-15);
}

TEST_CASE("hamilton vector pairs with the eccentric vector for the inverse square law")
{
	const ForceModel m = Kepler{1.0};
	for (int i = 0; i < 20; ++i)
	{
		CAPTURE(i);
		const InvariantSet inv = evaluate(m, spatial_state());
		const Vec3 L = std::get<Vec3>(inv.at("L"));
		const Vec3 J = std::get<Vec3>(inv.at("J"));
		const Vec3 K = std::get<Vec3>(inv.at("K"));
		CHECK(norm(K - cross(L, J) / dot(L, L)) <= 1e-12);
	}
}

TEST_CASE("oscillator pair closed forms")
{
	// silent source never moves off the rest solution
	const ZPair rest = z_pair(parse("0", "th"), 0.0, 5.0);
	CHECK(rest.z == 0.0);
	CHECK(rest.zprime == 0.0);

	// constant source c: z = c (1 - cos), z' = c sin
	const double c = 1.3 / 0.9;
	const Expr cv = parse("1.3/0.9", "th");
	for (double th : {0.4, 1.7, 5.0, -2.0})
	{
		CAPTURE(th);
		const ZPair zp = z_pair(cv, 0.4, th);
		CHECK(std::abs(zp.z - c * (1.0 - std::cos(th - 0.4))) <= 1e-11);
		CHECK(std::abs(zp.zprime - c * std::sin(th - 0.4)) <= 1e-11);
	}

	// linear ramp (a (th - th0) + b) / ell
	const double a = 0.3, b = 0.7, ell = 1.1;
	const Expr ramp = parse("(0.3*(th-0.2)+0.7)/1.1", "th");
	for (double th : {0.2, 2.5, 7.0})
	{
		CAPTURE(th);
		const double u = th - 0.2;
		const ZPair zp = z_pair(ramp, 0.2, th);
		CHECK(std::abs(zp.z - (a / ell * (u - std::sin(u)) + b / ell * (1.0 - std::cos(u)))) <=
		      1e-11);
		CHECK(std::abs(zp.zprime - (a / ell * (1.0 - std::cos(u)) + b / ell * std::sin(u))) <=
		      1e-11);
	}
}

TEST_CASE("oscillator accumulator matches the convolution solution")
{
	const char* sources[] = {
		"1",          "0.5+0.1*th",     "sin(th)",  "0.3*cos(2*th)+1", "exp(-0.2*th)",
		"1/(1+0.1*th)", "th*exp(-0.5*th)", "0.2*th^2", "sin(th)*cos(th)", "2/(2+sin(th))",
	};
	for (const char* src : sources)
	{
		CAPTURE(src);
		const Expr v = parse(src, "th");
		for (double th : {2.2, 4.0 * pi})
		{
			CAPTURE(th);
			const ZPair ivp = z_pair(v, 0.0, th);
			const ZPair conv = z_pair_convolution(v, 0.0, th);
			CHECK(std::abs(ivp.z - conv.z) <= 1e-10 * std::max(1.0, std::abs(conv.z)));
			CHECK(std::abs(ivp.zprime - conv.zprime) <=
			      1e-10 * std::max(1.0, std::abs(conv.zprime)));
		}
	}

	// walking backward from the anchor works too
	const Expr v = parse("1/(1+0.1*th)", "th");
	const ZPair ivp = z_pair(v, 0.0, -pi);
	const ZPair conv = z_pair_convolution(v, 0.0, -pi);
	CHECK(std::abs(ivp.z - conv.z) <= 1e-10);
	CHECK(std::abs(ivp.zprime - conv.zprime) <= 1e-10);

	// incremental context queries agree with fresh one-shot evaluations
	const ForceModel ca = make_central_angle(parse("1+0.2*sin(th)", "th"));
	const PhaseState s0{0.0, {1.0, 0.0, 0.0}, {0.0, 1.1, 0.0}};
	InvariantContext ctx = make_context(ca, s0);
	const Trajectory traj = short_run(ca, s0, 8.0);
	for (size_t i = 1; i < traj.size(); i += 7)
	{
		ctx.last_theta = traj.angle(i);
		const InvariantSet step = evaluate(ca, traj.state(i), ctx);
		InvariantContext fresh = make_context(ca, s0);
		fresh.last_theta = traj.angle(i);
		const InvariantSet shot = evaluate(ca, traj.state(i), fresh);
		CHECK(invariant_distance(step.at("K"), shot.at("K")) <= 1e-10);
		CHECK(invariant_distance(step.at("J"), shot.at("J")) <= 1e-10);
	}
}

TEST_CASE("advertised invariants hold along integrated arcs")
{
	battery(Kepler{1.0}, "inverse square");
	battery(make_central_angle(parse("1+0.2*sin(th)", "th")), "angle-modulated strength");
	battery(make_time_dependent(parse("1+0.1*t^2", "t"), parse("1", "th")),
	        "scaled clock, constant source");
	battery(make_time_dependent(parse("2+0.3*sin(t)", "t"), parse("1+0.3*cos(th)", "th")),
	        "scaled clock, modulated source");
	battery(make_direction_only(parse("1+0.1*cos(th)", "th"), parse("0.1*sin(th)", "th")),
	        "direction-only force");
	battery(HamiltonianAngle{1.0, 0.3, 0.4}, "half-angle potential");
	battery(Drag{DragKind::inverse_square, 0.02, 1.0, 0.0, 0.0, 0.0}, "drag: inverse square");
	battery(Drag{DragKind::cosine, 0.0, 1.0, 0.05, 0.02, 0.0}, "drag: cosine");
	battery(Drag{DragKind::cosine_over_l, 0.0, 1.0, 0.04, 0.01, 0.0}, "drag: cosine over momentum");
	battery(Drag{DragKind::exponential, 0.0, 1.0, 0.1, 0.0, 0.0}, "drag: exponential thrust");
	battery(make_kepler_orbit_family(parse("0.8/r^2.5", "r")), "conic family");
	battery(PowerLaw{1.0, -1.0}, "power law, alpha = -1");
	battery(PowerLaw{1.0, 1.0}, "power law, alpha = +1");
	battery(make_magnitude_conserved(parse("0.2*r", "r"), 1.0), "gyroscopic, linear gain");
	battery(make_magnitude_conserved(parse("-0.3/r", "r"), 1.0), "gyroscopic, inverse gain");
	battery(FLGR{parse("0.3/r^3", "r"), parse("1/r^4", "r")}, "magnetic-profile gyroscopic");
	battery(MICZ{0.3, 1.0}, "dyon");
	battery(Monopole{1.5}, "monopole");
}

TEST_CASE("half-angle family keeps its shell invariant only at zero energy")
{
	const HamiltonianAngle fam{1.0, 0.3, 0.0};
	const ForceModel m = fam;
	IntegrationConfig cfg;
	cfg.rel_tol = 1e-12;
	cfg.abs_tol = 1e-14;
	cfg.t1 = 6.0;

	const PhaseState shell{0.0, {1.0, 0.0, 0.0}, {std::sqrt(1.16), 1.2, 0.0}};
	CHECK(std::abs(std::get<double>(evaluate(m, shell).at("H"))) <= 1e-14);

	const Trajectory tz = integrate(m, shell, cfg);
	const double i0 = half_angle_shell_invariant(fam, tz.state(0), tz.angle(0));
	CHECK(i0 == doctest::Approx(0.36).epsilon(1e-12));
	double worst = 0.0;
	for (size_t i = 1; i < tz.size(); ++i)
		worst = std::max(worst, std::abs(half_angle_shell_invariant(fam, tz.state(i),
		                                                            tz.angle(i)) -
		                                 i0));
	CHECK(worst <= 1e-8);

	// off the zero-energy shell the same expression is no longer conserved
	const PhaseState off{0.0, {1.0, 0.0, 0.0}, {0.3, 1.2, 0.0}};
	const Trajectory tn = integrate(m, off, cfg);
	const double j0 = half_angle_shell_invariant(fam, tn.state(0), tn.angle(0));
	double drift = 0.0;
	for (size_t i = 1; i < tn.size(); ++i)
		drift = std::max(drift, std::abs(half_angle_shell_invariant(fam, tn.state(i),
		                                                            tn.angle(i)) -
		                                 j0));
	CHECK(drift > 1e-3);
}

TEST_CASE("transverse-force angular momentum profile")
{
	// a silent transverse force keeps the anchor momentum
	const DirectionOnly still = make_direction_only(parse("1.3", "th"), parse("0", "th"));
	CHECK(l_of_theta(still, 1.2, 0.3, 0.0, 3.0) == doctest::Approx(1.2).epsilon(1e-14));

	// quadrature profile against the momentum observed along an arc
	const DirectionOnly m = make_direction_only(parse("1", "th"), parse("0.1*sin(2*th)", "th"));
	const PhaseState s0{0.0, {1.0, 0.0, 0.0}, {0.0, 1.2, 0.0}};
	IntegrationConfig cfg;
	cfg.rel_tol = 1e-12;
	cfg.abs_tol = 1e-14;
	cfg.t1 = 6.0;
	const Trajectory traj = integrate(ForceModel{m}, s0, cfg);
	const double J = 1.2 * 1.2 / 1.0 - 1.0;  // apse anchor: L0^2/r0 - U(theta0)
	for (size_t i = 0; i < traj.size(); i += 5)
	{
		CAPTURE(i);
		const PhaseState& s = traj.state(i);
		const double want = norm(cross(s.r, s.v));
		CHECK(l_of_theta(m, 1.2, J, 0.0, traj.angle(i)) ==
		      doctest::Approx(want).epsilon(1e-8));
	}

	// the quadrature refuses orbits whose denominator closes
	const DirectionOnly thin = make_direction_only(parse("0.2", "th"), parse("0.1*sin(th)", "th"));
	CHECK(code_of([&] { l_of_theta(thin, 1.2, 0.44, 0.0, pi); }) == errc::singular_orbit);
	CHECK(code_of([&] { l_of_theta(m, 0.0, 0.44, 0.0, 1.0); }) == errc::bad_parameter);
	CHECK(code_of([&] { l_of_theta(m, -1.0, 0.44, 0.0, 1.0); }) == errc::bad_parameter);
}

TEST_CASE("closed-form oscillator pair for linearly decaying angular momentum")
{
	// coincident endpoints sit at the rest solution
	const ZPair same = danby_z(1.0, 0.01, 1.0, 0.3, 0.3);
	CHECK(same.z == 0.0);
	CHECK(std::abs(same.zprime) <= 1e-18);

	// against the convolution of the matching source
	{
		const ZPair ref = z_pair_convolution(parse("1/(1-0.01*th)^2", "th"), 0.0, 0.5 * pi);
		const ZPair zp = danby_z(1.0, 0.01, 1.0, 0.0, 0.5 * pi);
		CHECK(std::abs(zp.z - ref.z) <= 1e-9);
		CHECK(std::abs(zp.zprime - ref.zprime) <= 1e-9);
	}

	// long arc against the incremental solver
	{
		const ZPair ref = z_pair(parse("1/(1.5-0.02*th)^2", "th"), 0.1, 3.0 * pi);
		const ZPair zp = danby_z(1.5, 0.02, 1.0, 0.1, 3.0 * pi);
		CHECK(std::abs(zp.z - ref.z) <= 1e-9);
		CHECK(std::abs(zp.zprime - ref.zprime) <= 1e-9);
	}

	// a vanishing decay rate approaches the constant-source pair
	{
		const ZPair zp = danby_z(1.0, 1e-8, 1.0, 0.0, 2.0);
		CHECK(std::abs(zp.z - (1.0 - std::cos(2.0))) <= 1e-5);
		CHECK(std::abs(zp.zprime - std::sin(2.0)) <= 1e-5);
	}

	CHECK(code_of([] { danby_z(1.0, 0.0, 1.0, 0.0, 1.0); }) == errc::bad_parameter);
	CHECK(code_of([] { danby_z(1.0, 1.0, 1.0, 0.0, 2.0); }) == errc::bad_parameter);
}

TEST_CASE("pointwise relations among evaluated invariants")
{
	// inverse square: every residual at generic states
	relation_residuals(Kepler{1.0}, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.2, 0.0}}, 1e-13);
	for (int i = 0; i < 5; ++i)
	{
		CAPTURE(i);
		relation_residuals(Kepler{1.0}, spatial_state(), 1e-12);
		relation_residuals(MICZ{0.5, 1.0}, spatial_state(), 1e-12);
		relation_residuals(PowerLaw{1.0, -1.0}, planar_state(), 1e-12);
		relation_residuals(make_magnitude_conserved(parse("0.2*r", "r"), 1.0), spatial_state(),
		                   1e-12);
	}

	// dyon: the transverse dot product fixes the product of the charges
	const InvariantSet dyon = evaluate(MICZ{0.5, 1.0}, spatial_state());
	CHECK(dot(std::get<Vec3>(dyon.at("J")), std::get<Vec3>(dyon.at("P"))) ==
	      doctest::Approx(0.5).epsilon(1e-12));

	// the accumulated pairs keep their vector pairings along arcs
	relation_residuals_along(make_central_angle(parse("1+0.2*sin(th)", "th")), planar_state(),
	                         1e-10);
	relation_residuals_along(make_time_dependent(parse("1+0.1*t^2", "t"), parse("1", "th")),
	                         planar_state(), 1e-10);
	relation_residuals_along(Drag{DragKind::inverse_square, 0.02, 1.0, 0.0, 0.0, 0.0},
	                         planar_state(), 1e-10);
	relation_residuals(make_direction_only(parse("1+0.1*cos(th)", "th"), parse("0.1*sin(th)", "th")),
	                   planar_state(), 1e-12);

	// conic family: the scalar pairings hold for apse-anchored contexts
	const ForceModel kof = make_kepler_orbit_family(parse("0.8/r^2.5", "r"));
	relation_residuals(kof, {0.0, {1.0, 0.0, 0.0}, {0.0, 0.9, 0.0}}, 1e-12);
	relation_residuals(kof, {0.0, {0.0, 1.3, 0.0}, {-0.7, 0.0, 0.0}}, 1e-12);
	relation_residuals_along(kof, {0.0, {1.0, 0.0, 0.0}, {0.0, 0.9, 0.0}}, 1e-8);
	// ... and are anchor-sensitive: a radially moving anchor breaks them
	const InvariantSet skew = evaluate(kof, {0.0, {1.0, 0.0, 0.0}, {0.3, 0.9, 0.0}});
	CHECK(relations_check(kof, skew).at("energy_amplitude") > 1e-4);

	// half-angle family: quadratic closure off the zero-energy shell
	relation_residuals(HamiltonianAngle{1.0, 0.3, 0.4},
	                   {0.0, {1.1, 0.3, 0.0}, {-0.2, 0.95, 0.0}}, 1e-9);
	// ... and the planar relation on it
	const InvariantSet shell = evaluate(HamiltonianAngle{1.0, 0.3, 0.0},
	                                    {0.0, {1.0, 0.0, 0.0}, {std::sqrt(1.16), 1.2, 0.0}});
	const auto rel = relations_check(HamiltonianAngle{1.0, 0.3, 0.0}, shell);
	CHECK(rel.count("zero_energy_plane") == 1);
	CHECK(rel.at("zero_energy_plane") <= 1e-12);
}

TEST_CASE("drift reports over long arcs")
{
	// ten revolutions of a moderately eccentric inverse-square orbit
	const ForceModel kepler = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.rel_tol = 1e-12;
	cfg.abs_tol = 1e-14;
	cfg.t1 = 150.0;
	const Trajectory traj = integrate(kepler, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.2, 0.0}}, cfg);
	const InvariantReport rep = drift_report(kepler, traj);
	for (const char* name : {"E", "L", "J", "K"})
	{
		CAPTURE(name);
		CHECK(rep.entry(name).max_rel_drift <= 1e-9);
	}
	CHECK(rep.worst_rel() <= 1e-9);
	CHECK(code_of([&] { rep.entry("nope"); }) == errc::bad_parameter);

	// dyon invariants over a bound spatial orbit
	const ForceModel dyon = MICZ{0.3, 1.0};
	cfg.t1 = 40.0;
	const Trajectory td = integrate(dyon, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.3}}, cfg);
	const InvariantReport rd = drift_report(dyon, td);
	for (const char* name : {"P", "J", "H", "L_norm"})
	{
		CAPTURE(name);
		CHECK(rd.entry(name).max_rel_drift <= 1e-9);
	}
}

TEST_CASE("invariant evaluation error paths")
{
	// silent angular source leaves the velocity as the conserved pair
	const ForceModel silent = make_central_angle(parse("0", "th"));
	const PhaseState s{0.0, {1.1, 0.2, 0.0}, {-0.1, 0.9, 0.0}};
	const InvariantSet inv = evaluate(silent, s);
	CHECK(invariant_distance(inv.at("K"), InvariantValue{s.v}) <= 1e-15);

	// radial data carry no angular momentum to divide by
	CHECK(code_of([] {
		      evaluate(Kepler{1.0}, {0.0, {1.0, 0.0, 0.0}, {0.4, 0.0, 0.0}});
	      }) == errc::zero_angular_momentum);
	CHECK(code_of([] {
		      make_context(Drag{DragKind::inverse_square, 0.02, 1.0, 0.0, 0.0, 0.0},
		                   {0.0, {1.0, 0.0, 0.0}, {0.4, 0.0, 0.0}});
	      }) == errc::zero_angular_momentum);

	// states inside the collision guard are rejected
	CHECK(code_of([] {
		      evaluate(Kepler{1.0}, {0.0, {1e-11, 0.0, 0.0}, {0.0, 1.0, 0.0}});
	      }) == errc::zero_radius);

	// a vanishing clock scale has no invariant frame
	CHECK(code_of([] {
		      evaluate(make_time_dependent(parse("t", "t"), parse("1", "th")),
		               {0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
	      }) == errc::domain_error);

	// the conic family needs a positive strength
	CHECK(code_of([] {
		      evaluate(make_kepler_orbit_family(parse("-1", "r")),
		               {0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
	      }) == errc::domain_error);

	// scalar and vector invariants never compare
	CHECK(code_of([] {
		      invariant_distance(InvariantValue{1.0}, InvariantValue{Vec3{1.0, 0.0, 0.0}});
	      }) == errc::bad_parameter);
}
