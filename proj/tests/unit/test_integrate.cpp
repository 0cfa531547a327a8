#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orbitlab/integrate.hpp"
#include "orbitlab/models.hpp"

#include <cmath>
#include <numbers>

using namespace orbitlab;

namespace
{
	constexpr double pi = std::numbers::pi;

	double max_abs(const Vec3& v)
	{
		return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
	}

	const PhaseState baseline{0.0, {1.0, 0.0, 0.0}, {0.0, 1.2, 0.0}};
	constexpr double baseline_period = 14.993320610381375;  // 2 pi (0.56)^(-3/2)

	double kepler_energy(const PhaseState& s)
	{
		return 0.5 * dot(s.v, s.v) - 1.0 / norm(s.r);
	}
}

TEST_CASE("free particle runs in a straight line")
{
	const ForceModel m = FLGR{parse("0", "r"), parse("0", "r")};
	IntegrationConfig cfg;
	cfg.t1 = 10.0;
	const Trajectory traj = integrate(m, {0.0, {0.0, 0.0, 0.5}, {1.0, 0.0, 0.0}}, cfg);
	CHECK(traj.size() >= 2);
	CHECK(traj.t_begin() == 0.0);
	CHECK(traj.t_end() == 10.0);
	for (size_t i = 0; i < traj.size(); ++i)
	{
		const PhaseState& s = traj.state(i);
		CHECK(std::abs(s.r.x - s.t) <= 1e-12 * (1.0 + s.t));
		CHECK(std::abs(s.r.y) <= 1e-12);
		CHECK(std::abs(s.r.z - 0.5) <= 1e-12);
	}
	const PhaseState mid = traj.state_at(3.7);
	CHECK(std::abs(mid.r.x - 3.7) <= 1e-12);
	CHECK(std::abs(mid.v.x - 1.0) <= 1e-12);
}

TEST_CASE("circular orbit closes after one period")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 2.0 * pi;
	const Trajectory traj = integrate(m, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}, cfg);
	const PhaseState& end = traj.state(traj.size() - 1);
	CHECK(max_abs(end.r - Vec3{1.0, 0.0, 0.0}) <= 1e-8);
	CHECK(max_abs(end.v - Vec3{0.0, 1.0, 0.0}) <= 1e-8);

	IntegrationConfig longer;
	longer.t1 = 10.0;
	const Trajectory arc = integrate(m, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}, longer);
	CHECK(find_period(arc) == doctest::Approx(2.0 * pi).epsilon(1e-9));
}

TEST_CASE("eccentric orbit period matches the closed form")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 16.0;
	const Trajectory traj = integrate(m, baseline, cfg);

	CHECK(kepler_energy(baseline) == doctest::Approx(-0.28).epsilon(1e-15));
	CHECK(find_period(traj) == doctest::Approx(baseline_period).epsilon(1e-8));
	CHECK(find_radial_period(traj) == doctest::Approx(baseline_period).epsilon(1e-8));

	double drift = 0.0;
	for (size_t i = 0; i < traj.size(); ++i)
		drift = std::max(drift, std::abs(kepler_energy(traj.state(i)) + 0.28));
	CHECK(drift <= 1e-9);
}

TEST_CASE("conservation holds over ten periods at tight tolerance")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.rel_tol = 1e-12;
	cfg.abs_tol = 1e-14;
	cfg.t1 = 10.0 * baseline_period;
	const Trajectory traj = integrate(m, baseline, cfg);

	double e_drift = 0.0, l_drift = 0.0;
	for (size_t i = 0; i < traj.size(); ++i)
	{
		const PhaseState& s = traj.state(i);
		e_drift = std::max(e_drift, std::abs(kepler_energy(s) + 0.28));
		l_drift = std::max(l_drift, std::abs(cross(s.r, s.v).z - 1.2));
	}
	CHECK(e_drift <= 1e-9);
	CHECK(l_drift <= 1e-9);
}

TEST_CASE("dense output interpolates to high order")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 16.0;
	const Trajectory traj = integrate(m, baseline, cfg);

	// Endpoints reproduce the stored samples.
	for (size_t i = 0; i < traj.size(); ++i)
	{
		const PhaseState got = traj.state_at(traj.state(i).t);
		CHECK(max_abs(got.r - traj.state(i).r) <= 1e-13 * (1.0 + norm(traj.state(i).r)));
		CHECK(max_abs(got.v - traj.state(i).v) <= 1e-13 * (1.0 + norm(traj.state(i).v)));
	}

	// Interior points agree with a much tighter reference run.
	IntegrationConfig tight;
	tight.rel_tol = 1e-13;
	tight.abs_tol = 1e-15;
	tight.t1 = 16.0;
	const Trajectory ref = integrate(m, baseline, tight);
	for (int k = 1; k < 20; ++k)
	{
		const double t = 16.0 * k / 20.0;
		CHECK(max_abs(traj.state_at(t).r - ref.state_at(t).r) <= 1e-8);
	}
}

TEST_CASE("reverse integration returns to the start")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 10.0;
	const Trajectory fwd = integrate(m, baseline, cfg);

	IntegrationConfig back;
	back.t0 = 10.0;
	back.t1 = 0.0;
	const Trajectory rev = integrate(m, fwd.state(fwd.size() - 1), back);
	const PhaseState& end = rev.state(rev.size() - 1);
	CHECK(end.t == 0.0);
	CHECK(max_abs(end.r - baseline.r) <= 1e-8);
	CHECK(max_abs(end.v - baseline.v) <= 1e-8);
}

TEST_CASE("inward spiral ends in step underflow")
{
	const ForceModel m = make_central_angle(parse("5*th+0.3", "th"));
	const PhaseState s0{0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
	IntegrationConfig cfg;
	cfg.t1 = 1000.0;

	try
	{
		integrate(m, s0, cfg);
		CHECK(false);
	}
	catch (const Error& e)
	{
		CHECK(e.code() == errc::step_underflow);
	}

	IntegrationConfig part = cfg;
	part.partial_on_underflow = true;
	const Trajectory traj = integrate(m, s0, part);
	CHECK(traj.termination() == Termination::step_underflow);
	CHECK(norm(traj.state(traj.size() - 1).r) < 0.2);
	// The angle keeps winding as the orbit spirals in.
	CHECK(traj.angle(traj.size() - 1) > 4.0 * pi);
}

TEST_CASE("step budget is enforced")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 100.0;
	cfg.max_steps = 10;
	try
	{
		integrate(m, baseline, cfg);
		CHECK(false);
	}
	catch (const Error& e)
	{
		CHECK(e.code() == errc::max_steps_exceeded);
	}
}

TEST_CASE("hyperbolic escape is not periodic")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 50.0;
	const Trajectory traj = integrate(m, {0.0, {1.0, 0.0, 0.0}, {0.0, 1.6, 0.0}}, cfg);
	CHECK(kepler_energy(traj.state(0)) > 0.0);
	CHECK_THROWS_AS(find_period(traj), Error);
	CHECK_THROWS_AS(find_radial_period(traj), Error);
}

TEST_CASE("angles unwrap continuously across turns")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.t1 = 2.0 * baseline_period;
	const Trajectory traj = integrate(m, baseline, cfg);

	for (size_t i = 0; i < traj.size(); ++i)
	{
		const double raw = std::atan2(traj.state(i).r.y, traj.state(i).r.x);
		const double winds = (traj.angle(i) - raw) / (2.0 * pi);
		CHECK(std::abs(winds - std::round(winds)) <= 1e-12);
		if (i > 0)
		{
			CHECK(traj.angle(i) > traj.angle(i - 1));
			CHECK(traj.angle(i) - traj.angle(i - 1) < pi);
		}
	}
	CHECK(traj.angle(traj.size() - 1) == doctest::Approx(4.0 * pi).epsilon(1e-8));

	// Dense angle agrees with the sampled ladder.
	for (double t = 0.25; t < 29.9; t += 0.5)
	{
		const double a = traj.angle_at(t);
		const double raw = std::atan2(traj.state_at(t).r.y, traj.state_at(t).r.x);
		const double winds = (a - raw) / (2.0 * pi);
		CHECK(std::abs(winds - std::round(winds)) <= 1e-10);
	}
}

TEST_CASE("configuration is validated")
{
	const ForceModel m = Kepler{1.0};
	IntegrationConfig cfg;
	cfg.rel_tol = 0.0;
	CHECK_THROWS_AS(integrate(m, baseline, cfg), Error);
	IntegrationConfig flat;
	flat.t1 = flat.t0;
	CHECK_THROWS_AS(integrate(m, baseline, flat), Error);
	IntegrationConfig nosteps;
	nosteps.t1 = 1.0;
	nosteps.max_steps = 0;
	CHECK_THROWS_AS(integrate(m, baseline, nosteps), Error);
}
