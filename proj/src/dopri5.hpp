#pragma once

// Dormand-Prince 5(4) embedded pair: nodes, stage coefficients, the
// fifth-minus-fourth order error weights and the quartic dense-output
// weights.  Shared by the trajectory integrator and the oscillator
// accumulators.

namespace orbitlab::dopri5
{
	inline constexpr double c2 = 1.0 / 5.0;
	inline constexpr double c3 = 3.0 / 10.0;
	inline constexpr double c4 = 4.0 / 5.0;
	inline constexpr double c5 = 8.0 / 9.0;

	inline constexpr double a21 = 1.0 / 5.0;
	inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
	inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
	inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0;
	inline constexpr double a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
	inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0;
	inline constexpr double a63 = 46732.0 / 5247.0;
	inline constexpr double a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
	inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0;
	inline constexpr double a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

	inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0;
	inline constexpr double e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

	inline constexpr double d1 = -12715105075.0 / 11282082432.0;
	inline constexpr double d3 = 87487479700.0 / 32700410799.0;
	inline constexpr double d4 = -10690763975.0 / 1880347072.0;
	inline constexpr double d5 = 701980252875.0 / 199316789632.0;
	inline constexpr double d6 = -1453857185.0 / 822651844.0;
	inline constexpr double d7 = 69997945.0 / 29380423.0;
}
