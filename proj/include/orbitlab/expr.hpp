#pragma once

#include <memory>
#include <string>

#include "orbitlab/error.hpp"

namespace orbitlab
{
	// Scalar functions of one variable: literals, the free variable, + - * / ^,
	// unary -, sin cos tan exp log sqrt abs, and the constant pi.
	enum class ExprKind
	{
		literal,
		variable,
		add,
		sub,
		mul,
		div,
		pow,
		neg,
		call,
	};

	enum class ExprFunc
	{
		sin,
		cos,
		tan,
		exp,
		log,
		sqrt,
		abs,
	};

	struct ExprNode;
	using ExprPtr = std::shared_ptr<const ExprNode>;

	struct ExprNode
	{
		ExprKind kind;
		double value = 0.0;                 // literal
		ExprFunc func = ExprFunc::sin;      // call
		ExprPtr a;                          // left / only child
		ExprPtr b;                          // right child
	};

	// Immutable expression handle; all operations are pure.
	class Expr
	{
	public:
		Expr() = default;
		Expr(ExprPtr root, std::string var) : root_(std::move(root)), var_(std::move(var)) {}

		const ExprPtr& root() const { return root_; }
		const std::string& var() const { return var_; }
		explicit operator bool() const { return static_cast<bool>(root_); }

	private:
		ExprPtr root_;
		std::string var_;
	};

	// Parses text with standard precedence (^ > unary- > * / > + -), left
	// associativity except ^ which is right associative.  Raises SyntaxError
	// carrying the byte offset of the offending token, or UnknownIdentifier
	// for names other than var, pi, and the function names.
	Expr parse(const std::string& text, const std::string& var);

	// IEEE double evaluation; raises DomainError on log of non-positive,
	// sqrt of negative, division by zero, and invalid powers.
	double eval(const Expr& e, double value);

	// Exact symbolic derivative with basic simplification (0*x -> 0,
	// x+0 -> x, 1*x -> x, x^1 -> x, folding of exact constant arithmetic).
	// abs differentiates to u*u'/abs(u), which raises DomainError at u = 0.
	Expr diff(const Expr& e);

	// Grammar text that reparses to a structurally equal expression.
	std::string to_string(const Expr& e);

	// Structural equality of the simplified trees.
	bool equal(const Expr& x, const Expr& y);
}
