#include "orbitlab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace orbitlab
{
	namespace
	{
		constexpr std::array<const char*, 7> func_names = {
			"sin", "cos", "tan", "exp", "log", "sqrt", "abs"};

		ExprPtr make_literal(double v)
		{
			auto n = std::make_shared<ExprNode>();
			n->kind = ExprKind::literal;
			n->value = v;
			return n;
		}

		ExprPtr make_variable()
		{
			auto n = std::make_shared<ExprNode>();
			n->kind = ExprKind::variable;
			return n;
		}

		ExprPtr make_node(ExprKind k, ExprPtr a, ExprPtr b = nullptr)
		{
			auto n = std::make_shared<ExprNode>();
			n->kind = k;
			n->a = std::move(a);
			n->b = std::move(b);
			return n;
		}

		ExprPtr make_call(ExprFunc f, ExprPtr a)
		{
			auto n = std::make_shared<ExprNode>();
			n->kind = ExprKind::call;
			n->func = f;
			n->a = std::move(a);
			return n;
		}

		bool is_literal(const ExprPtr& n, double v)
		{
			return n->kind == ExprKind::literal && n->value == v;
		}

		// Exactness probes: fold constants only when the double result is the
		// exact mathematical value, so emitted derivative text is reproducible.
		bool exact_add(double a, double b, double s) { return s - a == b && s - b == a; }
		bool exact_mul(double a, double b, double p) { return std::fma(a, b, -p) == 0.0; }
		bool exact_div(double a, double b, double q) { return b != 0.0 && std::fma(q, b, -a) == 0.0; }

		// Simplifying constructors.
		ExprPtr simp_add(ExprPtr a, ExprPtr b)
		{
			if (is_literal(a, 0.0)) return b;
			if (is_literal(b, 0.0)) return a;
			if (a->kind == ExprKind::literal && b->kind == ExprKind::literal)
			{
				const double s = a->value + b->value;
				if (std::isfinite(s) && exact_add(a->value, b->value, s)) return make_literal(s);
			}
			return make_node(ExprKind::add, std::move(a), std::move(b));
		}

		ExprPtr simp_neg(ExprPtr a)
		{
			if (a->kind == ExprKind::literal) return make_literal(-a->value);
			if (a->kind == ExprKind::neg) return a->a;
			return make_node(ExprKind::neg, std::move(a));
		}

		ExprPtr simp_sub(ExprPtr a, ExprPtr b)
		{
			if (is_literal(b, 0.0)) return a;
			if (is_literal(a, 0.0)) return simp_neg(std::move(b));
			if (a->kind == ExprKind::literal && b->kind == ExprKind::literal)
			{
				const double d = a->value - b->value;
				if (std::isfinite(d) && exact_add(d, b->value, a->value)) return make_literal(d);
			}
			return make_node(ExprKind::sub, std::move(a), std::move(b));
		}

		ExprPtr simp_mul(ExprPtr a, ExprPtr b)
		{
			if (is_literal(a, 0.0) || is_literal(b, 0.0)) return make_literal(0.0);
			if (is_literal(a, 1.0)) return b;
			if (is_literal(b, 1.0)) return a;
			if (a->kind == ExprKind::literal && b->kind == ExprKind::literal)
			{
				const double p = a->value * b->value;
				if (std::isfinite(p) && exact_mul(a->value, b->value, p)) return make_literal(p);
			}
			return make_node(ExprKind::mul, std::move(a), std::move(b));
		}

		ExprPtr simp_div(ExprPtr a, ExprPtr b)
		{
			if (is_literal(b, 1.0)) return a;
			if (a->kind == ExprKind::literal && b->kind == ExprKind::literal)
			{
				const double q = a->value / b->value;
				if (std::isfinite(q) && exact_div(a->value, b->value, q)) return make_literal(q);
			}
			return make_node(ExprKind::div, std::move(a), std::move(b));
		}

		ExprPtr simp_pow(ExprPtr a, ExprPtr b)
		{
			if (is_literal(b, 1.0)) return a;
			if (is_literal(b, 0.0)) return make_literal(1.0);
			return make_node(ExprKind::pow, std::move(a), std::move(b));
		}

		// ---- parser ----

		struct Parser
		{
			const std::string& text;
			const std::string& var;
			size_t pos = 0;

			void skip_ws()
			{
				while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
					++pos;
			}

			[[noreturn]] void fail(const std::string& what, size_t at)
			{
				raise(errc::syntax_error, what + " at offset " + std::to_string(at),
				      static_cast<long long>(at));
			}

			bool eat(char c)
			{
				skip_ws();
				if (pos < text.size() && text[pos] == c)
				{
					++pos;
					return true;
				}
				return false;
			}

			char peek()
			{
				skip_ws();
				return pos < text.size() ? text[pos] : '\0';
			}

			ExprPtr parse_expr()
			{
				ExprPtr lhs = parse_term();
				for (;;)
				{
					if (eat('+')) lhs = simp_add(std::move(lhs), parse_term());
					else if (eat('-')) lhs = simp_sub(std::move(lhs), parse_term());
					else return lhs;
				}
			}

			ExprPtr parse_term()
			{
				ExprPtr lhs = parse_unary();
				for (;;)
				{
					if (eat('*')) lhs = simp_mul(std::move(lhs), parse_unary());
					else if (eat('/')) lhs = simp_div(std::move(lhs), parse_unary());
					else return lhs;
				}
			}

			ExprPtr parse_unary()
			{
				if (eat('-')) return simp_neg(parse_unary());
				return parse_power();
			}

			ExprPtr parse_power()
			{
				ExprPtr base = parse_atom();
				if (eat('^')) return simp_pow(std::move(base), parse_unary());
				return base;
			}

			ExprPtr parse_atom()
			{
				skip_ws();
				if (pos >= text.size()) fail("unexpected end of input", pos);
				const char c = text[pos];

				if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
					return parse_number();

				if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
					return parse_name();

				if (c == '(')
				{
					++pos;
					ExprPtr inner = parse_expr();
					if (!eat(')')) fail("expected ')'", pos);
					return inner;
				}
				fail(std::string("unexpected character '") + c + "'", pos);
			}

			ExprPtr parse_number()
			{
				const size_t start = pos;
				while (pos < text.size() &&
				       (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
					++pos;
				if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E'))
				{
					size_t p = pos + 1;
					if (p < text.size() && (text[p] == '+' || text[p] == '-')) ++p;
					if (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p])))
					{
						pos = p;
						while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
							++pos;
					}
				}
				double v = 0.0;
				const auto res = std::from_chars(text.data() + start, text.data() + pos, v);
				if (res.ec != std::errc() || res.ptr != text.data() + pos)
					fail("malformed number", start);
				return make_literal(v);
			}

			ExprPtr parse_name()
			{
				const size_t start = pos;
				while (pos < text.size() &&
				       (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
					++pos;
				const std::string name = text.substr(start, pos - start);

				if (name == var) return make_variable();
				if (name == "pi") return make_literal(std::numbers::pi);

				for (size_t i = 0; i < func_names.size(); ++i)
				{
					if (name == func_names[i])
					{
						if (!eat('(')) fail("expected '(' after " + name, pos);
						ExprPtr arg = parse_expr();
						if (!eat(')')) fail("expected ')'", pos);
						return make_call(static_cast<ExprFunc>(i), std::move(arg));
					}
				}
				raise(errc::unknown_identifier, "unknown identifier '" + name + "'",
				      static_cast<long long>(start));
			}
		};

		// ---- evaluation ----

		double eval_node(const ExprNode& n, double x)
		{
			switch (n.kind)
			{
				case ExprKind::literal: return n.value;
				case ExprKind::variable: return x;
				case ExprKind::add: return eval_node(*n.a, x) + eval_node(*n.b, x);
				case ExprKind::sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
				case ExprKind::mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
				case ExprKind::div:
				{
					const double num = eval_node(*n.a, x), den = eval_node(*n.b, x);
					if (den == 0.0) raise(errc::domain_error, "division by zero");
					return num / den;
				}
				case ExprKind::pow:
				{
					const double base = eval_node(*n.a, x), expo = eval_node(*n.b, x);
					const double r = std::pow(base, expo);
					if (!std::isfinite(r))
						raise(errc::domain_error, "invalid power " + std::to_string(base) + "^" +
						                              std::to_string(expo));
					return r;
				}
				case ExprKind::neg: return -eval_node(*n.a, x);
				case ExprKind::call:
				{
					const double u = eval_node(*n.a, x);
					switch (n.func)
					{
						case ExprFunc::sin: return std::sin(u);
						case ExprFunc::cos: return std::cos(u);
						case ExprFunc::tan: return std::tan(u);
						case ExprFunc::exp:
						{
							const double r = std::exp(u);
							if (!std::isfinite(r)) raise(errc::domain_error, "exp overflow");
							return r;
						}
						case ExprFunc::log:
							if (u <= 0.0) raise(errc::domain_error, "log of non-positive value");
							return std::log(u);
						case ExprFunc::sqrt:
							if (u < 0.0) raise(errc::domain_error, "sqrt of negative value");
							return std::sqrt(u);
						case ExprFunc::abs: return std::abs(u);
					}
					break;
				}
			}
			raise(errc::domain_error, "malformed expression node");
		}

		// ---- differentiation ----

		ExprPtr diff_node(const ExprPtr& n)
		{
			switch (n->kind)
			{
				case ExprKind::literal: return make_literal(0.0);
				case ExprKind::variable: return make_literal(1.0);
				case ExprKind::add: return simp_add(diff_node(n->a), diff_node(n->b));
				case ExprKind::sub: return simp_sub(diff_node(n->a), diff_node(n->b));
				case ExprKind::mul:
					return simp_add(simp_mul(diff_node(n->a), n->b), simp_mul(n->a, diff_node(n->b)));
				case ExprKind::div:
					return simp_div(
						simp_sub(simp_mul(diff_node(n->a), n->b), simp_mul(n->a, diff_node(n->b))),
						simp_pow(n->b, make_literal(2.0)));
				case ExprKind::pow:
					if (n->b->kind == ExprKind::literal)
					{
						// c * a^(c-1) * a'
						const double c = n->b->value;
						return simp_mul(
							simp_mul(make_literal(c), simp_pow(n->a, make_literal(c - 1.0))),
							diff_node(n->a));
					}
					// a^b * (b' log a + b a'/a)
					return simp_mul(
						simp_pow(n->a, n->b),
						simp_add(simp_mul(diff_node(n->b), make_call(ExprFunc::log, n->a)),
						         simp_div(simp_mul(n->b, diff_node(n->a)), n->a)));
				case ExprKind::neg: return simp_neg(diff_node(n->a));
				case ExprKind::call:
				{
					ExprPtr inner = diff_node(n->a);
					switch (n->func)
					{
						case ExprFunc::sin:
							return simp_mul(make_call(ExprFunc::cos, n->a), std::move(inner));
						case ExprFunc::cos:
							return simp_neg(simp_mul(make_call(ExprFunc::sin, n->a), std::move(inner)));
						case ExprFunc::tan:
							return simp_div(std::move(inner),
							                simp_pow(make_call(ExprFunc::cos, n->a), make_literal(2.0)));
						case ExprFunc::exp:
							return simp_mul(make_call(ExprFunc::exp, n->a), std::move(inner));
						case ExprFunc::log: return simp_div(std::move(inner), n->a);
						case ExprFunc::sqrt:
							return simp_div(std::move(inner),
							                simp_mul(make_literal(2.0), make_call(ExprFunc::sqrt, n->a)));
						case ExprFunc::abs:
							// u u'/abs(u): the sign away from 0, DomainError at 0.
							return simp_div(simp_mul(n->a, std::move(inner)),
							                make_call(ExprFunc::abs, n->a));
					}
					break;
				}
			}
			raise(errc::domain_error, "malformed expression node");
		}

		// ---- printing ----

		// Binding strength used to decide parenthesization.
		int prec(const ExprNode& n)
		{
			switch (n.kind)
			{
				case ExprKind::add:
				case ExprKind::sub: return 1;
				case ExprKind::mul:
				case ExprKind::div: return 2;
				case ExprKind::neg: return 3;
				case ExprKind::pow: return 4;
				default: return 5;
			}
		}

		std::string literal_text(double v)
		{
			if (v == std::numbers::pi) return "pi";
			char buf[32];
			const auto res = std::to_chars(buf, buf + sizeof buf, v);
			return std::string(buf, res.ptr);
		}

		void print_node(const ExprNode& n, std::string& out)
		{
			auto child = [&out](const ExprNode& c, int min_prec) {
				if (prec(c) < min_prec || (c.kind == ExprKind::literal && c.value < 0.0 && min_prec > 1))
				{
					out += '(';
					print_node(c, out);
					out += ')';
				}
				else
					print_node(c, out);
			};

			switch (n.kind)
			{
				case ExprKind::literal: out += literal_text(n.value); return;
				case ExprKind::variable: out += "@"; return;  // patched by caller
				case ExprKind::add:
					child(*n.a, 1);
					out += '+';
					child(*n.b, 2);
					return;
				case ExprKind::sub:
					child(*n.a, 1);
					out += '-';
					child(*n.b, 2);
					return;
				case ExprKind::mul:
					child(*n.a, 2);
					out += '*';
					child(*n.b, 3);
					return;
				case ExprKind::div:
					child(*n.a, 2);
					out += '/';
					child(*n.b, 3);
					return;
				case ExprKind::neg:
					out += '-';
					child(*n.a, 3);
					return;
				case ExprKind::pow:
					child(*n.a, 5);
					out += '^';
					// Exponent position accepts unary minus directly.
					if (prec(*n.b) == 3 || prec(*n.b) == 5 || prec(*n.b) == 4)
						print_node(*n.b, out);
					else
					{
						out += '(';
						print_node(*n.b, out);
						out += ')';
					}
					return;
				case ExprKind::call:
					out += func_names[static_cast<size_t>(n.func)];
					out += '(';
					print_node(*n.a, out);
					out += ')';
					return;
			}
		}

		bool equal_node(const ExprPtr& x, const ExprPtr& y)
		{
			if (x == y) return true;
			if (!x || !y) return false;
			if (x->kind != y->kind) return false;
			switch (x->kind)
			{
				case ExprKind::literal:
					return x->value == y->value || (std::isnan(x->value) && std::isnan(y->value));
				case ExprKind::variable: return true;
				case ExprKind::call:
					return x->func == y->func && equal_node(x->a, y->a);
				case ExprKind::neg: return equal_node(x->a, y->a);
				default: return equal_node(x->a, y->a) && equal_node(x->b, y->b);
			}
		}
	}

	Expr parse(const std::string& text, const std::string& var)
	{
		Parser p{text, var};
		p.skip_ws();
		if (p.pos >= text.size()) p.fail("empty expression", 0);
		ExprPtr root = p.parse_expr();
		p.skip_ws();
		if (p.pos < text.size()) p.fail("trailing input", p.pos);
		return Expr(std::move(root), var);
	}

	double eval(const Expr& e, double value)
	{
		if (!e) raise(errc::domain_error, "empty expression");
		return eval_node(*e.root(), value);
	}

	Expr diff(const Expr& e)
	{
		if (!e) raise(errc::domain_error, "empty expression");
		return Expr(diff_node(e.root()), e.var());
	}

	std::string to_string(const Expr& e)
	{
		if (!e) return "";
		std::string out;
		print_node(*e.root(), out);
		// Substitute the recorded variable name for the placeholder.
		std::string final_out;
		final_out.reserve(out.size() + 8);
		for (char c : out)
		{
			if (c == '@') final_out += e.var();
			else final_out += c;
		}
		return final_out;
	}

	bool equal(const Expr& x, const Expr& y)
	{
		return equal_node(x.root(), y.root());
	}
}
