#pragma once

#include "numeric.hpp"
#include "param_var.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace parsched {

using Assignment = std::map<ParamVar, Rational>;

struct MissingAssignment : std::invalid_argument {
	explicit MissingAssignment(const ParamVar& v)
	: std::invalid_argument("no value assigned to " + to_string(v))
	{
	}
};

// Affine expression sum(coeff * var) + constant over exact rationals.
class LinearExpr {
public:
	LinearExpr() = default;
	LinearExpr(Rational constant) : constant_(std::move(constant)) {}
	LinearExpr(int constant) : constant_(constant) {}
	LinearExpr(const Integer& constant) : constant_(constant) {}

	static LinearExpr variable(ParamVar v, Rational coeff = 1)
	{
		LinearExpr e;
		if (coeff != 0)
			e.terms_.emplace(std::move(v), std::move(coeff));
		return e;
	}

	const std::map<ParamVar, Rational>& terms() const { return terms_; }
	const Rational& constant() const { return constant_; }
	bool is_constant() const { return terms_.empty(); }

	Rational coefficient(const ParamVar& v) const
	{
		auto it = terms_.find(v);
		return it == terms_.end() ? Rational(0) : it->second;
	}

	LinearExpr& operator+=(const LinearExpr& o)
	{
		for (const auto& [v, c] : o.terms_)
			add_term(v, c);
		constant_ += o.constant_;
		return *this;
	}

	LinearExpr& operator-=(const LinearExpr& o)
	{
		for (const auto& [v, c] : o.terms_)
			add_term(v, -c);
		constant_ -= o.constant_;
		return *this;
	}

	LinearExpr& operator*=(const Rational& k)
	{
		if (k == 0) {
			terms_.clear();
			constant_ = 0;
			return *this;
		}
		for (auto& [v, c] : terms_)
			c *= k;
		constant_ *= k;
		return *this;
	}

	friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
	friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
	friend LinearExpr operator*(LinearExpr a, const Rational& k) { return a *= k; }
	friend LinearExpr operator*(const Rational& k, LinearExpr a) { return a *= k; }
	friend LinearExpr operator*(LinearExpr a, const Integer& k) { return a *= Rational(k); }
	friend LinearExpr operator*(const Integer& k, LinearExpr a) { return a *= Rational(k); }
	friend LinearExpr operator-(LinearExpr a) { return a *= Rational(-1); }

	Rational evaluate(const Assignment& point) const
	{
		Rational sum = constant_;
		for (const auto& [v, c] : terms_) {
			auto it = point.find(v);
			if (it == point.end())
				throw MissingAssignment(v);
			sum += c * it->second;
		}
		return sum;
	}

	// Replaces assigned variables by their values; others are kept.
	LinearExpr substitute(const Assignment& partial) const
	{
		LinearExpr out(constant_);
		for (const auto& [v, c] : terms_) {
			auto it = partial.find(v);
			if (it == partial.end())
				out.terms_.emplace(v, c);
			else
				out.constant_ += c * it->second;
		}
		return out;
	}

private:
	void add_term(const ParamVar& v, const Rational& c)
	{
		auto [it, inserted] = terms_.try_emplace(v, c);
		if (!inserted) {
			it->second += c;
			if (it->second == 0)
				terms_.erase(it);
		}
	}

	std::map<ParamVar, Rational> terms_;
	Rational constant_ = 0;
};

enum class Relation : std::uint8_t { LE, EQ };

using Terms = std::vector<std::pair<ParamVar, Integer>>;

// sum(terms) <relation> bound, stored with coprime integer coefficients.
// A constraint without terms is a sentinel that is either trivially
// true (0 <= 0) or trivially false (0 <= -1).
class LinearConstraint {
public:
	LinearConstraint() = default;

	static LinearConstraint le(const LinearExpr& lhs, const LinearExpr& rhs)
	{
		return LinearConstraint(lhs - rhs, Relation::LE);
	}

	static LinearConstraint ge(const LinearExpr& lhs, const LinearExpr& rhs) { return le(rhs, lhs); }

	static LinearConstraint eq(const LinearExpr& lhs, const LinearExpr& rhs)
	{
		return LinearConstraint(lhs - rhs, Relation::EQ);
	}

	static LinearConstraint always() { return {}; }

	static LinearConstraint never()
	{
		LinearConstraint c;
		c.bound_ = -1;
		return c;
	}

	const Terms& terms() const { return terms_; }
	const Integer& bound() const { return bound_; }
	Relation relation() const { return relation_; }

	bool is_sentinel() const { return terms_.empty(); }
	bool is_always() const { return terms_.empty() && bound_ >= 0; }
	bool is_never() const { return terms_.empty() && bound_ < 0; }

	Integer coefficient(const ParamVar& v) const
	{
		auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
		                           [](const auto& t, const ParamVar& x) { return t.first < x; });
		return (it != terms_.end() && it->first == v) ? it->second : Integer(0);
	}

	bool mentions(const ParamVar& v) const { return coefficient(v) != 0; }

	// The left-hand side sum(terms) as an expression.
	LinearExpr lhs() const
	{
		LinearExpr e;
		for (const auto& [v, c] : terms_)
			e += LinearExpr::variable(v, Rational(c));
		return e;
	}

	bool satisfied_by(const Assignment& point) const
	{
		Rational value = lhs().evaluate(point);
		return relation_ == Relation::LE ? value <= bound_ : value == bound_;
	}

	LinearConstraint substitute(const Assignment& partial) const
	{
		return LinearConstraint(lhs().substitute(partial) - LinearExpr(bound_), relation_);
	}

	friend auto operator<=>(const LinearConstraint&, const LinearConstraint&) = default;
	friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;

private:
	// expr <relation> 0
	LinearConstraint(const LinearExpr& expr, Relation rel) : relation_(rel)
	{
		Integer scale = 1;
		for (const auto& [v, c] : expr.terms())
			scale = lcm(scale, boost::multiprecision::denominator(c));
		scale = lcm(scale, boost::multiprecision::denominator(expr.constant()));

		Integer g = 0;
		for (const auto& [v, c] : expr.terms()) {
			Integer n = boost::multiprecision::numerator(c) * (scale / boost::multiprecision::denominator(c));
			terms_.emplace_back(v, n);
			g = gcd(g, n);
		}
		const Rational& k = expr.constant();
		bound_ = -(boost::multiprecision::numerator(k) * (scale / boost::multiprecision::denominator(k)));

		if (terms_.empty()) {
			bool holds = rel == Relation::LE ? bound_ >= 0 : bound_ == 0;
			relation_ = Relation::LE;
			bound_ = holds ? 0 : -1;
			return;
		}
		g = gcd(g, bound_);
		if (g < 0)
			g = -g;
		if (g > 1) {
			for (auto& t : terms_)
				t.second /= g;
			bound_ /= g;
		}
		if (rel == Relation::EQ && terms_.front().second < 0) {
			for (auto& t : terms_)
				t.second = -t.second;
			bound_ = -bound_;
		}
	}

	Terms terms_;
	Integer bound_ = 0;
	Relation relation_ = Relation::LE;
};

inline std::string to_string(const LinearConstraint& c)
{
	if (c.is_sentinel())
		return c.is_always() ? "0 <= 0" : "0 <= -1";
	std::string s;
	for (std::size_t i = 0; i < c.terms().size(); ++i) {
		if (i)
			s += " + ";
		s += c.terms()[i].second.str() + "*" + to_string(c.terms()[i].first);
	}
	s += c.relation() == Relation::LE ? " <= " : " = ";
	s += c.bound().str();
	return s;
}

} // namespace parsched
