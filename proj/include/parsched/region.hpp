#pragma once

#include "lp.hpp"
#include "polyhedron.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parsched {

struct EmptyRegion : std::domain_error {
	EmptyRegion() : std::domain_error("region is empty") {}
};

// Finite union of convex polyhedra; no disjuncts means the empty set.
class Region {
public:
	Region() = default;
	explicit Region(ConvexPolyhedron p) { add(std::move(p)); }
	explicit Region(std::vector<ConvexPolyhedron> ps)
	{
		for (auto& p : ps)
			add(std::move(p));
	}

	static Region universe() { return Region(ConvexPolyhedron{}); }

	const std::vector<ConvexPolyhedron>& disjuncts() const { return disjuncts_; }
	std::size_t size() const { return disjuncts_.size(); }
	bool has_no_disjuncts() const { return disjuncts_.empty(); }

	void add(ConvexPolyhedron p)
	{
		if (!p.is_syntactically_empty())
			disjuncts_.push_back(std::move(p));
	}

	std::set<ParamVar> variables() const
	{
		std::set<ParamVar> vars;
		for (const auto& d : disjuncts_)
			for (const auto& c : d.constraints())
				for (const auto& t : c.terms())
					vars.insert(t.first);
		return vars;
	}

private:
	std::vector<ConvexPolyhedron> disjuncts_;
};

struct Interval {
	std::optional<Rational> lo; // nullopt: unbounded below
	std::optional<Rational> hi; // nullopt: unbounded above
	bool lo_attained = false;
	bool hi_attained = false;
};

inline bool is_empty(const ConvexPolyhedron& p) { return !lp::feasible(p); }

inline bool is_empty(const Region& r)
{
	return std::all_of(r.disjuncts().begin(), r.disjuncts().end(),
	                   [](const ConvexPolyhedron& p) { return is_empty(p); });
}

namespace detail {

inline bool implied_by(const ConvexPolyhedron& p, const LinearConstraint& c)
{
	const LinearExpr lhs = c.lhs();
	auto hi = lp::maximize(p, lhs);
	if (hi.status != lp::Status::Optimal || hi.value > c.bound())
		return false;
	if (c.relation() == Relation::EQ) {
		auto lo = lp::minimize(p, lhs);
		return lo.status == lp::Status::Optimal && lo.value >= c.bound();
	}
	return true;
}

inline bool syntactically_implied(const ConvexPolyhedron& p, const LinearConstraint& c)
{
	for (const auto& d : p.constraints()) {
		if (d.terms() != c.terms())
			continue;
		if (c.relation() == Relation::LE)
			return d.bound() <= c.bound();
		return d.relation() == Relation::EQ && d.bound() == c.bound();
	}
	return false;
}

} // namespace detail

// Drops every constraint implied by the remaining ones. An infeasible
// polyhedron normalizes to the empty sentinel.
inline ConvexPolyhedron normalize(const ConvexPolyhedron& p)
{
	if (is_empty(p))
		return ConvexPolyhedron::empty_set();
	std::vector<LinearConstraint> kept = p.constraints();
	for (std::size_t i = 0; i < kept.size();) {
		std::vector<LinearConstraint> rest;
		rest.reserve(kept.size() - 1);
		for (std::size_t j = 0; j < kept.size(); ++j)
			if (j != i)
				rest.push_back(kept[j]);
		if (detail::implied_by(ConvexPolyhedron(rest), kept[i]))
			kept = std::move(rest);
		else
			++i;
	}
	ConvexPolyhedron out(kept);
	out.set_provenance(p.provenance());
	return out;
}

// True when inner is a subset of outer.
inline bool subsumes(const ConvexPolyhedron& outer, const ConvexPolyhedron& inner)
{
	if (inner.is_syntactically_empty())
		return true;
	const auto inner_vars = inner.variables();
	for (const auto& c : outer.constraints())
		for (const auto& t : c.terms())
			if (!inner_vars.count(t.first))
				return is_empty(inner);
	for (const auto& c : outer.constraints()) {
		if (detail::syntactically_implied(inner, c))
			continue;
		if (!detail::implied_by(inner, c))
			return is_empty(inner);
	}
	return true;
}

// Normalizes every disjunct, drops empty ones and those contained in
// another disjunct. The point set is unchanged.
inline Region simplify(const Region& r)
{
	std::vector<ConvexPolyhedron> kept;
	for (const auto& d : r.disjuncts()) {
		ConvexPolyhedron n = normalize(d);
		if (n.is_syntactically_empty())
			continue;
		if (std::find(kept.begin(), kept.end(), n) != kept.end())
			continue;
		bool covered = false;
		for (const auto& k : kept) {
			if (subsumes(k, n)) {
				covered = true;
				break;
			}
		}
		if (covered)
			continue;
		std::erase_if(kept, [&](const ConvexPolyhedron& k) { return subsumes(n, k); });
		kept.push_back(std::move(n));
	}
	return Region(std::move(kept));
}

// Pairwise conjunction of disjuncts, pruning the infeasible ones.
inline Region intersect(const Region& a, const Region& b)
{
	Region out;
	for (const auto& p : a.disjuncts()) {
		for (const auto& q : b.disjuncts()) {
			ConvexPolyhedron pq = p.conjoin(q);
			if (!pq.is_syntactically_empty() && !is_empty(pq))
				out.add(std::move(pq));
		}
	}
	return out;
}

namespace detail {

inline LinearExpr slack_form(const LinearConstraint& c) { return c.lhs() - LinearExpr(c.bound()); }

// Projects out one variable: substitution through an equality when one
// mentions it, Fourier-Motzkin combination otherwise.
inline ConvexPolyhedron eliminate_one(const ConvexPolyhedron& p, const ParamVar& x)
{
	const auto& cs = p.constraints();
	for (const auto& e : cs) {
		const Integer a = e.coefficient(x);
		if (e.relation() != Relation::EQ || a == 0)
			continue;
		// x = (bound - rest) / a
		LinearExpr value = LinearExpr(e.bound()) - (e.lhs() - LinearExpr::variable(x, Rational(a)));
		value *= Rational(1) / Rational(a);
		ConvexPolyhedron out;
		for (const auto& c : cs) {
			if (&c == &e)
				continue;
			const Integer k = c.coefficient(x);
			if (k == 0) {
				out.add(c);
				continue;
			}
			LinearExpr lhs = c.lhs() - LinearExpr::variable(x, Rational(k)) + value * Rational(k);
			out.add(c.relation() == Relation::LE ? LinearConstraint::le(lhs, LinearExpr(c.bound()))
			                                     : LinearConstraint::eq(lhs, LinearExpr(c.bound())));
		}
		out.set_provenance(p.provenance());
		return out;
	}

	std::vector<const LinearConstraint*> pos, neg;
	ConvexPolyhedron out;
	for (const auto& c : cs) {
		const Integer k = c.coefficient(x);
		if (k > 0)
			pos.push_back(&c);
		else if (k < 0)
			neg.push_back(&c);
		else
			out.add(c);
	}
	for (const auto* up : pos) {
		const Rational a(up->coefficient(x));
		const LinearExpr su = slack_form(*up);
		for (const auto* lo : neg) {
			const Rational b(-lo->coefficient(x));
			out.add(LinearConstraint::le(su * b + slack_form(*lo) * a, LinearExpr(0)));
		}
	}
	out.set_provenance(p.provenance());
	return out;
}

inline std::size_t elimination_cost(const ConvexPolyhedron& p, const ParamVar& x)
{
	std::size_t pos = 0, neg = 0;
	for (const auto& c : p.constraints()) {
		const Integer k = c.coefficient(x);
		if (k == 0)
			continue;
		if (c.relation() == Relation::EQ)
			return 0;
		(k > 0 ? pos : neg) += 1;
	}
	return pos * neg;
}

} // namespace detail

// Exact projection of p onto the variables not in vars. The variable with
// the fewest generated pairs goes first; redundant constraints are dropped
// after every step.
inline ConvexPolyhedron eliminate(const ConvexPolyhedron& p, const std::set<ParamVar>& vars)
{
	ConvexPolyhedron cur = normalize(p);
	std::set<ParamVar> todo;
	for (const auto& v : cur.variables())
		if (vars.count(v))
			todo.insert(v);
	while (!todo.empty() && !cur.is_syntactically_empty()) {
		auto best = todo.begin();
		std::size_t best_cost = detail::elimination_cost(cur, *best);
		for (auto it = std::next(todo.begin()); it != todo.end(); ++it) {
			std::size_t cost = detail::elimination_cost(cur, *it);
			if (cost < best_cost) {
				best = it;
				best_cost = cost;
			}
		}
		cur = normalize(detail::eliminate_one(cur, *best));
		todo.erase(best);
		std::erase_if(todo, [&](const ParamVar& v) { return !cur.mentions(v); });
	}
	return cur;
}

// Projection distributes over union: each disjunct is projected on its own.
inline Region eliminate(const Region& r, const std::set<ParamVar>& vars)
{
	Region out;
	for (const auto& d : r.disjuncts()) {
		ConvexPolyhedron e = eliminate(d, vars);
		if (e.is_syntactically_empty())
			continue;
		if (std::find(out.disjuncts().begin(), out.disjuncts().end(), e) != out.disjuncts().end())
			continue;
		out.add(std::move(e));
	}
	return out;
}

inline bool contains(const Region& r, const Assignment& point)
{
	for (const auto& v : r.variables())
		if (!point.count(v))
			throw MissingAssignment(v);
	return std::any_of(r.disjuncts().begin(), r.disjuncts().end(),
	                   [&](const ConvexPolyhedron& p) { return p.contains(point); });
}

inline Region substitute(const Region& r, const Assignment& partial)
{
	Region out;
	for (const auto& d : r.disjuncts())
		out.add(d.substitute(partial));
	return out;
}

// Exact infimum and supremum of v over r. Polyhedra are closed, so every
// finite endpoint is attained.
inline Interval var_interval(const Region& r, const ParamVar& v)
{
	Interval out;
	bool any = false;
	bool unbounded_lo = false, unbounded_hi = false;
	const LinearExpr x = LinearExpr::variable(v);
	for (const auto& d : r.disjuncts()) {
		auto lo = lp::minimize(d, x);
		if (lo.status == lp::Status::Infeasible)
			continue;
		any = true;
		if (lo.status == lp::Status::Unbounded)
			unbounded_lo = true;
		else if (!out.lo || lo.value < *out.lo)
			out.lo = lo.value;
		auto hi = lp::maximize(d, x);
		if (hi.status == lp::Status::Unbounded)
			unbounded_hi = true;
		else if (!out.hi || hi.value > *out.hi)
			out.hi = hi.value;
	}
	if (!any)
		throw EmptyRegion();
	if (unbounded_lo)
		out.lo.reset();
	if (unbounded_hi)
		out.hi.reset();
	out.lo_attained = out.lo.has_value();
	out.hi_attained = out.hi.has_value();
	return out;
}

} // namespace parsched
