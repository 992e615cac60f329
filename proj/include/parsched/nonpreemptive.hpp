#pragma once

#include "level_context.hpp"
#include "region.hpp"

#include <stdexcept>

namespace parsched {

struct OverUtilization : std::domain_error {
	OverUtilization() : std::domain_error("level busy period exceeds its bound (over-utilization)") {}
};

namespace detail {

inline Integer fixed_cost(const TaskTerms& t)
{
	if (!t.cost.is_constant())
		throw std::invalid_argument("C of task '" + t.id + "' must be fixed");
	return floor(t.cost.constant());
}

} // namespace detail

// B_i = max over lower-priority tasks of (C_j - 1), and 0 without any.
inline Integer blocking_fixed(const NPLevelContext& ctx)
{
	Integer b = 0;
	for (const auto& t : ctx.lower)
		b = std::max(b, detail::fixed_cost(t) - 1);
	return b;
}

namespace detail {

// Sum of C_j / T_j over the given tasks, all C fixed.
inline Rational fixed_utilization(const TaskTerms& self, const std::vector<TaskTerms>& others, bool with_self)
{
	Rational u = with_self ? Rational(fixed_cost(self), self.period) : Rational(0);
	for (const auto& t : others)
		u += Rational(fixed_cost(t), t.period);
	return u;
}

} // namespace detail

// Longest level-i active period for fixed computation times: lowest
// fixed point of L = B + sum_{j <= i} ceil(L / T_j) C_j, from L = B + C_i.
// A fixed point exists iff the level utilization is below 1, or equal
// to 1 without blocking.
inline Integer active_period_fixed(const NPLevelContext& ctx)
{
	const auto cost = detail::fixed_cost;
	const Integer b = blocking_fixed(ctx);
	const Rational u = detail::fixed_utilization(ctx.self, ctx.higher, true);
	if (u > 1 || (u == 1 && b > 0))
		throw OverUtilization();
	Integer len = b + cost(ctx.self);
	for (;;) {
		Integer next = b + ceil_div(len, ctx.self.period) * cost(ctx.self);
		for (const auto& t : ctx.higher)
			next += ceil_div(len, t.period) * cost(t);
		if (next == len)
			return len;
		len = next;
	}
}

// Worst-case start time of job k (1-based) inside the active period:
// lowest fixed point of s = B + (k-1) C_i + sum_{j < i} (floor(s / T_j) + 1) C_j.
// The job's worst response is then s + C_i - (k-1) T_i.
inline Integer np_start_time_fixed(const Integer& k, const NPLevelContext& ctx)
{
	const auto cost = detail::fixed_cost;
	const Integer b = blocking_fixed(ctx);
	if (detail::fixed_utilization(ctx.self, ctx.higher, false) >= 1)
		throw OverUtilization();
	Integer s = b;
	for (const auto& t : ctx.higher)
		s += cost(t);
	for (;;) {
		Integer next = b + (k - 1) * cost(ctx.self);
		for (const auto& t : ctx.higher)
			next += (floor_div(s, t.period) + 1) * cost(t);
		if (next == s)
			return s;
		s = next;
	}
}

// Start-time conditions for job h certified by n, with the blocking term
// still symbolic: B >= 0, B >= C_j - 1 for each lower-priority j, the
// start S = B + (h-1) C_i + sum n_j C_j strictly before each next
// higher-priority release, and S + C_i within the job's deadline.
inline ConvexPolyhedron nonpreemptive_job_conditions(const NPLevelContext& ctx, const Integer& h, const PointVector& n)
{
	const LinearExpr blocking = LinearExpr::variable(blocking_var(ctx.self.id));
	LinearExpr start = blocking + ctx.self.cost * (h - 1);
	for (std::size_t j = 0; j < ctx.higher.size(); ++j)
		start += ctx.higher[j].cost * n.counts[j];

	ConvexPolyhedron p;
	p.add(LinearConstraint::ge(blocking, LinearExpr(0)));
	for (const auto& t : ctx.lower)
		p.add(LinearConstraint::ge(blocking, t.cost - LinearExpr(1)));
	for (std::size_t l = 0; l < ctx.higher.size(); ++l)
		p.add(LinearConstraint::le(start, LinearExpr(n.counts[l] * ctx.higher[l].period - 1) - ctx.higher[l].jitter));
	p.add(LinearConstraint::le(start, LinearExpr((h - 1) * ctx.self.period) + ctx.self.deadline - ctx.self.cost -
	                                      ctx.self.jitter));
	p.add_witness({ctx.self.id, to_int64(h), n.counts});
	return p;
}

inline Region job_region_nonpreemptive(const NPLevelContext& ctx, const Integer& h)
{
	const std::set<ParamVar> aux{blocking_var(ctx.self.id)};
	Region r;
	for (const auto& n : scheduling_points(ctx, (h - 1) * ctx.self.period + ctx.deadline_horizon)) {
		ConvexPolyhedron p = nonpreemptive_job_conditions(ctx, h, n);
		if (p.is_syntactically_empty())
			continue;
		ConvexPolyhedron q = eliminate(p, aux);
		if (!q.is_syntactically_empty())
			r.add(std::move(q));
	}
	return simplify(r);
}

// The level-i active period closes by Lbar: B + sum_{j <= i}
// ceil(Lbar / T_j) C_j <= Lbar with B >= C_j - 1 for the lower-priority
// tasks, blocking projected out. Without it a long active period would
// hold jobs past the ones checked.
inline ConvexPolyhedron active_period_closure(const NPLevelContext& ctx)
{
	const ParamVar bvar = blocking_var(ctx.self.id);
	const LinearExpr blocking = LinearExpr::variable(bvar);
	const Integer& bound = ctx.active_period_bound;
	LinearExpr demand = blocking + ctx.self.cost * ceil_div(bound, ctx.self.period);
	for (const auto& t : ctx.higher)
		demand += t.cost * ceil_div(bound, t.period);
	ConvexPolyhedron p;
	p.add(LinearConstraint::ge(blocking, LinearExpr(0)));
	for (const auto& t : ctx.lower)
		p.add(LinearConstraint::ge(blocking, t.cost - LinearExpr(1)));
	p.add(LinearConstraint::le(demand, LinearExpr(bound)));
	return eliminate(p, {bvar});
}

// Parametric schedulability region of one task on a non-preemptive
// fixed-priority resource: jobs h = 1..ceil(Lbar / T_i) each need one
// certificate; the blocking variable is projected out.
inline Region task_region_nonpreemptive(const NPLevelContext& ctx)
{
	Region r = Region::universe();
	for (Integer h = 1; h <= ctx.jobs; ++h) {
		r = simplify(intersect(r, job_region_nonpreemptive(ctx, h)));
		if (r.has_no_disjuncts())
			break;
	}
	return r;
}

} // namespace parsched
