#pragma once

#include "linear.hpp"
#include "model.hpp"

#include <algorithm>
#include <compare>
#include <set>
#include <string>
#include <vector>

namespace parsched {

// Symbolic view of one task: fixed parameters become constants, free
// ones become variables.
struct TaskTerms {
	std::string id;
	Integer period = 1;
	Integer max_deadline = 1;
	LinearExpr cost;
	LinearExpr deadline;
	LinearExpr jitter;
	bool jitter_is_zero = false;
};

inline LinearExpr param_expr(const Param& p, ParamVar var)
{
	if (p.is_fixed())
		return LinearExpr(p.value());
	return LinearExpr::variable(std::move(var));
}

inline TaskTerms terms_of(const TaskSpec& t)
{
	TaskTerms out;
	out.id = t.id;
	out.period = t.period;
	out.max_deadline = t.max_deadline;
	out.cost = param_expr(t.cost, cost_var(t.id));
	out.deadline = param_expr(t.deadline, deadline_var(t.id));
	out.jitter = param_expr(t.jitter, jitter_var(t.id));
	out.jitter_is_zero = t.jitter.is_fixed() && t.jitter.value() == 0;
	return out;
}

// Interference job counts n_j, one per higher-priority task in
// descending priority order.
struct PointVector {
	std::vector<Integer> counts;

	friend auto operator<=>(const PointVector&, const PointVector&) = default;
	friend bool operator==(const PointVector&, const PointVector&) = default;
};

struct LevelContext {
	TaskTerms self;
	std::vector<TaskTerms> higher; // descending priority
	Integer deadline_horizon = 1;  // D_e2e for pipeline members, max_deadline otherwise
	Integer level_hyperperiod = 1;
	Integer jobs = 1; // number of jobs h_i checked
	bool jitter_shifted_points = false;
};

struct AnalysisOptions {
	// Adds the vectors ceil((k T_h + Dmax_h) / T_j) to the candidate set.
	bool jitter_shifted_points = false;
};

struct NPLevelContext : LevelContext {
	std::vector<TaskTerms> lower;
	Integer active_period_bound = 1; // max lower-priority period + level hyperperiod
};

namespace detail {

inline void fill_level(const SystemSpec& sys, const std::string& task_id, LevelContext& ctx,
                       std::vector<TaskTerms>* lower)
{
	const TaskSpec& self = sys.task(task_id);
	ctx.self = terms_of(self);
	ctx.level_hyperperiod = self.period;
	for (const TaskSpec* t : sys.tasks_on(self.resource)) {
		if (t->priority > self.priority) {
			ctx.higher.push_back(terms_of(*t));
			ctx.level_hyperperiod = lcm(ctx.level_hyperperiod, t->period);
		} else if (t->priority < self.priority && lower) {
			lower->push_back(terms_of(*t));
		}
	}
	if (auto slot = sys.slot_of(task_id))
		ctx.deadline_horizon = sys.pipelines()[slot->pipeline].e2e_deadline;
	else
		ctx.deadline_horizon = self.max_deadline;
}

} // namespace detail

inline LevelContext make_level_context(const SystemSpec& sys, const std::string& task_id,
                                       const AnalysisOptions& opts = {})
{
	LevelContext ctx;
	ctx.jitter_shifted_points = opts.jitter_shifted_points;
	detail::fill_level(sys, task_id, ctx, nullptr);
	// D <= Dmax <= T: every job ends before the next nominal release, so
	// the first job of the level busy period is the only one to check.
	const bool constrained = ctx.self.max_deadline <= ctx.self.period;
	ctx.jobs = constrained ? Integer(1) : ctx.level_hyperperiod / ctx.self.period;
	return ctx;
}

inline NPLevelContext make_np_level_context(const SystemSpec& sys, const std::string& task_id,
                                           const AnalysisOptions& opts = {})
{
	NPLevelContext ctx;
	ctx.jitter_shifted_points = opts.jitter_shifted_points;
	detail::fill_level(sys, task_id, ctx, &ctx.lower);
	Integer longest_lower = 0;
	for (const auto& t : ctx.lower)
		longest_lower = std::max(longest_lower, t.period);
	ctx.active_period_bound = longest_lower + ctx.level_hyperperiod;
	ctx.jobs = ceil_div(ctx.active_period_bound, ctx.self.period);
	return ctx;
}

// Candidate interference vectors for windows ending by time t, sorted and
// without duplicates:
//  - n_j = ceil(m / T_j) for every multiple m = k T_h <= t of a
//    higher-priority period, plus the first such multiple at or after t;
//    this is the complete set for zero jitter;
//  - with jitter_shifted_points, also n_j = ceil((k T_h + Dmax_h) / T_j)
//    for every k >= 1 with k T_h - Dmax_h <= t, h ranging over the
//    higher-priority tasks and the task itself; these leave room for
//    release jitter up to Dmax_h.
inline std::vector<PointVector> scheduling_points(const LevelContext& ctx, const Integer& t)
{
	if (ctx.higher.empty())
		return {PointVector{}};

	std::set<Integer> marks;
	Integer first_after = -1;
	for (const auto& h : ctx.higher) {
		for (Integer m = h.period; m <= t; m += h.period)
			marks.insert(m);
		Integer next = ceil_div(t, h.period) * h.period;
		if (next <= 0)
			next = h.period;
		if (first_after < 0 || next < first_after)
			first_after = next;
	}
	marks.insert(first_after);

	auto shifted = [&](const TaskTerms& h) {
		for (Integer k = 1; k * h.period - h.max_deadline <= t; ++k)
			marks.insert(k * h.period + h.max_deadline);
	};
	if (ctx.jitter_shifted_points) {
		for (const auto& h : ctx.higher)
			shifted(h);
		shifted(ctx.self);
	}

	std::set<PointVector> points;
	for (const auto& m : marks) {
		PointVector n;
		n.counts.reserve(ctx.higher.size());
		for (const auto& j : ctx.higher)
			n.counts.push_back(ceil_div(m, j.period));
		points.insert(std::move(n));
	}
	return {points.begin(), points.end()};
}

} // namespace parsched
