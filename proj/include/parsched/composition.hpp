#pragma once

#include "nonpreemptive.hpp"
#include "preemptive.hpp"

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace parsched {

// Schedulability region of a whole system, kept as a conjunction of
// blocks: one union of polyhedra per task, followed by single-constraint
// blocks for the pipeline precedences and the trivial bounds. The point
// set is the intersection of all blocks; flatten() materializes it.
struct SystemRegion {
	std::vector<Region> blocks;
	std::map<ParamVar, std::size_t> var_index; // every free parameter

	bool contains(const Assignment& point) const
	{
		for (const auto& [v, col] : var_index)
			if (!point.count(v))
				throw MissingAssignment(v);
		for (const auto& b : blocks)
			if (!parsched::contains(b, point))
				return false;
		return true;
	}

	// Resource blocks first, constraint blocks last, simplified as it goes.
	Region flatten() const
	{
		Region r = Region::universe();
		for (const auto& b : blocks) {
			r = intersect(r, b);
			if (b.size() > 1 || r.size() > 1)
				r = simplify(r);
			if (r.has_no_disjuncts())
				break;
		}
		return simplify(r);
	}
};

namespace detail {

inline void add_constraint_block(SystemRegion& sr, const LinearConstraint& c)
{
	if (c.is_always())
		return;
	ConvexPolyhedron p;
	p.add(c);
	sr.blocks.emplace_back(std::move(p));
}

} // namespace detail

inline SystemRegion build_system_region(const SystemSpec& sys, const AnalysisOptions& opts = {})
{
	SystemRegion sr;
	std::size_t col = 0;
	for (const auto& t : sys.tasks()) {
		if (t.cost.is_free())
			sr.var_index.emplace(cost_var(t.id), col++);
		if (t.deadline.is_free())
			sr.var_index.emplace(deadline_var(t.id), col++);
		if (t.jitter.is_free())
			sr.var_index.emplace(jitter_var(t.id), col++);
	}

	for (const auto& res : sys.resources()) {
		for (const TaskSpec* t : sys.tasks_on(res.id)) {
			if (res.policy == Policy::PreemptiveFP)
				sr.blocks.push_back(task_region_preemptive(make_level_context(sys, t->id, opts)));
			else {
				const NPLevelContext ctx = make_np_level_context(sys, t->id, opts);
				sr.blocks.push_back(task_region_nonpreemptive(ctx));
				ConvexPolyhedron closure = active_period_closure(ctx);
				if (!closure.constraints().empty() || closure.is_syntactically_empty())
					sr.blocks.emplace_back(std::vector<ConvexPolyhedron>{std::move(closure)});
			}
		}
	}

	for (const auto& pl : sys.pipelines()) {
		const auto first = terms_of(sys.task(pl.tasks.front()));
		detail::add_constraint_block(sr, LinearConstraint::eq(first.jitter, LinearExpr(0)));
		for (std::size_t k = 0; k + 1 < pl.tasks.size(); ++k) {
			const auto cur = terms_of(sys.task(pl.tasks[k]));
			const auto next = terms_of(sys.task(pl.tasks[k + 1]));
			detail::add_constraint_block(sr, LinearConstraint::le(cur.deadline, next.jitter));
		}
		const auto last = terms_of(sys.task(pl.tasks.back()));
		detail::add_constraint_block(sr, LinearConstraint::le(last.deadline, LinearExpr(pl.e2e_deadline)));
	}

	for (const auto& t : sys.tasks()) {
		const auto tt = terms_of(t);
		detail::add_constraint_block(sr, LinearConstraint::ge(tt.cost, LinearExpr(0)));
		detail::add_constraint_block(sr, LinearConstraint::ge(tt.jitter, LinearExpr(0)));
		detail::add_constraint_block(sr, LinearConstraint::ge(tt.deadline, LinearExpr(0)));
		detail::add_constraint_block(sr, LinearConstraint::le(tt.deadline, LinearExpr(t.max_deadline)));
	}
	return sr;
}

namespace detail {

inline std::size_t saturating_mul(std::size_t a, std::size_t b)
{
	if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
		return std::numeric_limits<std::size_t>::max();
	return a * b;
}

} // namespace detail

// Projects the system region onto keep. The other variables are
// existentially quantified: a kept point is in the result iff some value
// of the eliminated deadlines, jitters and computation times satisfies
// every block. Blocks are merged only when they share the variable being
// eliminated, cheapest merge first, so the full product of disjuncts is
// never formed unless the variables force it.
inline Region schedulability_slice(const SystemRegion& sr, const std::set<ParamVar>& keep)
{
	std::vector<Region> blocks = sr.blocks;
	auto block_vars = [](const Region& r) { return r.variables(); };

	for (;;) {
		std::map<ParamVar, std::vector<std::size_t>> users;
		for (std::size_t i = 0; i < blocks.size(); ++i)
			for (const auto& v : block_vars(blocks[i]))
				if (!keep.count(v))
					users[v].push_back(i);
		if (users.empty())
			break;

		const ParamVar* best = nullptr;
		std::size_t best_cost = 0;
		for (const auto& [v, idx] : users) {
			std::size_t cost = 1;
			for (auto i : idx)
				cost = detail::saturating_mul(cost, blocks[i].size());
			if (!best || cost < best_cost || (cost == best_cost && idx.size() < users.at(*best).size())) {
				best = &v;
				best_cost = cost;
			}
		}

		const auto& chosen = users.at(*best);
		Region merged = Region::universe();
		for (auto i : chosen) {
			merged = intersect(merged, blocks[i]);
			if (blocks[i].size() > 1)
				merged = simplify(merged);
		}
		std::vector<Region> rest;
		for (std::size_t i = 0; i < blocks.size(); ++i)
			if (std::find(chosen.begin(), chosen.end(), i) == chosen.end())
				rest.push_back(std::move(blocks[i]));

		// Every non-kept variable confined to the merged block goes now.
		std::set<ParamVar> outside;
		for (const auto& r : rest)
			for (const auto& v : block_vars(r))
				outside.insert(v);
		std::set<ParamVar> local;
		for (const auto& v : merged.variables())
			if (!keep.count(v) && !outside.count(v))
				local.insert(v);

		merged = simplify(eliminate(merged, local));
		if (merged.has_no_disjuncts())
			return Region{};
		rest.push_back(std::move(merged));
		blocks = std::move(rest);
	}

	Region r = Region::universe();
	for (const auto& b : blocks) {
		r = intersect(r, b);
		if (b.size() > 1 || r.size() > 1)
			r = simplify(r);
		if (r.has_no_disjuncts())
			return r;
	}
	return simplify(r);
}

// Smallest admissible deadline variable of a task over the region: its
// worst-case response-time bound.
inline Rational wcrt_bound(const SystemRegion& sr, const std::string& task)
{
	const ParamVar d = deadline_var(task);
	if (!sr.var_index.count(d))
		throw std::invalid_argument("D of task '" + task + "' is not free");
	Interval iv = var_interval(schedulability_slice(sr, {d}), d);
	return *iv.lo;
}

} // namespace parsched
