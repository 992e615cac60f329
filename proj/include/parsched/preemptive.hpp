#pragma once

#include "level_context.hpp"
#include "region.hpp"

namespace parsched {

// Conditions for the h-th job of the task in a busy window certified by
// interference counts n: the accumulated work h C_i + sum n_j C_j fits
// before every next higher-priority release (n_k T_k - J_k) and before
// the job's deadline measured from the first activation.
inline ConvexPolyhedron preemptive_job_conditions(const LevelContext& ctx, const Integer& h, const PointVector& n)
{
	LinearExpr work = ctx.self.cost * h;
	for (std::size_t j = 0; j < ctx.higher.size(); ++j)
		work += ctx.higher[j].cost * n.counts[j];

	ConvexPolyhedron p;
	for (std::size_t k = 0; k < ctx.higher.size(); ++k)
		p.add(LinearConstraint::le(work, LinearExpr(n.counts[k] * ctx.higher[k].period) - ctx.higher[k].jitter));
	p.add(LinearConstraint::le(work, LinearExpr((h - 1) * ctx.self.period) + ctx.self.deadline - ctx.self.jitter));
	p.add_witness({ctx.self.id, to_int64(h), n.counts});
	return p;
}

// Union over the candidate vectors for job h.
inline Region job_region_preemptive(const LevelContext& ctx, const Integer& h)
{
	Region r;
	for (const auto& n : scheduling_points(ctx, (h - 1) * ctx.self.period + ctx.deadline_horizon)) {
		ConvexPolyhedron p = preemptive_job_conditions(ctx, h, n);
		if (!p.is_syntactically_empty() && !is_empty(p))
			r.add(std::move(p));
	}
	return simplify(r);
}

// Parametric schedulability region of one task under preemptive fixed
// priority: every job h = 1..h_i needs one certificate.
inline Region task_region_preemptive(const LevelContext& ctx)
{
	Region r = Region::universe();
	for (Integer h = 1; h <= ctx.jobs; ++h) {
		r = simplify(intersect(r, job_region_preemptive(ctx, h)));
		if (r.has_no_disjuncts())
			break;
	}
	return r;
}

} // namespace parsched
