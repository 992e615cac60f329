#pragma once

// Builders, random generators and independent reference computations
// shared by the test suites. The references never call into the region
// code: they work on plain integers.

#include <parsched/composition.hpp>
#include <parsched/point.hpp>
#include <parsched/simulator.hpp>
#include <parsched/system_io.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

using namespace parsched;

inline std::string fixture_path(const std::string& name) { return std::string(PARSCHED_FIXTURES) + "/" + name; }

inline SystemSpec load_fixture(const std::string& name)
{
	std::ifstream in(fixture_path(name));
	std::stringstream buf;
	buf << in.rdbuf();
	return parse_system(buf.str());
}

// Compact task description for building systems in code.
struct T {
	std::string id;
	std::string resource;
	std::int64_t period;
	std::int64_t priority;
	std::int64_t max_deadline;
	std::optional<std::int64_t> cost; // nullopt: free
	std::optional<std::int64_t> deadline = std::nullopt;
	std::optional<std::int64_t> jitter = 0;
};

inline Param param(const std::optional<std::int64_t>& v) { return v ? Param::fixed(*v) : Param::free(); }

inline SystemSpec make_system(const std::vector<std::pair<std::string, Policy>>& resources, const std::vector<T>& tasks,
                              const std::vector<PipelineSpec>& pipelines = {})
{
	std::vector<ResourceSpec> rs;
	for (const auto& [id, pol] : resources)
		rs.push_back({id, pol});
	std::vector<TaskSpec> ts;
	for (const auto& t : tasks)
		ts.push_back({t.id, t.resource, t.period, t.priority, t.max_deadline, param(t.cost), param(t.deadline),
		              param(t.jitter)});
	return SystemSpec(std::move(rs), std::move(ts), pipelines);
}

inline ConcretePoint point(std::initializer_list<std::pair<const char*, std::int64_t>> values)
{
	ConcretePoint pt;
	for (const auto& [name, v] : values)
		pt.emplace(*parse_param_var(name), Rational(v));
	return pt;
}

// ---------------------------------------------------------------------
// Reference computations on plain integers.

struct FixedTask {
	std::int64_t cost;
	std::int64_t period;
};

// Classic response-time recurrence R = C_i + sum ceil(R / T_j) C_j for
// the first job of a task after a synchronous release; nullopt when R
// exceeds limit.
inline std::optional<std::int64_t> rta(const FixedTask& self, const std::vector<FixedTask>& higher, std::int64_t limit)
{
	std::int64_t r = self.cost;
	for (const auto& h : higher)
		r += h.cost;
	if (r == 0)
		return 0;
	for (;;) {
		std::int64_t next = self.cost;
		for (const auto& h : higher)
			next += (r + h.period - 1) / h.period * h.cost;
		if (next == r)
			return r;
		if (next > limit)
			return std::nullopt;
		r = next;
	}
}

// Completion of job h (1-based) of a task released with its higher-
// priority tasks at 0: smallest t >= 1 with h C_i + sum ceil(t/T_j) C_j <= t
// and t > (h-1) T_i, scanned tick by tick.
inline std::optional<std::int64_t> job_completion_scan(std::int64_t h, const FixedTask& self,
                                                       const std::vector<FixedTask>& higher, std::int64_t limit)
{
	for (std::int64_t t = (h - 1) * self.period + 1; t <= limit; ++t) {
		std::int64_t demand = h * self.cost;
		for (const auto& j : higher)
			demand += (t + j.period - 1) / j.period * j.cost;
		if (demand <= t)
			return t;
	}
	return std::nullopt;
}

// All vectors (ceil(t/T_j))_j for integer t from 1 up to the first
// higher-priority release at or after horizon.
inline std::set<std::vector<std::int64_t>> interference_vectors_scan(const std::vector<std::int64_t>& periods,
                                                                     std::int64_t horizon)
{
	std::set<std::vector<std::int64_t>> out;
	if (periods.empty()) {
		out.insert(std::vector<std::int64_t>{});
		return out;
	}
	std::int64_t closing = INT64_MAX;
	for (auto p : periods)
		closing = std::min(closing, (std::max<std::int64_t>(horizon, 1) + p - 1) / p * p);
	for (std::int64_t t = 1; t <= closing; ++t) {
		std::vector<std::int64_t> n;
		for (auto p : periods)
			n.push_back((t + p - 1) / p);
		out.insert(n);
	}
	return out;
}

// Smallest schedulable deadline of every task at a fixed computation-time
// point, found as the least fixed point of the holistic iteration: start
// with J = 0, compute each task's least D from the jitters of the others,
// propagate D into the successor's J, repeat. The per-task least D uses
// the same job and interference-vector ranges as the region builder but
// evaluates them on integers. Returns nullopt when the system has no
// admissible D/J, i.e. when it is outside the region.
class HolisticOracle {
public:
	HolisticOracle(const SystemSpec& sys, const ConcretePoint& pt) : sys_(sys)
	{
		for (const auto& t : sys.tasks()) {
			Info info;
			info.cost = t.cost.is_fixed() ? to_int64(t.cost.value())
			                              : to_int64(boost::multiprecision::numerator(pt.at(cost_var(t.id))));
			info.fixed_deadline = t.deadline.is_fixed() ? std::optional<std::int64_t>(to_int64(t.deadline.value()))
			                                            : std::nullopt;
			info.fixed_jitter = t.jitter.is_fixed() ? std::optional<std::int64_t>(to_int64(t.jitter.value()))
			                                        : std::nullopt;
			info_.emplace(t.id, info);
		}
	}

	std::optional<std::map<std::string, std::int64_t>> least_deadlines() const
	{
		std::map<std::string, std::int64_t> jitter, deadline;
		for (const auto& t : sys_.tasks())
			jitter[t.id] = info_.at(t.id).fixed_jitter.value_or(0);
		for (int round = 0; round < 10000; ++round) {
			bool changed = false;
			for (const auto& t : sys_.tasks()) {
				auto d = least_deadline(t, jitter);
				if (!d)
					return std::nullopt;
				const auto& fixed = info_.at(t.id).fixed_deadline;
				if (fixed) {
					if (*d > *fixed)
						return std::nullopt;
					*d = *fixed; // a fixed D is what the successor sees
				}
				if (*d > to_int64(t.max_deadline))
					return std::nullopt;
				deadline[t.id] = *d;
			}
			for (const auto& pl : sys_.pipelines()) {
				if (info_.at(pl.tasks.front()).fixed_jitter.value_or(0) != 0)
					return std::nullopt;
				for (std::size_t k = 0; k + 1 < pl.tasks.size(); ++k) {
					const auto& next = pl.tasks[k + 1];
					const std::int64_t need = deadline[pl.tasks[k]];
					const auto& fj = info_.at(next).fixed_jitter;
					if (fj) {
						if (*fj < need)
							return std::nullopt;
						continue;
					}
					if (jitter[next] < need) {
						jitter[next] = need;
						changed = true;
					}
				}
				if (deadline[pl.tasks.back()] > to_int64(pl.e2e_deadline))
					return std::nullopt;
			}
			if (!changed)
				return deadline;
		}
		return std::nullopt;
	}

private:
	struct Info {
		std::int64_t cost = 0;
		std::optional<std::int64_t> fixed_deadline;
		std::optional<std::int64_t> fixed_jitter;
	};

	std::int64_t horizon_of(const TaskSpec& t) const
	{
		if (auto slot = sys_.slot_of(t.id))
			return to_int64(sys_.pipelines()[slot->pipeline].e2e_deadline);
		return to_int64(t.max_deadline);
	}

	std::optional<std::int64_t> least_deadline(const TaskSpec& self, const std::map<std::string, std::int64_t>& jitter) const
	{
		std::vector<const TaskSpec*> hp, lp;
		std::int64_t level_h = to_int64(self.period);
		for (const auto& t : sys_.tasks()) {
			if (t.resource != self.resource || t.id == self.id)
				continue;
			if (t.priority > self.priority) {
				hp.push_back(&t);
				level_h = std::lcm(level_h, to_int64(t.period));
			} else {
				lp.push_back(&t);
			}
		}
		std::sort(hp.begin(), hp.end(), [](auto* a, auto* b) { return a->priority > b->priority; });
		const bool np = sys_.resource(self.resource).policy == Policy::NonPreemptiveFP;
		const std::int64_t ti = to_int64(self.period);
		const std::int64_t ci = info_.at(self.id).cost;
		const std::int64_t ji = jitter.at(self.id);

		std::int64_t jobs = 1;
		std::int64_t blocking = 0;
		if (np) {
			std::int64_t longest = 0;
			for (auto* t : lp) {
				longest = std::max(longest, to_int64(t->period));
				blocking = std::max(blocking, info_.at(t->id).cost - 1);
			}
			jobs = (longest + level_h + ti - 1) / ti;
		} else if (to_int64(self.max_deadline) > ti) {
			jobs = level_h / ti;
		}

		std::vector<std::int64_t> periods;
		for (auto* t : hp)
			periods.push_back(to_int64(t->period));

		if (np) {
			// The active period must close by its bound longest lower T + H.
			std::int64_t longest = 0;
			for (auto* t : lp)
				longest = std::max(longest, to_int64(t->period));
			const std::int64_t bound = longest + level_h;
			std::int64_t demand = blocking + (bound + ti - 1) / ti * ci;
			for (auto* t : hp)
				demand += (bound + to_int64(t->period) - 1) / to_int64(t->period) * info_.at(t->id).cost;
			if (demand > bound)
				return std::nullopt;
		}

		std::int64_t need = 0;
		for (std::int64_t h = 1; h <= jobs; ++h) {
			std::optional<std::int64_t> best;
			for (const auto& n : interference_vectors_scan(periods, (h - 1) * ti + horizon_of(self))) {
				std::int64_t work = np ? blocking + (h - 1) * ci : h * ci;
				for (std::size_t j = 0; j < hp.size(); ++j)
					work += n[j] * info_.at(hp[j]->id).cost;
				bool fits = true;
				for (std::size_t k = 0; k < hp.size(); ++k)
					if (work > n[k] * to_int64(hp[k]->period) - jitter.at(hp[k]->id) - (np ? 1 : 0))
						fits = false;
				if (!fits)
					continue;
				// np: work + C_i <= (h-1) T + D - J; p: work <= (h-1) T + D - J
				const std::int64_t d = work + (np ? ci : 0) - (h - 1) * ti + ji;
				if (!best || d < *best)
					best = d;
			}
			if (!best)
				return std::nullopt;
			need = std::max(need, *best);
		}
		return std::max<std::int64_t>(need, 0);
	}

	const SystemSpec& sys_;
	std::map<std::string, Info> info_;
};

// Jobs of one task in a simulated trace, ordered by instance index.
inline std::vector<JobRecord> jobs_of(const SimResult& r, const std::string& id)
{
	std::vector<JobRecord> out;
	for (const auto& j : r.trace.jobs)
		if (j.task == id)
			out.push_back(j);
	std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.job < b.job; });
	return out;
}

// Whether every job of a task activated before horizon - bound finished
// within bound of its activation.
inline bool all_jobs_within(const SimResult& r, const std::string& id, std::int64_t bound)
{
	for (const auto& j : jobs_of(r, id)) {
		if (j.finish) {
			if (*j.finish - j.activation > bound)
				return false;
		} else if (j.activation + bound < r.horizon) {
			return false;
		}
	}
	return true;
}

// ---------------------------------------------------------------------
// The constraint system printed for the two-processor example, with the
// pipeline tasks tau_1^2, tau_2^2 named "12", "22". Each row is
// sum coeff * var (<= or =) bound over the names C1, J1, D1, ...

struct PrintedRow {
	std::vector<std::pair<std::string, std::int64_t>> terms;
	std::int64_t bound;
	bool equality = false;
};

inline std::vector<PrintedRow> printed_two_cpu_system()
{
	return {
	    {{{"J1", -1}}, 0},
	    {{{"C1", -1}}, 0},
	    {{{"C12", -1}}, 0},
	    {{{"C22", -1}}, 0},
	    {{{"J3", -1}}, 0},
	    {{{"C3", -1}}, 0},
	    {{{"D1", 1}}, 4},
	    {{{"D3", 1}}, 16},
	    {{{"C1", 1}, {"J1", 1}, {"D1", -1}}, 0},
	    {{{"C12", 1}, {"C1", 1}, {"D12", -1}}, 0},
	    {{{"C22", 1}, {"J22", 1}, {"D22", -1}}, 0},
	    {{{"C3", 1}, {"C22", 1}, {"J22", 1}}, 20},
	    {{{"C3", 1}, {"C22", 1}, {"J3", 1}, {"D3", -1}}, 0},
	    {{{"J12", 1}}, 0, true},
	    {{{"D12", 1}, {"J22", -1}}, 0},
	    {{{"D22", 1}}, 6},
	};
}

inline const std::vector<std::string>& two_cpu_variables()
{
	static const std::vector<std::string> names{"D1", "C1", "J1", "D22", "C22", "J22",
	                                            "D12", "C12", "J12", "D3", "C3", "J3"};
	return names;
}

inline std::string format_point(const Assignment& pt)
{
	std::string s;
	for (const auto& [v, x] : pt)
		s += to_string(v) + "=" + x.str() + " ";
	return s;
}

// ---------------------------------------------------------------------
// Random instances.

using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi)
{
	return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// One preemptive resource, 1..max_tasks tasks with distinct priorities,
// periods in [2, max_period], fixed costs and (optionally unconstrained)
// fixed deadlines, zero jitter.
inline SystemSpec random_uniprocessor(Rng& rng, int max_tasks, std::int64_t max_period, bool unconstrained)
{
	const int n = static_cast<int>(uniform(rng, 1, max_tasks));
	std::vector<T> tasks;
	for (int i = 0; i < n; ++i) {
		const std::int64_t period = uniform(rng, 2, max_period);
		const std::int64_t dmax = unconstrained ? uniform(rng, 1, 2 * period) : uniform(rng, 1, period);
		const std::int64_t cost = uniform(rng, 0, std::max<std::int64_t>(1, period / 2));
		tasks.push_back({"t" + std::to_string(i), "cpu", period, n - i, dmax, cost, dmax, 0});
	}
	return make_system({{"cpu", Policy::PreemptiveFP}}, tasks);
}

// Integer point of r drawn one coordinate at a time from the range left
// open by the earlier picks, each clamped to [0, hi]; nullopt when the
// draw runs into a range without integers.
inline std::optional<Assignment> sample_integer_point(const Region& r, const std::vector<ParamVar>& vars, Rng& rng,
                                                      std::int64_t hi)
{
	Assignment pt;
	Region rest = r;
	for (const auto& v : vars) {
		if (is_empty(rest))
			return std::nullopt;
		const Interval iv = var_interval(rest, v);
		std::int64_t lo = 0, top = hi;
		if (iv.lo)
			lo = std::max(lo, to_int64(ceil(*iv.lo)));
		if (iv.hi)
			top = std::min(top, to_int64(floor(*iv.hi)));
		if (lo > top)
			return std::nullopt;
		pt[v] = Rational(uniform(rng, lo, top));
		rest = substitute(rest, {{v, pt[v]}});
	}
	return pt;
}

} // namespace testing_support
