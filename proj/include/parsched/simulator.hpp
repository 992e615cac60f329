#pragma once

#include "model.hpp"
#include "point.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace parsched {

enum class EventKind : std::uint8_t { Activate, Start, Preempt, Resume, Complete, DeadlineMiss };

inline const char* to_string(EventKind k)
{
	switch (k) {
	case EventKind::Activate: return "Activate";
	case EventKind::Start: return "Start";
	case EventKind::Preempt: return "Preempt";
	case EventKind::Resume: return "Resume";
	case EventKind::Complete: return "Complete";
	case EventKind::DeadlineMiss: return "DeadlineMiss";
	}
	return "?";
}

struct SimEvent {
	std::int64_t time = 0;
	std::string task;
	EventKind kind = EventKind::Activate;
	std::int64_t job = 0; // instance index k
};

struct JobRecord {
	std::string task;
	std::int64_t job = 0;
	std::int64_t activation = 0;
	std::optional<std::int64_t> start;
	std::optional<std::int64_t> finish;
};

struct SimTrace {
	std::vector<SimEvent> events;
	std::vector<JobRecord> jobs;
};

struct SimResult {
	SimTrace trace;
	bool schedulable = true;
	std::int64_t horizon = 0;
	std::map<std::string, std::int64_t> release_offsets; // non-zero offsets only
};

struct SimOptions {
	std::map<std::string, std::int64_t> release_offsets; // standalone tasks only
	bool record_events = true;
};

// lcm of all periods plus the largest max_deadline.
inline std::int64_t default_horizon(const SystemSpec& sys)
{
	Integer longest = 0;
	for (const auto& t : sys.tasks())
		longest = std::max(longest, t.max_deadline);
	return to_int64(system_hyperperiod(sys) + longest);
}

namespace detail {

class Simulation {
public:
	Simulation(const SystemSpec& sys, const ConcretePoint& pt, std::int64_t horizon, const SimOptions& opts)
	: horizon_(horizon), record_(opts.record_events)
	{
		if (horizon < 1)
			throw std::invalid_argument("horizon must be at least 1");
		std::map<std::string, std::size_t> res_index;
		for (const auto& r : sys.resources()) {
			res_index.emplace(r.id, resources_.size());
			resources_.push_back({r.policy == Policy::PreemptiveFP, {}, -1, 0});
		}
		std::map<std::string, std::size_t> task_index;
		for (const auto& t : sys.tasks()) {
			task_index.emplace(t.id, tasks_.size());
			const ResolvedTask rt = resolve_task(t, pt);
			Task task;
			task.id = t.id;
			task.resource = res_index.at(t.resource);
			task.priority = t.priority;
			task.cost = rt.cost;
			task.period = to_int64(t.period);
			task.relative_deadline = rt.deadline ? *rt.deadline : to_int64(t.max_deadline);
			tasks_.push_back(std::move(task));
		}
		for (const auto& pl : sys.pipelines()) {
			for (std::size_t k = 0; k < pl.tasks.size(); ++k) {
				Task& task = tasks_[task_index.at(pl.tasks[k])];
				task.root = k == 0;
				task.relative_deadline = to_int64(pl.e2e_deadline);
				if (k + 1 < pl.tasks.size())
					task.successor = static_cast<int>(task_index.at(pl.tasks[k + 1]));
			}
		}
		for (const auto& [id, offset] : opts.release_offsets) {
			auto it = task_index.find(id);
			if (it == task_index.end() || sys.slot_of(id))
				throw std::invalid_argument("release offset for '" + id + "' needs a standalone task");
			tasks_[it->second].offset = offset;
		}
		for (std::size_t i = 0; i < tasks_.size(); ++i)
			if (tasks_[i].root)
				tasks_[i].next_release = tasks_[i].offset;
	}

	SimResult run()
	{
		std::int64_t now = 0;
		for (;;) {
			std::optional<std::int64_t> next = next_instant();
			if (!next)
				break;
			advance(*next);
			now = *next;
			settle_zero_cost(now);
			release(now);
			arbitrate(now);
			check_deadlines(now);
		}
		SimResult out;
		out.schedulable = schedulable_;
		out.horizon = horizon_;
		for (const auto& t : tasks_)
			if (t.offset != 0)
				out.release_offsets.emplace(t.id, t.offset);
		out.trace.events = std::move(events_);
		out.trace.jobs.reserve(jobs_.size());
		for (const auto& j : jobs_)
			out.trace.jobs.push_back({tasks_[j.task].id, j.index, j.activation, j.start, j.finish});
		return out;
	}

private:
	struct Task {
		std::string id;
		std::size_t resource = 0;
		std::int64_t priority = 0;
		std::int64_t cost = 0;
		std::int64_t period = 1;
		std::int64_t relative_deadline = 0;
		std::int64_t offset = 0;
		std::int64_t next_release = 0;
		std::int64_t released = 0;
		bool root = true;
		int successor = -1;
	};
	struct Job {
		std::size_t task = 0;
		std::int64_t index = 0;
		std::int64_t activation = 0;
		std::int64_t remaining = 0;
		std::size_t instance = 0;
		std::optional<std::int64_t> start;
		std::optional<std::int64_t> finish;
	};
	// One release of a root task, followed down its pipeline.
	struct Instance {
		std::size_t last_task = 0;
		std::int64_t deadline = 0;
		bool done = false;
	};
	struct Resource {
		bool preemptive = true;
		std::vector<std::size_t> ready;
		long running = -1;
		std::int64_t since = 0;
	};

	void log(std::int64_t t, const Job& j, EventKind k)
	{
		if (record_)
			events_.push_back({t, tasks_[j.task].id, k, j.index});
	}

	std::size_t last_of_chain(std::size_t task) const
	{
		while (tasks_[task].successor >= 0)
			task = static_cast<std::size_t>(tasks_[task].successor);
		return task;
	}

	std::optional<std::int64_t> next_instant() const
	{
		std::optional<std::int64_t> best;
		auto consider = [&](std::int64_t t) {
			if (!best || t < *best)
				best = t;
		};
		bool work = false;
		for (const auto& t : tasks_)
			if (t.root && t.next_release - t.offset < horizon_)
				consider(t.next_release);
		for (const auto& r : resources_) {
			if (r.running >= 0) {
				consider(r.since + jobs_[static_cast<std::size_t>(r.running)].remaining);
				work = true;
			}
			if (!r.ready.empty())
				work = true;
		}
		// Pending deadlines only matter while unfinished work can still miss them.
		if (work && !deadlines_.empty())
			consider(deadlines_.top().first);
		return best;
	}

	void advance(std::int64_t t)
	{
		for (auto& r : resources_) {
			if (r.running < 0)
				continue;
			Job& j = jobs_[static_cast<std::size_t>(r.running)];
			j.remaining -= t - r.since;
			r.since = t;
			if (j.remaining == 0) {
				const std::size_t id = static_cast<std::size_t>(r.running);
				r.running = -1;
				complete(id, t);
			}
		}
	}

	void activate(std::size_t task, std::int64_t index, std::int64_t t, std::size_t instance)
	{
		Job j;
		j.task = task;
		j.index = index;
		j.activation = t;
		j.remaining = tasks_[task].cost;
		j.instance = instance;
		jobs_.push_back(j);
		log(t, jobs_.back(), EventKind::Activate);
		resources_[tasks_[task].resource].ready.push_back(jobs_.size() - 1);
	}

	void complete(std::size_t id, std::int64_t t)
	{
		Job& j = jobs_[id];
		j.finish = t;
		log(t, j, EventKind::Complete);
		const Task& task = tasks_[j.task];
		if (task.successor >= 0) {
			activate(static_cast<std::size_t>(task.successor), j.index, t, j.instance);
			return;
		}
		Instance& inst = instances_[j.instance];
		inst.done = true;
		if (t > inst.deadline)
			schedulable_ = false;
	}

	void release(std::int64_t t)
	{
		for (std::size_t i = 0; i < tasks_.size(); ++i) {
			Task& task = tasks_[i];
			if (!task.root || task.next_release != t || t - task.offset >= horizon_)
				continue;
			const std::size_t inst = instances_.size();
			instances_.push_back({last_of_chain(i), t + task.relative_deadline, false});
			deadlines_.emplace(t + task.relative_deadline, inst);
			activate(i, task.released, t, inst);
			task.released += 1;
			task.next_release += task.period;
		}
	}

	// Highest-priority ready job of a resource, or -1. Jobs of one task are
	// served in activation order.
	long best_ready(const Resource& r) const
	{
		long best = -1;
		for (auto id : r.ready) {
			if (best < 0) {
				best = static_cast<long>(id);
				continue;
			}
			const auto b = static_cast<std::size_t>(best);
			const auto pa = tasks_[jobs_[id].task].priority, pb = tasks_[jobs_[b].task].priority;
			if (pa > pb || (pa == pb && id < b))
				best = static_cast<long>(id);
		}
		return best;
	}

	// On an idle preemptive processor a zero-length job at the head of the
	// queue is done at the instant the processor frees up, ahead of
	// releases at that same instant.
	void settle_zero_cost(std::int64_t t)
	{
		bool changed = true;
		while (changed) {
			changed = false;
			for (auto& r : resources_) {
				if (!r.preemptive || r.running >= 0)
					continue;
				for (;;) {
					const long best = best_ready(r);
					if (best < 0 || jobs_[static_cast<std::size_t>(best)].remaining != 0)
						break;
					dispatch(r, static_cast<std::size_t>(best), t);
					changed = true;
				}
			}
		}
	}

	// Runs a ready job; zero-length jobs complete on the spot. Returns true
	// when a completion happened.
	bool dispatch(Resource& r, std::size_t id, std::int64_t t)
	{
		std::erase(r.ready, id);
		Job& j = jobs_[id];
		if (j.start) {
			log(t, j, EventKind::Resume);
		} else {
			j.start = t;
			log(t, j, EventKind::Start);
		}
		if (j.remaining == 0) {
			complete(id, t);
			return true;
		}
		r.running = static_cast<long>(id);
		r.since = t;
		return false;
	}

	// Repeats until no resource changes: a zero-length completion may
	// activate a successor elsewhere at the same instant.
	void arbitrate(std::int64_t t)
	{
		bool changed = true;
		while (changed) {
			changed = false;
			for (auto& r : resources_) {
				for (;;) {
					const long best = best_ready(r);
					if (best < 0)
						break;
					const auto id = static_cast<std::size_t>(best);
					if (r.running < 0) {
						if (dispatch(r, id, t)) {
							changed = true;
							continue;
						}
						break;
					}
					const auto run = static_cast<std::size_t>(r.running);
					if (!r.preemptive || tasks_[jobs_[id].task].priority <= tasks_[jobs_[run].task].priority)
						break;
					if (jobs_[id].remaining == 0) {
						// Finishes without taking the processor away.
						std::erase(r.ready, id);
						jobs_[id].start = t;
						log(t, jobs_[id], EventKind::Start);
						complete(id, t);
						changed = true;
						continue;
					}
					log(t, jobs_[run], EventKind::Preempt);
					r.ready.push_back(run);
					r.running = -1;
					dispatch(r, id, t);
					break;
				}
			}
		}
	}

	void check_deadlines(std::int64_t t)
	{
		while (!deadlines_.empty() && deadlines_.top().first <= t) {
			const std::size_t inst = deadlines_.top().second;
			deadlines_.pop();
			if (instances_[inst].done)
				continue;
			schedulable_ = false;
			if (record_) {
				std::int64_t index = 0;
				for (const auto& j : jobs_)
					if (j.instance == inst)
						index = j.index;
				events_.push_back({t, tasks_[instances_[inst].last_task].id, EventKind::DeadlineMiss, index});
			}
		}
	}

	std::int64_t horizon_;
	bool record_;
	std::vector<Task> tasks_;
	std::vector<Resource> resources_;
	std::vector<Job> jobs_;
	std::vector<Instance> instances_;
	std::priority_queue<std::pair<std::int64_t, std::size_t>, std::vector<std::pair<std::int64_t, std::size_t>>,
	                    std::greater<>>
	    deadlines_;
	std::vector<SimEvent> events_;
	bool schedulable_ = true;
};

} // namespace detail

// Synchronous periodic run: root tasks release at k T for k T < horizon,
// successors activate when their predecessor completes, every job runs for
// exactly C ticks. A pipeline instance misses when its last task finishes
// after the first activation plus the end-to-end deadline; a standalone
// job misses when it finishes after activation plus D (the fixed or
// assigned value, max_deadline otherwise). Jobs still running when the
// simulation stops have missed already.
inline SimResult simulate(const SystemSpec& sys, const ConcretePoint& pt, std::int64_t horizon,
                          const SimOptions& opts = {})
{
	return detail::Simulation(sys, pt, horizon, opts).run();
}

struct OffsetExplosion : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Standalone tasks on non-preemptive resources that can block someone.
inline std::vector<const TaskSpec*> blocking_candidates(const SystemSpec& sys)
{
	std::vector<const TaskSpec*> out;
	for (const auto& r : sys.resources()) {
		if (r.policy != Policy::NonPreemptiveFP)
			continue;
		const auto on = sys.tasks_on(r.id);
		for (std::size_t k = 1; k < on.size(); ++k)
			if (!sys.slot_of(on[k]->id))
				out.push_back(on[k]);
	}
	return out;
}

// Tries every combination of release offsets in [0, T) for the blocking
// candidates and returns the first missing run, or the synchronous one if
// none misses.
inline SimResult worst_case_blocking_mode(const SystemSpec& sys, const ConcretePoint& pt, std::int64_t horizon,
                                          std::int64_t max_runs = 1 << 20, bool record_events = true)
{
	const auto cands = blocking_candidates(sys);
	std::int64_t runs = 1;
	for (const auto* t : cands) {
		runs *= to_int64(t->period);
		if (runs > max_runs)
			throw OffsetExplosion("offset combinations exceed " + std::to_string(max_runs));
	}
	SimOptions opts;
	opts.record_events = record_events;
	std::vector<std::int64_t> offset(cands.size(), 0);
	std::optional<SimResult> first;
	for (;;) {
		opts.release_offsets.clear();
		for (std::size_t k = 0; k < cands.size(); ++k)
			opts.release_offsets[cands[k]->id] = offset[k];
		SimResult r = simulate(sys, pt, horizon, opts);
		if (!r.schedulable)
			return r;
		if (!first)
			first = std::move(r);
		std::size_t k = 0;
		for (; k < cands.size(); ++k) {
			if (++offset[k] < to_int64(cands[k]->period))
				break;
			offset[k] = 0;
		}
		if (k == cands.size())
			break;
	}
	return std::move(*first);
}

inline std::string format_trace_text(const SimResult& r)
{
	std::ostringstream os;
	for (const auto& e : r.trace.events)
		os << "t=" << e.time << " task=" << e.task << ' ' << to_string(e.kind) << '\n';
	for (const auto& [id, off] : r.release_offsets)
		os << "offset task=" << id << ' ' << off << '\n';
	os << (r.schedulable ? "SCHEDULABLE" : "NOT SCHEDULABLE") << '\n';
	return os.str();
}

inline std::string format_trace_json(const SimResult& r)
{
	using nlohmann::json;
	json doc;
	doc["schedulable"] = r.schedulable;
	doc["horizon"] = r.horizon;
	doc["release_offsets"] = r.release_offsets;
	json events = json::array();
	for (const auto& e : r.trace.events)
		events.push_back({{"t", e.time}, {"task", e.task}, {"kind", to_string(e.kind)}, {"job", e.job}});
	doc["events"] = std::move(events);
	json jobs = json::array();
	for (const auto& j : r.trace.jobs) {
		json o{{"task", j.task}, {"job", j.job}, {"a", j.activation}};
		o["s"] = j.start ? json(*j.start) : json(nullptr);
		o["f"] = j.finish ? json(*j.finish) : json(nullptr);
		jobs.push_back(std::move(o));
	}
	doc["jobs"] = std::move(jobs);
	return doc.dump(2) + "\n";
}

} // namespace parsched
