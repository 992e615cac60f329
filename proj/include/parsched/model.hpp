#pragma once

#include "numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace parsched {

enum class Policy : std::uint8_t { PreemptiveFP, NonPreemptiveFP };

struct ResourceSpec {
	std::string id;
	Policy policy = Policy::PreemptiveFP;

	friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

// A task parameter that is either a fixed non-negative integer or free.
class Param {
public:
	Param() = default;
	static Param fixed(Integer v) { return Param(std::move(v)); }
	static Param free() { return Param(); }

	bool is_free() const { return !value_.has_value(); }
	bool is_fixed() const { return value_.has_value(); }
	const Integer& value() const { return value_.value(); }

	friend bool operator==(const Param&, const Param&) = default;

private:
	explicit Param(Integer v) : value_(std::move(v)) {}
	std::optional<Integer> value_;
};

struct TaskSpec {
	std::string id;
	std::string resource;
	Integer period = 1;
	std::int64_t priority = 1; // higher value, higher priority
	Integer max_deadline = 1;
	Param cost;
	Param deadline;
	Param jitter = Param::fixed(0);

	friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct PipelineSpec {
	std::string id;
	Integer period = 1;
	Integer e2e_deadline = 1;
	std::vector<std::string> tasks;

	friend bool operator==(const PipelineSpec&, const PipelineSpec&) = default;
};

enum class SpecErrorKind : std::uint8_t {
	Syntax,
	DuplicateId,
	PriorityCollision,
	PeriodMismatch,
	DanglingReference,
	InvalidValue,
};

class SpecError : public std::runtime_error {
public:
	SpecError(SpecErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
	SpecErrorKind kind() const { return kind_; }

private:
	SpecErrorKind kind_;
};

// Where a task sits inside its pipeline.
struct PipelineSlot {
	std::size_t pipeline = 0;
	std::size_t position = 0;
};

// Validated, immutable description of a distributed system.
class SystemSpec {
public:
	SystemSpec(std::vector<ResourceSpec> resources, std::vector<TaskSpec> tasks, std::vector<PipelineSpec> pipelines)
	: resources_(std::move(resources)), tasks_(std::move(tasks)), pipelines_(std::move(pipelines))
	{
		validate();
	}

	const std::vector<ResourceSpec>& resources() const { return resources_; }
	const std::vector<TaskSpec>& tasks() const { return tasks_; }
	const std::vector<PipelineSpec>& pipelines() const { return pipelines_; }

	const TaskSpec& task(const std::string& id) const { return tasks_.at(task_index_.at(id)); }
	bool has_task(const std::string& id) const { return task_index_.count(id) != 0; }

	const ResourceSpec& resource(const std::string& id) const
	{
		return *std::find_if(resources_.begin(), resources_.end(), [&](const auto& r) { return r.id == id; });
	}

	std::optional<PipelineSlot> slot_of(const std::string& task_id) const
	{
		auto it = slots_.find(task_id);
		if (it == slots_.end())
			return std::nullopt;
		return it->second;
	}

	// Tasks on one resource, highest priority first.
	std::vector<const TaskSpec*> tasks_on(const std::string& resource_id) const
	{
		std::vector<const TaskSpec*> out;
		for (const auto& t : tasks_)
			if (t.resource == resource_id)
				out.push_back(&t);
		std::sort(out.begin(), out.end(), [](const TaskSpec* a, const TaskSpec* b) { return a->priority > b->priority; });
		return out;
	}

	friend bool operator==(const SystemSpec& a, const SystemSpec& b)
	{
		return a.resources_ == b.resources_ && a.tasks_ == b.tasks_ && a.pipelines_ == b.pipelines_;
	}

private:
	void validate()
	{
		auto fail = [](SpecErrorKind k, const std::string& msg) { throw SpecError(k, msg); };
		auto check_id = [&](const std::string& id, const char* what) {
			if (id.empty() || id.find_first_of("[],= \t\n") != std::string::npos)
				fail(SpecErrorKind::InvalidValue, std::string("invalid ") + what + " id '" + id + "'");
		};

		std::set<std::string> resource_ids;
		for (const auto& r : resources_) {
			check_id(r.id, "resource");
			if (!resource_ids.insert(r.id).second)
				fail(SpecErrorKind::DuplicateId, "duplicate resource id '" + r.id + "'");
		}

		std::map<std::pair<std::string, std::int64_t>, std::string> priorities;
		for (std::size_t i = 0; i < tasks_.size(); ++i) {
			const auto& t = tasks_[i];
			check_id(t.id, "task");
			if (!task_index_.emplace(t.id, i).second)
				fail(SpecErrorKind::DuplicateId, "duplicate task id '" + t.id + "'");
			if (!resource_ids.count(t.resource))
				fail(SpecErrorKind::DanglingReference, "task '" + t.id + "' references unknown resource '" + t.resource + "'");
			if (t.period <= 0)
				fail(SpecErrorKind::InvalidValue, "task '" + t.id + "' has non-positive period");
			if (t.max_deadline <= 0)
				fail(SpecErrorKind::InvalidValue, "task '" + t.id + "' has non-positive max_deadline");
			if (t.priority <= 0)
				fail(SpecErrorKind::InvalidValue, "task '" + t.id + "' has non-positive priority");
			if (t.cost.is_fixed() && t.cost.value() < 0)
				fail(SpecErrorKind::InvalidValue, "task '" + t.id + "' has negative C");
			if (t.jitter.is_fixed() && t.jitter.value() < 0)
				fail(SpecErrorKind::InvalidValue, "task '" + t.id + "' has negative J");
			if (t.deadline.is_fixed() && (t.deadline.value() < 0 || t.deadline.value() > t.max_deadline))
				fail(SpecErrorKind::InvalidValue, "task '" + t.id + "' has D outside [0, max_deadline]");
			auto [it, fresh] = priorities.emplace(std::make_pair(t.resource, t.priority), t.id);
			if (!fresh)
				fail(SpecErrorKind::PriorityCollision, "tasks '" + it->second + "' and '" + t.id +
				                                           "' share priority " + std::to_string(t.priority) +
				                                           " on resource '" + t.resource + "'");
		}

		std::set<std::string> pipeline_ids;
		for (std::size_t p = 0; p < pipelines_.size(); ++p) {
			const auto& pl = pipelines_[p];
			check_id(pl.id, "pipeline");
			if (!pipeline_ids.insert(pl.id).second)
				fail(SpecErrorKind::DuplicateId, "duplicate pipeline id '" + pl.id + "'");
			if (pl.period <= 0 || pl.e2e_deadline <= 0)
				fail(SpecErrorKind::InvalidValue, "pipeline '" + pl.id + "' needs positive period and e2e_deadline");
			if (pl.tasks.empty())
				fail(SpecErrorKind::InvalidValue, "pipeline '" + pl.id + "' has no tasks");
			for (std::size_t k = 0; k < pl.tasks.size(); ++k) {
				const auto& tid = pl.tasks[k];
				auto it = task_index_.find(tid);
				if (it == task_index_.end())
					fail(SpecErrorKind::DanglingReference, "pipeline '" + pl.id + "' references unknown task '" + tid + "'");
				if (!slots_.emplace(tid, PipelineSlot{p, k}).second)
					fail(SpecErrorKind::DuplicateId, "task '" + tid + "' belongs to more than one pipeline");
				if (tasks_[it->second].period != pl.period)
					fail(SpecErrorKind::PeriodMismatch, "task '" + tid + "' period differs from pipeline '" + pl.id + "' period");
			}
		}
	}

	std::vector<ResourceSpec> resources_;
	std::vector<TaskSpec> tasks_;
	std::vector<PipelineSpec> pipelines_;
	std::map<std::string, std::size_t> task_index_;
	std::map<std::string, PipelineSlot> slots_;
};

inline Integer hyperperiod(std::span<const Integer> periods)
{
	Integer h = 1;
	for (const auto& p : periods)
		h = lcm(h, p);
	return h;
}

// lcm of the periods of a task and every higher-priority task on its resource.
inline Integer level_hyperperiod(const SystemSpec& sys, const std::string& task_id)
{
	const TaskSpec& self = sys.task(task_id);
	Integer h = 1;
	for (const TaskSpec* t : sys.tasks_on(self.resource))
		if (t->priority >= self.priority)
			h = lcm(h, t->period);
	return h;
}

inline Integer system_hyperperiod(const SystemSpec& sys)
{
	Integer h = 1;
	for (const auto& t : sys.tasks())
		h = lcm(h, t.period);
	return h;
}

} // namespace parsched
