#include "support.hpp"

#include <gtest/gtest.h>

using namespace parsched;
using namespace testing_support;

namespace {

struct Span {
	std::int64_t from;
	std::int64_t to;
};

// Execution intervals of every job, rebuilt from the event list.
std::map<std::pair<std::string, std::int64_t>, std::vector<Span>> executions(const SimResult& r)
{
	std::map<std::pair<std::string, std::int64_t>, std::vector<Span>> out;
	std::map<std::pair<std::string, std::int64_t>, std::int64_t> open;
	for (const auto& e : r.trace.events) {
		const auto key = std::make_pair(e.task, e.job);
		switch (e.kind) {
		case EventKind::Start:
		case EventKind::Resume: open[key] = e.time; break;
		case EventKind::Preempt:
		case EventKind::Complete:
			out[key].push_back({open.at(key), e.time});
			open.erase(key);
			break;
		default: break;
		}
	}
	return out;
}

std::int64_t cost_at(const SystemSpec& sys, const ConcretePoint& pt, const std::string& id)
{
	return to_int64(resolve_task(sys.task(id), pt).cost);
}

SystemSpec random_mixed(Rng& rng)
{
	// Two CPUs and a bus, one pipeline across them plus standalone tasks.
	std::vector<T> tasks;
	const std::int64_t pp = uniform(rng, 8, 20);
	tasks.push_back({"p1", "cpu1", pp, 5, pp, uniform(rng, 0, 2), std::nullopt, 0});
	tasks.push_back({"p2", "bus", pp, 5, pp, uniform(rng, 0, 2), std::nullopt, std::nullopt});
	tasks.push_back({"p3", "cpu2", pp, 1, pp, uniform(rng, 0, 2), std::nullopt, std::nullopt});
	for (const auto& [id, res, prio] : std::vector<std::tuple<std::string, std::string, std::int64_t>>{
	         {"a", "cpu1", 7}, {"b", "cpu2", 4}, {"c", "bus", 2}, {"d", "cpu1", 1}}) {
		const auto p = uniform(rng, 4, 12);
		tasks.push_back({id, res, p, prio, p, uniform(rng, 0, 3), std::nullopt, 0});
	}
	PipelineSpec pl{"P", pp, pp, {"p1", "p2", "p3"}};
	return make_system({{"cpu1", Policy::PreemptiveFP}, {"cpu2", Policy::PreemptiveFP}, {"bus", Policy::NonPreemptiveFP}},
	                   tasks, {pl});
}

} // namespace

TEST(Simulate, SingleTaskThreeJobs)
{
	const SystemSpec sys = make_system({{"cpu", Policy::PreemptiveFP}}, {{"a", "cpu", 3, 1, 3, 1}});
	const SimResult r = simulate(sys, {}, 9);
	EXPECT_TRUE(r.schedulable);
	const auto jobs = jobs_of(r, "a");
	ASSERT_EQ(jobs.size(), 3u);
	for (const auto& j : jobs)
		EXPECT_EQ(*j.finish - j.activation, 1);
}

TEST(Simulate, SingleProcessorWorstResponse)
{
	const SystemSpec sys = load_fixture("single_cpu.json");
	const SimResult r = simulate(sys, {}, 120);
	std::int64_t worst = 0;
	for (const auto& j : jobs_of(r, "3"))
		worst = std::max(worst, *j.finish - j.activation);
	EXPECT_EQ(worst, 12);
}

TEST(Simulate, TestCaseOneNominalAgreesWithAnalysis)
{
	const SystemSpec sys = load_fixture("tc1.json");
	const ConcretePoint pt = point({{"C[tau1]", 2}, {"C[tau11]", 5}});
	const Region slice = schedulability_slice(build_system_region(sys), {cost_var("tau1"), cost_var("tau11")});
	const bool analytic = contains(slice, pt);
	const SimResult r = simulate(sys, pt, 600);
	EXPECT_TRUE(analytic);
	EXPECT_TRUE(r.schedulable);
}

TEST(Simulate, HorizonMustBePositive)
{
	const SystemSpec sys = load_fixture("single_cpu.json");
	EXPECT_THROW(simulate(sys, {}, 0), std::invalid_argument);
}

TEST(Simulate, FreeCostMustBeAssigned)
{
	const SystemSpec sys = load_fixture("tc1.json");
	EXPECT_THROW(simulate(sys, point({{"C[tau1]", 2}}), 600), MissingAssignment);
}

TEST(Simulate, DefaultHorizon)
{
	EXPECT_EQ(default_horizon(load_fixture("single_cpu.json")), 120 + 20);
	EXPECT_EQ(default_horizon(load_fixture("tc1.json")), 600 + 200);
}

TEST(Simulate, MissStampedAtDeadline)
{
	const SystemSpec sys = make_system({{"cpu", Policy::PreemptiveFP}},
	                                   {{"h", "cpu", 5, 2, 5, 3}, {"a", "cpu", 10, 1, 4, 2, 4}});
	const SimResult r = simulate(sys, {}, 10);
	EXPECT_FALSE(r.schedulable);
	const auto miss = std::find_if(r.trace.events.begin(), r.trace.events.end(),
	                               [](const SimEvent& e) { return e.kind == EventKind::DeadlineMiss; });
	ASSERT_NE(miss, r.trace.events.end());
	EXPECT_EQ(miss->time, 4);
	EXPECT_EQ(miss->task, "a");
}

TEST(Simulate, TraceText)
{
	const SystemSpec sys = load_fixture("single_cpu.json");
	const std::string text = format_trace_text(simulate(sys, {}, 3));
	EXPECT_EQ(text.substr(0, text.find("t=1 ")), "t=0 task=1 Activate\nt=0 task=2 Activate\nt=0 task=3 Activate\n"
	                                             "t=0 task=1 Start\n");
	// Releases stop at the horizon; work already released still drains.
	EXPECT_TRUE(text.ends_with("t=7 task=3 Complete\nSCHEDULABLE\n"));
	const auto doc = nlohmann::json::parse(format_trace_json(simulate(sys, {}, 120)));
	EXPECT_TRUE(doc["schedulable"].get<bool>());
}

TEST(SimulateInvariants, RandomMixedSystems)
{
	Rng rng(51);
	for (int i = 0; i < 150; ++i) {
		const SystemSpec sys = random_mixed(rng);
		const std::int64_t horizon = default_horizon(sys);
		const SimResult r = simulate(sys, {}, horizon);
		const auto exec = executions(r);

		std::map<std::pair<std::string, std::int64_t>, JobRecord> by_key;
		for (const auto& j : r.trace.jobs) {
			by_key[{j.task, j.job}] = j;
			if (j.start) {
				ASSERT_LE(j.activation, *j.start);
				if (j.finish)
					ASSERT_LE(*j.start, *j.finish);
			}
		}

		for (const auto& j : r.trace.jobs) {
			const auto& spec = sys.task(j.task);
			const auto key = std::make_pair(j.task, j.job);
			const std::int64_t c = cost_at(sys, {}, j.task);
			std::int64_t ran = 0;
			if (exec.count(key))
				for (const auto& s : exec.at(key))
					ran += s.to - s.from;
			if (j.finish)
				ASSERT_EQ(ran, c);
			// Non-preemptive jobs run in one piece.
			if (sys.resource(spec.resource).policy == Policy::NonPreemptiveFP && j.finish && c > 0) {
				ASSERT_EQ(exec.at(key).size(), 1u);
				ASSERT_EQ(*j.finish - *j.start, c);
			}
			// A successor job is activated by its predecessor's completion.
			if (auto slot = sys.slot_of(j.task); slot && slot->position > 0) {
				const auto& prev = sys.pipelines()[slot->pipeline].tasks[slot->position - 1];
				ASSERT_EQ(by_key.at(std::make_pair(prev, j.job)).finish, j.activation);
			}
		}

		// Work conservation: a resource with a pending job is never idle.
		for (const auto& res : sys.resources()) {
			std::vector<int> busy(static_cast<std::size_t>(horizon + 200), 0);
			for (const auto& [key, slices] : exec)
				if (sys.task(key.first).resource == res.id)
					for (const auto& s : slices)
						for (std::int64_t t = s.from; t < s.to; ++t)
							++busy[static_cast<std::size_t>(t)];
			std::int64_t end = 0;
			for (const auto& j : r.trace.jobs)
				if (j.finish)
					end = std::max(end, *j.finish);
			for (std::int64_t t = 0; t < end; ++t) {
				ASSERT_LE(busy[static_cast<std::size_t>(t)], 1);
				bool pending = false;
				for (const auto& j : r.trace.jobs)
					if (sys.task(j.task).resource == res.id && j.activation <= t && j.finish && *j.finish > t &&
					    cost_at(sys, {}, j.task) > 0)
						pending = true;
				ASSERT_EQ(busy[static_cast<std::size_t>(t)] == 1, pending) << res.id << " t=" << t;
			}
		}
	}
}

TEST(SimulateInvariants, Deterministic)
{
	Rng rng(52);
	for (int i = 0; i < 20; ++i) {
		const SystemSpec sys = random_mixed(rng);
		const SimResult a = simulate(sys, {}, default_horizon(sys));
		const SimResult b = simulate(sys, {}, default_horizon(sys));
		ASSERT_EQ(format_trace_text(a), format_trace_text(b));
		ASSERT_EQ(format_trace_json(a), format_trace_json(b));
	}
}

TEST(SimulateInvariants, CriticalInstantMatchesResponseTime)
{
	Rng rng(53);
	for (int i = 0; i < 200; ++i) {
		const SystemSpec sys = random_uniprocessor(rng, 3, 12, false);
		const std::int64_t h = to_int64(system_hyperperiod(sys));
		const SimResult r = simulate(sys, {}, h + 200);
		for (const auto& t : sys.tasks()) {
			std::vector<FixedTask> higher;
			Rational load(to_int64(t.cost.value()), to_int64(t.period));
			for (const auto& o : sys.tasks())
				if (o.priority > t.priority) {
					higher.push_back({to_int64(o.cost.value()), to_int64(o.period)});
					load += Rational(to_int64(o.cost.value()), to_int64(o.period));
				}
			if (load > 1)
				continue;
			const auto expected = rta({to_int64(t.cost.value()), to_int64(t.period)}, higher, to_int64(t.period));
			if (!expected)
				continue;
			std::int64_t worst = 0;
			for (const auto& j : jobs_of(r, t.id))
				if (j.activation < h) {
					ASSERT_TRUE(j.finish);
					worst = std::max(worst, *j.finish - j.activation);
				}
			ASSERT_EQ(worst, *expected) << serialize_system(sys) << t.id;
		}
	}
}

TEST(WorstCaseBlocking, LowerPriorityGrabsTheBusFirst)
{
	// hp message C=10, lp message C=15 released one tick earlier.
	const SystemSpec sys = make_system({{"bus", Policy::NonPreemptiveFP}},
	                                   {{"hp", "bus", 50, 2, 50, 10, 50}, {"lp", "bus", 60, 1, 60, 15, 60}});
	SimOptions opts;
	opts.release_offsets = {{"hp", 1}};
	const auto hp = jobs_of(simulate(sys, {}, 300, opts), "hp");
	EXPECT_EQ(*hp[0].start - hp[0].activation, 14);
	EXPECT_EQ(*hp[0].finish - hp[0].activation, 24);
}

TEST(WorstCaseBlocking, FindsTheBlockingOffset)
{
	auto sys_with = [](std::int64_t d) {
		return make_system({{"bus", Policy::NonPreemptiveFP}},
		                   {{"hp", "bus", 50, 2, 50, 10, d}, {"lp", "bus", 60, 1, 60, 15, 60}});
	};
	const SimResult miss = worst_case_blocking_mode(sys_with(23), {}, 300);
	EXPECT_FALSE(miss.schedulable);
	EXPECT_TRUE(miss.release_offsets.count("lp"));
	EXPECT_TRUE(worst_case_blocking_mode(sys_with(24), {}, 300).schedulable);
	EXPECT_TRUE(simulate(sys_with(23), {}, 300).schedulable);
	EXPECT_EQ(blocking_candidates(sys_with(24)).size(), 1u);
}

TEST(WorstCaseBlocking, NoLowerPriorityMatchesPlainRun)
{
	const SystemSpec sys = load_fixture("single_cpu.json");
	EXPECT_TRUE(blocking_candidates(sys).empty());
	EXPECT_EQ(format_trace_text(worst_case_blocking_mode(sys, {}, 120)), format_trace_text(simulate(sys, {}, 120)));
}

TEST(WorstCaseBlocking, ExplosionGuard)
{
	const SystemSpec sys = make_system({{"bus", Policy::NonPreemptiveFP}}, {{"a", "bus", 50, 3, 50, 1, 50},
	                                                                       {"b", "bus", 60, 2, 60, 1, 60},
	                                                                       {"c", "bus", 70, 1, 70, 1, 70}});
	EXPECT_THROW(worst_case_blocking_mode(sys, {}, 300, 1000), OffsetExplosion);
	EXPECT_NO_THROW(worst_case_blocking_mode(sys, {}, 300, 5000));
}
