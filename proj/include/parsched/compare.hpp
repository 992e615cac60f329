#pragma once

#include "composition.hpp"
#include "simulator.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace parsched {

struct GridSpec {
	ParamVar x, y;
	std::int64_t xmin = 0, xmax = 0;
	std::int64_t ymin = 0, ymax = 0;
	std::int64_t step = 1;
};

struct GridPoint {
	std::int64_t x = 0, y = 0;
	bool analytic = false;
	bool simulated = false;
};

struct CompareReport {
	std::vector<GridPoint> points; // row-major, y outer
	std::size_t both_schedulable = 0;
	std::size_t both_unschedulable = 0;
	std::size_t violations = 0; // analytic yes, simulator no
	std::size_t pessimism = 0;  // analytic no, simulator yes
};

struct CompareOptions {
	std::int64_t horizon = 0; // 0: default_horizon
	bool adversarial_blocking = false;
	std::int64_t max_offset_runs = 1 << 20;
	unsigned threads = 0; // 0: hardware concurrency
	AnalysisOptions analysis;
};

inline std::vector<std::int64_t> grid_axis(std::int64_t lo, std::int64_t hi, std::int64_t step)
{
	if (step <= 0)
		throw std::invalid_argument("grid step must be positive");
	std::vector<std::int64_t> out;
	for (std::int64_t v = lo; v <= hi; v += step)
		out.push_back(v);
	return out;
}

// Checks that the two axes are distinct free parameters and that every
// other free computation time is absent, since the simulator needs them.
inline void check_grid_axes(const SystemSpec& sys, const GridSpec& g)
{
	for (const auto& v : {g.x, g.y})
		if (!is_free_param(sys, v))
			throw std::invalid_argument(to_string(v) + " is not a free parameter of the system");
	if (g.x == g.y)
		throw std::invalid_argument("grid axes must differ");
	if (g.x.kind == ParamKind::J || g.y.kind == ParamKind::J)
		throw std::invalid_argument("jitters cannot be grid axes");
}

inline void check_compare_axes(const SystemSpec& sys, const GridSpec& g)
{
	check_grid_axes(sys, g);
	for (const auto& v : free_params(sys))
		if (v.kind == ParamKind::C && v != g.x && v != g.y)
			throw std::invalid_argument(to_string(v) + " is free; fix it in the system file to compare");
}

// Integer membership of a two-variable slice over the grid, row-major
// with y outer.
inline std::vector<bool> slice_verdicts(const Region& slice, const GridSpec& g)
{
	std::vector<bool> out;
	for (auto y : grid_axis(g.ymin, g.ymax, g.step))
		for (auto x : grid_axis(g.xmin, g.xmax, g.step)) {
			Assignment pt{{g.x, Rational(x)}, {g.y, Rational(y)}};
			out.push_back(contains(slice, pt));
		}
	return out;
}

namespace detail {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body)
{
	if (threads == 0)
		threads = std::max(1u, std::thread::hardware_concurrency());
	threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
	std::atomic<std::size_t> next{0};
	std::exception_ptr failure;
	std::mutex failure_lock;
	auto worker = [&] {
		for (;;) {
			const std::size_t i = next.fetch_add(1);
			if (i >= n)
				return;
			try {
				body(i);
			} catch (...) {
				std::lock_guard lock(failure_lock);
				if (!failure)
					failure = std::current_exception();
				next = n;
			}
		}
	};
	std::vector<std::thread> pool;
	for (unsigned k = 1; k < threads; ++k)
		pool.emplace_back(worker);
	worker();
	for (auto& t : pool)
		t.join();
	if (failure)
		std::rethrow_exception(failure);
}

} // namespace detail

// Analytic verdict (slice membership, the other deadlines and jitters
// existentially quantified) against the simulator at every grid point.
// Results land at fixed indices, so the report does not depend on thread
// timing.
inline CompareReport grid_compare(const SystemSpec& sys, const GridSpec& g, const CompareOptions& opts = {})
{
	check_compare_axes(sys, g);
	const auto xs = grid_axis(g.xmin, g.xmax, g.step);
	const auto ys = grid_axis(g.ymin, g.ymax, g.step);
	CompareReport rep;
	if (xs.empty() || ys.empty())
		return rep;

	const Region slice = schedulability_slice(build_system_region(sys, opts.analysis), {g.x, g.y});
	const std::int64_t horizon = opts.horizon > 0 ? opts.horizon : default_horizon(sys);

	rep.points.resize(xs.size() * ys.size());
	detail::parallel_for(rep.points.size(), opts.threads, [&](std::size_t i) {
		GridPoint& p = rep.points[i];
		p.x = xs[i % xs.size()];
		p.y = ys[i / xs.size()];
		ConcretePoint pt{{g.x, Rational(p.x)}, {g.y, Rational(p.y)}};
		p.analytic = contains(slice, pt);
		p.simulated = opts.adversarial_blocking
		                  ? worst_case_blocking_mode(sys, pt, horizon, opts.max_offset_runs, false).schedulable
		                  : simulate(sys, pt, horizon, {{}, false}).schedulable;
	});

	for (const auto& p : rep.points) {
		if (p.analytic && p.simulated)
			++rep.both_schedulable;
		else if (!p.analytic && !p.simulated)
			++rep.both_unschedulable;
		else if (p.analytic)
			++rep.violations;
		else
			++rep.pessimism;
	}
	return rep;
}

inline std::string format_report_text(const CompareReport& r, const GridSpec& g)
{
	std::ostringstream os;
	os << "points " << r.points.size() << '\n';
	os << "both schedulable " << r.both_schedulable << '\n';
	os << "both unschedulable " << r.both_unschedulable << '\n';
	os << "pessimism " << r.pessimism << '\n';
	os << "soundness violations " << r.violations << '\n';
	for (const auto& p : r.points)
		if (p.analytic && !p.simulated)
			os << "VIOLATION " << to_string(g.x) << '=' << p.x << ' ' << to_string(g.y) << '=' << p.y << '\n';
	return os.str();
}

inline std::string format_report_json(const CompareReport& r, const GridSpec& g)
{
	using nlohmann::json;
	json doc{{"x", to_string(g.x)},
	         {"y", to_string(g.y)},
	         {"points", r.points.size()},
	         {"both_schedulable", r.both_schedulable},
	         {"both_unschedulable", r.both_unschedulable},
	         {"pessimism", r.pessimism},
	         {"soundness_violations", r.violations}};
	json bad = json::array();
	json pess = json::array();
	for (const auto& p : r.points) {
		if (p.analytic && !p.simulated)
			bad.push_back({p.x, p.y});
		if (!p.analytic && p.simulated)
			pess.push_back({p.x, p.y});
	}
	doc["violating_points"] = std::move(bad);
	doc["pessimistic_points"] = std::move(pess);
	return doc.dump(2) + "\n";
}

} // namespace parsched
