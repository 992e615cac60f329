#pragma once

#include "linear.hpp"
#include "model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parsched {

// Integer values for the free parameters of a system.
using ConcretePoint = Assignment;

struct PointSyntaxError : std::invalid_argument {
	using std::invalid_argument::invalid_argument;
};

// Parses "C[1]=3,D3=12". Values must be non-negative integers.
inline ConcretePoint parse_point(std::string_view text)
{
	ConcretePoint pt;
	while (!text.empty()) {
		const auto comma = text.find(',');
		std::string_view item = text.substr(0, comma);
		text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
		while (!item.empty() && item.front() == ' ')
			item.remove_prefix(1);
		while (!item.empty() && item.back() == ' ')
			item.remove_suffix(1);
		if (item.empty())
			continue;
		const auto eq = item.find('=');
		if (eq == std::string_view::npos)
			throw PointSyntaxError("expected VAR=INT, got '" + std::string(item) + "'");
		auto var = parse_param_var(item.substr(0, eq));
		if (!var)
			throw PointSyntaxError("bad variable name '" + std::string(item.substr(0, eq)) + "'");
		const std::string value(item.substr(eq + 1));
		if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
			throw PointSyntaxError("value of " + to_string(*var) + " must be a non-negative integer");
		if (!pt.emplace(*var, Rational(Integer(value))).second)
			throw PointSyntaxError(to_string(*var) + " assigned twice");
	}
	return pt;
}

// Free parameters of a system in file order: C, D, J of each task.
inline std::vector<ParamVar> free_params(const SystemSpec& sys)
{
	std::vector<ParamVar> out;
	for (const auto& t : sys.tasks()) {
		if (t.cost.is_free())
			out.push_back(cost_var(t.id));
		if (t.deadline.is_free())
			out.push_back(deadline_var(t.id));
		if (t.jitter.is_free())
			out.push_back(jitter_var(t.id));
	}
	return out;
}

inline bool is_free_param(const SystemSpec& sys, const ParamVar& v)
{
	if (!sys.has_task(v.task))
		return false;
	const TaskSpec& t = sys.task(v.task);
	switch (v.kind) {
	case ParamKind::C: return t.cost.is_free();
	case ParamKind::D: return t.deadline.is_free();
	case ParamKind::J: return t.jitter.is_free();
	case ParamKind::B: return false;
	}
	return false;
}

// Task parameters with every free value taken from a point.
struct ResolvedTask {
	std::int64_t cost = 0;
	std::optional<std::int64_t> deadline; // absent: free and not assigned
};

namespace detail {

inline std::int64_t point_value(const ConcretePoint& pt, const ParamVar& v)
{
	auto it = pt.find(v);
	if (it == pt.end())
		throw MissingAssignment(v);
	if (!is_integral(it->second) || it->second < 0)
		throw std::invalid_argument(to_string(v) + " must be a non-negative integer");
	return to_int64(boost::multiprecision::numerator(it->second));
}

} // namespace detail

// Free C must be assigned; D is optional. Releases are synchronous, so
// jitter values are not needed.
inline ResolvedTask resolve_task(const TaskSpec& t, const ConcretePoint& pt)
{
	ResolvedTask r;
	r.cost = t.cost.is_fixed() ? to_int64(t.cost.value()) : detail::point_value(pt, cost_var(t.id));
	if (t.deadline.is_fixed())
		r.deadline = to_int64(t.deadline.value());
	else if (pt.count(deadline_var(t.id)))
		r.deadline = detail::point_value(pt, deadline_var(t.id));
	return r;
}

} // namespace parsched
