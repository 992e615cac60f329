#pragma once

#include "model.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace parsched {

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void syntax_error(const std::string& where, const std::string& msg)
{
	throw SpecError(SpecErrorKind::Syntax, where + ": " + msg);
}

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
	if (!obj.is_object())
		syntax_error(where, "expected an object");
	std::set<std::string> ok(allowed.begin(), allowed.end());
	for (const auto& [key, value] : obj.items())
		if (!ok.count(key))
			syntax_error(where, "unknown field '" + key + "'");
}

inline const json& field(const json& obj, const std::string& where, const char* key)
{
	auto it = obj.find(key);
	if (it == obj.end())
		syntax_error(where, std::string("missing field '") + key + "'");
	return *it;
}

inline std::string string_field(const json& obj, const std::string& where, const char* key)
{
	const json& v = field(obj, where, key);
	if (!v.is_string())
		syntax_error(where, std::string("field '") + key + "' must be a string");
	return v.get<std::string>();
}

inline Integer to_integer(const json& v, const std::string& where, const char* key)
{
	if (v.is_number_unsigned())
		return Integer(v.get<std::uint64_t>());
	if (v.is_number_integer())
		return Integer(v.get<std::int64_t>());
	syntax_error(where, std::string("field '") + key + "' must be an integer");
}

inline Integer integer_field(const json& obj, const std::string& where, const char* key)
{
	return to_integer(field(obj, where, key), where, key);
}

inline Param param_field(const json& obj, const std::string& where, const char* key, Param fallback)
{
	auto it = obj.find(key);
	if (it == obj.end())
		return fallback;
	if (it->is_string()) {
		if (it->get<std::string>() != "free")
			syntax_error(where, std::string("field '") + key + "' must be an integer or \"free\"");
		return Param::free();
	}
	return Param::fixed(to_integer(*it, where, key));
}

inline json integer_json(const Integer& v)
{
	if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max())
		return json(v.convert_to<std::uint64_t>());
	return json(to_int64(v));
}

inline json param_json(const Param& p) { return p.is_free() ? json("free") : integer_json(p.value()); }

} // namespace detail

// Reads a system description: a JSON document with the top-level arrays
// "resources", "tasks" and "pipelines". Omitted D defaults to free; omitted
// J defaults to 0 for standalone tasks and to free for pipeline members.
inline SystemSpec parse_system(const std::string& text)
{
	using detail::json;
	json doc;
	try {
		doc = json::parse(text);
	} catch (const json::parse_error& e) {
		throw SpecError(SpecErrorKind::Syntax, "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
	}
	detail::check_keys(doc, "document", {"resources", "tasks", "pipelines"});
	auto array = [&](const char* key) -> json {
		auto it = doc.find(key);
		if (it == doc.end())
			return json::array();
		if (!it->is_array())
			detail::syntax_error("document", std::string("'") + key + "' must be an array");
		return *it;
	};

	std::vector<ResourceSpec> resources;
	for (std::size_t i = 0; const auto& r : array("resources")) {
		const std::string where = "resources[" + std::to_string(i++) + "]";
		detail::check_keys(r, where, {"id", "policy"});
		ResourceSpec spec;
		spec.id = detail::string_field(r, where, "id");
		const std::string policy = detail::string_field(r, where, "policy");
		if (policy == "preemptive")
			spec.policy = Policy::PreemptiveFP;
		else if (policy == "nonpreemptive")
			spec.policy = Policy::NonPreemptiveFP;
		else
			detail::syntax_error(where, "policy must be \"preemptive\" or \"nonpreemptive\"");
		resources.push_back(std::move(spec));
	}

	std::vector<PipelineSpec> pipelines;
	std::set<std::string> pipelined;
	for (std::size_t i = 0; const auto& p : array("pipelines")) {
		const std::string where = "pipelines[" + std::to_string(i++) + "]";
		detail::check_keys(p, where, {"id", "period", "e2e_deadline", "tasks"});
		PipelineSpec spec;
		spec.id = detail::string_field(p, where, "id");
		spec.period = detail::integer_field(p, where, "period");
		spec.e2e_deadline = detail::integer_field(p, where, "e2e_deadline");
		const json& tasks = detail::field(p, where, "tasks");
		if (!tasks.is_array())
			detail::syntax_error(where, "'tasks' must be an array");
		for (const auto& t : tasks) {
			if (!t.is_string())
				detail::syntax_error(where, "task references must be strings");
			spec.tasks.push_back(t.get<std::string>());
			pipelined.insert(spec.tasks.back());
		}
		pipelines.push_back(std::move(spec));
	}

	std::vector<TaskSpec> tasks;
	for (std::size_t i = 0; const auto& t : array("tasks")) {
		const std::string where = "tasks[" + std::to_string(i++) + "]";
		detail::check_keys(t, where, {"id", "resource", "period", "priority", "max_deadline", "C", "D", "J"});
		TaskSpec spec;
		spec.id = detail::string_field(t, where, "id");
		spec.resource = detail::string_field(t, where, "resource");
		spec.period = detail::integer_field(t, where, "period");
		const Integer prio = detail::integer_field(t, where, "priority");
		if (prio > std::numeric_limits<std::int64_t>::max() || prio < std::numeric_limits<std::int64_t>::min())
			detail::syntax_error(where, "priority out of range");
		spec.priority = prio.convert_to<std::int64_t>();
		spec.max_deadline = detail::integer_field(t, where, "max_deadline");
		spec.cost = detail::param_field(t, where, "C", Param::free());
		if (!t.contains("C"))
			detail::syntax_error(where, "missing field 'C'");
		spec.deadline = detail::param_field(t, where, "D", Param::free());
		spec.jitter = detail::param_field(t, where, "J", pipelined.count(spec.id) ? Param::free() : Param::fixed(0));
		tasks.push_back(std::move(spec));
	}

	return SystemSpec(std::move(resources), std::move(tasks), std::move(pipelines));
}

inline std::string serialize_system(const SystemSpec& sys)
{
	using detail::json;
	json doc;
	doc["resources"] = json::array();
	for (const auto& r : sys.resources())
		doc["resources"].push_back(
		    {{"id", r.id}, {"policy", r.policy == Policy::PreemptiveFP ? "preemptive" : "nonpreemptive"}});
	doc["tasks"] = json::array();
	for (const auto& t : sys.tasks()) {
		json o;
		o["id"] = t.id;
		o["resource"] = t.resource;
		o["period"] = detail::integer_json(t.period);
		o["priority"] = t.priority;
		o["max_deadline"] = detail::integer_json(t.max_deadline);
		o["C"] = detail::param_json(t.cost);
		o["D"] = detail::param_json(t.deadline);
		o["J"] = detail::param_json(t.jitter);
		doc["tasks"].push_back(std::move(o));
	}
	doc["pipelines"] = json::array();
	for (const auto& p : sys.pipelines()) {
		json o;
		o["id"] = p.id;
		o["period"] = detail::integer_json(p.period);
		o["e2e_deadline"] = detail::integer_json(p.e2e_deadline);
		o["tasks"] = p.tasks;
		doc["pipelines"].push_back(std::move(o));
	}
	return doc.dump(2) + "\n";
}

} // namespace parsched
