#pragma once

#include "region.hpp"

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace parsched {

namespace detail {

// LE constraints as they are; an equality becomes the two inequalities
// lhs <= b and -lhs <= -b.
inline std::vector<LinearConstraint> as_inequalities(const LinearConstraint& c)
{
	if (c.relation() == Relation::LE)
		return {c};
	return {LinearConstraint::le(c.lhs(), LinearExpr(c.bound())), LinearConstraint::ge(c.lhs(), LinearExpr(c.bound()))};
}

inline std::string format_witness(const Witness& w)
{
	std::string s = "task=" + w.task + " job=" + std::to_string(w.job) + " n=(";
	for (std::size_t i = 0; i < w.counts.size(); ++i) {
		if (i)
			s += ',';
		s += w.counts[i].str();
	}
	return s + ")";
}

} // namespace detail

// One block per disjunct, "DISJUNCT k" then one "a*X + b*Y <= c" line per
// constraint. With explain, "# witness ..." lines name the scheduling
// points behind the disjunct.
inline std::string format_region_text(const Region& r, bool explain = false)
{
	std::ostringstream os;
	if (r.has_no_disjuncts()) {
		os << "EMPTY\n";
		return os.str();
	}
	std::size_t k = 1;
	for (const auto& d : r.disjuncts()) {
		os << "DISJUNCT " << k++ << '\n';
		if (explain)
			for (const auto& w : d.provenance())
				os << "# witness " << detail::format_witness(w) << '\n';
		for (const auto& c : d.constraints())
			for (const auto& ineq : detail::as_inequalities(c))
				os << to_string(ineq) << '\n';
	}
	return os.str();
}

inline std::string format_region_json(const Region& r, bool explain = false)
{
	using nlohmann::json;
	json disjuncts = json::array();
	for (const auto& d : r.disjuncts()) {
		json cs = json::array();
		for (const auto& c : d.constraints())
			for (const auto& ineq : detail::as_inequalities(c)) {
				json terms = json::object();
				for (const auto& [v, a] : ineq.terms())
					terms[to_string(v)] = a.str();
				cs.push_back({{"terms", std::move(terms)}, {"le", ineq.bound().str()}});
			}
		json o{{"constraints", std::move(cs)}};
		if (explain) {
			json ws = json::array();
			for (const auto& w : d.provenance()) {
				json counts = json::array();
				for (const auto& n : w.counts)
					counts.push_back(n.str());
				ws.push_back({{"task", w.task}, {"job", w.job}, {"n", std::move(counts)}});
			}
			o["witnesses"] = std::move(ws);
		}
		disjuncts.push_back(std::move(o));
	}
	return json{{"disjuncts", std::move(disjuncts)}}.dump(2) + "\n";
}

// "D[3] in [12, 20]"; unbounded ends print as -inf / inf.
inline std::string format_interval(const std::string& name, const Interval& iv)
{
	std::string s = name + " in ";
	s += iv.lo ? "[" + to_string(*iv.lo) : "(-inf";
	s += ", ";
	s += iv.hi ? to_string(*iv.hi) + "]" : "inf)";
	return s;
}

} // namespace parsched
