#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace parsched {

// C: worst-case computation time, D: actual deadline (response-time
// bound), J: start jitter, B: blocking time (internal to the
// non-preemptive builder, never part of a returned region).
enum class ParamKind : std::uint8_t { C, D, J, B };

struct ParamVar {
	std::string task;
	ParamKind kind = ParamKind::C;

	friend auto operator<=>(const ParamVar&, const ParamVar&) = default;
	friend bool operator==(const ParamVar&, const ParamVar&) = default;
};

inline char kind_letter(ParamKind k)
{
	switch (k) {
	case ParamKind::C: return 'C';
	case ParamKind::D: return 'D';
	case ParamKind::J: return 'J';
	case ParamKind::B: return 'B';
	}
	return '?';
}

inline ParamVar cost_var(std::string task) { return {std::move(task), ParamKind::C}; }
inline ParamVar deadline_var(std::string task) { return {std::move(task), ParamKind::D}; }
inline ParamVar jitter_var(std::string task) { return {std::move(task), ParamKind::J}; }
inline ParamVar blocking_var(std::string task) { return {std::move(task), ParamKind::B}; }

// Canonical spelling, e.g. "C[tau1]".
inline std::string to_string(const ParamVar& v)
{
	std::string s(1, kind_letter(v.kind));
	s += '[';
	s += v.task;
	s += ']';
	return s;
}

// Accepts "C[id]" as well as the shorthands "D3" and "C_tau1".
inline std::optional<ParamVar> parse_param_var(std::string_view text)
{
	if (text.size() < 2)
		return std::nullopt;
	ParamVar v;
	switch (text.front()) {
	case 'C': v.kind = ParamKind::C; break;
	case 'D': v.kind = ParamKind::D; break;
	case 'J': v.kind = ParamKind::J; break;
	default: return std::nullopt;
	}
	auto rest = text.substr(1);
	if (rest.front() == '[') {
		if (rest.back() != ']' || rest.size() < 3)
			return std::nullopt;
		v.task = std::string(rest.substr(1, rest.size() - 2));
	} else {
		if (rest.front() == '_')
			rest.remove_prefix(1);
		if (rest.empty())
			return std::nullopt;
		v.task = std::string(rest);
	}
	return v;
}

} // namespace parsched
