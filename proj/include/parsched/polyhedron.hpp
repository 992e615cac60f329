#pragma once

#include "linear.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace parsched {

// Scheduling-point certificate behind one conjunct of a disjunct: task,
// job index h and interference vector n.
struct Witness {
	std::string task;
	std::int64_t job = 1;
	std::vector<Integer> counts;

	friend bool operator==(const Witness&, const Witness&) = default;
};

// Conjunction of linear constraints; no constraints means the whole space.
// Constraints are kept sorted and parallel duplicates are merged on insert,
// so two polyhedra built from the same constraint set compare equal.
class ConvexPolyhedron {
public:
	ConvexPolyhedron() = default;

	explicit ConvexPolyhedron(const std::vector<LinearConstraint>& constraints)
	{
		for (const auto& c : constraints)
			add(c);
	}

	static ConvexPolyhedron empty_set()
	{
		ConvexPolyhedron p;
		p.constraints_.push_back(LinearConstraint::never());
		return p;
	}

	const std::vector<LinearConstraint>& constraints() const { return constraints_; }
	std::size_t size() const { return constraints_.size(); }

	bool is_syntactically_empty() const
	{
		return constraints_.size() == 1 && constraints_.front().is_never();
	}

	void add(const LinearConstraint& c)
	{
		if (is_syntactically_empty() || c.is_always())
			return;
		if (c.is_never()) {
			*this = empty_set();
			return;
		}
		auto it = std::lower_bound(constraints_.begin(), constraints_.end(), c.terms(),
		                           [](const LinearConstraint& x, const Terms& t) { return x.terms() < t; });
		for (; it != constraints_.end() && it->terms() == c.terms(); ++it) {
			if (it->relation() == Relation::LE && c.relation() == Relation::LE) {
				if (c.bound() < it->bound())
					*it = c;
				return;
			}
			if (it->relation() == Relation::EQ && c.relation() == Relation::EQ) {
				if (c.bound() != it->bound())
					*this = empty_set();
				return;
			}
			if (it->relation() == Relation::EQ) {
				// existing equality, incoming LE
				if (it->bound() > c.bound())
					*this = empty_set();
				return;
			}
			// existing LE, incoming equality replaces it
			if (c.bound() > it->bound()) {
				*this = empty_set();
				return;
			}
			*it = c;
			return;
		}
		constraints_.insert(it, c);
	}

	ConvexPolyhedron conjoin(const ConvexPolyhedron& other) const
	{
		ConvexPolyhedron out = *this;
		for (const auto& c : other.constraints_)
			out.add(c);
		out.provenance_ = provenance_;
		out.provenance_.insert(out.provenance_.end(), other.provenance_.begin(), other.provenance_.end());
		return out;
	}

	std::set<ParamVar> variables() const
	{
		std::set<ParamVar> vars;
		for (const auto& c : constraints_)
			for (const auto& t : c.terms())
				vars.insert(t.first);
		return vars;
	}

	bool mentions(const ParamVar& v) const
	{
		return std::any_of(constraints_.begin(), constraints_.end(),
		                   [&](const LinearConstraint& c) { return c.mentions(v); });
	}

	bool contains(const Assignment& point) const
	{
		return std::all_of(constraints_.begin(), constraints_.end(),
		                   [&](const LinearConstraint& c) { return c.satisfied_by(point); });
	}

	ConvexPolyhedron substitute(const Assignment& partial) const
	{
		ConvexPolyhedron out;
		for (const auto& c : constraints_)
			out.add(c.substitute(partial));
		out.provenance_ = provenance_;
		return out;
	}

	const std::vector<Witness>& provenance() const { return provenance_; }
	void add_witness(Witness w) { provenance_.push_back(std::move(w)); }
	void set_provenance(std::vector<Witness> w) { provenance_ = std::move(w); }

	// Equality ignores provenance.
	friend bool operator==(const ConvexPolyhedron& a, const ConvexPolyhedron& b)
	{
		return a.constraints_ == b.constraints_;
	}

private:
	std::vector<LinearConstraint> constraints_;
	std::vector<Witness> provenance_;
};

} // namespace parsched
