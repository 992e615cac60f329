#pragma once

#include "polyhedron.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace parsched::lp {

enum class Status { Infeasible, Unbounded, Optimal };

struct Result {
	Status status = Status::Infeasible;
	Rational value = 0; // meaningful only when Optimal
};

namespace detail {

// Dictionary-form simplex over exact rationals with Bland's rule:
// maximize c.x subject to A x <= b, x >= 0.
class Tableau {
public:
	Tableau(std::vector<std::vector<Rational>> a, std::vector<Rational> b, std::vector<Rational> c)
	: m_(b.size()), n_(c.size()), a_(std::move(a)), b_(std::move(b)), c_(std::move(c))
	{
		for (std::size_t j = 0; j < n_; ++j)
			nonbasic_.push_back(j);
		for (std::size_t i = 0; i < m_; ++i)
			basic_.push_back(n_ + i);
	}

	Result solve()
	{
		if (!initialize())
			return {Status::Infeasible, 0};
		if (!iterate())
			return {Status::Unbounded, 0};
		return {Status::Optimal, v_};
	}

	bool feasible() { return initialize(); }

private:
	void pivot(std::size_t l, std::size_t e)
	{
		const Rational inv = 1 / a_[l][e];
		b_[l] *= inv;
		for (std::size_t j = 0; j < a_[l].size(); ++j)
			if (j != e)
				a_[l][j] *= inv;
		a_[l][e] = inv;

		for (std::size_t i = 0; i < m_; ++i) {
			if (i == l || a_[i][e] == 0)
				continue;
			const Rational coef = a_[i][e];
			b_[i] -= coef * b_[l];
			for (std::size_t j = 0; j < a_[i].size(); ++j)
				if (j != e && a_[l][j] != 0)
					a_[i][j] -= coef * a_[l][j];
			a_[i][e] = -coef * a_[l][e];
		}
		if (c_[e] != 0) {
			const Rational coef = c_[e];
			v_ += coef * b_[l];
			for (std::size_t j = 0; j < c_.size(); ++j)
				if (j != e && a_[l][j] != 0)
					c_[j] -= coef * a_[l][j];
			c_[e] = -coef * a_[l][e];
		}
		std::swap(basic_[l], nonbasic_[e]);
	}

	// Runs simplex iterations; false when unbounded.
	bool iterate()
	{
		for (;;) {
			std::optional<std::size_t> enter;
			for (std::size_t j = 0; j < c_.size(); ++j)
				if (c_[j] > 0 && (!enter || nonbasic_[j] < nonbasic_[*enter]))
					enter = j;
			if (!enter)
				return true;
			const std::size_t e = *enter;
			std::optional<std::size_t> leave;
			Rational best;
			for (std::size_t i = 0; i < m_; ++i) {
				if (a_[i][e] <= 0)
					continue;
				Rational ratio = b_[i] / a_[i][e];
				if (!leave || ratio < best || (ratio == best && basic_[i] < basic_[*leave])) {
					leave = i;
					best = ratio;
				}
			}
			if (!leave)
				return false;
			pivot(*leave, e);
		}
	}

	// Finds a feasible basis via the auxiliary x0 problem.
	bool initialize()
	{
		std::size_t k = 0;
		for (std::size_t i = 1; i < m_; ++i)
			if (b_[i] < b_[k])
				k = i;
		if (m_ == 0 || b_[k] >= 0)
			return true;

		const std::size_t aux_id = n_ + m_;
		const std::size_t aux_col = c_.size();
		std::vector<Rational> saved_c = c_;
		const std::vector<std::size_t> saved_nonbasic = nonbasic_;
		for (auto& row : a_)
			row.push_back(-1);
		nonbasic_.push_back(aux_id);
		c_.assign(c_.size() + 1, Rational(0));
		c_[aux_col] = -1;
		v_ = 0;

		pivot(k, aux_col);
		iterate();
		if (v_ < 0)
			return false;

		// Drive x0 out of the basis if it is still basic (at value 0).
		bool aux_basic_row_dropped = false;
		for (std::size_t i = 0; i < m_; ++i) {
			if (basic_[i] != aux_id)
				continue;
			bool pivoted = false;
			for (std::size_t j = 0; j < a_[i].size() && !pivoted; ++j) {
				if (a_[i][j] != 0) {
					pivot(i, j);
					pivoted = true;
				}
			}
			if (!pivoted) {
				// x0 == 0 identically; the row carries no information
				a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(i));
				b_.erase(b_.begin() + static_cast<std::ptrdiff_t>(i));
				basic_.erase(basic_.begin() + static_cast<std::ptrdiff_t>(i));
				--m_;
				aux_basic_row_dropped = true;
			}
			break;
		}

		if (!aux_basic_row_dropped) {
			std::size_t col = 0;
			while (nonbasic_[col] != aux_id)
				++col;
			for (auto& row : a_)
				row.erase(row.begin() + static_cast<std::ptrdiff_t>(col));
			nonbasic_.erase(nonbasic_.begin() + static_cast<std::ptrdiff_t>(col));
		}

		// Re-express the original objective over the current nonbasics.
		c_.assign(nonbasic_.size(), Rational(0));
		v_ = 0;
		for (std::size_t orig = 0; orig < saved_c.size(); ++orig) {
			const Rational& coef = saved_c[orig];
			if (coef == 0)
				continue;
			const std::size_t id = saved_nonbasic[orig];
			bool placed = false;
			for (std::size_t j = 0; j < nonbasic_.size() && !placed; ++j) {
				if (nonbasic_[j] == id) {
					c_[j] += coef;
					placed = true;
				}
			}
			for (std::size_t i = 0; i < m_ && !placed; ++i) {
				if (basic_[i] == id) {
					v_ += coef * b_[i];
					for (std::size_t j = 0; j < nonbasic_.size(); ++j)
						c_[j] -= coef * a_[i][j];
					placed = true;
				}
			}
		}
		return true;
	}

	std::size_t m_, n_;
	std::vector<std::vector<Rational>> a_;
	std::vector<Rational> b_;
	std::vector<Rational> c_;
	Rational v_ = 0;
	std::vector<std::size_t> nonbasic_;
	std::vector<std::size_t> basic_;
};

// Free variables are split into positive and negative parts.
inline Tableau build(const ConvexPolyhedron& p, const LinearExpr& objective)
{
	std::map<ParamVar, std::size_t> column;
	for (const auto& c : p.constraints())
		for (const auto& t : c.terms())
			column.try_emplace(t.first, 0);
	for (const auto& t : objective.terms())
		column.try_emplace(t.first, 0);
	std::size_t next = 0;
	for (auto& [v, col] : column)
		col = next++;
	const std::size_t n = 2 * column.size();

	std::vector<std::vector<Rational>> a;
	std::vector<Rational> b;
	auto emit = [&](const LinearConstraint& c, int sign) {
		std::vector<Rational> row(n, Rational(0));
		for (const auto& [v, coef] : c.terms()) {
			const std::size_t col = column.at(v);
			row[2 * col] = Rational(coef * sign);
			row[2 * col + 1] = Rational(-coef * sign);
		}
		a.push_back(std::move(row));
		b.emplace_back(c.bound() * sign);
	};
	for (const auto& c : p.constraints()) {
		emit(c, 1);
		if (c.relation() == Relation::EQ)
			emit(c, -1);
	}
	std::vector<Rational> obj(n, Rational(0));
	for (const auto& [v, coef] : objective.terms()) {
		const std::size_t col = column.at(v);
		obj[2 * col] = coef;
		obj[2 * col + 1] = -coef;
	}
	return Tableau(std::move(a), std::move(b), std::move(obj));
}

} // namespace detail

inline bool feasible(const ConvexPolyhedron& p)
{
	if (p.is_syntactically_empty())
		return false;
	if (p.constraints().empty())
		return true;
	return detail::build(p, LinearExpr{}).feasible();
}

// Exact supremum of objective over p.
inline Result maximize(const ConvexPolyhedron& p, const LinearExpr& objective)
{
	if (p.is_syntactically_empty())
		return {Status::Infeasible, 0};
	Result r = detail::build(p, objective).solve();
	if (r.status == Status::Optimal)
		r.value += objective.constant();
	return r;
}

inline Result minimize(const ConvexPolyhedron& p, const LinearExpr& objective)
{
	Result r = maximize(p, -objective);
	if (r.status == Status::Optimal)
		r.value = -r.value;
	return r;
}

} // namespace parsched::lp
