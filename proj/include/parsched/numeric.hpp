#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace parsched {

// Time quantities and coefficients are unbounded integers; every
// intermediate of the geometry is an exact rational.
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

inline Integer gcd(const Integer& a, const Integer& b) { return boost::multiprecision::gcd(a, b); }
inline Integer lcm(const Integer& a, const Integer& b) { return boost::multiprecision::lcm(a, b); }

// Division rounding toward +inf; divisor must be positive.
inline Integer ceil_div(const Integer& a, const Integer& b)
{
	Integer q = a / b;
	if (a % b != 0 && a > 0)
		++q;
	return q;
}

// Division rounding toward -inf; divisor must be positive.
inline Integer floor_div(const Integer& a, const Integer& b)
{
	Integer q = a / b;
	if (a % b != 0 && a < 0)
		--q;
	return q;
}

inline Integer floor(const Rational& r)
{
	return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline Integer ceil(const Rational& r)
{
	return ceil_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline bool is_integral(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

inline std::int64_t to_int64(const Integer& v)
{
	if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
		throw std::overflow_error("value " + v.str() + " does not fit in 64 bits");
	return v.convert_to<std::int64_t>();
}

inline std::string to_string(const Integer& v) { return v.str(); }

inline std::string to_string(const Rational& v)
{
	if (is_integral(v))
		return boost::multiprecision::numerator(v).str();
	return boost::multiprecision::numerator(v).str() + "/" + boost::multiprecision::denominator(v).str();
}

} // namespace parsched
