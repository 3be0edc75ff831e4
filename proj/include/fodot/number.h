// Exact rational numbers used for Int and Real values throughout the engine.
#ifndef FODOT_NUMBER_H_
#define FODOT_NUMBER_H_

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace fodot {

using Number = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

bool is_integer(const Number& n);

// Parses "12", "-3", "18.5", "1/3". Returns nullopt on malformed input.
std::optional<Number> parse_number(std::string_view text);

// Finite decimal rendering when one exists ("18.5", "-2"), "p/q" otherwise.
// When force_point is set an integral value is printed as "2.0".
std::string number_to_string(const Number& n, bool force_point = false);

bool has_finite_decimal(const Number& n);

Number floor_number(const Number& n);
Number ceil_number(const Number& n);

double to_double(const Number& n);

}  // namespace fodot

#endif  // FODOT_NUMBER_H_
