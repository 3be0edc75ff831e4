#include "fodot/number.h"

#include <cctype>

namespace fodot {

bool is_integer(const Number& n) { return denominator(n) == 1; }

std::optional<Number> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  if (i >= text.size()) return std::nullopt;
  BigInt whole = 0;
  BigInt frac = 0;
  BigInt scale = 1;
  bool digits = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    whole = whole * 10 + (text[i] - '0');
    digits = true;
  }
  Number result;
  if (i < text.size() && text[i] == '/') {
    ++i;
    BigInt den = 0;
    bool den_digits = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      den = den * 10 + (text[i] - '0');
      den_digits = true;
    }
    if (!digits || !den_digits || den == 0 || i != text.size()) return std::nullopt;
    result = Number(whole, den);
  } else {
    if (i < text.size() && text[i] == '.') {
      ++i;
      for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        frac = frac * 10 + (text[i] - '0');
        scale *= 10;
        digits = true;
      }
    }
    if (!digits || i != text.size()) return std::nullopt;
    result = Number(whole) + Number(frac, scale);
  }
  return negative ? Number(-result) : result;
}

bool has_finite_decimal(const Number& n) {
  BigInt d = denominator(n);
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

std::string number_to_string(const Number& n, bool force_point) {
  if (!has_finite_decimal(n)) {
    return numerator(n).str() + "/" + denominator(n).str();
  }
  BigInt num = numerator(n);
  BigInt den = denominator(n);
  std::string sign;
  if (num < 0) {
    sign = "-";
    num = -num;
  }
  BigInt whole = num / den;
  BigInt rest = num % den;
  std::string out = sign + whole.str();
  if (rest == 0) {
    if (force_point) out += ".0";
    return out;
  }
  out += ".";
  while (rest != 0) {
    rest *= 10;
    out += static_cast<char>('0' + static_cast<int>(rest / den));
    rest %= den;
  }
  return out;
}

Number floor_number(const Number& n) {
  BigInt num = numerator(n);
  BigInt den = denominator(n);
  BigInt q = num / den;
  if (num % den != 0 && num < 0) q -= 1;
  return Number(q);
}

Number ceil_number(const Number& n) {
  Number f = floor_number(n);
  return f == n ? f : Number(f + 1);
}

double to_double(const Number& n) { return n.convert_to<double>(); }

}  // namespace fodot
