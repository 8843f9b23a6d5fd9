#pragma once

#include <winnowopt/error.hpp>

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

namespace winnowopt {

/// Exact rational number; Q-sort values never touch floating point.
using Rational = mpq_class;

/** Parses an exact rational literal: an optional sign, digits, an optional decimal fraction, or the form `n/d`.
 * Decimal literals are converted exactly, e.g. `13.50` becomes 27/2.  Throws `DataError` on malformed input. */
inline Rational parse_rational(std::string_view text)
{
    auto fail = [&] { return DataError("malformed rational literal '" + std::string(text) + "'"); };
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() and (text[pos] == '-' or text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    std::size_t scale = 0;
    bool seen_digit = false;
    for (; pos < text.size() and std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
        digits += text[pos];
        seen_digit = true;
    }
    if (pos < text.size() and text[pos] == '.') {
        ++pos;
        for (; pos < text.size() and std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
            digits += text[pos];
            ++scale;
            seen_digit = true;
        }
    }
    if (not seen_digit)
        throw fail();

    mpz_class numerator(digits, 10);
    mpz_class denominator = 1;
    for (std::size_t i = 0; i < scale; ++i)
        denominator *= 10;

    if (pos < text.size() and text[pos] == '/') {
        if (scale != 0)
            throw fail();
        ++pos;
        std::string den;
        for (; pos < text.size() and std::isdigit(static_cast<unsigned char>(text[pos])); ++pos)
            den += text[pos];
        if (den.empty())
            throw fail();
        denominator = mpz_class(den, 10);
        if (denominator == 0)
            throw DataError("zero denominator in rational literal '" + std::string(text) + "'");
    }
    if (pos != text.size())
        throw fail();

    Rational result(numerator, denominator);
    result.canonicalize();
    if (negative)
        result = -result;
    return result;
}

/** Canonical text of a rational: a terminating decimal with no trailing zeros when the denominator has only the
 * prime factors 2 and 5, `n/d` otherwise.  `parse_rational` inverts it exactly. */
inline std::string format_rational(const Rational &value)
{
    mpz_class den = value.get_den();
    std::size_t twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
    if (den != 1)
        return value.get_num().get_str() + "/" + value.get_den().get_str();

    std::size_t scale = std::max(twos, fives);
    if (scale == 0)
        return value.get_num().get_str();
    mpz_class ten_pow = 1;
    for (std::size_t i = 0; i < scale; ++i)
        ten_pow *= 10;
    mpz_class scaled = value.get_num() * (ten_pow / value.get_den());
    bool negative = scaled < 0;
    if (negative)
        scaled = -scaled;
    std::string digits = scaled.get_str();
    if (digits.size() <= scale)
        digits.insert(0, scale - digits.size() + 1, '0');
    digits.insert(digits.size() - scale, ".");
    return (negative ? "-" : "") + digits;
}

}
