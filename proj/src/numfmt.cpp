#include "mitotk/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "mitotk/error.hpp"

namespace mitotk {

std::string format_full(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double x, int places) {
    if (places < 0 || places > 20)
        throw Error("format_fixed: places out of range");
    if (!std::isfinite(x))
        throw Error("format_fixed: non-finite value");

    // 70 fractional digits cover the exact expansion of any double whose
    // rounding decision is not already obvious, so the half-away-from-zero
    // rule below operates on true decimal digits.
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.70f", std::fabs(x));
    char* dot = std::strchr(buf, '.');

    std::string digits(buf, dot);            // integer part
    digits.append(dot + 1, dot + 1 + places); // kept fractional digits
    bool round_away = dot[1 + places] >= '5';
    if (round_away) {
        int i = static_cast<int>(digits.size()) - 1;
        for (; i >= 0; --i) {
            if (digits[i] == '9') {
                digits[i] = '0';
            } else {
                ++digits[i];
                break;
            }
        }
        if (i < 0)
            digits.insert(digits.begin(), '1');
    }

    std::string out;
    if (std::signbit(x) && digits.find_first_not_of('0') != std::string::npos)
        out.push_back('-');
    std::size_t split = digits.size() - static_cast<std::size_t>(places);
    out.append(digits, 0, split);
    if (out.empty() || out == "-")
        out.push_back('0');
    if (places > 0) {
        out.push_back('.');
        out.append(digits, split, std::string::npos);
    }
    // strip redundant leading zeros ("00.159" -> "0.159")
    std::size_t start = out[0] == '-' ? 1 : 0;
    std::size_t firstsig = start;
    while (firstsig + 1 < out.size() && out[firstsig] == '0' && out[firstsig + 1] != '.')
        ++firstsig;
    if (firstsig > start)
        out.erase(start, firstsig - start);
    return out;
}

std::string format_pct1(double fraction) {
    return format_fixed(fraction * 100.0, 1);
}

std::string format_ba_cell(double sensitivity, double specificity) {
    float s = std::strtof(format_fixed(sensitivity, 3).c_str(), nullptr);
    float p = std::strtof(format_fixed(specificity, 3).c_str(), nullptr);
    float ba = (s + p) * 0.5f;
    return format_fixed(static_cast<double>(ba), 3);
}

} // namespace mitotk
