#pragma once

#include <string>

namespace attnswap {

struct Rgba {
    double r = 0.0;  // 0..255
    double g = 0.0;
    double b = 0.0;
    double a = 1.0;  // 0..1
};

struct BoxSides {
    double top = 0.0;
    double right = 0.0;
    double bottom = 0.0;
    double left = 0.0;
};

// Accepts rgb()/rgba(), #rgb/#rrggbb/#rrggbbaa and a small named-color table.
// Throws UnparsableAttribute; `attr` only labels the error message.
Rgba parse_css_color(const std::string& attr, const std::string& value);

// Leading decimal number with an optional unit suffix (px, pt, em, %, ...).
double parse_css_length(const std::string& attr, const std::string& value);

// CSS shorthand expansion: 1 value applies to all sides, 2 -> (vertical,
// horizontal), 3 -> (top, horizontal, bottom), 4 -> (top, right, bottom, left).
BoxSides parse_box_shorthand(const std::string& attr, const std::string& value);

}  // namespace attnswap
