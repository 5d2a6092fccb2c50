#include "attnswap/css.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>
#include <vector>

#include "attnswap/error.hpp"

namespace attnswap {

namespace {

[[noreturn]] void bad_attr(const std::string& attr, const std::string& value,
                           const std::string& why) {
    fail(ErrorCode::UnparsableAttribute, attr + ": \"" + value + "\" (" + why + ")");
}

std::string trimmed_lower(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(begin, end - begin + 1);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

int hex_nibble(char c, const std::string& attr, const std::string& value) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    bad_attr(attr, value, "invalid hex digit");
}

double parse_number(const std::string& text, const std::string& attr, const std::string& value) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || end != begin + text.size()) {
        bad_attr(attr, value, "expected a number, got \"" + text + "\"");
    }
    return v;
}

std::vector<std::string> split_args(const std::string& body) {
    std::vector<std::string> args;
    std::string current;
    for (char c : body) {
        if (c == ',') {
            args.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    args.push_back(current);
    return args;
}

const std::map<std::string, Rgba>& named_colors() {
    static const std::map<std::string, Rgba> table = {
        {"transparent", {0, 0, 0, 0}}, {"none", {0, 0, 0, 0}},
        {"black", {0, 0, 0, 1}},       {"white", {255, 255, 255, 1}},
        {"red", {255, 0, 0, 1}},       {"green", {0, 128, 0, 1}},
        {"lime", {0, 255, 0, 1}},      {"blue", {0, 0, 255, 1}},
        {"yellow", {255, 255, 0, 1}},  {"cyan", {0, 255, 255, 1}},
        {"magenta", {255, 0, 255, 1}}, {"gray", {128, 128, 128, 1}},
        {"grey", {128, 128, 128, 1}},  {"silver", {192, 192, 192, 1}},
    };
    return table;
}

}  // namespace

Rgba parse_css_color(const std::string& attr, const std::string& value) {
    std::string v = trimmed_lower(value);
    if (v.empty()) bad_attr(attr, value, "empty color");

    if (auto it = named_colors().find(v); it != named_colors().end()) {
        return it->second;
    }

    if (v[0] == '#') {
        std::string hex = v.substr(1);
        auto nyb = [&](std::size_t i) { return hex_nibble(hex[i], attr, value); };
        if (hex.size() == 3) {
            return {static_cast<double>(nyb(0) * 17), static_cast<double>(nyb(1) * 17),
                    static_cast<double>(nyb(2) * 17), 1.0};
        }
        if (hex.size() == 6 || hex.size() == 8) {
            double r = nyb(0) * 16 + nyb(1);
            double g = nyb(2) * 16 + nyb(3);
            double b = nyb(4) * 16 + nyb(5);
            double a = hex.size() == 8 ? (nyb(6) * 16 + nyb(7)) / 255.0 : 1.0;
            return {r, g, b, a};
        }
        bad_attr(attr, value, "hex color must have 3, 6 or 8 digits");
    }

    bool is_rgba = v.rfind("rgba(", 0) == 0;
    bool is_rgb = v.rfind("rgb(", 0) == 0;
    if ((is_rgb || is_rgba) && v.back() == ')') {
        std::string body = v.substr(is_rgba ? 5 : 4, v.size() - (is_rgba ? 6 : 5));
        std::vector<std::string> args = split_args(body);
        std::size_t expected = is_rgba ? 4 : 3;
        if (args.size() != expected) {
            bad_attr(attr, value, "expected " + std::to_string(expected) + " components");
        }
        Rgba out;
        out.r = parse_number(trimmed_lower(args[0]), attr, value);
        out.g = parse_number(trimmed_lower(args[1]), attr, value);
        out.b = parse_number(trimmed_lower(args[2]), attr, value);
        out.a = is_rgba ? parse_number(trimmed_lower(args[3]), attr, value) : 1.0;
        for (double c : {out.r, out.g, out.b}) {
            if (c < 0 || c > 255) bad_attr(attr, value, "channel outside 0..255");
        }
        if (out.a < 0 || out.a > 1) bad_attr(attr, value, "opacity outside 0..1");
        return out;
    }

    bad_attr(attr, value, "unrecognized color syntax");
}

double parse_css_length(const std::string& attr, const std::string& value) {
    std::string v = trimmed_lower(value);
    if (v.empty()) bad_attr(attr, value, "empty value");
    const char* begin = v.c_str();
    char* end = nullptr;
    double number = std::strtod(begin, &end);
    if (end == begin) bad_attr(attr, value, "expected a leading number");
    // The remainder must be a plain unit suffix (px, pt, em, %, ...).
    for (const char* p = end; *p != '\0'; ++p) {
        if (!std::isalpha(static_cast<unsigned char>(*p)) && *p != '%') {
            bad_attr(attr, value, "unexpected trailing characters");
        }
    }
    return number;
}

BoxSides parse_box_shorthand(const std::string& attr, const std::string& value) {
    std::istringstream in(value);
    std::vector<double> parts;
    std::string token;
    while (in >> token) {
        parts.push_back(parse_css_length(attr, token));
    }
    BoxSides sides;
    switch (parts.size()) {
        case 1:
            sides = {parts[0], parts[0], parts[0], parts[0]};
            break;
        case 2:
            sides = {parts[0], parts[1], parts[0], parts[1]};
            break;
        case 3:
            sides = {parts[0], parts[1], parts[2], parts[1]};
            break;
        case 4:
            sides = {parts[0], parts[1], parts[2], parts[3]};
            break;
        default:
            bad_attr(attr, value, "shorthand takes 1 to 4 values");
    }
    return sides;
}

}  // namespace attnswap
