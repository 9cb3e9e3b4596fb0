#include "shiftconv/rational.hpp"

#include <cctype>

namespace shiftconv {

std::optional<Rat> parse_rat(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto slash = text.find('/');
    const std::string num = text.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    if (!is_int(num) || !is_int(den)) return std::nullopt;
    // mpz rejects an explicit leading '+'
    auto strip = [](const std::string& s) { return s[0] == '+' ? s.substr(1) : s; };
    Int n(strip(num)), d(strip(den));
    if (d == 0) return std::nullopt;
    return rat(n, d);
}

std::string rat_str(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace shiftconv
