#include "ra/multiset.hh"

#include <cassert>
#include <cctype>
#include <limits>

namespace ra {

namespace {

void check_add(Count a, Count b) {
    if (a > std::numeric_limits<Count>::max() - b)
        throw Error("multiset count overflow");
}

} // namespace

bool Symbol::valid_name(std::string_view name) noexcept {
    if (name.empty() || name == "-")
        return false;
    for (unsigned char c : name) {
        if (c <= ' ' || c > '~')
            return false;
        if (c == '|' || c == '^' || c == '#')
            return false;
    }
    return true;
}

Symbol::Symbol(std::string name) : name_(std::move(name)) {
    if (!valid_name(name_))
        throw Error("invalid symbol name: '" + name_ + "'");
}

Multiset::Multiset(std::initializer_list<std::pair<Symbol, Count>> entries) {
    for (const auto& [sym, n] : entries)
        add(sym, n);
}

Multiset Multiset::single(const Symbol& s, Count n) {
    Multiset m;
    m.add(s, n);
    return m;
}

Count Multiset::count(const Symbol& s) const {
    auto it = counts_.find(s);
    return it == counts_.end() ? 0 : it->second;
}

Count Multiset::weight() const {
    Count total = 0;
    for (const auto& [sym, n] : counts_) {
        check_add(total, n);
        total += n;
    }
    return total;
}

SymbolSet Multiset::support() const {
    SymbolSet out;
    for (const auto& [sym, n] : counts_)
        out.insert(sym);
    return out;
}

bool Multiset::subset_of(const Multiset& other) const {
    for (const auto& [sym, n] : counts_)
        if (n > other.count(sym))
            return false;
    return true;
}

bool Multiset::disjoint_with(const SymbolSet& set) const {
    for (const auto& [sym, n] : counts_)
        if (set.contains(sym))
            return false;
    return true;
}

Multiset& Multiset::add(const Symbol& s, Count n) {
    if (n == 0)
        return *this;
    auto [it, inserted] = counts_.try_emplace(s, 0);
    check_add(it->second, n);
    it->second += n;
    return *this;
}

Multiset operator+(const Multiset& a, const Multiset& b) {
    Multiset out = a;
    for (const auto& [sym, n] : b.counts())
        out.add(sym, n);
    return out;
}

Multiset operator-(const Multiset& a, const Multiset& b) {
    if (!b.subset_of(a))
        throw Error("not a multisubset");
    Multiset out;
    for (const auto& [sym, n] : a.counts()) {
        Count keep = n - b.count(sym);
        out.add(sym, keep);
    }
    return out;
}

Multiset intersect(const Multiset& a, const Multiset& b) {
    Multiset out;
    for (const auto& [sym, n] : a.counts())
        out.add(sym, std::min(n, b.count(sym)));
    return out;
}

Multiset scale(const Multiset& m, Count n) {
    Multiset out;
    for (const auto& [sym, k] : m.counts()) {
        if (n != 0 && k > std::numeric_limits<Count>::max() / n)
            throw Error("multiset count overflow");
        out.add(sym, k * n);
    }
    return out;
}

Multiset stm(const Word& w) {
    if (w.size() > 63)
        throw Error("word too long for positional encoding (max 63 symbols)");
    Multiset out;
    Count c = Count{1} << (w.empty() ? 0 : w.size() - 1);
    for (const Symbol& s : w) {
        out.add(s, c);
        c >>= 1;
    }
    assert(w.empty() || c == 0);
    return out;
}

std::string to_string(const Multiset& m) {
    if (m.empty())
        return "-";
    std::string out;
    for (const auto& [sym, n] : m.counts()) {
        if (!out.empty())
            out += ' ';
        out += sym.name();
        if (n > 1) {
            out += '^';
            out += std::to_string(n);
        }
    }
    return out;
}

Multiset parse_multiset(std::string_view text) {
    Multiset out;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t'))
            ++i;
    };
    skip_ws();
    if (i < text.size() && text[i] == '-') {
        std::size_t j = i + 1;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t'))
            ++j;
        if (j == text.size())
            return out;
    }
    if (i == text.size())
        throw ParseError(1, i + 1, "empty multiset literal (use '-')");
    while (i < text.size()) {
        std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '^')
            ++i;
        std::string name(text.substr(start, i - start));
        if (!Symbol::valid_name(name))
            throw ParseError(1, start + 1, "invalid symbol name: '" + name + "'");
        Count n = 1;
        if (i < text.size() && text[i] == '^') {
            ++i;
            std::size_t num_start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                ++i;
            if (i == num_start)
                throw ParseError(1, num_start + 1, "expected count after '^'");
            std::string digits(text.substr(num_start, i - num_start));
            try {
                n = std::stoull(digits);
            } catch (const std::out_of_range&) {
                throw ParseError(1, num_start + 1, "count out of range: " + digits);
            }
            if (n == 0)
                throw ParseError(1, num_start + 1, "zero count not allowed");
        }
        out.add(Symbol(name), n);
        skip_ws();
    }
    return out;
}

std::string to_string(const Word& w) {
    std::string out;
    for (const Symbol& s : w)
        out += s.name();
    return out;
}

} // namespace ra
