// Finite multisets over a symbol universe, the base currency of the library.
//
// A Multiset maps symbols to positive counts; zero-count entries are never
// stored, so equality of the underlying maps is multiset equality. Counts are
// machine-width unsigned integers and every arithmetic operation checks for
// overflow and throws instead of wrapping.

#ifndef RA_MULTISET_HH
#define RA_MULTISET_HH

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ra/error.hh"

namespace ra {

using Count = std::uint64_t;

// A symbol is an immutable name token. Valid names are non-empty, printable
// ASCII without whitespace and without '|', '^', '#' (all three are
// metacharacters of the textual formats), and the name is not the single
// character '-' (the textual form of the empty multiset).
class Symbol {
public:
    explicit Symbol(std::string name);

    const std::string& name() const noexcept { return name_; }

    static bool valid_name(std::string_view name) noexcept;

    auto operator<=>(const Symbol&) const = default;

private:
    std::string name_;
};

using SymbolSet = std::set<Symbol>;
using Word = std::vector<Symbol>;

class Multiset {
public:
    Multiset() = default;
    Multiset(std::initializer_list<std::pair<Symbol, Count>> entries);

    static Multiset single(const Symbol& s, Count n = 1);

    Count count(const Symbol& s) const;
    bool empty() const noexcept { return counts_.begin() == counts_.end(); }
    Count weight() const; // total number of occurrences, throws on overflow
    SymbolSet support() const;

    // this(a) <= other(a) for every symbol a
    bool subset_of(const Multiset& other) const;
    bool disjoint_with(const SymbolSet& set) const;

    // Adds n copies of s (n may be 0, a no-op). Throws on count overflow.
    Multiset& add(const Symbol& s, Count n = 1);

    const std::map<Symbol, Count>& counts() const noexcept { return counts_; }

    auto operator<=>(const Multiset&) const = default;

private:
    std::map<Symbol, Count> counts_;
};

Multiset operator+(const Multiset& a, const Multiset& b);
// Requires b.subset_of(a); throws Error("not a multisubset") otherwise.
Multiset operator-(const Multiset& a, const Multiset& b);
// Pointwise minimum.
Multiset intersect(const Multiset& a, const Multiset& b);
// Pointwise multiplication by n; scale by 0 gives the empty multiset.
Multiset scale(const Multiset& m, Count n);

// Positional encoding of a word as a multiset: the i-th symbol of an n-symbol
// word contributes 2^(n-i) ... 1 copies, i.e. counts halve left to right and
// the last symbol contributes exactly one copy. The encoding is injective and
// the weight of the result is 2^n - 1. Throws once 2^(n-1) does not fit in
// Count. The empty word maps to the empty multiset.
Multiset stm(const Word& w);

// Textual form: symbol names in lexicographic order, '^count' appended when
// the count exceeds 1, entries separated by single spaces; the empty multiset
// prints as '-'.
std::string to_string(const Multiset& m);
// Inverse of to_string, also accepting any token order and repeated entries
// (counts accumulate). Positions in errors are column offsets into the input.
Multiset parse_multiset(std::string_view text);

std::string to_string(const Word& w);

} // namespace ra

#endif
