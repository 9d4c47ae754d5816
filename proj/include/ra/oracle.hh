#pragma once

// Ground-truth machinery for the test suite and the `lang` subcommand:
// exhaustive language enumeration up to a length cap, string-level set
// algebra on the enumerated slices, membership predicates, and the
// built-in example automata everything is checked against.

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <ra/model.hh>
#include <ra/semantics.hh>

namespace ra {

// A finite slice of a language: exactly the member words over @p alphabet
// of length at most @p max_length.
struct FiniteLanguageSample {
    SymbolSet alphabet;
    std::size_t max_length = 0;
    std::set<Word> words;

    bool contains(const Word& w) const { return words.count(w) > 0; }

    friend bool operator==(const FiniteLanguageSample&, const FiniteLanguageSample&) = default;
};

// A language given by a total membership test instead of a machine.
struct PredicateLanguage {
    SymbolSet alphabet;
    std::function<bool(const Word&)> membership;
    std::string description;
};

// Newline-separated member words, shortest first and lexicographic within
// a length; the empty word prints as `<eps>`.
std::string to_lines(const FiniteLanguageSample& s);

// Every word over A's input alphabet of length <= max_length that is
// accepted under @p bound in @p mode.
FiniteLanguageSample enumerate_language(const ReactionAutomaton& a, std::size_t max_length,
                                        const BoundSpec& bound,
                                        InputMode mode = InputMode::ordinary);

// The slice of a predicate language.
FiniteLanguageSample enumerate_language(const PredicateLanguage& p, std::size_t max_length);

// The slice of a DFA's language.
FiniteLanguageSample enumerate_language(const Dfa& d, std::size_t max_length);

// Set algebra on slices. Binary set operations take the combined alphabet
// and the smaller of the two caps. The building operations (concatenation,
// shuffle, closures, images) take an explicit result cap and throw Error
// when an operand slice is too short to make the truncated result exact.
FiniteLanguageSample sample_union(const FiniteLanguageSample& s1, const FiniteLanguageSample& s2);
FiniteLanguageSample sample_intersection(const FiniteLanguageSample& s1,
                                         const FiniteLanguageSample& s2);
FiniteLanguageSample sample_concat(const FiniteLanguageSample& s1, const FiniteLanguageSample& s2,
                                   std::size_t max_length);
FiniteLanguageSample sample_shuffle(const FiniteLanguageSample& s1, const FiniteLanguageSample& s2,
                                    std::size_t max_length);
FiniteLanguageSample sample_star(const FiniteLanguageSample& s, std::size_t max_length);
FiniteLanguageSample sample_plus(const FiniteLanguageSample& s, std::size_t max_length);
// Words w with x.w (left) or w.x (right) in the slice; the result cap is
// the operand's cap minus |x|.
FiniteLanguageSample sample_left_derivative(const FiniteLanguageSample& s, const Word& x);
FiniteLanguageSample sample_right_derivative(const FiniteLanguageSample& s, const Word& x);
// h must map every symbol to a nonempty word, otherwise no finite operand
// slice determines the truncated image.
FiniteLanguageSample sample_morphism_image(const FiniteLanguageSample& s, const Morphism& h,
                                           std::size_t max_length);
FiniteLanguageSample sample_gsm_image(const FiniteLanguageSample& s, const Gsm& g,
                                      std::size_t max_length);
// Words w over h's source with h(w) in the slice. The operand must cover
// length max_length times the longest per-symbol image.
FiniteLanguageSample sample_inverse_morphism_image(const FiniteLanguageSample& s,
                                                   const Morphism& h, std::size_t max_length);

// Result of comparing two slices of equal alphabet and cap.
struct EqualityCheck {
    bool equal = false;
    // Shortest word in the symmetric difference (ties broken
    // lexicographically); empty and meaningless when equal.
    Word counterexample;
    // True when the counterexample is a member of the first slice.
    bool only_in_first = false;
};

// Throws Error unless the slices share alphabet and cap.
EqualityCheck check_equal(const FiniteLanguageSample& a, const FiniteLanguageSample& b);

// Built-in example acceptors, each with a declared default bound:
//   a0        block-counting acceptor for a^n b^n c^n over {a,b,c}
//   c2n       doubling acceptor for c^(2^n) over {c}
//   mismatch  two-phase position prober over {a,b}
//   empty     acceptor with no rules, rejects everything over {a,b,c}
// Throws Error on any other name.
ReactionAutomaton fixture_automaton(std::string_view name);

// Built-in DFAs:
//   sigma_plus  all nonempty words over {a,b,c}
Dfa fixture_dfa(std::string_view name);

// Reference predicates:
//   anbncn              a^n b^n c^n, n >= 0
//   c_pow2              c^(2^n), n >= 0
//   mismatch_claimed    u1 s u2 v1 t v2 with |u1|=|v1|, |u2|=|v2|, s != t
//   mismatch_reachable  same with |u2| >= 1
PredicateLanguage predicate(std::string_view name);

}  // namespace ra
