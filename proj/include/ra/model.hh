#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <ra/multiset.hh>

namespace ra {

// A rewriting rule: consumes @p reactants, blocked by any @p inhibitors,
// emits @p products. Reactants and inhibitors must not overlap.
struct Reaction {
    std::string label;
    Multiset reactants;
    SymbolSet inhibitors;
    Multiset products;

    auto operator<=>(const Reaction&) const = default;
};

// How many times each rule fires in one step, keyed by rule label.
// Zero counts are never stored.
using ReactionMultiset = std::map<std::string, Count>;

// Combined reactants/inhibitors/products of a reaction multiset.
struct ReactionParts {
    Multiset reactants;
    SymbolSet inhibitors;
    Multiset products;
};

// Size budget for configurations, as a function of input length.
class BoundSpec {
  public:
    enum class Kind { constant, linear, polynomial, exponential };

    static BoundSpec constant(Count k);
    // c1 * n + c0
    static BoundSpec linear(Count c1, Count c0);
    // c * n^d + c0
    static BoundSpec polynomial(Count c, Count d, Count c0);
    // c1 * c2^n, c2 >= 2
    static BoundSpec exponential(Count c1, Count c2);

    Kind kind() const { return kind_; }
    // Parameters in the order listed above.
    const std::vector<Count>& params() const { return params_; }

    // Value at input length n; throws Error on overflow.
    Count eval(std::size_t n) const;

    auto operator<=>(const BoundSpec&) const = default;

  private:
    BoundSpec(Kind kind, std::vector<Count> params);

    Kind kind_;
    std::vector<Count> params_;
};

// A language acceptor over multisets: rules fire maximally in parallel,
// input symbols arrive one per step, and a word is accepted when the
// system halts on a state containing the final symbol.
struct ReactionAutomaton {
    SymbolSet background;
    SymbolSet input_alphabet;
    std::vector<Reaction> reactions;
    Multiset initial;
    // Placeholder default; validation rejects it unless it is actually
    // declared in the background.
    Symbol final_symbol{"f"};
    std::optional<BoundSpec> declared_bound;
};

// Structural well-formedness; returns one message per violation,
// empty when the automaton is well formed.
std::vector<std::string> validate(const ReactionAutomaton& a);

// Throws Error listing all violations if validate() is nonempty.
void require_valid(const ReactionAutomaton& a);

// Pointer into a.reactions, or nullptr if no such label.
const Reaction* find_reaction(const ReactionAutomaton& a, const std::string& label);

// Combined parts of @p alpha; throws Error on an unknown label.
ReactionParts reaction_multiset_parts(const ReactionAutomaton& a, const ReactionMultiset& alpha);

// Widens the input alphabet to @p wider (a superset of the current one).
// Each genuinely new symbol gets a self-sustaining rule (d, -, d) so that
// feeding it anywhere makes the process run forever, never accepting.
// Throws Error if wider drops existing input symbols or a new symbol
// already appears in the background.
ReactionAutomaton extend_alphabet(const ReactionAutomaton& a, const SymbolSet& wider);

// Applies a symbol renaming everywhere (background, alphabet, rules,
// initial state, final symbol). Symbols absent from the map keep their
// names. Throws Error if the effective renaming is not injective on the
// background set.
ReactionAutomaton rename_symbols(const ReactionAutomaton& a,
                                 const std::map<Symbol, Symbol>& renaming);

// One transition of a sequential transducer: in state @p from, reading
// @p input, emit @p output (never empty) and move to @p to.
struct GsmTransition {
    std::string from;
    Symbol input;
    std::string to;
    Word output;

    auto operator<=>(const GsmTransition&) const = default;
};

// A nondeterministic sequential transducer with nonempty outputs.
struct Gsm {
    std::set<std::string> states;
    SymbolSet input_alphabet;
    SymbolSet output_alphabet;
    std::vector<GsmTransition> transitions;
    std::string start;
    std::set<std::string> finals;
};

std::vector<std::string> validate(const Gsm& g);

// A deterministic finite automaton with a total transition function.
struct Dfa {
    std::set<std::string> states;
    SymbolSet alphabet;
    std::map<std::pair<std::string, Symbol>, std::string> transition;
    std::string start;
    std::set<std::string> finals;
};

std::vector<std::string> validate(const Dfa& d);

// A letter-to-word substitution h : source* -> target words, applied
// symbol by symbol.
struct Morphism {
    SymbolSet source;
    std::map<Symbol, Word> image;

    // True when no symbol maps to the empty word.
    bool lambda_free() const;
    // True when every symbol maps to a single symbol.
    bool coding() const;
    // Symbols appearing in any image word.
    SymbolSet target() const;
    // Throws Error if w contains a symbol outside source.
    Word apply(const Word& w) const;
};

std::vector<std::string> validate(const Morphism& h);

}  // namespace ra
