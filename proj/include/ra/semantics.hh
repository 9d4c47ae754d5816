#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <ra/model.hh>

namespace ra {

// Whether empty feeding steps are allowed while input remains.
enum class InputMode { ordinary, lambda_input };

// A state of the interactive process: the current multiset plus how many
// input symbols have been consumed.
struct Configuration {
    Multiset state;
    std::size_t consumed = 0;

    auto operator<=>(const Configuration&) const = default;
};

// One step of a process: what was fed (if anything), what fired (absent
// when nothing was enabled and the step is a pure feed), and the state
// reached.
struct TraceStep {
    enum class Kind { fed, lambda, evolve };

    Kind kind = Kind::evolve;
    std::optional<Symbol> symbol;  // present iff kind == fed
    std::optional<ReactionMultiset> fired;
    Multiset result;

    auto operator<=>(const TraceStep&) const = default;
};

struct Trace {
    Word word;
    InputMode mode = InputMode::ordinary;
    Multiset initial;
    std::vector<TraceStep> steps;
};

struct SearchOutcome {
    bool accepted = false;
    // Distinct configurations discovered before the search stopped.
    std::size_t explored = 0;
    // True when some step was discarded only because it exceeded the bound.
    bool pruned_by_bound = false;
};

// True iff firing @p alpha on @p state is legal: combined reactants fit
// and no inhibitor of a fired rule is present.
bool enabled(const ReactionAutomaton& a, const ReactionMultiset& alpha, const Multiset& state);

// All maximal ways of firing rules in parallel on @p state, in sorted
// order. Empty when nothing can fire; also empty when an
// applicable rule consumes nothing, since it could fire any number of
// times and no maximal choice exists.
std::vector<ReactionMultiset> enumerate_maximal(const ReactionAutomaton& a, const Multiset& state);

// All one-step results of @p state; {state} when nothing fires.
std::vector<Multiset> results(const ReactionAutomaton& a, const Multiset& state);

// Successor configurations under @p mode for input @p word, sorted and
// deduplicated. While input remains, the next symbol is fed (even if
// nothing then fires); lambda-input mode additionally allows evolving
// without feeding whenever something fires. Once the input is exhausted
// the process evolves only while something fires.
std::vector<Configuration> successors(const ReactionAutomaton& a, const Configuration& c,
                                      const Word& word, InputMode mode);

// Bounded breadth-first acceptance: does some process on @p word reach a
// halting state containing the final symbol, visiting only states (fed
// states included) of weight at most bound(|word|)? Throws Error if the
// word uses symbols outside the input alphabet.
SearchOutcome accepts(const ReactionAutomaton& a, const Word& word, const BoundSpec& bound,
                      InputMode mode);

// A shortest accepting run, if any.
std::optional<Trace> accepting_trace(const ReactionAutomaton& a, const Word& word,
                                     const BoundSpec& bound, InputMode mode);

// The smallest achievable peak state weight over accepting runs on
// @p word (fed states do not count toward the peak; they must still
// respect the bound). Empty when no accepting run exists.
std::optional<Count> workspace(const ReactionAutomaton& a, const Word& word,
                               const BoundSpec& bound, InputMode mode);

// Replays @p trace step by step and checks it is a legal accepting run:
// every step matches the step relation, every state respects the bound,
// the input is fully consumed, and the final state halts and contains
// the final symbol.
bool verify_trace(const ReactionAutomaton& a, const Trace& trace, const BoundSpec& bound);

// Every configuration reachable on @p word within the bound, sorted.
std::vector<Configuration> reachable_configurations(const ReactionAutomaton& a, const Word& word,
                                                    const BoundSpec& bound, InputMode mode);

// Tab-separated rendering: one line per step (fed symbol, "<eps>" for an
// unfed evolution while input remains, "-" after input; fired rules;
// resulting state).
std::string to_text(const Trace& t);

// Fired rules as text, e.g. "a1 a2^2"; "-" when empty.
std::string to_string(const ReactionMultiset& alpha);

// Shared search context; memoizes the maximal-firing sets per state so
// repeated searches over one automaton stay cheap. Validates the
// automaton on construction.
class Evaluator {
  public:
    explicit Evaluator(const ReactionAutomaton& a);

    const ReactionAutomaton& automaton() const { return a_; }

    const std::vector<ReactionMultiset>& maximal(const Multiset& state);
    std::vector<Multiset> results(const Multiset& state);
    std::vector<Configuration> successors(const Configuration& c, const Word& word,
                                          InputMode mode);

    SearchOutcome accepts(const Word& word, const BoundSpec& bound, InputMode mode);
    std::optional<Trace> accepting_trace(const Word& word, const BoundSpec& bound, InputMode mode);
    std::optional<Count> workspace(const Word& word, const BoundSpec& bound, InputMode mode);
    std::vector<Configuration> reachable(const Word& word, const BoundSpec& bound, InputMode mode);

  private:
    struct Edge {
        Configuration from;
        TraceStep step;
    };
    struct Search {
        bool accepted = false;
        bool pruned = false;
        std::size_t explored = 0;
        std::optional<Configuration> goal;
        std::map<Configuration, Edge> parent;
    };
    struct Child {
        Configuration config;
        TraceStep step;
        // Heaviest state the step passes through (the fed state for feeds),
        // which gates admission under the bound.
        Count gate = 0;
    };

    // States interned to dense ids with memoized one-step successors, so
    // walks that revisit a state (later words, shared prefixes) cost integer
    // lookups instead of repeated multiset arithmetic. Only the plain
    // acceptance search runs on this graph; traces and reachability keep the
    // configuration-level search, whose order fixes the reported runs.
    using StateId = std::uint32_t;
    struct Node {
        const Multiset* state = nullptr;  // points at the interning key
        Count weight = 0;
        bool final_present = false;
        bool expanded = false;  // evolve successors computed; none means halt
        std::vector<StateId> evolve;
        std::map<Symbol, std::vector<StateId>> fed;
    };

    std::vector<Child> expand(const Configuration& c, const Word& word, InputMode mode);
    Search run_bfs(const Word& word, const BoundSpec& bound, InputMode mode, bool want_trace,
                   std::vector<Configuration>* collect);
    SearchOutcome run_fast(const Word& word, Count budget, InputMode mode);
    StateId intern(Multiset m);
    const std::vector<StateId>& evolve_children(StateId id);
    const std::vector<StateId>& fed_children(StateId id, const Symbol& s);
    void check_word(const Word& word) const;
    Multiset fire(const Multiset& state, const ReactionMultiset& alpha) const;

    const ReactionAutomaton& a_;
    std::vector<const Reaction*> by_label_;
    std::map<Multiset, std::vector<ReactionMultiset>> cache_;
    std::map<Multiset, StateId> ids_;
    std::deque<Node> nodes_;
};

}  // namespace ra
