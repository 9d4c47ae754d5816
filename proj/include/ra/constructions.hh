#pragma once

// Automaton-to-automaton combinators. Each function builds a new acceptor
// whose language is an operation applied to the operand languages: boolean
// combinations, concatenation-like products, derivatives, transductions,
// closures, and mode embeddings. Operands are never mutated; every result
// validates and carries a declared bound derived from the operand bounds
// (absent when an operand has none).
//
// Shared conventions:
//  - Binary combinators accept operands over different alphabets and work
//    on the union alphabet; each operand is first widened with
//    extend_alphabet, then brought into the normal form matching the
//    requested input mode, then renamed so the two rule sets share nothing
//    but the input letters.
//  - Gadget symbols (phase markers, counters, staged input copies) are
//    invented with a FreshNamer seeded by everything already in scope, so
//    results never capture operand symbols by accident.
//  - The mode parameter selects which acceptance discipline the result is
//    meant for; language claims below are stated for that discipline.

#include <string>

#include <ra/model.hh>
#include <ra/semantics.hh>

namespace ra {

// Deterministic supply of symbol names that avoid a given set. Candidates
// for a base name are tried in the fixed order
//   base, base', base'', base.2, base.3, ...
// and the first free name is returned and reserved. Results depend only on
// the seed set and the call sequence.
class FreshNamer {
public:
    explicit FreshNamer(SymbolSet taken);

    // First free candidate for @p base, reserved on return.
    Symbol fresh(const std::string& base);

    // Convenience for the decorated copy of an existing symbol.
    Symbol primed(const Symbol& s) { return fresh(s.name() + "'"); }
    Symbol tagged(const Symbol& s, int tag);

    // Marks a name as in use without minting it.
    void reserve(const Symbol& s) { taken_.insert(s); }

private:
    SymbolSet taken_;
};

// Which side of the input the padding block of pad_exponential sits on.
enum class PadSide {
    prefix,
    suffix,
};

// Same language, final symbol only in converged states: the rewrite routes
// every input letter through a staged copy and raises a fresh final symbol
// one step after the embedded rules go quiet, so acceptance can never be
// witnessed while work remains. For the ordinary input discipline.
ReactionAutomaton to_normal_form(const ReactionAutomaton& a);

// Counterpart of to_normal_form for the lambda-input discipline, with the
// extra bookkeeping that discipline needs: a phase marker distinguishes
// "input still arriving" from "input declared over", letters are only
// staged in the first phase, and a letter arriving after the final symbol
// was raised demotes it again, so late input always rejects.
ReactionAutomaton to_lambda_normal_form(const ReactionAutomaton& a);

// L(A1) ∪ L(A2) over the union alphabet.
ReactionAutomaton union_of(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                           InputMode mode);

// L(A1) ∩ L(A2) over the union alphabet.
ReactionAutomaton intersection(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                               InputMode mode);

// L(A1) · L(A2): a phase marker routes letters to the first operand until
// a nondeterministic switch starts the second.
ReactionAutomaton concatenation(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                                InputMode mode);

// All interleavings of a word from L(A1) with a word from L(A2): each
// letter is routed to exactly one operand, nondeterministically.
ReactionAutomaton shuffle(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                          InputMode mode);

// { w | w·x ∈ L(A) }. Requires a nonempty x over A's alphabet.
ReactionAutomaton right_derivative(const ReactionAutomaton& a, const Word& x, InputMode mode);

// { w | x·w ∈ L(A) }. Requires a nonempty x over A's alphabet.
ReactionAutomaton left_derivative(const ReactionAutomaton& a, const Word& x, InputMode mode);

// g(L(A)) for a gsm g reading A's alphabet: the result consumes an output
// word of g and simulates A on a matching preimage, buffering each
// transition's output block as a doubling-encoded multiset that is paid
// out one letter per step. Every transition of g must emit at least one
// letter. Ordinary input discipline.
ReactionAutomaton gsm_image(const ReactionAutomaton& a, const Gsm& g);

// h(L(A)) for a morphism h on A's alphabet. h must be lambda-free. In
// ordinary mode this runs gsm_image on the one-state gsm for h; in
// lambda-input mode h must additionally be a coding (single letters).
ReactionAutomaton morphism_image(const ReactionAutomaton& a, const Morphism& h, InputMode mode);

// h⁻¹(L(A)) = { w | h(w) ∈ L(A) } for a morphism h into A's alphabet;
// images may be empty. Each consumed letter spells out its image one
// letter per step through a chain of stage symbols. Lambda-input
// discipline (erasing letters need silent steps to be consumed).
ReactionAutomaton inverse_morphism_lambda(const ReactionAutomaton& a, const Morphism& h);

// L(A)*, lambda-input discipline: the operand is restarted on a fresh
// initial multiset each time it accepts a segment, and leftover working
// symbols are swept between segments.
ReactionAutomaton kleene_star_lambda(const ReactionAutomaton& a);

// L(A)⁺ = L(A) · L(A)*, lambda-input discipline.
ReactionAutomaton kleene_plus_lambda(const ReactionAutomaton& a);

// An acceptor whose lambda-input language equals L(A) under the ordinary
// discipline: input letters are staged while a phase marker is alive, the
// marker dies on the first silent step, and any letter arriving after the
// final symbol was raised demotes it again.
ReactionAutomaton lra_to_lambda(const ReactionAutomaton& a);

// An acceptor for L(M): one symbol per DFA state, one rule per transition,
// acceptance raises a fresh final symbol once input stops in a final
// state. Ordinary input discipline; constant bound.
ReactionAutomaton from_dfa(const Dfa& m);

// { pad^(2^n) · w | w ∈ L(A), |w| = n } (prefix side) or its mirrored
// suffix form. Requires a declared exponential bound on A and a pad
// symbol outside A's background; the result declares a linear bound in
// the padded length. The pad block is halved step by step while input
// length is counted, and acceptance requires the two counts to cancel
// exactly. Ordinary input discipline.
ReactionAutomaton pad_exponential(const ReactionAutomaton& a, const Symbol& pad, PadSide side);

}  // namespace ra
