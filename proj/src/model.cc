#include <ra/model.hh>

#include <algorithm>
#include <limits>
#include <sstream>

#include <ra/error.hh>

namespace ra {

namespace {

Count checked_mul(Count a, Count b) {
    if (a != 0 && b > std::numeric_limits<Count>::max() / a)
        throw Error("bound overflow");
    return a * b;
}

Count checked_add(Count a, Count b) {
    if (b > std::numeric_limits<Count>::max() - a)
        throw Error("bound overflow");
    return a + b;
}

Count checked_pow(Count base, Count exp) {
    Count r = 1;
    for (Count i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

}  // namespace

BoundSpec::BoundSpec(Kind kind, std::vector<Count> params)
    : kind_(kind), params_(std::move(params)) {}

BoundSpec BoundSpec::constant(Count k) { return {Kind::constant, {k}}; }

BoundSpec BoundSpec::linear(Count c1, Count c0) { return {Kind::linear, {c1, c0}}; }

BoundSpec BoundSpec::polynomial(Count c, Count d, Count c0) {
    return {Kind::polynomial, {c, d, c0}};
}

BoundSpec BoundSpec::exponential(Count c1, Count c2) {
    if (c2 < 2) throw Error("exponential bound base must be at least 2");
    return {Kind::exponential, {c1, c2}};
}

Count BoundSpec::eval(std::size_t n) const {
    switch (kind_) {
        case Kind::constant:
            return params_[0];
        case Kind::linear:
            return checked_add(checked_mul(params_[0], n), params_[1]);
        case Kind::polynomial:
            return checked_add(checked_mul(params_[0], checked_pow(n, params_[1])), params_[2]);
        case Kind::exponential:
            return checked_mul(params_[0], checked_pow(params_[1], n));
    }
    throw Error("corrupt bound spec");
}

namespace {

void check_symbols(const SymbolSet& background, const Multiset& m, const std::string& where,
                   std::vector<std::string>& out) {
    for (const auto& s : m.support())
        if (!background.contains(s))
            out.push_back(where + " uses symbol '" + s.name() + "' outside the background set");
}

void check_symbols(const SymbolSet& background, const SymbolSet& set, const std::string& where,
                   std::vector<std::string>& out) {
    for (const auto& s : set)
        if (!background.contains(s))
            out.push_back(where + " uses symbol '" + s.name() + "' outside the background set");
}

}  // namespace

std::vector<std::string> validate(const ReactionAutomaton& a) {
    std::vector<std::string> out;
    std::set<std::string> seen_labels;
    for (const auto& r : a.reactions) {
        if (r.label.empty())
            out.push_back("reaction with empty label");
        else if (r.label.find(':') != std::string::npos ||
                 r.label.find_first_of(" \t\n") != std::string::npos)
            out.push_back("reaction label '" + r.label + "' contains ':' or whitespace");
        if (!seen_labels.insert(r.label).second)
            out.push_back("duplicate reaction label '" + r.label + "'");
        const std::string where = "reaction '" + r.label + "'";
        check_symbols(a.background, r.reactants, where, out);
        check_symbols(a.background, r.inhibitors, where, out);
        check_symbols(a.background, r.products, where, out);
        for (const auto& s : r.reactants.support())
            if (r.inhibitors.contains(s))
                out.push_back(where + ": reactant '" + s.name() + "' is also an inhibitor");
    }
    check_symbols(a.background, a.input_alphabet, "input alphabet", out);
    check_symbols(a.background, a.initial, "initial state", out);
    if (!a.background.contains(a.final_symbol))
        out.push_back("final symbol '" + a.final_symbol.name() +
                      "' is outside the background set");
    return out;
}

void require_valid(const ReactionAutomaton& a) {
    auto violations = validate(a);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid automaton:";
    for (const auto& v : violations) msg << "\n  " << v;
    throw Error(msg.str());
}

const Reaction* find_reaction(const ReactionAutomaton& a, const std::string& label) {
    for (const auto& r : a.reactions)
        if (r.label == label) return &r;
    return nullptr;
}

ReactionParts reaction_multiset_parts(const ReactionAutomaton& a, const ReactionMultiset& alpha) {
    ReactionParts parts;
    for (const auto& [label, count] : alpha) {
        if (count == 0) continue;
        const Reaction* r = find_reaction(a, label);
        if (!r) throw Error("unknown reaction label '" + label + "'");
        parts.reactants = parts.reactants + scale(r->reactants, count);
        parts.products = parts.products + scale(r->products, count);
        parts.inhibitors.insert(r->inhibitors.begin(), r->inhibitors.end());
    }
    return parts;
}

ReactionAutomaton extend_alphabet(const ReactionAutomaton& a, const SymbolSet& wider) {
    for (const auto& s : a.input_alphabet)
        if (!wider.contains(s))
            throw Error("extended alphabet drops input symbol '" + s.name() + "'");
    ReactionAutomaton out = a;
    out.input_alphabet = wider;
    for (const auto& s : wider) {
        if (a.input_alphabet.contains(s)) continue;
        if (a.background.contains(s))
            throw Error("new input symbol '" + s.name() + "' already appears in the background");
        out.background.insert(s);
        // Keeps the process alive forever once s is fed, so no word
        // containing s can reach a halting state.
        out.reactions.push_back({"reject-" + s.name(), Multiset::single(s), {},
                                 Multiset::single(s)});
    }
    return out;
}

namespace {

Symbol renamed(const std::map<Symbol, Symbol>& renaming, const Symbol& s) {
    auto it = renaming.find(s);
    return it == renaming.end() ? s : it->second;
}

Multiset renamed(const std::map<Symbol, Symbol>& renaming, const Multiset& m) {
    Multiset out;
    for (const auto& [s, n] : m.counts()) out.add(renamed(renaming, s), n);
    return out;
}

SymbolSet renamed(const std::map<Symbol, Symbol>& renaming, const SymbolSet& set) {
    SymbolSet out;
    for (const auto& s : set) out.insert(renamed(renaming, s));
    return out;
}

}  // namespace

ReactionAutomaton rename_symbols(const ReactionAutomaton& a,
                                 const std::map<Symbol, Symbol>& renaming) {
    std::map<Symbol, Symbol> applied;
    for (const auto& s : a.background) {
        Symbol target = renamed(renaming, s);
        for (const auto& [other, image] : applied)
            if (image == target)
                throw Error("renaming collides: '" + other.name() + "' and '" + s.name() +
                            "' both map to '" + target.name() + "'");
        applied.emplace(s, target);
    }
    ReactionAutomaton out{renamed(renaming, a.background),
                          renamed(renaming, a.input_alphabet),
                          {},
                          renamed(renaming, a.initial),
                          renamed(renaming, a.final_symbol),
                          a.declared_bound};
    for (const auto& r : a.reactions)
        out.reactions.push_back({r.label, renamed(renaming, r.reactants),
                                 renamed(renaming, r.inhibitors), renamed(renaming, r.products)});
    return out;
}

std::vector<std::string> validate(const Gsm& g) {
    std::vector<std::string> out;
    if (!g.states.contains(g.start)) out.push_back("start state '" + g.start + "' not in states");
    for (const auto& q : g.finals)
        if (!g.states.contains(q)) out.push_back("final state '" + q + "' not in states");
    for (const auto& t : g.transitions) {
        if (!g.states.contains(t.from)) out.push_back("transition from unknown state '" + t.from + "'");
        if (!g.states.contains(t.to)) out.push_back("transition to unknown state '" + t.to + "'");
        if (!g.input_alphabet.contains(t.input))
            out.push_back("transition reads '" + t.input.name() + "' outside the input alphabet");
        if (t.output.empty())
            out.push_back("transition from '" + t.from + "' on '" + t.input.name() +
                          "' has empty output");
        for (const auto& s : t.output)
            if (!g.output_alphabet.contains(s))
                out.push_back("transition writes '" + s.name() + "' outside the output alphabet");
    }
    return out;
}

std::vector<std::string> validate(const Dfa& d) {
    std::vector<std::string> out;
    if (!d.states.contains(d.start)) out.push_back("start state '" + d.start + "' not in states");
    for (const auto& q : d.finals)
        if (!d.states.contains(q)) out.push_back("final state '" + q + "' not in states");
    for (const auto& [key, to] : d.transition) {
        const auto& [from, sym] = key;
        if (!d.states.contains(from)) out.push_back("transition from unknown state '" + from + "'");
        if (!d.states.contains(to)) out.push_back("transition to unknown state '" + to + "'");
        if (!d.alphabet.contains(sym))
            out.push_back("transition reads '" + sym.name() + "' outside the alphabet");
    }
    for (const auto& q : d.states)
        for (const auto& s : d.alphabet)
            if (!d.transition.contains({q, s}))
                out.push_back("missing transition from '" + q + "' on '" + s.name() + "'");
    return out;
}

bool Morphism::lambda_free() const {
    return std::ranges::all_of(image, [](const auto& kv) { return !kv.second.empty(); });
}

bool Morphism::coding() const {
    return std::ranges::all_of(image, [](const auto& kv) { return kv.second.size() == 1; });
}

SymbolSet Morphism::target() const {
    SymbolSet out;
    for (const auto& [s, w] : image) out.insert(w.begin(), w.end());
    return out;
}

Word Morphism::apply(const Word& w) const {
    Word out;
    for (const auto& s : w) {
        auto it = image.find(s);
        if (it == image.end() || !source.contains(s))
            throw Error("morphism undefined on symbol '" + s.name() + "'");
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

std::vector<std::string> validate(const Morphism& h) {
    std::vector<std::string> out;
    for (const auto& s : h.source)
        if (!h.image.contains(s)) out.push_back("no image for source symbol '" + s.name() + "'");
    for (const auto& [s, w] : h.image)
        if (!h.source.contains(s))
            out.push_back("image given for '" + s.name() + "' outside the source alphabet");
    return out;
}

}  // namespace ra
