// Combinator internals. Almost every builder follows one embedding pattern:
// operand rules are copied through a symbol map that reroutes input letters
// to staged copies, extra inhibitors freeze the copy at the right moments,
// and a small gadget of fresh marker symbols drives feeding, phase switches
// and the final symbol. Guard rules make sure a letter arriving after the
// final symbol has been raised can never lead to acceptance: depending on
// the gadget it either demotes the final symbol or starts a self-sustaining
// loop that blocks convergence.

#include <ra/constructions.hh>

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <ra/error.hh>

namespace ra {

namespace {

using SymbolMap = std::map<Symbol, Symbol>;

Symbol map_symbol(const SymbolMap& h, const Symbol& s) {
    auto it = h.find(s);
    return it == h.end() ? s : it->second;
}

Multiset map_multiset(const SymbolMap& h, const Multiset& m) {
    Multiset out;
    for (const auto& [s, n] : m.counts()) out.add(map_symbol(h, s), n);
    return out;
}

SymbolSet map_set(const SymbolMap& h, const SymbolSet& set) {
    SymbolSet out;
    for (const auto& s : set) out.insert(map_symbol(h, s));
    return out;
}

SymbolSet set_union(SymbolSet a, const SymbolSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

Multiset with(Multiset m, const Symbol& s, Count n = 1) {
    m.add(s, n);
    return m;
}

Reaction rule(std::string label, Multiset reactants, SymbolSet inhibitors, Multiset products) {
    return Reaction{std::move(label), std::move(reactants), std::move(inhibitors),
                    std::move(products)};
}

// Staged copies of the input letters; identity on everything else.
SymbolMap primed_inputs(FreshNamer& names, const SymbolSet& sigma) {
    SymbolMap h;
    for (const auto& a : sigma) h.emplace(a, names.primed(a));
    return h;
}

SymbolMap tagged_inputs(FreshNamer& names, const SymbolSet& sigma, int tag) {
    SymbolMap h;
    for (const auto& a : sigma) h.emplace(a, names.tagged(a, tag));
    return h;
}

// Copies of the operand's rules under @p h with @p extra inhibitors added
// and @p bonus added to every product, labels prefixed.
void embed_rules(std::vector<Reaction>& out, const ReactionAutomaton& a, const SymbolMap& h,
                 const SymbolSet& extra, const Multiset& bonus, const std::string& prefix) {
    for (const auto& r : a.reactions) {
        out.push_back(rule(prefix + r.label, map_multiset(h, r.reactants),
                           set_union(map_set(h, r.inhibitors), extra),
                           map_multiset(h, r.products) + bonus));
    }
}

// ---- bound arithmetic ----------------------------------------------------

Count checked_add(Count a, Count b) {
    Count r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw Error("bound overflow");
    return r;
}

Count checked_mul(Count a, Count b) {
    Count r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("bound overflow");
    return r;
}

Count checked_pow(Count base, Count exp) {
    Count r = 1;
    for (Count i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

// mul * b(n) + add, as a bound of the same family.
BoundSpec widen(const BoundSpec& b, Count mul, Count add) {
    const auto& p = b.params();
    switch (b.kind()) {
        case BoundSpec::Kind::constant:
            return BoundSpec::constant(checked_add(checked_mul(mul, p[0]), add));
        case BoundSpec::Kind::linear:
            return BoundSpec::linear(checked_mul(mul, p[0]),
                                     checked_add(checked_mul(mul, p[1]), add));
        case BoundSpec::Kind::polynomial:
            return BoundSpec::polynomial(checked_mul(mul, p[0]), p[1],
                                         checked_add(checked_mul(mul, p[2]), add));
        case BoundSpec::Kind::exponential:
            // mul*c1*c2^n + add <= (mul*c1 + add)*c2^n
            return BoundSpec::exponential(checked_add(checked_mul(mul, p[0]), add), p[1]);
    }
    throw Error("corrupt bound spec");
}

int rank(const BoundSpec& b) { return static_cast<int>(b.kind()); }

// A bound dominating x(n) + y(n) + add.
BoundSpec combine(const BoundSpec& x, const BoundSpec& y, Count add) {
    if (rank(x) < rank(y)) return combine(y, x, add);
    const auto& p = x.params();
    const auto& q = y.params();
    switch (x.kind()) {
        case BoundSpec::Kind::constant:
            return BoundSpec::constant(checked_add(checked_add(p[0], q[0]), add));
        case BoundSpec::Kind::linear:
            if (y.kind() == BoundSpec::Kind::constant)
                return BoundSpec::linear(p[0], checked_add(checked_add(p[1], q[0]), add));
            return BoundSpec::linear(checked_add(p[0], q[0]),
                                     checked_add(checked_add(p[1], q[1]), add));
        case BoundSpec::Kind::polynomial:
            switch (y.kind()) {
                case BoundSpec::Kind::constant:
                    return BoundSpec::polynomial(p[0], p[1],
                                                 checked_add(checked_add(p[2], q[0]), add));
                case BoundSpec::Kind::linear:
                    // e1*n <= e1*n^d for n >= 1; the n = 0 value moves into c0.
                    return BoundSpec::polynomial(checked_add(p[0], q[0]), p[1],
                                                 checked_add(checked_add(p[2], q[1]), add));
                default:
                    return BoundSpec::polynomial(checked_add(p[0], q[0]),
                                                 std::max(p[1], q[1]),
                                                 checked_add(checked_add(p[2], q[2]), add));
            }
        case BoundSpec::Kind::exponential:
            switch (y.kind()) {
                case BoundSpec::Kind::constant:
                    return BoundSpec::exponential(checked_add(checked_add(p[0], q[0]), add),
                                                  p[1]);
                case BoundSpec::Kind::linear:
                    // e1*n + e0 <= (e1 + e0)*base^n
                    return BoundSpec::exponential(
                        checked_add(checked_add(p[0], checked_add(q[0], q[1])), add), p[1]);
                case BoundSpec::Kind::polynomial:
                    // c*n^d + c0 <= (c + c0)*(2^d)^n
                    return BoundSpec::exponential(
                        checked_add(checked_add(p[0], checked_add(q[0], q[2])), add),
                        std::max(p[1], checked_pow(2, q[1])));
                case BoundSpec::Kind::exponential:
                    return BoundSpec::exponential(checked_add(checked_add(p[0], q[0]), add),
                                                  std::max(p[1], q[1]));
            }
    }
    throw Error("corrupt bound spec");
}

// A bound dominating n -> b(n + k).
BoundSpec shift_arg(const BoundSpec& b, Count k) {
    const auto& p = b.params();
    switch (b.kind()) {
        case BoundSpec::Kind::constant:
            return b;
        case BoundSpec::Kind::linear:
            return BoundSpec::linear(p[0], checked_add(p[1], checked_mul(p[0], k)));
        case BoundSpec::Kind::polynomial:
            // (n + k)^d <= ((k + 1) * n)^d for n >= 1, k^d at n = 0
            return BoundSpec::polynomial(
                checked_mul(p[0], checked_pow(checked_add(k, 1), p[1])), p[1],
                checked_add(checked_mul(p[0], checked_pow(k, p[1])), p[2]));
        case BoundSpec::Kind::exponential:
            return BoundSpec::exponential(checked_mul(p[0], checked_pow(p[1], k)), p[1]);
    }
    throw Error("corrupt bound spec");
}

// A bound dominating n -> b(m * n), m >= 1.
BoundSpec scale_arg(const BoundSpec& b, Count m) {
    const auto& p = b.params();
    switch (b.kind()) {
        case BoundSpec::Kind::constant:
            return b;
        case BoundSpec::Kind::linear:
            return BoundSpec::linear(checked_mul(p[0], m), p[1]);
        case BoundSpec::Kind::polynomial:
            return BoundSpec::polynomial(checked_mul(p[0], checked_pow(m, p[1])), p[1], p[2]);
        case BoundSpec::Kind::exponential:
            return BoundSpec::exponential(p[0], checked_pow(p[1], m));
    }
    throw Error("corrupt bound spec");
}

std::optional<BoundSpec> lift(const std::optional<BoundSpec>& b,
                              const std::function<BoundSpec(const BoundSpec&)>& f) {
    if (!b) return std::nullopt;
    return f(*b);
}

std::optional<BoundSpec> lift2(const std::optional<BoundSpec>& x,
                               const std::optional<BoundSpec>& y,
                               const std::function<BoundSpec(const BoundSpec&, const BoundSpec&)>& f) {
    if (!x || !y) return std::nullopt;
    return f(*x, *y);
}

// ---- operand preparation -------------------------------------------------

// Renames the operand's non-input symbols that clash with @p avoid.
// @p names must already know every name in scope.
ReactionAutomaton rename_apart(const ReactionAutomaton& a, const SymbolSet& avoid,
                               FreshNamer& names) {
    std::map<Symbol, Symbol> renaming;
    for (const auto& s : a.background) {
        if (a.input_alphabet.count(s) > 0 || avoid.count(s) == 0) continue;
        renaming.emplace(s, names.fresh(s.name()));
    }
    if (renaming.empty()) return a;
    return rename_symbols(a, renaming);
}

// Both operands of a binary combinator, widened to the shared alphabet,
// in the normal form matching @p mode, with disjoint non-input symbols.
struct BinaryPrep {
    SymbolSet sigma;
    ReactionAutomaton n1;
    ReactionAutomaton n2;
    FreshNamer names;
};

BinaryPrep prepare_binary(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                          InputMode mode) {
    require_valid(a1);
    require_valid(a2);
    SymbolSet sigma = set_union(a1.input_alphabet, a2.input_alphabet);
    // One operand's internal symbol may spell the same as the other's input
    // letter; move such internals out of the way before the letter becomes
    // input on both sides. Widening uses the trap rules of extend_alphabet:
    // an operand that sees a letter it has no use for churns forever, which
    // keeps its final from ever rising over the leftover. The product's
    // final symbol freezes both embedded sides, so a word the other side
    // accepts still converges.
    FreshNamer pre(set_union(set_union(a1.background, a2.background), sigma));
    ReactionAutomaton w1 = extend_alphabet(rename_apart(a1, sigma, pre), sigma);
    ReactionAutomaton w2 = extend_alphabet(rename_apart(a2, sigma, pre), sigma);
    auto normalize = mode == InputMode::ordinary ? to_normal_form : to_lambda_normal_form;
    ReactionAutomaton n1 = normalize(w1);
    ReactionAutomaton n2 = normalize(w2);
    FreshNamer names(set_union(set_union(n1.background, n2.background), sigma));
    n2 = rename_apart(n2, n1.background, names);
    return {std::move(sigma), std::move(n1), std::move(n2), std::move(names)};
}

ReactionAutomaton finish(ReactionAutomaton a) {
    require_valid(a);
    return a;
}

// Guard family shared by the product combinators: a raw letter that is
// present together with the final symbol starts a self-sustaining loop, so
// such a branch can never converge and the stale final symbol can never
// witness acceptance. The rules that consume raw letters are inhibited by
// the final symbol by the callers, which makes the loop unavoidable there.
void add_late_input_loops(std::vector<Reaction>& rules, const SymbolSet& sigma,
                          const Symbol& final_symbol) {
    for (const auto& a : sigma) {
        Multiset pair = with(with({}, a), final_symbol);
        rules.push_back(rule("guard-" + a.name(), pair, {}, pair));
    }
}

}  // namespace

// ---- FreshNamer ----------------------------------------------------------

FreshNamer::FreshNamer(SymbolSet taken) : taken_(std::move(taken)) {}

Symbol FreshNamer::fresh(const std::string& base) {
    std::vector<std::string> candidates = {base, base + "'", base + "''"};
    for (const auto& c : candidates) {
        Symbol s{c};
        if (taken_.insert(s).second) return s;
    }
    for (int k = 2;; ++k) {
        Symbol s{base + "." + std::to_string(k)};
        if (taken_.insert(s).second) return s;
    }
}

Symbol FreshNamer::tagged(const Symbol& s, int tag) {
    return fresh(s.name() + "(" + std::to_string(tag) + ")");
}

// ---- normal forms --------------------------------------------------------

ReactionAutomaton to_normal_form(const ReactionAutomaton& a) {
    require_valid(a);
    FreshNamer names(a.background);
    SymbolMap h = primed_inputs(names, a.input_alphabet);
    Symbol p0 = names.fresh("p0");
    Symbol p1 = names.fresh("p1");
    Symbol c = names.fresh("c");
    Symbol d = names.fresh("d");
    Symbol fp = names.primed(a.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(a.background, map_set(h, a.input_alphabet));
    out.background.insert({p0, p1, c, d, fp});
    out.input_alphabet = a.input_alphabet;
    // Every embedded firing drops a pulse on c; the drain below clears it,
    // so c is present exactly when the previous step did embedded work.
    embed_rules(out.reactions, a, h, {fp}, with({}, c), "e-");
    for (const auto& s : a.input_alphabet)
        out.reactions.push_back(rule("read-" + s.name(), with({}, s), {}, with({}, h.at(s))));
    out.reactions.push_back(rule("sw", with({}, p0), a.input_alphabet, with({}, p1)));
    out.reactions.push_back(rule("drain", with({}, c), {}, {}));
    // A staged copy the operand has not digested yet also blocks the
    // finish; otherwise a letter still in transit through an outer wrapper
    // could arrive just after an early finish and never be accounted for.
    out.reactions.push_back(rule("fin", with({}, a.final_symbol),
                                 set_union({c, p0}, map_set(h, a.input_alphabet)),
                                 with({}, fp)));
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(h, a.initial)));
    out.initial = with(with({}, d), p0);
    out.final_symbol = fp;
    out.declared_bound = lift(a.declared_bound, [](const BoundSpec& b) { return widen(b, 2, 4); });
    return finish(out);
}

ReactionAutomaton to_lambda_normal_form(const ReactionAutomaton& a) {
    require_valid(a);
    FreshNamer names(a.background);
    SymbolMap h = primed_inputs(names, a.input_alphabet);
    Symbol p0 = names.fresh("p0");
    Symbol p1 = names.fresh("p1");
    Symbol c = names.fresh("c");
    Symbol d = names.fresh("d");
    Symbol fp = names.primed(a.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(a.background, map_set(h, a.input_alphabet));
    out.background.insert({p0, p1, c, d, fp});
    out.input_alphabet = a.input_alphabet;
    embed_rules(out.reactions, a, h, {fp}, with({}, c), "e-");
    // Letters are staged only while the phase marker p0 is alive; firing sw
    // declares the input over, idle keeps the choice open one more step.
    for (const auto& s : a.input_alphabet)
        out.reactions.push_back(rule("read-" + s.name(), with({}, s), {p1}, with({}, h.at(s))));
    out.reactions.push_back(rule("sw", with({}, p0), a.input_alphabet, with({}, p1)));
    out.reactions.push_back(rule("idle", with({}, p0), {}, with({}, p0)));
    out.reactions.push_back(rule("drain", with({}, c), {}, {}));
    // Staged copies the operand never digests are tolerated here, unlike in
    // the strict-feeding wrapper: a relaxed run may converge with a fed
    // letter still lying around, and the wrapper has to accept those runs.
    out.reactions.push_back(rule("fin", with({}, a.final_symbol),
                                 set_union({c, p0}, a.input_alphabet), with({}, fp)));
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(h, a.initial)));
    // A letter that arrives after fin fired demotes the final symbol again;
    // the letter itself stays and blocks fin from refiring, so the branch
    // converges without accepting.
    for (const auto& s : a.input_alphabet) {
        out.reactions.push_back(rule("late-" + s.name(), with(with({}, s), fp), {},
                                     with(with({}, s), a.final_symbol)));
    }
    out.initial = with(with({}, d), p0);
    out.final_symbol = fp;
    out.declared_bound =
        lift(a.declared_bound, [](const BoundSpec& b) { return widen(b, 2, 5); });
    return finish(out);
}

ReactionAutomaton lra_to_lambda(const ReactionAutomaton& a) {
    require_valid(a);
    ReactionAutomaton n = to_normal_form(a);
    FreshNamer names(n.background);
    SymbolMap h = primed_inputs(names, n.input_alphabet);
    Symbol p0 = names.fresh("p0");
    Symbol p1 = names.fresh("p1");
    Symbol d = names.fresh("d");
    Symbol fp = names.primed(n.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(h, n.input_alphabet));
    out.background.insert({p0, p1, d, fp});
    out.input_alphabet = n.input_alphabet;
    embed_rules(out.reactions, n, h, {fp}, {}, "e-");
    // The marker pair p0/p1 forces ordinary pacing: the very first silent
    // step flips p0 to p1 and staging dies, so a word can only be accepted
    // by feeding every letter before the first silent step.
    for (const auto& s : n.input_alphabet)
        out.reactions.push_back(rule("read-" + s.name(), with({}, s), {p1}, with({}, h.at(s))));
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(h, n.initial)));
    out.reactions.push_back(rule("sw", with({}, p0), n.input_alphabet, with({}, p1)));
    out.reactions.push_back(rule("fin", with({}, n.final_symbol), n.input_alphabet,
                                 with({}, fp)));
    for (const auto& s : n.input_alphabet) {
        out.reactions.push_back(rule("late-" + s.name(), with(with({}, s), fp), {},
                                     with(with({}, s), n.final_symbol)));
    }
    out.initial = with(with({}, d), p0);
    out.final_symbol = fp;
    out.declared_bound =
        lift(n.declared_bound, [](const BoundSpec& b) { return widen(b, 1, 4); });
    return finish(out);
}

// ---- boolean combinations ------------------------------------------------

namespace {

// Shared skeleton of union_of and intersection: both feed every letter to
// both embedded operands and differ only in how the operand finals combine.
ReactionAutomaton juxtapose(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                            InputMode mode, bool need_both) {
    BinaryPrep p = prepare_binary(a1, a2, mode);
    SymbolMap h1 = tagged_inputs(p.names, p.sigma, 1);
    SymbolMap h2 = tagged_inputs(p.names, p.sigma, 2);
    Symbol d = p.names.fresh("d");
    Symbol f = p.names.fresh("f");

    ReactionAutomaton out;
    out.background = set_union(p.n1.background, p.n2.background);
    out.background = set_union(std::move(out.background), map_set(h1, p.sigma));
    out.background = set_union(std::move(out.background), map_set(h2, p.sigma));
    out.background.insert({d, f});
    out.input_alphabet = p.sigma;
    embed_rules(out.reactions, p.n1, h1, {f}, {}, "e1-");
    embed_rules(out.reactions, p.n2, h2, {f}, {}, "e2-");
    for (const auto& s : p.sigma) {
        out.reactions.push_back(rule("feed-" + s.name(), with({}, s), {f},
                                     with(with({}, h1.at(s)), h2.at(s))));
    }
    // A delivered copy an operand has not digested yet blocks that operand's
    // finish: otherwise the top final could rise in the same step the
    // operand's own straggler handling would have taken its final back, and
    // the race would accept the extended word.
    if (need_both) {
        out.reactions.push_back(rule("fin", with(with({}, p.n1.final_symbol),
                                                 p.n2.final_symbol),
                                     set_union(map_set(h1, p.sigma), map_set(h2, p.sigma)),
                                     with({}, f)));
    } else {
        out.reactions.push_back(rule("fin1", with({}, p.n1.final_symbol),
                                     map_set(h1, p.sigma), with({}, f)));
        out.reactions.push_back(rule("fin2", with({}, p.n2.final_symbol),
                                     map_set(h2, p.sigma), with({}, f)));
    }
    out.reactions.push_back(rule("boot", with({}, d), {},
                                 map_multiset(h1, p.n1.initial) +
                                     map_multiset(h2, p.n2.initial)));
    add_late_input_loops(out.reactions, p.sigma, f);
    out.initial = with({}, d);
    out.final_symbol = f;
    out.declared_bound = lift2(p.n1.declared_bound, p.n2.declared_bound,
                               [](const BoundSpec& x, const BoundSpec& y) {
                                   return combine(combine(x, y, 0), BoundSpec::linear(2, 4), 0);
                               });
    return finish(out);
}

// Under relaxed feeding a shared staged copy is not enough: each operand
// must see its copy of a letter at a time of its own choosing, because the
// two accepting schedules may disagree about how many silent steps to take
// first. Every letter therefore lands as a pair of pending copies. A side
// either takes its copy now or holds it for later; while the opposite copy
// is still pending the side is frozen, so the side that took early waits,
// and the side that held keeps evolving silently until it takes in turn.
ReactionAutomaton intersection_lambda(const ReactionAutomaton& a1,
                                      const ReactionAutomaton& a2) {
    BinaryPrep p = prepare_binary(a1, a2, InputMode::lambda_input);
    SymbolMap h1 = tagged_inputs(p.names, p.sigma, 1);
    SymbolMap h2 = tagged_inputs(p.names, p.sigma, 2);
    SymbolMap w1, w2;  // the pending copies, one family per side
    for (const auto& s : p.sigma) {
        w1.emplace(s, p.names.primed(h1.at(s)));
        w2.emplace(s, p.names.primed(h2.at(s)));
    }
    SymbolSet pend1 = map_set(w1, p.sigma);
    SymbolSet pend2 = map_set(w2, p.sigma);
    SymbolSet pend = set_union(pend1, pend2);
    Symbol d = p.names.fresh("d");
    Symbol f = p.names.fresh("f");

    ReactionAutomaton out;
    out.background = set_union(p.n1.background, p.n2.background);
    out.background = set_union(std::move(out.background), map_set(h1, p.sigma));
    out.background = set_union(std::move(out.background), map_set(h2, p.sigma));
    out.background = set_union(std::move(out.background), pend);
    out.background.insert({d, f});
    out.input_alphabet = p.sigma;
    embed_rules(out.reactions, p.n1, h1,
                set_union(set_union(p.sigma, pend2), SymbolSet{f}), {}, "e1-");
    embed_rules(out.reactions, p.n2, h2,
                set_union(set_union(p.sigma, pend1), SymbolSet{f}), {}, "e2-");
    for (const auto& s : p.sigma) {
        out.reactions.push_back(rule("feed-" + s.name(), with({}, s),
                                     set_union(pend, SymbolSet{f}),
                                     with(with({}, w1.at(s)), w2.at(s))));
        out.reactions.push_back(rule("take1-" + s.name(), with({}, w1.at(s)), p.sigma,
                                     with({}, h1.at(s))));
        out.reactions.push_back(rule("take2-" + s.name(), with({}, w2.at(s)), p.sigma,
                                     with({}, h2.at(s))));
        out.reactions.push_back(rule("hold1-" + s.name(), with({}, w1.at(s)), p.sigma,
                                     with({}, w1.at(s))));
        out.reactions.push_back(rule("hold2-" + s.name(), with({}, w2.at(s)), p.sigma,
                                     with({}, w2.at(s))));
    }
    // Undigested delivered copies block the finish for the same reason they
    // do in the strict-feeding products: the top final must not outrun an
    // operand's own straggler handling.
    out.reactions.push_back(rule("fin",
                                 with(with({}, p.n1.final_symbol), p.n2.final_symbol),
                                 set_union(set_union(p.sigma, pend),
                                           set_union(map_set(h1, p.sigma),
                                                     map_set(h2, p.sigma))),
                                 with({}, f)));
    out.reactions.push_back(rule("boot", with({}, d), {},
                                 map_multiset(h1, p.n1.initial) +
                                     map_multiset(h2, p.n2.initial)));
    add_late_input_loops(out.reactions, p.sigma, f);
    out.initial = with({}, d);
    out.final_symbol = f;
    out.declared_bound = lift2(p.n1.declared_bound, p.n2.declared_bound,
                               [](const BoundSpec& x, const BoundSpec& y) {
                                   return combine(combine(x, y, 0), BoundSpec::linear(2, 6), 0);
                               });
    return finish(out);
}

}  // namespace

ReactionAutomaton union_of(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                           InputMode mode) {
    return juxtapose(a1, a2, mode, false);
}

ReactionAutomaton intersection(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                               InputMode mode) {
    if (mode == InputMode::lambda_input) return intersection_lambda(a1, a2);
    return juxtapose(a1, a2, mode, true);
}

// ---- products ------------------------------------------------------------

ReactionAutomaton concatenation(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                                InputMode mode) {
    BinaryPrep p = prepare_binary(a1, a2, mode);
    SymbolMap h1 = tagged_inputs(p.names, p.sigma, 1);
    SymbolMap h2 = tagged_inputs(p.names, p.sigma, 2);
    Symbol p1 = p.names.fresh("p1");
    Symbol p2 = p.names.fresh("p2");
    Symbol d = p.names.fresh("d");
    Symbol f = p.names.fresh("f");

    ReactionAutomaton out;
    out.background = set_union(p.n1.background, p.n2.background);
    out.background = set_union(std::move(out.background), map_set(h1, p.sigma));
    out.background = set_union(std::move(out.background), map_set(h2, p.sigma));
    out.background.insert({p1, p2, d, f});
    out.input_alphabet = p.sigma;
    embed_rules(out.reactions, p.n1, h1, {f}, {}, "e1-");
    embed_rules(out.reactions, p.n2, h2, {f}, {}, "e2-");
    for (const auto& s : p.sigma) {
        out.reactions.push_back(rule("feed1-" + s.name(), with({}, s), {p2, f},
                                     with({}, h1.at(s))));
        out.reactions.push_back(rule("feed2-" + s.name(), with({}, s), {p1, f},
                                     with({}, h2.at(s))));
        // Consuming a letter may also flip the phase: this letter is the
        // first one of the second operand's word.
        out.reactions.push_back(rule("cut-" + s.name(), with(with({}, p1), s), {f},
                                     with(with({}, p2), h2.at(s)) +
                                         map_multiset(h2, p.n2.initial)));
    }
    // The empty-second-word split: the phase may also flip on a silent
    // step, which starts the second operand on whatever input remains.
    out.reactions.push_back(rule("cut", with({}, p1), p.sigma,
                                 with({}, p2) + map_multiset(h2, p.n2.initial)));
    out.reactions.push_back(rule("fin",
                                 with(with({}, p.n1.final_symbol), p.n2.final_symbol),
                                 set_union(map_set(h1, p.sigma), map_set(h2, p.sigma)),
                                 with({}, f)));
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(h1, p.n1.initial)));
    add_late_input_loops(out.reactions, p.sigma, f);
    out.initial = with(with({}, d), p1);
    out.final_symbol = f;
    out.declared_bound = lift2(p.n1.declared_bound, p.n2.declared_bound,
                               [](const BoundSpec& x, const BoundSpec& y) {
                                   return combine(combine(x, y, 0), BoundSpec::linear(2, 6), 0);
                               });
    return finish(out);
}

ReactionAutomaton shuffle(const ReactionAutomaton& a1, const ReactionAutomaton& a2,
                          InputMode mode) {
    BinaryPrep p = prepare_binary(a1, a2, mode);
    SymbolMap h1 = tagged_inputs(p.names, p.sigma, 1);
    SymbolMap h2 = tagged_inputs(p.names, p.sigma, 2);
    Symbol d = p.names.fresh("d");
    Symbol f = p.names.fresh("f");

    ReactionAutomaton out;
    out.background = set_union(p.n1.background, p.n2.background);
    out.background = set_union(std::move(out.background), map_set(h1, p.sigma));
    out.background = set_union(std::move(out.background), map_set(h2, p.sigma));
    out.background.insert({d, f});
    out.input_alphabet = p.sigma;
    // Either side freezes while the other side still has a staged letter
    // to digest, so the interleaving is arbitrary but never overlapping.
    embed_rules(out.reactions, p.n1, h1, set_union(map_set(h2, p.sigma), SymbolSet{f}), {},
                "e1-");
    embed_rules(out.reactions, p.n2, h2, set_union(map_set(h1, p.sigma), SymbolSet{f}), {},
                "e2-");
    for (const auto& s : p.sigma) {
        out.reactions.push_back(
            rule("feed1-" + s.name(), with({}, s), {f}, with({}, h1.at(s))));
        out.reactions.push_back(
            rule("feed2-" + s.name(), with({}, s), {f}, with({}, h2.at(s))));
    }
    out.reactions.push_back(rule("fin",
                                 with(with({}, p.n1.final_symbol), p.n2.final_symbol),
                                 set_union(map_set(h1, p.sigma), map_set(h2, p.sigma)),
                                 with({}, f)));
    out.reactions.push_back(rule("boot", with({}, d), {},
                                 map_multiset(h1, p.n1.initial) +
                                     map_multiset(h2, p.n2.initial)));
    add_late_input_loops(out.reactions, p.sigma, f);
    out.initial = with({}, d);
    out.final_symbol = f;
    out.declared_bound = lift2(p.n1.declared_bound, p.n2.declared_bound,
                               [](const BoundSpec& x, const BoundSpec& y) {
                                   return combine(combine(x, y, 0), BoundSpec::linear(2, 4), 0);
                               });
    return finish(out);
}

// ---- derivatives ---------------------------------------------------------

namespace {

void check_derivative_word(const ReactionAutomaton& a, const Word& x) {
    if (x.empty()) throw Error("derivative needs a nonempty word");
    for (const auto& s : x) {
        if (a.input_alphabet.count(s) == 0)
            throw Error("derivative word uses symbol outside the input alphabet: " + s.name());
    }
}

ReactionAutomaton right_derivative_ordinary(const ReactionAutomaton& a, const Word& x) {
    ReactionAutomaton n = to_normal_form(a);
    FreshNamer names(n.background);
    SymbolMap h = primed_inputs(names, n.input_alphabet);
    std::vector<Symbol> q;
    for (std::size_t i = 0; i <= x.size(); ++i)
        q.push_back(names.fresh("q" + std::to_string(i)));
    Symbol d = names.fresh("d");
    Symbol fp = names.primed(n.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(h, n.input_alphabet));
    out.background.insert(q.begin(), q.end());
    out.background.insert(d);
    out.background.insert(fp);
    out.input_alphabet = n.input_alphabet;
    embed_rules(out.reactions, n, h, {fp}, {}, "e-");
    for (const auto& s : n.input_alphabet)
        out.reactions.push_back(rule("read-" + s.name(), with({}, s), {}, with({}, h.at(s))));
    // Once the real input stops, the ladder appends the staged copy of x
    // one letter per step before the final check.
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.reactions.push_back(rule("app" + std::to_string(i), with({}, q[i]),
                                     n.input_alphabet,
                                     with(with({}, h.at(x[i])), q[i + 1])));
    }
    out.reactions.push_back(rule("fin", with(with({}, n.final_symbol), q.back()),
                                 n.input_alphabet, with({}, fp)));
    // The operand boots one step late so its start and the first staged
    // letter land together, exactly as they do without the wrapper; booting
    // it directly would let its own end-of-input rules run in the gap.
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(h, n.initial)));
    out.initial = with(with({}, d), q.front());
    out.final_symbol = fp;
    Count len = x.size();
    out.declared_bound = lift(n.declared_bound, [len](const BoundSpec& b) {
        return combine(shift_arg(b, len), BoundSpec::constant(checked_add(len, 6)), 0);
    });
    return finish(out);
}

ReactionAutomaton right_derivative_lambda(const ReactionAutomaton& a, const Word& x) {
    ReactionAutomaton n = to_lambda_normal_form(a);
    FreshNamer names(n.background);
    SymbolMap h = primed_inputs(names, n.input_alphabet);
    std::vector<Symbol> q;
    for (std::size_t i = 0; i <= x.size(); ++i)
        q.push_back(names.fresh("q" + std::to_string(i)));
    Symbol fp = names.primed(n.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(h, n.input_alphabet));
    out.background.insert(q.begin(), q.end());
    out.background.insert(fp);
    out.input_alphabet = n.input_alphabet;
    embed_rules(out.reactions, n, h, {fp}, {}, "e-");
    SymbolSet later(q.begin() + 1, q.end());
    for (const auto& s : n.input_alphabet) {
        out.reactions.push_back(rule("read-" + s.name(), with({}, s),
                                     set_union(later, SymbolSet{fp}), with({}, h.at(s))));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.reactions.push_back(rule("app" + std::to_string(i), with({}, q[i]),
                                     n.input_alphabet,
                                     with(with({}, h.at(x[i])), q[i + 1])));
    }
    out.reactions.push_back(rule("fin", with(with({}, n.final_symbol), q.back()),
                                 n.input_alphabet, with({}, fp)));
    add_late_input_loops(out.reactions, n.input_alphabet, fp);
    out.initial = map_multiset(h, n.initial) + with({}, q.front());
    out.final_symbol = fp;
    Count len = x.size();
    out.declared_bound = lift(n.declared_bound, [len](const BoundSpec& b) {
        return combine(shift_arg(b, len), BoundSpec::constant(checked_add(len, 6)), 0);
    });
    return finish(out);
}

ReactionAutomaton left_derivative_ordinary(const ReactionAutomaton& a, const Word& x) {
    ReactionAutomaton n = to_normal_form(a);
    FreshNamer names(n.background);
    // Input letters ride a pipeline of stage copies so that the first real
    // letter reaches the operand exactly one step after the last letter of
    // x, which the ladder below injects at the front.
    std::vector<SymbolMap> stage;
    for (std::size_t i = 0; i <= x.size(); ++i)
        stage.push_back(tagged_inputs(names, n.input_alphabet, static_cast<int>(i)));
    std::vector<Symbol> q;
    for (std::size_t i = 0; i <= x.size(); ++i)
        q.push_back(names.fresh("q" + std::to_string(i)));
    Symbol d = names.fresh("d");
    const SymbolMap& deliver = stage.back();

    ReactionAutomaton out;
    out.background = n.background;
    for (const auto& m : stage)
        out.background = set_union(std::move(out.background), map_set(m, n.input_alphabet));
    out.background.insert(q.begin(), q.end());
    out.background.insert(d);
    out.input_alphabet = n.input_alphabet;
    embed_rules(out.reactions, n, deliver, {}, {}, "e-");
    for (const auto& s : n.input_alphabet) {
        out.reactions.push_back(
            rule("read-" + s.name(), with({}, s), {}, with({}, stage.front().at(s))));
        for (std::size_t i = 0; i + 1 < stage.size(); ++i) {
            out.reactions.push_back(rule("pass" + std::to_string(i) + "-" + s.name(),
                                         with({}, stage[i].at(s)), {},
                                         with({}, stage[i + 1].at(s))));
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.reactions.push_back(rule("pre" + std::to_string(i), with({}, q[i]), {},
                                     with(with({}, deliver.at(x[i])), q[i + 1])));
    }
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(deliver, n.initial)));
    out.initial = with(with({}, d), q.front());
    out.final_symbol = n.final_symbol;
    Count len = x.size();
    out.declared_bound = lift(n.declared_bound, [len](const BoundSpec& b) {
        return combine(shift_arg(b, len), BoundSpec::linear(len + 1, checked_add(len, 6)), 0);
    });
    return finish(out);
}

ReactionAutomaton left_derivative_lambda(const ReactionAutomaton& a, const Word& x) {
    ReactionAutomaton n = to_lambda_normal_form(a);
    FreshNamer names(n.background);
    SymbolMap h = primed_inputs(names, n.input_alphabet);
    std::vector<Symbol> q;
    for (std::size_t i = 0; i <= x.size(); ++i)
        q.push_back(names.fresh("q" + std::to_string(i)));
    Symbol fp = names.primed(n.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(h, n.input_alphabet));
    out.background.insert(q.begin(), q.end());
    out.background.insert(fp);
    out.input_alphabet = n.input_alphabet;
    embed_rules(out.reactions, n, h, {fp}, {}, "e-");
    // Staging is blocked until the ladder has delivered all of x on silent
    // steps, so the operand always sees x first.
    SymbolSet earlier(q.begin(), q.end() - 1);
    for (const auto& s : n.input_alphabet) {
        out.reactions.push_back(rule("read-" + s.name(), with({}, s),
                                     set_union(earlier, SymbolSet{fp}), with({}, h.at(s))));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.reactions.push_back(rule("pre" + std::to_string(i), with({}, q[i]),
                                     n.input_alphabet,
                                     with(with({}, h.at(x[i])), q[i + 1])));
    }
    out.reactions.push_back(rule("fin", with(with({}, n.final_symbol), q.back()),
                                 n.input_alphabet, with({}, fp)));
    add_late_input_loops(out.reactions, n.input_alphabet, fp);
    out.initial = map_multiset(h, n.initial) + with({}, q.front());
    out.final_symbol = fp;
    Count len = x.size();
    out.declared_bound = lift(n.declared_bound, [len](const BoundSpec& b) {
        return combine(shift_arg(b, len), BoundSpec::constant(checked_add(len, 6)), 0);
    });
    return finish(out);
}

}  // namespace

ReactionAutomaton right_derivative(const ReactionAutomaton& a, const Word& x, InputMode mode) {
    require_valid(a);
    check_derivative_word(a, x);
    return mode == InputMode::ordinary ? right_derivative_ordinary(a, x)
                                       : right_derivative_lambda(a, x);
}

ReactionAutomaton left_derivative(const ReactionAutomaton& a, const Word& x, InputMode mode) {
    require_valid(a);
    check_derivative_word(a, x);
    return mode == InputMode::ordinary ? left_derivative_ordinary(a, x)
                                       : left_derivative_lambda(a, x);
}

// ---- transductions -------------------------------------------------------

ReactionAutomaton gsm_image(const ReactionAutomaton& a, const Gsm& g) {
    require_valid(a);
    if (auto errs = validate(g); !errs.empty()) throw Error("gsm: " + errs.front());
    for (const auto& s : a.input_alphabet) {
        if (g.input_alphabet.count(s) == 0)
            throw Error("gsm does not read the operand letter " + s.name());
    }

    ReactionAutomaton n = to_normal_form(a);
    const SymbolSet& delta = g.output_alphabet;
    {
        FreshNamer pre(set_union(n.background, delta));
        n = rename_apart(n, delta, pre);
    }
    FreshNamer names(set_union(set_union(n.background, delta), g.input_alphabet));
    SymbolMap h = primed_inputs(names, n.input_alphabet);
    std::map<std::string, Symbol> st;
    for (const auto& name : g.states) st.emplace(name, names.fresh(name));
    Symbol c = names.fresh("c");
    Symbol d = names.fresh("d");
    Symbol e = names.fresh("e");
    Symbol fp = names.primed(n.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(h, n.input_alphabet));
    out.background = set_union(std::move(out.background), delta);
    for (const auto& [_, s] : st) out.background.insert(s);
    out.background.insert({c, d, e, fp});
    out.input_alphabet = delta;
    embed_rules(out.reactions, n, h, {c, fp}, {}, "e-");
    // Fed letters double every step; a transition block consumes exactly
    // the doubling-encoded multiset its output word has grown into, which
    // pins the output letters to consecutive feeding steps.
    for (const auto& b : delta)
        out.reactions.push_back(rule("dbl-" + b.name(), with({}, b), {}, with({}, b, 2)));
    int t = 0;
    for (const auto& tr : g.transitions) {
        if (n.input_alphabet.count(tr.input) == 0) continue;
        ++t;
        Multiset block = stm(tr.output);
        Multiset delivered = with(with({}, st.at(tr.to)), d) + with({}, h.at(tr.input));
        out.reactions.push_back(rule("stp" + std::to_string(t),
                                     with(with({}, st.at(tr.from)), c) + block, {},
                                     delivered));
        if (tr.output.size() == 1) {
            out.reactions.push_back(rule("chn" + std::to_string(t),
                                         with(with({}, st.at(tr.from)), d) + block, {},
                                         delivered));
        }
    }
    for (const auto& name : g.finals) {
        out.reactions.push_back(rule("fin-" + name,
                                     with(with({}, st.at(name)), n.final_symbol),
                                     set_union(n.input_alphabet, {c, d}), with({}, fp)));
    }
    out.reactions.push_back(rule("hold", with({}, c), {}, with({}, c)));
    out.reactions.push_back(rule("swap", with({}, d), {}, with({}, c)));
    out.reactions.push_back(rule("exit", with({}, d), delta, {}));
    // Kills the marker when nothing was fed and nothing is in flight; also
    // the regular way out when the marker ends up on the c side.
    out.reactions.push_back(rule("eject", with(with({}, e), c),
                                 set_union(delta, map_set(h, n.input_alphabet)), {}));
    out.initial = map_multiset(h, n.initial) + with(with(with({}, c), st.at(g.start)), e);
    out.final_symbol = fp;
    Count longest = 1;
    for (const auto& tr : g.transitions)
        longest = std::max(longest, static_cast<Count>(tr.output.size()));
    Count slack = checked_add(checked_pow(2, checked_add(longest, 1)),
                              checked_add(g.states.size(), 6));
    out.declared_bound = lift(n.declared_bound, [slack](const BoundSpec& b) {
        return combine(b, BoundSpec::linear(2, slack), 0);
    });
    return finish(out);
}

namespace {

ReactionAutomaton coding_image_lambda(const ReactionAutomaton& a, const Morphism& h) {
    ReactionAutomaton n = to_lambda_normal_form(a);
    SymbolSet delta = h.target();
    {
        FreshNamer pre(set_union(n.background, delta));
        n = rename_apart(n, delta, pre);
    }
    FreshNamer names(set_union(n.background, delta));
    SymbolMap g = primed_inputs(names, n.input_alphabet);
    Symbol d = names.fresh("d");

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(g, n.input_alphabet));
    out.background = set_union(std::move(out.background), delta);
    out.background.insert(d);
    out.input_alphabet = delta;
    embed_rules(out.reactions, n, g, {}, {}, "e-");
    // A fed image letter turns into the staged copy of some preimage
    // letter; a non-injective coding branches here.
    for (const auto& s : n.input_alphabet) {
        out.reactions.push_back(rule("dec-" + s.name(), with({}, h.image.at(s).front()),
                                     {n.final_symbol}, with({}, g.at(s))));
    }
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(g, n.initial)));
    add_late_input_loops(out.reactions, delta, n.final_symbol);
    out.initial = with({}, d);
    out.final_symbol = n.final_symbol;
    out.declared_bound =
        lift(n.declared_bound, [](const BoundSpec& b) { return widen(b, 1, 3); });
    return finish(out);
}

}  // namespace

ReactionAutomaton morphism_image(const ReactionAutomaton& a, const Morphism& h, InputMode mode) {
    require_valid(a);
    if (auto errs = validate(h); !errs.empty()) throw Error("morphism: " + errs.front());
    for (const auto& s : a.input_alphabet) {
        if (h.image.count(s) == 0)
            throw Error("morphism does not cover the operand letter " + s.name());
    }
    if (!h.lambda_free()) throw Error("morphism image needs a lambda-free morphism");
    if (mode == InputMode::lambda_input) {
        if (!h.coding()) throw Error("lambda-mode morphism image needs a coding");
        return coding_image_lambda(a, h);
    }
    Gsm g;
    g.states = {"m0"};
    g.start = "m0";
    g.finals = {"m0"};
    g.input_alphabet = a.input_alphabet;
    g.output_alphabet = h.target();
    for (const auto& s : a.input_alphabet)
        g.transitions.push_back({"m0", s, "m0", h.image.at(s)});
    return gsm_image(a, g);
}

ReactionAutomaton inverse_morphism_lambda(const ReactionAutomaton& a, const Morphism& h) {
    require_valid(a);
    if (auto errs = validate(h); !errs.empty()) throw Error("morphism: " + errs.front());
    for (const auto& [s, image] : h.image) {
        for (const auto& b : image) {
            if (a.input_alphabet.count(b) == 0)
                throw Error("morphism image leaves the operand alphabet: " + b.name());
        }
    }

    // The lambda form matters: its demote rules make a staged letter that
    // arrives after the embedded run finished revoke the inner final
    // symbol for good, so spelling a second block past an accepted word
    // cannot slip through.
    ReactionAutomaton n = to_lambda_normal_form(a);
    const SymbolSet& sigma = h.source;
    {
        FreshNamer pre(set_union(n.background, sigma));
        n = rename_apart(n, sigma, pre);
    }
    FreshNamer names(set_union(n.background, sigma));
    SymbolMap g = primed_inputs(names, n.input_alphabet);
    // Spelling chains: a consumed letter delivers the staged copies of its
    // image one per silent step through per-position links.
    std::map<Symbol, std::vector<Symbol>> links;
    SymbolSet all_links;
    for (const auto& s : sigma) {
        std::vector<Symbol> chain;
        for (std::size_t i = 1; i + 1 <= h.image.at(s).size(); ++i) {
            if (i == h.image.at(s).size()) break;
            chain.push_back(names.fresh("q-" + s.name() + "-" + std::to_string(i)));
        }
        for (const auto& q : chain) all_links.insert(q);
        links.emplace(s, std::move(chain));
    }
    Symbol d = names.fresh("d");
    Symbol fp = names.primed(n.final_symbol);

    SymbolSet erased;
    for (const auto& s : sigma)
        if (h.image.at(s).empty()) erased.insert(s);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(g, n.input_alphabet));
    out.background = set_union(std::move(out.background), sigma);
    out.background = set_union(std::move(out.background), all_links);
    out.background.insert({d, fp});
    out.input_alphabet = sigma;
    embed_rules(out.reactions, n, g, set_union(erased, SymbolSet{fp}), {}, "e-");
    for (const auto& s : sigma) {
        const Word& image = h.image.at(s);
        const auto& chain = links.at(s);
        // Only one spelling chain may run at a time, otherwise two images
        // could blend into a different word of the operand's language.
        SymbolSet start_guard = set_union(all_links, SymbolSet{fp});
        if (image.empty()) {
            out.reactions.push_back(rule("del-" + s.name(), with({}, s), start_guard, {}));
            continue;
        }
        Multiset first = with({}, g.at(image.front()));
        if (image.size() > 1) first.add(chain.front(), 1);
        out.reactions.push_back(
            rule("spell-" + s.name(), with({}, s), start_guard, std::move(first)));
        for (std::size_t i = 1; i < image.size(); ++i) {
            Multiset next = with({}, g.at(image[i]));
            if (i + 1 < image.size()) next.add(chain[i], 1);
            out.reactions.push_back(rule("spell-" + s.name() + "-" + std::to_string(i),
                                         with({}, chain[i - 1]), sigma, std::move(next)));
        }
    }
    for (const auto& q : all_links)
        out.reactions.push_back(rule("keep-" + q.name(), with({}, q), {}, with({}, q)));
    out.reactions.push_back(rule("boot", with({}, d), {}, map_multiset(g, n.initial)));
    out.reactions.push_back(rule("fin", with({}, n.final_symbol),
                                 set_union(set_union(all_links, sigma), erased),
                                 with({}, fp)));
    add_late_input_loops(out.reactions, sigma, fp);
    out.initial = with({}, d);
    out.final_symbol = fp;
    Count longest = 1;
    for (const auto& [_, image] : h.image)
        longest = std::max(longest, static_cast<Count>(image.size()));
    Count slack = checked_add(all_links.size(), 6);
    out.declared_bound = lift(n.declared_bound, [longest, slack](const BoundSpec& b) {
        return combine(scale_arg(b, longest), BoundSpec::linear(1, slack), 0);
    });
    return finish(out);
}

// ---- closures ------------------------------------------------------------

ReactionAutomaton kleene_star_lambda(const ReactionAutomaton& a) {
    require_valid(a);
    ReactionAutomaton n = to_lambda_normal_form(a);
    FreshNamer names(n.background);
    SymbolMap h = primed_inputs(names, n.input_alphabet);
    Symbol p0 = names.fresh("p0");
    Symbol p1 = names.fresh("p1");
    Symbol d = names.fresh("d");
    Symbol e = names.fresh("e");
    Symbol z = names.fresh("z");
    Symbol f2 = names.fresh(n.final_symbol.name() + "''");
    Symbol fp = names.primed(n.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(n.background, map_set(h, n.input_alphabet));
    out.background.insert({p0, p1, d, e, z, f2, fp});
    out.input_alphabet = n.input_alphabet;
    // Rules that could raise the operand's final symbol additionally wait
    // for a silent step, so a segment only ends between letters.
    for (const auto& r : n.reactions) {
        SymbolSet extra = {fp, f2};
        if (r.products.count(n.final_symbol) > 0)
            extra = set_union(std::move(extra), n.input_alphabet);
        out.reactions.push_back(rule("e-" + r.label, map_multiset(h, r.reactants),
                                     set_union(map_set(h, r.inhibitors), extra),
                                     map_multiset(h, r.products)));
    }
    for (const auto& s : n.input_alphabet)
        out.reactions.push_back(rule("read-" + s.name(), with({}, s), {p1, z},
                                     with({}, h.at(s))));
    // Between segments every leftover working symbol is swept; e is the
    // sweep window's off switch.
    for (const auto& s : out.background) {
        if (n.input_alphabet.count(s) > 0) continue;
        if (!(n.background.count(s) > 0 || map_set(h, n.input_alphabet).count(s) > 0))
            continue;
        if (s == n.final_symbol || n.input_alphabet.count(s) > 0) continue;
        out.reactions.push_back(rule("sweep-" + s.name(), with({}, s), {e}, {}));
    }
    out.reactions.push_back(rule("sweep-" + n.final_symbol.name(),
                                 with({}, n.final_symbol), {e}, {}));
    out.reactions.push_back(rule("boot", with({}, d), {},
                                 map_multiset(h, n.initial) + with({}, e)));
    out.reactions.push_back(rule("sw", with({}, p0), n.input_alphabet, with({}, p1)));
    out.reactions.push_back(rule("idle", with({}, p0), {}, with({}, p0)));
    out.reactions.push_back(rule("seg", with(with({}, e), n.final_symbol),
                                 n.input_alphabet, with({}, f2)));
    out.reactions.push_back(rule("again", with({}, f2), {p1},
                                 map_multiset(h, n.initial) + with({}, e)));
    out.reactions.push_back(rule("fin", with({}, f2),
                                 set_union(n.input_alphabet, {p0}), with({}, fp)));
    // The empty word exits immediately; the poison pair makes sure this
    // exit can never absorb a nonempty input.
    out.reactions.push_back(rule("bail", with({}, d), n.input_alphabet,
                                 with(with({}, fp), z)));
    for (const auto& s : n.input_alphabet) {
        Multiset pair = with(with({}, z), s);
        out.reactions.push_back(rule("stuck-" + s.name(), pair, {}, pair));
    }
    add_late_input_loops(out.reactions, n.input_alphabet, fp);
    out.initial = with(with({}, d), p0);
    out.final_symbol = fp;
    out.declared_bound = lift(n.declared_bound, [](const BoundSpec& b) {
        return combine(b, BoundSpec::linear(2, 8), 0);
    });
    return finish(out);
}

ReactionAutomaton kleene_plus_lambda(const ReactionAutomaton& a) {
    // One mandatory segment followed by arbitrarily many: the concatenation
    // gadget keeps a star segment from absorbing the whole input when the
    // operand rejects the empty word.
    return concatenation(a, kleene_star_lambda(a), InputMode::lambda_input);
}

// ---- finite-state imports ------------------------------------------------

ReactionAutomaton from_dfa(const Dfa& m) {
    if (auto errs = validate(m); !errs.empty()) throw Error("dfa: " + errs.front());
    FreshNamer names(m.alphabet);
    std::map<std::string, Symbol> st;
    for (const auto& name : m.states) st.emplace(name, names.fresh(name));
    Symbol f = names.fresh("f");

    ReactionAutomaton out;
    out.background = m.alphabet;
    for (const auto& [_, s] : st) out.background.insert(s);
    out.background.insert(f);
    out.input_alphabet = m.alphabet;
    int t = 0;
    for (const auto& [key, to] : m.transition) {
        ++t;
        out.reactions.push_back(rule("t" + std::to_string(t),
                                     with(with({}, st.at(key.first)), key.second), {},
                                     with({}, st.at(to))));
    }
    for (const auto& name : m.finals) {
        out.reactions.push_back(
            rule("acc-" + name, with({}, st.at(name)), m.alphabet, with({}, f)));
    }
    out.initial = with({}, st.at(m.start));
    out.final_symbol = f;
    out.declared_bound = BoundSpec::constant(2);
    return finish(out);
}

// ---- padding -------------------------------------------------------------

ReactionAutomaton pad_exponential(const ReactionAutomaton& a, const Symbol& pad, PadSide side) {
    require_valid(a);
    if (a.background.count(pad) > 0)
        throw Error("pad symbol already occurs in the background: " + pad.name());
    if (!a.declared_bound || a.declared_bound->kind() != BoundSpec::Kind::exponential)
        throw Error("padding needs an operand with a declared exponential bound");

    FreshNamer names(set_union(a.background, SymbolSet{pad}));
    SymbolMap h = primed_inputs(names, a.input_alphabet);
    Symbol p0 = names.fresh("p0");
    Symbol p1 = names.fresh("p1");
    Symbol c1 = names.fresh("c1");
    Symbol c2 = names.fresh("c2");
    Symbol d = names.fresh("d");
    Symbol e = names.fresh("e");
    Symbol n1 = names.fresh("n1");
    Symbol n2 = names.fresh("n2");
    Symbol f2 = names.fresh(a.final_symbol.name() + "''");
    Symbol fp = names.primed(a.final_symbol);

    ReactionAutomaton out;
    out.background = set_union(a.background, map_set(h, a.input_alphabet));
    out.background.insert({pad, p0, p1, c1, c2, d, e, n1, n2, f2, fp});
    out.input_alphabet = set_union(a.input_alphabet, SymbolSet{pad});
    embed_rules(out.reactions, a, h, {pad, fp}, {}, "e-");
    // Each real letter is staged and counted; the pad block is halved
    // round by round and the rounds are counted; acceptance needs the two
    // counts to cancel exactly, which pins the pad block to 2^|w|.
    for (const auto& s : a.input_alphabet) {
        out.reactions.push_back(rule("read-" + s.name(), with({}, s), {},
                                     with(with({}, h.at(s)), n2)));
    }
    bool prefix = side == PadSide::prefix;
    if (prefix) {
        out.reactions.push_back(rule("go", with({}, p0), {pad}, with(with({}, p1), n2)));
        out.reactions.push_back(rule("load", with({}, pad), {p1}, with({}, c1)));
        out.reactions.push_back(
            rule("half1", with({}, c1, 2), {p0, c2, e}, with({}, c2)));
        out.reactions.push_back(
            rule("half2", with({}, c2, 2), {p0, c1, e}, with({}, c1)));
        out.reactions.push_back(rule("last1", with(with({}, c1), d), {p0, c2}, with({}, e)));
        out.reactions.push_back(rule("last2", with(with({}, c2), d), {p0, c1}, with({}, e)));
        out.reactions.push_back(rule("tick", with({}, p1), {e, fp, f2},
                                     with(with({}, p1), n1)));
    } else {
        out.reactions.push_back(rule("go", with(with({}, p0), pad), {},
                                     with(with({}, p1), pad)));
        out.reactions.push_back(rule("load", with({}, pad), {}, with({}, c1)));
        out.reactions.push_back(
            rule("half1", with({}, c1, 2), {pad, c2, e}, with({}, c2)));
        out.reactions.push_back(
            rule("half2", with({}, c2, 2), {pad, c1, e}, with({}, c1)));
        out.reactions.push_back(rule("last1", with(with({}, c1), d), {pad, c2}, with({}, e)));
        out.reactions.push_back(rule("last2", with(with({}, c2), d), {pad, c1}, with({}, e)));
        out.reactions.push_back(rule("tick", with({}, p1), {pad, e, fp, f2},
                                     with(with({}, p1), n1)));
    }
    out.reactions.push_back(rule("seal", with({}, e), {p0, pad, c1, c2}, with({}, f2)));
    out.reactions.push_back(rule("pair", with(with({}, n1), n2), {}, {}));
    out.reactions.push_back(rule("fin", with(with({}, a.final_symbol), f2), {n1, n2},
                                 with({}, fp)));
    out.initial = map_multiset(h, a.initial) + with(with({}, d), p0);
    if (!prefix) out.initial.add(n2, 1);
    out.final_symbol = fp;
    out.declared_bound =
        BoundSpec::linear(checked_add(a.declared_bound->params()[0], 2), 8);
    return finish(out);
}

}  // namespace ra
