#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include <ra/model.hh>
#include <ra/multiset.hh>

namespace ra::test {

inline Symbol sym(std::string_view name) { return Symbol(std::string(name)); }

// Word of one-character symbols, e.g. wrd("aab") = a a b.
inline Word wrd(std::string_view text) {
    Word w;
    for (char c : text) w.push_back(Symbol(std::string(1, c)));
    return w;
}

inline SymbolSet symset(std::initializer_list<std::string_view> names) {
    SymbolSet out;
    for (auto n : names) out.insert(Symbol(std::string(n)));
    return out;
}

inline Multiset mset(std::string_view text) { return parse_multiset(text); }

// Acceptor of { a^n b^n c^n : n >= 0 } built inline, independent of the
// fixture catalog.
inline ReactionAutomaton make_anbncn() {
    ReactionAutomaton a;
    a.background = symset({"p0", "a", "b", "c", "a'", "b'", "c'", "f"});
    a.input_alphabet = symset({"a", "b", "c"});
    a.reactions = {
        {"a1", mset("a"), symset({"b", "b'"}), mset("a'")},
        {"a2", mset("a' b"), symset({"c", "c'"}), mset("b'")},
        {"a3", mset("b' c"), {}, mset("c'")},
        {"a4", mset("p0"), symset({"a", "b", "c", "a'", "b'"}), mset("f")},
    };
    a.initial = mset("p0");
    a.final_symbol = sym("f");
    a.declared_bound = BoundSpec::linear(2, 4);
    return a;
}

// Acceptor of { c^(2^n) : n >= 0 }: counts the fed symbols, then halves
// the count repeatedly and checks it bottoms out at exactly one.
inline ReactionAutomaton make_doubling() {
    ReactionAutomaton a;
    a.background = symset({"c", "p0", "p1", "n1", "c1", "c2", "d", "e", "f"});
    a.input_alphabet = symset({"c"});
    a.reactions = {
        {"a1", mset("p0"), symset({"c"}), mset("p1")},
        {"a2", mset("p1"), symset({"e", "f"}), mset("p1 n1")},
        {"a3", mset("c"), symset({"p1"}), mset("c1")},
        {"a4", mset("c1^2"), symset({"p0", "c2", "e"}), mset("c2")},
        {"a5", mset("c2^2"), symset({"p0", "c1", "e"}), mset("c1")},
        {"a6", mset("c1 d"), symset({"p0", "c2"}), mset("e")},
        {"a7", mset("c2 d"), symset({"p0", "c1"}), mset("e")},
        {"a8", mset("e"), symset({"p0", "c", "c1", "c2"}), mset("f")},
    };
    a.initial = mset("d p0");
    a.final_symbol = sym("f");
    a.declared_bound = BoundSpec::linear(2, 6);
    return a;
}

// Acceptor of words w1 s w2 v1 t w2' with |w1|=|v1|, |w2|=|w2'| nonempty
// and s != t: guesses the two probed positions and checks the offsets
// with token counting.
inline ReactionAutomaton make_mismatch() {
    ReactionAutomaton a;
    a.background = symset({"a", "b", "a'", "b'", "c1", "c2", "p0", "p1", "p2", "p3", "f"});
    a.input_alphabet = symset({"a", "b"});
    a.reactions = {
        {"a1", mset("p0 a"), {}, mset("p0 c1")},
        {"a2", mset("p0 b"), {}, mset("p0 c1")},
        {"a3", mset("p0 a"), {}, mset("p1 a'")},
        {"a4", mset("p0 b"), {}, mset("p1 b'")},
        {"a5", mset("p1 a"), {}, mset("p1 c2")},
        {"a6", mset("p1 b"), {}, mset("p1 c2")},
        {"a7", mset("p1 a"), {}, mset("p2 c2")},
        {"a8", mset("p1 b"), {}, mset("p2 c2")},
        {"a9", mset("p2 a c1"), {}, mset("p2")},
        {"a10", mset("p2 b c1"), {}, mset("p2")},
        {"a11", mset("p2 a' b"), symset({"c1"}), mset("p3")},
        {"a12", mset("p2 b' a"), symset({"c1"}), mset("p3")},
        {"a13", mset("p3 a c2"), {}, mset("p3")},
        {"a14", mset("p3 b c2"), {}, mset("p3")},
        {"a15", mset("p3"), symset({"a", "b", "c2"}), mset("f")},
    };
    a.initial = mset("p0");
    a.final_symbol = sym("f");
    a.declared_bound = BoundSpec::linear(2, 4);
    return a;
}

// Brute-force reference for the maximal-firing sets: enumerates every
// firing vector with per-rule counts up to the state weight, keeps the
// enabled ones, and filters for pointwise maximality. Only valid when
// every reaction consumes something.
inline std::vector<ReactionMultiset> brute_maximal(const ReactionAutomaton& a,
                                                   const Multiset& t) {
    std::vector<const Reaction*> rules;
    for (const auto& r : a.reactions) rules.push_back(&r);
    std::sort(rules.begin(), rules.end(),
              [](const Reaction* x, const Reaction* y) { return x->label < y->label; });

    std::vector<ReactionMultiset> all;
    std::vector<Count> counts(rules.size(), 0);
    const Count cap = t.weight();
    auto check = [&] {
        Multiset need;
        SymbolSet inhibited;
        bool any = false;
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (counts[i] == 0) continue;
            any = true;
            need = need + scale(rules[i]->reactants, counts[i]);
            inhibited.insert(rules[i]->inhibitors.begin(), rules[i]->inhibitors.end());
        }
        if (!any || !need.subset_of(t) || !t.disjoint_with(inhibited)) return;
        ReactionMultiset alpha;
        for (std::size_t i = 0; i < rules.size(); ++i)
            if (counts[i] > 0) alpha[rules[i]->label] = counts[i];
        all.push_back(std::move(alpha));
    };
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == rules.size()) {
            check();
            return;
        }
        for (Count k = 0; k <= cap; ++k) {
            counts[i] = k;
            self(self, i + 1);
        }
        counts[i] = 0;
    };
    rec(rec, 0);

    auto dominated = [](const ReactionMultiset& x, const ReactionMultiset& y) {
        // x strictly below y?
        if (x == y) return false;
        for (const auto& [label, k] : x) {
            auto it = y.find(label);
            if (it == y.end() || it->second < k) return false;
        }
        return true;
    };
    std::vector<ReactionMultiset> out;
    for (const auto& x : all) {
        bool keep = true;
        for (const auto& y : all)
            if (dominated(x, y)) {
                keep = false;
                break;
            }
        if (keep) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ra::test
