#include <ra/oracle.hh>

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include <ra/error.hh>

namespace ra {

namespace {

// Shortest first, lexicographic within a length.
bool word_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

std::string word_text(const Word& w) {
    if (w.empty()) return "<eps>";
    std::string out;
    for (const auto& s : w) out += s.name();
    return out;
}

template <typename Fn>
void walk_words(const std::vector<Symbol>& syms, std::size_t len, Word& w, Fn&& visit) {
    if (w.size() == len) {
        visit(w);
        return;
    }
    for (const auto& s : syms) {
        w.push_back(s);
        walk_words(syms, len, w, visit);
        w.pop_back();
    }
}

// Calls @p visit with every word over @p alphabet of length <= max_length,
// shortest first.
template <typename Fn>
void for_each_word(const SymbolSet& alphabet, std::size_t max_length, Fn&& visit) {
    std::vector<Symbol> syms(alphabet.begin(), alphabet.end());
    Word w;
    for (std::size_t len = 0; len <= max_length; ++len) {
        walk_words(syms, len, w, visit);
        if (syms.empty()) break;
    }
}

void require_cover(const FiniteLanguageSample& s, std::size_t needed, const char* what) {
    if (s.max_length < needed)
        throw Error(std::string(what) + ": operand slice covers length " +
                    std::to_string(s.max_length) + " but the result cap needs " +
                    std::to_string(needed));
}

void interleave(const Word& a, std::size_t i, const Word& b, std::size_t j, Word& acc,
                std::set<Word>& out) {
    if (i == a.size() && j == b.size()) {
        out.insert(acc);
        return;
    }
    if (i < a.size()) {
        acc.push_back(a[i]);
        interleave(a, i + 1, b, j, acc, out);
        acc.pop_back();
    }
    if (j < b.size()) {
        acc.push_back(b[j]);
        interleave(a, i, b, j + 1, acc, out);
        acc.pop_back();
    }
}

Reaction rule(std::string label, std::string_view reactants, SymbolSet inhibitors,
              std::string_view products) {
    return Reaction{std::move(label), parse_multiset(reactants), std::move(inhibitors),
                    parse_multiset(products)};
}

SymbolSet syms(std::initializer_list<std::string_view> names) {
    SymbolSet out;
    for (auto n : names) out.insert(Symbol(std::string(n)));
    return out;
}

ReactionAutomaton fixture_a0() {
    ReactionAutomaton a;
    a.background = syms({"p0", "a", "b", "c", "a'", "b'", "c'", "f"});
    a.input_alphabet = syms({"a", "b", "c"});
    a.reactions = {
        rule("a1", "a", syms({"b", "b'"}), "a'"),
        rule("a2", "a' b", syms({"c", "c'"}), "b'"),
        rule("a3", "b' c", {}, "c'"),
        rule("a4", "p0", syms({"a", "b", "c", "a'", "b'"}), "f"),
    };
    a.initial = parse_multiset("p0");
    a.final_symbol = Symbol("f");
    a.declared_bound = BoundSpec::linear(2, 4);
    return a;
}

ReactionAutomaton fixture_c2n() {
    ReactionAutomaton a;
    a.background = syms({"c", "p0", "p1", "n1", "c1", "c2", "d", "e", "f"});
    a.input_alphabet = syms({"c"});
    a.reactions = {
        rule("a1", "p0", syms({"c"}), "p1"),
        rule("a2", "p1", syms({"e", "f"}), "p1 n1"),
        rule("a3", "c", syms({"p1"}), "c1"),
        rule("a4", "c1^2", syms({"p0", "c2", "e"}), "c2"),
        rule("a5", "c2^2", syms({"p0", "c1", "e"}), "c1"),
        rule("a6", "c1 d", syms({"p0", "c2"}), "e"),
        rule("a7", "c2 d", syms({"p0", "c1"}), "e"),
        rule("a8", "e", syms({"p0", "c", "c1", "c2"}), "f"),
    };
    a.initial = parse_multiset("d p0");
    a.final_symbol = Symbol("f");
    a.declared_bound = BoundSpec::linear(2, 6);
    return a;
}

ReactionAutomaton fixture_mismatch() {
    ReactionAutomaton a;
    a.background = syms({"a", "b", "a'", "b'", "c1", "c2", "p0", "p1", "p2", "p3", "f"});
    a.input_alphabet = syms({"a", "b"});
    a.reactions = {
        rule("a1", "p0 a", {}, "p0 c1"),
        rule("a2", "p0 b", {}, "p0 c1"),
        rule("a3", "p0 a", {}, "p1 a'"),
        rule("a4", "p0 b", {}, "p1 b'"),
        rule("a5", "p1 a", {}, "p1 c2"),
        rule("a6", "p1 b", {}, "p1 c2"),
        rule("a7", "p1 a", {}, "p2 c2"),
        rule("a8", "p1 b", {}, "p2 c2"),
        rule("a9", "p2 a c1", {}, "p2"),
        rule("a10", "p2 b c1", {}, "p2"),
        rule("a11", "p2 a' b", syms({"c1"}), "p3"),
        rule("a12", "p2 b' a", syms({"c1"}), "p3"),
        rule("a13", "p3 a c2", {}, "p3"),
        rule("a14", "p3 b c2", {}, "p3"),
        rule("a15", "p3", syms({"a", "b", "c2"}), "f"),
    };
    a.initial = parse_multiset("p0");
    a.final_symbol = Symbol("f");
    a.declared_bound = BoundSpec::linear(2, 4);
    return a;
}

ReactionAutomaton fixture_empty() {
    ReactionAutomaton a;
    a.background = syms({"a", "b", "c", "d", "f"});
    a.input_alphabet = syms({"a", "b", "c"});
    a.initial = parse_multiset("d");
    a.final_symbol = Symbol("f");
    a.declared_bound = BoundSpec::constant(4);
    return a;
}

bool is_anbncn(const Word& w) {
    std::size_t i = 0;
    std::size_t counts[3] = {0, 0, 0};
    const Symbol order[3] = {Symbol("a"), Symbol("b"), Symbol("c")};
    for (int block = 0; block < 3; ++block)
        while (i < w.size() && w[i] == order[block]) {
            ++counts[block];
            ++i;
        }
    return i == w.size() && counts[0] == counts[1] && counts[1] == counts[2];
}

bool is_c_pow2(const Word& w) {
    for (const auto& s : w)
        if (s != Symbol("c")) return false;
    auto n = w.size();
    return n > 0 && (n & (n - 1)) == 0;
}

// True when w splits as u1.s.u2.v1.t.v2 with |u1|=|v1|, |u2|=|v2|>=min_j
// and s != t.
bool has_mismatch_split(const Word& w, std::size_t min_j) {
    if (w.size() < 2 || w.size() % 2 != 0) return false;
    for (std::size_t i = 0; 2 * i + 2 <= w.size(); ++i) {
        std::size_t j = (w.size() - 2 * i - 2) / 2;
        if (j < min_j) continue;
        if (w[i] != w[2 * i + j + 1]) return true;
    }
    return false;
}

}  // namespace

std::string to_lines(const FiniteLanguageSample& s) {
    std::vector<Word> sorted(s.words.begin(), s.words.end());
    std::sort(sorted.begin(), sorted.end(), word_less);
    std::string out;
    for (const auto& w : sorted) {
        out += word_text(w);
        out += '\n';
    }
    return out;
}

FiniteLanguageSample enumerate_language(const ReactionAutomaton& a, std::size_t max_length,
                                        const BoundSpec& bound, InputMode mode) {
    Evaluator ev(a);
    FiniteLanguageSample out{a.input_alphabet, max_length, {}};
    for_each_word(a.input_alphabet, max_length, [&](const Word& w) {
        if (ev.accepts(w, bound, mode).accepted) out.words.insert(w);
    });
    return out;
}

FiniteLanguageSample enumerate_language(const PredicateLanguage& p, std::size_t max_length) {
    FiniteLanguageSample out{p.alphabet, max_length, {}};
    for_each_word(p.alphabet, max_length, [&](const Word& w) {
        if (p.membership(w)) out.words.insert(w);
    });
    return out;
}

FiniteLanguageSample enumerate_language(const Dfa& d, std::size_t max_length) {
    if (auto problems = validate(d); !problems.empty())
        throw Error("invalid dfa: " + problems.front());
    FiniteLanguageSample out{d.alphabet, max_length, {}};
    for_each_word(d.alphabet, max_length, [&](const Word& w) {
        std::string q = d.start;
        for (const auto& s : w) q = d.transition.at({q, s});
        if (d.finals.contains(q)) out.words.insert(w);
    });
    return out;
}

FiniteLanguageSample sample_union(const FiniteLanguageSample& s1, const FiniteLanguageSample& s2) {
    FiniteLanguageSample out{s1.alphabet, std::min(s1.max_length, s2.max_length), {}};
    out.alphabet.insert(s2.alphabet.begin(), s2.alphabet.end());
    for (const auto& w : s1.words)
        if (w.size() <= out.max_length) out.words.insert(w);
    for (const auto& w : s2.words)
        if (w.size() <= out.max_length) out.words.insert(w);
    return out;
}

FiniteLanguageSample sample_intersection(const FiniteLanguageSample& s1,
                                         const FiniteLanguageSample& s2) {
    FiniteLanguageSample out{s1.alphabet, std::min(s1.max_length, s2.max_length), {}};
    out.alphabet.insert(s2.alphabet.begin(), s2.alphabet.end());
    for (const auto& w : s1.words)
        if (w.size() <= out.max_length && s2.contains(w)) out.words.insert(w);
    return out;
}

FiniteLanguageSample sample_concat(const FiniteLanguageSample& s1, const FiniteLanguageSample& s2,
                                   std::size_t max_length) {
    require_cover(s1, max_length, "concatenation");
    require_cover(s2, max_length, "concatenation");
    FiniteLanguageSample out{s1.alphabet, max_length, {}};
    out.alphabet.insert(s2.alphabet.begin(), s2.alphabet.end());
    for (const auto& w1 : s1.words) {
        if (w1.size() > max_length) continue;
        for (const auto& w2 : s2.words) {
            if (w1.size() + w2.size() > max_length) continue;
            Word w = w1;
            w.insert(w.end(), w2.begin(), w2.end());
            out.words.insert(std::move(w));
        }
    }
    return out;
}

FiniteLanguageSample sample_shuffle(const FiniteLanguageSample& s1, const FiniteLanguageSample& s2,
                                    std::size_t max_length) {
    require_cover(s1, max_length, "shuffle");
    require_cover(s2, max_length, "shuffle");
    FiniteLanguageSample out{s1.alphabet, max_length, {}};
    out.alphabet.insert(s2.alphabet.begin(), s2.alphabet.end());
    Word acc;
    for (const auto& w1 : s1.words) {
        if (w1.size() > max_length) continue;
        for (const auto& w2 : s2.words) {
            if (w1.size() + w2.size() > max_length) continue;
            interleave(w1, 0, w2, 0, acc, out.words);
        }
    }
    return out;
}

FiniteLanguageSample sample_star(const FiniteLanguageSample& s, std::size_t max_length) {
    require_cover(s, max_length, "star");
    FiniteLanguageSample out{s.alphabet, max_length, {{}}};
    // Fixpoint: append factors until nothing new fits under the cap.
    for (bool grew = true; grew;) {
        grew = false;
        std::set<Word> next = out.words;
        for (const auto& w : out.words)
            for (const auto& u : s.words) {
                if (u.empty() || w.size() + u.size() > max_length) continue;
                Word joined = w;
                joined.insert(joined.end(), u.begin(), u.end());
                if (next.insert(std::move(joined)).second) grew = true;
            }
        out.words = std::move(next);
    }
    return out;
}

FiniteLanguageSample sample_plus(const FiniteLanguageSample& s, std::size_t max_length) {
    auto out = sample_star(s, max_length);
    if (!s.contains(Word{})) out.words.erase(Word{});
    return out;
}

FiniteLanguageSample sample_left_derivative(const FiniteLanguageSample& s, const Word& x) {
    require_cover(s, x.size(), "left derivative");
    FiniteLanguageSample out{s.alphabet, s.max_length - x.size(), {}};
    for (const auto& w : s.words) {
        if (w.size() < x.size() || !std::equal(x.begin(), x.end(), w.begin())) continue;
        out.words.insert(Word(w.begin() + static_cast<std::ptrdiff_t>(x.size()), w.end()));
    }
    return out;
}

FiniteLanguageSample sample_right_derivative(const FiniteLanguageSample& s, const Word& x) {
    require_cover(s, x.size(), "right derivative");
    FiniteLanguageSample out{s.alphabet, s.max_length - x.size(), {}};
    for (const auto& w : s.words) {
        if (w.size() < x.size() ||
            !std::equal(x.rbegin(), x.rend(), w.rbegin()))
            continue;
        out.words.insert(Word(w.begin(), w.end() - static_cast<std::ptrdiff_t>(x.size())));
    }
    return out;
}

FiniteLanguageSample sample_morphism_image(const FiniteLanguageSample& s, const Morphism& h,
                                           std::size_t max_length) {
    if (auto problems = validate(h); !problems.empty())
        throw Error("invalid morphism: " + problems.front());
    if (!h.lambda_free())
        throw Error("morphism image: a symbol maps to the empty word, no finite "
                    "operand slice determines the truncated image");
    require_cover(s, max_length, "morphism image");
    FiniteLanguageSample out{h.target(), max_length, {}};
    for (const auto& w : s.words) {
        if (w.size() > max_length) continue;
        Word img = h.apply(w);
        if (img.size() <= max_length) out.words.insert(std::move(img));
    }
    return out;
}

FiniteLanguageSample sample_gsm_image(const FiniteLanguageSample& s, const Gsm& g,
                                      std::size_t max_length) {
    if (auto problems = validate(g); !problems.empty())
        throw Error("invalid gsm: " + problems.front());
    require_cover(s, max_length, "gsm image");
    std::map<std::pair<std::string, Symbol>, std::vector<const GsmTransition*>> arrows;
    for (const auto& t : g.transitions) arrows[{t.from, t.input}].push_back(&t);
    FiniteLanguageSample out{g.output_alphabet, max_length, {}};
    // Outputs are nonempty per step, so inputs longer than the cap only
    // produce over-long outputs and can be skipped outright.
    Word acc;
    auto run = [&](auto&& self, const Word& w, std::size_t pos, const std::string& q) -> void {
        if (acc.size() > max_length) return;
        if (pos == w.size()) {
            if (g.finals.contains(q)) out.words.insert(acc);
            return;
        }
        auto it = arrows.find({q, w[pos]});
        if (it == arrows.end()) return;
        for (const GsmTransition* t : it->second) {
            acc.insert(acc.end(), t->output.begin(), t->output.end());
            self(self, w, pos + 1, t->to);
            acc.erase(acc.end() - static_cast<std::ptrdiff_t>(t->output.size()), acc.end());
        }
    };
    for (const auto& w : s.words) {
        if (w.size() > max_length) continue;
        run(run, w, 0, g.start);
    }
    return out;
}

FiniteLanguageSample sample_inverse_morphism_image(const FiniteLanguageSample& s,
                                                   const Morphism& h, std::size_t max_length) {
    if (auto problems = validate(h); !problems.empty())
        throw Error("invalid morphism: " + problems.front());
    std::size_t longest = 0;
    for (const auto& [sym, img] : h.image) longest = std::max(longest, img.size());
    require_cover(s, max_length * longest, "inverse morphism image");
    FiniteLanguageSample out{h.source, max_length, {}};
    for_each_word(h.source, max_length, [&](const Word& w) {
        if (s.contains(h.apply(w))) out.words.insert(w);
    });
    return out;
}

EqualityCheck check_equal(const FiniteLanguageSample& a, const FiniteLanguageSample& b) {
    if (a.alphabet != b.alphabet || a.max_length != b.max_length)
        throw Error("samples are not comparable: alphabet or length cap differs");
    EqualityCheck res;
    res.equal = a.words == b.words;
    if (res.equal) return res;
    bool have = false;
    auto consider = [&](const Word& w, bool in_first) {
        if (have && !word_less(w, res.counterexample)) return;
        res.counterexample = w;
        res.only_in_first = in_first;
        have = true;
    };
    for (const auto& w : a.words)
        if (!b.contains(w)) consider(w, true);
    for (const auto& w : b.words)
        if (!a.contains(w)) consider(w, false);
    return res;
}

ReactionAutomaton fixture_automaton(std::string_view name) {
    if (name == "a0") return fixture_a0();
    if (name == "c2n") return fixture_c2n();
    if (name == "mismatch") return fixture_mismatch();
    if (name == "empty") return fixture_empty();
    throw Error("unknown fixture automaton '" + std::string(name) + "'");
}

Dfa fixture_dfa(std::string_view name) {
    if (name != "sigma_plus") throw Error("unknown fixture dfa '" + std::string(name) + "'");
    Dfa d;
    d.states = {"q0", "q1"};
    d.alphabet = syms({"a", "b", "c"});
    d.start = "q0";
    d.finals = {"q1"};
    for (const auto& s : d.alphabet) {
        d.transition[{"q0", s}] = "q1";
        d.transition[{"q1", s}] = "q1";
    }
    return d;
}

PredicateLanguage predicate(std::string_view name) {
    if (name == "anbncn")
        return {syms({"a", "b", "c"}), [](const Word& w) { return is_anbncn(w); },
                "equal-length blocks a..ab..bc..c"};
    if (name == "c_pow2")
        return {syms({"c"}), [](const Word& w) { return is_c_pow2(w); },
                "runs of c whose length is a power of two"};
    if (name == "mismatch_claimed")
        return {syms({"a", "b"}),
                [](const Word& w) { return has_mismatch_split(w, 0); },
                "even words with a mismatched equal-offset position pair"};
    if (name == "mismatch_reachable")
        return {syms({"a", "b"}),
                [](const Word& w) { return has_mismatch_split(w, 1); },
                "mismatched position pair with a nonempty middle gap"};
    throw Error("unknown predicate '" + std::string(name) + "'");
}

}  // namespace ra
