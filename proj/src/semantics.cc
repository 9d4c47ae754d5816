#include <ra/semantics.hh>

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>

#include <ra/error.hh>

namespace ra {

namespace {

Count max_firings(const Reaction& r, const Multiset& remaining) {
    Count m = std::numeric_limits<Count>::max();
    for (const auto& [s, n] : r.reactants.counts()) m = std::min(m, remaining.count(s) / n);
    return m;
}

void enumerate(const std::vector<const Reaction*>& usable, std::size_t i,
               const Multiset& remaining, ReactionMultiset& alpha,
               std::vector<ReactionMultiset>& out) {
    if (i == usable.size()) {
        if (alpha.empty()) return;
        for (const Reaction* r : usable)
            if (r->reactants.subset_of(remaining)) return;  // still extensible
        out.push_back(alpha);
        return;
    }
    for (Count k = max_firings(*usable[i], remaining);; --k) {
        if (k > 0)
            alpha[usable[i]->label] = k;
        else
            alpha.erase(usable[i]->label);
        enumerate(usable, i + 1, remaining - scale(usable[i]->reactants, k), alpha, out);
        if (k == 0) break;
    }
}

}  // namespace

Evaluator::Evaluator(const ReactionAutomaton& a) : a_(a) {
    require_valid(a);
    for (const auto& r : a.reactions) by_label_.push_back(&r);
    std::ranges::sort(by_label_, {}, &Reaction::label);
}

const std::vector<ReactionMultiset>& Evaluator::maximal(const Multiset& state) {
    if (auto it = cache_.find(state); it != cache_.end()) return it->second;
    std::vector<ReactionMultiset> out;
    std::vector<const Reaction*> usable;
    bool unbounded = false;
    for (const Reaction* r : by_label_) {
        if (!state.disjoint_with(r->inhibitors)) continue;
        if (r->reactants.empty()) {
            // Could fire arbitrarily often: no maximal choice exists.
            unbounded = true;
            break;
        }
        if (r->reactants.subset_of(state)) usable.push_back(r);
    }
    if (!unbounded && !usable.empty()) {
        ReactionMultiset alpha;
        enumerate(usable, 0, state, alpha, out);
        std::ranges::sort(out);
    }
    return cache_.emplace(state, std::move(out)).first->second;
}

Multiset Evaluator::fire(const Multiset& state, const ReactionMultiset& alpha) const {
    auto parts = reaction_multiset_parts(a_, alpha);
    return state - parts.reactants + parts.products;
}

std::vector<Multiset> Evaluator::results(const Multiset& state) {
    const auto& alphas = maximal(state);
    if (alphas.empty()) return {state};
    std::set<Multiset> out;
    for (const auto& alpha : alphas) out.insert(fire(state, alpha));
    return {out.begin(), out.end()};
}

std::vector<Evaluator::Child> Evaluator::expand(const Configuration& c, const Word& word,
                                                InputMode mode) {
    std::vector<Child> out;
    const std::size_t n = word.size();
    if (c.consumed < n) {
        const Symbol& fed = word[c.consumed];
        Multiset seeded = c.state;
        seeded.add(fed);
        const Count seed_weight = seeded.weight();
        const auto& alphas = maximal(seeded);
        if (alphas.empty()) {
            // Nothing fires; the fed symbol just lands in the state.
            out.push_back({{seeded, c.consumed + 1},
                           {TraceStep::Kind::fed, fed, std::nullopt, seeded},
                           seed_weight});
        } else {
            for (const auto& alpha : alphas) {
                Multiset next = fire(seeded, alpha);
                Count gate = std::max(seed_weight, next.weight());
                out.push_back({{next, c.consumed + 1},
                               {TraceStep::Kind::fed, fed, alpha, std::move(next)},
                               gate});
            }
        }
        if (mode == InputMode::lambda_input) {
            for (const auto& alpha : maximal(c.state)) {
                Multiset next = fire(c.state, alpha);
                Count gate = next.weight();
                out.push_back({{next, c.consumed},
                               {TraceStep::Kind::lambda, std::nullopt, alpha, std::move(next)},
                               gate});
            }
        }
    } else {
        for (const auto& alpha : maximal(c.state)) {
            Multiset next = fire(c.state, alpha);
            Count gate = next.weight();
            out.push_back({{next, c.consumed},
                           {TraceStep::Kind::evolve, std::nullopt, alpha, std::move(next)},
                           gate});
        }
    }
    return out;
}

std::vector<Configuration> Evaluator::successors(const Configuration& c, const Word& word,
                                                 InputMode mode) {
    std::set<Configuration> out;
    for (auto& ch : expand(c, word, mode)) out.insert(std::move(ch.config));
    return {out.begin(), out.end()};
}

void Evaluator::check_word(const Word& word) const {
    for (const auto& s : word)
        if (!a_.input_alphabet.contains(s))
            throw Error("input symbol '" + s.name() + "' outside the input alphabet");
}

Evaluator::Search Evaluator::run_bfs(const Word& word, const BoundSpec& bound, InputMode mode,
                                     bool want_trace, std::vector<Configuration>* collect) {
    check_word(word);
    Search s;
    const Count budget = bound.eval(word.size());
    const Configuration start{a_.initial, 0};
    std::set<Configuration> visited;
    std::deque<Configuration> queue;
    if (start.state.weight() > budget) {
        s.pruned = true;
    } else {
        visited.insert(start);
        queue.push_back(start);
    }
    while (!queue.empty()) {
        Configuration c = std::move(queue.front());
        queue.pop_front();
        if (c.consumed == word.size() && maximal(c.state).empty()) {
            if (c.state.count(a_.final_symbol) > 0) {
                if (!s.accepted) {
                    s.accepted = true;
                    s.goal = c;
                }
                if (!collect) break;  // exhaust everything when collecting
            }
            continue;  // halted, nothing more to do here
        }
        for (auto& ch : expand(c, word, mode)) {
            if (ch.gate > budget) {
                s.pruned = true;
                continue;
            }
            if (visited.insert(ch.config).second) {
                if (want_trace) s.parent.emplace(ch.config, Edge{c, std::move(ch.step)});
                queue.push_back(std::move(ch.config));
            }
        }
    }
    s.explored = visited.size();
    if (collect) collect->assign(visited.begin(), visited.end());
    return s;
}

Evaluator::StateId Evaluator::intern(Multiset m) {
    auto [it, inserted] = ids_.try_emplace(std::move(m), static_cast<StateId>(nodes_.size()));
    if (inserted)
        nodes_.push_back({&it->first, it->first.weight(),
                          it->first.count(a_.final_symbol) > 0, false, {}, {}});
    return it->second;
}

const std::vector<Evaluator::StateId>& Evaluator::evolve_children(StateId id) {
    if (!nodes_[id].expanded) {
        const Multiset& state = *nodes_[id].state;
        std::vector<StateId> kids;
        for (const auto& alpha : maximal(state)) kids.push_back(intern(fire(state, alpha)));
        std::ranges::sort(kids);
        kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
        nodes_[id].evolve = std::move(kids);
        nodes_[id].expanded = true;
    }
    return nodes_[id].evolve;
}

const std::vector<Evaluator::StateId>& Evaluator::fed_children(StateId id, const Symbol& s) {
    if (auto it = nodes_[id].fed.find(s); it != nodes_[id].fed.end()) return it->second;
    Multiset seeded = *nodes_[id].state;
    seeded.add(s);
    std::vector<StateId> kids;
    const auto& alphas = maximal(seeded);
    if (alphas.empty()) {
        // Nothing fires; the fed symbol just lands in the state.
        kids.push_back(intern(std::move(seeded)));
    } else {
        for (const auto& alpha : alphas) kids.push_back(intern(fire(seeded, alpha)));
        std::ranges::sort(kids);
        kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    }
    return nodes_[id].fed.emplace(s, std::move(kids)).first->second;
}

SearchOutcome Evaluator::run_fast(const Word& word, Count budget, InputMode mode) {
    SearchOutcome out;
    const std::size_t n = word.size();
    const StateId start = intern(a_.initial);
    if (nodes_[start].weight > budget) {
        out.pruned_by_bound = true;
        return out;
    }
    auto key = [](StateId id, std::size_t consumed) {
        return (static_cast<std::uint64_t>(id) << 32) | static_cast<std::uint64_t>(consumed);
    };
    // Best-first: prefer configurations with more input consumed, lighter
    // states among those. An accepting halt is reached almost greedily while
    // a rejecting search still exhausts the same space, so the order only
    // changes how soon an accept can stop the search.
    struct Entry {
        std::size_t consumed;
        Count weight;
        StateId id;
        bool operator<(const Entry& o) const {
            if (consumed != o.consumed) return consumed < o.consumed;
            if (weight != o.weight) return weight > o.weight;
            return id > o.id;
        }
    };
    std::unordered_set<std::uint64_t> visited;
    std::priority_queue<Entry> queue;
    visited.insert(key(start, 0));
    queue.push({0, nodes_[start].weight, start});
    auto admit = [&](StateId cid, std::size_t consumed, Count gate) {
        if (gate > budget) {
            out.pruned_by_bound = true;
            return;
        }
        if (visited.insert(key(cid, consumed)).second)
            queue.push({consumed, nodes_[cid].weight, cid});
    };
    while (!queue.empty() && !out.accepted) {
        auto [consumed, weight, id] = queue.top();
        queue.pop();
        if (consumed == n) {
            const auto& kids = evolve_children(id);
            if (kids.empty()) {
                if (nodes_[id].final_present) out.accepted = true;
                continue;
            }
            for (StateId cid : kids) admit(cid, consumed, nodes_[cid].weight);
        } else {
            const Count fed_floor = nodes_[id].weight + 1;
            for (StateId cid : fed_children(id, word[consumed]))
                admit(cid, consumed + 1, std::max(fed_floor, nodes_[cid].weight));
            if (mode == InputMode::lambda_input)
                for (StateId cid : evolve_children(id)) admit(cid, consumed, nodes_[cid].weight);
        }
    }
    out.explored = visited.size();
    return out;
}

SearchOutcome Evaluator::accepts(const Word& word, const BoundSpec& bound, InputMode mode) {
    check_word(word);
    return run_fast(word, bound.eval(word.size()), mode);
}

std::optional<Trace> Evaluator::accepting_trace(const Word& word, const BoundSpec& bound,
                                                InputMode mode) {
    Search s = run_bfs(word, bound, mode, true, nullptr);
    if (!s.accepted) return std::nullopt;
    Trace t{word, mode, a_.initial, {}};
    const Configuration start{a_.initial, 0};
    Configuration cur = *s.goal;
    while (!(cur == start)) {
        const Edge& e = s.parent.at(cur);
        t.steps.push_back(e.step);
        cur = e.from;
    }
    std::ranges::reverse(t.steps);
    return t;
}

std::optional<Count> Evaluator::workspace(const Word& word, const BoundSpec& bound,
                                          InputMode mode) {
    check_word(word);
    const Count budget = bound.eval(word.size());
    const Configuration start{a_.initial, 0};
    if (start.state.weight() > budget) return std::nullopt;
    std::map<Configuration, Count> best;
    using Entry = std::pair<Count, Configuration>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    best.emplace(start, start.state.weight());
    heap.emplace(start.state.weight(), start);
    while (!heap.empty()) {
        auto [v, c] = heap.top();
        heap.pop();
        if (auto it = best.find(c); it != best.end() && it->second < v) continue;
        if (c.consumed == word.size() && maximal(c.state).empty() &&
            c.state.count(a_.final_symbol) > 0)
            return v;
        for (auto& ch : expand(c, word, mode)) {
            if (ch.gate > budget) continue;
            // Fed states gate admission above but do not count toward the
            // peak: only reached states do.
            Count nv = std::max(v, ch.config.state.weight());
            auto it = best.find(ch.config);
            if (it == best.end() || nv < it->second) {
                best.insert_or_assign(it == best.end() ? best.end() : it, ch.config, nv);
                heap.emplace(nv, std::move(ch.config));
            }
        }
    }
    return std::nullopt;
}

std::vector<Configuration> Evaluator::reachable(const Word& word, const BoundSpec& bound,
                                                InputMode mode) {
    std::vector<Configuration> out;
    run_bfs(word, bound, mode, false, &out);
    return out;
}

bool enabled(const ReactionAutomaton& a, const ReactionMultiset& alpha, const Multiset& state) {
    auto parts = reaction_multiset_parts(a, alpha);
    return parts.reactants.subset_of(state) && state.disjoint_with(parts.inhibitors);
}

std::vector<ReactionMultiset> enumerate_maximal(const ReactionAutomaton& a,
                                                const Multiset& state) {
    Evaluator ev(a);
    return ev.maximal(state);
}

std::vector<Multiset> results(const ReactionAutomaton& a, const Multiset& state) {
    Evaluator ev(a);
    return ev.results(state);
}

std::vector<Configuration> successors(const ReactionAutomaton& a, const Configuration& c,
                                      const Word& word, InputMode mode) {
    Evaluator ev(a);
    return ev.successors(c, word, mode);
}

SearchOutcome accepts(const ReactionAutomaton& a, const Word& word, const BoundSpec& bound,
                      InputMode mode) {
    Evaluator ev(a);
    return ev.accepts(word, bound, mode);
}

std::optional<Trace> accepting_trace(const ReactionAutomaton& a, const Word& word,
                                     const BoundSpec& bound, InputMode mode) {
    Evaluator ev(a);
    return ev.accepting_trace(word, bound, mode);
}

std::optional<Count> workspace(const ReactionAutomaton& a, const Word& word,
                               const BoundSpec& bound, InputMode mode) {
    Evaluator ev(a);
    return ev.workspace(word, bound, mode);
}

std::vector<Configuration> reachable_configurations(const ReactionAutomaton& a, const Word& word,
                                                    const BoundSpec& bound, InputMode mode) {
    Evaluator ev(a);
    return ev.reachable(word, bound, mode);
}

bool verify_trace(const ReactionAutomaton& a, const Trace& trace, const BoundSpec& bound) {
    Evaluator ev(a);
    const std::size_t n = trace.word.size();
    Count budget;
    try {
        for (const auto& s : trace.word)
            if (!a.input_alphabet.contains(s)) return false;
        budget = bound.eval(n);
    } catch (const Error&) {
        return false;
    }
    if (!(trace.initial == a.initial)) return false;
    if (trace.initial.weight() > budget) return false;

    auto matches = [&](const Multiset& from, const std::optional<ReactionMultiset>& fired,
                       const Multiset& result, bool allow_identity) {
        const auto& alphas = ev.maximal(from);
        if (!fired) {
            // Identity step: only legal when nothing fires.
            return allow_identity && alphas.empty() && result == from;
        }
        if (std::ranges::find(alphas, *fired) == alphas.end()) return false;
        auto parts = reaction_multiset_parts(a, *fired);
        return result == from - parts.reactants + parts.products;
    };

    Multiset cur = trace.initial;
    std::size_t consumed = 0;
    for (const auto& step : trace.steps) {
        if (step.result.weight() > budget) return false;
        switch (step.kind) {
            case TraceStep::Kind::fed: {
                if (consumed >= n || !step.symbol || !(*step.symbol == trace.word[consumed]))
                    return false;
                Multiset seeded = cur;
                seeded.add(*step.symbol);
                if (seeded.weight() > budget) return false;
                if (!matches(seeded, step.fired, step.result, true)) return false;
                ++consumed;
                break;
            }
            case TraceStep::Kind::lambda:
                if (trace.mode != InputMode::lambda_input || consumed >= n) return false;
                if (!step.fired || !matches(cur, step.fired, step.result, false)) return false;
                break;
            case TraceStep::Kind::evolve:
                if (consumed != n) return false;
                if (!step.fired || !matches(cur, step.fired, step.result, false)) return false;
                break;
        }
        cur = step.result;
    }
    return consumed == n && ev.maximal(cur).empty() && cur.count(a.final_symbol) > 0;
}

std::string to_string(const ReactionMultiset& alpha) {
    if (alpha.empty()) return "-";
    std::ostringstream o;
    bool first = true;
    for (const auto& [label, count] : alpha) {
        if (count == 0) continue;
        if (!first) o << ' ';
        first = false;
        o << label;
        if (count > 1) o << '^' << count;
    }
    return first ? "-" : o.str();
}

std::string to_text(const Trace& t) {
    std::ostringstream o;
    o << "init\t-\t" << to_string(t.initial) << '\n';
    for (const auto& step : t.steps) {
        switch (step.kind) {
            case TraceStep::Kind::fed: o << step.symbol->name(); break;
            case TraceStep::Kind::lambda: o << "<eps>"; break;
            case TraceStep::Kind::evolve: o << '-'; break;
        }
        o << '\t' << (step.fired ? to_string(*step.fired) : "-") << '\t'
          << to_string(step.result) << '\n';
    }
    return o.str();
}

}  // namespace ra
