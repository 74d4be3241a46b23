#include "mim/solver.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mim/errors.hpp"
#include "mim/rng.hpp"

namespace mim {

namespace {

// Word-parallel helpers for flat vector<uint64_t> bitsets.
bool bs_any(const std::vector<std::uint64_t>& a) {
    for (std::uint64_t w : a) {
        if (w) return true;
    }
    return false;
}

int bs_first(const std::vector<std::uint64_t>& a) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i]) return static_cast<int>(i * 64) + std::countr_zero(a[i]);
    }
    return -1;
}

void bs_clear(std::vector<std::uint64_t>& a, int v) {
    a[static_cast<std::size_t>(v >> 6)] &= ~(1ULL << (v & 63));
}

bool bs_test(const std::vector<std::uint64_t>& a, int v) {
    return (a[static_cast<std::size_t>(v >> 6)] >> (v & 63)) & 1ULL;
}

// Two edges can coexist in an induced matching iff they are vertex-disjoint
// and no endpoint of one is adjacent to an endpoint of the other.
bool edges_compatible(const Graph& g, const Edge& e, const Edge& f) {
    const auto [a, b] = e;
    const auto [c, d] = f;
    if (a == c || a == d || b == c || b == d) return false;
    return !g.has_edge(a, c) && !g.has_edge(a, d) && !g.has_edge(b, c) && !g.has_edge(b, d);
}

// Marks v, then v's whole neighborhood, as unavailable.
void block_vertex_and_neighbors(const Graph& g, int v, std::vector<std::uint64_t>& avail) {
    bs_clear(avail, v);
    const std::uint64_t* r = g.row(v);
    for (std::size_t w = 0; w < avail.size(); ++w) avail[w] &= ~r[w];
}

struct BruteForceSearch {
    const Graph& g;
    std::vector<Edge> edges;
    std::vector<int> chosen;
    std::vector<int> best;
    std::uint64_t nodes = 0;

    void run(std::size_t from) {
        ++nodes;
        if (chosen.size() > best.size()) best = chosen;
        for (std::size_t i = from; i < edges.size(); ++i) {
            bool ok = true;
            for (int c : chosen) {
                if (!edges_compatible(g, edges[static_cast<std::size_t>(c)], edges[i])) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            chosen.push_back(static_cast<int>(i));
            run(i + 1);
            chosen.pop_back();
        }
    }
};

// Tomita-style maximum clique on the compatibility graph (bitwise complement
// of the conflict graph). Greedy coloring supplies the pruning bound: a
// clique can use at most one vertex per color class.
struct CliqueSearch {
    int t;
    std::size_t words;
    std::vector<std::uint64_t> adj;  // t rows, compatibility adjacency
    std::vector<int> best;
    std::vector<int> current;
    std::uint64_t nodes = 0;
    bool timed_out = false;
    std::chrono::steady_clock::time_point deadline;
    bool has_deadline = false;

    const std::uint64_t* row(int v) const {
        return adj.data() + static_cast<std::size_t>(v) * words;
    }

    // Colors P greedily; emits vertices in coloring order with their color
    // numbers (nondecreasing). Highest colors are branched first.
    void color_sort(const std::vector<std::uint64_t>& p, std::vector<int>& seq,
                    std::vector<int>& col) const {
        seq.clear();
        col.clear();
        std::vector<std::uint64_t> uncolored = p;
        std::vector<std::uint64_t> avail(words);
        int color = 0;
        while (bs_any(uncolored)) {
            ++color;
            avail = uncolored;
            while (bs_any(avail)) {
                const int v = bs_first(avail);
                seq.push_back(v);
                col.push_back(color);
                bs_clear(uncolored, v);
                bs_clear(avail, v);
                const std::uint64_t* r = row(v);
                for (std::size_t w = 0; w < words; ++w) avail[w] &= ~r[w];
            }
        }
    }

    void expand(std::vector<std::uint64_t>& p) {
        ++nodes;
        if (has_deadline && (nodes & 1023) == 0 &&
            std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
        }
        std::vector<int> seq;
        std::vector<int> col;
        color_sort(p, seq, col);
        for (int i = static_cast<int>(seq.size()) - 1; i >= 0; --i) {
            if (timed_out) return;
            const int v = seq[static_cast<std::size_t>(i)];
            if (static_cast<int>(current.size()) + col[static_cast<std::size_t>(i)] <=
                static_cast<int>(best.size())) {
                return;  // remaining colors cannot beat the incumbent
            }
            current.push_back(v);
            if (current.size() > best.size()) best = current;
            std::vector<std::uint64_t> next(words);
            const std::uint64_t* r = row(v);
            bool any = false;
            for (std::size_t w = 0; w < words; ++w) {
                next[w] = p[w] & r[w];
                any = any || next[w];
            }
            if (any) expand(next);
            current.pop_back();
            bs_clear(p, v);
        }
    }
};

}  // namespace

SolveResult mim_bruteforce(const Graph& g) {
    if (g.n() > 16) {
        throw refusal_error("mim_bruteforce: n=" + std::to_string(g.n()) +
                            " exceeds the n<=16 cap");
    }
    BruteForceSearch search{g, g.edges(), {}, {}, 0};
    search.run(0);
    SolveResult r;
    r.size = static_cast<int>(search.best.size());
    for (int i : search.best) r.witness.pairs.push_back(search.edges[static_cast<std::size_t>(i)]);
    r.witness.canonicalize();
    r.optimal = true;
    r.nodes_explored = search.nodes;
    return r;
}

SolveResult mim_exact(const Graph& g, std::chrono::milliseconds time_budget) {
    const std::vector<Edge> es = g.edges();
    const int t = static_cast<int>(es.size());
    const Graph conflicts = conflict_graph(g);

    // Relabel edge-vertices by conflict degree (fewest conflicts first), so
    // branching starts on the vertices most likely to appear in large
    // independent sets.
    std::vector<int> order(static_cast<std::size_t>(t));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return conflicts.degree(a) < conflicts.degree(b);
    });
    std::vector<int> pos(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

    CliqueSearch search;
    search.t = t;
    search.words = static_cast<std::size_t>((t + 63) / 64);
    search.adj.assign(static_cast<std::size_t>(t) * search.words, 0);
    for (int i = 0; i < t; ++i) {
        for (int j = 0; j < t; ++j) {
            if (i != j && !conflicts.has_edge(order[static_cast<std::size_t>(i)],
                                              order[static_cast<std::size_t>(j)])) {
                search.adj[static_cast<std::size_t>(i) * search.words +
                           static_cast<std::size_t>(j >> 6)] |= 1ULL << (j & 63);
            }
        }
    }
    if (time_budget.count() > 0) {
        search.has_deadline = true;
        search.deadline = std::chrono::steady_clock::now() + time_budget;
    }

    if (t > 0) {
        std::vector<std::uint64_t> p(search.words, 0);
        for (int i = 0; i < t; ++i) {
            p[static_cast<std::size_t>(i >> 6)] |= 1ULL << (i & 63);
        }
        search.expand(p);
    }

    SolveResult r;
    r.size = static_cast<int>(search.best.size());
    for (int i : search.best) {
        r.witness.pairs.push_back(es[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    }
    r.witness.canonicalize();
    r.optimal = !search.timed_out;
    r.nodes_explored = search.nodes;
    return r;
}

SolveResult mim_greedy(const Graph& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::size_t words = static_cast<std::size_t>((g.n() + 63) / 64);
    std::vector<std::uint64_t> avail(words, 0);
    for (int v = 0; v < g.n(); ++v) avail[static_cast<std::size_t>(v >> 6)] |= 1ULL << (v & 63);

    std::vector<Edge> candidates = g.edges();
    SolveResult r;
    while (true) {
        std::vector<Edge> live;
        live.reserve(candidates.size());
        for (const Edge& e : candidates) {
            if (bs_test(avail, e.first) && bs_test(avail, e.second)) live.push_back(e);
        }
        r.nodes_explored += candidates.size();
        if (live.empty()) break;
        const Edge e = live[rng.next_below(live.size())];
        r.witness.pairs.push_back(e);
        block_vertex_and_neighbors(g, e.first, avail);
        block_vertex_and_neighbors(g, e.second, avail);
        candidates = std::move(live);
    }
    r.witness.canonicalize();
    r.size = r.witness.size();
    r.optimal = false;
    return r;
}

namespace {

// Available = not matched, not adjacent to anything matched.
std::vector<std::uint64_t> availability(const Graph& g, const std::vector<Edge>& s) {
    const std::size_t words = static_cast<std::size_t>((g.n() + 63) / 64);
    std::vector<std::uint64_t> avail(words, 0);
    for (int v = 0; v < g.n(); ++v) avail[static_cast<std::size_t>(v >> 6)] |= 1ULL << (v & 63);
    for (const Edge& e : s) {
        block_vertex_and_neighbors(g, e.first, avail);
        block_vertex_and_neighbors(g, e.second, avail);
    }
    return avail;
}

// Adds every addable edge, visiting edges in a seed-shuffled order, until the
// matching is maximal. Returns the number of edges examined.
std::uint64_t greedy_fill(const Graph& g, std::vector<Edge>& s,
                          std::vector<std::uint64_t>& avail, SplitMix64& rng) {
    std::vector<Edge> es = g.edges();
    for (std::size_t i = es.size(); i > 1; --i) {
        std::swap(es[i - 1], es[rng.next_below(i)]);
    }
    std::uint64_t seen = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Edge& e : es) {
            ++seen;
            if (bs_test(avail, e.first) && bs_test(avail, e.second)) {
                s.push_back(e);
                block_vertex_and_neighbors(g, e.first, avail);
                block_vertex_and_neighbors(g, e.second, avail);
                changed = true;
            }
        }
    }
    return seen;
}

}  // namespace

SolveResult mim_local_search(const Graph& g, const SolveResult& start, int rounds,
                             std::uint64_t seed) {
    if (!is_induced_matching(g, start.witness)) {
        throw std::invalid_argument("mim_local_search: start witness is not an induced matching");
    }
    SplitMix64 rng(seed);
    std::vector<Edge> s = start.witness.pairs;
    std::vector<std::uint64_t> avail = availability(g, s);
    std::uint64_t work = greedy_fill(g, s, avail, rng);

    for (int round = 0; round < rounds && !s.empty(); ++round) {
        ++work;
        const std::size_t xi = rng.next_below(s.size());
        const Edge x = s[xi];
        std::vector<Edge> reduced = s;
        reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(xi));
        std::vector<std::uint64_t> ravail = availability(g, reduced);

        // Addable edges must touch the region freed by dropping x: the
        // matching was maximal, so anything addable elsewhere would have
        // been added already.
        std::vector<int> freed = {x.first, x.second};
        for (int v = 0; v < g.n(); ++v) {
            if (g.has_edge(x.first, v) || g.has_edge(x.second, v)) freed.push_back(v);
        }
        std::vector<Edge> addable;
        for (int u : freed) {
            if (!bs_test(ravail, u)) continue;
            for (int v = 0; v < g.n(); ++v) {
                if (v != u && g.has_edge(u, v) && bs_test(ravail, v)) {
                    addable.emplace_back(std::min(u, v), std::max(u, v));
                }
            }
        }
        std::sort(addable.begin(), addable.end());
        addable.erase(std::unique(addable.begin(), addable.end()), addable.end());

        bool improved = false;
        for (std::size_t i = 0; i < addable.size() && !improved; ++i) {
            for (std::size_t j = i + 1; j < addable.size() && !improved; ++j) {
                if (edges_compatible(g, addable[i], addable[j])) {
                    reduced.push_back(addable[i]);
                    reduced.push_back(addable[j]);
                    s = std::move(reduced);
                    avail = availability(g, s);
                    work += greedy_fill(g, s, avail, rng);
                    improved = true;
                }
            }
        }
    }

    SolveResult r;
    r.witness.pairs = std::move(s);
    r.witness.canonicalize();
    r.size = r.witness.size();
    r.optimal = false;
    r.nodes_explored = work;
    return r;
}

}  // namespace mim
