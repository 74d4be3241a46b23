#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mim {

// Undirected edge with endpoints stored as (min, max).
using Edge = std::pair<int, int>;

// Simple undirected graph on 0-indexed vertices, adjacency kept as packed
// 64-bit rows so pair queries are O(1) and row intersections vectorize.
// Supports n up to 2^16; construction rejects anything larger.
class Graph {
public:
    explicit Graph(int n);

    int n() const { return n_; }
    int m() const { return m_; }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        if (u == v) return false;
        return (rows_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v >> 6)] >>
                (v & 63)) & 1ULL;
    }

    // Inserts {u,v}. Rejects self-loops, out-of-range endpoints and
    // duplicates; the text reader relies on these checks.
    void add_edge(int u, int v);

    // Removes {u,v} if present (used to splice resampled neighborhoods).
    void remove_edge(int u, int v);

    // Canonical edge list: pairs (u,v) with u < v, lexicographically sorted.
    std::vector<Edge> edges() const;

    int degree(int v) const;

    // Raw row access for the solvers.
    const std::uint64_t* row(int v) const {
        return rows_.data() + static_cast<std::size_t>(v) * words_;
    }
    std::size_t words() const { return words_; }

    bool operator==(const Graph& other) const {
        return n_ == other.n_ && rows_ == other.rows_;
    }

private:
    void check_vertex(int v) const;

    int n_;
    int m_ = 0;
    std::size_t words_;
    std::vector<std::uint64_t> rows_;
};

// Set of vertex-disjoint pairs in canonical form: each pair sorted, pairs
// sorted lexicographically. canonicalize() enforces the form; vertices()
// flattens the pair list.
struct Matching {
    std::vector<Edge> pairs;

    void canonicalize();
    std::vector<int> vertices() const;
    int size() const { return static_cast<int>(pairs.size()); }

    bool operator==(const Matching& other) const { return pairs == other.pairs; }
};

// G(n,p): every unordered pair an edge independently with probability p,
// pairs visited in lexicographic order, one Bernoulli draw per pair.
// The seed fully determines the graph.
Graph sample_gnp(int n, double p, std::uint64_t seed);

// Product-space sampler: vertex i (1-based view) draws d ~ Bi(i, p) by i
// Bernoulli trials, then a uniformly random d-subset of the lower-indexed
// vertices becomes its back-neighborhood. Distribution identical to
// sample_gnp; kept as an independently coded reference.
Graph sample_gnp_product(int n, double p, std::uint64_t seed);

// True iff (a) the pairs are pairwise vertex-disjoint edges of g and (b) no
// other pair of matched vertices is an edge. True for the empty matching.
bool is_induced_matching(const Graph& g, const Matching& m);

// Graph on the edges of g (canonical lexicographic indexing); two
// edge-vertices are adjacent iff the edges share an endpoint or some
// endpoint of one is g-adjacent to some endpoint of the other. Independent
// sets of size t correspond bijectively to induced matchings of size t.
Graph conflict_graph(const Graph& g);

// Text format: header "n m", then m lines "u v" with 0 <= u < v < n.
// '#' at the start of a line marks a comment; blank lines are ignored.
// read_graph rejects malformed headers, out-of-range or reversed endpoints,
// self-loops, duplicates, and wrong edge counts. write_graph emits the
// canonical form with a trailing newline; write o read is the identity on
// canonical text.
Graph read_graph(const std::string& text);
std::string write_graph(const Graph& g);

}  // namespace mim
