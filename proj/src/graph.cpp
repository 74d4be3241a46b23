#include "mim/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include "mim/rng.hpp"

namespace mim {

Graph::Graph(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
    if (n > (1 << 16)) throw std::invalid_argument("Graph: n exceeds 2^16");
    words_ = static_cast<std::size_t>((n + 63) / 64);
    rows_.assign(static_cast<std::size_t>(n) * words_, 0);
}

void Graph::check_vertex(int v) const {
    if (v < 0 || v >= n_) {
        throw std::invalid_argument("Graph: vertex " + std::to_string(v) +
                                    " out of range [0," + std::to_string(n_) + ")");
    }
}

void Graph::add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw std::invalid_argument("Graph: self-loop at " + std::to_string(u));
    if (has_edge(u, v)) {
        throw std::invalid_argument("Graph: duplicate edge " + std::to_string(u) + " " +
                                    std::to_string(v));
    }
    rows_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v >> 6)] |=
        1ULL << (v & 63);
    rows_[static_cast<std::size_t>(v) * words_ + static_cast<std::size_t>(u >> 6)] |=
        1ULL << (u & 63);
    ++m_;
}

void Graph::remove_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v || !has_edge(u, v)) return;
    rows_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v >> 6)] &=
        ~(1ULL << (v & 63));
    rows_[static_cast<std::size_t>(v) * words_ + static_cast<std::size_t>(u >> 6)] &=
        ~(1ULL << (u & 63));
    --m_;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (int u = 0; u < n_; ++u) {
        for (int v = u + 1; v < n_; ++v) {
            if (has_edge(u, v)) out.emplace_back(u, v);
        }
    }
    return out;
}

int Graph::degree(int v) const {
    check_vertex(v);
    int d = 0;
    const std::uint64_t* r = row(v);
    for (std::size_t w = 0; w < words_; ++w) d += std::popcount(r[w]);
    return d;
}

void Matching::canonicalize() {
    for (auto& [u, v] : pairs) {
        if (u > v) std::swap(u, v);
    }
    std::sort(pairs.begin(), pairs.end());
}

std::vector<int> Matching::vertices() const {
    std::vector<int> vs;
    vs.reserve(pairs.size() * 2);
    for (const auto& [u, v] : pairs) {
        vs.push_back(u);
        vs.push_back(v);
    }
    return vs;
}

Graph sample_gnp(int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample_gnp: p outside [0,1]");
    Graph g(n);
    SplitMix64 rng(seed);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.bernoulli(p)) g.add_edge(u, v);
        }
    }
    return g;
}

Graph sample_gnp_product(int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample_gnp_product: p outside [0,1]");
    Graph g(n);
    SplitMix64 rng(seed);
    // Vertex i exposes its adjacency to {0..i-1}: first the count d by i
    // Bernoulli trials, then a uniform d-subset by partial Fisher-Yates.
    std::vector<int> lower;
    for (int i = 1; i < n; ++i) {
        int d = 0;
        for (int t = 0; t < i; ++t) {
            if (rng.bernoulli(p)) ++d;
        }
        lower.resize(static_cast<std::size_t>(i));
        for (int t = 0; t < i; ++t) lower[static_cast<std::size_t>(t)] = t;
        for (int t = 0; t < d; ++t) {
            const auto j = t + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i - t)));
            std::swap(lower[static_cast<std::size_t>(t)], lower[static_cast<std::size_t>(j)]);
            g.add_edge(lower[static_cast<std::size_t>(t)], i);
        }
    }
    return g;
}

bool is_induced_matching(const Graph& g, const Matching& m) {
    std::vector<int> vs;
    for (const auto& [u, v] : m.pairs) {
        if (u < 0 || u >= g.n() || v < 0 || v >= g.n()) {
            throw std::invalid_argument("is_induced_matching: vertex out of range");
        }
        if (u == v || !g.has_edge(u, v)) return false;
        vs.push_back(u);
        vs.push_back(v);
    }
    // Pairwise disjointness.
    std::vector<int> sorted = vs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    // No edge inside V(m) other than the matched pairs themselves. Matched
    // pairs occupy positions (2i, 2i+1) of vs.
    for (std::size_t a = 0; a < vs.size(); ++a) {
        for (std::size_t b = a + 1; b < vs.size(); ++b) {
            if ((a / 2) == (b / 2)) continue;
            if (g.has_edge(vs[a], vs[b])) return false;
        }
    }
    return true;
}

Graph conflict_graph(const Graph& g) {
    const std::vector<Edge> es = g.edges();
    const int t = static_cast<int>(es.size());
    Graph h(t);
    for (int i = 0; i < t; ++i) {
        const auto [a, b] = es[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < t; ++j) {
            const auto [c, d] = es[static_cast<std::size_t>(j)];
            const bool share = (a == c || a == d || b == c || b == d);
            const bool touch = g.has_edge(a, c) || g.has_edge(a, d) ||
                               g.has_edge(b, c) || g.has_edge(b, d);
            if (share || touch) h.add_edge(i, j);
        }
    }
    return h;
}

namespace {

// Pulls the next content line (skips '#' comments and blank lines);
// returns false at end of input.
bool next_content_line(std::istringstream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        bool blank = true;
        for (char ch : line) {
            if (ch != ' ' && ch != '\t' && ch != '\r') {
                blank = false;
                break;
            }
        }
        if (!blank) return true;
    }
    return false;
}

void parse_two_ints(const std::string& line, const char* what, long long& a, long long& b) {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> a >> b)) {
        throw std::invalid_argument(std::string("read_graph: malformed ") + what + " line: \"" +
                                    line + "\"");
    }
    if (ls >> extra) {
        throw std::invalid_argument(std::string("read_graph: trailing tokens on ") + what +
                                    " line: \"" + line + "\"");
    }
}

}  // namespace

Graph read_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!next_content_line(in, line)) {
        throw std::invalid_argument("read_graph: missing header line");
    }
    long long n = 0;
    long long m = 0;
    parse_two_ints(line, "header", n, m);
    if (n < 0 || n > (1 << 16) || m < 0) {
        throw std::invalid_argument("read_graph: header out of range");
    }
    Graph g(static_cast<int>(n));
    for (long long i = 0; i < m; ++i) {
        if (!next_content_line(in, line)) {
            throw std::invalid_argument("read_graph: expected " + std::to_string(m) +
                                        " edges, found " + std::to_string(i));
        }
        long long u = 0;
        long long v = 0;
        parse_two_ints(line, "edge", u, v);
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw std::invalid_argument("read_graph: vertex out of range on edge line \"" + line +
                                        "\"");
        }
        if (u == v) {
            throw std::invalid_argument("read_graph: self-loop on edge line \"" + line + "\"");
        }
        if (u > v) {
            throw std::invalid_argument("read_graph: endpoints must satisfy u < v on line \"" +
                                        line + "\"");
        }
        g.add_edge(static_cast<int>(u), static_cast<int>(v));  // rejects duplicates
    }
    if (next_content_line(in, line)) {
        throw std::invalid_argument("read_graph: unexpected content after edge list: \"" + line +
                                    "\"");
    }
    return g;
}

std::string write_graph(const Graph& g) {
    std::ostringstream out;
    out << g.n() << ' ' << g.m() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

}  // namespace mim
