#pragma once

#include <chrono>
#include <cstdint>

#include "mim/graph.hpp"

namespace mim {

// Outcome of one solve. witness always passes is_induced_matching and has
// exactly `size` pairs; optimal=true additionally certifies that no induced
// matching of size+1 exists.
struct SolveResult {
    int size = 0;
    Matching witness;
    bool optimal = false;
    std::uint64_t nodes_explored = 0;
};

// Exhaustive backtracking over canonical edge lists. Oracle for the other
// solvers; refuses n > 16.
SolveResult mim_bruteforce(const Graph& g);

// Branch-and-bound maximum independent set on conflict_graph(g), run as a
// maximum clique search on the complement with a greedy-coloring upper bound
// and vertex-degree branching. A zero (default) budget means no limit; when
// the budget expires the best matching found so far is returned with
// optimal=false. Timeouts are not errors.
SolveResult mim_exact(const Graph& g,
                      std::chrono::milliseconds time_budget = std::chrono::milliseconds{0});

// Random maximal construction: repeatedly picks a uniformly random edge among
// those whose endpoints are still available, then deletes both endpoints and
// all their neighbors from the candidate set. optimal=false, witness valid.
SolveResult mim_greedy(const Graph& g, std::uint64_t seed);

// Hill climbing with (1-out, 2-in) exchanges on the conflict-graph
// independent set, re-densified greedily after each exchange. Result size
// never drops below the start size. start.witness must be valid for g.
SolveResult mim_local_search(const Graph& g, const SolveResult& start, int rounds,
                             std::uint64_t seed);

}  // namespace mim
