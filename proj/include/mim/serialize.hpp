#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mim/bounds.hpp"
#include "mim/experiments.hpp"
#include "mim/graph.hpp"
#include "mim/moments.hpp"
#include "mim/solver.hpp"

namespace mim {

// Every numeric value in emitted JSON is a decimal string: doubles with 17
// significant digits (round-trip exact), integers verbatim. This sidesteps
// both double-to-JSON-number rounding and uint64 seeds overflowing the
// interoperable integer range. Booleans stay booleans.
std::string number17(double v);

// Resolved configuration echoed into every document, in insertion order as
// (key, already-formatted value) pairs. Execution knobs that must not alter
// report bytes (worker count, output path) do not belong here.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

std::string graph_to_json(const Graph& g, const ConfigEcho& echo);
std::string solve_to_json(const SolveResult& result, const ConfigEcho& echo);
std::string moment_table_to_json(const MomentTable& table, const ConfigEcho& echo);
std::string check_report_to_json(const CheckReport& report, const ConfigEcho& echo);
std::string experiment_report_to_json(const ExperimentReport& report, const ConfigEcho& echo);

// One-off documents (the ratio subcommand and friends): named string fields,
// values preformatted with number17 where numeric.
std::string scalar_report_to_json(const std::string& kind,
                                  const std::vector<std::pair<std::string, std::string>>& fields,
                                  const ConfigEcho& echo);

}  // namespace mim
