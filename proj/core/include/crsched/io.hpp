#pragma once

#include <string>

#include "crsched/analysis.hpp"
#include "crsched/constraints.hpp"
#include "crsched/lts.hpp"
#include "crsched/task.hpp"

namespace crsched {

// JSON readers/writers for every file the tools exchange. All functions
// throw errc::parse with a located message on malformed input; the text
// variants exist so tests can exercise parsing without touching the
// filesystem. Produced JSON is deterministic (sorted keys, fixed layout),
// so identical inputs give byte-identical reports.

// Taskset files: {"tasks": [{"c": 1, "d": 2, "v": 3}, ...]} with an
// optional "name".
Taskset load_taskset(const std::string& path);
Taskset taskset_from_json_text(const std::string& text);
std::string taskset_to_json_text(const Taskset& ts, const std::string& name = "");

// Constraint files: {"safety": [{"type": "workload_window", "window": w,
// "cap": c} | {"type": "sporadic"|"periodic", "task": i, "period": p}],
// "liveness": [{"type": "inf_often", "task": i}], "limit_average":
// [{"type": "mean_workload", "lambda": "p/q"}]}. Task indices are 1-based.
// Every section is optional.
ConstraintSpec load_constraints(const std::string& path);
ConstraintSpec constraints_from_json_text(const std::string& text);

// Scheduler transducer files: {"num_tasks": n, "initial": s, "num_states":
// k (optional), "state_names": [...] (optional), "transitions": [{"from":
// s, "releases": [1-based task indices], "to": s', "run": {"task": i,
// "age": a} | "idle": true (optional; omit both for pure automata),
// "reward": r (optional), "weights": [...] (optional)}]}. `d_max` fixes the
// label encoding and must come from the taskset the transducer is for.
Lts load_lts(const std::string& path, int d_max);
Lts lts_from_json_text(const std::string& text, int d_max);
std::string lts_to_json_text(const Lts& lts, int d_max);

// Analysis reports; see the CLI documentation for the layout. Timings are
// left out unless requested so reports stay byte-stable across runs.
std::string report_to_json_text(const CrReport& rep, bool include_timings = false);
std::string report_to_table_text(const CrReport& rep);

// Product dump for --dump-graph: nodes with component tuples and X/Y
// marks, edges with weights and labels.
std::string product_to_json_text(const ProductGraph& pg);

}  // namespace crsched
