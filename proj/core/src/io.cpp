#include "crsched/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crsched/errors.hpp"

namespace crsched {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(errc::parse, what + ": not valid JSON");
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int require_int(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_number_integer())
    fail(errc::parse, what + ": missing integer field \"" + key + "\"");
  return j[key].get<int>();
}

Rational rational_field(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) fail(errc::parse, what + ": missing field \"" + key + "\"");
  const json& v = j[key];
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  fail(errc::parse, what + ": field \"" + key + "\" must be an integer or a \"p/q\" string");
}

json tasks_of_mask(ReleaseMask m, int num_tasks) {
  json arr = json::array();
  for (int i = 0; i < num_tasks; ++i)
    if (m & (1u << i)) arr.push_back(i + 1);
  return arr;
}

ReleaseMask mask_of_tasks(const json& arr, int num_tasks, const std::string& what) {
  if (!arr.is_array()) fail(errc::parse, what + ": \"releases\" must be a task list");
  ReleaseMask m = 0;
  for (const json& t : arr) {
    if (!t.is_number_integer()) fail(errc::parse, what + ": release entries must be task indices");
    const int i = t.get<int>();
    if (i < 1 || i > num_tasks)
      fail(errc::parse, what + ": task index " + std::to_string(i) + " out of range");
    m |= 1u << (i - 1);
  }
  return m;
}

json label_json(std::int32_t output, int d_max) {
  if (output == kNoOutput) return nullptr;
  if (output == kIdleOutput) return "idle";
  const ScheduleLabel l = decode_label(output, d_max);
  return json{{"task", l.task + 1}, {"age", l.age}};
}

json edge_desc_json(const EdgeDesc& d, int d_max) {
  json e;
  e["from"] = d.from;
  e["to"] = d.to;
  e["releases"] = tasks_of_mask(d.releases, 32);
  e["run"] = label_json(d.output, d_max);
  e["wa"] = d.wa;
  e["wc"] = d.wc;
  return e;
}

}  // namespace

Taskset taskset_from_json_text(const std::string& text) {
  const json j = parse_json(text, "taskset");
  if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_array())
    fail(errc::parse, "taskset: expected an object with a \"tasks\" array");
  std::vector<Task> tasks;
  for (const json& t : j["tasks"]) {
    Task task;
    task.wcet = require_int(t, "c", "taskset");
    task.deadline = require_int(t, "d", "taskset");
    task.value = require_int(t, "v", "taskset");
    tasks.push_back(task);
  }
  return Taskset(tasks);
}

Taskset load_taskset(const std::string& path) {
  return taskset_from_json_text(slurp(path));
}

std::string taskset_to_json_text(const Taskset& ts, const std::string& name) {
  json j;
  if (!name.empty()) j["name"] = name;
  json arr = json::array();
  for (int i = 0; i < ts.size(); ++i)
    arr.push_back(json{{"c", ts[i].wcet}, {"d", ts[i].deadline}, {"v", ts[i].value}});
  j["tasks"] = std::move(arr);
  return j.dump(2) + "\n";
}

ConstraintSpec constraints_from_json_text(const std::string& text) {
  const json j = parse_json(text, "constraints");
  if (!j.is_object()) fail(errc::parse, "constraints: expected an object");
  ConstraintSpec spec;
  if (j.contains("safety")) {
    if (!j["safety"].is_array()) fail(errc::parse, "constraints: \"safety\" must be an array");
    for (const json& s : j["safety"]) {
      ConstraintSpec::Safety c;
      if (!s.contains("type") || !s["type"].is_string())
        fail(errc::parse, "constraints: safety entry without a \"type\"");
      c.type = s["type"].get<std::string>();
      if (c.type == "workload_window") {
        c.window = require_int(s, "window", "constraints");
        c.cap = require_int(s, "cap", "constraints");
      } else if (c.type == "sporadic" || c.type == "periodic") {
        c.task = require_int(s, "task", "constraints");
        c.period = require_int(s, "period", "constraints");
      } else {
        fail(errc::parse, "constraints: unknown safety type \"" + c.type + "\"");
      }
      spec.safety.push_back(std::move(c));
    }
  }
  if (j.contains("liveness")) {
    if (!j["liveness"].is_array()) fail(errc::parse, "constraints: \"liveness\" must be an array");
    for (const json& s : j["liveness"]) {
      ConstraintSpec::Liveness c;
      if (!s.contains("type") || !s["type"].is_string())
        fail(errc::parse, "constraints: liveness entry without a \"type\"");
      c.type = s["type"].get<std::string>();
      if (c.type != "inf_often")
        fail(errc::parse, "constraints: unknown liveness type \"" + c.type + "\"");
      c.task = require_int(s, "task", "constraints");
      spec.liveness.push_back(std::move(c));
    }
  }
  if (j.contains("limit_average")) {
    if (!j["limit_average"].is_array())
      fail(errc::parse, "constraints: \"limit_average\" must be an array");
    for (const json& s : j["limit_average"]) {
      ConstraintSpec::LimitAvg c;
      if (!s.contains("type") || !s["type"].is_string())
        fail(errc::parse, "constraints: limit-average entry without a \"type\"");
      c.type = s["type"].get<std::string>();
      if (c.type != "mean_workload")
        fail(errc::parse, "constraints: unknown limit-average type \"" + c.type + "\"");
      c.lambda = rational_field(s, "lambda", "constraints");
      spec.limitavg.push_back(std::move(c));
    }
  }
  return spec;
}

ConstraintSpec load_constraints(const std::string& path) {
  return constraints_from_json_text(slurp(path));
}

Lts lts_from_json_text(const std::string& text, int d_max) {
  const json j = parse_json(text, "transducer");
  if (!j.is_object()) fail(errc::parse, "transducer: expected an object");
  Lts lts;
  lts.num_tasks = require_int(j, "num_tasks", "transducer");
  if (lts.num_tasks < 1 || lts.num_tasks > kMaxTasks)
    fail(errc::parse, "transducer: unsupported task count");
  lts.initial = require_int(j, "initial", "transducer");
  if (!j.contains("transitions") || !j["transitions"].is_array())
    fail(errc::parse, "transducer: missing \"transitions\" array");
  int max_state = lts.initial;
  for (const json& t : j["transitions"]) {
    LtsTransition tr;
    tr.from = require_int(t, "from", "transducer");
    tr.to = require_int(t, "to", "transducer");
    if (tr.from < 0 || tr.to < 0) fail(errc::parse, "transducer: negative state id");
    max_state = std::max({max_state, tr.from, tr.to});
    if (!t.contains("releases"))
      fail(errc::parse, "transducer: transition without \"releases\"");
    tr.input = mask_of_tasks(t["releases"], lts.num_tasks, "transducer");
    if (t.contains("run") && !t["run"].is_null()) {
      const json& r = t["run"];
      ScheduleLabel l;
      l.task = require_int(r, "task", "transducer") - 1;
      l.age = require_int(r, "age", "transducer");
      if (l.task < 0 || l.task >= lts.num_tasks)
        fail(errc::parse, "transducer: \"run\" task out of range");
      if (l.age < 0 || l.age >= d_max) fail(errc::parse, "transducer: \"run\" age out of range");
      tr.output = encode_label(l, d_max);
    } else if (t.contains("idle") && t["idle"].is_boolean() && t["idle"].get<bool>()) {
      tr.output = kIdleOutput;
    }
    if (t.contains("reward")) {
      if (!t["reward"].is_number_integer()) fail(errc::parse, "transducer: \"reward\" must be an integer");
      tr.reward = t["reward"].get<std::int64_t>();
    }
    if (t.contains("weights")) {
      if (!t["weights"].is_array()) fail(errc::parse, "transducer: \"weights\" must be an array");
      for (const json& w : t["weights"]) {
        if (!w.is_number_integer()) fail(errc::parse, "transducer: weights must be integers");
        tr.weights.push_back(w.get<std::int64_t>());
      }
    }
    lts.transitions.push_back(std::move(tr));
  }
  lts.num_states = max_state + 1;
  if (j.contains("num_states")) {
    const int declared = require_int(j, "num_states", "transducer");
    if (declared < lts.num_states)
      fail(errc::parse, "transducer: \"num_states\" smaller than the states referenced");
    lts.num_states = declared;
  }
  if (j.contains("state_names")) {
    if (!j["state_names"].is_array())
      fail(errc::parse, "transducer: \"state_names\" must be an array");
    for (const json& s : j["state_names"]) {
      if (!s.is_string()) fail(errc::parse, "transducer: state names must be strings");
      lts.state_names.push_back(s.get<std::string>());
    }
    if (!lts.state_names.empty() && static_cast<int>(lts.state_names.size()) != lts.num_states)
      fail(errc::parse, "transducer: state-name count does not match the state count");
  }
  if (lts.initial >= lts.num_states) fail(errc::parse, "transducer: initial state out of range");
  lts.finalize();
  return lts;
}

Lts load_lts(const std::string& path, int d_max) {
  return lts_from_json_text(slurp(path), d_max);
}

std::string lts_to_json_text(const Lts& lts, int d_max) {
  json j;
  j["num_tasks"] = lts.num_tasks;
  j["num_states"] = lts.num_states;
  j["initial"] = lts.initial;
  if (!lts.state_names.empty()) j["state_names"] = lts.state_names;
  json arr = json::array();
  for (const LtsTransition& t : lts.transitions) {
    json e;
    e["from"] = t.from;
    e["releases"] = tasks_of_mask(t.input, lts.num_tasks);
    e["to"] = t.to;
    if (t.output == kIdleOutput)
      e["idle"] = true;
    else if (t.output != kNoOutput) {
      const ScheduleLabel l = decode_label(t.output, d_max);
      e["run"] = json{{"task", l.task + 1}, {"age", l.age}};
    }
    if (t.reward != 0) e["reward"] = t.reward;
    if (!t.weights.empty()) e["weights"] = t.weights;
    arr.push_back(std::move(e));
  }
  j["transitions"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string report_to_json_text(const CrReport& rep, bool include_timings) {
  json j;
  if (rep.dry_run) {
    j["dry_run"] = true;
  } else if (rep.exact) {
    j["cr"] = to_string(rep.cr);
  } else {
    j["cr"] = json{{"lo", to_string(rep.lo)}, {"hi", to_string(rep.hi)}};
  }
  if (!rep.dry_run) j["exact"] = rep.exact;
  if (!rep.warnings.empty()) j["warnings"] = rep.warnings;
  if (rep.has_witness) {
    json w;
    json cyc = json::array();
    for (const EdgeDesc& d : rep.witness_cycle_desc)
      cyc.push_back(edge_desc_json(d, rep.d_max));
    w["cycle"] = std::move(cyc);
    json rel = json::array();
    for (ReleaseMask m : rep.witness_cycle_releases) rel.push_back(tasks_of_mask(m, 32));
    w["releases"] = std::move(rel);
    json prel = json::array();
    for (ReleaseMask m : rep.witness_path_releases) prel.push_back(tasks_of_mask(m, 32));
    w["path_releases"] = std::move(prel);
    w["ratio"] = to_string(rep.witness.ratio);
    if (rep.witness.multi) {
      json mc;
      json cycles = json::array();
      for (const auto& ds : rep.witness_multicycle_desc) {
        json one = json::array();
        for (const EdgeDesc& d : ds) one.push_back(edge_desc_json(d, rep.d_max));
        cycles.push_back(std::move(one));
      }
      mc["cycles"] = std::move(cycles);
      mc["multiplicities"] = rep.witness_multiplicities;
      w["multicycle"] = std::move(mc);
    }
    j["witness"] = std::move(w);
  }
  json stats;
  stats["online_states"] = rep.online_states;
  stats["clairvoyant_states"] = rep.clair_states;
  stats["safety_states"] = rep.safety_states;
  stats["liveness_states"] = rep.liveness_states;
  stats["product_nodes"] = rep.product_nodes;
  stats["product_edges"] = rep.product_edges;
  stats["probes"] = rep.probes;
  if (include_timings) stats["wall_seconds"] = rep.wall_seconds;
  j["stats"] = std::move(stats);
  return j.dump(2) + "\n";
}

std::string report_to_table_text(const CrReport& rep) {
  std::ostringstream out;
  if (rep.dry_run) {
    out << "dry run (no solve)\n";
  } else if (rep.exact) {
    out << "competitive ratio: " << to_string(rep.cr) << " (exact)\n";
  } else {
    out << "competitive ratio: [" << to_string(rep.lo) << ", " << to_string(rep.hi)
        << "] (width <= epsilon)\n";
  }
  out << "states: online " << rep.online_states << ", clairvoyant " << rep.clair_states
      << ", safety " << rep.safety_states << ", liveness " << rep.liveness_states << "\n";
  out << "product: " << rep.product_nodes << " nodes, " << rep.product_edges << " edges";
  if (!rep.dry_run) out << ", " << rep.probes << " probes";
  out << "\n";
  for (const std::string& w : rep.warnings) out << "warning: " << w << "\n";
  if (rep.has_witness) {
    out << "witness cycle (" << rep.witness_cycle_releases.size() << " slots): releases";
    for (ReleaseMask m : rep.witness_cycle_releases) {
      out << " {";
      bool first = true;
      for (int i = 0; i < 32; ++i)
        if (m & (1u << i)) {
          if (!first) out << ",";
          out << (i + 1);
          first = false;
        }
      out << "}";
    }
    out << "\n";
    out << "witness ratio: " << to_string(rep.witness.ratio) << "\n";
  }
  return out.str();
}

std::string product_to_json_text(const ProductGraph& pg) {
  json j;
  j["num_tasks"] = pg.num_tasks;
  j["start"] = pg.start;
  j["dimensions"] = pg.dims();
  json nodes = json::array();
  for (int v = 0; v < pg.g.n; ++v) {
    json n;
    n["id"] = v;
    n["tuple"] = pg.tuple[v];
    n["x"] = static_cast<bool>(pg.x[v]);
    n["y"] = static_cast<bool>(pg.y[v]);
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (int e = 0; e < pg.g.m(); ++e) {
    json d;
    d["from"] = pg.g.efrom[e];
    d["to"] = pg.g.eto[e];
    d["releases"] = tasks_of_mask(pg.input[e], pg.num_tasks);
    // Labels decode only when the producing taskset's d_max is known.
    d["run"] = pg.d_max > 0 ? label_json(pg.output[e], pg.d_max) : json(pg.output[e]);
    json wa = json::array(), wc = json::array();
    for (int k = 0; k < pg.dims(); ++k) {
      wa.push_back(pg.wa[k][e]);
      wc.push_back(pg.wc[k][e]);
    }
    d["wa"] = std::move(wa);
    d["wc"] = std::move(wc);
    edges.push_back(std::move(d));
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

}  // namespace crsched
