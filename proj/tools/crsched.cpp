// crsched - command line front end for competitive-ratio analysis.
//
// Two subcommands:
//   analyze  one taskset x one scheduler -> report (JSON or plain table)
//   batch    tasksets x schedulers matrix on a worker pool, with presets
//
// Exit codes: 0 success, 2 parse error (files or flags), 3 state cap
// exceeded, 4 unsupported feature. Everything else that goes wrong is a 1.
// Errors are printed to stderr as one JSON object so callers can parse them.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crsched/analysis.hpp"
#include "crsched/errors.hpp"
#include "crsched/io.hpp"
#include "crsched/policy.hpp"
#include "crsched/rational.hpp"
#include "crsched/task.hpp"

namespace {

using crsched::errc;
using nlohmann::json;

int exit_code_for(errc kind) {
  switch (kind) {
    case errc::parse:
      return 2;
    case errc::state_explosion:
      return 3;
    case errc::unsupported:
      return 4;
    default:
      return 1;
  }
}

const char* error_code_name(errc kind) {
  switch (kind) {
    case errc::parse:
      return "parse";
    case errc::state_explosion:
      return "state_explosion";
    case errc::unsupported:
      return "unsupported";
    default:
      return "error";
  }
}

[[noreturn]] void die(const crsched::error& e) {
  json j;
  j["error"] = json{{"code", error_code_name(e.kind())}, {"message", e.what()}};
  std::cerr << j.dump(2) << "\n";
  std::exit(exit_code_for(e.kind()));
}

// Options shared by both subcommands.
struct CommonOpts {
  std::string constraints_path;
  std::string epsilon = "1/1000";
  std::int64_t state_cap = 1'000'000;
  std::string format = "json";
  int jobs = 0;  // 0 = one per hardware thread
};

void add_common(CLI::App* cmd, CommonOpts* c) {
  cmd->add_option("--constraints", c->constraints_path,
                  "constraint file (safety/liveness/limit-average JSON)");
  cmd->add_option("--epsilon", c->epsilon,
                  "target interval width under limit-average constraints, as a "
                  "positive rational p/q");
  cmd->add_option("--state-cap", c->state_cap, "abort past this many product states")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", c->format, "report format")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--jobs", c->jobs, "worker threads for batch cells (0 = auto)")
      ->check(CLI::NonNegativeNumber);
}

crsched::AnalysisOptions make_options(const CommonOpts& c) {
  crsched::AnalysisOptions opt;
  opt.epsilon = crsched::parse_rational(c.epsilon);
  if (opt.epsilon <= 0) crsched::fail(errc::parse, "--epsilon must be positive");
  opt.state_cap = c.state_cap;
  if (!c.constraints_path.empty()) opt.constraints = crsched::load_constraints(c.constraints_path);
  return opt;
}

std::string file_stem(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

// ---------------------------------------------------------------- analyze --

int run_analyze(const CommonOpts& common, const std::string& taskset_path,
                const std::string& scheduler, const std::string& scheduler_lts_path,
                bool dry_run, const std::string& dump_graph_path) {
  const crsched::Taskset ts = crsched::load_taskset(taskset_path);

  crsched::AnalysisOptions opt = make_options(common);
  opt.dry_run = dry_run;
  crsched::Lts custom;
  if (!scheduler_lts_path.empty()) {
    std::ifstream in(scheduler_lts_path, std::ios::binary);
    if (!in) crsched::fail(errc::parse, "cannot read " + scheduler_lts_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    custom = crsched::lts_from_json_text(ss.str(), ts.d_max());
    opt.scheduler_lts = &custom;
  } else {
    opt.scheduler = scheduler;
  }

  crsched::ProductGraph product;
  const bool keep = !dump_graph_path.empty();
  const crsched::CrReport rep = crsched::competitive_ratio(ts, opt, keep ? &product : nullptr);

  if (keep) {
    std::ofstream out(dump_graph_path, std::ios::binary);
    if (!out) crsched::fail(errc::parse, "cannot write " + dump_graph_path);
    out << crsched::product_to_json_text(product);
  }

  if (common.format == "table")
    std::cout << crsched::report_to_table_text(rep);
  else
    std::cout << crsched::report_to_json_text(rep);
  return 0;
}

// ------------------------------------------------------------------ batch --

struct Cell {
  bool ok = false;
  bool exact = false;
  std::string cr;       // canonical rational, or "[lo, hi]"
  std::string lo, hi;   // set when !exact
  std::string error;    // set when !ok
  double seconds = 0.0;
};

Cell run_cell(const std::string& taskset_path, const std::string& scheduler,
              const crsched::AnalysisOptions& base) {
  Cell cell;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const crsched::Taskset ts = crsched::load_taskset(taskset_path);
    crsched::AnalysisOptions opt = base;
    opt.scheduler = scheduler;
    opt.want_witness = false;
    const crsched::CrReport rep = crsched::competitive_ratio(ts, opt);
    cell.ok = true;
    cell.exact = rep.exact;
    if (rep.exact) {
      cell.cr = crsched::to_string(rep.cr);
    } else {
      cell.lo = crsched::to_string(rep.lo);
      cell.hi = crsched::to_string(rep.hi);
      cell.cr = "[" + cell.lo + ", " + cell.hi + "]";
    }
  } catch (const crsched::error& e) {
    cell.error = e.what();
  }
  cell.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

int run_batch(const CommonOpts& common, std::vector<std::string> taskset_paths,
              std::vector<std::string> schedulers, const std::string& preset,
              const std::string& data_dir) {
  if (!preset.empty()) {
    if (preset != "td1-table")
      crsched::fail(errc::parse, "unknown preset '" + preset + "' (available: td1-table)");
    taskset_paths.clear();
    for (const char* name : {"C1", "C2", "C3", "C4", "C5", "C6"})
      taskset_paths.push_back(data_dir + "/" + name + ".json");
    schedulers = {"td1"};
  }
  if (schedulers.empty()) schedulers = crsched::builtin_policy_names();

  const crsched::AnalysisOptions base = make_options(common);

  // One analysis per (scheduler, taskset), claimed off a shared counter by a
  // bounded pool. Cells share nothing mutable; assembly stays ordered.
  const int rows = static_cast<int>(schedulers.size());
  const int cols = static_cast<int>(taskset_paths.size());
  std::vector<Cell> cells(static_cast<std::size_t>(rows) * cols);
  std::atomic<int> next{0};
  int pool = common.jobs > 0 ? common.jobs
                             : static_cast<int>(std::thread::hardware_concurrency());
  if (pool < 1) pool = 1;
  pool = std::min<int>(pool, std::max(1, rows * cols));
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < rows * cols; i = next.fetch_add(1))
      cells[i] = run_cell(taskset_paths[i % cols], schedulers[i / cols], base);
  };
  std::vector<std::thread> threads;
  threads.reserve(pool - 1);
  for (int t = 1; t < pool; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::vector<std::string> headers;
  headers.reserve(taskset_paths.size());
  for (const std::string& p : taskset_paths) headers.push_back(file_stem(p));

  if (common.format == "table") {
    // Column widths: max of header and cell contents, per column.
    std::size_t w0 = 9;  // "scheduler"
    for (const std::string& s : schedulers) w0 = std::max(w0, s.size());
    std::vector<std::size_t> w(cols);
    for (int c = 0; c < cols; ++c) {
      w[c] = headers[c].size();
      for (int r = 0; r < rows; ++r) {
        const Cell& cell = cells[static_cast<std::size_t>(r) * cols + c];
        w[c] = std::max(w[c], (cell.ok ? cell.cr : std::string("error")).size());
      }
    }
    std::ostringstream out;
    out << std::string(w0 - 9, ' ') << "scheduler";
    for (int c = 0; c < cols; ++c) out << "  " << std::string(w[c] - headers[c].size(), ' ') << headers[c];
    out << "\n";
    for (int r = 0; r < rows; ++r) {
      out << std::string(w0 - schedulers[r].size(), ' ') << schedulers[r];
      for (int c = 0; c < cols; ++c) {
        const Cell& cell = cells[static_cast<std::size_t>(r) * cols + c];
        const std::string text = cell.ok ? cell.cr : "error";
        out << "  " << std::string(w[c] - text.size(), ' ') << text;
      }
      out << "\n";
    }
    bool any_err = false;
    for (const Cell& cell : cells) any_err |= !cell.ok && !cell.error.empty();
    if (any_err) {
      out << "\nfailures:\n";
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          const Cell& cell = cells[static_cast<std::size_t>(r) * cols + c];
          if (!cell.ok)
            out << "  " << schedulers[r] << " / " << headers[c] << ": " << cell.error << "\n";
        }
    }
    out << "\ncell times (s):\n";
    for (int r = 0; r < rows; ++r) {
      out << "  " << std::string(w0 - schedulers[r].size(), ' ') << schedulers[r];
      for (int c = 0; c < cols; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", cells[static_cast<std::size_t>(r) * cols + c].seconds);
        out << "  " << buf;
      }
      out << "\n";
    }
    std::cout << out.str();
  } else {
    // JSON stays timing-free so identical inputs give identical bytes.
    json j;
    j["schedulers"] = schedulers;
    j["tasksets"] = headers;
    json matrix = json::array();
    for (int r = 0; r < rows; ++r) {
      json row = json::array();
      for (int c = 0; c < cols; ++c) {
        const Cell& cell = cells[static_cast<std::size_t>(r) * cols + c];
        json e;
        if (!cell.ok) {
          e["error"] = cell.error;
        } else if (cell.exact) {
          e["cr"] = cell.cr;
        } else {
          e["cr"] = json{{"lo", cell.lo}, {"hi", cell.hi}};
        }
        row.push_back(std::move(e));
      }
      matrix.push_back(std::move(row));
    }
    j["cells"] = std::move(matrix);
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact competitive-ratio analysis of on-line firm-deadline schedulers"};
  app.require_subcommand(1);

  // analyze
  CommonOpts a_common;
  std::string a_taskset, a_scheduler = "td1", a_scheduler_lts, a_dump_graph;
  bool a_dry_run = false;
  CLI::App* analyze = app.add_subcommand("analyze", "analyze one taskset under one scheduler");
  analyze->add_option("--taskset", a_taskset, "taskset JSON file")->required();
  CLI::Option* sched_opt =
      analyze->add_option("--scheduler", a_scheduler, "built-in policy: edf, srt, sp, fifo, td1");
  analyze->add_option("--scheduler-lts", a_scheduler_lts, "custom deterministic transducer JSON")
      ->excludes(sched_opt);
  analyze->add_flag("--dry-run", a_dry_run, "build all state spaces, report sizes, skip the solve");
  analyze->add_option("--dump-graph", a_dump_graph, "write the product graph as JSON to this path");
  add_common(analyze, &a_common);

  // batch
  CommonOpts b_common;
  b_common.format = "table";
  std::vector<std::string> b_tasksets, b_schedulers;
  std::string b_preset, b_data_dir = "data/tasksets";
  CLI::App* batch = app.add_subcommand("batch", "matrix of analyses: schedulers x tasksets");
  batch->add_option("--tasksets", b_tasksets, "taskset JSON files (columns)");
  batch->add_option("--schedulers", b_schedulers,
                    "built-in policies to run (rows; default: all built-ins)");
  batch->add_option("--preset", b_preset, "named batch: td1-table (sets C1-C6 under td1)");
  batch->add_option("--data-dir", b_data_dir, "directory holding the preset taskset files");
  add_common(batch, &b_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json j;
    j["error"] = json{{"code", "parse"}, {"message", e.what()}};
    std::cerr << j.dump(2) << "\n";
    return 2;
  }

  try {
    if (analyze->parsed())
      return run_analyze(a_common, a_taskset, a_scheduler, a_scheduler_lts, a_dry_run,
                         a_dump_graph);
    return run_batch(b_common, b_tasksets, b_schedulers, b_preset, b_data_dir);
  } catch (const crsched::error& e) {
    die(e);
  } catch (const std::exception& e) {
    json j;
    j["error"] = json{{"code", "error"}, {"message", e.what()}};
    std::cerr << j.dump(2) << "\n";
    return 1;
  }
}
