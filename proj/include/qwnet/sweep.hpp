#pragma once

#include "qwnet/network_io.hpp"
#include "qwnet/solver.hpp"

#include <string>
#include <vector>

namespace qwnet {

struct SweepParameter {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;  // linear spacing; count == 1 evaluates `start` only

  double value(int index) const;
};

enum class SolveMethod { ClosedForm, Iterative };
enum class OutputFormat { Csv, Json };

struct SweepSpec {
  std::string network_path;            // resolved against the spec file's directory
  std::vector<SweepParameter> parameters;
  std::vector<EdgeId> ports;           // empty: every open port
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  SolveMethod method = SolveMethod::ClosedForm;
  double tolerance = 1e-12;
  int max_steps = 1'000'000;
  bool normalize = false;  // apply normalize_loops to every instantiation

  std::size_t grid_size() const;
};

// Reads the JSON sweep description:
//   {"network": "gm.qwn",
//    "parameters": [{"name": "phi1", "start": 0, "stop": 6.28, "count": 1001}],
//    "ports": [1], "output": "out.csv", "format": "csv",
//    "method": "closed", "tol": 1e-12, "max_steps": 100000,
//    "normalize": false}
SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& base_dir = ".");
SweepSpec load_sweep_spec(const std::string& path);

enum class PointStatus { Ok, Singular, NonConverged, Invalid };
std::string to_string(PointStatus status);

struct SweepRecord {
  std::size_t grid_index = 0;
  std::vector<int> indices;      // per parameter
  std::vector<double> values;    // per parameter
  EdgeId port = 0;
  CVector amplitudes;            // per open edge; empty unless status is Ok
  double condition = 0.0;        // NaN when not computed
  PointStatus status = PointStatus::Ok;
  std::string message;
};

struct SweepResult {
  std::vector<std::string> parameter_names;
  std::vector<EdgeId> open_edges;
  std::vector<SweepRecord> records;  // grid-major, then port order
};

// Evaluates every grid point for every port. Topology, hazard checks and
// activation sequences are computed once; points are solved concurrently on
// `threads` workers and collected in grid order, so the result does not depend
// on scheduling. Per-point failures are recorded, never thrown.
SweepResult run_sweep(const NetworkTemplate& network, const SweepSpec& spec, unsigned threads);

// Solves one instantiated point the same way a sweep does.
SweepRecord solve_point(const NetworkGraph& graph, const AssemblyPlan& plan, const SweepSpec& spec);

std::string format_csv(const SweepResult& result);
std::string format_json(const SweepResult& result);

// Worker count: explicit value if > 0, else QWNET_THREADS, else hardware.
unsigned resolve_thread_count(int requested);

}  // namespace qwnet
