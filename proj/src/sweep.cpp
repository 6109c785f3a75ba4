#include "qwnet/sweep.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

namespace qwnet {

double SweepParameter::value(int index) const {
  if (count <= 1) return start;
  if (index == count - 1) return stop;
  return start + (stop - start) * static_cast<double>(index) / static_cast<double>(count - 1);
}

std::size_t SweepSpec::grid_size() const {
  std::size_t n = 1;
  for (const auto& p : parameters) n *= static_cast<std::size_t>(p.count);
  return n;
}

std::string to_string(PointStatus status) {
  switch (status) {
    case PointStatus::Ok: return "ok";
    case PointStatus::Singular: return "singular";
    case PointStatus::NonConverged: return "non-converged";
    case PointStatus::Invalid: return "invalid";
  }
  return "unknown";
}

SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& base_dir) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("sweep spec is not valid JSON: ") + e.what());
  }
  try {
    SweepSpec spec;
    namespace fs = std::filesystem;
    auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? p : (fs::path(base_dir) / path).string();
    };
    spec.network_path = resolve(j.at("network").get<std::string>());
    spec.output_path = j.contains("output") ? resolve(j.at("output").get<std::string>()) : "";
    for (const auto& p : j.at("parameters")) {
      SweepParameter sp;
      sp.name = p.at("name").get<std::string>();
      sp.start = p.at("start").get<double>();
      sp.stop = p.value("stop", sp.start);
      sp.count = p.value("count", 1);
      if (sp.count < 1) throw ValidationError("parameter '" + sp.name + "' needs count >= 1");
      for (const auto& other : spec.parameters) {
        if (other.name == sp.name) throw ValidationError("parameter '" + sp.name + "' given twice");
      }
      spec.parameters.push_back(sp);
    }
    if (j.contains("ports")) spec.ports = j.at("ports").get<std::vector<EdgeId>>();
    const std::string format = j.value("format", "csv");
    if (format == "csv") {
      spec.format = OutputFormat::Csv;
    } else if (format == "json") {
      spec.format = OutputFormat::Json;
    } else {
      throw ValidationError("unknown output format '" + format + "'");
    }
    const std::string method = j.value("method", "closed");
    if (method == "closed") {
      spec.method = SolveMethod::ClosedForm;
    } else if (method == "iterative") {
      spec.method = SolveMethod::Iterative;
    } else {
      throw ValidationError("unknown method '" + method + "'");
    }
    spec.tolerance = j.value("tol", spec.tolerance);
    spec.max_steps = j.value("max_steps", spec.max_steps);
    spec.normalize = j.value("normalize", false);
    if (!(spec.tolerance > 0.0)) throw ValidationError("tol must be positive");
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad sweep spec: ") + e.what());
  }
}

SweepSpec load_sweep_spec(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_sweep_spec(read_text_file(path), dir.empty() ? "." : dir);
}

SweepRecord solve_point(const NetworkGraph& graph, const AssemblyPlan& plan, const SweepSpec& spec) {
  SweepRecord rec;
  rec.port = plan.input_edge;
  rec.condition = std::numeric_limits<double>::quiet_NaN();
  try {
    const AssembledSystem sys = assemble(graph, plan);
    if (spec.method == SolveMethod::ClosedForm) {
      const auto sol = solve_steady_state(sys);
      rec.amplitudes = sol.amplitudes;
      rec.condition = sol.condition_estimate;
    } else {
      const auto sol = solve_by_iteration(sys, spec.tolerance, spec.max_steps);
      rec.amplitudes = sol.amplitudes;
    }
  } catch (const SingularSystemError& e) {
    rec.status = PointStatus::Singular;
    rec.condition = e.condition();
    rec.message = e.what();
  } catch (const ConvergenceError& e) {
    rec.status = PointStatus::NonConverged;
    rec.message = e.what();
  } catch (const Error& e) {
    rec.status = PointStatus::Invalid;
    rec.message = e.what();
  }
  return rec;
}

SweepResult run_sweep(const NetworkTemplate& network, const SweepSpec& spec, unsigned threads) {
  const auto declared = network.parameters();
  for (const auto& name : declared) {
    const bool bound = std::any_of(spec.parameters.begin(), spec.parameters.end(),
                                   [&](const SweepParameter& p) { return p.name == name; });
    if (!bound) throw ValidationError("network parameter $" + name + " is not bound by the sweep");
  }
  for (const auto& p : spec.parameters) {
    if (!declared.contains(p.name)) {
      throw ValidationError("sweep parameter '" + p.name + "' does not appear in the network");
    }
  }

  // Structure is fixed by the template, so any instantiation serves for the
  // value-independent plans.
  std::map<std::string, double> first;
  for (const auto& p : spec.parameters) first[p.name] = p.value(0);
  auto build = [&](const std::map<std::string, double>& bindings) {
    NetworkGraph g = network.instantiate(bindings);
    return spec.normalize ? normalize_loops(g) : g;
  };
  const NetworkGraph reference = build(first);
  const EdgeIncidence incidence = build_incidence(reference);

  SweepResult result;
  for (const auto& p : spec.parameters) result.parameter_names.push_back(p.name);
  result.open_edges = incidence.open_edges();
  const std::vector<EdgeId> ports = spec.ports.empty() ? result.open_edges : spec.ports;

  std::vector<AssemblyPlan> plans;
  for (EdgeId port : ports) plans.push_back(plan_assembly(reference, port));

  const std::size_t points = spec.grid_size();
  result.records.resize(points * ports.size());

  auto work = [&](std::size_t g) {
    std::vector<int> idx(spec.parameters.size());
    std::vector<double> vals(spec.parameters.size());
    std::map<std::string, double> bindings;
    std::size_t rest = g;
    for (std::size_t k = spec.parameters.size(); k-- > 0;) {
      const auto& p = spec.parameters[k];
      idx[k] = static_cast<int>(rest % static_cast<std::size_t>(p.count));
      rest /= static_cast<std::size_t>(p.count);
      vals[k] = p.value(idx[k]);
      bindings[p.name] = vals[k];
    }
    std::optional<NetworkGraph> graph;
    std::string failure;
    try {
      graph.emplace(build(bindings));
    } catch (const Error& e) {
      failure = e.what();
    }
    for (std::size_t k = 0; k < ports.size(); ++k) {
      SweepRecord rec;
      if (graph) {
        rec = solve_point(*graph, plans[k], spec);
      } else {
        rec.port = ports[k];
        rec.status = PointStatus::Invalid;
        rec.condition = std::numeric_limits<double>::quiet_NaN();
        rec.message = failure;
      }
      rec.grid_index = g;
      rec.indices = idx;
      rec.values = vals;
      result.records[g * ports.size() + k] = std::move(rec);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points)));
  if (workers == 1) {
    for (std::size_t g = 0; g < points; ++g) work(g);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t g = next++; g < points; g = next++) work(g);
      });
    }
    for (auto& t : pool) t.join();
  }
  return result;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string format_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "grid_index";
  for (const auto& n : result.parameter_names) os << ',' << n << "_index";
  for (const auto& n : result.parameter_names) os << ',' << n;
  os << ",port";
  for (EdgeId e : result.open_edges) os << ",out" << e << "_re,out" << e << "_im";
  for (EdgeId e : result.open_edges) os << ",out" << e << "_prob";
  os << ",condition,status\n";
  for (const auto& r : result.records) {
    os << r.grid_index;
    for (int i : r.indices) os << ',' << i;
    for (double v : r.values) os << ',' << num(v);
    os << ',' << r.port;
    const bool ok = r.status == PointStatus::Ok;
    for (std::size_t i = 0; i < result.open_edges.size(); ++i) {
      if (ok) {
        os << ',' << num(r.amplitudes(i).real()) << ',' << num(r.amplitudes(i).imag());
      } else {
        os << ",nan,nan";
      }
    }
    for (std::size_t i = 0; i < result.open_edges.size(); ++i) {
      os << ',' << (ok ? num(std::norm(r.amplitudes(i))) : std::string("nan"));
    }
    os << ',' << num(r.condition) << ',' << to_string(r.status) << '\n';
  }
  return os.str();
}

std::string format_json(const SweepResult& result) {
  using nlohmann::json;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json out;
  out["parameters"] = result.parameter_names;
  out["open_ports"] = result.open_edges;
  json records = json::array();
  for (const auto& r : result.records) {
    json rec;
    rec["grid_index"] = r.grid_index;
    rec["indices"] = r.indices;
    rec["values"] = r.values;
    rec["port"] = r.port;
    json amps = json::array();
    json probs = json::array();
    if (r.status == PointStatus::Ok) {
      for (Eigen::Index i = 0; i < r.amplitudes.size(); ++i) {
        amps.push_back({r.amplitudes(i).real(), r.amplitudes(i).imag()});
        probs.push_back(std::norm(r.amplitudes(i)));
      }
    }
    rec["amplitudes"] = amps;
    rec["probabilities"] = probs;
    rec["condition"] = finite_or_null(r.condition);
    rec["status"] = to_string(r.status);
    if (!r.message.empty()) rec["message"] = r.message;
    records.push_back(std::move(rec));
  }
  out["records"] = std::move(records);
  return out.dump(1) + "\n";
}

unsigned resolve_thread_count(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("QWNET_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace qwnet
