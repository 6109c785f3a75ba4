#include "cli.hpp"

#include "qwnet/assembly.hpp"
#include "qwnet/devices.hpp"
#include "qwnet/network_io.hpp"
#include "qwnet/redheffer.hpp"
#include "qwnet/solver.hpp"
#include "qwnet/sweep.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qwnet::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

NetworkGraph load_graph(const std::string& path, bool normalize) {
  NetworkGraph g = parse_network(read_text_file(path));
  return normalize ? normalize_loops(g) : g;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

int cmd_validate(const std::string& path, bool normalize, std::ostream& out) {
  const NetworkGraph g = load_graph(path, normalize);
  const EdgeIncidence inc = build_incidence(g);
  const int q = inc.internal_edge_count();
  out << "n=" << g.node_count() << " d=" << g.edge_count() << " q=" << q
      << " open=" << inc.open_ports.size() << '\n';
  out << "open ports:";
  for (const auto& p : inc.open_ports) out << " (node " << p.node << ", edge " << p.edge << ")";
  out << '\n';
  double worst = 0.0;
  int lossy = 0;
  for (const auto& s : g.nodes()) {
    if (s.lossy) {
      ++lossy;
    } else {
      worst = std::max(worst, unitarity_defect(s.matrix));
    }
  }
  out << "unitarity: max |U^H U - I| = " << num(worst) << " over " << g.node_count() - lossy
      << " node(s)";
  if (lossy) out << ", " << lossy << " lossy node(s) unchecked";
  out << '\n';
  const auto hazards = detect_simultaneity_hazard(g, inc);
  if (!hazards.empty()) {
    out << "hazards:\n";
    for (const auto& h : hazards) out << "  " << describe(h) << '\n';
    out << "not assemblable as is; rerun with --normalize to insert pass-through nodes\n";
    return kValidation;
  }
  out << "ok\n";
  return kOk;
}

struct SolveArgs {
  std::string path;
  int port = 0;
  bool all_ports = false;
  std::string method = "closed";
  double tol = 1e-12;
  int max_steps = 1'000'000;
  bool normalize = false;
  bool spectral = false;
  std::string format = "text";
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const NetworkGraph g = load_graph(a.path, a.normalize);
  const EdgeIncidence inc = build_incidence(g);
  std::vector<EdgeId> ports;
  if (a.all_ports) {
    ports = inc.open_edges();
  } else {
    if (a.port == 0) throw CLI::ValidationError("solve needs --port or --all-ports");
    ports = {a.port};
  }

  SweepSpec spec;
  spec.method = a.method == "iterative" ? SolveMethod::Iterative : SolveMethod::ClosedForm;
  spec.tolerance = a.tol;
  spec.max_steps = a.max_steps;

  SweepResult result;
  result.open_edges = inc.open_edges();
  std::vector<ScatteringSolution> solutions;
  for (EdgeId p : ports) {
    const AssembledSystem sys = assemble(g, plan_assembly(g, p));
    ScatteringSolution sol;
    if (spec.method == SolveMethod::Iterative) {
      sol = solve_by_iteration(sys, a.tol, a.max_steps);
    } else {
      SolveOptions opts;
      opts.compute_spectral_radius = a.spectral;
      sol = solve_steady_state(sys, opts);
    }
    SweepRecord rec;
    rec.port = p;
    rec.amplitudes = sol.amplitudes;
    rec.condition = sol.condition_estimate;
    result.records.push_back(rec);
    solutions.push_back(std::move(sol));
  }

  if (a.format == "csv") {
    out << format_csv(result);
    return kOk;
  }
  if (a.format == "json") {
    out << format_json(result);
    return kOk;
  }
  for (std::size_t k = 0; k < ports.size(); ++k) {
    const auto& sol = solutions[k];
    out << "input port " << ports[k] << '\n';
    out << "edge re im probability\n";
    for (std::size_t i = 0; i < sol.open_edges.size(); ++i) {
      const Complex z = sol.amplitudes(static_cast<Eigen::Index>(i));
      out << sol.open_edges[i] << ' ' << num(z.real()) << ' ' << num(z.imag()) << ' '
          << num(std::norm(z)) << '\n';
    }
    if (spec.method == SolveMethod::Iterative) {
      out << "iterations " << sol.iterations << "\nlast change " << num(sol.residual) << '\n';
    } else {
      out << "condition " << num(sol.condition_estimate) << "\nresidual " << num(sol.residual) << '\n';
      if (sol.spectral_radius) out << "spectral radius " << num(*sol.spectral_radius) << '\n';
    }
  }
  if (a.all_ports) {
    const auto m = static_cast<Eigen::Index>(ports.size());
    CMatrix s(m, m);
    for (Eigen::Index c = 0; c < m; ++c) s.col(c) = solutions[c].amplitudes;
    out << "scattering matrix (columns = input ports)\n" << dump_matrix(s);
    out << "unitarity defect " << num(unitarity_defect(s)) << '\n';
  }
  return kOk;
}

int cmd_sweep(const std::string& path, int threads, const std::string& output,
              const std::string& format, std::ostream& out) {
  SweepSpec spec = load_sweep_spec(path);
  if (!output.empty()) spec.output_path = output;
  if (format == "csv") spec.format = OutputFormat::Csv;
  if (format == "json") spec.format = OutputFormat::Json;
  const NetworkTemplate t = parse_network_template(read_text_file(spec.network_path));
  const SweepResult result = run_sweep(t, spec, resolve_thread_count(threads));
  write_output(spec.output_path,
               spec.format == OutputFormat::Csv ? format_csv(result) : format_json(result), out);
  if (!spec.output_path.empty() && spec.output_path != "-") {
    std::size_t ok = 0;
    for (const auto& r : result.records) ok += r.status == PointStatus::Ok;
    out << result.records.size() << " records (" << ok << " ok) written to " << spec.output_path << '\n';
  }
  return kOk;
}

CMatrix read_two_port(const std::string& item) {
  std::string text = item;
  const bool inline_spec = item.find(',') != std::string::npos;
  if (inline_spec) {
    for (char& c : text) {
      if (c == ',') c = ' ';
    }
  } else {
    text = read_text_file(item);
  }
  std::vector<double> v;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok.front() == '#') {
      std::getline(is, tok);
      continue;
    }
    double x = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ValidationError("'" + item + "': bad number '" + tok + "'");
    }
    v.push_back(x);
  }
  if (v.size() != 8) {
    throw ValidationError("'" + item + "': expected 8 numbers (r, tau, t, rho as re im pairs), got " +
                          std::to_string(v.size()));
  }
  CMatrix m(2, 2);
  m << Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]), Complex(v[6], v[7]);
  return m;
}

int cmd_star(const std::vector<std::string>& items, bool lossy, std::ostream& out) {
  std::vector<TwoPortScatterer> list;
  for (const auto& item : items) list.push_back(TwoPortScatterer::from_matrix(read_two_port(item), lossy));
  const TwoPortScatterer s = chain(list);
  out << dump_matrix(s.matrix());
  return kOk;
}

int cmd_normalize(const std::string& path, const std::string& output, std::ostream& out) {
  const NetworkGraph g = normalize_loops(load_graph(path, false));
  write_output(output, serialize_network(g), out);
  return kOk;
}

int cmd_dump(const std::string& path, int port, bool normalize, std::ostream& out) {
  const NetworkGraph g = load_graph(path, normalize);
  out << dump_system(assemble(g, port));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assemble and solve networks of linear coherent scatterers", "qwnet"};
  app.require_subcommand(1);

  std::string path;
  bool normalize = false;

  auto* validate = app.add_subcommand("validate", "Check a network file and report hazards");
  validate->add_option("network", path, "Network description file")->required();
  validate->add_flag("--normalize", normalize, "Split internal edges with pass-through nodes first");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Steady-state output amplitudes for an input port");
  solve->add_option("network", sa.path, "Network description file")->required();
  auto* port_opt = solve->add_option("--port", sa.port, "Open edge id receiving the input");
  auto* all_opt = solve->add_flag("--all-ports", sa.all_ports, "Probe every open port (full S-matrix)");
  port_opt->excludes(all_opt);
  solve->add_option("--method", sa.method, "closed or iterative")
      ->check(CLI::IsMember({"closed", "iterative"}));
  solve->add_option("--tol", sa.tol, "Iteration tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-steps", sa.max_steps, "Iteration limit")->check(CLI::PositiveNumber);
  solve->add_flag("--normalize", sa.normalize, "Split internal edges with pass-through nodes first");
  solve->add_flag("--spectral", sa.spectral, "Report the spectral radius of the internal block");
  solve->add_option("--format", sa.format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  std::string sweep_path, sweep_out, sweep_format;
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid described by a JSON spec");
  sweep->add_option("spec", sweep_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--threads", threads, "Worker threads (default: QWNET_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--output,-o", sweep_out, "Override the output path ('-' for stdout)");
  sweep->add_option("--format", sweep_format, "Override the output format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::string> star_items;
  bool star_lossy = false;
  auto* star_cmd = app.add_subcommand("star", "Redheffer star product of two-port scatterers, left to right");
  star_cmd->add_option("scatterers", star_items,
                       "Files with 8 numbers (r tau t rho as re im) or inline comma lists")
      ->required();
  star_cmd->add_flag("--lossy", star_lossy, "Skip the unitarity check");

  std::string norm_out;
  auto* norm = app.add_subcommand("normalize", "Write the loop-normalized network");
  norm->add_option("network", path, "Network description file")->required();
  norm->add_option("--output,-o", norm_out, "Output path (default stdout)");

  int dump_port = 0;
  auto* dump = app.add_subcommand("dump", "Print the assembled A, A0 and X0 for one input port");
  dump->add_option("network", path, "Network description file")->required();
  dump->add_option("--port", dump_port, "Open edge id receiving the input")->required();
  dump->add_flag("--normalize", normalize, "Split internal edges with pass-through nodes first");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(path, normalize, out);
    if (*solve) return cmd_solve(sa, out);
    if (*sweep) return cmd_sweep(sweep_path, threads, sweep_out, sweep_format, out);
    if (*star_cmd) return cmd_star(star_items, star_lossy, out);
    if (*norm) return cmd_normalize(path, norm_out, out);
    if (*dump) return cmd_dump(path, dump_port, normalize, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kUsage;
}

}  // namespace qwnet::cli
