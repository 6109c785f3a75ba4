#include "qwnet/network_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qwnet {

namespace {

struct Token {
  std::string_view text;
  int line = 0;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++column;
      ++i;
    } else {
      const std::size_t start = i;
      const int start_col = column;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             text[i] != '#') {
        ++i;
        ++column;
      }
      out.push_back({text.substr(start, i - start), line, start_col});
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {
    if (!tokens_.empty()) {
      end_line_ = tokens_.back().line;
      end_col_ = tokens_.back().column + static_cast<int>(tokens_.back().text.size());
    }
  }

  NetworkTemplate run() {
    NetworkTemplate t;
    expect_keyword("network");
    t.node_count = positive_int("node count");
    t.edge_count = positive_int("edge count");

    std::vector<bool> phase_seen(t.edge_count, false);
    std::vector<bool> name_seen(t.edge_count, false);
    while (!at_end()) {
      const Token kw = next();
      if (kw.text == "node") {
        t.nodes.push_back(node_record(kw, t));
      } else if (kw.text == "phase") {
        const EdgeId e = edge_ref(t.edge_count);
        if (phase_seen[e - 1]) fail(kw, "duplicate phase record for edge " + std::to_string(e));
        phase_seen[e - 1] = true;
        if (t.phase.empty()) t.phase.assign(t.edge_count, Complex(1.0, 0.0));
        const double re = number();
        const double im = number();
        t.phase[e - 1] = Complex(re, im);
      } else if (kw.text == "edge") {
        const EdgeId e = edge_ref(t.edge_count);
        if (name_seen[e - 1]) fail(kw, "duplicate name for edge " + std::to_string(e));
        name_seen[e - 1] = true;
        if (t.edge_names.empty()) t.edge_names.assign(t.edge_count, std::string());
        t.edge_names[e - 1] = std::string(next_required("edge name").text);
      } else {
        fail(kw, "expected 'node', 'phase' or 'edge', found '" + std::string(kw.text) + "'");
      }
    }
    if (static_cast<int>(t.nodes.size()) != t.node_count) {
      throw ParseError("header declares " + std::to_string(t.node_count) + " nodes but " +
                           std::to_string(t.nodes.size()) + " were given",
                       end_line_, end_col_);
    }
    return t;
  }

 private:
  NetworkTemplate::NodeRecord node_record(const Token& kw, const NetworkTemplate& t) {
    NetworkTemplate::NodeRecord rec;
    rec.line = kw.line;
    const Token id_tok = next_required("node id");
    rec.id = to_int(id_tok, "node id");
    const int expected = static_cast<int>(t.nodes.size()) + 1;
    if (rec.id != expected) {
      fail(id_tok, "node ids must be consecutive from 1; expected " + std::to_string(expected));
    }
    if (rec.id > t.node_count) fail(id_tok, "more nodes than declared in the header");
    if (!at_end() && peek().line == kw.line) rec.name = std::string(next().text);
    if (!at_end() && peek().line == kw.line) fail(peek(), "unexpected token after node name");

    bool have_ports = false;
    bool have_body = false;
    while (!at_end()) {
      const Token& tok = peek();
      if (tok.text == "ports") {
        next();
        if (have_ports) fail(tok, "duplicate 'ports' line");
        have_ports = true;
        const int line = tok.line;
        while (!at_end() && peek().line == line) rec.ports.push_back(edge_ref(t.edge_count));
        if (rec.ports.empty()) fail(tok, "'ports' needs at least one edge id");
      } else if (tok.text == "matrix") {
        const Token m = next();
        if (have_body) fail(m, "node already has a matrix or device");
        if (!have_ports) fail(m, "'ports' must come before 'matrix'");
        have_body = true;
        const int k = static_cast<int>(rec.ports.size());
        rec.matrix.resize(k, k);
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) {
            const double re = number();
            const double im = number();
            rec.matrix(r, c) = Complex(re, im);
          }
        }
      } else if (tok.text == "device") {
        const Token d = next();
        if (have_body) fail(d, "node already has a matrix or device");
        have_body = true;
        const Token spec = next_required("device spec");
        try {
          rec.device = DeviceSpec::parse(spec.text);
        } catch (const ValidationError& e) {
          fail(spec, e.what());
        }
      } else if (tok.text == "lossy") {
        next();
        rec.lossy = true;
      } else {
        break;
      }
    }
    if (!have_ports) fail(kw, "node " + std::to_string(rec.id) + " has no 'ports' line");
    if (!have_body) fail(kw, "node " + std::to_string(rec.id) + " has neither 'matrix' nor 'device'");
    return rec;
  }

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }

  Token next_required(const std::string& what) {
    if (at_end()) throw ParseError("unexpected end of input, expected " + what, end_line_, end_col_);
    return next();
  }

  [[noreturn]] void fail(const Token& tok, const std::string& message) const {
    throw ParseError(message, tok.line, tok.column);
  }

  void expect_keyword(std::string_view kw) {
    const Token tok = next_required("'" + std::string(kw) + "'");
    if (tok.text != kw) fail(tok, "expected '" + std::string(kw) + "', found '" + std::string(tok.text) + "'");
  }

  int to_int(const Token& tok, const std::string& what) const {
    int v = 0;
    const char* end = tok.text.data() + tok.text.size();
    auto res = std::from_chars(tok.text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      fail(tok, "expected integer " + what + ", found '" + std::string(tok.text) + "'");
    }
    return v;
  }

  int positive_int(const std::string& what) {
    const Token tok = next_required(what);
    const int v = to_int(tok, what);
    if (v < 1) fail(tok, what + " must be positive");
    return v;
  }

  EdgeId edge_ref(int edge_count) {
    const Token tok = next_required("edge id");
    const int e = to_int(tok, "edge id");
    if (e < 1 || e > edge_count) {
      fail(tok, "edge id " + std::to_string(e) + " out of range 1.." + std::to_string(edge_count));
    }
    return e;
  }

  double number() {
    const Token tok = next_required("number");
    double v = 0.0;
    const char* begin = tok.text.data();
    const char* end = begin + tok.text.size();
    if (begin != end && *begin == '+') ++begin;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
      fail(tok, "expected a finite number, found '" + std::string(tok.text) + "'");
    }
    return v;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int end_line_ = 1;
  int end_col_ = 1;
};

}  // namespace

std::set<std::string> NetworkTemplate::parameters() const {
  std::set<std::string> out;
  for (const auto& n : nodes) {
    if (n.device) {
      for (auto& p : n.device->parameters()) out.insert(p);
    }
  }
  return out;
}

NetworkGraph NetworkTemplate::instantiate(const std::map<std::string, double>& bindings) const {
  std::vector<LocalScatterer> built;
  built.reserve(nodes.size());
  for (const auto& rec : nodes) {
    LocalScatterer s;
    s.id = rec.id;
    s.name = rec.name;
    s.ports = rec.ports;
    s.lossy = rec.lossy;
    if (rec.device) {
      s.matrix = rec.device->build(bindings, &s.device);
    } else {
      s.matrix = rec.matrix;
    }
    if (s.matrix.rows() != s.dim()) {
      throw ValidationError("node " + std::to_string(rec.id) + " (line " + std::to_string(rec.line) +
                            "): device '" + s.device + "' has " + std::to_string(s.matrix.rows()) +
                            " ports but " + std::to_string(s.dim()) + " edges are listed");
    }
    built.push_back(std::move(s));
  }
  return NetworkGraph(edge_count, std::move(built), phase, edge_names);
}

NetworkTemplate parse_network_template(std::string_view text) { return Parser(text).run(); }

NetworkGraph parse_network(std::string_view text) {
  const NetworkTemplate t = parse_network_template(text);
  const auto params = t.parameters();
  if (!params.empty()) {
    throw ValidationError("network references unbound parameter $" + *params.begin() +
                          "; use it as a sweep template");
  }
  return t.instantiate();
}

std::string serialize_network(const NetworkGraph& graph) {
  std::ostringstream os;
  os << "network " << graph.node_count() << ' ' << graph.edge_count() << '\n';
  for (const auto& s : graph.nodes()) {
    os << "node " << s.id;
    if (!s.name.empty()) os << ' ' << s.name;
    os << "\n  ports";
    for (EdgeId e : s.ports) os << ' ' << e;
    os << '\n';
    if (!s.device.empty()) {
      os << "  device " << s.device << '\n';
    } else {
      os << "  matrix\n";
      for (Eigen::Index r = 0; r < s.matrix.rows(); ++r) {
        os << "   ";
        for (Eigen::Index c = 0; c < s.matrix.cols(); ++c) {
          const Complex z = s.matrix(r, c);
          os << ' ' << format_double(z.real()) << ' ' << format_double(z.imag());
        }
        os << '\n';
      }
    }
    if (s.lossy) os << "  lossy\n";
  }
  for (EdgeId e = 1; e <= graph.edge_count(); ++e) {
    const Complex z = graph.phase(e);
    if (z != Complex(1.0, 0.0)) {
      os << "phase " << e << ' ' << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
    }
  }
  for (EdgeId e = 1; e <= graph.edge_count(); ++e) {
    const auto& name = graph.edge_names()[e - 1];
    if (!name.empty()) os << "edge " << e << ' ' << name << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qwnet
