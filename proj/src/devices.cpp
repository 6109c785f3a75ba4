#include "qwnet/devices.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace qwnet {

CMatrix grover_coin(int nports) {
  if (nports < 2) throw ValidationError("grover coin needs at least 2 ports");
  const double off = 2.0 / nports;
  CMatrix g = CMatrix::Constant(nports, nports, Complex(off, 0.0));
  g.diagonal().array() -= 1.0;
  return g;
}

CMatrix beamsplitter_5050() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix b(4, 4);
  b << 0, 0, s, s,
       0, 0, s, -s,
       s, s, 0, 0,
       s, -s, 0, 0;
  return b;
}

CMatrix phase_node(double phi) {
  const Complex half = std::polar(1.0, phi / 2.0);
  CMatrix u(2, 2);
  u << 0.0, half, half, 0.0;
  return u;
}

CMatrix mirror() { return CMatrix::Constant(1, 1, Complex(-1.0, 0.0)); }

CMatrix pass_through() {
  CMatrix u(2, 2);
  u << 0.0, 1.0, 1.0, 0.0;
  return u;
}

AnalyticGMCoefficients gm_analytic(double phi1, double phi2) {
  const Complex e1 = std::polar(1.0, phi1);
  const Complex e2 = std::polar(1.0, phi2);
  AnalyticGMCoefficients out;
  out.B = 0.5 * (e1 + e2);
  out.C = 0.5 * (e1 - e2);
  const Complex denom = 2.0 * out.B - 2.0;
  if (std::abs(denom) < 1e-14) {
    throw SingularSystemError("Grover-Michelson response is singular at (phi1, phi2) = (0, 0)",
                              std::numeric_limits<double>::infinity());
  }
  const Complex common = out.C * out.C / denom - out.B / 2.0;
  out.t = common + 0.5;
  out.r = common - 0.5;
  return out;
}

NetworkGraph build_grover_michelson(double phi1, double phi2) {
  std::vector<LocalScatterer> nodes(5);
  auto set = [&](int i, std::string name, std::string device, std::vector<EdgeId> ports) {
    auto& s = nodes[i];
    s.id = i + 1;
    s.name = std::move(name);
    s.matrix = make_device(device);
    s.device = std::move(device);
    s.ports = std::move(ports);
  };
  set(0, "g", "grover:4", {1, 2, 3, 4});
  set(1, "p1", "phase:" + format_double(phi1), {3, 5});
  set(2, "p2", "phase:" + format_double(phi2), {4, 6});
  set(3, "m1", "mirror", {5});
  set(4, "m2", "mirror", {6});
  return NetworkGraph(6, std::move(nodes));
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ValidationError("bad numeric argument '" + std::string(s) + "' in device '" +
                          std::string(whole) + "'");
  }
  return v;
}

struct KindInfo {
  std::size_t nargs;
};

const std::map<std::string, KindInfo, std::less<>>& kinds() {
  static const std::map<std::string, KindInfo, std::less<>> table = {
      {"grover", {1}}, {"bs5050", {0}}, {"mirror", {0}},
      {"pass", {0}},   {"identity", {1}}, {"phase", {1}},
  };
  return table;
}

int integer_arg(double v, const std::string& kind) {
  if (v != std::floor(v) || v < 1 || v > 1 << 20) {
    throw ValidationError(kind + " needs a positive integer argument");
  }
  return static_cast<int>(v);
}

}  // namespace

DeviceSpec DeviceSpec::parse(std::string_view text) {
  DeviceSpec spec;
  const auto colon = text.find(':');
  spec.kind_ = std::string(text.substr(0, colon));
  auto it = kinds().find(spec.kind_);
  if (it == kinds().end()) {
    throw ValidationError("unknown device '" + std::string(text) + "'");
  }
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view piece = rest.substr(0, comma);
      if (piece.empty()) throw ValidationError("empty argument in device '" + std::string(text) + "'");
      if (piece.front() == '$') {
        if (piece.size() == 1) throw ValidationError("empty parameter name in '" + std::string(text) + "'");
        spec.args_.emplace_back(std::string(piece.substr(1)));
      } else {
        spec.args_.emplace_back(parse_number(piece, text));
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  if (spec.args_.size() != it->second.nargs) {
    throw ValidationError("device '" + spec.kind_ + "' takes " + std::to_string(it->second.nargs) +
                          " argument(s)");
  }
  return spec;
}

std::vector<std::string> DeviceSpec::parameters() const {
  std::vector<std::string> out;
  for (const auto& a : args_) {
    if (const auto* name = std::get_if<std::string>(&a)) out.push_back(*name);
  }
  return out;
}

CMatrix DeviceSpec::build(const std::map<std::string, double>& bindings,
                          std::string* canonical) const {
  std::vector<double> values;
  for (const auto& a : args_) {
    if (const auto* name = std::get_if<std::string>(&a)) {
      auto it = bindings.find(*name);
      if (it == bindings.end()) throw ValidationError("parameter $" + *name + " is not bound");
      values.push_back(it->second);
    } else {
      values.push_back(std::get<double>(a));
    }
  }
  if (canonical) {
    *canonical = kind_;
    for (std::size_t i = 0; i < values.size(); ++i) {
      *canonical += (i == 0 ? ':' : ',') + format_double(values[i]);
    }
  }
  if (kind_ == "grover") return grover_coin(integer_arg(values[0], kind_));
  if (kind_ == "bs5050") return beamsplitter_5050();
  if (kind_ == "mirror") return mirror();
  if (kind_ == "pass") return pass_through();
  if (kind_ == "identity") {
    const int n = integer_arg(values[0], kind_);
    return CMatrix::Identity(n, n);
  }
  return phase_node(values[0]);
}

std::string DeviceSpec::to_string() const {
  std::string out = kind_;
  for (std::size_t i = 0; i < args_.size(); ++i) {
    out += (i == 0 ? ':' : ',');
    if (const auto* name = std::get_if<std::string>(&args_[i])) {
      out += "$" + *name;
    } else {
      out += format_double(std::get<double>(args_[i]));
    }
  }
  return out;
}

CMatrix make_device(std::string_view spec) {
  const DeviceSpec d = DeviceSpec::parse(spec);
  if (d.is_parametric()) {
    throw ValidationError("device '" + std::string(spec) + "' has unbound parameters");
  }
  return d.build();
}

}  // namespace qwnet
