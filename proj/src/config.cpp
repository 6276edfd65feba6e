#include "swflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "swflow/clifford.hpp"

namespace swflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const std::string& key, int line, const std::string& why) {
  throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': " + why);
}

class Parser {
 public:
  Parser(std::string key, Entry e) : key_(std::move(key)), e_(std::move(e)) {}

  double real() const {
    double v = 0.0;
    const auto& s = e_.value;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) fail(key_, e_.line, "expected a real number, got '" + s + "'");
    return v;
  }
  long long integer() const {
    long long v = 0;
    const auto& s = e_.value;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(key_, e_.line, "expected an integer, got '" + s + "'");
    return v;
  }
  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const auto& s = e_.value;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(key_, e_.line, "expected a non-negative integer, got '" + s + "'");
    return v;
  }
  bool boolean() const {
    if (e_.value == "true" || e_.value == "1") return true;
    if (e_.value == "false" || e_.value == "0") return false;
    fail(key_, e_.line, "expected true or false, got '" + e_.value + "'");
  }
  std::vector<double> reals() const {
    std::vector<double> out;
    std::stringstream ss(e_.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(Parser(key_, {trim(item), e_.line}).real());
    return out;
  }
  const std::string& text() const { return e_.value; }
  [[noreturn]] void reject(const std::string& why) const { fail(key_, e_.line, why); }

 private:
  std::string key_;
  Entry e_;
};

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"lattice", {"m", "n", "length"}},
      {"model", {"s_const", "fiber_dim"}},
      {"flow", {"integrator", "cfl", "t_end", "snapshot_every", "allow_unstable"}},
      {"init", {"kind", "seed", "amplitude", "max_mode", "center", "width"}},
      {"output", {"dir"}},
  };
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().contains(section)) {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) fail(key, line_no, "key outside of any section");
    const auto& keys = schema().at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) fail(key, line_no, "unknown key in [" + section + "]");
    const std::string full = section + "." + key;
    if (entries.contains(full)) fail(key, line_no, "duplicate key");
    if (value.empty()) fail(key, line_no, "empty value");
    entries[full] = Entry{value, line_no};
  }

  auto get = [&](const std::string& full) -> std::optional<Parser> {
    const auto it = entries.find(full);
    if (it == entries.end()) return std::nullopt;
    return Parser(full.substr(full.find('.') + 1), it->second);
  };
  auto require = [&](const std::string& full) {
    auto p = get(full);
    if (!p) throw ConfigError("missing required key '" + full.substr(full.find('.') + 1) + "' in [lattice]");
    return *p;
  };

  RunConfig c;
  {
    const auto p = require("lattice.m");
    const long long v = p.integer();
    if (v < kMinDim || v > kMaxDim) p.reject("m must lie in 4..7");
    c.m = static_cast<int>(v);
  }
  {
    const auto p = require("lattice.n");
    const long long v = p.integer();
    if (v < 4 || v > 4096) p.reject("n must be >= 4");
    c.n = static_cast<int>(v);
  }
  {
    const auto p = require("lattice.length");
    c.length = p.real();
    if (!(c.length > 0.0)) p.reject("length must be positive");
  }
  if (const auto p = get("model.s_const")) c.s_const = p->real();
  if (const auto p = get("model.fiber_dim"); p && p->text() != "auto") {
    const long long v = p->integer();
    if (v < 1 || v > 64) p->reject("fiber_dim must be auto or an integer in 1..64");
    c.fiber_dim = static_cast<int>(v);
  }
  if (const auto p = get("flow.integrator")) {
    try {
      c.flow.scheme = parse_scheme(p->text());
    } catch (const ConfigError& e) {
      p->reject(e.what());
    }
  }
  if (const auto p = get("flow.allow_unstable")) c.flow.allow_unstable = p->boolean();
  if (const auto p = get("flow.cfl")) {
    c.flow.cfl = p->real();
    if (!(c.flow.cfl > 0.0)) p->reject("cfl must be positive");
    if (c.flow.cfl > 1.0 && !c.flow.allow_unstable) p->reject("cfl must lie in (0, 1] unless allow_unstable = true");
  }
  if (const auto p = get("flow.t_end")) {
    c.flow.t_end = p->real();
    if (c.flow.t_end < 0.0) p->reject("t_end must be >= 0");
  }
  if (const auto p = get("flow.snapshot_every")) {
    const long long v = p->integer();
    if (v < 1 || v > 1'000'000'000) p->reject("snapshot_every must be >= 1");
    c.flow.snapshot_every = static_cast<int>(v);
  }
  if (const auto p = get("init.kind")) {
    try {
      c.init.kind = parse_initial_kind(p->text());
    } catch (const ConfigError& e) {
      p->reject(e.what());
    }
  }
  if (const auto p = get("init.seed")) c.init.seed = p->unsigned_integer();
  if (const auto p = get("init.amplitude")) {
    c.init.amplitude = p->real();
    if (c.init.amplitude < 0.0) p->reject("amplitude must be >= 0");
  }
  if (const auto p = get("init.max_mode")) {
    const long long v = p->integer();
    if (v < 1 || 2 * v >= c.n) p->reject("max_mode must satisfy 1 <= max_mode < n/2");
    c.init.max_mode = static_cast<int>(v);
  } else if (c.init.kind == InitialKind::random_fourier && 2 * c.init.max_mode >= c.n) {
    c.init.max_mode = 1;
  }
  if (const auto p = get("init.center")) {
    c.init.center = p->reals();
    if (static_cast<int>(c.init.center.size()) != c.m) p->reject("center must list m comma-separated coordinates");
  }
  if (const auto p = get("init.width"); p && p->text() != "auto") {
    c.init.width = p->real();
    if (!(c.init.width > 0.0) || c.init.width > 0.25 * c.length) p->reject("width must be auto or lie in (0, L/4]");
  }
  if (const auto p = get("output.dir")) c.output_dir = p->text();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[lattice]\n"
      << "m = " << c.m << "\n"
      << "n = " << c.n << "\n"
      << "length = " << format_double(c.length) << "\n\n"
      << "[model]\n"
      << "s_const = " << format_double(c.s_const) << "\n"
      << "fiber_dim = " << (c.fiber_dim ? std::to_string(*c.fiber_dim) : "auto") << "\n\n"
      << "[flow]\n"
      << "integrator = " << to_string(c.flow.scheme) << "\n"
      << "allow_unstable = " << (c.flow.allow_unstable ? "true" : "false") << "\n"
      << "cfl = " << format_double(c.flow.cfl) << "\n"
      << "t_end = " << format_double(c.flow.t_end) << "\n"
      << "snapshot_every = " << c.flow.snapshot_every << "\n\n"
      << "[init]\n"
      << "kind = " << to_string(c.init.kind) << "\n"
      << "seed = " << c.init.seed << "\n"
      << "amplitude = " << format_double(c.init.amplitude) << "\n"
      << "max_mode = " << c.init.max_mode << "\n";
  if (!c.init.center.empty()) {
    out << "center = ";
    for (std::size_t i = 0; i < c.init.center.size(); ++i) out << (i ? ", " : "") << format_double(c.init.center[i]);
    out << "\n";
  }
  out << "width = " << (c.init.width > 0.0 ? format_double(c.init.width) : "auto") << "\n";
  if (!c.output_dir.empty()) out << "\n[output]\ndir = " << c.output_dir << "\n";
  return out.str();
}

int resolved_fiber(const RunConfig& config) {
  if (config.fiber_dim) return *config.fiber_dim;
  return clifford::fiber_dimension(config.m, config.m % 2 == 0);
}

LatticePtr config_lattice(const RunConfig& config) { return build_lattice(config.m, config.n, config.length); }

ModelParams config_params(const RunConfig& config) {
  return make_params(config.s_const, config_lattice(config), resolved_fiber(config));
}

}  // namespace swflow
