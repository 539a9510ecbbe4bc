// Copyright 2026 The dpp2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpp2/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dpp2/random.h"

namespace dpp2 {

ConfigError::ConfigError(const std::string& source, int line,
                         const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", source, line, message)
                                  : fmt::format("{}: {}", source, message)),
      line_(line) {}

std::uint64_t ExperimentConfig::run_seed(int rep) const {
  if (!seeds.empty()) return seeds.at(static_cast<std::size_t>(rep));
  return derive_seed(seed, static_cast<std::uint64_t>(rep));
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(source_, line, message);
  }

  void parse(std::istream& in) {
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string text = raw;
      const auto hash = text.find_first_of("#;");
      if (hash != std::string::npos) text.erase(hash);
      text = trim(text);
      if (text.empty()) continue;
      if (text.front() == '[') {
        if (text.back() != ']') fail(line, "unterminated section header");
        section = trim(text.substr(1, text.size() - 2));
        if (!kSections.count(section)) fail(line, fmt::format("unknown section [{}]", section));
        if (!seen_sections_.insert(section).second)
          fail(line, fmt::format("duplicate section [{}]", section));
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value'");
      if (section.empty()) fail(line, "key outside of any section");
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (value.empty()) fail(line, fmt::format("empty value for '{}'", key));
      const std::string full = section + "." + key;
      if (!entries_.emplace(full, Entry{value, line}).second)
        fail(line, fmt::format("duplicate key '{}'", key));
    }
  }

  // Invokes apply for the entry if present and marks it consumed.
  void take(const std::string& key, const std::function<void(const Entry&)>& apply) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    apply(it->second);
    entries_.erase(it);
  }

  void reject_leftovers() const {
    int line = 0;
    std::string key;
    for (const auto& [name, entry] : entries_) {
      if (line == 0 || entry.line < line) {
        line = entry.line;
        key = name;
      }
    }
    if (line > 0) fail(line, fmt::format("unknown key '{}'", key.substr(key.find('.') + 1)));
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  template <typename T>
  T number(const Entry& e, const std::string& key) const {
    T out{};
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end)
      fail(e.line, fmt::format("'{}' expects a number, got '{}'", key, e.value));
    return out;
  }

  bool boolean(const Entry& e, const std::string& key) const {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e.line, fmt::format("'{}' expects true or false, got '{}'", key, e.value));
  }

 private:
  inline static const std::set<std::string> kSections = {
      "run", "problem", "network", "params", "noise", "trace"};
  std::string source_;
  std::set<std::string> seen_sections_;
  std::map<std::string, Entry> entries_;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  Reader r(source);
  r.parse(in);
  ExperimentConfig c;

  auto integer = [&](const std::string& key, auto& target, long long lo, long long hi) {
    r.take(key, [&](const Entry& e) {
      const long long v = r.number<long long>(e, key);
      if (v < lo || v > hi)
        r.fail(e.line, fmt::format("'{}' must lie in [{}, {}], got {}", key, lo, hi, v));
      target = static_cast<std::remove_reference_t<decltype(target)>>(v);
    });
  };
  auto seed = [&](const std::string& key, std::uint64_t& target) {
    r.take(key, [&](const Entry& e) { target = r.number<std::uint64_t>(e, key); });
  };
  auto real = [&](const std::string& key, double& target, double lo, double hi,
                  bool open_lo, bool open_hi) {
    r.take(key, [&](const Entry& e) {
      const double v = r.number<double>(e, key);
      const bool below = open_lo ? !(v > lo) : !(v >= lo);
      const bool above = open_hi ? !(v < hi) : !(v <= hi);
      if (below || above)
        r.fail(e.line, fmt::format("'{}' must lie in {}{}, {}{}, got {}", key,
                                   open_lo ? "(" : "[", lo, hi, open_hi ? ")" : "]", v));
      target = v;
    });
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();

  if (!r.has("run.seed")) throw ConfigError(source, 0, "missing mandatory key [run] seed");
  seed("run.seed", c.seed);
  integer("run.repeats", c.repeats, 1, 1000000);
  int seeds_line = 0;
  r.take("run.seeds", [&](const Entry& e) {
    seeds_line = e.line;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      Entry one{trim(item), e.line};
      c.seeds.push_back(r.number<std::uint64_t>(one, "seeds"));
    }
  });
  if (!c.seeds.empty() && static_cast<int>(c.seeds.size()) != c.repeats)
    r.fail(seeds_line, fmt::format("'seeds' lists {} values but repeats = {}",
                                   c.seeds.size(), c.repeats));
  r.take("run.output", [&](const Entry& e) { c.output = e.value; });
  r.take("run.label", [&](const Entry& e) { c.label = e.value; });
  integer("run.iterations", c.iterations, 0, 100000000);

  integer("trace.stride", c.stride, 1, 100000000);
  r.take("trace.lyapunov", [&](const Entry& e) { c.lyapunov = r.boolean(e, "lyapunov"); });
  r.take("trace.plot", [&](const Entry& e) { c.plot = r.boolean(e, "plot"); });
  real("trace.c_theta", c.c_theta, 0.0, kInf, true, true);
  real("trace.gamma", c.gamma, 0.0, kInf, true, true);

  r.take("problem.kind", [&](const Entry& e) {
    if (e.value != "logistic" && e.value != "quadratic")
      r.fail(e.line, fmt::format("unknown problem kind '{}'", e.value));
    c.problem.kind = e.value;
  });
  integer("problem.nodes", c.problem.nodes, 1, 100000);
  integer("problem.dim", c.problem.dim, 1, 100000);
  integer("problem.samples", c.problem.samples, 1, 100000000);
  real("problem.lambda", c.problem.lambda, 0.0, kInf, false, true);
  real("problem.omega", c.problem.omega, 0.0, kInf, true, true);
  integer("problem.rank_deficit", c.problem.rank_deficit, 0, 100000);
  seed("problem.seed", c.problem.seed);

  r.take("network.kind", [&](const Entry& e) {
    static const std::set<std::string> kinds = {"geometric", "path", "ring", "complete", "file"};
    if (!kinds.count(e.value)) r.fail(e.line, fmt::format("unknown network kind '{}'", e.value));
    c.network.kind = e.value;
  });
  real("network.radius", c.network.radius, 0.0, kInf, true, true);
  seed("network.seed", c.network.seed);
  r.take("network.file", [&](const Entry& e) { c.network.file = e.value; });
  r.take("network.scaling", [&](const Entry& e) {
    if (e.value == "unit") {
      c.network.scaling = LaplacianScaling::kUnit;
    } else if (e.value == "max_degree") {
      c.network.scaling = LaplacianScaling::kMaxDegree;
    } else {
      r.fail(e.line, fmt::format("scaling must be unit or max_degree, got '{}'", e.value));
    }
  });

  real("params.alpha", c.params.alpha, 0.0, kInf, true, true);
  real("params.beta", c.params.beta, 0.0, kInf, false, true);
  real("params.rho", c.params.rho, 0.0, kInf, true, true);
  r.take("params.eta", [&](const Entry& e) {
    if (e.value == "random") {
      c.params.eta.reset();
      return;
    }
    const double v = r.number<double>(e, "eta");
    if (!(v > 0.0 && v < 1.0)) r.fail(e.line, fmt::format("'eta' must lie in (0, 1), got {}", v));
    c.params.eta = v;
  });

  int u_line = 0;
  r.take("noise.u", [&](const Entry& e) {
    u_line = e.line;
    const double v = r.number<double>(e, "u");
    if (!(v >= 0.0) || !std::isfinite(v)) r.fail(e.line, "'u' must be finite and >= 0");
    c.noise.u_e = c.noise.u_w = v;
  });
  if (u_line > 0 && (r.has("noise.u_e") || r.has("noise.u_w")))
    r.fail(u_line, "'u' cannot be combined with 'u_e' or 'u_w'");
  real("noise.u_e", c.noise.u_e, 0.0, kInf, false, true);
  real("noise.u_w", c.noise.u_w, 0.0, kInf, false, true);
  real("noise.rate", c.noise.rate, 0.0, 1.0, false, true);

  r.reject_leftovers();

  if (c.network.kind == "file" && c.network.file.empty())
    throw ConfigError(source, 0, "[network] kind = file requires 'file'");
  if (c.problem.kind == "quadratic" && c.problem.rank_deficit >= c.problem.dim)
    throw ConfigError(source, 0, "[problem] rank_deficit must be below dim");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  return parse_config(in, path);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "[run]\n";
  out << fmt::format("seed = {}\nrepeats = {}\n", c.seed, c.repeats);
  if (!c.seeds.empty()) out << fmt::format("seeds = {}\n", fmt::join(c.seeds, ", "));
  out << fmt::format("output = {}\n", c.output);
  if (!c.label.empty()) out << fmt::format("label = {}\n", c.label);
  out << fmt::format("iterations = {}\n", c.iterations);

  out << "\n[problem]\n";
  out << fmt::format("kind = {}\nnodes = {}\ndim = {}\n", c.problem.kind, c.problem.nodes,
                     c.problem.dim);
  if (c.problem.kind == "logistic") {
    out << fmt::format("samples = {}\nlambda = {}\nomega = {}\n", c.problem.samples,
                       c.problem.lambda, c.problem.omega);
  } else {
    out << fmt::format("rank_deficit = {}\n", c.problem.rank_deficit);
  }
  out << fmt::format("seed = {}\n", c.problem.seed);

  out << "\n[network]\n";
  out << fmt::format("kind = {}\n", c.network.kind);
  if (c.network.kind == "geometric")
    out << fmt::format("radius = {}\nseed = {}\n", c.network.radius, c.network.seed);
  if (c.network.kind == "file") out << fmt::format("file = {}\n", c.network.file);
  out << fmt::format("scaling = {}\n",
                     c.network.scaling == LaplacianScaling::kUnit ? "unit" : "max_degree");

  out << "\n[params]\n";
  out << fmt::format("alpha = {}\nbeta = {}\nrho = {}\n", c.params.alpha, c.params.beta,
                     c.params.rho);
  if (c.params.eta) {
    out << fmt::format("eta = {}\n", *c.params.eta);
  } else {
    out << "eta = random\n";
  }

  out << "\n[noise]\n";
  out << fmt::format("u_e = {}\nu_w = {}\nrate = {}\n", c.noise.u_e, c.noise.u_w,
                     c.noise.rate);

  out << "\n[trace]\n";
  out << fmt::format("stride = {}\nlyapunov = {}\nplot = {}\nc_theta = {}\ngamma = {}\n",
                     c.stride, c.lyapunov, c.plot, c.c_theta, c.gamma);
}

std::string config_hash(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  copy.output.clear();
  std::ostringstream text;
  write_config(text, copy);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace dpp2
