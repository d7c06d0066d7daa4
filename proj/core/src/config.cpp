#include "asp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace asp {

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line, const std::string& key) {
  double out = 0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  if (!v.empty() && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e) fail(line, "'" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& v, int line, const std::string& key) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) fail(line, "'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(line, "'" + key + "' expects true or false, got '" + v + "'");
}

const std::map<std::string, std::set<std::string>>& model_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"hubbard_chain", {"sites", "j", "U", "mu", "periodic", "n_up", "n_down", "initial", "hf", "residual_constant"}},
      {"trimer", {"j", "j13", "U", "U1", "U3", "dU", "initial", "hf", "residual_constant"}},
      {"four_site", {"j", "delta", "U", "dU", "initial", "hf", "residual_constant"}},
      {"tensor", {"modes", "particles", "n_up", "n_down", "constant", "initial", "residual_constant"}},
  };
  return keys;
}

struct Entry {
  std::string value;
  int line;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> keys;
  std::vector<std::pair<std::vector<std::string>, int>> tensor_lines;
};

void apply_model(const Section& sec, ModelConfig& m) {
  auto kind = sec.keys.find("model");
  if (kind == sec.keys.end()) fail(sec.line, "[model] needs a 'model' key");
  m.kind = kind->second.value;
  auto allowed = model_keys().find(m.kind);
  if (allowed == model_keys().end())
    fail(kind->second.line, "unknown model '" + m.kind + "' (hubbard_chain, trimer, four_site, tensor)");
  if (m.kind == "trimer" || m.kind == "four_site") m.dU = 1e-6;
  if (m.kind == "four_site") m.hf = "lowest_orbitals";
  bool spin_given = false;
  for (const auto& [key, e] : sec.keys) {
    if (key == "model") continue;
    if (!allowed->second.count(key)) fail(e.line, "unknown key '" + key + "' for model " + m.kind);
    const std::string& v = e.value;
    if (key == "j") m.j = to_double(v, e.line, key);
    else if (key == "j13") m.j13 = to_double(v, e.line, key);
    else if (key == "U") m.U = to_double(v, e.line, key);
    else if (key == "U1") m.U1 = to_double(v, e.line, key);
    else if (key == "U3") m.U3 = to_double(v, e.line, key);
    else if (key == "dU") m.dU = to_double(v, e.line, key);
    else if (key == "delta") m.delta = to_double(v, e.line, key);
    else if (key == "mu") m.mu = to_double(v, e.line, key);
    else if (key == "constant") m.constant = to_double(v, e.line, key);
    else if (key == "sites") m.sites = static_cast<int>(to_int(v, e.line, key));
    else if (key == "modes") m.modes = static_cast<int>(to_int(v, e.line, key));
    else if (key == "particles") m.particles = static_cast<int>(to_int(v, e.line, key));
    else if (key == "n_up") m.n_up = static_cast<int>(to_int(v, e.line, key)), spin_given = true;
    else if (key == "n_down") m.n_down = static_cast<int>(to_int(v, e.line, key)), spin_given = true;
    else if (key == "periodic") m.periodic = to_bool(v, e.line, key);
    else if (key == "hf") {
      if (v != "best" && v != "symmetric" && v != "antisymmetric" && v != "lowest_orbitals")
        fail(e.line, "hf must be best, symmetric, antisymmetric or lowest_orbitals");
      m.hf = v;
    } else if (key == "initial") {
      if (v != "hartree_fock" && v != "one_body") fail(e.line, "initial must be hartree_fock or one_body");
      m.initial = v;
    } else if (key == "residual_constant") {
      if (v == "spread") m.policy = ConstantPolicy::spread;
      else if (v == "drop") m.policy = ConstantPolicy::drop;
      else fail(e.line, "residual_constant must be spread or drop");
    }
  }
  if (m.kind == "tensor") {
    if (m.modes <= 0) fail(sec.line, "tensor model needs 'modes'");
    if (spin_given) {
      if (m.modes % 2) fail(sec.line, "spin occupations need an even mode count");
      m.sites = m.modes / 2;
      m.particles = m.n_up + m.n_down;
    } else {
      m.n_up = m.n_down = -1;
    }
  }
  for (const auto& [tok, line] : sec.tensor_lines) {
    if (m.kind != "tensor") fail(line, "tensor lines are only allowed for model = tensor");
    auto idx = [&](std::size_t i) {
      const long long x = to_int(tok[i], line, tok[0] + " index");
      if (x < 0 || x >= m.modes) fail(line, "index " + tok[i] + " outside [0, modes)");
      return static_cast<int>(x);
    };
    if (tok[0] == "h") {
      if (tok.size() != 4) fail(line, "expected 'h P Q value'");
      m.h_entries.push_back({{idx(1), idx(2)}, to_double(tok[3], line, "h value")});
    } else {
      if (tok.size() != 6) fail(line, "expected 'g P Q R S value'");
      m.g_entries.push_back({{idx(1), idx(2), idx(3), idx(4)}, to_double(tok[5], line, "g value")});
    }
  }
}

void apply_path(const Section& sec, PathConfig& p) {
  for (const auto& [key, e] : sec.keys) {
    if (key == "kind") {
      if (e.value != "direct" && e.value != "stepwise") fail(e.line, "path kind must be direct or stepwise");
      p.kind = e.value;
    } else if (key == "stages") p.stages = e.value;
    else if (key == "endpoint_flat") p.endpoint_flat = to_bool(e.value, e.line, key);
    else if (key == "grid") {
      p.grid = static_cast<int>(to_int(e.value, e.line, key));
      if (p.grid < 2) fail(e.line, "grid needs at least two points");
    } else fail(e.line, "unknown key '" + key + "' in [path]");
  }
  if (p.kind == "stepwise" && p.stages.empty()) fail(sec.line, "stepwise path needs 'stages'");
}

void apply_analysis(const Section& sec, Analysis& a) {
  auto num = [&](const std::string& key, const Entry& e) { return to_double(e.value, e.line, key); };
  auto integer = [&](const std::string& key, const Entry& e) {
    const long long v = to_int(e.value, e.line, key);
    if (v < 0) fail(e.line, "'" + key + "' must be non-negative");
    return static_cast<int>(v);
  };
  for (const auto& [key, e] : sec.keys) {
    bool ok = true;
    std::visit(
        [&](auto& an) {
          using T = std::decay_t<decltype(an)>;
          if constexpr (std::is_same_v<T, GapAnalysis>) {
            if (key == "track") an.track = integer(key, e);
            else ok = false;
          } else if constexpr (std::is_same_v<T, EvolveAnalysis>) {
            if (key == "T") an.T = num(key, e);
            else if (key == "steps") an.steps = integer(key, e);
            else if (key == "sample_every") an.sample_every = integer(key, e);
            else ok = false;
          } else if constexpr (std::is_same_v<T, NumeratorAnalysis>) {
            if (key == "points") an.points = integer(key, e);
            else ok = false;
          } else if constexpr (std::is_same_v<T, JansenAnalysis>) {
            if (key == "delta") an.delta = num(key, e);
            else if (key == "points") an.points = integer(key, e);
            else ok = false;
          } else if constexpr (std::is_same_v<T, BoundsAnalysis>) {
            if (key == "L_min") an.L_min = integer(key, e);
            else if (key == "L_max") an.L_max = integer(key, e);
            else if (key == "N_min") an.N_min = integer(key, e);
            else if (key == "N_max") an.N_max = integer(key, e);
            else if (key == "samples") an.samples = integer(key, e);
            else ok = false;
          } else {
            ok = false;
          }
        },
        a);
    if (!ok) fail(e.line, "unknown key '" + key + "' in [" + analysis_name(a) + "]");
  }
}

}  // namespace

std::string analysis_name(const Analysis& a) {
  static const char* names[] = {"gap", "evolve", "numerator", "jansen", "bounds", "decompose"};
  return names[a.index()];
}

std::optional<Analysis> analysis_from_name(const std::string& n) {
  if (n == "gap") return GapAnalysis{};
  if (n == "evolve") return EvolveAnalysis{};
  if (n == "numerator") return NumeratorAnalysis{};
  if (n == "jansen") return JansenAnalysis{};
  if (n == "bounds") return BoundsAnalysis{};
  if (n == "decompose") return DecomposeAnalysis{};
  return std::nullopt;
}

ExperimentConfig parse_config(const std::string& text, bool require_analysis) {
  std::map<std::string, Section> sections;
  std::vector<std::string> order;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known{"model", "path", "gap", "evolve", "numerator",
                                               "jansen", "bounds", "decompose", "output"};
      if (!known.count(current)) fail(line, "unknown block [" + current + "]");
      if (sections.count(current)) fail(line, "duplicate block [" + current + "]");
      sections[current].line = line;
      order.push_back(current);
      continue;
    }
    if (current.empty()) fail(line, "entry outside any block");
    Section& sec = sections[current];
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::istringstream ts(s);
      std::vector<std::string> tok;
      for (std::string t; ts >> t;) tok.push_back(t);
      if (current == "model" && (tok[0] == "h" || tok[0] == "g")) {
        sec.tensor_lines.push_back({tok, line});
        continue;
      }
      fail(line, "expected 'key = value'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "missing key before '='");
    if (sec.keys.count(key)) fail(line, "duplicate key '" + key + "'");
    sec.keys[key] = {value, line};
  }

  ExperimentConfig cfg;
  std::vector<std::string> analyses;
  for (const auto& name : order)
    if (analysis_from_name(name)) analyses.push_back(name);
  if (analyses.size() > 1)
    throw ConfigError("only one analysis block allowed, found [" + analyses[0] + "] and [" + analyses[1] + "]");
  if (analyses.empty() && require_analysis)
    throw ConfigError("missing analysis block ([gap], [evolve], [numerator], [jansen], [bounds] or [decompose])");
  if (!analyses.empty()) {
    cfg.analysis = analysis_from_name(analyses[0]);
    apply_analysis(sections[analyses[0]], *cfg.analysis);
  }
  const bool needs_model = !cfg.analysis || !std::holds_alternative<BoundsAnalysis>(*cfg.analysis);
  if (sections.count("model")) {
    cfg.model.emplace();
    apply_model(sections["model"], *cfg.model);
  } else if (needs_model) {
    throw ConfigError("missing [model] block");
  }
  if (sections.count("path")) {
    cfg.path.emplace();
    apply_path(sections["path"], *cfg.path);
  }
  if (sections.count("output")) {
    for (const auto& [key, e] : sections["output"].keys) {
      if (key == "prefix") cfg.prefix = e.value;
      else if (key == "seed") {
        const long long v = to_int(e.value, e.line, key);
        if (v < 0) fail(e.line, "seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(v);
      } else fail(e.line, "unknown key '" + key + "' in [output]");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, bool require_analysis) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), require_analysis);
}

}  // namespace asp
