#include "dwarp/scenario.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace dwarp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct ManifoldBuilder {
  int line0 = 0;
  std::string name;
  int dim = -1;
  std::vector<std::string> coords;
  std::map<std::pair<int, int>, ScalarExpr> entries;
  std::map<std::string, Interval> bounds;
};

struct WarpBuilder {
  int line0 = 0;
  std::string name, factor1, factor2;
  std::optional<ScalarExpr> f1, f2;
};

struct ImmersionBuilder {
  int line0 = 0;
  std::string name, source, target;
  std::map<int, ScalarExpr> comps;
};

struct ScenarioBuilder {
  int line0 = 0;
  std::string name, phi1, phi2, ambient;
  std::optional<double> c;
  HypothesisTags tags;
  SampleSpec samples;
};

class ScenarioParser {
 public:
  ScenarioParser(const std::string& text, std::string label) : label_(std::move(label)) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines_.push_back(line);
  }

  ScenarioFile run() {
    for (line_no_ = 1; line_no_ <= static_cast<int>(lines_.size()); ++line_no_) {
      std::string line = lines_[line_no_ - 1];
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        handle_section(line);
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'");
      handle_entry(split_ws(trim(line.substr(0, eq))), trim(line.substr(eq + 1)));
    }
    finalize_section();
    return assemble();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ScenarioError(label_, line_no_, what);
  }
  [[noreturn]] void fail_at(int line, const std::string& what) const {
    throw ScenarioError(label_, line, what);
  }

  void handle_section(const std::string& line) {
    if (line.back() != ']') fail("unterminated section header");
    const std::vector<std::string> parts = split_ws(line.substr(1, line.size() - 2));
    finalize_section();
    if (parts.empty()) fail("empty section header");
    section_ = parts[0];
    if (section_ == "checks") {
      if (parts.size() != 1) fail("[checks] takes no name");
      in_checks_ = true;
      return;
    }
    in_checks_ = false;
    if (parts.size() != 2) fail("section header needs a name: [" + parts[0] + " NAME]");
    if (section_ == "manifold") {
      manifold_ = ManifoldBuilder{line_no_, parts[1], -1, {}, {}, {}};
    } else if (section_ == "warp") {
      warp_ = WarpBuilder{line_no_, parts[1], "", "", {}, {}};
    } else if (section_ == "immersion") {
      immersion_ = ImmersionBuilder{line_no_, parts[1], "", "", {}};
    } else if (section_ == "scenario") {
      if (scenario_) fail("only one [scenario] section is allowed");
      scenario_pending_ = ScenarioBuilder{};
      scenario_pending_->line0 = line_no_;
      scenario_pending_->name = parts[1];
    } else {
      fail("unknown section '" + section_ + "'");
    }
  }

  ScalarExpr parse_quoted(const std::string& value) {
    if (value.size() < 2 || value.front() != '"' || value.back() != '"')
      fail("expression values must be double-quoted");
    try {
      return parse(value.substr(1, value.size() - 2));
    } catch (const ParseError& e) {
      fail(std::string("bad expression: ") + e.what());
    }
  }

  double parse_number(const std::string& value) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) fail("trailing characters after number '" + value + "'");
      return v;
    } catch (const std::invalid_argument&) {
      fail("expected a number, got '" + value + "'");
    } catch (const std::out_of_range&) {
      fail("number out of range: '" + value + "'");
    }
  }

  int parse_int(const std::string& value) {
    const double v = parse_number(value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail("expected an integer, got '" + value + "'");
    return i;
  }

  void handle_entry(const std::vector<std::string>& key, const std::string& value) {
    if (key.empty()) fail("missing key");
    if (in_checks_) {
      if (key[0] != "check" || key.size() != 1) fail("[checks] entries are 'check = NAME [tol]'");
      const std::vector<std::string> parts = split_ws(value);
      if (parts.empty() || parts.size() > 2) fail("check entry needs a name and optional tolerance");
      CheckRequest req{parts[0], std::nullopt};
      if (parts.size() == 2) req.tol = parse_number(parts[1]);
      checks_.push_back(std::move(req));
      return;
    }
    if (manifold_) return manifold_entry(key, value);
    if (warp_) return warp_entry(key, value);
    if (immersion_) return immersion_entry(key, value);
    if (scenario_pending_) return scenario_entry(key, value);
    fail("entry outside any section");
  }

  void manifold_entry(const std::vector<std::string>& key, const std::string& value) {
    ManifoldBuilder& m = *manifold_;
    if (key[0] == "dim" && key.size() == 1) {
      m.dim = parse_int(value);
    } else if (key[0] == "coords" && key.size() == 1) {
      m.coords = split_ws(value);
    } else if (key[0] == "g" && key.size() == 3) {
      const int i = parse_int(key[1]), j = parse_int(key[2]);
      if (i < 1 || j < 1) fail("metric indices are 1-based");
      m.entries[{i - 1, j - 1}] = parse_quoted(value);
    } else if (key[0] == "bound" && key.size() == 2) {
      std::string v = trim(value);
      if (v.size() < 2 || v.front() != '(' || v.back() != ')')
        fail("bounds look like (lo, hi)");
      v = v.substr(1, v.size() - 2);
      const std::size_t comma = v.find(',');
      if (comma == std::string::npos) fail("bounds look like (lo, hi)");
      m.bounds[key[1]] =
          Interval{parse_number(trim(v.substr(0, comma))), parse_number(trim(v.substr(comma + 1)))};
    } else {
      fail("unknown manifold entry '" + key[0] + "'");
    }
  }

  void warp_entry(const std::vector<std::string>& key, const std::string& value) {
    WarpBuilder& w = *warp_;
    if (key.size() != 1) fail("unknown warp entry");
    if (key[0] == "factor1") w.factor1 = value;
    else if (key[0] == "factor2") w.factor2 = value;
    else if (key[0] == "f1") w.f1 = parse_quoted(value);
    else if (key[0] == "f2") w.f2 = parse_quoted(value);
    else fail("unknown warp entry '" + key[0] + "'");
  }

  void immersion_entry(const std::vector<std::string>& key, const std::string& value) {
    ImmersionBuilder& im = *immersion_;
    if (key[0] == "source" && key.size() == 1) im.source = value;
    else if (key[0] == "target" && key.size() == 1) im.target = value;
    else if (key[0] == "comp" && key.size() == 2) {
      const int k = parse_int(key[1]);
      if (k < 1) fail("component indices are 1-based");
      im.comps[k - 1] = parse_quoted(value);
    } else {
      fail("unknown immersion entry '" + key[0] + "'");
    }
  }

  void scenario_entry(const std::vector<std::string>& key, const std::string& value) {
    ScenarioBuilder& s = *scenario_pending_;
    if (key.size() != 1) fail("unknown scenario entry");
    if (key[0] == "phi1") s.phi1 = value;
    else if (key[0] == "phi2") s.phi2 = value;
    else if (key[0] == "ambient") s.ambient = value;
    else if (key[0] == "c") s.c = parse_number(value);
    else if (key[0] == "margin") s.samples.margin = parse_number(value);
    else if (key[0] == "samples") {
      const std::vector<std::string> parts = split_ws(value);
      if (parts.size() != 2 || (parts[0] != "random" && parts[0] != "grid"))
        fail("samples = random N | grid N");
      s.samples.kind = parts[0] == "random" ? SampleSpec::Kind::kRandom : SampleSpec::Kind::kGrid;
      s.samples.count = parse_int(parts[1]);
      if (s.samples.count < 1) fail("sample count must be positive");
    } else if (key[0] == "hypothesis") {
      const std::vector<std::string> parts = split_ws(value);
      if (parts.empty()) fail("empty hypothesis");
      if (parts[0] == "harmonic" && parts.size() == 1) s.tags.harmonic = true;
      else if (parts[0] == "minimal" && parts.size() == 1) s.tags.minimal = true;
      else if (parts[0] == "eigenfunction" && parts.size() == 3)
        s.tags.eigen = std::array<double, 2>{parse_number(parts[1]), parse_number(parts[2])};
      else fail("hypothesis = harmonic | minimal | eigenfunction L1 L2");
    } else {
      fail("unknown scenario entry '" + key[0] + "'");
    }
  }

  void finalize_section() {
    if (manifold_) finalize_manifold();
    if (warp_) finalize_warp();
    if (immersion_) finalize_immersion();
    if (scenario_pending_) {
      scenario_ = std::move(scenario_pending_);
      scenario_pending_.reset();
    }
  }

  void finalize_manifold() {
    ManifoldBuilder m = std::move(*manifold_);
    manifold_.reset();
    if (m.dim <= 0) fail_at(m.line0, "manifold '" + m.name + "': dim missing or not positive");
    if (static_cast<int>(m.coords.size()) != m.dim)
      fail_at(m.line0, "manifold '" + m.name + "': coords count does not match dim");
    std::vector<Interval> domain;
    for (const std::string& c : m.coords) {
      auto it = m.bounds.find(c);
      if (it == m.bounds.end())
        fail_at(m.line0, "manifold '" + m.name + "': missing bound for coordinate '" + c + "'");
      domain.push_back(it->second);
    }
    std::vector<std::vector<ScalarExpr>> g(m.dim, std::vector<ScalarExpr>(m.dim, ScalarExpr(0.0)));
    for (int i = 0; i < m.dim; ++i) {
      if (!m.entries.count({i, i}))
        fail_at(m.line0, "manifold '" + m.name + "': missing diagonal metric entry g " +
                             std::to_string(i + 1) + " " + std::to_string(i + 1));
    }
    for (const auto& [ij, e] : m.entries) {
      if (ij.first >= m.dim || ij.second >= m.dim)
        fail_at(m.line0, "manifold '" + m.name + "': metric index out of range");
      g[ij.first][ij.second] = e;
      if (!m.entries.count({ij.second, ij.first})) g[ij.second][ij.first] = e;
    }
    try {
      manifolds_[m.name] = ChartedManifold::create(m.name, m.coords, g, domain);
    } catch (const Error& e) {
      fail_at(m.line0, e.what());
    }
  }

  void finalize_warp() {
    WarpBuilder w = std::move(*warp_);
    warp_.reset();
    if (!w.f1 || !w.f2) fail_at(w.line0, "warp '" + w.name + "': f1 and f2 are required");
    const ChartPtr factor1 = lookup_manifold(w.factor1, w.line0);
    const ChartPtr factor2 = lookup_manifold(w.factor2, w.line0);
    try {
      warps_.emplace(w.name, build_dwp(factor1, factor2, *w.f1, *w.f2));
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      fail_at(w.line0, std::string("warp '") + w.name + "': " + e.what());
    }
  }

  void finalize_immersion() {
    ImmersionBuilder im = std::move(*immersion_);
    immersion_.reset();
    const ChartPtr target = lookup_manifold(im.target, im.line0);
    const ChartPtr source = lookup_manifold(im.source, im.line0);
    std::vector<ScalarExpr> comps;
    for (int k = 0; k < target->dim(); ++k) {
      auto it = im.comps.find(k);
      if (it == im.comps.end())
        fail_at(im.line0, "immersion '" + im.name + "': missing comp " + std::to_string(k + 1));
      comps.push_back(it->second);
    }
    try {
      immersions_.emplace(im.name, ImmersionSpec::create(source, target, std::move(comps)));
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      fail_at(im.line0, std::string("immersion '") + im.name + "': " + e.what());
    }
  }

  ChartPtr lookup_manifold(const std::string& name, int line) {
    if (name.empty()) fail_at(line, "missing manifold reference");
    auto it = manifolds_.find(name);
    if (it == manifolds_.end()) fail_at(line, "undeclared manifold '" + name + "'");
    return it->second;
  }

  ScenarioFile assemble() {
    if (!scenario_) throw ScenarioError(label_, 1, "no [scenario] section");
    if (checks_.empty()) throw ScenarioError(label_, 1, "no [checks] section with entries");
    const ScenarioBuilder& sb = *scenario_;
    auto phi1_it = immersions_.find(sb.phi1);
    if (phi1_it == immersions_.end())
      fail_at(sb.line0, "undeclared immersion '" + sb.phi1 + "'");
    auto phi2_it = immersions_.find(sb.phi2);
    if (phi2_it == immersions_.end())
      fail_at(sb.line0, "undeclared immersion '" + sb.phi2 + "'");
    auto warp_it = warps_.find(sb.ambient);
    if (warp_it == warps_.end()) fail_at(sb.line0, "undeclared warp '" + sb.ambient + "'");
    ScenarioFile out;
    out.name = sb.name;
    out.source = label_;
    try {
      out.scenario = compose_scenario(phi1_it->second, phi2_it->second, warp_it->second,
                                      sb.c, /*validate=*/false);
    } catch (const Error& e) {
      fail_at(sb.line0, e.what());
    }
    out.hypothesis = sb.tags;
    out.samples = sb.samples;
    out.checks = checks_;
    return out;
  }

  std::string label_;
  std::vector<std::string> lines_;
  int line_no_ = 0;
  std::string section_;
  bool in_checks_ = false;
  std::optional<ManifoldBuilder> manifold_;
  std::optional<WarpBuilder> warp_;
  std::optional<ImmersionBuilder> immersion_;
  std::optional<ScenarioBuilder> scenario_pending_, scenario_;
  std::map<std::string, ChartPtr> manifolds_;
  std::map<std::string, DoublyWarpedProduct> warps_;
  std::map<std::string, ImmersionSpec> immersions_;
  std::vector<CheckRequest> checks_;
};

}  // namespace

ScenarioFile load_scenario_text(const std::string& text, const std::string& label) {
  return ScenarioParser(text, label).run();
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str(), path);
}

}  // namespace dwarp
