/*
   Copyright 2026 The locdep Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "locdep_cli/spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "locdep/error.hpp"

namespace locdep::cli {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw SpecError(path.empty() ? "/" : path, "expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw SpecError(child(path, k), "unknown field");
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw SpecError(path, "expected a number");
  return j.get<double>();
}

std::uint64_t uint(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw SpecError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) throw SpecError(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw SpecError(path, "expected true or false");
  return j.get<bool>();
}

template <class F>
auto list(const json& j, const std::string& path, F item) {
  if (!j.is_array()) throw SpecError(path, "expected an array");
  std::vector<decltype(item(j, path))> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], child(path, i)));
  return out;
}

std::string one_of(const json& j, const std::string& path, std::initializer_list<const char*> options) {
  const std::string s = str(j, path);
  for (const char* o : options)
    if (s == o) return s;
  std::string all;
  for (const char* o : options) all += std::string(all.empty() ? "" : " | ") + o;
  throw SpecError(path, "'" + s + "' is not one of " + all);
}

SourceDist parse_dist(const json& j, const std::string& path) {
  allow_keys(j, path, {"kind", "p", "mean", "sd", "lo", "hi", "values", "probs"});
  if (!j.contains("kind")) throw SpecError(child(path, "kind"), "missing");
  const std::string kind =
      one_of(j["kind"], child(path, "kind"), {"rademacher", "bernoulli", "normal", "uniform", "discrete"});
  try {
    if (kind == "rademacher") return rademacher();
    if (kind == "bernoulli") return bernoulli(j.contains("p") ? num(j["p"], child(path, "p")) : 0.5);
    if (kind == "normal")
      return NormalDist{j.contains("mean") ? num(j["mean"], child(path, "mean")) : 0.0,
                        j.contains("sd") ? num(j["sd"], child(path, "sd")) : 1.0};
    if (kind == "uniform")
      return UniformDist{j.contains("lo") ? num(j["lo"], child(path, "lo")) : 0.0,
                         j.contains("hi") ? num(j["hi"], child(path, "hi")) : 1.0};
    if (!j.contains("values") || !j.contains("probs")) throw SpecError(path, "discrete needs values and probs");
    return DiscreteDist(list(j["values"], child(path, "values"), num), list(j["probs"], child(path, "probs"), num));
  } catch (const Error& e) {
    throw SpecError(path, e.what());
  }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> parse_edges(const json& j, const std::string& path) {
  return list(j, path, [](const json& e, const std::string& p) {
    if (!e.is_array() || e.size() != 2) throw SpecError(p, "edge must be [u, v]");
    const auto u = uint(e[0], child(p, 0)), v = uint(e[1], child(p, 1));
    if (u < 1 || v < 1 || u == v) throw SpecError(p, "edge endpoints are distinct 1-based vertices");
    return std::make_pair(static_cast<std::uint32_t>(u - 1), static_cast<std::uint32_t>(v - 1));
  });
}

GapConstraint parse_gaps(const json& j, const std::string& path) {
  return list(j, path, [](const json& g, const std::string& p) -> std::optional<std::size_t> {
    if (g.is_null() || (g.is_string() && g.get<std::string>() == "inf")) return std::nullopt;
    const auto v = uint(g, p);
    if (v < 1) throw SpecError(p, "finite gaps are >= 1");
    return static_cast<std::size_t>(v);
  });
}

void parse_pattern(FamilySpec& f, const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string name = one_of(j, path, {"edge", "triangle", "path3", "square", "star3"});
    if (name == "edge") f.pattern_vertices = 2, f.pattern_edges = {{0, 1}};
    if (name == "triangle") f.pattern_vertices = 3, f.pattern_edges = {{0, 1}, {1, 2}, {0, 2}};
    if (name == "path3") f.pattern_vertices = 3, f.pattern_edges = {{0, 1}, {1, 2}};
    if (name == "square") f.pattern_vertices = 4, f.pattern_edges = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
    if (name == "star3") f.pattern_vertices = 4, f.pattern_edges = {{0, 1}, {0, 2}, {0, 3}};
    return;
  }
  allow_keys(j, path, {"vertices", "edges"});
  if (!j.contains("vertices") || !j.contains("edges")) throw SpecError(path, "pattern needs vertices and edges");
  f.pattern_vertices = static_cast<std::uint32_t>(uint(j["vertices"], child(path, "vertices")));
  f.pattern_edges = parse_edges(j["edges"], child(path, "edges"));
  for (const auto& [u, v] : f.pattern_edges)
    if (u >= f.pattern_vertices || v >= f.pattern_vertices) throw SpecError(path, "pattern edge outside its vertices");
}

FamilySpec parse_family(const std::string& family, const json& params, const std::string& path) {
  FamilySpec f;
  f.family = family;
  if (params.is_null()) return f;
  auto get = [&](const char* key) -> const json* { return params.contains(key) ? &params[key] : nullptr; };
  auto at = [&](const char* key) { return child(path, key); };
  if (family == "iid") {
    allow_keys(params, path, {"source"});
  } else if (family == "m_dependent") {
    allow_keys(params, path, {"source", "m", "window"});
    if (auto* v = get("m")) f.m = uint(*v, at("m"));
    if (auto* v = get("window")) f.window = one_of(*v, at("window"), {"sum", "product"});
  } else if (family == "graph") {
    allow_keys(params, path, {"source", "graph", "edges"});
    if (auto* v = get("graph")) f.graph_kind = one_of(*v, at("graph"), {"cycle", "path", "complete", "star", "edges"});
    if (auto* v = get("edges")) f.edges = parse_edges(*v, at("edges"));
    if (f.graph_kind == "edges" && f.edges.empty()) throw SpecError(at("edges"), "graph 'edges' needs an edge list");
  } else if (family == "ustat") {
    allow_keys(params, path, {"source", "m", "blocks", "block_sizes", "kernel"});
    f.m = 2;
    if (auto* v = get("m")) f.m = uint(*v, at("m"));
    if (auto* v = get("blocks")) f.blocks = uint(*v, at("blocks"));
    if (auto* v = get("block_sizes"))
      f.block_sizes = list(*v, at("block_sizes"), [](const json& x, const std::string& p) {
        return static_cast<std::size_t>(uint(x, p));
      });
    f.kernel = "mean";
    if (auto* v = get("kernel")) f.kernel = one_of(*v, at("kernel"), {"product", "mean", "abs_diff", "max", "sum_product"});
    if (f.m < 1) throw SpecError(at("m"), "kernel degree must be >= 1");
    if (f.blocks < 1) throw SpecError(at("blocks"), "need at least one block");
  } else if (family == "constrained_ustat") {
    allow_keys(params, path, {"sequence", "word", "letter_probs", "pattern", "gaps", "exact_gaps"});
    if (auto* v = get("sequence")) f.sequence_kind = one_of(*v, at("sequence"), {"word", "pattern"});
    if (auto* v = get("word"))
      f.word = list(*v, at("word"), [](const json& x, const std::string& p) { return static_cast<int>(uint(x, p)); });
    if (auto* v = get("letter_probs")) f.letter_probs = list(*v, at("letter_probs"), num);
    if (auto* v = get("pattern"))
      f.pattern = list(*v, at("pattern"), [](const json& x, const std::string& p) { return static_cast<int>(uint(x, p)); });
    if (auto* v = get("gaps")) f.gaps = parse_gaps(*v, at("gaps"));
    if (auto* v = get("exact_gaps")) f.exact_gaps = boolean(*v, at("exact_gaps"));
    const std::size_t l = f.sequence_kind == "word" ? f.word.size() : f.pattern.size();
    if (l == 0) throw SpecError(at(f.sequence_kind.c_str()), "must be nonempty");
    if (f.gaps.empty()) f.gaps.assign(l - 1, std::nullopt);
    if (f.gaps.size() + 1 != l) throw SpecError(at("gaps"), "need one gap per adjacent pair");
    if (f.sequence_kind == "word" && f.letter_probs.empty()) throw SpecError(at("letter_probs"), "missing");
  } else if (family == "decorated_graph") {
    allow_keys(params, path, {"pattern", "p"});
    if (auto* v = get("pattern")) parse_pattern(f, *v, at("pattern"));
    if (auto* v = get("p")) f.p = num(*v, at("p"));
    if (!(f.p > 0.0 && f.p < 1.0)) throw SpecError(at("p"), "edge probability must lie in (0, 1)");
  }
  if (auto* v = get("source")) f.source = parse_dist(*v, at("source"));
  return f;
}

XiFunction parse_xi(const json& j, const std::string& path, const IndexSet& a) {
  allow_keys(j, path, {"kind", "value", "index", "clip"});
  const std::string kind =
      one_of(j.value("kind", json("constant")), child(path, "kind"), {"constant", "abs", "square", "abs_product", "clipped_exp"});
  XiFunction xi;
  Index index = a.empty() ? 0 : a.front();
  if (j.contains("index")) {
    const auto k = uint(j["index"], child(path, "index"));
    if (k < 1 || !contains(a, static_cast<Index>(k - 1))) throw SpecError(child(path, "index"), "must be an element of A");
    index = static_cast<Index>(k - 1);
  }
  if (kind == "constant") return xi_constant(j.contains("value") ? num(j["value"], child(path, "value")) : 1.0);
  if (kind == "abs") return {XiFunction::Kind::Abs, 1.0, index};
  if (kind == "square") return {XiFunction::Kind::Square, 1.0, index};
  if (kind == "abs_product") return {XiFunction::Kind::AbsProduct, 1.0, index};
  return {XiFunction::Kind::ClippedExp, j.contains("clip") ? num(j["clip"], child(path, "clip")) : 2.0, index};
}

IndexSet parse_set(const json& j, const std::string& path) {
  auto raw = list(j, path, [](const json& x, const std::string& p) {
    const auto k = uint(x, p);
    if (k < 1) throw SpecError(p, "indices are 1-based");
    return static_cast<Index>(k - 1);
  });
  if (raw.empty()) throw SpecError(path, "must be nonempty");
  return make_index_set(std::move(raw));
}

CheckerSpec parse_checkers(const json& j, const std::string& path) {
  allow_keys(j, path, {"suite", "instances", "max_n", "A", "B", "a", "b", "c", "xi", "p", "ld_check"});
  CheckerSpec c;
  c.enabled = true;
  if (j.contains("suite")) c.suite = one_of(j["suite"], child(path, "suite"), {"random", "field"});
  if (j.contains("instances")) c.instances = uint(j["instances"], child(path, "instances"));
  if (j.contains("max_n")) c.max_n = uint(j["max_n"], child(path, "max_n"));
  if (c.max_n < 2) throw SpecError(child(path, "max_n"), "must be >= 2");
  if (j.contains("A")) c.a = parse_set(j["A"], child(path, "A"));
  if (j.contains("B")) c.b_set = parse_set(j["B"], child(path, "B"));
  if (j.contains("a")) c.lo = num(j["a"], child(path, "a"));
  if (j.contains("b")) c.hi = num(j["b"], child(path, "b"));
  if (j.contains("c")) c.c = num(j["c"], child(path, "c"));
  if (j.contains("p")) c.p = num(j["p"], child(path, "p"));
  if (j.contains("ld_check")) c.ld_check = boolean(j["ld_check"], child(path, "ld_check"));
  if (j.contains("xi")) c.xi = parse_xi(j["xi"], child(path, "xi"), c.a);
  if (c.lo > c.hi) throw SpecError(child(path, "b"), "need a <= b");
  if (c.c < 1.0) throw SpecError(child(path, "c"), "need c >= 1");
  if (c.p < 0.0) throw SpecError(child(path, "p"), "need p >= 0");
  return c;
}

Assertions parse_assertions(const json& j, const std::string& path) {
  allow_keys(j, path, {"ks_max", "slope_range", "ratio_spread_max", "reject_fraction_max", "ks_decreasing"});
  Assertions a;
  if (j.contains("ks_max")) a.ks_max = num(j["ks_max"], child(path, "ks_max"));
  if (j.contains("slope_range")) {
    const auto r = list(j["slope_range"], child(path, "slope_range"), num);
    if (r.size() != 2 || r[0] > r[1]) throw SpecError(child(path, "slope_range"), "expected [lo, hi]");
    a.slope_range = std::make_pair(r[0], r[1]);
  }
  if (j.contains("ratio_spread_max")) a.ratio_spread_max = num(j["ratio_spread_max"], child(path, "ratio_spread_max"));
  if (j.contains("reject_fraction_max"))
    a.reject_fraction_max = num(j["reject_fraction_max"], child(path, "reject_fraction_max"));
  if (j.contains("ks_decreasing")) a.ks_decreasing = boolean(j["ks_decreasing"], child(path, "ks_decreasing"));
  return a;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n')
      ++line, col = 1;
    else
      ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

bool bound_fits_family(const std::string& bound, const std::string& family) {
  if (bound == "main" || bound == "self_normalized" || bound == "general_beta" || bound == "graph" ||
      bound == "graph_self_normalized")
    return true;
  if (bound == "distributed_u" || bound == "distributed_general") return family == "ustat";
  if (bound == "constrained_u" || bound == "constrained_u_self_normalized") return family == "constrained_ustat";
  if (bound == "decorated" || bound == "decorated_self_normalized") return family == "decorated_graph";
  return false;
}

std::vector<std::string> default_bounds(const std::string& family) {
  if (family == "graph") return {"graph", "graph_self_normalized", "main"};
  if (family == "ustat") return {"distributed_u", "main"};
  if (family == "constrained_ustat") return {"constrained_u", "constrained_u_self_normalized"};
  if (family == "decorated_graph") return {"decorated", "decorated_self_normalized"};
  return {"main", "self_normalized"};
}

SourceDist parse_dist_text(const std::string& json_text) {
  return parse_dist(json::parse(json_text, nullptr, true, true), "");
}

ExperimentSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw SpecError(line_col(text, e.byte), "invalid JSON");
  }
  allow_keys(j, "", {"family", "params", "grid", "statistic", "mode", "replications", "seed", "bounds", "ratio_bound",
                     "checkers", "neighborhoods", "assertions", "output", "threads", "cap", "description"});
  ExperimentSpec s;
  s.text = text;
  if (!j.contains("family")) throw SpecError("/family", "missing");
  const std::string family = one_of(j["family"], "/family",
                                    {"iid", "m_dependent", "graph", "ustat", "constrained_ustat", "decorated_graph"});
  s.family = parse_family(family, j.value("params", json()), "/params");
  if (!j.contains("grid")) throw SpecError("/grid", "missing");
  s.grid = list(j["grid"], "/grid", [](const json& x, const std::string& p) {
    const auto n = uint(x, p);
    if (n < 1) throw SpecError(p, "grid sizes are >= 1");
    return static_cast<std::size_t>(n);
  });
  if (s.grid.empty()) throw SpecError("/grid", "must be nonempty");
  if (!j.contains("seed")) throw SpecError("/seed", "missing");
  s.seed = uint(j["seed"], "/seed");
  if (j.contains("statistic")) {
    const std::string st = one_of(j["statistic"], "/statistic", {"w1", "w2", "w2bar"});
    s.statistic = parse_statistic(st);
  }
  if (j.contains("mode")) s.mode = one_of(j["mode"], "/mode", {"exact", "mc"}) == "exact" ? Mode::Exact : Mode::MonteCarlo;
  if (j.contains("replications")) s.replications = uint(j["replications"], "/replications");
  if (s.mode == Mode::MonteCarlo && s.replications < 1000) throw SpecError("/replications", "mc mode needs R >= 1000");
  if (j.contains("bounds"))
    s.bounds = list(j["bounds"], "/bounds", [](const json& x, const std::string& p) {
      return one_of(x, p, {"main", "self_normalized", "general_beta", "graph", "graph_self_normalized", "distributed_u",
                           "distributed_general", "constrained_u", "constrained_u_self_normalized", "decorated",
                           "decorated_self_normalized"});
    });
  for (std::size_t k = 0; k < s.bounds.size(); ++k)
    if (!bound_fits_family(s.bounds[k], family))
      throw SpecError("/bounds/" + std::to_string(k), "'" + s.bounds[k] + "' does not apply to family " + family);
  if (j.contains("ratio_bound")) {
    s.ratio_bound = str(j["ratio_bound"], "/ratio_bound");
    if (!bound_fits_family(s.ratio_bound, family))
      throw SpecError("/ratio_bound", "'" + s.ratio_bound + "' does not apply to family " + family);
  }
  if (s.bounds.empty()) s.bounds = default_bounds(family);
  if (s.ratio_bound.empty()) s.ratio_bound = s.bounds.front();
  if (j.contains("checkers")) s.checkers = parse_checkers(j["checkers"], "/checkers");
  if (j.contains("neighborhoods")) {
    try {
      s.declared = neighborhood_from_json(j["neighborhoods"].dump());
    } catch (const Error& e) {
      throw SpecError("/neighborhoods", e.what());
    }
  }
  if (j.contains("assertions")) s.assertions = parse_assertions(j["assertions"], "/assertions");
  if (j.contains("output")) s.output = str(j["output"], "/output");
  if (j.contains("threads")) s.threads = static_cast<unsigned>(uint(j["threads"], "/threads"));
  if (j.contains("cap")) s.cap = uint(j["cap"], "/cap");
  return s;
}

Kernel kernel_by_name(const std::string& name) {
  if (name == "product")
    return [](std::span<const double> x) {
      double v = 1.0;
      for (double t : x) v *= t;
      return v;
    };
  if (name == "mean")
    return [](std::span<const double> x) {
      double v = 0.0;
      for (double t : x) v += t;
      return v / static_cast<double>(x.size());
    };
  if (name == "abs_diff") return [](std::span<const double> x) { return std::abs(x[0] - x[x.size() - 1]); };
  if (name == "max") return [](std::span<const double> x) { return *std::max_element(x.begin(), x.end()); };
  if (name == "sum_product")
    return [](std::span<const double> x) {
      double s = 0.0, p = 1.0;
      for (double t : x) s += t, p *= t;
      return s + p;
    };
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + name + "'");
}

SimpleGraph pattern_graph(const FamilySpec& f) { return SimpleGraph(f.pattern_vertices, f.pattern_edges); }

SimpleGraph named_pattern_graph(const std::string& name) {
  FamilySpec f;
  parse_pattern(f, json(name), "--pattern");
  return pattern_graph(f);
}

std::vector<std::size_t> ustat_blocks(const FamilySpec& f, std::size_t n) {
  if (!f.block_sizes.empty()) {
    std::size_t total = 0;
    for (std::size_t b : f.block_sizes) total += b;
    if (total != n)
      throw Error(ErrorCode::InvalidSize, "block_sizes sum to " + std::to_string(total) + ", grid asks for " +
                                              std::to_string(n));
    return f.block_sizes;
  }
  std::vector<std::size_t> out(f.blocks, n / f.blocks);
  for (std::size_t b = 0; b < n % f.blocks; ++b) ++out[b];
  return out;
}

LatentSourceField build_field(const FamilySpec& f, std::size_t n) {
  const auto n32 = static_cast<std::uint32_t>(n);
  if (f.family == "iid") return build_iid(n, f.source);
  if (f.family == "m_dependent")
    return build_m_dependent(n, f.m, f.source, f.window == "product" ? WindowFunction::product() : WindowFunction::sum());
  if (f.family == "graph") {
    SimpleGraph g;
    if (f.graph_kind == "cycle") g = cycle_graph(n32);
    else if (f.graph_kind == "path") g = path_graph(n32);
    else if (f.graph_kind == "complete") g = complete_graph(n32);
    else if (f.graph_kind == "star") g = star_graph(n32 - 1);
    else {
      for (const auto& [u, v] : f.edges)
        if (u >= n32 || v >= n32) throw Error(ErrorCode::InvalidSize, "edge endpoint beyond the grid size");
      g = SimpleGraph(n32, f.edges);
    }
    return build_graph_dependency(g, f.source);
  }
  if (f.family == "ustat") return build_ustat_field(ustat_blocks(f, n), static_cast<unsigned>(f.m), kernel_by_name(f.kernel), f.source);
  if (f.family == "constrained_ustat") {
    if (f.sequence_kind == "word") return build_word_field(n, f.letter_probs, f.word, f.gaps, f.exact_gaps);
    return build_pattern_field(n, f.pattern, f.gaps, f.exact_gaps);
  }
  if (f.family == "decorated_graph") return build_subgraph_count_field(n32, pattern_graph(f), f.p);
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + f.family + "'");
}

} // namespace locdep::cli
