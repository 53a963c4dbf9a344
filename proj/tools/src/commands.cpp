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

#include "locdep_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "locdep/bounds.hpp"
#include "locdep/error.hpp"
#include "locdep/serialize.hpp"
#include "locdep/statistics.hpp"

#ifndef LOCDEP_CLI_VERSION
#define LOCDEP_CLI_VERSION "unknown"
#endif

namespace locdep::cli {

using nlohmann::json;

void Outcome::merge(Outcome other) {
  artifacts.insert(artifacts.end(), other.artifacts.begin(), other.artifacts.end());
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string describe_failure(const InequalityVerdict& v, const std::string& where) {
  return "verdict " + v.id + " failed on " + where + " (digest " + v.digest + "): lhs " + fmt(v.lhs) + " rhs " +
         fmt(v.rhs) + " precondition " + to_string(v.precondition);
}

std::vector<InequalityVerdict> instance_verdicts(const ExactInstance& inst, const IndexSet& a, const IndexSet& b_set,
                                                 double lo, double hi, double c, const XiFunction& xi, double p) {
  std::vector<InequalityVerdict> out;
  out.push_back(check_quadratic_form(inst, a, xi, p));
  out.push_back(check_quadratic_form_total(inst));
  out.push_back(check_second_moment(inst, a, xi, p));
  for (auto& v : check_fourth_moment(inst, a, xi, p)) out.push_back(std::move(v));
  for (auto& v : check_smooth_functional(inst, standard_test_functions())) out.push_back(std::move(v));
  out.push_back(check_concentration(inst, a, b_set, lo, hi, c, xi));
  out.push_back(check_self_normalized_concentration(inst, a, b_set, lo, hi, c, xi));
  return out;
}

void ld_failures(const ValidationReport& report, const std::string& where, std::vector<std::string>& failures) {
  for (const auto& v : report.violations)
    failures.push_back(to_string(v.kind) + " on " + where + " at i=" + std::to_string(v.i + 1) +
                       (v.kind == Violation::Kind::LD2Dependence ? " j=" + std::to_string(v.j + 1) : "") + ": " +
                       v.message);
}

IndexSet check_range(const IndexSet& set, std::size_t size, const char* where) {
  for (Index i : set)
    if (i >= size) throw SpecError(where, "index " + std::to_string(i + 1) + " beyond the field size " + std::to_string(size));
  return set;
}

} // namespace

Experiment::Experiment(ExperimentSpec spec, RunOptions opts) : spec_(std::move(spec)), opts_(std::move(opts)) {
  for (std::size_t n : spec_.grid) grid_.push_back(GridPoint{n, {}, {}, {}, {}, {}});
}

void Experiment::note(const std::string& text) const {
  if (opts_.log) *opts_.log << text << '\n';
}

void Experiment::write(const std::string& name, const std::string& body, Outcome& out) const {
  std::filesystem::create_directories(opts_.out);
  const auto path = opts_.out / name;
  std::ofstream f(path, std::ios::binary);
  f << body;
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out.artifacts.push_back(path.string());
}

LatentSourceField& Experiment::field(std::size_t g) {
  auto& p = grid_.at(g);
  if (!p.field) {
    note("building " + spec_.family.family + " field at n=" + std::to_string(p.n));
    p.field = build_field(spec_.family, p.n);
  }
  return *p.field;
}

const NeighborhoodSystem& Experiment::system(std::size_t g) {
  auto& p = grid_.at(g);
  if (!p.sys) {
    const auto& f = field(g);
    if (spec_.declared) {
      if (spec_.declared->size() != f.size())
        throw SpecError("/neighborhoods", "declares " + std::to_string(spec_.declared->size()) +
                                              " indices, the field at n=" + std::to_string(p.n) + " has " +
                                              std::to_string(f.size()));
      p.sys = *spec_.declared;
    } else {
      p.sys = induced_neighborhoods(f);
    }
  }
  return *p.sys;
}

const DerivedNeighborhoods& Experiment::derived(std::size_t g) {
  auto& p = grid_.at(g);
  if (!p.derived) p.derived = locdep::derive(system(g));
  return *p.derived;
}

bool Experiment::exact_feasible(std::size_t g) {
  const auto& f = field(g);
  return f.enumerable() && f.outcome_count() <= static_cast<double>(opts_.cap);
}

const ExactLaw& Experiment::law(std::size_t g) {
  auto& p = grid_.at(g);
  if (!p.law) p.law = exact_law(field(g), opts_.cap, opts_.threads);
  return *p.law;
}

const MomentTable& Experiment::table(std::size_t g) {
  auto& p = grid_.at(g);
  if (p.table) return *p.table;
  auto& f = field(g);
  MomentTable t;
  if (spec_.family.family == "decorated_graph") {
    t = symmetric_moment_table(f, 0, 0, opts_.cap);
  } else if (spec_.mode == Mode::Exact && exact_feasible(g)) {
    t = exact_moment_table(law(g), system(g));
  } else if (f.enumerable()) {
    t = local_moment_table(f, system(g), opts_.cap);
  } else {
    t = mc_moment_table(f, system(g), std::max<std::uint64_t>(spec_.replications, 10000), spec_.seed, 32,
                        opts_.threads);
  }
  if (spec_.family.family == "ustat") {
    if (!projection_)
      projection_ = hoeffding_sigma1(kernel_by_name(spec_.family.kernel), static_cast<unsigned>(spec_.family.m),
                                     spec_.family.source, 4000, spec_.seed);
    t.sigma1 = projection_->sigma1;
    t.kernel_l4 = projection_->kernel_l4;
    t.kernel_variance = projection_->kernel_variance;
    t.theta = projection_->theta;
  }
  p.table = std::move(t);
  return *p.table;
}

BoundReport Experiment::bound(std::size_t g, const std::string& name) {
  const std::size_t n = grid_.at(g).n;
  const auto& params = field(g).metadata().params;
  const auto& t = table(g);
  BoundReport r;
  if (name == "main" || name == "self_normalized") {
    const auto& d = derived(g);
    r = name == "main" ? bound_main(t, d.kappa, d.tau) : bound_self_normalized(t, d.kappa, d.tau);
  } else if (name == "general_beta") {
    r = bound_general_beta(t, system(g), derived(g));
  } else if (name == "graph" || name == "graph_self_normalized") {
    std::size_t d = 0;
    for (const auto& a : system(g).neighborhoods()) d = std::max(d, a.size() - 1);
    r = name == "graph" ? bound_graph(t, d) : bound_graph_self_normalized(t, d);
  } else if (name == "distributed_u") {
    DistributedUInputs in{*t.sigma1, *t.kernel_l4, *t.kernel_variance, static_cast<unsigned>(spec_.family.m),
                          ustat_blocks(spec_.family, n)};
    r = bound_distributed_u(in);
  } else if (name == "distributed_general") {
    // per-block fields, rescaled by n_b / N
    const auto sizes = ustat_blocks(spec_.family, n);
    std::vector<MomentTable> tables;
    std::vector<std::size_t> kappas, taus;
    for (std::size_t nb : sizes) {
      auto block = build_ustat_field({nb}, static_cast<unsigned>(spec_.family.m), kernel_by_name(spec_.family.kernel),
                                     spec_.family.source, params.at("theta"));
      const auto sys = induced_neighborhoods(block);
      const auto d = locdep::derive(sys);
      MomentTable bt = block.enumerable() ? local_moment_table(block, sys, opts_.cap)
                                          : mc_moment_table(block, sys, 10000, spec_.seed, 32, opts_.threads);
      const double s = static_cast<double>(nb) / static_cast<double>(n);
      for (auto* v : {&bt.l2, &bt.l3, &bt.l4, &bt.se2, &bt.se3, &bt.se4})
        for (double& x : *v) x *= s;
      bt.sigma2 *= s * s;
      bt.sigma2_se *= s * s;
      tables.push_back(std::move(bt));
      kappas.push_back(d.kappa);
      taus.push_back(d.tau);
    }
    r = bound_distributed_general(tables, kappas, taus);
  } else if (name == "constrained_u" || name == "constrained_u_self_normalized") {
    const auto b = static_cast<std::size_t>(params.at("b"));
    r = name == "constrained_u" ? bound_constrained_u(t, n, b) : bound_constrained_u_self_normalized(t, n, b);
  } else if (name == "decorated" || name == "decorated_self_normalized") {
    const auto v = static_cast<std::size_t>(params.at("v"));
    r = name == "decorated" ? bound_decorated(t, n, v) : bound_decorated_self_normalized(t, n, v);
  } else {
    throw SpecError("/bounds", "unknown bound '" + name + "'");
  }
  // key reports by the family size parameter, as the summaries are
  if (auto it = r.inputs.find("n"); it == r.inputs.end() || it->second != static_cast<double>(n)) {
    if (it != r.inputs.end()) r.inputs["indices"] = it->second;
    r.inputs["n"] = static_cast<double>(n);
  }
  return r;
}

Outcome Experiment::derive() {
  Outcome out;
  const ArtifactStamp stamp{config_hash(spec_.text), spec_.seed};
  std::string csv = csv_row({"config_hash", "seed", "n", "indices", "sources", "kappa", "tau", "max_neighborhood",
                             "max_support", "verified", "violations", "warnings"});
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    const auto& sys = system(g);
    const auto& d = derived(g);
    const auto report = validate_structure(sys);
    std::size_t max_a = 0;
    for (const auto& a : sys.neighborhoods()) max_a = std::max(max_a, a.size());
    const std::string n = std::to_string(grid_[g].n);
    csv += csv_row({stamp.config_hash, std::to_string(stamp.seed), n, std::to_string(sys.size()),
                    std::to_string(field(g).source_count()), std::to_string(d.kappa), std::to_string(d.tau),
                    std::to_string(max_a), std::to_string(field(g).max_support()),
                    sys.independence_verified() ? "true" : "false", std::to_string(report.violations.size()),
                    std::to_string(report.warnings.size())});
    write("neighborhoods_n" + n + ".json", to_json(sys), out);
    ld_failures(report, "n=" + n, out.failures);
    for (const auto& w : report.warnings) note("warning n=" + n + ": " + w.message);
    note("n=" + n + ": kappa " + std::to_string(d.kappa) + ", tau " + std::to_string(d.tau));
  }
  write("derive.csv", csv, out);
  return out;
}

Outcome Experiment::bounds() {
  Outcome out;
  const ArtifactStamp stamp{config_hash(spec_.text), spec_.seed};
  std::vector<MomentTable> tables;
  std::vector<BoundReport> reports;
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    tables.push_back(table(g));
    for (const auto& name : spec_.bounds) {
      try {
        reports.push_back(bound(g, name));
        note("n=" + std::to_string(grid_[g].n) + " " + name + ": " + fmt(reports.back().value));
      } catch (const Error& e) {
        out.failures.push_back("bound " + name + " at n=" + std::to_string(grid_[g].n) + ": " + e.what());
      }
    }
  }
  write("moments.csv", moments_grid_csv(spec_.grid, tables, stamp), out);
  write("bounds.json", bounds_json(reports, stamp), out);
  write("bounds_grid.csv", bound_grid_csv(reports, stamp), out);
  return out;
}

Outcome Experiment::oracle() {
  Outcome out;
  const ArtifactStamp stamp{config_hash(spec_.text), spec_.seed};
  const auto& ck = spec_.checkers;
  std::vector<InequalityVerdict> verdicts;
  if (!ck.enabled) {
    note("checkers disabled");
  } else if (ck.suite == "random") {
    struct Slot {
      std::vector<InequalityVerdict> verdicts;
      ValidationReport ld;
    };
    std::vector<Slot> slots(ck.instances);
    parallel_chunks(ck.instances, opts_.threads, [&](std::size_t k) {
      const auto ri = make_random_instance(spec_.seed, k, ck.max_n);
      const ExactInstance inst(exact_law(*ri.field, opts_.cap, 1), ri.sys, "random:" + std::to_string(k));
      slots[k].verdicts = instance_verdicts(inst, ri.a, ri.b_set, ri.lo, ri.hi, ri.c, ri.xi, ri.p);
      if (ck.ld_check) slots[k].ld = check_ld_independence(inst);
    });
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const std::string where = "random instance " + std::to_string(k);
      for (auto& v : slots[k].verdicts) {
        if (v.failed()) out.failures.push_back(describe_failure(v, where));
        verdicts.push_back(std::move(v));
      }
      ld_failures(slots[k].ld, where, out.failures);
    }
    note(std::to_string(verdicts.size()) + " verdicts on " + std::to_string(ck.instances) + " random instances");
  } else {
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      const std::string where = "n=" + std::to_string(grid_[g].n);
      const auto& sys = system(g);
      ld_failures(validate_structure(sys), where, out.failures);
      if (!exact_feasible(g)) {
        note(where + ": field not enumerable within the cap, LD factorization and verdicts skipped");
        continue;
      }
      const ExactInstance inst(law(g), sys, where);
      if (ck.ld_check) ld_failures(check_ld_independence(inst), where, out.failures);
      const auto a = check_range(ck.a, sys.size(), "/checkers/A");
      const auto b = check_range(ck.b_set, sys.size(), "/checkers/B");
      for (auto& v : instance_verdicts(inst, a, b, ck.lo, ck.hi, ck.c, ck.xi, ck.p)) {
        if (v.failed()) out.failures.push_back(describe_failure(v, where));
        verdicts.push_back(std::move(v));
      }
    }
  }
  write("verdicts.csv", verdicts_csv(verdicts, stamp), out);
  return out;
}

std::vector<EmpiricalSummary> Experiment::summaries() {
  if (summaries_) return *summaries_;
  std::vector<EmpiricalSummary> out;
  const Statistic stat = spec_.statistic;
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    auto& f = field(g);
    EmpiricalSummary s;
    if (spec_.mode == Mode::Exact) {
      if (!exact_feasible(g))
        throw Error(ErrorCode::EnumerationCapExceeded,
                    "exact mode at n=" + std::to_string(grid_[g].n) + " exceeds the enumeration cap");
      const auto kr = exact_kolmogorov(law(g), system(g), stat);
      s.family = f.metadata().family;
      s.n = grid_[g].n;
      s.statistic = stat;
      s.ks = kr.distance;
      s.rejected = 0;
      if (kr.rejected_mass > 0.0) note("n=" + std::to_string(s.n) + ": rejected mass " + fmt(kr.rejected_mass));
    } else {
      McOptions o;
      o.replications = spec_.replications;
      o.seed = spec_.seed;
      o.threads = opts_.threads;
      if (spec_.assertions.reject_fraction_max) o.max_reject_fraction = *spec_.assertions.reject_fraction_max;
      if (stat != Statistic::W2) o.sigma = table(g).sigma();
      const bool need_sys = stat != Statistic::W1 || spec_.declared;
      s = mc_run(f, need_sys ? &system(g) : nullptr, stat, o);
    }
    note("n=" + std::to_string(s.n) + " " + to_string(stat) + ": ks " + fmt(s.ks));
    out.push_back(std::move(s));
  }
  summaries_ = out;
  return out;
}

Outcome Experiment::statistics(bool fit) {
  Outcome out;
  const ArtifactStamp stamp{config_hash(spec_.text), spec_.seed};
  const auto sums = summaries();
  const auto& as = spec_.assertions;
  std::optional<double> slope;
  if (fit) {
    std::vector<RatePoint> pts;
    for (const auto& s : sums) pts.push_back({static_cast<double>(s.n), s.ks});
    const auto rf = rate_fit(pts);
    slope = rf.slope;
    write("rate_plot.dat", rate_plot_data(rf, stamp), out);
    std::vector<BoundReport> reports;
    for (std::size_t g = 0; g < grid_.size(); ++g) reports.push_back(bound(g, spec_.ratio_bound));
    const auto rt = ratio_table(sums, reports);
    write("ratios.csv", ratio_csv(rt, spec_.ratio_bound, stamp), out);
    note("slope " + fmt(rf.slope) + ", ratio spread " + fmt(rt.spread));
    if (as.slope_range && !(rf.slope >= as.slope_range->first && rf.slope <= as.slope_range->second))
      out.failures.push_back("slope " + fmt(rf.slope) + " outside [" + fmt(as.slope_range->first) + ", " +
                             fmt(as.slope_range->second) + "]");
    if (as.ratio_spread_max && !(rt.spread < *as.ratio_spread_max))
      out.failures.push_back("ratio spread " + fmt(rt.spread) + " not below " + fmt(*as.ratio_spread_max));
  } else if (as.slope_range || as.ratio_spread_max) {
    note("slope and ratio assertions need a grid of at least 3 points and the rate stage");
  }
  write("summary.csv", summary_csv(sums, slope, stamp), out);
  for (std::size_t k = 0; k < sums.size(); ++k) {
    const auto& s = sums[k];
    const std::string where = "n=" + std::to_string(s.n);
    if (as.ks_max && !(s.ks <= *as.ks_max))
      out.failures.push_back("ks " + fmt(s.ks) + " above " + fmt(*as.ks_max) + " at " + where);
    if (as.reject_fraction_max && s.replications > 0 &&
        static_cast<double>(s.rejected) > *as.reject_fraction_max * static_cast<double>(s.replications))
      out.failures.push_back("rejected " + std::to_string(s.rejected) + " of " + std::to_string(s.replications) +
                             " at " + where);
    if (as.ks_decreasing && k > 0 && !(s.ks < sums[k - 1].ks))
      out.failures.push_back("ks not decreasing at " + where + ": " + fmt(s.ks) + " after " + fmt(sums[k - 1].ks));
  }
  return out;
}

Outcome Experiment::run() {
  const std::string started = utc_now();
  Outcome out;
  out.merge(derive());
  out.merge(bounds());
  out.merge(oracle());
  out.merge(statistics(grid_.size() >= 3));
  json m;
  m["config_hash"] = config_hash(spec_.text);
  m["seed"] = spec_.seed;
  m["version"] = LOCDEP_CLI_VERSION;
  m["started"] = started;
  m["finished"] = utc_now();
  m["threads"] = opts_.threads;
  m["cap"] = opts_.cap;
  m["family"] = spec_.family.family;
  m["grid"] = spec_.grid;
  m["artifacts"] = out.artifacts;
  m["passed"] = out.passed();
  m["failures"] = out.failures;
  write("run_manifest.json", m.dump(2) + "\n", out);
  return out;
}

unsigned resolve_cli_threads(std::optional<unsigned> flag, const ExperimentSpec& spec) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("LOCDEP_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  if (spec.threads && *spec.threads > 0) return *spec.threads;
  return resolve_threads(0);
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

std::vector<int> int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  for (const auto& tok : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw SpecError(flag, "'" + tok + "' is not an integer");
    }
  }
  if (out.empty()) throw SpecError(flag, "empty list");
  return out;
}

} // namespace

std::uint64_t run_count(const CountRequest& req) {
  if (req.kind == "subgraph") {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& tok : split(req.edges, ',')) {
      const auto uv = split(tok, '-');
      if (uv.size() != 2) throw SpecError("--edges", "'" + tok + "' is not of the form u-v");
      const auto ends = int_list(uv[0] + "," + uv[1], "--edges");
      if (ends[0] < 1 || ends[1] < 1 || ends[0] == ends[1] || static_cast<std::uint32_t>(ends[0]) > req.vertices ||
          static_cast<std::uint32_t>(ends[1]) > req.vertices)
        throw SpecError("--edges", "'" + tok + "' is not an edge of a graph on " + std::to_string(req.vertices) +
                                       " vertices");
      edges.emplace_back(ends[0] - 1, ends[1] - 1);
    }
    const SimpleGraph host(req.vertices, edges);
    return subgraph_statistic(host, named_pattern_graph(req.pattern)).injective_homomorphisms;
  }
  const auto seq = int_list(req.sequence, "--sequence");
  const auto target = int_list(req.target, "--target");
  GapConstraint gaps;
  if (!req.gaps.empty()) {
    for (const auto& tok : split(req.gaps, ',')) {
      if (tok == "inf") {
        gaps.push_back(std::nullopt);
        continue;
      }
      const int d = int_list(tok, "--gaps").front();
      if (d < 1) throw SpecError("--gaps", "finite gaps are >= 1");
      gaps.push_back(static_cast<std::size_t>(d));
    }
  } else {
    gaps.assign(target.size() - 1, std::nullopt);
  }
  if (gaps.size() + 1 != target.size()) throw SpecError("--gaps", "need one gap per adjacent pair of the target");
  if (req.kind == "word") return count_word_occurrences(seq, target, gaps, req.exact_gaps);
  if (req.kind == "pattern") return count_pattern_occurrences(seq, target, gaps, req.exact_gaps);
  throw SpecError("count", "unknown counter '" + req.kind + "'");
}

} // namespace locdep::cli
