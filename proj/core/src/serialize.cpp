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

#include "locdep/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "locdep/error.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

using nlohmann::json;

std::string config_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out + "\r\n";
}

namespace {

std::vector<std::string> stamped(const ArtifactStamp& s, std::vector<std::string> rest) {
  rest.insert(rest.begin(), {s.config_hash, std::to_string(s.seed)});
  return rest;
}

json stamp_json(const ArtifactStamp& s) { return {{"config_hash", s.config_hash}, {"seed", s.seed}}; }

double at_or_zero(const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; }

// nlohmann rejects non-finite numbers; emit null instead.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

std::string moments_csv(const MomentTable& table, const ArtifactStamp& stamp) {
  std::string out = csv_row({"config_hash", "seed", "index", "l2", "l3", "l4", "se2", "se3", "se4"});
  for (std::size_t i = 0; i < table.size(); ++i)
    out += csv_row(stamped(stamp, {std::to_string(i + 1), format_double(table.l2[i]), format_double(table.l3[i]),
                                   format_double(table.l4[i]), format_double(at_or_zero(table.se2, i)),
                                   format_double(at_or_zero(table.se3, i)), format_double(at_or_zero(table.se4, i))}));
  return out;
}

std::string moments_grid_csv(const std::vector<std::size_t>& ns, const std::vector<MomentTable>& tables,
                             const ArtifactStamp& stamp) {
  if (ns.size() != tables.size()) throw Error(ErrorCode::GridMismatch, "one moment table per grid point");
  std::string out =
      csv_row({"config_hash", "seed", "n", "mode", "index", "l2", "l3", "l4", "se2", "se3", "se4"});
  for (std::size_t g = 0; g < ns.size(); ++g) {
    const MomentTable& table = tables[g];
    for (std::size_t i = 0; i < table.size(); ++i)
      out += csv_row(stamped(stamp, {std::to_string(ns[g]), to_string(table.mode), std::to_string(i + 1),
                                     format_double(table.l2[i]), format_double(table.l3[i]),
                                     format_double(table.l4[i]), format_double(at_or_zero(table.se2, i)),
                                     format_double(at_or_zero(table.se3, i)),
                                     format_double(at_or_zero(table.se4, i))}));
  }
  return out;
}

std::string moments_json(const MomentTable& table, const ArtifactStamp& stamp) {
  json j = stamp_json(stamp);
  j["size"] = table.size();
  j["sigma2"] = number(table.sigma2);
  j["sigma2_se"] = number(table.sigma2_se);
  j["sigma2_provenance"] = table.sigma2_provenance;
  if (table.sigma2_identity) j["sigma2_identity"] = number(*table.sigma2_identity);
  j["kappa"] = table.kappa;
  j["lambda"] = number(table.lambda);
  j["mode"] = to_string(table.mode);
  j["replications"] = table.replications;
  j["degenerate"] = table.degenerate;
  if (table.sigma1) j["sigma1"] = number(*table.sigma1);
  if (table.kernel_l4) j["kernel_l4"] = number(*table.kernel_l4);
  if (table.kernel_variance) j["kernel_variance"] = number(*table.kernel_variance);
  if (table.theta) j["theta"] = number(*table.theta);
  return j.dump(2) + "\n";
}

std::string bounds_json(const std::vector<BoundReport>& reports, const ArtifactStamp& stamp) {
  json j = stamp_json(stamp);
  j["reports"] = json::array();
  for (const auto& r : reports) {
    json jr;
    jr["theorem"] = r.theorem;
    jr["value"] = number(r.value);
    jr["constant_policy"] = r.constant_policy;
    jr["uncertainty"] = number(r.uncertainty);
    jr["terms"] = json::array();
    for (const auto& t : r.terms) jr["terms"].push_back({{"name", t.name}, {"value", number(t.value)}});
    jr["inputs"] = json::object();
    for (const auto& [k, v] : r.inputs) jr["inputs"][k] = number(v);
    jr["flags"] = r.flags;
    j["reports"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

std::string bound_grid_csv(const std::vector<BoundReport>& reports, const ArtifactStamp& stamp) {
  std::string out = csv_row({"config_hash", "seed", "n", "theorem", "term", "value"});
  for (const auto& r : reports) {
    const auto it = r.inputs.find("n");
    const std::string n = it == r.inputs.end() ? "" : format_double(it->second);
    for (const auto& t : r.terms) out += csv_row(stamped(stamp, {n, r.theorem, t.name, format_double(t.value)}));
    out += csv_row(stamped(stamp, {n, r.theorem, "total", format_double(r.value)}));
  }
  return out;
}

std::string verdicts_csv(const std::vector<InequalityVerdict>& verdicts, const ArtifactStamp& stamp) {
  std::string out = csv_row({"config_hash", "seed", "instance", "id", "lhs", "rhs", "constant", "margin",
                             "precondition", "verdict", "detail"});
  for (const auto& v : verdicts)
    out += csv_row(stamped(stamp, {v.digest, v.id, format_double(v.lhs), format_double(v.rhs),
                                   format_double(v.constant), format_double(v.margin), to_string(v.precondition),
                                   v.pass() ? "pass" : v.vacuous() ? "vacuous" : "fail", v.detail}));
  return out;
}

std::string summary_csv(const std::vector<EmpiricalSummary>& summaries, std::optional<double> slope,
                        const ArtifactStamp& stamp) {
  std::string out =
      csv_row({"config_hash", "seed", "family", "n", "statistic", "R", "ks", "ks_band", "rejected", "slope"});
  for (const auto& s : summaries)
    out += csv_row(stamped(stamp, {s.family, std::to_string(s.n), to_string(s.statistic),
                                   std::to_string(s.replications), format_double(s.ks), format_double(s.ks_band),
                                   std::to_string(s.rejected), slope ? format_double(*slope) : ""}));
  return out;
}

std::string ratio_csv(const RatioTable& table, const std::string& theorem, const ArtifactStamp& stamp) {
  std::string out = csv_row({"config_hash", "seed", "theorem", "n", "ks", "shape", "ratio", "band", "spread"});
  for (const auto& r : table.rows)
    out += csv_row(stamped(stamp, {theorem, format_double(r.n), format_double(r.ks), format_double(r.shape),
                                   format_double(r.ratio), format_double(r.band), format_double(table.spread)}));
  return out;
}

std::string rate_plot_data(const RateFit& fit, const ArtifactStamp& stamp) {
  std::ostringstream os;
  os << "# config_hash " << stamp.config_hash << " seed " << stamp.seed << "\n";
  os << "# slope " << format_double(fit.slope) << " intercept " << format_double(fit.intercept) << "\n";
  os << "# log_n log_ks fitted\n";
  for (const auto& p : fit.points) {
    const double x = std::log(p.n);
    os << format_double(x) << ' ' << format_double(std::log(p.ks)) << ' '
       << format_double(fit.intercept + fit.slope * x) << "\n";
  }
  return os.str();
}

std::string to_json(const NeighborhoodSystem& sys) {
  json j;
  j["n"] = sys.size();
  j["A"] = json::array();
  if (!sys.implicit_default_cover()) j["A2"] = json::array();
  for (Index i = 0; i < sys.size(); ++i) {
    json row = json::array();
    for (Index k : sys.neighborhood(i)) row.push_back(k + 1);
    j["A"].push_back(std::move(row));
    const auto& ai = sys.neighborhood(i);
    if (sys.implicit_default_cover()) continue;
    for (std::size_t p = 0; p < ai.size(); ++p) {
      const auto& cover = sys.pair_cover_at(i, p);
      if (!cover) continue;
      json set = json::array();
      for (Index k : *cover) set.push_back(k + 1);
      j["A2"].push_back({{"i", i + 1}, {"j", ai[p] + 1}, {"set", std::move(set)}});
    }
  }
  return j.dump();
}

namespace {

IndexSet read_set(const json& arr, std::size_t n, const std::string& where) {
  if (!arr.is_array()) throw Error(ErrorCode::SchemaError, where + " must be an array");
  std::vector<Index> raw;
  for (const auto& v : arr) {
    if (!v.is_number_integer()) throw Error(ErrorCode::SchemaError, where + " must hold integers");
    const auto k = v.get<long long>();
    if (k < 1 || static_cast<std::size_t>(k) > n)
      throw Error(ErrorCode::SchemaError, where + " has index " + std::to_string(k) + " outside 1.." + std::to_string(n));
    raw.push_back(static_cast<Index>(k - 1));
  }
  return make_index_set(std::move(raw));
}

} // namespace

NeighborhoodSystem neighborhood_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("neighborhood JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("A"))
    throw Error(ErrorCode::SchemaError, "neighborhood JSON needs \"n\" and \"A\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw Error(ErrorCode::SchemaError, "\"n\" must be a positive integer");
  const auto n = static_cast<std::size_t>(j["n"].get<long long>());
  if (!j["A"].is_array() || j["A"].size() != n)
    throw Error(ErrorCode::SchemaError, "\"A\" must list one set per index");
  std::vector<IndexSet> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(read_set(j["A"][i], n, "A[" + std::to_string(i + 1) + "]"));
  if (!j.contains("A2")) return NeighborhoodSystem::with_default_cover(std::move(a));
  std::vector<std::vector<std::optional<IndexSet>>> covers(n);
  for (std::size_t i = 0; i < n; ++i) covers[i].resize(a[i].size());
  for (const auto& e : j["A2"]) {
    if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e.contains("set"))
      throw Error(ErrorCode::SchemaError, "A2 entries need \"i\", \"j\" and \"set\"");
    const auto i = e["i"].get<long long>(), jj = e["j"].get<long long>();
    if (i < 1 || static_cast<std::size_t>(i) > n || jj < 1 || static_cast<std::size_t>(jj) > n)
      throw Error(ErrorCode::SchemaError, "A2 entry index out of range");
    const auto& ai = a[static_cast<std::size_t>(i - 1)];
    const auto pos = std::lower_bound(ai.begin(), ai.end(), static_cast<Index>(jj - 1));
    if (pos == ai.end() || *pos != static_cast<Index>(jj - 1))
      throw Error(ErrorCode::SchemaError, "A2 entry (" + std::to_string(i) + "," + std::to_string(jj) + ") has j outside A_i");
    covers[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(pos - ai.begin())] =
        read_set(e["set"], n, "A2(" + std::to_string(i) + "," + std::to_string(jj) + ")");
  }
  return NeighborhoodSystem(std::move(a), std::move(covers));
}

} // namespace locdep
