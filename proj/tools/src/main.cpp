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

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "locdep/error.hpp"
#include "locdep_cli/commands.hpp"
#include "locdep_cli/spec.hpp"

namespace {

using namespace locdep;
using namespace locdep::cli;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct CommonFlags {
  std::string spec_path;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::uint64_t> cap;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--spec", f.spec_path, "experiment document (JSON)")->required();
  cmd->add_option("--threads", f.threads, "worker threads (default: LOCDEP_THREADS, then hardware)");
  cmd->add_option("--seed", f.seed, "master seed, overrides the document");
  cmd->add_option("--out", f.out, "output directory, overrides the document");
  cmd->add_option("--cap", f.cap, "enumeration cap on joint source outcomes");
  cmd->add_flag("--quiet,-q", f.quiet, "no progress notes");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path, "cannot read file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int report(const Outcome& out) {
  for (const auto& a : out.artifacts) std::cout << "wrote " << a << '\n';
  if (out.passed()) {
    std::cout << "PASS\n";
    return kOk;
  }
  for (const auto& f : out.failures) std::cerr << "FAIL " << f << '\n';
  std::cerr << out.failures.size() << " assertion(s) failed\n";
  return kFailed;
}

int run_stage(const std::string& stage, const CommonFlags& f) {
  ExperimentSpec spec = parse_spec(read_file(f.spec_path));
  if (f.seed) spec.seed = *f.seed;
  if (f.out) spec.output = *f.out;
  RunOptions opts;
  opts.threads = resolve_cli_threads(f.threads, spec);
  opts.cap = f.cap ? *f.cap : spec.cap.value_or(kDefaultEnumerationCap);
  opts.out = spec.output;
  opts.log = f.quiet ? nullptr : &std::clog;
  Experiment ex(std::move(spec), opts);
  if (stage == "derive") return report(ex.derive());
  if (stage == "bound") return report(ex.bounds());
  if (stage == "oracle") return report(ex.oracle());
  if (stage == "mc") return report(ex.statistics(false));
  if (stage == "rate") return report(ex.statistics(true));
  return report(ex.run());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"locdep: locally dependent fields, normal-approximation bounds and their checkers"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::pair<const char*, const char*> stages[] = {
      {"derive", "neighborhoods, kappa and tau"},
      {"bound", "moment tables and bound shapes"},
      {"oracle", "explicit-constant checkers and dependence factorization"},
      {"mc", "Kolmogorov distances over the grid"},
      {"rate", "grid, rate fit and ks / shape ratios"},
      {"run", "every stage plus a run manifest"},
  };
  std::string chosen;
  for (const auto& [name, help] : stages) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags);
    cmd->callback([&chosen, name = std::string(name)] { chosen = name; });
  }

  CountRequest count;
  auto* cnt = app.add_subcommand("count", "naive word, pattern and subgraph counters");
  cnt->add_option("kind", count.kind, "word | pattern | subgraph")->required()->check(
      CLI::IsMember({"word", "pattern", "subgraph"}));
  cnt->add_option("--sequence", count.sequence, "comma-separated letters, or a permutation of 1..n");
  cnt->add_option("--target", count.target, "word or pattern to count");
  cnt->add_option("--gaps", count.gaps, "comma-separated gaps, 'inf' for none");
  cnt->add_flag("--exact", count.exact_gaps, "finite gaps must be met exactly");
  cnt->add_option("--vertices", count.vertices, "host vertex count");
  cnt->add_option("--edges", count.edges, "host edges as u-v pairs, 1-based");
  cnt->add_option("--pattern", count.pattern, "edge | triangle | path3 | square | star3");
  cnt->callback([&chosen] { chosen = "count"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (chosen == "count") {
      std::cout << run_count(count) << '\n';
      return kOk;
    }
    return run_stage(chosen, flags);
  } catch (const SpecError& e) {
    std::cerr << "schema error at " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::SchemaError ? kUsage : kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
