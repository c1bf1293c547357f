// Copyright 2026 The Patchval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: validate, plain, ablate, list-locations.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI/CLI11.hpp>

#include "patchval/harness.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnsound = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct Flags {
  std::optional<int> workers;
  std::vector<std::string> disable;
  bool compare_plain = false;
  std::optional<std::uint64_t> seed;
  bool unstable_seed = false;
  std::optional<std::int64_t> budget_base;
  std::optional<double> budget_factor;
  bool dump_tree = false;
  bool dump_woven = false;
  std::string report_path;
  std::string csv_path;
};

void AddRunFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--workers", f.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--disable", f.disable,
                  "Techniques to disable: dedup, schemata, prioritization, "
                  "virtualization")
      ->delimiter(',')
      ->check(CLI::IsMember({patchval::kTechniqueDedup,
                             patchval::kTechniqueSchemata,
                             patchval::kTechniquePrioritization,
                             patchval::kTechniqueVirtualization}));
  cmd->add_flag("--compare-plain", f.compare_plain,
                "Also run the plain validator and diff verdicts");
  cmd->add_option("--seed", f.seed, "Seed for nondet");
  cmd->add_flag("--unstable-seed", f.unstable_seed,
                "Reseed nondet per test execution");
  cmd->add_option("--step-budget-base", f.budget_base, "Budget base steps")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--step-budget-factor", f.budget_factor,
                  "Budget factor over the original run")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--dump-tree", f.dump_tree,
                "Include state-transition trees in the report");
  cmd->add_flag("--dump-woven", f.dump_woven,
                "Print each woven program to stderr");
  cmd->add_option("--report", f.report_path,
                  "Write the JSON report here instead of stdout");
  cmd->add_option("--csv", f.csv_path, "Write a CSV summary here");
}

void ApplyFlags(const Flags& f, patchval::Config& c) {
  if (f.workers) c.workers = *f.workers;
  for (const std::string& t : f.disable) c.disabled.insert(t);
  c.compare_plain = c.compare_plain || f.compare_plain;
  if (f.seed) c.seed = *f.seed;
  c.unstable_seed = c.unstable_seed || f.unstable_seed;
  if (f.budget_base) c.budget.base = *f.budget_base;
  if (f.budget_factor) c.budget.factor = *f.budget_factor;
  c.dump_tree = c.dump_tree || f.dump_tree;
  c.dump_woven = c.dump_woven || f.dump_woven;
}

void WriteOut(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void EmitReport(const patchval::ValidationReport& report, const Flags& f) {
  for (const patchval::SetResult& s : report.sets) {
    if (!s.woven.empty()) {
      std::cerr << "// woven program for " << s.fault_location << "\n"
                << s.woven << "\n";
    }
  }
  WriteOut(f.report_path, patchval::ReportToJson(report).dump(2) + "\n");
  if (!f.csv_path.empty()) WriteOut(f.csv_path, patchval::ReportToCsv(report));
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw patchval::ManifestError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int ListLocations(const std::string& path) {
  const patchval::Program program = patchval::Parse(ReadFile(path));
  for (const auto& [loc, stmt] : program.stmt_index()) {
    std::string text = patchval::PrintStmt(*stmt);
    const std::size_t nl = text.find('\n');
    if (nl != std::string::npos) text = text.substr(0, nl) + " ...";
    std::cout << loc.ToString() << '\t' << text << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch validation engine for IMP+ programs"};
  app.require_subcommand(1);

  Flags flags;
  std::string manifest_path;
  std::string source_path;

  CLI::App* validate = app.add_subcommand("validate", "Run the full pipeline");
  validate->add_option("manifest", manifest_path)->required();
  AddRunFlags(validate, flags);

  CLI::App* plain = app.add_subcommand("plain", "Run the plain validator");
  plain->add_option("manifest", manifest_path)->required();
  AddRunFlags(plain, flags);

  CLI::App* ablate =
      app.add_subcommand("ablate", "Run every technique ablation");
  ablate->add_option("manifest", manifest_path)->required();
  AddRunFlags(ablate, flags);

  CLI::App* list = app.add_subcommand(
      "list-locations", "Print every statement location of a source");
  list->add_option("source", source_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*list) return ListLocations(source_path);

    patchval::ProjectManifest manifest = patchval::LoadManifest(manifest_path);
    ApplyFlags(flags, manifest.config);

    if (*validate) {
      const patchval::ValidationReport report =
          patchval::RunValidation(manifest);
      EmitReport(report, flags);
      if (!report.verdict_diff.empty()) {
        for (const std::string& d : report.verdict_diff) {
          std::cerr << "verdict mismatch: " << d << '\n';
        }
        return kExitUnsound;
      }
      return kExitOk;
    }
    if (*plain) {
      EmitReport(patchval::RunPlain(manifest), flags);
      return kExitOk;
    }
    const patchval::AblationResult result = patchval::AblationMatrix(manifest);
    WriteOut(flags.report_path,
             patchval::AblationToJson(result).dump(2) + "\n");
    if (!result.divergence.empty()) {
      for (const std::string& d : result.divergence) {
        std::cerr << "verdict divergence: " << d << '\n';
      }
      return kExitUnsound;
    }
    return kExitOk;
  } catch (const patchval::ManifestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const patchval::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const patchval::NotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
