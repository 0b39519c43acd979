/**
 * Copyright (c) 2026 The tracerec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 infeasible request, 4 audit failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tracerec/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitAudit = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

tracerec::ExperimentConfig load_config(const Overrides& o) {
  std::ifstream in(o.config_path);
  if (!in) {
    throw tracerec::Error(tracerec::ErrorKind::kConfig,
                          "cannot read config file '" + o.config_path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = tracerec::parse_config_text(buf.str());
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) {
    if (*o.trials == 0) {
      throw tracerec::Error(tracerec::ErrorKind::kConfig, "--trials must be positive");
    }
    cfg.trials = *o.trials;
  }
  if (o.out) cfg.out = *o.out;
  if (o.threads) cfg.threads = std::max(1u, *o.threads);
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw tracerec::Error(tracerec::ErrorKind::kConfig,
                          "cannot write '" + path + "'");
  }
  os << text;
}

int run(tracerec::Mode mode, const Overrides& o) {
  const auto cfg = load_config(o);
  const auto result = tracerec::run_experiment(cfg, mode);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  const std::string body = mode == tracerec::Mode::kGenerate
                               ? result.generated
                               : tracerec::to_csv(result.rows);
  if (cfg.out.empty()) {
    std::cout << body;
  } else {
    write_file(cfg.out, body);
    write_file(cfg.out + ".meta", tracerec::run_metadata(cfg, mode));
  }

  if (!result.audit.clean) {
    std::cerr << "audit failed: n=" << result.audit.offending_n
              << " seed=" << cfg.seed << " first offending trial="
              << result.audit.offending_trial.value_or(0) << '\n';
    return kExitAudit;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace reconstruction experiments over the deletion channel"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    tracerec::Mode mode;
  };
  const Command commands[] = {
      {"exact", "closed-form Pr(not E1) and Pr(not E2)", tracerec::Mode::kExact},
      {"asympt", "asymptotic forms of Pr(not E1) and Pr(not E2)",
       tracerec::Mode::kAsymptotic},
      {"montecarlo", "Monte Carlo estimates of the event and error probabilities",
       tracerec::Mode::kMonteCarlo},
      {"audit", "Monte Carlo with per-trial implication audits",
       tracerec::Mode::kAudit},
      {"sweep", "exact and asymptotic values over a grid of exponents c",
       tracerec::Mode::kSweep},
      {"generate", "emit generated source strings and their spans",
       tracerec::Mode::kGenerate},
  };

  Overrides overrides;
  std::optional<tracerec::Mode> chosen;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", overrides.config_path, "experiment JSON")
        ->required();
    sub->add_option("--seed", overrides.seed, "override the master seed");
    sub->add_option("--trials", overrides.trials, "override the trial count");
    sub->add_option("--out", overrides.out, "output path (CSV, or JSON for generate)");
    sub->add_option("--threads", overrides.threads, "worker threads");
    const tracerec::Mode mode = c.mode;
    sub->callback([&chosen, mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    return run(*chosen, overrides);
  } catch (const tracerec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == tracerec::ErrorKind::kInfeasible ? kExitInfeasible
                                                        : kExitConfig;
  }
}
