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

#pragma once

// Experiment layer: JSON configuration, Monte Carlo estimators over seeded
// trials, paired implication audits, closed-form tables and threshold
// sweeps, all emitted as rows of one fixed CSV schema.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "tracerec/analytics.hpp"
#include "tracerec/bitstring.hpp"
#include "tracerec/channel.hpp"
#include "tracerec/classes.hpp"
#include "tracerec/events.hpp"
#include "tracerec/reconstruct.hpp"
#include "tracerec/runs.hpp"
#include "tracerec/stats.hpp"

namespace tracerec {

inline constexpr const char* kVersion = "1.0.0";

enum class Mode { kExact, kAsymptotic, kMonteCarlo, kAudit, kSweep, kGenerate };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kExact: return "exact";
    case Mode::kAsymptotic: return "asympt";
    case Mode::kMonteCarlo: return "montecarlo";
    case Mode::kAudit: return "audit";
    case Mode::kSweep: return "sweep";
    case Mode::kGenerate: return "generate";
  }
  return "unknown";
}

inline Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::kExact, Mode::kAsymptotic, Mode::kMonteCarlo,
                 Mode::kAudit, Mode::kSweep, Mode::kGenerate}) {
    if (name == to_string(m)) return m;
  }
  if (name == "asymptotic") return Mode::kAsymptotic;
  throw Error(ErrorKind::kConfig, "unknown mode '" + std::string(name) + "'");
}

struct SourceSpec {
  enum class Kind { kExplicit, kQ, kS };
  Kind kind = Kind::kExplicit;
  BitString bits;  // explicit
  ClassSpecQ q;
  ClassSpecS s;
};

struct TraceSchedule {
  bool exponential = false;
  std::uint64_t count = 1;  // integer schedule
  double c = 0.0;           // T = exp(c n^a)
  double a = 1.0;

  AnalyticT at(std::size_t n) const {
    return exponential ? AnalyticT::exponential(c, a, n)
                       : AnalyticT::integer(count);
  }
};

struct ExperimentConfig {
  std::optional<Mode> mode;
  SourceSpec source;
  double p = 0.5;
  std::optional<TraceSchedule> traces;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> n_grid;
  std::vector<double> c_grid;        // sweep: absolute exponents
  std::vector<double> c_ratio_grid;  // sweep: multiples of c*
  std::vector<std::string> estimators;
  std::size_t oracle_cap = OracleOptions::kDefaultCap;
  unsigned threads = 1;
  std::string out;
};

// ---------------------------------------------------------------------------
// Configuration parsing. Unknown keys are errors.

namespace detail {

using nlohmann::json;

inline void config_require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kConfig, what);
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                           const std::string& where) {
  config_require(obj.is_object(), where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    config_require(known, "unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, where + "." + key + ": " + e.what());
  }
}

inline SourceSpec parse_source(const json& j) {
  config_require(j.is_object() && j.contains("class"),
                 "source needs a 'class' of explicit, Q or S");
  const auto cls = get_as<std::string>(j, "class", "source");
  SourceSpec spec;
  try {
    if (cls == "explicit") {
      reject_unknown(j, {"class", "bits"}, "source");
      spec.kind = SourceSpec::Kind::kExplicit;
      spec.bits = BitString::from_string(get_as<std::string>(j, "bits", "source"));
      config_require(!spec.bits.empty(), "source.bits must be nonempty");
    } else if (cls == "Q") {
      reject_unknown(j, {"class", "pattern", "ell", "a"}, "source");
      spec.kind = SourceSpec::Kind::kQ;
      spec.q.pattern =
          BitString::from_string(get_as<std::string>(j, "pattern", "source"));
      spec.q.ell = get_as<double>(j, "ell", "source");
      spec.q.a = j.contains("a") ? get_as<double>(j, "a", "source") : 1.0;
      config_require(!spec.q.pattern.empty(), "source.pattern must be nonempty");
    } else if (cls == "S") {
      reject_unknown(j, {"class", "first_bit", "fractions"}, "source");
      spec.kind = SourceSpec::Kind::kS;
      const int first = j.contains("first_bit")
                            ? get_as<int>(j, "first_bit", "source")
                            : 0;
      config_require(first == 0 || first == 1, "source.first_bit must be 0 or 1");
      spec.s.first_bit = first == 1;
      spec.s.fractions = get_as<std::vector<double>>(j, "fractions", "source");
    } else {
      throw Error(ErrorKind::kConfig, "unknown source class '" + cls + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    throw Error(ErrorKind::kConfig, std::string("source: ") + e.what());
  }
  return spec;
}

inline TraceSchedule parse_traces(const json& j) {
  TraceSchedule t;
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    config_require(v >= 1, "traces must be at least 1");
    t.count = static_cast<std::uint64_t>(v);
    return t;
  }
  reject_unknown(j, {"c", "a"}, "traces");
  t.exponential = true;
  t.c = get_as<double>(j, "c", "traces");
  t.a = j.contains("a") ? get_as<double>(j, "a", "traces") : 1.0;
  config_require(t.c > 0.0, "traces.c must be positive");
  config_require(t.a > 0.0 && t.a <= 1.0, "traces.a must lie in (0,1]");
  return t;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::config_require;
  using detail::get_as;
  detail::reject_unknown(j,
                         {"mode", "source", "p", "traces", "trials", "seed", "n",
                          "c_grid", "c_ratio_grid", "estimators", "oracle_cap",
                          "threads", "out"},
                         "config");
  ExperimentConfig cfg;
  if (j.contains("mode")) cfg.mode = parse_mode(get_as<std::string>(j, "mode", "config"));
  config_require(j.contains("source"), "config needs a 'source'");
  cfg.source = detail::parse_source(j.at("source"));
  config_require(j.contains("p"), "config needs a deletion probability 'p'");
  cfg.p = get_as<double>(j, "p", "config");
  config_require(cfg.p >= 0.0 && cfg.p <= 1.0, "p must lie in [0,1]");
  if (j.contains("traces")) cfg.traces = detail::parse_traces(j.at("traces"));
  if (j.contains("trials")) {
    const auto v = get_as<std::int64_t>(j, "trials", "config");
    config_require(v >= 1, "trials must be at least 1");
    cfg.trials = static_cast<std::uint64_t>(v);
  }
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed", "config");
  if (j.contains("n")) {
    const auto& n = j.at("n");
    if (n.is_array()) {
      cfg.n_grid = get_as<std::vector<std::size_t>>(j, "n", "config");
    } else {
      cfg.n_grid = {get_as<std::size_t>(j, "n", "config")};
    }
  }
  if (cfg.source.kind == SourceSpec::Kind::kExplicit) {
    if (cfg.n_grid.empty()) cfg.n_grid = {cfg.source.bits.size()};
    for (auto n : cfg.n_grid) {
      config_require(n == cfg.source.bits.size(),
                     "n must equal the length of explicit bits");
    }
  }
  config_require(!cfg.n_grid.empty(), "config needs 'n' (integer or list)");
  for (auto n : cfg.n_grid) config_require(n >= 1, "n must be at least 1");
  if (j.contains("c_grid")) cfg.c_grid = get_as<std::vector<double>>(j, "c_grid", "config");
  if (j.contains("c_ratio_grid")) {
    cfg.c_ratio_grid = get_as<std::vector<double>>(j, "c_ratio_grid", "config");
  }
  for (double c : cfg.c_grid) config_require(c > 0.0, "c_grid entries must be positive");
  for (double c : cfg.c_ratio_grid) {
    config_require(c > 0.0, "c_ratio_grid entries must be positive");
  }
  if (j.contains("estimators")) {
    cfg.estimators = get_as<std::vector<std::string>>(j, "estimators", "config");
    for (const auto& e : cfg.estimators) {
      config_require(e == "e1bar" || e == "e2bar" || e == "mr_error" ||
                         e == "difficulty",
                     "unknown estimator '" + e + "'");
    }
  }
  if (j.contains("oracle_cap")) {
    cfg.oracle_cap = get_as<std::size_t>(j, "oracle_cap", "config");
    config_require(cfg.oracle_cap <= OracleOptions::kHardCap,
                   "oracle_cap above 62");
  }
  if (j.contains("threads")) {
    cfg.threads = get_as<unsigned>(j, "threads", "config");
    config_require(cfg.threads >= 1, "threads must be at least 1");
  }
  if (j.contains("out")) cfg.out = get_as<std::string>(j, "out", "config");
  return cfg;
}

inline ExperimentConfig parse_config_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Canonical JSON form of a configuration (used for the run fingerprint).
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  if (cfg.mode) j["mode"] = std::string(to_string(*cfg.mode));
  nlohmann::json src;
  switch (cfg.source.kind) {
    case SourceSpec::Kind::kExplicit:
      src = {{"class", "explicit"}, {"bits", cfg.source.bits.to_string()}};
      break;
    case SourceSpec::Kind::kQ:
      src = {{"class", "Q"},
             {"pattern", cfg.source.q.pattern.to_string()},
             {"ell", cfg.source.q.ell},
             {"a", cfg.source.q.a}};
      break;
    case SourceSpec::Kind::kS:
      src = {{"class", "S"},
             {"first_bit", cfg.source.s.first_bit ? 1 : 0},
             {"fractions", cfg.source.s.fractions}};
      break;
  }
  j["source"] = src;
  j["p"] = cfg.p;
  if (cfg.traces) {
    if (cfg.traces->exponential) {
      j["traces"] = {{"c", cfg.traces->c}, {"a", cfg.traces->a}};
    } else {
      j["traces"] = cfg.traces->count;
    }
  }
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["n"] = cfg.n_grid;
  if (!cfg.c_grid.empty()) j["c_grid"] = cfg.c_grid;
  if (!cfg.c_ratio_grid.empty()) j["c_ratio_grid"] = cfg.c_ratio_grid;
  if (!cfg.estimators.empty()) j["estimators"] = cfg.estimators;
  j["oracle_cap"] = cfg.oracle_cap;
  // threads and out are left out: neither changes the results.
  return j;
}

/// FNV-1a over the canonical configuration text.
inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  BitString bits;
  RunProfile profile;
  std::vector<PatternSpan> spans;     // spans whose E1 is tracked
  std::vector<NecPattern> patterns;   // declared necessary-condition patterns
  std::size_t main_span = 0;          // span used by sweeps
};

inline Instance make_instance(const SourceSpec& spec, std::size_t n) {
  Instance inst;
  switch (spec.kind) {
    case SourceSpec::Kind::kExplicit:
      inst.bits = spec.bits;
      break;
    case SourceSpec::Kind::kQ: {
      auto q = make_q_instance(spec.q, n);
      inst.bits = std::move(q.bits);
      inst.spans.push_back(q.span);
      inst.patterns.emplace_back(RepeatPattern{q.span});
      break;
    }
    case SourceSpec::Kind::kS:
      inst.bits = make_s_instance(spec.s, n);
      break;
  }
  inst.profile = run_decompose(inst.bits);
  if (spec.kind != SourceSpec::Kind::kQ) {
    const auto offsets = run_offsets(inst.profile);
    for (std::size_t i = 0; i < inst.profile.run_count(); ++i) {
      inst.spans.push_back({offsets[i], 1, inst.profile.lengths[i]});
      if (inst.profile.lengths[i] > inst.profile.lengths[inst.main_span]) {
        inst.main_span = i;
      }
    }
  }
  for (auto& p : run_patterns(inst.bits)) inst.patterns.push_back(std::move(p));
  return inst;
}

// ---------------------------------------------------------------------------
// Output rows

struct EstimateRow {
  std::string estimator;
  std::size_t n = 0;
  double p = 0.0;
  std::string t_or_c;
  std::string a;
  double value = 0.0;
  double ln_value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string method;
};

inline constexpr const char* kCsvHeader =
    "estimator,n,p,T_or_c,a,value,ln_value,ci_low,ci_high,trials,seed,method";

inline std::string format_double(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);  // shortest round trip
  return std::string(buf, res.ptr);
}

inline std::string to_csv(const std::vector<EstimateRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  auto opt = [](const auto& v) -> std::string {
    if (!v) return "";
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) {
      return format_double(*v);
    } else {
      return std::to_string(*v);
    }
  };
  for (const auto& r : rows) {
    os << r.estimator << ',' << r.n << ',' << format_double(r.p) << ','
       << r.t_or_c << ',' << r.a << ',' << format_double(r.value) << ','
       << format_double(r.ln_value) << ',' << opt(r.ci_low) << ','
       << opt(r.ci_high) << ',' << opt(r.trials) << ',' << opt(r.seed) << ','
       << r.method << '\n';
  }
  return os.str();
}

inline std::string run_metadata(const ExperimentConfig& cfg, Mode mode) {
  std::ostringstream os;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  os << "tool=tracerec\n"
     << "version=" << kVersion << '\n'
     << "mode=" << to_string(mode) << '\n'
     << "rng_algorithm=" << RngSpec::kAlgorithm << '\n'
     << "seed=" << cfg.seed << '\n'
     << "config_hash=fnv1a64:" << hash << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Everything measured on one trace set.
struct TrialOutcome {
  std::vector<bool> e1bar;  // per tracked span
  bool e2bar = false;
  bool mr_error = false;
  std::optional<bool> insufficient;
  bool nec_violation = false;  // some declared condition failed
  bool witness_invalid = false;
};

struct TrialOptions {
  bool oracle = false;   // run the brute-force sufficiency check
  bool witnesses = false;  // build and check necessary-condition witnesses
  OracleOptions oracle_options;
};

inline TrialOutcome run_trial(const Instance& inst, double p, std::uint64_t t,
                              const RngSpec& rng, std::uint64_t trial,
                              const TrialOptions& options) {
  const auto set = sample_traces(inst.bits, p, t, rng, trial);
  TrialOutcome out;
  out.e1bar.reserve(inst.spans.size());
  for (const auto& span : inst.spans) out.e1bar.push_back(!holds_e1(set, span));
  out.e2bar = !holds_e2(set, inst.profile).holds;
  const auto traces = traces_of(set);
  out.mr_error = !maximal_runs(inst.bits.size(), traces).recovers(inst.bits);
  if (options.oracle) {
    out.insufficient =
        !is_levenshtein_sufficient(inst.bits, traces, options.oracle_options)
             .sufficient;
  }
  if (options.witnesses) {
    for (const auto& v : detect_nec_violations(inst.bits, set, inst.patterns)) {
      out.nec_violation = true;
      bool valid = v.alternative.size() == inst.bits.size() &&
                   v.alternative != inst.bits;
      for (const auto& tr : traces) valid = valid && is_subsequence(tr, v.alternative);
      out.witness_invalid = out.witness_invalid || !valid;
    }
  }
  return out;
}

/// Integer counts over a block of trials. Merging is order independent, so
/// totals do not depend on how trials were split across threads.
struct Tally {
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> e1bar;
  std::uint64_t e2bar = 0;
  std::uint64_t mr_error = 0;
  std::uint64_t insufficient = 0;
  // Paired implication audits; each must stay at zero.
  std::uint64_t e1bar_but_sufficient = 0;
  std::uint64_t e2_but_mr_error = 0;
  std::uint64_t witness_invalid = 0;
  std::uint64_t violation_but_sufficient = 0;
  std::optional<std::uint64_t> first_offending_trial;

  void add(std::uint64_t trial, const TrialOutcome& o) {
    ++trials;
    if (e1bar.size() < o.e1bar.size()) e1bar.resize(o.e1bar.size());
    bool any_e1bar = false;
    for (std::size_t k = 0; k < o.e1bar.size(); ++k) {
      e1bar[k] += o.e1bar[k];
      any_e1bar = any_e1bar || o.e1bar[k];
    }
    e2bar += o.e2bar;
    mr_error += o.mr_error;
    bool offending = false;
    if (!o.e2bar && o.mr_error) {
      ++e2_but_mr_error;
      offending = true;
    }
    if (o.witness_invalid) {
      ++witness_invalid;
      offending = true;
    }
    if (o.insufficient) {
      insufficient += *o.insufficient;
      if (any_e1bar && !*o.insufficient) {
        ++e1bar_but_sufficient;
        offending = true;
      }
      if (o.nec_violation && !*o.insufficient) {
        ++violation_but_sufficient;
        offending = true;
      }
    }
    if (offending && !first_offending_trial) first_offending_trial = trial;
  }

  void merge(const Tally& other) {
    trials += other.trials;
    if (e1bar.size() < other.e1bar.size()) e1bar.resize(other.e1bar.size());
    for (std::size_t k = 0; k < other.e1bar.size(); ++k) e1bar[k] += other.e1bar[k];
    e2bar += other.e2bar;
    mr_error += other.mr_error;
    insufficient += other.insufficient;
    e1bar_but_sufficient += other.e1bar_but_sufficient;
    e2_but_mr_error += other.e2_but_mr_error;
    witness_invalid += other.witness_invalid;
    violation_but_sufficient += other.violation_but_sufficient;
    if (other.first_offending_trial &&
        (!first_offending_trial ||
         *other.first_offending_trial < *first_offending_trial)) {
      first_offending_trial = other.first_offending_trial;
    }
  }

  bool audit_clean() const {
    return e1bar_but_sufficient == 0 && e2_but_mr_error == 0 &&
           witness_invalid == 0 && violation_but_sufficient == 0;
  }
};

/// Runs trials [0, trials) split into contiguous blocks over `threads`.
inline Tally run_trials(const Instance& inst, double p, std::uint64_t t,
                        std::uint64_t trials, std::uint64_t seed,
                        const TrialOptions& options, unsigned threads = 1) {
  const RngSpec rng{seed};
  threads = std::max(1u, threads);
  std::vector<Tally> partial(threads);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = trials * w / threads;
    const std::uint64_t end = trials * (w + 1) / threads;
    for (std::uint64_t k = begin; k < end; ++k) {
      partial[w].add(k, run_trial(inst, p, t, rng, k, options));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  Tally total;
  for (const auto& part : partial) total.merge(part);
  return total;
}

// ---------------------------------------------------------------------------
// Experiment driver

struct AuditReport {
  bool clean = true;
  std::optional<std::uint64_t> offending_trial;
  std::size_t offending_n = 0;
};

struct ExperimentResult {
  std::vector<EstimateRow> rows;
  AuditReport audit;
  std::string generated;  // JSON text, generate mode only
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trace_label(const TraceSchedule& s) {
  return s.exponential ? format_double(s.c) : std::to_string(s.count);
}

inline std::string exponent_label(const TraceSchedule& s) {
  return s.exponential ? format_double(s.a) : "";
}

inline EstimateRow report_row(std::string name, std::size_t n, double p,
                              std::string t_or_c, std::string a,
                              const ProbReport& r, std::string method_suffix = "") {
  EstimateRow row;
  row.estimator = std::move(name);
  row.n = n;
  row.p = p;
  row.t_or_c = std::move(t_or_c);
  row.a = std::move(a);
  row.value = r.value;
  row.ln_value = r.ln_value;
  if (r.ci) {
    row.ci_low = r.ci->first;
    row.ci_high = r.ci->second;
  }
  row.method = std::string(to_string(r.method));
  if (r.cancellation) row.method += ";cancellation";
  if (r.outside_validity) row.method += ";outside-validity";
  row.method += method_suffix;
  return row;
}

inline std::vector<double> run_lengths_real(const RunProfile& profile) {
  return {profile.lengths.begin(), profile.lengths.end()};
}

inline const TraceSchedule& need_traces(const ExperimentConfig& cfg) {
  config_require(cfg.traces.has_value(), "config needs 'traces'");
  return *cfg.traces;
}

inline void exact_rows(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto& sched = need_traces(cfg);
  config_require(cfg.p > 0.0 && cfg.p < 1.0, "exact mode needs p in (0,1)");
  for (std::size_t n : cfg.n_grid) {
    const Instance inst = make_instance(cfg.source, n);
    const AnalyticT t = sched.at(n);
    for (std::size_t k = 0; k < inst.spans.size(); ++k) {
      const auto& span = inst.spans[k];
      res.rows.push_back(report_row(
          "e1bar_span" + std::to_string(k), n, cfg.p, trace_label(sched),
          exponent_label(sched),
          prob_e1bar_exact(span.period, static_cast<double>(span.copies), cfg.p, t)));
    }
    const auto lengths = run_lengths_real(inst.profile);
    if (lengths.size() <= 20) {
      res.rows.push_back(report_row("e2bar", n, cfg.p, trace_label(sched),
                                    exponent_label(sched),
                                    prob_e2bar_exact_mgf(lengths, cfg.p, t)));
      if (!sched.exponential && sched.count <= 10000) {
        res.rows.push_back(report_row("e2bar_sum", n, cfg.p, trace_label(sched),
                                      exponent_label(sched),
                                      prob_e2bar_exact_sum(lengths, cfg.p, sched.count)));
      }
    } else if (sched.exponential) {
      res.warnings.push_back("n=" + std::to_string(n) +
                             ": more than 20 runs, e2bar uses the asymptotic form");
      std::vector<double> fractions;
      for (double u : lengths) fractions.push_back(u / t.scale());
      res.rows.push_back(report_row("e2bar", n, cfg.p, trace_label(sched),
                                    exponent_label(sched),
                                    prob_e2bar_asymptotic(fractions, cfg.p, sched.c, t)));
    } else {
      res.warnings.push_back("n=" + std::to_string(n) +
                             ": more than 20 runs, e2bar skipped");
    }
  }
}

inline void asymptotic_rows(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto& sched = need_traces(cfg);
  config_require(sched.exponential,
                 "asymptotic mode needs an exponential trace schedule {c, a}");
  config_require(cfg.p > 0.0 && cfg.p < 1.0, "asymptotic mode needs p in (0,1)");
  for (std::size_t n : cfg.n_grid) {
    const Instance inst = make_instance(cfg.source, n);
    const AnalyticT t = sched.at(n);
    const double scale = t.scale();
    for (std::size_t k = 0; k < inst.spans.size(); ++k) {
      const auto& span = inst.spans[k];
      const ThresholdParams params{span.period,
                                   static_cast<double>(span.copies) / scale, cfg.p};
      res.rows.push_back(report_row("e1bar_span" + std::to_string(k), n, cfg.p,
                                    trace_label(sched), exponent_label(sched),
                                    prob_e1bar_asymptotic(params, sched.c, t)));
    }
    std::vector<double> fractions;
    for (auto len : inst.profile.lengths) {
      fractions.push_back(static_cast<double>(len) / scale);
    }
    res.rows.push_back(report_row("e2bar", n, cfg.p, trace_label(sched),
                                  exponent_label(sched),
                                  prob_e2bar_asymptotic(fractions, cfg.p, sched.c, t)));
  }
}

inline double source_c_star(const SourceSpec& spec, const Instance& inst,
                            double p) {
  switch (spec.kind) {
    case SourceSpec::Kind::kQ:
      return c_star(spec.q.period(), spec.q.ell, p);
    case SourceSpec::Kind::kS:
      return c_star(1, spec.s.longest_fraction(), p);
    case SourceSpec::Kind::kExplicit: {
      const auto& span = inst.spans[inst.main_span];
      return c_star(1, static_cast<double>(span.copies) /
                           static_cast<double>(inst.bits.size()), p);
    }
  }
  return 0.0;
}

inline void sweep_rows(const ExperimentConfig& cfg, ExperimentResult& res) {
  config_require(cfg.p > 0.0 && cfg.p < 1.0, "sweep needs p in (0,1)");
  config_require(!cfg.c_grid.empty() || !cfg.c_ratio_grid.empty(),
                 "sweep needs 'c_grid' or 'c_ratio_grid'");
  double a = 1.0;
  if (cfg.traces) {
    config_require(cfg.traces->exponential,
                   "sweep needs an exponential trace schedule (or none)");
    a = cfg.traces->a;
  } else if (cfg.source.kind == SourceSpec::Kind::kQ) {
    a = cfg.source.q.a;
  }
  const Instance first = make_instance(cfg.source, cfg.n_grid.front());
  const double threshold = source_c_star(cfg.source, first, cfg.p);
  std::vector<double> cs = cfg.c_grid;
  for (double ratio : cfg.c_ratio_grid) cs.push_back(ratio * threshold);

  for (double c : cs) {
    const double rel = (c - threshold) / threshold;
    const std::string regime =
        std::abs(rel) <= 1e-12 ? "at" : (rel < 0 ? "below" : "above");
    const std::string suffix = ";regime=" + regime;
    for (std::size_t n : cfg.n_grid) {
      const Instance inst = make_instance(cfg.source, n);
      const AnalyticT t = AnalyticT::exponential(c, a, n);
      const double scale = t.scale();
      const auto& span = inst.spans[inst.main_span];
      const ThresholdParams params{span.period,
                                   static_cast<double>(span.copies) / scale, cfg.p};
      const std::string c_label = format_double(c);
      const std::string a_label = format_double(a);
      res.rows.push_back(report_row(
          "e1bar", n, cfg.p, c_label, a_label,
          prob_e1bar_exact(span.period, static_cast<double>(span.copies), cfg.p, t),
          suffix));
      res.rows.push_back(report_row("e1bar", n, cfg.p, c_label, a_label,
                                    prob_e1bar_asymptotic(params, c, t), suffix));
      if (cfg.source.kind == SourceSpec::Kind::kQ) continue;
      const auto lengths = run_lengths_real(inst.profile);
      if (lengths.size() > 20) continue;
      std::vector<double> fractions;
      for (double u : lengths) fractions.push_back(u / scale);
      res.rows.push_back(report_row("e2bar", n, cfg.p, c_label, a_label,
                                    prob_e2bar_exact_mgf(lengths, cfg.p, t), suffix));
      res.rows.push_back(report_row("e2bar", n, cfg.p, c_label, a_label,
                                    prob_e2bar_asymptotic(fractions, cfg.p, c, t),
                                    suffix));
    }
  }
}

inline std::uint64_t integer_traces(const TraceSchedule& sched, std::size_t n) {
  const auto t = sched.at(n).as_integer();
  if (!t) {
    throw Error(ErrorKind::kInfeasible,
                "trace count exceeds 2^63-1; simulation needs an integer T");
  }
  return *t;
}

inline bool wants(const ExperimentConfig& cfg, const char* name) {
  return cfg.estimators.empty() ||
         std::find(cfg.estimators.begin(), cfg.estimators.end(), name) !=
             cfg.estimators.end();
}

inline EstimateRow mc_row(std::string name, std::size_t n,
                          const ExperimentConfig& cfg, std::uint64_t t,
                          std::uint64_t count, std::uint64_t trials) {
  EstimateRow row = report_row(std::move(name), n, cfg.p, std::to_string(t),
                               "", monte_carlo_report(count, trials));
  row.trials = trials;
  row.seed = cfg.seed;
  return row;
}

inline void simulation_rows(const ExperimentConfig& cfg, bool audit,
                            ExperimentResult& res) {
  const auto& sched = need_traces(cfg);
  for (std::size_t n : cfg.n_grid) {
    const Instance inst = make_instance(cfg.source, n);
    const std::uint64_t t = integer_traces(sched, n);
    TrialOptions options;
    options.oracle_options.cap = cfg.oracle_cap;
    options.witnesses = audit;
    const bool explicit_difficulty =
        std::find(cfg.estimators.begin(), cfg.estimators.end(), "difficulty") !=
        cfg.estimators.end();
    if (audit || explicit_difficulty) {
      if (n > cfg.oracle_cap) {
        throw Error(ErrorKind::kInfeasible,
                    "n=" + std::to_string(n) + " exceeds the oracle cap " +
                        std::to_string(cfg.oracle_cap));
      }
      options.oracle = true;
    } else if (wants(cfg, "difficulty") && n <= cfg.oracle_cap) {
      options.oracle = true;
    }
    if (options.oracle && cfg.oracle_cap > OracleOptions::kDefaultCap) {
      res.warnings.push_back("oracle cap raised above 20; enumeration may be slow");
    }

    const Tally tally = run_trials(inst, cfg.p, t, cfg.trials, cfg.seed, options,
                                   cfg.threads);
    if (!audit && tally.e2_but_mr_error != 0) {
      throw std::logic_error("Maximal Runs failed although E2 held");
    }

    if (wants(cfg, "e1bar")) {
      for (std::size_t k = 0; k < inst.spans.size(); ++k) {
        res.rows.push_back(mc_row("e1bar_span" + std::to_string(k), n, cfg, t,
                                  tally.e1bar[k], tally.trials));
      }
    }
    if (wants(cfg, "e2bar")) {
      res.rows.push_back(mc_row("e2bar", n, cfg, t, tally.e2bar, tally.trials));
    }
    if (wants(cfg, "mr_error")) {
      res.rows.push_back(mc_row("mr_error", n, cfg, t, tally.mr_error, tally.trials));
    }
    if (options.oracle) {
      res.rows.push_back(
          mc_row("difficulty", n, cfg, t, tally.insufficient, tally.trials));
    }
    if (audit) {
      auto count_row = [&](const char* name, std::uint64_t count) {
        EstimateRow row;
        row.estimator = name;
        row.n = n;
        row.p = cfg.p;
        row.t_or_c = std::to_string(t);
        row.value = static_cast<double>(count);
        row.ln_value = std::log(row.value);
        row.trials = tally.trials;
        row.seed = cfg.seed;
        row.method = "audit-count";
        res.rows.push_back(row);
      };
      count_row("audit_e1bar_and_sufficient", tally.e1bar_but_sufficient);
      count_row("audit_e2_and_mr_error", tally.e2_but_mr_error);
      count_row("audit_witness_invalid", tally.witness_invalid);
      count_row("audit_violation_and_sufficient", tally.violation_but_sufficient);
      if (!tally.audit_clean() && res.audit.clean) {
        res.audit.clean = false;
        res.audit.offending_trial = tally.first_offending_trial;
        res.audit.offending_n = n;
      }
    }
  }
}

inline void generate_output(const ExperimentConfig& cfg, ExperimentResult& res) {
  nlohmann::json all = nlohmann::json::array();
  for (std::size_t n : cfg.n_grid) {
    const Instance inst = make_instance(cfg.source, n);
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : inst.spans) {
      spans.push_back({{"offset", s.offset}, {"period", s.period}, {"copies", s.copies}});
    }
    all.push_back({{"n", n},
                   {"bits", inst.bits.to_string()},
                   {"first_bit", inst.profile.first_bit ? 1 : 0},
                   {"runs", inst.profile.lengths},
                   {"spans", spans}});
  }
  res.generated = all.dump(2) + "\n";
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, Mode mode) {
  if (cfg.mode && *cfg.mode != mode) {
    throw Error(ErrorKind::kConfig, "config mode '" +
                                        std::string(to_string(*cfg.mode)) +
                                        "' does not match the subcommand");
  }
  ExperimentResult res;
  switch (mode) {
    case Mode::kExact: detail::exact_rows(cfg, res); break;
    case Mode::kAsymptotic: detail::asymptotic_rows(cfg, res); break;
    case Mode::kSweep: detail::sweep_rows(cfg, res); break;
    case Mode::kMonteCarlo: detail::simulation_rows(cfg, false, res); break;
    case Mode::kAudit: detail::simulation_rows(cfg, true, res); break;
    case Mode::kGenerate: detail::generate_output(cfg, res); break;
  }
  return res;
}

}  // namespace tracerec
