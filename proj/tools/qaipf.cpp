// Copyright 2026 The qaipf Authors
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

// Command-line driver: instance generation, presampling, estimation, exact
// analysis, parameter scans and CSV export. All parallelism lives below the
// library calls; every record embeds the resolved configuration.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qaipf/qaipf.hpp"

namespace {

using qaipf::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitIo = 5;

struct RunConfig {
  std::string command;
  std::string model = "sk";
  int n = 0;
  std::uint64_t seed = 0;
  double clause_ratio = 4.25;
  double p0 = 1.0 / 7.0;
  double p1 = 1.0 / 14.0;
  double p2 = 3.0 / 14.0;
  double tau = 100.0;
  double dt = 0.01;
  double gamma = 1.0;
  std::vector<double> betas{10.0};
  std::string sampler = "je";
  std::optional<double> alpha;
  int n_e = 1;
  std::uint64_t m_ps = 100;
  std::uint64_t m_s = 1000;
  std::uint64_t instances = 100;
  unsigned workers = 0;
  std::string instance_path;
  std::string presample_path;
  std::string in_path;
  std::string out;
  std::string locality_prefix;
  bool reuse = false;
  bool trajectories = true;
  std::string axis;
  std::vector<std::string> values;
  double tau0 = 0.0;
  bool fit = false;

  [[nodiscard]] qaipf::Schedule schedule() const { return {tau, dt, gamma}; }
  [[nodiscard]] qaipf::Sat3Parameters sat3() const { return {clause_ratio, p0, p1, p2}; }
};

Json config_json(const RunConfig& c) {
  Json j{{"command", c.command},
         {"model", c.model},
         {"n", c.n},
         {"seed", c.seed},
         {"clause_ratio", c.clause_ratio},
         {"p0", c.p0},
         {"p1", c.p1},
         {"p2", c.p2},
         {"tau", c.tau},
         {"dt", c.dt},
         {"gamma", c.gamma},
         {"betas", c.betas},
         {"sampler", c.sampler},
         {"n_e", c.n_e},
         {"m_ps", c.m_ps},
         {"m_s", c.m_s},
         {"instances", c.instances},
         {"workers", c.workers},
         {"instance", c.instance_path},
         {"presample", c.presample_path},
         {"reuse", c.reuse},
         {"trajectories", c.trajectories},
         {"axis", c.axis},
         {"values", c.values},
         {"tau0", c.tau0}};
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
  return j;
}

// Integers may be written in scientific notation ("1e4") as long as the value is integral.
std::uint64_t parse_integer(const std::string& text, const std::string& flag) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  if (const auto [ptr, ec] = std::from_chars(text.data(), end, v); ec == std::errc{} && ptr == end) {
    return v;
  }
  double d = 0.0;
  if (const auto [ptr, ec] = std::from_chars(text.data(), end, d); ec == std::errc{} && ptr == end) {
    if (std::isfinite(d) && d >= 0.0 && d < 18446744073709551616.0 && std::floor(d) == d) {
      return static_cast<std::uint64_t>(d);
    }
  }
  throw CLI::ValidationError(flag, "expected a nonnegative integer, got '" + text + "'");
}

template <typename T>
CLI::Option* add_integer(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option_function<std::string>(
      name,
      [&target, name](const std::string& s) {
        const auto v = parse_integer(s, name);
        if (v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
          throw CLI::ValidationError(name, "value out of range");
        }
        target = static_cast<T>(v);
      },
      help);
}

class Output {
 public:
  explicit Output(const std::string& path, bool append = false) : path_(path), append_(append) {}
  void line(const std::string& s) {
    if (path_.empty()) {
      std::cout << s << '\n' << std::flush;
    } else {
      qaipf::write_text_file(path_, s + "\n", append_ || !first_);
      first_ = false;
    }
  }

 private:
  std::string path_;
  bool append_;
  bool first_ = true;
};

qaipf::IsingInstance make_instance(const RunConfig& c, int n, std::uint64_t seed) {
  return qaipf::model_kind_from_string(c.model) == qaipf::ModelKind::kSK ? qaipf::sk_instance(n, seed)
                                                                         : qaipf::sat3_instance(n, c.sat3(), seed);
}

// --- gen ----------------------------------------------------------------------

int cmd_gen(const RunConfig& c) {
  const auto inst = make_instance(c, c.n, c.seed);
  const Json j = inst;
  const auto text = j.dump(2) + "\n";
  const auto d = qaipf::digest(j);
  if (c.out.empty()) {
    std::cout << text;
    std::cerr << d << '\n';
  } else {
    qaipf::write_text_file(c.out, text);
    std::cout << d << '\n';
  }
  return kExitOk;
}

// --- presample ----------------------------------------------------------------

int cmd_presample(const RunConfig& c) {
  const auto inst = qaipf::read_instance(c.instance_path);
  const auto data = qaipf::presample(inst, c.schedule(), c.n_e, c.m_ps, c.seed, c.workers);
  Json j = data;
  j["format_version"] = qaipf::kFormatVersion;
  j["instance_digest"] = qaipf::instance_digest(inst);
  const auto text = j.dump() + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    qaipf::write_text_file(c.out, text);
  }
  return kExitOk;
}

// --- estimate -----------------------------------------------------------------

int cmd_estimate(const RunConfig& c) {
  const auto inst = qaipf::read_instance(c.instance_path);
  const auto mode = qaipf::sampler_mode_from_string(c.sampler);
  const qaipf::Evolver evolver(qaipf::target_spectrum(inst), c.schedule());
  const auto inst_digest = qaipf::instance_digest(inst);
  const Json config = config_json(c);

  std::optional<qaipf::TransitionMatrix> matrix;
  auto exact_matrix = [&]() -> const qaipf::TransitionMatrix& {
    if (!matrix) {
      if (inst.n > qaipf::kExactMuMaxSpins) {
        throw qaipf::ResourceLimit("sampler '" + c.sampler + "' needs exact mu, capped at n <= 14");
      }
      matrix = evolver.transition_matrix(c.workers);
    }
    return *matrix;
  };
  std::optional<qaipf::PresampleData> pre;
  if (mode == qaipf::SamplerMode::kPractical) {
    if (!c.presample_path.empty()) {
      pre = qaipf::read_json_file(c.presample_path).get<qaipf::PresampleData>();
      if (pre->n != inst.n) {
        throw qaipf::InvalidArgument("presample file does not match the instance size");
      }
    } else {
      pre = qaipf::presample(evolver, c.n_e, c.m_ps, c.seed, c.workers);
    }
  }

  Output out(c.out, true);
  bool numeric_failure = false;
  for (const double beta : c.betas) {
    Json rec{{"format_version", qaipf::kFormatVersion},
             {"figure_id", "fig3"},
             {"config", config},
             {"instance_digest", inst_digest},
             {"kind", qaipf::to_string(inst.kind)},
             {"n", inst.n},
             {"beta", beta},
             {"sampler", c.sampler}};
    try {
      std::optional<qaipf::SamplingDistribution> dist;
      switch (mode) {
        case qaipf::SamplerMode::kJeGibbs:
          dist = qaipf::je_gibbs(beta, inst.n);
          break;
        case qaipf::SamplerMode::kVariationalGibbs: {
          const double alpha =
              c.alpha ? *c.alpha
                      : qaipf::solve_alpha_exact(qaipf::mu_from_transitions(exact_matrix(), evolver.spectrum(), beta),
                                                 inst.n)
                            .alpha;
          rec["alpha"] = alpha;
          dist = qaipf::variational_gibbs(alpha, inst.n);
          break;
        }
        case qaipf::SamplerMode::kExactOptimal:
          dist = qaipf::exact_optimal(qaipf::mu_from_transitions(exact_matrix(), evolver.spectrum(), beta));
          break;
        case qaipf::SamplerMode::kPractical: {
          const auto mom = qaipf::presample_moments(*pre, beta);
          const auto sol = qaipf::solve_alpha_practical(mom);
          rec["alpha"] = sol.alpha;
          rec["alpha_sign_changes"] = sol.sign_changes;
          if (sol.ambiguous()) {
            std::cerr << "warning: practical alpha condition has " << sol.sign_changes.size()
                      << " sign changes at beta=" << beta << "; using alpha=" << sol.alpha << '\n';
          }
          if (c.reuse) {
            const auto r = qaipf::estimate_z_with_reuse(evolver, *pre, sol.alpha, beta, c.m_s, c.seed, c.workers);
            rec["z_est"] = r.z_est;
            rec["standard_error"] = r.standard_error;
            rec["low_part"] = r.low_part;
            rec["low_standard_error"] = r.low_standard_error;
            rec["high"] = r.high;
            rec["m_s"] = c.m_s;
            rec["seed"] = c.seed;
            rec["schedule"] = c.schedule();
            out.line(rec.dump());
            continue;
          }
          dist = qaipf::practical_distribution(mom, sol.alpha);
          break;
        }
      }
      const auto result = matrix ? qaipf::estimate_z(qaipf::row_source(*matrix), evolver.spectrum(), *dist, beta,
                                                     c.m_s, c.seed, c.workers, c.trajectories)
                                 : qaipf::estimate_z(evolver, *dist, beta, c.m_s, c.seed, c.workers, c.trajectories);
      Json r = result;
      r["schedule"] = c.schedule();
      r.erase("beta");
      r.erase("sampler");
      rec.update(r);
      rec["sampler_detail"] = result.sampler;
    } catch (const qaipf::NoRoot& e) {
      numeric_failure = true;
      rec["error"] = "no-root";
      rec["message"] = e.what();
      rec["f_lo"] = e.f_lo();
      rec["f_hi"] = e.f_hi();
      std::cerr << "beta=" << beta << ": " << e.what() << '\n';
    }
    out.line(rec.dump());
  }
  return numeric_failure ? kExitNumeric : kExitOk;
}

// --- oracle -------------------------------------------------------------------

void write_matrix_csv(const std::string& path, const std::vector<double>& values, int n) {
  std::ostringstream s;
  s.precision(17);
  s << "j1\\j2";
  for (int j = 0; j < n; ++j) {
    s << ',' << j;
  }
  s << '\n';
  for (int i = 0; i < n; ++i) {
    s << i;
    for (int j = 0; j < n; ++j) {
      s << ',';
      const double v = values[static_cast<std::size_t>(i * n + j)];
      if (!std::isnan(v)) {
        s << v;
      }
    }
    s << '\n';
  }
  qaipf::write_text_file(path, s.str());
}

int cmd_oracle(const RunConfig& c) {
  const auto inst = qaipf::read_instance(c.instance_path);
  const auto matrix = qaipf::exact_transitions(inst, c.schedule(), c.workers);
  const auto spectrum = qaipf::target_spectrum(inst);
  Json analyses = Json::array();
  std::optional<double> first_alpha;
  for (const double beta : c.betas) {
    const auto a = qaipf::analyze_exact(matrix, spectrum, beta);
    if (!first_alpha) {
      first_alpha = a.alpha_star;
    }
    analyses.push_back(a);
  }
  const Json doc{{"format_version", qaipf::kFormatVersion},
                 {"figure_id", "figS2"},
                 {"config", config_json(c)},
                 {"instance_digest", qaipf::instance_digest(inst)},
                 {"analyses", analyses}};
  if (c.out.empty()) {
    std::cout << doc.dump() << '\n';
  } else {
    qaipf::write_text_file(c.out, doc.dump() + "\n");
  }
  if (!c.locality_prefix.empty()) {
    const double alpha = c.alpha.value_or(*first_alpha);
    const auto loc = qaipf::locality_from_mu(qaipf::mu_from_transitions(matrix, spectrum, c.betas.front()), alpha);
    write_matrix_csv(c.locality_prefix + "_a.csv", loc.a, loc.n);
    write_matrix_csv(c.locality_prefix + "_b.csv", loc.b, loc.n);
    write_matrix_csv(c.locality_prefix + "_c.csv", loc.c, loc.n);
    std::cerr << "locality correlation a~b " << loc.correlation_ab << ", b~c " << loc.correlation_bc << '\n';
  }
  return kExitOk;
}

// --- scan ---------------------------------------------------------------------

struct ScanCell {
  int n = 0;
  double tau = 0.0;
  double beta = 0.0;
  std::string sampler;
  std::string value;
};

int cmd_scan(const RunConfig& c) {
  static const std::map<std::string, std::string> kFigure{
      {"tau", "fig2b"}, {"beta", "fig3a1"}, {"n", "fig3a2"}, {"sampler", "fig3"}};
  if (!kFigure.contains(c.axis)) {
    throw qaipf::InvalidArgument("scan axis must be one of tau, beta, n, sampler");
  }
  if (c.values.empty()) {
    throw qaipf::InvalidArgument("scan needs a nonempty --values list");
  }
  if (c.axis != "n" && c.n < 1) {
    throw qaipf::InvalidArgument("scan needs --n unless the axis is n");
  }
  std::vector<ScanCell> cells;
  for (const auto& v : c.values) {
    ScanCell cell{c.n, c.tau, c.betas.front(), c.sampler, v};
    if (c.axis == "tau") {
      cell.tau = std::stod(v);
    } else if (c.axis == "beta") {
      cell.beta = std::stod(v);
    } else if (c.axis == "n") {
      cell.n = static_cast<int>(parse_integer(v, "--values"));
    } else {
      (void)qaipf::sampler_mode_from_string(v);
      cell.sampler = v;
    }
    cells.push_back(cell);
  }
  struct Acc {
    qaipf::CompensatedSum relvar, alpha_star, alpha_practical;
  };
  std::vector<Acc> acc(cells.size());
  for (std::uint64_t i = 0; i < c.instances; ++i) {
    // Same instance seeds in every cell, so cells differ only in the scanned parameter.
    const std::uint64_t inst_seed = qaipf::make_stream(c.seed, qaipf::StreamDomain::kScan, i)();
    std::map<std::pair<int, double>, qaipf::TransitionMatrix> matrices;
    std::map<int, qaipf::IsingInstance> instances;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto& cell = cells[k];
      if (!instances.contains(cell.n)) {
        instances.emplace(cell.n, make_instance(c, cell.n, inst_seed));
      }
      const auto& inst = instances.at(cell.n);
      const auto spectrum = qaipf::target_spectrum(inst);
      const qaipf::Schedule schedule{cell.tau, c.dt, c.gamma};
      const auto key = std::make_pair(cell.n, cell.tau);
      if (!matrices.contains(key)) {
        matrices.emplace(key, qaipf::exact_transitions(inst, schedule, c.workers));
      }
      const auto mu = qaipf::mu_from_transitions(matrices.at(key), spectrum, cell.beta);
      const double z1 = qaipf::exact_partition(spectrum, cell.beta);
      const double alpha_star = qaipf::solve_alpha_exact(mu, cell.n).alpha;
      std::optional<qaipf::SamplingDistribution> dist;
      switch (qaipf::sampler_mode_from_string(cell.sampler)) {
        case qaipf::SamplerMode::kJeGibbs:
          dist = qaipf::je_gibbs(cell.beta, cell.n);
          break;
        case qaipf::SamplerMode::kVariationalGibbs:
          dist = qaipf::variational_gibbs(c.alpha.value_or(alpha_star), cell.n);
          break;
        case qaipf::SamplerMode::kExactOptimal:
          dist = qaipf::exact_optimal(mu);
          break;
        case qaipf::SamplerMode::kPractical: {
          const qaipf::Evolver evolver(spectrum, schedule);
          const auto data = qaipf::presample(evolver, c.n_e, c.m_ps, inst_seed, c.workers);
          const auto mom = qaipf::presample_moments(data, cell.beta);
          const double a = qaipf::solve_alpha_practical(mom).alpha;
          acc[k].alpha_practical.add(a);
          dist = qaipf::practical_distribution(mom, a);
          break;
        }
      }
      acc[k].relvar.add(qaipf::exact_variance(*dist, mu, z1) / (z1 * z1));
      acc[k].alpha_star.add(alpha_star);
    }
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "figure_id,axis,value,model,n,tau,beta,sampler,instances,mean_relvar,log2_mean_relvar,mean_alpha_star,"
         "mean_alpha_practical,total_cost\n";
  const auto count = static_cast<double>(c.instances);
  std::vector<qaipf::ScalingPoint> points;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& cell = cells[k];
    const double relvar = acc[k].relvar.value() / count;
    csv << kFigure.at(c.axis) << ',' << c.axis << ',' << cell.value << ',' << c.model << ',' << cell.n << ','
        << cell.tau << ',' << cell.beta << ',' << cell.sampler << ',' << c.instances << ',' << relvar << ','
        << std::log2(relvar) << ',' << acc[k].alpha_star.value() / count << ',';
    if (cell.sampler == "practical") {
      csv << acc[k].alpha_practical.value() / count;
    }
    csv << ',' << qaipf::total_cost(c.tau0, cell.tau, relvar) << '\n';
    points.push_back({cell.n, relvar});
  }
  if (c.out.empty()) {
    std::cout << csv.str();
  } else {
    qaipf::write_text_file(c.out, csv.str());
  }
  if (c.fit) {
    if (c.axis != "n") {
      throw qaipf::InvalidArgument("--fit-gamma needs --axis n");
    }
    const auto fit = qaipf::fit_gamma(points);
    (c.out.empty() ? std::cerr : std::cout) << "gamma " << fit.gamma << " intercept " << fit.intercept
                                            << " residual " << fit.residual_norm << '\n';
  }
  return kExitOk;
}

// --- export-csv ---------------------------------------------------------------

int cmd_export_csv(const RunConfig& c) {
  std::istringstream in(qaipf::read_text_file(c.in_path));
  std::ostringstream csv;
  csv.precision(17);
  csv << "figure_id,instance_digest,kind,n,sampler,beta,alpha,tau,dt,gamma,m_s,seed,z_est,empirical_variance,"
         "standard_error,error\n";
  auto field = [](const Json& j, const char* key) -> std::string {
    if (!j.contains(key) || j.at(key).is_null()) {
      return "";
    }
    const auto& v = j.at(key);
    if (v.is_string()) {
      return v.get<std::string>();
    }
    return v.dump();
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::parse_error&) {
      throw qaipf::InvalidArgument("line " + std::to_string(lineno) + " of '" + c.in_path + "' is not JSON");
    }
    const Json sched = rec.value("schedule", Json::object());
    csv << field(rec, "figure_id") << ',' << field(rec, "instance_digest") << ',' << field(rec, "kind") << ','
        << field(rec, "n") << ',' << field(rec, "sampler") << ',' << field(rec, "beta") << ','
        << field(rec, "alpha") << ',' << field(sched, "tau") << ',' << field(sched, "dt") << ','
        << field(sched, "gamma") << ',' << field(rec, "m_s") << ',' << field(rec, "seed") << ','
        << field(rec, "z_est") << ',' << field(rec, "empirical_variance") << ',' << field(rec, "standard_error")
        << ',' << field(rec, "error") << '\n';
  }
  if (c.out.empty()) {
    std::cout << csv.str();
  } else {
    qaipf::write_text_file(c.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising partition functions from reverse-annealing trajectories"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  RunConfig cfg;
  cfg.workers = qaipf::default_workers();
  bool show_version = false;
  add_integer(&app, "--seed", cfg.seed, "master seed");
  add_integer(&app, "--workers", cfg.workers, "worker threads (default $QAIPF_WORKERS, else all cores)");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_flag("--format-version", show_version, "print the output format version and exit");

  auto model_opts = [&](CLI::App* s) {
    s->add_option("--model", cfg.model, "sk or sat3")->check(CLI::IsMember({"sk", "sat3"}));
    s->add_option("--clause-ratio", cfg.clause_ratio, "clauses per variable (sat3)");
    s->add_option("--p0", cfg.p0, "type-0 clause probability (sat3)");
    s->add_option("--p1", cfg.p1, "probability of each type-1 variant (sat3)");
    s->add_option("--p2", cfg.p2, "probability of each type-2 variant (sat3)");
  };
  auto schedule_opts = [&](CLI::App* s) {
    s->add_option("--tau", cfg.tau, "annealing time");
    s->add_option("--dt", cfg.dt, "integrator step");
    s->add_option("--gamma", cfg.gamma, "transverse field strength");
  };
  auto presample_opts = [&](CLI::App* s) {
    add_integer(s, "--n-e", cfg.n_e, "presampling depth");
    add_integer(s, "--m-ps", cfg.m_ps, "trajectories per presampled state");
  };

  auto* gen = app.add_subcommand("gen", "generate an instance file");
  model_opts(gen);
  add_integer(gen, "--n", cfg.n, "spin count")->required();

  auto* pre = app.add_subcommand("presample", "presample low-energy initial states");
  pre->add_option("--instance", cfg.instance_path, "instance file")->required();
  schedule_opts(pre);
  presample_opts(pre);

  auto* est = app.add_subcommand("estimate", "estimate Z1(beta) from trajectories (JSONL)");
  est->add_option("--instance", cfg.instance_path, "instance file")->required();
  schedule_opts(est);
  presample_opts(est);
  est->add_option("--beta", cfg.betas, "inverse temperatures")->delimiter(',');
  est->add_option("--sampler", cfg.sampler, "je, gibbs, optimal or practical")
      ->check(CLI::IsMember({"je", "gibbs", "optimal", "practical"}));
  est->add_option("--alpha", cfg.alpha, "alpha for the gibbs sampler (default: exact optimum)");
  add_integer(est, "--m-s", cfg.m_s, "trajectories per beta");
  est->add_option("--presample", cfg.presample_path, "reuse a presample file (practical sampler)");
  est->add_flag("--reuse", cfg.reuse, "fold presample records into the estimate (practical sampler)");
  est->add_flag("!--no-trajectories", cfg.trajectories, "omit per-trajectory (m, n) records");

  auto* ora = app.add_subcommand("oracle", "exact analysis by enumeration (n <= 14)");
  ora->add_option("--instance", cfg.instance_path, "instance file")->required();
  schedule_opts(ora);
  ora->add_option("--beta", cfg.betas, "inverse temperatures")->delimiter(',');
  ora->add_option("--locality", cfg.locality_prefix, "write locality matrices to PREFIX_{a,b,c}.csv");
  ora->add_option("--alpha", cfg.alpha, "alpha for the locality matrices (default: alpha* at the first beta)");

  auto* scan = app.add_subcommand("scan", "instance-averaged exact relative variance over one axis (CSV)");
  model_opts(scan);
  schedule_opts(scan);
  presample_opts(scan);
  add_integer(scan, "--n", cfg.n, "spin count");
  scan->add_option("--axis", cfg.axis, "tau, beta, n or sampler")->required();
  scan->add_option("--values", cfg.values, "axis values")->delimiter(',')->required();
  scan->add_option("--beta", cfg.betas, "inverse temperature (first entry)")->delimiter(',');
  scan->add_option("--sampler", cfg.sampler, "je, gibbs, optimal or practical")
      ->check(CLI::IsMember({"je", "gibbs", "optimal", "practical"}));
  scan->add_option("--alpha", cfg.alpha, "fixed alpha for the gibbs sampler (default: alpha*)");
  add_integer(scan, "--instances", cfg.instances, "instances per cell");
  scan->add_option("--tau0", cfg.tau0, "per-run overhead time for the total-cost column");
  scan->add_flag("--fit-gamma", cfg.fit, "fit the scaling exponent (n axis)");

  auto* exp = app.add_subcommand("export-csv", "flatten estimate JSONL to CSV");
  exp->add_option("--in", cfg.in_path, "JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (show_version) {
    std::cout << qaipf::kFormatVersion << '\n';
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.command == "gen") {
      return cmd_gen(cfg);
    }
    if (cfg.command == "presample") {
      return cmd_presample(cfg);
    }
    if (cfg.command == "estimate") {
      return cmd_estimate(cfg);
    }
    if (cfg.command == "oracle") {
      return cmd_oracle(cfg);
    }
    if (cfg.command == "scan") {
      return cmd_scan(cfg);
    }
    return cmd_export_csv(cfg);
  } catch (const qaipf::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const qaipf::NoRoot& e) {
    std::cerr << "no root: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const qaipf::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const qaipf::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
