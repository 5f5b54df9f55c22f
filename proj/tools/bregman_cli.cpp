// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: confidence envelopes, Monte Carlo coverage
// studies, change-point simulation, 2-D confidence sets, c-tuning, and a
// linear-bandit ellipsoid demo. Commands emit CSV or JSON rows meant for
// plotting; replicate streams are derived from (--seed, replicate), so a
// run is reproducible byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <json.hpp>

#include "bregman/baselines.hpp"
#include "bregman/confseq.hpp"
#include "bregman/glr.hpp"
#include "bregman/linbandit.hpp"
#include "bregman/montecarlo.hpp"
#include "bregman/random.hpp"

using json = nlohmann::json;
using namespace bregman;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAnomaly = 3;
constexpr int kExitIo = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string family = "bernoulli";
  std::vector<double> params;
  std::string mixture = "discrete";
  std::int64_t n_max = 200;
  double delta = 0.05;
  double c = 1.0;
  int reps = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> baselines;
  std::string out;
  std::string format = "csv";
  int workers = 0;
  // changepoint
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  std::int64_t t_star = 50;
  std::string scan = "full";
  // set2d
  double mu_lo = -2.0, mu_hi = 4.0, sigma_lo = 0.1, sigma_hi = 4.0;
  int rows = 1024, cols = 1024;
  // tune-c
  std::vector<std::int64_t> n0_list = {50, 100, 200};
  // bandit-demo
  int dim = 3;
};

struct ResolvedFamily {
  FamilyKind kind = FamilyKind::bernoulli();
  TrueParams truth;
};

double param_at(const RunConfig& cfg, std::size_t i, double fallback) {
  return i < cfg.params.size() ? cfg.params[i] : fallback;
}

ResolvedFamily resolve_family(const RunConfig& cfg) {
  ResolvedFamily r;
  try {
    if (cfg.family == "bernoulli") {
      r.kind = FamilyKind::bernoulli();
      r.truth.p1 = param_at(cfg, 0, 0.5);
      if (!(r.truth.p1 > 0.0 && r.truth.p1 < 1.0)) {
        throw ConfigError("bernoulli mean must lie in (0,1)");
      }
    } else if (cfg.family == "gaussian-mean") {
      r.truth.p1 = param_at(cfg, 0, 0.0);
      r.kind = FamilyKind::gaussian_mean(param_at(cfg, 1, 1.0));
    } else if (cfg.family == "gaussian-variance") {
      r.truth.p1 = param_at(cfg, 0, 1.0);
      r.kind = FamilyKind::gaussian_variance(param_at(cfg, 1, 0.0));
      if (!(r.truth.p1 > 0.0)) throw ConfigError("gaussian-variance sigma must be positive");
    } else if (cfg.family == "gaussian-2d") {
      r.kind = FamilyKind::gaussian_2d();
      r.truth.p1 = param_at(cfg, 0, 1.0);
      r.truth.p2 = param_at(cfg, 1, 1.0);
      if (!(r.truth.p2 > 0.0)) throw ConfigError("gaussian-2d sigma must be positive");
    } else if (cfg.family == "exponential") {
      r.kind = FamilyKind::exponential();
      r.truth.p1 = param_at(cfg, 0, 1.0);
      if (!(r.truth.p1 > 0.0)) throw ConfigError("exponential mean must be positive");
    } else if (cfg.family == "gamma") {
      r.truth.p1 = param_at(cfg, 0, 1.0);
      r.kind = FamilyKind::gamma_fixed_shape(param_at(cfg, 1, 2.0));
      if (!(r.truth.p1 > 0.0)) throw ConfigError("gamma scale must be positive");
    } else if (cfg.family == "weibull") {
      r.truth.p1 = param_at(cfg, 0, 1.0);
      r.kind = FamilyKind::weibull_fixed_shape(param_at(cfg, 1, 2.0));
      if (!(r.truth.p1 > 0.0)) throw ConfigError("weibull scale must be positive");
    } else if (cfg.family == "pareto") {
      r.kind = FamilyKind::pareto();
      r.truth.p1 = param_at(cfg, 0, 0.5);
      if (!(r.truth.p1 > 0.0)) throw ConfigError("pareto exponent must be positive");
    } else if (cfg.family == "poisson") {
      r.kind = FamilyKind::poisson();
      r.truth.p1 = param_at(cfg, 0, 3.0);
      if (!(r.truth.p1 > 0.0)) throw ConfigError("poisson rate must be positive");
    } else if (cfg.family == "chi-square") {
      if (cfg.mixture != "discrete" && cfg.mixture != "continuous") {
        throw ConfigError("--mixture must be 'discrete' or 'continuous'");
      }
      r.kind = FamilyKind::chi_square(cfg.mixture == "discrete" ? Chi2Mixture::discrete
                                                                : Chi2Mixture::continuous);
      r.truth.p1 = param_at(cfg, 0, 5.0);
      if (!(r.truth.p1 > 0.0)) throw ConfigError("chi-square dof must be positive");
    } else {
      throw ConfigError("unknown family '" + cfg.family + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  return r;
}

void validate_common(const RunConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError("--delta must lie in (0,1]");
  if (!(cfg.c > 0.0)) throw ConfigError("--c must be positive");
  if (cfg.reps < 1) throw ConfigError("--reps must be at least 1");
  if (cfg.n_max < 1) throw ConfigError("--n must be at least 1");
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError("--format must be 'csv' or 'json'");
  }
}

// Table emitter: CSV with a fixed header, or an array of row objects.
class TableWriter {
 public:
  TableWriter(std::string format, std::vector<std::string> columns)
      : format_(std::move(format)), columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void write(std::ostream& os) const {
    if (format_ == "csv") {
      for (std::size_t i = 0; i < columns_.size(); ++i) {
        os << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
      }
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          os << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
      }
      return;
    }
    json out = json::array();
    for (const auto& row : rows_) {
      json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = row[i];
      out.push_back(obj);
    }
    os << out.dump(2) << "\n";
  }

 private:
  std::string format_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

void write_output(const RunConfig& cfg, const std::function<void(std::ostream&)>& body) {
  if (cfg.out.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw IoError("cannot open output file '" + cfg.out + "'");
  body(file);
  if (!file.good()) throw IoError("write failed for '" + cfg.out + "'");
}

// ---------------------------------------------------------------------------
// envelope

struct MethodEnvelope {
  std::string name;
  Envelope env;
};

std::vector<std::string> envelope_methods(const RunConfig& cfg, const ResolvedFamily& fam) {
  std::vector<std::string> methods = {"bregman"};
  for (const std::string& b : cfg.baselines) {
    const bool bernoulli_family = fam.kind.family == Family::bernoulli;
    const bool gaussian_family = fam.kind.family == Family::gaussian_mean;
    const bool exponential_family = fam.kind.family == Family::exponential;
    if (b == "laplace") {
      if (!bernoulli_family && !gaussian_family) {
        throw ConfigError("baseline 'laplace' supports bernoulli and gaussian-mean");
      }
    } else if (b == "kk") {
      if (!gaussian_family && !exponential_family) {
        throw ConfigError("baseline 'kk' supports gaussian-mean and exponential");
      }
    } else if (b == "hedged" || b == "bentkus") {
      if (!bernoulli_family) {
        throw ConfigError("baseline '" + b + "' supports bernoulli only");
      }
    } else {
      throw ConfigError("unknown baseline '" + b + "'");
    }
    methods.push_back(b);
  }
  return methods;
}

Envelope baseline_envelope(const std::string& method, const RunConfig& cfg,
                           const ResolvedFamily& fam, const std::vector<double>& xs) {
  Envelope env;
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    const std::int64_t n = static_cast<std::int64_t>(i) + 1;
    const double mu_hat = sum / static_cast<double>(n);
    Interval iv;
    if (method == "laplace") {
      const double radius = fam.kind.family == Family::bernoulli
          ? laplace_radius_bernoulli(n, cfg.delta)
          : laplace_radius_gaussian(fam.kind.sigma, n, cfg.delta);
      iv = Interval{mu_hat - radius, mu_hat + radius};
    } else if (method == "kk") {
      iv = fam.kind.family == Family::gaussian_mean
          ? kaufmann_koolen_set(KaufmannKoolenKind::gaussian, mu_hat, n, cfg.delta,
                                fam.kind.sigma)
          : kaufmann_koolen_set(KaufmannKoolenKind::exponential, mu_hat, n, cfg.delta);
    } else if (method == "hedged") {
      iv = hedged_capital_set(std::span<const double>(xs.data(), i + 1), cfg.delta);
    } else {  // bentkus
      const double radius = bentkus_peeling_radius(n, cfg.delta);
      iv = Interval{mu_hat - radius, mu_hat + radius};
    }
    env.lower.push_back(iv.lo);
    env.upper.push_back(iv.hi);
  }
  return env;
}

int cmd_envelope(const RunConfig& cfg) {
  validate_common(cfg);
  const ResolvedFamily fam = resolve_family(cfg);
  if (fam.kind.family == Family::gaussian_2d) {
    throw ConfigError("envelope supports 1-D families; use set2d for gaussian-2d");
  }
  const std::vector<std::string> methods = envelope_methods(cfg, fam);

  struct RepResult {
    std::vector<MethodEnvelope> envelopes;
    std::vector<double> estimates;
  };
  const auto results = run_replicates<RepResult>(
      cfg.reps, cfg.seed,
      [&](int, Rng& rng) {
        RepResult res;
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(cfg.n_max));
        SuffStats stats;
        for (std::int64_t t = 0; t < cfg.n_max; ++t) {
          const double x = sample_observation(rng, fam.kind, fam.truth);
          xs.push_back(x);
          stats = update_stats(fam.kind, stats, x);
          res.estimates.push_back(point_estimate(fam.kind, stats));
        }
        for (const std::string& method : methods) {
          Envelope env = method == "bregman"
              ? envelope_for_stream(fam.kind, xs, cfg.c, cfg.delta)
              : baseline_envelope(method, cfg, fam, xs);
          res.envelopes.push_back({method, running_intersection(std::move(env))});
        }
        return res;
      },
      cfg.workers);

  TableWriter table(cfg.format, {"method", "rep", "n", "lower", "upper", "estimate"});
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const RepResult& res = results[static_cast<std::size_t>(rep)];
    for (const MethodEnvelope& me : res.envelopes) {
      for (std::int64_t n = 1; n <= cfg.n_max; ++n) {
        const std::size_t i = static_cast<std::size_t>(n - 1);
        table.add_row({me.name, fmt_int(rep), fmt_int(n), fmt(me.env.lower[i]),
                       fmt(me.env.upper[i]), fmt(res.estimates[i])});
      }
    }
  }
  write_output(cfg, [&](std::ostream& os) { table.write(os); });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// coverage

int cmd_coverage(const RunConfig& cfg) {
  validate_common(cfg);
  const ResolvedFamily fam = resolve_family(cfg);
  const auto violations = run_replicates<int>(
      cfg.reps, cfg.seed,
      [&](int, Rng& rng) {
        SuffStats stats;
        for (std::int64_t t = 1; t <= cfg.n_max; ++t) {
          stats = update_stats(fam.kind, stats,
                               sample_observation(rng, fam.kind, fam.truth));
          const double level = fam.kind.family == Family::gaussian_2d
              ? level_function_2d(fam.kind, stats, cfg.c, cfg.delta, fam.truth.p1,
                                  fam.truth.p2)
              : level_function(fam.kind, stats, cfg.c, cfg.delta, fam.truth.p1);
          if (level > 0.0) return 1;
        }
        return 0;
      },
      cfg.workers);
  int total = 0;
  for (int v : violations) total += v;

  json report;
  report["family"] = cfg.family;
  report["delta"] = cfg.delta;
  report["c"] = cfg.c;
  report["reps"] = cfg.reps;
  report["n_max"] = cfg.n_max;
  report["violations"] = total;
  report["violation_rate"] = static_cast<double>(total) / cfg.reps;
  report["seed"] = cfg.seed;
  write_output(cfg, [&](std::ostream& os) { os << report.dump(2) << "\n"; });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// changepoint

int cmd_changepoint(const RunConfig& cfg) {
  validate_common(cfg);
  if (!(cfg.sigma0 > 0.0) || !(cfg.sigma1 > 0.0)) {
    throw ConfigError("--sigma0/--sigma1 must be positive");
  }
  if (cfg.scan != "full" && cfg.scan != "geometric") {
    throw ConfigError("--scan must be 'full' or 'geometric'");
  }
  GlrConfig glr;
  glr.delta = cfg.delta;
  glr.c = cfg.c;
  glr.horizon = cfg.n_max;
  glr.scan = cfg.scan == "full" ? ScanGrid::full : ScanGrid::geometric;

  struct Outcome {
    std::int64_t detection_time = 0;
    bool detected = false;
  };
  const auto outcomes = run_replicates<Outcome>(
      cfg.reps, cfg.seed,
      [&](int, Rng& rng) {
        GlrState state(FamilyKind::gaussian_variance(0.0), glr);
        for (std::int64_t t = 1; t <= cfg.n_max; ++t) {
          const double sd = t <= cfg.t_star ? cfg.sigma0 : cfg.sigma1;
          if (auto hit = state.step(rng.normal(0.0, sd))) {
            return Outcome{hit->t, true};
          }
        }
        return Outcome{cfg.n_max, false};
      },
      cfg.workers);

  TableWriter table(cfg.format, {"rep", "detection_time", "detected"});
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const Outcome& o = outcomes[static_cast<std::size_t>(rep)];
    table.add_row({fmt_int(rep), fmt_int(o.detection_time), o.detected ? "1" : "0"});
  }
  write_output(cfg, [&](std::ostream& os) { table.write(os); });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// set2d

int cmd_set2d(const RunConfig& cfg) {
  // n = 0 is meaningful here: the whole box is accepted
  RunConfig relaxed = cfg;
  relaxed.n_max = std::max<std::int64_t>(cfg.n_max, 1);
  validate_common(relaxed);
  if (cfg.n_max < 0) throw ConfigError("--n must be nonnegative");
  RunConfig fam_cfg = cfg;
  fam_cfg.family = "gaussian-2d";
  const ResolvedFamily fam = resolve_family(fam_cfg);
  Rng rng = Rng::for_replicate(cfg.seed, 0);
  SuffStats stats;
  for (std::int64_t t = 0; t < cfg.n_max; ++t) {
    stats = update_stats(fam.kind, stats, sample_observation(rng, fam.kind, fam.truth));
  }
  const Box2D box{cfg.mu_lo, cfg.mu_hi, cfg.sigma_lo, cfg.sigma_hi};
  const ConfSet2D set =
      confset_2d(fam.kind, stats, cfg.c, cfg.delta, box, cfg.rows, cfg.cols);

  TableWriter table(cfg.format, {"row", "col", "theta1", "theta2", "member"});
  for (int i = 0; i < set.rows; ++i) {
    for (int j = 0; j < set.cols; ++j) {
      table.add_row({fmt_int(i), fmt_int(j), fmt(set.mu_center(j)),
                     fmt(set.sigma_center(i)), set.at(i, j) ? "1" : "0"});
    }
  }
  write_output(cfg, [&](std::ostream& os) { table.write(os); });

  json sidecar;
  sidecar["box"] = {{"mu_lo", box.mu_lo},
                    {"mu_hi", box.mu_hi},
                    {"sigma_lo", box.sigma_lo},
                    {"sigma_hi", box.sigma_hi}};
  sidecar["resolution"] = {{"rows", set.rows}, {"cols", set.cols}};
  sidecar["n"] = cfg.n_max;
  sidecar["empty"] = set.empty;
  sidecar["touches_edge"] = set.touches_edge;
  if (!set.empty) {
    sidecar["bounding_rect"] = {{"mu_min", set.mu_min},
                                {"mu_max", set.mu_max},
                                {"sigma_min", set.sigma_min},
                                {"sigma_max", set.sigma_max}};
  }
  if (!cfg.out.empty()) {
    const std::string sidecar_path = cfg.out + ".json";
    std::ofstream file(sidecar_path, std::ios::binary);
    if (!file) throw IoError("cannot open sidecar file '" + sidecar_path + "'");
    file << sidecar.dump(2) << "\n";
  } else {
    std::cout << sidecar.dump(2) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tune-c

int cmd_tune_c(const RunConfig& cfg) {
  validate_common(cfg);
  const ResolvedFamily fam = resolve_family(cfg);
  if (fam.kind.family == Family::gaussian_2d) {
    throw ConfigError("tune-c supports 1-D families");
  }
  TableWriter table(cfg.format, {"n0", "c_star", "width"});
  for (std::int64_t n0 : cfg.n0_list) {
    if (n0 < 1) throw ConfigError("--n0 entries must be positive");
    const auto tuned = run_replicates<TuneResult>(
        cfg.reps, cfg.seed ^ static_cast<std::uint64_t>(n0),
        [&](int, Rng& rng) {
          SuffStats stats;
          for (std::int64_t t = 0; t < n0; ++t) {
            stats = update_stats(fam.kind, stats,
                                 sample_observation(rng, fam.kind, fam.truth));
          }
          return tune_c(fam.kind, stats, n0, cfg.delta);
        },
        cfg.workers);
    std::vector<double> c_values, widths;
    for (const TuneResult& t : tuned) {
      c_values.push_back(t.c_star);
      widths.push_back(t.width);
    }
    std::sort(c_values.begin(), c_values.end());
    std::sort(widths.begin(), widths.end());
    table.add_row({fmt_int(n0), fmt(c_values[c_values.size() / 2]),
                   fmt(widths[widths.size() / 2])});
  }
  write_output(cfg, [&](std::ostream& os) { table.write(os); });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bandit-demo

int cmd_bandit_demo(const RunConfig& cfg) {
  validate_common(cfg);
  if (cfg.dim < 1) throw ConfigError("--dim must be positive");
  Rng rng = Rng::for_replicate(cfg.seed, 0);
  Eigen::VectorXd theta_star(cfg.dim);
  for (int i = 0; i < cfg.dim; ++i) theta_star(i) = rng.normal(0.0, 1.0);
  DesignState state = DesignState::identity(cfg.dim);

  TableWriter table(cfg.format,
                    {"n", "info_gain", "radius_sq_paper", "radius_ay", "covered"});
  for (std::int64_t t = 1; t <= cfg.n_max; ++t) {
    Eigen::VectorXd phi(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) phi(i) = rng.normal(0.0, 1.0);
    const double sigma = 0.5 + 1.5 * rng.uniform();
    const double x = rng.normal(theta_star.dot(phi), sigma);
    state.observe(phi, x, sigma);
    const EllipsoidCheck chk = in_ellipsoid(state, theta_star, cfg.delta);
    table.add_row({fmt_int(t), fmt(state.info_gain()), fmt(chk.radius_sq),
                   fmt(chk.radius_ay), chk.member ? "1" : "0"});
  }
  write_output(cfg, [&](std::ostream& os) { table.write(os); });
  return kExitOk;
}

// ---------------------------------------------------------------------------

void apply_json_config(const std::string& path, RunConfig& cfg) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    file >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  auto get = [&](const char* key, auto& target) {
    if (doc.contains(key)) target = doc[key].get<std::decay_t<decltype(target)>>();
  };
  get("family", cfg.family);
  get("param", cfg.params);
  get("mixture", cfg.mixture);
  get("n", cfg.n_max);
  get("delta", cfg.delta);
  get("c", cfg.c);
  get("reps", cfg.reps);
  get("seed", cfg.seed);
  get("baselines", cfg.baselines);
  get("out", cfg.out);
  get("format", cfg.format);
  get("workers", cfg.workers);
  get("sigma0", cfg.sigma0);
  get("sigma1", cfg.sigma1);
  get("t_star", cfg.t_star);
  get("scan", cfg.scan);
  get("mu_lo", cfg.mu_lo);
  get("mu_hi", cfg.mu_hi);
  get("sigma_lo", cfg.sigma_lo);
  get("sigma_hi", cfg.sigma_hi);
  get("rows", cfg.rows);
  get("cols", cfg.cols);
  get("n0", cfg.n0_list);
  get("dim", cfg.dim);
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override)");
  cmd->add_option("--family", cfg.family,
                  "bernoulli | gaussian-mean | gaussian-variance | gaussian-2d | "
                  "exponential | gamma | weibull | pareto | poisson | chi-square");
  cmd->add_option("--param", cfg.params, "family parameters (see README)");
  cmd->add_option("--mixture", cfg.mixture, "chi-square mixture: discrete | continuous");
  cmd->add_option("--n", cfg.n_max, "maximum sample size / horizon");
  cmd->add_option("--delta", cfg.delta, "confidence level in (0,1]");
  cmd->add_option("--c", cfg.c, "mixture regularization c > 0");
  cmd->add_option("--reps", cfg.reps, "number of replicates");
  cmd->add_option("--seed", cfg.seed, "master seed");
  cmd->add_option("--baselines", cfg.baselines,
                  "baseline methods: laplace kk hedged bentkus");
  cmd->add_option("--out", cfg.out, "output path (stdout if omitted)");
  cmd->add_option("--format", cfg.format, "csv | json");
  cmd->add_option("--workers", cfg.workers, "worker threads (0 = auto)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-uniform Bregman confidence sequences for exponential families"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  CLI::App* envelope = app.add_subcommand("envelope", "confidence envelopes along streams");
  CLI::App* coverage = app.add_subcommand("coverage", "time-uniform coverage study");
  CLI::App* changepoint =
      app.add_subcommand("changepoint", "Gaussian variance-change GLR simulation");
  CLI::App* set2d = app.add_subcommand("set2d", "two-parameter Gaussian confidence set");
  CLI::App* tune_c_cmd = app.add_subcommand("tune-c", "width-minimizing regularization");
  CLI::App* bandit = app.add_subcommand("bandit-demo", "linear-bandit ellipsoid demo");

  for (CLI::App* cmd : {envelope, coverage, changepoint, set2d, tune_c_cmd, bandit}) {
    add_common_options(cmd, cfg, config_path);
  }
  changepoint->add_option("--sigma0", cfg.sigma0, "pre-change standard deviation");
  changepoint->add_option("--sigma1", cfg.sigma1, "post-change standard deviation");
  changepoint->add_option("--tstar", cfg.t_star, "change point");
  changepoint->add_option("--scan", cfg.scan, "split scan grid: full | geometric");
  set2d->add_option("--mu-lo", cfg.mu_lo, "box lower mu");
  set2d->add_option("--mu-hi", cfg.mu_hi, "box upper mu");
  set2d->add_option("--sigma-lo", cfg.sigma_lo, "box lower sigma");
  set2d->add_option("--sigma-hi", cfg.sigma_hi, "box upper sigma");
  set2d->add_option("--rows", cfg.rows, "grid rows (sigma axis)");
  set2d->add_option("--cols", cfg.cols, "grid cols (mu axis)");
  tune_c_cmd->add_option("--n0", cfg.n0_list, "horizons to tune at");
  bandit->add_option("--dim", cfg.dim, "parameter dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!config_path.empty()) {
      // load file values, then re-parse so explicit flags win
      apply_json_config(config_path, cfg);
      try {
        app.clear();
        app.parse(argc, argv);
      } catch (const CLI::ParseError&) {
        return kExitConfig;
      }
    }
    if (envelope->parsed()) return cmd_envelope(cfg);
    if (coverage->parsed()) return cmd_coverage(cfg);
    if (changepoint->parsed()) return cmd_changepoint(cfg);
    if (set2d->parsed()) return cmd_set2d(cfg);
    if (tune_c_cmd->parsed()) return cmd_tune_c(cfg);
    if (bandit->parsed()) return cmd_bandit_demo(cfg);
    std::cerr << "no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalAnomaly& e) {
    std::cerr << "numerical anomaly: " << e.what() << "\n";
    return kExitAnomaly;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnomaly;
  }
}
