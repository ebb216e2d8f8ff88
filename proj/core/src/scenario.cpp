// Copyright 2026 The multiphonon Authors
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

#include "multiphonon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "multiphonon/device.hpp"
#include "multiphonon/model.hpp"
#include "multiphonon/observables.hpp"
#include "multiphonon/perturbation.hpp"
#include "multiphonon/spectra.hpp"

namespace mph {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void config_fail(const std::string& origin, const std::string& message) {
  throw ConfigError(origin + ": " + message);
}

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& origin, const std::string& where) {
  if (!j.is_object()) config_fail(origin, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) config_fail(origin, "unknown key \"" + it.key() + "\" in " + where);
  }
}

double get_num(const json& j, const std::string& key, const std::string& origin,
               std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    config_fail(origin, "missing required key \"" + key + "\"");
  }
  if (!j.at(key).is_number())
    config_fail(origin, "key \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& origin,
            std::optional<int> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    config_fail(origin, "missing required key \"" + key + "\"");
  }
  if (!j.at(key).is_number_integer())
    config_fail(origin, "key \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

std::vector<double> get_num_array(const json& j, const std::string& key,
                                  const std::string& origin,
                                  std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array()) config_fail(origin, "key \"" + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) config_fail(origin, "array \"" + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt_key(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / double(n - 1);
  return out;
}

class CsvFile {
 public:
  CsvFile(const std::string& path, const std::vector<std::string>& header)
      : f_(path, std::ios::trunc) {
    if (!f_) throw std::runtime_error("cannot open output file " + path);
    for (size_t i = 0; i < header.size(); ++i)
      f_ << (i ? "," : "") << header[i];
    f_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i)
      f_ << (i ? "," : "") << fmt_num(values[i]);
    f_ << "\n";
  }

 private:
  std::ofstream f_;
};

struct Context {
  const ScenarioConfig& cfg;
  const RunOptions& opt;
  ScenarioResult& res;

  std::string out_path(const std::string& name) const {
    return (std::filesystem::path(opt.out_dir) / name).string();
  }
  void note_file(const std::string& name) { res.files_written.push_back(name); }
  void put(const std::string& key, double value) { res.results[key] = value; }
  void warn(const std::string& w) { res.warnings.push_back(w); }
};

int resolve_cutoff(const ScenarioConfig& cfg, int fallback) {
  if (cfg.cutoff_override <= 0) return fallback;
  if (cfg.cutoff_override < 2)
    config_fail(cfg.origin, "cutoff override must be >= 2");
  return cfg.cutoff_override;
}

Eigen::VectorXd populations_of(const Matrix& rho, const HilbertSpace& sp) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(sp.fock_cutoff);
  for (int s = 0; s < sp.spin_dim; ++s)
    for (int n = 0; n < sp.fock_cutoff; ++n)
      p(n) += rho(sp.index(s, n), sp.index(s, n)).real();
  return p;
}

// ---------------------------------------------------------------------------
// rates

void run_rates(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P, {"lambda", "orders", "Omega_values"}, ctx.cfg.origin, "params");
  const double lambda = get_num(P, "lambda", ctx.cfg.origin, 1.0);
  std::vector<double> orders_d = get_num_array(P, "orders", ctx.cfg.origin, {1, 2, 3, 4});
  std::vector<double> omegas =
      get_num_array(P, "Omega_values", ctx.cfg.origin, {3.0, 5.0, 6.0, 7.5, 10.0, 20.0});

  std::optional<CsvFile> csv;
  if (ctx.opt.write_outputs) {
    csv.emplace(ctx.out_path("rates.csv"),
                std::vector<std::string>{"n", "Omega", "closed_form", "resolvent",
                                         "rel_diff"});
    ctx.note_file("rates.csv");
  }
  double max_rel = 0.0;
  for (double nd : orders_d) {
    const int n = int(nd);
    for (double Om : omegas) {
      const double closed = mollow_rate(n, lambda, Om).rate;
      const double resol = resolvent_rate(n, lambda, Om, 2.0 * Om / n).rate;
      const double rel = std::abs(resol - closed) / std::abs(closed);
      max_rel = std::max(max_rel, rel);
      if (csv) csv->row({double(n), Om, closed, resol, rel});
      const std::string tag = std::to_string(n) + "_" + fmt_key(Om);
      ctx.put("closed_" + tag, closed);
      ctx.put("resolvent_" + tag, resol);
    }
  }
  ctx.put("max_rel_diff", max_rel);
}

// ---------------------------------------------------------------------------
// spectrum

void run_spectrum(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P,
             {"lambda", "Delta_a", "Omega_min", "Omega_max", "resolution", "levels",
              "crossings", "crossing_halfwidth", "jc_check_Delta_a"},
             ctx.cfg.origin, "params");
  const double lambda = get_num(P, "lambda", ctx.cfg.origin, 1.0);
  const double Delta_a = get_num(P, "Delta_a", ctx.cfg.origin, 5.0);
  const double Om_min = get_num(P, "Omega_min", ctx.cfg.origin, 0.0);
  const double Om_max = get_num(P, "Omega_max", ctx.cfg.origin, 20.0);
  const int resolution = get_int(P, "resolution", ctx.cfg.origin, 201);
  auto levels = get_num_array(P, "levels", ctx.cfg.origin, {2, 9});
  auto crossings = get_num_array(P, "crossings", ctx.cfg.origin, {1, 2, 3});
  const double halfwidth =
      get_num(P, "crossing_halfwidth", ctx.cfg.origin, 1.5 * lambda);
  const double jc_Delta_a = get_num(P, "jc_check_Delta_a", ctx.cfg.origin, 10.0);
  if (levels.size() != 2) config_fail(ctx.cfg.origin, "levels must be [first, last]");

  int n_max = 1;
  for (double n : crossings) n_max = std::max(n_max, int(n));
  const int N = resolve_cutoff(ctx.cfg, default_fock_cutoff(n_max));

  auto builder_at = [lambda, Delta_a](int cutoff) {
    return [lambda, Delta_a, cutoff](double Om) {
      return build_dressed_mollow({.lambda = lambda, .Omega = Om, .Delta_a = Delta_a},
                                  {2, cutoff});
    };
  };

  SpectrumSweep sw =
      sweep(builder_at(N), {Om_min, Om_max}, resolution, -1, ctx.opt.threads);

  if (ctx.opt.write_outputs) {
    const int first = int(levels[0]), last = int(levels[1]);
    if (first < 1 || last > sw.levels_kept || first > last)
      config_fail(ctx.cfg.origin, "levels window out of range");
    std::vector<std::string> header{"Omega"};
    for (int k = first; k <= last; ++k) header.push_back("E_" + std::to_string(k));
    CsvFile csv(ctx.out_path("sweep.csv"), header);
    for (size_t i = 0; i < sw.parameter.size(); ++i) {
      std::vector<double> row{sw.parameter[i]};
      for (int k = first; k <= last; ++k) row.push_back(sw.energies(i, k - 1));
      csv.row(row);
    }
    ctx.note_file("sweep.csv");
  }

  auto analyze = [&](int cutoff, bool emit) {
    double max_gap = 0.0;  // aggregate headline for the convergence gate
    for (double nd : crossings) {
      const int n = int(nd);
      HilbertSpace space{2, cutoff};
      const double pred = n * Delta_a / 2.0;
      CrossingReport rep = find_crossing(
          builder_at(cutoff), n, basis_state(0, 0, space), basis_state(1, n, space),
          {std::max(Om_min, pred - halfwidth), std::min(Om_max, pred + halfwidth)},
          1e-4 * lambda, pred);
      max_gap += rep.gap;
      if (!emit) continue;
      const double ref_rate = mollow_rate(n, lambda, rep.parameter_star).rate;
      double fact = 1.0;
      for (int k = 2; k <= n; ++k) fact *= k;
      const double ref_gap = 2.0 * std::sqrt(fact) * std::abs(ref_rate);
      const std::string tag = "_n" + std::to_string(n);
      ctx.put("omega_star" + tag, rep.parameter_star);
      ctx.put("gap" + tag, rep.gap);
      ctx.put("loc_err_rel" + tag, std::abs(rep.parameter_star - pred) / pred);
      ctx.put("gap_err_rel" + tag, std::abs(rep.gap - ref_gap) / ref_gap);
      if (ctx.opt.write_outputs) {
        json rj{{"n", n},
                {"Omega_star", rep.parameter_star},
                {"gap", rep.gap},
                {"predicted_Omega", pred}};
        std::ofstream f(ctx.out_path("crossing_n" + std::to_string(n) + ".json"));
        f << rj.dump(2) << "\n";
        ctx.note_file("crossing_n" + std::to_string(n) + ".json");
      }
    }
    return max_gap;
  };

  const double at_n = analyze(N, true);
  const double at_n5 = analyze(N + 5, false);
  ctx.put("convergence_rel_change", std::abs(at_n5 - at_n) / std::abs(at_n));
  ctx.put("cutoff", N);

  // single-phonon crossing in the weak-coupling regime: gap -> lambda
  {
    HilbertSpace space{2, N};
    auto jc_builder = [lambda, jc_Delta_a, N](double Om) {
      return build_dressed_mollow(
          {.lambda = lambda, .Omega = Om, .Delta_a = jc_Delta_a}, {2, N});
    };
    CrossingReport rep = find_crossing(
        jc_builder, 1, basis_state(0, 0, space), basis_state(1, 1, space),
        {jc_Delta_a / 2.0 - 1.5 * lambda, jc_Delta_a / 2.0 + 1.5 * lambda},
        1e-4 * lambda, jc_Delta_a / 2.0);
    ctx.put("jc_gap", rep.gap);
    ctx.put("jc_gap_err_rel", std::abs(rep.gap - lambda) / lambda);
  }
}

// ---------------------------------------------------------------------------
// fock

void run_fock(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P,
             {"n", "lambda", "Delta_a", "Omega", "gamma_s", "gamma_m", "n_th", "t_max",
              "time_points", "frame"},
             ctx.cfg.origin, "params");
  const int n = get_int(P, "n", ctx.cfg.origin);
  const double lambda = get_num(P, "lambda", ctx.cfg.origin, 1.0);
  const double Delta_a = get_num(P, "Delta_a", ctx.cfg.origin);
  const double Omega = get_num(P, "Omega", ctx.cfg.origin);
  DissipationParams diss{get_num(P, "gamma_s", ctx.cfg.origin, 0.0),
                         get_num(P, "gamma_m", ctx.cfg.origin, 0.0),
                         get_num(P, "n_th", ctx.cfg.origin, 0.0), 0.0};
  const std::string frame = P.contains("frame") ? P.at("frame").get<std::string>()
                                                : std::string("rotating");
  if (frame != "rotating" && frame != "full")
    config_fail(ctx.cfg.origin, "frame must be \"rotating\" or \"full\"");

  const double rate = mollow_rate(n, lambda, Omega).rate;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  const double t_peak = M_PI / (2.0 * std::abs(rate) * std::sqrt(fact));
  const double t_max = get_num(P, "t_max", ctx.cfg.origin, 1.25 * t_peak);
  const int points = get_int(P, "time_points", ctx.cfg.origin, 141);
  const int N = resolve_cutoff(ctx.cfg, default_fock_cutoff(n));

  for (const auto& w : validity_warnings({.lambda = lambda, .Omega = Omega})) ctx.warn(w);

  auto peak_at = [&](int cutoff, bool emit) {
    HilbertSpace space{2, cutoff};
    MollowParams p{.lambda = lambda, .Omega = Omega, .Delta_a = Delta_a};
    Operator H = (frame == "rotating")
                     ? build_effective_mollow(
                           n, {.lambda = lambda, .Omega = Omega - n * Delta_a / 2.0,
                               .Delta_a = 0.0},
                           space, rate)
                     : build_effective_mollow(n, p, space);
    LindbladModel model = make_model(H, diss, ModelVariant::Fock);
    EvolveOptions eopt;
    eopt.integrator = ctx.cfg.integrator;
    eopt.store_states = true;
    auto evo = lindblad_evolve(model, basis_state(0, 0, space), linspace(0, t_max, points),
                               {}, eopt);
    double peak = 0.0, t_at = 0.0;
    std::optional<CsvFile> csv;
    if (emit && ctx.opt.write_outputs) {
      std::vector<std::string> header{"time"};
      for (int k = 0; k < cutoff; ++k) header.push_back("P" + std::to_string(k));
      csv.emplace(ctx.out_path("populations.csv"), header);
      ctx.note_file("populations.csv");
    }
    double peak_other = 0.0;  // largest transient population outside {0, n}
    for (size_t i = 0; i < evo.times.size(); ++i) {
      Eigen::VectorXd pops = populations_of(evo.states[i], space);
      if (pops(n) > peak) { peak = pops(n); t_at = evo.times[i]; }
      for (int k = 1; k < cutoff; ++k)
        if (k != n) peak_other = std::max(peak_other, pops(k));
      if (csv) {
        std::vector<double> row{evo.times[i]};
        for (int k = 0; k < cutoff; ++k) row.push_back(pops(k));
        csv->row(row);
      }
    }
    if (emit) {
      ctx.put("t_peak", t_at);
      ctx.put("dominance_ratio", peak / std::max(peak_other, 1e-12));
    }
    return peak;
  };

  const double peak = peak_at(N, true);
  const double peak5 = peak_at(N + 5, false);
  ctx.put("peak_P" + std::to_string(n), peak);
  ctx.put("convergence_rel_change", std::abs(peak5 - peak) / peak);
  ctx.put("cutoff", N);
  ctx.put("rate", rate);
}

// ---------------------------------------------------------------------------
// cat

struct FringeContrast {
  double fringe = 0.0, lobe = 0.0;
  double value() const { return lobe > 0 ? fringe / lobe : 0.0; }
};

FringeContrast fringe_contrast(const WignerGrid& w, double x_cut) {
  FringeContrast out;
  for (int i = 0; i < w.x.size(); ++i)
    for (int j = 0; j < w.p.size(); ++j) {
      const double v = w.values(i, j);
      if (std::abs(w.x(i)) <= x_cut)
        out.fringe = std::max(out.fringe, std::abs(v));
      else
        out.lobe = std::max(out.lobe, v);
    }
  return out;
}

void write_wigner_csv(Context& ctx, const std::string& name, const WignerGrid& w) {
  if (!ctx.opt.write_outputs) return;
  CsvFile csv(ctx.out_path(name), {"x", "p", "W"});
  for (int i = 0; i < w.x.size(); ++i)
    for (int j = 0; j < w.p.size(); ++j)
      csv.row({w.x(i), w.p(j), w.values(i, j)});
  ctx.note_file(name);
  json meta{{"convention", "displaced parity, W(0,0) = (2/pi) <parity>"},
            {"alpha", "(x + i p) / sqrt(2)"},
            {"nx", w.x.size()},
            {"np", w.p.size()},
            {"truncation_warning", w.truncation_warning}};
  std::ofstream f(ctx.out_path(name + ".meta.json"));
  f << meta.dump(2) << "\n";
  ctx.note_file(name + ".meta.json");
}

void run_cat(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P,
             {"lambda2", "Omega0", "gamma_s", "gamma_m", "n_th", "t_max", "time_points",
              "residual_cutoff", "wigner", "trajectory", "ensemble", "fringe_x_cut"},
             ctx.cfg.origin, "params");
  const double lambda2 = get_num(P, "lambda2", ctx.cfg.origin);
  const double Omega0 = get_num(P, "Omega0", ctx.cfg.origin);
  DissipationParams diss{get_num(P, "gamma_s", ctx.cfg.origin, 0.0),
                         get_num(P, "gamma_m", ctx.cfg.origin, 0.0),
                         get_num(P, "n_th", ctx.cfg.origin, 0.0), 0.0};
  const double t_max = get_num(P, "t_max", ctx.cfg.origin, 600.0);
  const int points = get_int(P, "time_points", ctx.cfg.origin, 121);
  const double fringe_x_cut = get_num(P, "fringe_x_cut", ctx.cfg.origin, 1.5);

  const double beta_sq = -Omega0 / lambda2;
  if (Omega0 != 0.0 && beta_sq <= 0.0)
    config_fail(ctx.cfg.origin,
                "dark amplitude beta^2 = -Omega0/lambda2 must be positive "
                "(lambda2 carries the physical negative sign)");
  const double beta = std::sqrt(std::max(beta_sq, 0.0));
  const int N = resolve_cutoff(ctx.cfg, default_fock_cutoff(0, beta));

  json wspec_in = P.value("wigner", json::object());
  check_keys(wspec_in, {"x_max", "p_max", "nx", "np"}, ctx.cfg.origin, "params.wigner");
  WignerGridSpec wspec;
  wspec.x_max = get_num(wspec_in, "x_max", ctx.cfg.origin, 6.0);
  wspec.x_min = -wspec.x_max;
  wspec.p_max = get_num(wspec_in, "p_max", ctx.cfg.origin, 3.2);
  wspec.p_min = -wspec.p_max;
  wspec.nx = get_int(wspec_in, "nx", ctx.cfg.origin, 121);
  wspec.np = get_int(wspec_in, "np", ctx.cfg.origin, 65);

  HilbertSpace space{2, N};
  LindbladModel model =
      make_model(build_cat_interaction(lambda2, Omega0, space), diss, ModelVariant::Cat);
  QuantumState psi0 = basis_state(0, 0, space);
  const auto times = linspace(0.0, t_max, points);
  Operator num = fock_op(FockOp::Number, space);
  Operator parity = fock_op(FockOp::Parity, space);

  // master equation reference
  EvolveOptions eopt;
  eopt.integrator = ctx.cfg.integrator;
  auto evo = lindblad_evolve(model, psi0, times, {num, parity}, eopt);
  if (ctx.opt.write_outputs) {
    CsvFile csv(ctx.out_path("mean_n.csv"), {"time", "value"});
    for (size_t i = 0; i < times.size(); ++i) csv.row({times[i], evo.expectations(0, i)});
    ctx.note_file("mean_n.csv");
  }

  // steady state and its phase-space portrait
  auto mean_n_ss_at = [&](int cutoff) {
    HilbertSpace sp{2, cutoff};
    LindbladModel m =
        make_model(build_cat_interaction(lambda2, Omega0, sp), diss, ModelVariant::Cat);
    SteadyStateResult ss = steady_state_full(m);
    if (!ss.warning.empty()) ctx.warn(ss.warning);
    return std::pair{expectation(fock_op(FockOp::Number, sp), ss.state).real(), ss.state};
  };
  auto [mean_n_ss, rho_ss] = mean_n_ss_at(N);
  ctx.put("mean_n_ss", mean_n_ss);
  if (beta_sq > 0)
    ctx.put("mean_n_err_rel", std::abs(mean_n_ss - beta_sq) / beta_sq);

  WignerGrid w_ss = wigner(rho_ss, wspec, ctx.opt.threads);
  if (w_ss.truncation_warning)
    ctx.warn("wigner grid reaches beyond the truncation-supported region");
  write_wigner_csv(ctx, "wigner_steady.csv", w_ss);
  const FringeContrast fc_ss = fringe_contrast(w_ss, fringe_x_cut);
  ctx.put("fringe_contrast_ss", fc_ss.value());

  // lobe positions at +- sqrt(2) beta on the x axis
  if (beta > 0) {
    auto nearest = [&](double x) {
      int best = 0;
      for (int i = 1; i < w_ss.x.size(); ++i)
        if (std::abs(w_ss.x(i) - x) < std::abs(w_ss.x(best) - x)) best = i;
      return best;
    };
    int j0 = 0;
    for (int j = 1; j < w_ss.p.size(); ++j)
      if (std::abs(w_ss.p(j)) < std::abs(w_ss.p(j0))) j0 = j;
    const double w_max = w_ss.values.maxCoeff();
    const double lobe_p = w_ss.values(nearest(std::sqrt(2.0) * beta), j0);
    const double lobe_m = w_ss.values(nearest(-std::sqrt(2.0) * beta), j0);
    ctx.put("lobe_min_frac", std::min(lobe_p, lobe_m) / w_max);
  }

  // dark-state residuals, evaluated at a cutoff deep enough for the cat tails
  {
    const int Nr = std::max(get_int(P, "residual_cutoff", ctx.cfg.origin, 45), N);
    HilbertSpace sp{2, Nr};
    Operator H = build_cat_interaction(lambda2, Omega0, sp);
    ctx.put("dark_residual_even",
            dark_state_residual(H, cat_state(beta, CatParity::Even, sp, 1)));
    if (beta > 0)
      ctx.put("dark_residual_odd",
              dark_state_residual(H, cat_state(beta, CatParity::Odd, sp, 1)));
  }

  // single quantum trajectory: jumping cat
  json traj_in = P.value("trajectory", json::object());
  check_keys(traj_in, {"enabled", "burn_in"}, ctx.cfg.origin, "params.trajectory");
  if (traj_in.value("enabled", true)) {
    const double burn_in = get_num(traj_in, "burn_in", ctx.cfg.origin, t_max / 3.0);
    TrajectoryOptions topt;
    topt.integrator = ctx.cfg.integrator;
    topt.record_jump_states = true;
    TrajectoryRecord rec =
        mcwf_trajectory(model, psi0, times, {num, parity}, ctx.cfg.seed, topt);
    if (ctx.opt.write_outputs) {
      CsvFile csv(ctx.out_path("trajectory.csv"), {"time", "mean_n", "parity"});
      for (size_t i = 0; i < times.size(); ++i)
        csv.row({times[i], rec.expectations(0, i), rec.expectations(1, i)});
      ctx.note_file("trajectory.csv");
      std::ofstream jl(ctx.out_path("jumps.jsonl"));
      for (const auto& jev : rec.jumps)
        jl << json{{"time", jev.time}, {"channel", jev.channel}}.dump() << "\n";
      ctx.note_file("jumps.jsonl");
    }

    // parity must flip sign at every damping jump once the cat has formed
    const int a_channel = 1;  // make_model(Cat): channel 0 = dephasing, 1 = damping
    int n_flips = 0;
    bool flips_ok = true;
    std::optional<Vector> snapshot;
    for (size_t k = 0; k < rec.jumps.size(); ++k) {
      if (rec.jumps[k].channel != a_channel || rec.jumps[k].time < burn_in) continue;
      const double before =
          phonon_parity(QuantumState::pure(space, rec.states_before_jump[k]));
      const double after =
          phonon_parity(QuantumState::pure(space, rec.states_after_jump[k]));
      ++n_flips;
      if (before * after >= 0.0) flips_ok = false;
      if (!snapshot) snapshot = rec.states_after_jump[k];
    }
    ctx.put("n_parity_flips", n_flips);
    ctx.put("parity_flips_ok", (flips_ok && n_flips > 0) ? 1.0 : 0.0);

    if (snapshot) {
      WignerGrid w_traj =
          wigner(QuantumState::pure(space, *snapshot), wspec, ctx.opt.threads);
      write_wigner_csv(ctx, "wigner_trajectory.csv", w_traj);
      ctx.put("fringe_contrast_traj", fringe_contrast(w_traj, fringe_x_cut).value());
    }
  }

  // unraveling equivalence: ensemble mean vs master equation
  json ens_in = P.value("ensemble", json::object());
  check_keys(ens_in, {"enabled", "n_traj"}, ctx.cfg.origin, "params.ensemble");
  if (ens_in.value("enabled", true)) {
    const int n_traj = get_int(ens_in, "n_traj", ctx.cfg.origin, 500);
    TrajectoryOptions topt;
    topt.integrator = ctx.cfg.integrator;
    EnsembleResult ens = trajectory_ensemble(model, psi0, times, {num}, n_traj,
                                             ctx.cfg.seed + 1, ctx.opt.threads, topt);
    if (ctx.opt.write_outputs) {
      CsvFile csv(ctx.out_path("ensemble_mean_n.csv"), {"time", "value", "stderr"});
      for (size_t i = 0; i < times.size(); ++i)
        csv.row({times[i], ens.mean(0, i), ens.std_error(0, i)});
      ctx.note_file("ensemble_mean_n.csv");
    }
    double max_dev = 0.0;
    for (size_t i = 1; i < times.size(); ++i) {
      const double se = std::max(ens.std_error(0, i), 1e-12);
      max_dev = std::max(max_dev, std::abs(ens.mean(0, i) - evo.expectations(0, i)) / se);
    }
    ctx.put("ensemble_max_sigma_dev", max_dev);
    ctx.put("ensemble_n_traj", n_traj);
  }

  // convergence gate on the steady-state phonon number
  const double ss5 = mean_n_ss_at(N + 5).first;
  ctx.put("convergence_rel_change", std::abs(ss5 - mean_n_ss) / std::abs(mean_n_ss));
  ctx.put("cutoff", N);
}

// ---------------------------------------------------------------------------
// correlations

void run_correlations(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P,
             {"lambda2", "gamma_s", "gamma_m_total", "Gamma_0", "orders",
              "interaction_order", "tau_max", "tau_points", "small_tau_multiples"},
             ctx.cfg.origin, "params");
  const double lambda2 = get_num(P, "lambda2", ctx.cfg.origin);
  const double gamma_s = get_num(P, "gamma_s", ctx.cfg.origin);
  const double gamma_m_total = get_num(P, "gamma_m_total", ctx.cfg.origin);
  const double Gamma_0 = get_num(P, "Gamma_0", ctx.cfg.origin);
  const int int_order = get_int(P, "interaction_order", ctx.cfg.origin, 2);
  auto orders = get_num_array(P, "orders", ctx.cfg.origin, {1, 2});
  const double tau_max = get_num(P, "tau_max", ctx.cfg.origin, 3.0 / lambda2);
  const int tau_points = get_int(P, "tau_points", ctx.cfg.origin, 61);
  auto small_multiples = get_num_array(P, "small_tau_multiples", ctx.cfg.origin, {1, 2, 3});

  const int N = resolve_cutoff(ctx.cfg, default_fock_cutoff(int_order) );

  auto g_at = [&](int cutoff, int order, const std::vector<double>& taus) {
    HilbertSpace sp{2, cutoff};
    LindbladModel model =
        make_model(build_blue_sideband_interaction(int_order, lambda2, sp),
                   {gamma_s, gamma_m_total, 0.0, Gamma_0}, ModelVariant::Correlation);
    return g2_generalized(model, order, taus, ctx.cfg.integrator);
  };

  for (double od : orders) {
    const int order = int(od);
    auto taus = linspace(0.0, tau_max, tau_points);
    CorrelationSeries series = g_at(N, order, taus);
    if (ctx.opt.write_outputs) {
      const std::string name = "g" + std::to_string(order) + ".csv";
      CsvFile csv(ctx.out_path(name), {"tau", "g"});
      for (size_t i = 0; i < series.tau.size(); ++i) csv.row({series.tau[i], series.g[i]});
      ctx.note_file(name);
    }
    ctx.put("g" + std::to_string(order) + "_0", series.g0);
    if (order == 2 && !small_multiples.empty()) {
      std::vector<double> taus_small{0.0};
      for (double m : small_multiples) taus_small.push_back(m / std::abs(lambda2));
      CorrelationSeries s2 = g_at(N, 2, taus_small);
      double min_excess = std::numeric_limits<double>::infinity();
      for (size_t i = 1; i < s2.g.size(); ++i)
        min_excess = std::min(min_excess, s2.g[i] - s2.g0);
      ctx.put("g2_small_tau_excess_min", min_excess);
    }
  }

  // convergence gate on g2(0)
  if (std::find(orders.begin(), orders.end(), 2.0) != orders.end()) {
    const double g2_0 = ctx.res.results.at("g2_0");
    const double g2_0_b = g_at(N + 5, 2, {0.0, 1.0}).g0;
    ctx.put("convergence_rel_change", std::abs(g2_0_b - g2_0) / std::abs(g2_0));
  }
  ctx.put("cutoff", N);
}

// ---------------------------------------------------------------------------
// drift

void run_drift(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P,
             {"lambda", "Delta", "Omega_x", "Delta_a", "Omega", "gamma_s", "gamma_m",
              "n_th", "delta_n_values", "scaled_run", "t_max", "time_points"},
             ctx.cfg.origin, "params");
  const double lambda = get_num(P, "lambda", ctx.cfg.origin, 1.0);
  const double Delta = get_num(P, "Delta", ctx.cfg.origin);
  const double Omega_x = get_num(P, "Omega_x", ctx.cfg.origin);
  const double Delta_a = get_num(P, "Delta_a", ctx.cfg.origin);
  const double Omega = get_num(P, "Omega", ctx.cfg.origin);
  DissipationParams diss{get_num(P, "gamma_s", ctx.cfg.origin, 0.0),
                         get_num(P, "gamma_m", ctx.cfg.origin, 0.0),
                         get_num(P, "n_th", ctx.cfg.origin, 0.0), 0.0};
  auto dns = get_num_array(P, "delta_n_values", ctx.cfg.origin, {0.0, 5.0, 8.0});
  const double t_max = get_num(P, "t_max", ctx.cfg.origin, 26.0);
  const int points = get_int(P, "time_points", ctx.cfg.origin, 131);
  const int N = resolve_cutoff(ctx.cfg, default_fock_cutoff(2));

  for (const auto& w :
       validity_warnings({.lambda = lambda, .Omega = Omega, .Omega_x = Omega_x,
                          .Delta = Delta}))
    ctx.warn(w);

  auto peak_p2 = [&](double scale, double delta_n, int cutoff,
                     const std::string& csv_name) {
    const DriftParams drift = drift_shift(scale * Delta, scale * Omega_x, delta_n);
    HilbertSpace space{2, cutoff};
    Operator sm = spin_op(SpinOp::SigmaMinus, space);
    Operator H = build_dressed_mollow({.lambda = lambda, .Omega = Omega,
                                       .Delta_a = Delta_a}, space) -
                 (0.5 * drift.delta_omega_bd) * (sm + sm.adjoint());
    LindbladModel model = make_model(H, diss, ModelVariant::Fock);
    EvolveOptions eopt;
    eopt.integrator = ctx.cfg.integrator;
    eopt.store_states = true;
    auto evo = lindblad_evolve(model, basis_state(0, 0, space),
                               linspace(0.0, t_max, points), {}, eopt);
    std::optional<CsvFile> csv;
    if (!csv_name.empty() && ctx.opt.write_outputs) {
      csv.emplace(ctx.out_path(csv_name), std::vector<std::string>{"time", "P2"});
      ctx.note_file(csv_name);
    }
    double peak = 0.0;
    for (size_t i = 0; i < evo.times.size(); ++i) {
      const double p2 = populations_of(evo.states[i], space)(2);
      peak = std::max(peak, p2);
      if (csv) csv->row({evo.times[i], p2});
    }
    return std::pair{peak, drift.delta_omega_bd};
  };

  double baseline = 0.0;
  for (double dn : dns) {
    const std::string tag = "dn" + fmt_key(dn);
    auto [peak, dw] = peak_p2(1.0, dn, N, "p2_" + tag + ".csv");
    ctx.put("p2_peak_" + tag, peak);
    ctx.put("delta_omega_bd_" + tag, dw);
    if (dn == dns.front()) baseline = peak;
    else ctx.put("degradation_" + tag, (baseline - peak) / baseline);
  }

  if (P.contains("scaled_run")) {
    const auto& S = P.at("scaled_run");
    check_keys(S, {"scale", "delta_n"}, ctx.cfg.origin, "params.scaled_run");
    const double scale = get_num(S, "scale", ctx.cfg.origin, 2.0);
    const double dn = get_num(S, "delta_n", ctx.cfg.origin, 8.0);
    const std::string tag = "dn" + fmt_key(dn) + "_scaled";
    auto [peak, dw] = peak_p2(scale, dn, N, "p2_" + tag + ".csv");
    ctx.put("p2_peak_" + tag, peak);
    ctx.put("delta_omega_bd_" + tag, dw);
    const double deg_scaled = (baseline - peak) / baseline;
    ctx.put("degradation_" + tag, deg_scaled);
    const auto it = ctx.res.results.find("degradation_dn" + fmt_key(dn));
    if (it != ctx.res.results.end())
      ctx.put("scaled_improvement", it->second - deg_scaled);
  }

  const double base5 = peak_p2(1.0, dns.front(), N + 5, "").first;
  ctx.put("convergence_rel_change", std::abs(base5 - baseline) / baseline);
  ctx.put("cutoff", N);
}

// ---------------------------------------------------------------------------
// device

void run_device(Context& ctx) {
  const auto& P = ctx.cfg.params;
  check_keys(P, {"l", "w", "t", "E", "varrho", "G_m", "h", "T", "g_s", "note"},
             ctx.cfg.origin, "params");
  DeviceParams d;
  d.l = get_num(P, "l", ctx.cfg.origin);
  d.w = get_num(P, "w", ctx.cfg.origin);
  d.t = get_num(P, "t", ctx.cfg.origin);
  d.E = get_num(P, "E", ctx.cfg.origin);
  d.varrho = get_num(P, "varrho", ctx.cfg.origin);
  d.G_m = get_num(P, "G_m", ctx.cfg.origin);
  d.h = get_num(P, "h", ctx.cfg.origin, 0.0);
  d.T = get_num(P, "T", ctx.cfg.origin);
  d.g_s = get_num(P, "g_s", ctx.cfg.origin, 2.0);

  const FeasibilityReport rep = feasibility(d);
  ctx.put("omega_r", rep.omega_r);
  ctx.put("omega_r_over_2pi", rep.omega_r / (2.0 * M_PI));
  ctx.put("m_eff", rep.m_eff);
  ctx.put("a0", rep.a0);
  ctx.put("lambda", rep.lambda);
  ctx.put("lambda_over_2pi", rep.lambda / (2.0 * M_PI));
  ctx.put("n_th", rep.n_th);

  if (ctx.opt.write_outputs) {
    json rj{{"omega_r_rad_per_s", rep.omega_r},
            {"omega_r_over_2pi_Hz", rep.omega_r / (2.0 * M_PI)},
            {"m_eff_kg", rep.m_eff},
            {"a0_m", rep.a0},
            {"lambda_rad_per_s", rep.lambda},
            {"lambda_over_2pi_Hz", rep.lambda / (2.0 * M_PI)},
            {"n_th", rep.n_th}};
    if (P.contains("note")) rj["note"] = P.at("note");
    std::ofstream f(ctx.out_path("report.json"));
    f << rj.dump(2) << "\n";
    ctx.note_file("report.json");
  }
}

// ---------------------------------------------------------------------------
// checks and summary

CheckOutcome evaluate_check(const json& c, const std::map<std::string, double>& results,
                            const std::string& origin) {
  check_keys(c, {"value", "min", "max", "target", "rtol", "atol", "note"}, origin,
             "checks[]");
  if (!c.contains("value") || !c.at("value").is_string())
    config_fail(origin, "each check needs a string \"value\" key");
  const std::string key = c.at("value").get<std::string>();
  const auto it = results.find(key);
  CheckOutcome out;
  if (it == results.end()) {
    out.description = key + ": result key not produced by this scenario";
    out.observed = std::nan("");
    out.pass = false;
    return out;
  }
  const double v = it->second;
  out.observed = v;
  bool pass = std::isfinite(v);
  std::ostringstream desc;
  desc << key << " = " << std::setprecision(10) << v;
  if (c.contains("min")) {
    const double m = c.at("min").get<double>();
    pass = pass && v >= m;
    desc << ", min " << m;
  }
  if (c.contains("max")) {
    const double m = c.at("max").get<double>();
    pass = pass && v <= m;
    desc << ", max " << m;
  }
  if (c.contains("target")) {
    const double t = c.at("target").get<double>();
    double tol = 0.0;
    if (c.contains("rtol")) tol += c.at("rtol").get<double>() * std::abs(t);
    if (c.contains("atol")) tol += c.at("atol").get<double>();
    pass = pass && std::abs(v - t) <= tol;
    desc << ", target " << t << " +- " << tol;
  }
  out.description = desc.str();
  out.pass = pass;
  return out;
}

void write_summary(const Context& ctx) {
  if (!ctx.opt.write_outputs) return;
  json s;
  s["schema_version"] = kSchemaVersion;
  s["scenario"] = ctx.cfg.scenario;
  s["seed"] = ctx.cfg.seed;
  s["params"] = ctx.cfg.params;
  json results = json::object();
  for (const auto& [k, v] : ctx.res.results) results[k] = v;
  s["results"] = results;
  s["warnings"] = ctx.res.warnings;
  if (!ctx.res.checks.empty()) {
    json checks = json::array();
    for (const auto& c : ctx.res.checks)
      checks.push_back({{"description", c.description}, {"pass", c.pass}});
    s["checks"] = checks;
  }
  s["files"] = ctx.res.files_written;
  std::ofstream f(std::filesystem::path(ctx.opt.out_dir) / "summary.json");
  f << s.dump(2) << "\n";
}

}  // namespace

bool ScenarioResult::checks_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_scenario_config(j, path);
}

ScenarioConfig parse_scenario_config(const json& j, const std::string& origin) {
  check_keys(j,
             {"schema_version", "scenario", "output", "seed", "cutoff", "tolerances",
              "params", "checks"},
             origin, "config");
  if (get_int(j, "schema_version", origin) != kSchemaVersion)
    config_fail(origin, "unsupported schema_version (expected " +
                            std::to_string(kSchemaVersion) + ")");
  ScenarioConfig cfg;
  cfg.origin = origin;
  if (!j.contains("scenario") || !j.at("scenario").is_string())
    config_fail(origin, "missing string key \"scenario\"");
  cfg.scenario = j.at("scenario").get<std::string>();
  static const std::vector<std::string> known{
      "spectrum", "rates", "fock", "cat", "correlations", "drift", "device"};
  if (std::find(known.begin(), known.end(), cfg.scenario) == known.end())
    config_fail(origin, "unknown scenario \"" + cfg.scenario + "\"");
  cfg.output_name = j.value("output", cfg.scenario);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      config_fail(origin, "seed must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.cutoff_override = get_int(j, "cutoff", origin, 0);
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    check_keys(t, {"rel", "abs"}, origin, "tolerances");
    cfg.integrator.rel_tol = get_num(t, "rel", origin, 1e-8);
    cfg.integrator.abs_tol = get_num(t, "abs", origin, 1e-10);
  }
  cfg.params = j.value("params", json::object());
  if (!cfg.params.is_object()) config_fail(origin, "params must be an object");
  cfg.checks = j.value("checks", json::array());
  if (!cfg.checks.is_array()) config_fail(origin, "checks must be an array");
  return cfg;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  if (opt.write_outputs) std::filesystem::create_directories(opt.out_dir);
  Context ctx{cfg, opt, res};

  if (cfg.scenario == "rates") run_rates(ctx);
  else if (cfg.scenario == "spectrum") run_spectrum(ctx);
  else if (cfg.scenario == "fock") run_fock(ctx);
  else if (cfg.scenario == "cat") run_cat(ctx);
  else if (cfg.scenario == "correlations") run_correlations(ctx);
  else if (cfg.scenario == "drift") run_drift(ctx);
  else if (cfg.scenario == "device") run_device(ctx);
  else config_fail(cfg.origin, "unknown scenario \"" + cfg.scenario + "\"");

  if (opt.run_checks)
    for (const auto& c : cfg.checks)
      res.checks.push_back(evaluate_check(c, res.results, cfg.origin));

  write_summary(ctx);
  return res;
}

std::string resolve_output_root(const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("MULTIPHONON_OUT"); env && *env) return env;
  return "out";
}

std::string config_schema_text() {
  return R"(Scenario config (JSON, schema_version 1). Unknown keys are rejected.

Top level:
  schema_version : 1                      (required)
  scenario       : spectrum | rates | fock | cat | correlations | drift | device
  output         : output subdirectory name          (default: scenario name)
  seed           : non-negative integer              (default 1)
  cutoff         : Fock cutoff override, 0 = default rule N = max(4n+5, cat rule)
  tolerances     : { rel, abs }  integrator tolerances (default 1e-8 / 1e-10)
  params         : scenario-specific block, see below
  checks         : [ { value, min?, max?, target?, rtol?, atol?, note? } ]

params by scenario (rates in units of lambda):
  rates        : lambda, orders[], Omega_values[]
  spectrum     : lambda, Delta_a, Omega_min, Omega_max, resolution,
                 levels [first,last], crossings[], crossing_halfwidth,
                 jc_check_Delta_a
  fock         : n, lambda, Delta_a, Omega, gamma_s, gamma_m, n_th,
                 t_max, time_points, frame ("rotating" | "full")
  cat          : lambda2, Omega0, gamma_s, gamma_m, n_th, t_max, time_points,
                 residual_cutoff, fringe_x_cut,
                 wigner { x_max, p_max, nx, np },
                 trajectory { enabled, burn_in },
                 ensemble { enabled, n_traj }
  correlations : lambda2, gamma_s, gamma_m_total, Gamma_0, interaction_order,
                 orders[], tau_max, tau_points, small_tau_multiples[]
  drift        : lambda, Delta, Omega_x, Delta_a, Omega, gamma_s, gamma_m, n_th,
                 delta_n_values[], scaled_run { scale, delta_n },
                 t_max, time_points
  device (SI)  : l, w, t, E, varrho, G_m, h, T, g_s, note

Outputs: per-scenario CSV/JSON data files plus summary.json (results,
warnings, convergence gate, check outcomes). Re-running a config with the
same seed reproduces every data file byte for byte.
)";
}

}  // namespace mph
