// qspeed command-line harness: fidelity-vs-time sweeps, speed-limit reports,
// single-point pulse optimization, witness search and CSV -> SVG plotting.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qspeed/qspeed.hpp"

namespace {

using namespace qspeed;

// Flag values that may or may not have been given on the command line; field
// precedence is flags > config file > budget preset > built-in default.
struct CliValues {
  std::string config_path;
  bool paper_scale = false;

  int d_site = 0;
  double g = 0.0;
  double alpha = 0.0;

  std::string gate;
  std::string optimizer;
  bool ort = false;
  double grid_start = 0.0, grid_stop = 0.0, grid_step = 0.0;
  bool fine_grid = false;
  std::string output;
  std::string svg;

  int iterations = 0, seeds = 0, segments = 0, grape_steps = 0;
  double learning_rate = 0.0, momentum = 0.0, cap = 0.0;
  std::uint64_t rng_seed_base = 0;

  double t_over_tmin = 0.0;  // optimize subcommand
};

void add_device_flags(CLI::App* cmd, CliValues& v) {
  cmd->add_option("-d,--d-site", v.d_site, "levels per qudit (2, 3 or 4)");
  cmd->add_option("-g,--coupling", v.g, "coupling strength g, rad/s");
  cmd->add_option("--alpha", v.alpha, "anharmonicity of both qudits, rad/s");
}

void add_optimizer_flags(CLI::App* cmd, CliValues& v) {
  cmd->add_option("--iterations", v.iterations, "gradient iterations per seed");
  cmd->add_option("--seeds", v.seeds, "random restarts per grid point");
  cmd->add_option("--segments", v.segments, "segment count (quopt)");
  cmd->add_option("--grape-steps", v.grape_steps, "time steps (grape)");
  cmd->add_option("--learning-rate", v.learning_rate, "step size, cap units");
  cmd->add_option("--momentum", v.momentum, "Nesterov momentum");
  cmd->add_option("--cap", v.cap, "amplitude cap, rad/s (default 40 g)");
  cmd->add_option("--seed-base", v.rng_seed_base, "first RNG seed");
  cmd->add_flag("--paper-scale", v.paper_scale,
                "published budgets: 50 seeds x 5000 iterations (quopt), "
                "10 x 10000 at 10000 steps (grape)");
}

// Builds the effective SweepConfig for the sweep/optimize subcommands.
SweepConfig resolve_config(const CLI::App* cmd, const CliValues& v) {
  ConfigOverlay overlay;
  if (!v.config_path.empty()) overlay = load_config(v.config_path);

  auto flag_given = [&](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };

  // optimizer kind decides the budget preset
  OptimizerKind kind = overlay.has("sweep.optimizer") ? overlay.cfg.optimizer
                                                      : OptimizerKind::quopt;
  if (flag_given("--optimizer")) {
    if (v.optimizer == "quopt") kind = OptimizerKind::quopt;
    else if (v.optimizer == "grape") kind = OptimizerKind::grape;
    else throw ConfigError("--optimizer: expected quopt or grape, got '" + v.optimizer + "'");
  }

  SweepConfig cfg;
  cfg.optimizer = kind;
  cfg.opt = v.paper_scale ? paper_scale_budget(kind) : desk_scale_budget(kind);

  // config file values override the preset
  const SweepConfig& file = overlay.cfg;
  if (overlay.has("device.g")) cfg.device.g = file.device.g;
  if (overlay.has("device.omega1")) cfg.device.omega[0] = file.device.omega[0];
  if (overlay.has("device.omega2")) cfg.device.omega[1] = file.device.omega[1];
  if (overlay.has("device.alpha") || overlay.has("device.alpha1")) {
    cfg.device.alpha[0] = file.device.alpha[0];
  }
  if (overlay.has("device.alpha") || overlay.has("device.alpha2")) {
    cfg.device.alpha[1] = file.device.alpha[1];
  }
  if (overlay.has("device.d_site")) cfg.device.d_site = file.device.d_site;
  if (overlay.has("sweep.gate")) cfg.gate = file.gate;
  if (overlay.has("sweep.ort")) cfg.ort = file.ort;
  if (overlay.has("sweep.grid_start")) cfg.grid_start = file.grid_start;
  if (overlay.has("sweep.grid_stop")) cfg.grid_stop = file.grid_stop;
  if (overlay.has("sweep.grid_step")) cfg.grid_step = file.grid_step;
  if (overlay.has("sweep.output")) cfg.output = file.output;
  if (overlay.has("optimizer.iterations")) cfg.opt.iterations = file.opt.iterations;
  if (overlay.has("optimizer.seeds")) cfg.opt.seeds = file.opt.seeds;
  if (overlay.has("optimizer.learning_rate")) cfg.opt.learning_rate = file.opt.learning_rate;
  if (overlay.has("optimizer.momentum")) cfg.opt.momentum = file.opt.momentum;
  if (overlay.has("optimizer.cap")) cfg.opt.cap = file.opt.cap;
  if (overlay.has("optimizer.rng_seed_base")) cfg.opt.rng_seed_base = file.opt.rng_seed_base;
  if (overlay.has("optimizer.segments")) cfg.opt.segments = file.opt.segments;
  if (overlay.has("optimizer.grape_steps")) cfg.opt.grape_steps = file.opt.grape_steps;

  // command-line flags override everything
  if (flag_given("--d-site")) cfg.device.d_site = v.d_site;
  if (flag_given("--coupling")) cfg.device.g = v.g;
  if (flag_given("--alpha")) cfg.device.alpha[0] = cfg.device.alpha[1] = v.alpha;
  if (flag_given("--gate")) cfg.gate = v.gate;
  if (flag_given("--ort")) cfg.ort = v.ort;
  if (flag_given("--fine")) {
    cfg.use_fine_grid();
  }
  if (flag_given("--grid-start")) cfg.grid_start = v.grid_start;
  if (flag_given("--grid-stop")) cfg.grid_stop = v.grid_stop;
  if (flag_given("--grid-step")) cfg.grid_step = v.grid_step;
  if (flag_given("--output")) cfg.output = v.output;
  if (flag_given("--iterations")) cfg.opt.iterations = v.iterations;
  if (flag_given("--seeds")) cfg.opt.seeds = v.seeds;
  if (flag_given("--learning-rate")) cfg.opt.learning_rate = v.learning_rate;
  if (flag_given("--momentum")) cfg.opt.momentum = v.momentum;
  if (flag_given("--cap")) cfg.opt.cap = v.cap;
  if (flag_given("--seed-base")) cfg.opt.rng_seed_base = v.rng_seed_base;
  if (flag_given("--segments")) cfg.opt.segments = v.segments;
  if (flag_given("--grape-steps")) cfg.opt.grape_steps = v.grape_steps;
  return cfg;
}

int cmd_sweep(const CLI::App* cmd, const CliValues& v) {
  SweepConfig cfg = resolve_config(cmd, v);
  if (cfg.output.empty()) cfg.output = "sweep.csv";
  std::fprintf(stderr, "sweep: d=%d %s %s%s grid %.3f..%.3f step %.3f -> %s\n",
               cfg.device.d_site, cfg.gate.c_str(),
               cfg.optimizer == OptimizerKind::grape ? "grape" : "quopt",
               cfg.ort ? "+ort" : "", cfg.grid_start, cfg.grid_stop,
               cfg.grid_step, cfg.output.c_str());
  const std::vector<SweepRecord> records = run_sweep(
      cfg, [](const SweepRecord& r, int i, int total) {
        std::fprintf(stderr, "[%2d/%2d] T = %.3f Tmin   F = %.8f   (seed %llu)\n",
                     i + 1, total, r.t_over_tmin, r.best_fidelity,
                     static_cast<unsigned long long>(r.seed_used));
      });
  if (!v.svg.empty()) emit_report(records, ReportFormat::svg, v.svg);
  std::printf("%zu records -> %s\n", records.size(), cfg.output.c_str());
  if (auto t = find_threshold(records, 0.999)) {
    std::printf("F >= 0.999 first reached at T = %.4f Tmin\n", *t);
  } else {
    std::printf("F >= 0.999 not reached on this grid\n");
  }
  return 0;
}

int cmd_bound(const CLI::App* cmd, const CliValues& v) {
  SweepConfig cfg = resolve_config(cmd, v);
  const SpeedLimitReport rep = speed_limit_report(cfg.device, cfg.gate);
  std::printf("gate: %s   d_site = %d   g = %.6g rad/s\n", rep.gate_label.c_str(),
              rep.d_site, rep.g);
  std::printf("qubit %s speed limit:  %.4f ns\n", rep.gate_label.c_str(),
              rep.qubit_tmin * 1e9);
  std::printf("qudit lower bound pi/(2||H0||):  %.4f ns   (||H0|| = %.6f g)\n",
              rep.qudit_lower_bound * 1e9, rep.coupling_norm / rep.g);
  std::printf("bound ratio:  %.6f\n", rep.ratio);
  if (rep.witness_found) {
    std::printf("orthogonal-transfer witness found, |<psi|U|psi>| = %.3g\n",
                std::abs(rep.witness_overlap));
  } else {
    std::printf("no orthogonal-transfer witness found\n");
  }
  return 0;
}

int cmd_optimize(const CLI::App* cmd, const CliValues& v) {
  SweepConfig cfg = resolve_config(cmd, v);
  cfg.validate();
  const double tmin = qubit_gate_tmin(canonical_class("cz"), cfg.device.g);
  const double t_seconds = v.t_over_tmin * tmin;
  if (t_seconds <= 0) throw ConfigError("optimize: --time must be positive");
  const TargetGate target = target_cz(cfg.device.d_site);

  OptimizationResult best = multi_seed_search(
      [&](std::uint64_t seed) {
        if (cfg.optimizer == OptimizerKind::grape) {
          return optimize_grape(cfg.device, target, t_seconds, cfg.opt, cfg.ort, seed);
        }
        return optimize_quopt(cfg.device, target, t_seconds, cfg.opt, seed);
      },
      cfg.opt);

  std::printf("T = %.4f Tmin = %.4f ns\n", v.t_over_tmin, t_seconds * 1e9);
  std::printf("best fidelity  = %.12f\n", best.best_fidelity);
  std::printf("infidelity     = %.3e\n", 1.0 - best.best_fidelity);
  std::printf("seed           = %llu\n",
              static_cast<unsigned long long>(best.seed_used));
  std::printf("iterations     = %d\n", best.iterations_run());

  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw IoError("cannot open " + cfg.output + " for writing");
    if (cfg.optimizer == OptimizerKind::grape && cfg.ort) {
      const OrtPulseSchedule& s = best.ort_schedule();
      out << "step,drive1,drive2\n";
      char buf[128];
      for (int n = 0; n < s.steps; ++n) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", n, s.env(0, n),
                      s.env(1, n));
        out << buf;
      }
    } else {
      const PulseSchedule& s = best.schedule();
      out << "segment";
      for (int qd = 0; qd < 2; ++qd) {
        for (int q = 0; q < 2; ++q) {
          for (int j = 0; j < s.transitions; ++j) {
            out << ",q" << (qd + 1) << (q == 0 ? "_x_" : "_y_") << j << (j + 1);
          }
        }
      }
      out << '\n';
      for (int m = 0; m < s.segments; ++m) {
        out << m;
        char buf[64];
        for (int qd = 0; qd < 2; ++qd) {
          for (int q = 0; q < 2; ++q) {
            for (int j = 0; j < s.transitions; ++j) {
              std::snprintf(buf, sizeof(buf), ",%.17g",
                            s.amp(qd, Quadrature(q), j, m));
              out << buf;
            }
          }
        }
        out << '\n';
      }
    }
    if (!out) throw IoError("write failed on " + cfg.output);
    std::printf("pulse written to %s\n", cfg.output.c_str());
  }
  return 0;
}

int cmd_witness(const CLI::App* cmd, const CliValues& v) {
  SweepConfig cfg = resolve_config(cmd, v);
  const TargetGate target = target_cz(cfg.device.d_site);
  const Vector canonical = canonical_cz_witness(cfg.device.d_site);
  const Complex canon_overlap = orthogonal_transfer_witness(target, canonical);
  std::printf("canonical witness |1> x uniform:  |<psi|U|psi>| = %.3e\n",
              std::abs(canon_overlap));
  if (auto psi = witness_search(target)) {
    const Complex overlap = orthogonal_transfer_witness(target, *psi);
    std::printf("search found a product witness:   |<psi|U|psi>| = %.3e\n",
                std::abs(overlap));
    std::printf("site weights:");
    const int d = cfg.device.d_site;
    for (int k = 0; k < d; ++k) {
      double w = 0.0;
      for (int l = 0; l < d; ++l) w += std::norm((*psi)(k * d + l));
      std::printf(" %.4f", w);
    }
    std::printf(" (x)");
    for (int l = 0; l < d; ++l) {
      double w = 0.0;
      for (int k = 0; k < d; ++k) w += std::norm((*psi)(k * d + l));
      std::printf(" %.4f", w);
    }
    std::printf("\n");
  } else {
    std::printf("no product witness found\n");
  }
  return 0;
}

int cmd_plot(const std::string& input, const std::string& output) {
  const std::vector<SweepRecord> records = read_csv(input);
  if (records.empty()) throw IoError(input + ": no records to plot");
  write_svg(records, output);
  std::printf("%zu records -> %s\n", records.size(), output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-qudit CZ pulse optimization and speed limits"};
  app.require_subcommand(1);

  CliValues v;
  std::string plot_input, plot_output;

  CLI::App* sweep = app.add_subcommand("sweep", "fidelity-vs-time sweep");
  sweep->add_option("-c,--config", v.config_path, "config file (INI sections)");
  add_device_flags(sweep, v);
  sweep->add_option("--gate", v.gate, "target gate (cz)");
  sweep->add_option("--optimizer", v.optimizer, "quopt | grape");
  sweep->add_flag("--ort", v.ort, "anharmonic off-resonant-transition model");
  sweep->add_option("--grid-start", v.grid_start, "first time, units of Tmin");
  sweep->add_option("--grid-stop", v.grid_stop, "last time, units of Tmin");
  sweep->add_option("--grid-step", v.grid_step, "grid spacing, units of Tmin");
  sweep->add_flag("--fine", v.fine_grid, "fine grid 1.0..1.2 step 0.025");
  sweep->add_option("-o,--output", v.output, "CSV output path");
  sweep->add_option("--svg", v.svg, "also render an SVG to this path");
  add_optimizer_flags(sweep, v);

  CLI::App* bound = app.add_subcommand("bound", "analytic speed-limit report");
  bound->add_option("-c,--config", v.config_path, "config file");
  add_device_flags(bound, v);
  bound->add_option("--gate", v.gate, "target gate (cz)");

  CLI::App* optimize = app.add_subcommand("optimize", "optimize one pulse time");
  optimize->add_option("-c,--config", v.config_path, "config file");
  add_device_flags(optimize, v);
  optimize->add_option("--gate", v.gate, "target gate (cz)");
  optimize->add_option("--optimizer", v.optimizer, "quopt | grape");
  optimize->add_flag("--ort", v.ort, "anharmonic off-resonant-transition model");
  optimize->add_option("-t,--time", v.t_over_tmin, "pulse time, units of Tmin")
      ->required();
  optimize->add_option("-o,--output", v.output, "pulse CSV output path");
  add_optimizer_flags(optimize, v);

  CLI::App* witness = app.add_subcommand("witness", "orthogonal-transfer witness search");
  witness->add_option("-c,--config", v.config_path, "config file");
  add_device_flags(witness, v);

  CLI::App* plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
  plot->add_option("-i,--input", plot_input, "sweep CSV")->required();
  plot->add_option("-o,--output", plot_output, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(sweep, v);
    if (bound->parsed()) return cmd_bound(bound, v);
    if (optimize->parsed()) return cmd_optimize(optimize, v);
    if (witness->parsed()) return cmd_witness(witness, v);
    if (plot->parsed()) return cmd_plot(plot_input, plot_output);
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
