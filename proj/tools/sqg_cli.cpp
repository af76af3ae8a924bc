// Command-line driver: scenario runs and the benchmark studies.

#include <CLI11.hpp>

#include <iostream>

#include "sqg/scenarios.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::string& seed_str,
                const std::vector<std::string>& overrides) {
  sqg::RunConfig cfg = sqg::load_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (!seed_str.empty()) sqg::apply_override(cfg, "seed", seed_str);
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw sqg::error("--override expects key=value, got: " + ov);
    sqg::apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
  }
  sqg::run(cfg, &std::cout);
  return 0;
}

std::vector<int> mesh_ladder(int max_dofs) {
  std::vector<int> out;
  for (int n = 10; n * n <= max_dofs; n *= 2) out.push_back(n);
  if (out.empty()) throw sqg::error("--max-dofs too small for the 10..80 ladder");
  return out;
}

void print_table(const sqg::ErrorTable& t, const std::string& title) {
  std::cout << "== " << title << "\n";
  std::cout << "   dofs        L1    rate        L2    rate      Linf    rate\n";
  for (size_t i = 0; i < t.dofs.size(); ++i) {
    auto rate = [&](double c, double f) {
      return i == 0 ? std::string("   --") : [&] {
        char b[16];
        std::snprintf(b, sizeof(b), "%5.2f", std::log2(c / f));
        return std::string(b);
      }();
    };
    const auto& e = t.errors[i];
    char line[256];
    std::snprintf(line, sizeof(line), "%7d  %9.3e  %s  %9.3e  %s  %9.3e  %s",
                  t.dofs[i], e.l1,
                  rate(i ? t.errors[i - 1].l1 : 0, e.l1).c_str(), e.l2,
                  rate(i ? t.errors[i - 1].l2 : 0, e.l2).c_str(), e.linf,
                  rate(i ? t.errors[i - 1].linf : 0, e.linf).c_str());
    std::cout << line;
    if (!t.kinetic.empty()) {
      char kh[64];
      std::snprintf(kh, sizeof(kh), "  K=%8.4f  H=%8.4f", t.kinetic[i], t.helicity[i]);
      std::cout << kh;
    }
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-element solver for surface quasi-geostrophic flow on the periodic torus"};
  app.require_subcommand(1);

  // run <config>
  std::string config_path, out_dir, seed_str;
  std::vector<std::string> overrides;
  CLI::App* cmd_run = app.add_subcommand("run", "execute a config-file run");
  cmd_run->add_option("config", config_path, "key = value config file")->required();
  cmd_run->add_option("--out", out_dir, "output directory (overrides config)");
  cmd_run->add_option("--seed", seed_str, "seed (overrides config)");
  cmd_run->add_option("--override", overrides, "key=value config overrides");

  // table1
  int max_dofs = 6400;
  std::string t1_out = "out_table1";
  CLI::App* cmd_t1 = app.add_subcommand("table1", "smooth-convection convergence study");
  cmd_t1->add_option("--max-dofs", max_dofs, "largest vertex count (default 6400)");
  cmd_t1->add_option("--out", t1_out, "output directory");

  // table2
  std::string t2_out = "out_table2";
  CLI::App* cmd_t2 = app.add_subcommand("table2", "fractional-diffusion quadrature study");
  cmd_t2->add_option("--max-dofs", max_dofs, "largest vertex count (default 6400)");
  cmd_t2->add_option("--out", t2_out, "output directory");

  // vortex
  bool double_vortex = false, fine_mesh = false;
  double vortex_cev = 0.1, vortex_T = 40.0;
  int vortex_n = 0;
  std::string vx_out = "out_vortex";
  CLI::App* cmd_vx = app.add_subcommand("vortex", "rotating-vortex benchmark");
  cmd_vx->add_flag("--double", double_vortex, "two interacting vortices");
  cmd_vx->add_flag("--fine", fine_mesh, "512x512 vertices instead of 351x351");
  cmd_vx->add_option("--n", vortex_n, "explicit n_side");
  cmd_vx->add_option("--cev", vortex_cev, "entropy viscosity parameter (default 0.1)");
  cmd_vx->add_option("--t-final", vortex_T, "final time (default 40)");
  cmd_vx->add_option("--out", vx_out, "output directory");

  // turbulence
  bool qg_mode = false;
  int turb_n = 0;
  double turb_T = 20.0;
  uint64_t turb_seed = 0;
  std::string tb_out = "out_turbulence";
  CLI::App* cmd_tb = app.add_subcommand("turbulence", "freely decaying turbulence");
  cmd_tb->add_flag("--qg", qg_mode, "quasi-geostrophic stream function (-lap psi = theta)");
  cmd_tb->add_option("--n", turb_n, "n_side (default 256; the full study uses 512)");
  cmd_tb->add_option("--t-final", turb_T, "final time (default 20)");
  cmd_tb->add_option("--seed", turb_seed, "RNG seed");
  cmd_tb->add_option("--out", tb_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) return run_command(config_path, out_dir, seed_str, overrides);

    if (cmd_t1->parsed()) {
      const std::vector<int> ns = mesh_ladder(max_dofs);
      print_table(sqg::table1_block(sqg::SchemeKind::Galerkin,
                                    sqg::EVNormalization::Local, ns, &std::cout, t1_out),
                  "Galerkin");
      print_table(sqg::table1_block(sqg::SchemeKind::EntropyViscosity,
                                    sqg::EVNormalization::Local, ns, &std::cout, t1_out),
                  "EV");
      print_table(sqg::table1_block(sqg::SchemeKind::FCT,
                                    sqg::EVNormalization::Local, ns, &std::cout, t1_out),
                  "FCT+EV");
      print_table(sqg::table1_block(sqg::SchemeKind::EntropyViscosity,
                                    sqg::EVNormalization::Max, ns, &std::cout, t1_out),
                  "EV+eta2");
      print_table(sqg::table1_block(sqg::SchemeKind::FCT,
                                    sqg::EVNormalization::Max, ns, &std::cout, t1_out),
                  "FCT+EV+eta2");
      return 0;
    }

    if (cmd_t2->parsed()) {
      const std::vector<int> ns = mesh_ladder(max_dofs);
      print_table(sqg::table2_block(sqg::SincQuadrature(0.8, 12), ns, &std::cout, t2_out),
                  "sinc k=0.8 M=12");
      print_table(sqg::table2_block(sqg::SincQuadrature::fine(), ns, &std::cout, t2_out),
                  "sinc k=0.2 M=62");
      return 0;
    }

    if (cmd_vx->parsed()) {
      sqg::RunConfig cfg = sqg::default_config(
          double_vortex ? sqg::Scenario::DoubleVortex : sqg::Scenario::SingleVortex);
      if (fine_mesh) cfg.n_side = 512;
      if (vortex_n > 0) cfg.n_side = vortex_n;
      cfg.c_ev = vortex_cev;
      cfg.t_final = vortex_T;
      std::erase_if(cfg.snapshot_times, [&](double t) { return t > vortex_T; });
      cfg.output_dir = vx_out;
      sqg::run(cfg, &std::cout);
      return 0;
    }

    if (cmd_tb->parsed()) {
      sqg::RunConfig cfg = sqg::default_config(sqg::Scenario::DecayingTurbulence);
      if (turb_n > 0) cfg.n_side = turb_n;
      cfg.t_final = turb_T;
      std::erase_if(cfg.snapshot_times, [&](double t) { return t > turb_T; });
      if (cfg.snapshot_times.empty() || cfg.snapshot_times.back() < turb_T)
        cfg.snapshot_times.push_back(turb_T);
      if (qg_mode) cfg.velocity_mode = sqg::VelocityMode::QG;
      if (turb_seed) cfg.seed = turb_seed;
      cfg.output_dir = tb_out;
      sqg::run(cfg, &std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
