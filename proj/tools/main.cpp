// dirac-green: batch driver for Green-function computation, energy-window
// scans, spectral-density profiles, the recursion-versus-section comparison
// suite and the embedded-eigenvalue construction.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cli_util.hpp"
#include "dirac_green/errors.hpp"
#include "dirac_green/oracle.hpp"
#include "dirac_green/verify.hpp"

namespace fs = std::filesystem;
using cli::json;
using dg::cplx;

namespace {

json error_json(const char* type, const std::string& message) {
  return json{{"error", {{"type", type}, {"message", message}}}};
}

// Writes the JSON error record and maps the failure onto exit code 2.
int fail_command(const fs::path& out_file, const char* type,
                 const std::string& message, const std::string& hash) {
  json j = error_json(type, message);
  j["version"] = cli::kVersion;
  j["config_hash"] = hash;
  cli::write_json_file(out_file, j);
  cli::log(cli::LogLevel::Error, message);
  return 2;
}

int cmd_green(const json& cfg, const fs::path& outdir, const std::string& hash) {
  const dg::OperatorSpec spec = cli::spec_from_config(cfg);
  const json section = cfg.contains("green") ? cfg["green"] : json::object();
  const dg::GreenOptions opts = cli::green_options(section, cfg);
  const cplx lam(section.value("lambda_re", 0.0), section.value("lambda_im", 1.0));
  const long site = section.value("site", spec.lattice.start);
  const fs::path out_file = outdir / "green.json";

  try {
    dg::GreenResult r;
    if (spec.lattice.is_half_line()) {
      r = dg::half_line_green(spec, lam, site, opts);
    } else {
      dg::OperatorSpec t = spec;
      t.pot = dg::shift_potential(spec.pot, site);
      r = dg::glue_full_line(t, lam, opts);
    }
    json j{{"command", "green"},
           {"version", cli::kVersion},
           {"config_hash", hash},
           {"lambda_re", lam.real()},
           {"lambda_im", lam.imag()},
           {"site", site},
           {"value_re", r.value.real()},
           {"value_im", r.value.imag()},
           {"depth", r.depth},
           {"residual", r.residual},
           {"seed", r.seed_used.label()}};
    j["error_bound"] = r.error_bound ? json(*r.error_bound) : json(nullptr);
    cli::write_json_file(out_file, j);
    return 0;
  } catch (const dg::InvalidPotential& e) {
    return fail_command(out_file, "InvalidPotential", e.what(), hash);
  } catch (const dg::MaxDepthExceeded& e) {
    return fail_command(out_file, "MaxDepthExceeded", e.what(), hash);
  } catch (const std::domain_error& e) {
    return fail_command(out_file, "DomainError", e.what(), hash);
  }
}

dg::EntrySelector selector_from(const json& section, const dg::OperatorSpec& spec) {
  dg::EntrySelector sel;
  sel.site = section.value("site", spec.lattice.start);
  const std::string spin = section.value("spin", "down");
  if (spin == "down") {
    sel.spin = dg::Spin::Down;
  } else if (spin == "up") {
    sel.spin = dg::Spin::Up;
  } else {
    throw cli::ConfigError("spin must be 'up' or 'down'");
  }
  return sel;
}

dg::VerdictThresholds thresholds_from(const json& section) {
  dg::VerdictThresholds th;
  if (section.contains("thresholds")) {
    const json& t = section["thresholds"];
    th.bounded_exponent = t.value("bounded_exponent", th.bounded_exponent);
    th.growth_exponent = t.value("growth_exponent", th.growth_exponent);
    th.bounded_ratio = t.value("bounded_ratio", th.bounded_ratio);
  }
  return th;
}

json sup_table_json(const dg::ScanReport& rep) {
  json t = json::array();
  for (std::size_t i = 0; i < rep.window.eps.size(); ++i) {
    t.push_back(json{{"eps", rep.window.eps[i]},
                     {"sup_abs_g", rep.sup_abs_g[i]},
                     {"complete", static_cast<bool>(rep.level_complete[i])}});
  }
  return t;
}

int cmd_scan(const json& cfg, const fs::path& outdir, const std::string& hash,
             int threads) {
  const dg::OperatorSpec spec = cli::spec_from_config(cfg);
  if (!cfg.contains("scan")) throw cli::ConfigError("config: 'scan' missing");
  const json& section = cfg["scan"];
  const dg::Window window = cli::window_from_config(section);
  const dg::EntrySelector sel = selector_from(section, spec);

  dg::ScanOptions opts;
  opts.green = cli::green_options(section, cfg);
  if (!section.contains("tol")) opts.green.tol = 1e-9;
  opts.thresholds = thresholds_from(section);
  opts.threads = threads;

  const dg::ScanReport rep = dg::scan_window(spec, window, sel, opts);

  cli::CsvWriter csv(outdir / "scan.csv", hash);
  csv.header("x,eps,abs_g,im_g,dist_to_i,status");
  const int nx = window.x_count;
  for (std::size_t ei = 0; ei < window.eps.size(); ++ei) {
    for (int j = 0; j < nx; ++j) {
      const dg::ScanPoint& pt = rep.at(static_cast<int>(ei), j);
      csv.field(pt.x);
      csv.field(pt.eps);
      if (pt.ok()) {
        csv.field(std::abs(pt.g));
        csv.field(pt.g.imag());
        csv.field(pt.dist_to_i);
      } else {
        csv.field("nan");
        csv.field("nan");
        csv.field("nan");
      }
      csv.field(pt.status);
      csv.endrow();
    }
  }

  json cfg_echo = cfg;
  cfg_echo.erase("threads");
  cfg_echo.erase("output");
  json meta{{"command", "scan"},
            {"version", cli::kVersion},
            {"config_hash", hash},
            {"heuristic", true},
            {"verdict", dg::verdict_label(rep.verdict)},
            {"growth_exponent", rep.growth_exponent},
            {"sup_table", sup_table_json(rep)},
            {"config", cfg_echo}};
  cli::write_json_file(outdir / "scan_meta.json", meta);
  if (cfg.value("output", json::object()).value("plot_script", true)) {
    cli::emit_plot_script(outdir);
  }
  return 0;
}

int cmd_density(const json& cfg, const fs::path& outdir, const std::string& hash,
                int threads) {
  const dg::OperatorSpec spec = cli::spec_from_config(cfg);
  if (!cfg.contains("density")) throw cli::ConfigError("config: 'density' missing");
  const json& section = cfg["density"];
  const double eps = section.value("eps", 1e-3);
  json wsec = section;
  if (!wsec.contains("eps")) wsec["eps"] = eps;
  const dg::Window window = cli::window_from_config(wsec);
  const long site = section.value("site", spec.lattice.start);

  dg::ScanOptions opts;
  opts.green = cli::green_options(section, cfg);
  if (!section.contains("tol")) opts.green.tol = 1e-9;
  opts.threads = threads;

  const auto rows = dg::density_profile(spec, window, eps, site, opts);

  cli::CsvWriter csv(outdir / "density.csv", hash);
  csv.header("x,rho_up,rho_down,rho_total");
  for (const auto& d : rows) {
    csv.field(d.x);
    if (d.status == "ok") {
      csv.field(d.rho_up);
      csv.field(d.rho_down);
      csv.field(d.rho_total);
    } else {
      csv.field("nan");
      csv.field("nan");
      csv.field("nan");
    }
    csv.endrow();
  }
  json cfg_echo = cfg;
  cfg_echo.erase("threads");
  cfg_echo.erase("output");
  json meta{{"command", "density"}, {"version", cli::kVersion},
            {"config_hash", hash},  {"eps", eps},
            {"site", site},         {"config", cfg_echo}};
  cli::write_json_file(outdir / "density_meta.json", meta);
  if (cfg.value("output", json::object()).value("plot_script", true)) {
    cli::emit_plot_script(outdir);
  }
  return 0;
}

int cmd_verify(const json& cfg, const fs::path& outdir, const std::string& hash,
               int threads) {
  dg::VerifyOptions opts;
  if (cfg.contains("verify")) {
    const json& v = cfg["verify"];
    opts.n_cases = v.value("cases", opts.n_cases);
    opts.section_n = v.value("section_n", opts.section_n);
    opts.tolerance = v.value("tolerance", opts.tolerance);
    opts.rng_seed = v.value("rng_seed", opts.rng_seed);
  }
  opts.threads = threads;
  const dg::VerifyReport rep = dg::run_verify_suite(opts);

  json cases = json::array();
  for (const auto& c : rep.cases) {
    cases.push_back(json{{"label", c.label},
                         {"mass", c.mass},
                         {"power", c.power},
                         {"with_w", c.with_w},
                         {"err_half", c.err_half},
                         {"err_glue", c.err_glue},
                         {"err_up", c.err_up}});
  }
  json j{{"command", "verify"},
         {"version", cli::kVersion},
         {"config_hash", hash},
         {"cases", cases},
         {"max_error", rep.max_error},
         {"tolerance", rep.tolerance},
         {"section_n", rep.section_n},
         {"pass", rep.pass},
         {"elapsed_seconds", rep.elapsed_seconds}};
  cli::write_json_file(outdir / "verify.json", j);
  cli::log(cli::LogLevel::Info,
           "verify: max_error = " + cli::fmt17(rep.max_error) +
               (rep.pass ? " (pass)" : " (FAIL)"));
  return rep.pass ? 0 : 2;
}

int cmd_eigs(const json& cfg, const fs::path& outdir, const std::string& hash) {
  int n0 = 3;
  double mass = cfg.value("operator", json::object()).value("mass", 0.0);
  if (cfg.contains("eigs")) {
    n0 = cfg["eigs"].value("n0", n0);
    mass = cfg["eigs"].value("mass", mass);
  }
  if (n0 < 1) throw cli::ConfigError("eigs.n0 must be >= 1");

  const dg::EmbeddedEigReport rep = dg::embedded_eigenvalue_demo(n0, mass);
  const bool pass = rep.max_formula_error <= 1e-8 && rep.all_in_band &&
                    rep.max_offblock_coupling == 0.0;
  json j{{"command", "eigs"},
         {"version", cli::kVersion},
         {"config_hash", hash},
         {"n0", rep.n0},
         {"mass", rep.m},
         {"defect_site", rep.defect_site},
         {"eigenvalues", rep.block_eigs},
         {"predicted", rep.predicted},
         {"max_formula_error", rep.max_formula_error},
         {"max_offblock_coupling", rep.max_offblock_coupling},
         {"all_in_band", rep.all_in_band},
         {"max_section_match_error", rep.max_section_match_error},
         {"pass", pass}};
  cli::write_json_file(outdir / "eigs.json", j);
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green functions and spectral scans of one-dimensional "
               "discrete Dirac operators"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int threads_override = -1;
  std::vector<std::string> sets;

  for (const char* name : {"green", "scan", "density", "verify", "eigs"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_override, "output directory");
    sub->add_option("--threads", threads_override, "worker threads (0 = auto)");
    sub->add_option("--set", sets, "override config values, key.path=value");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  json cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw cli::ConfigError("cannot read config file " + config_path);
    cfg = json::parse(in);
    for (const std::string& s : sets) cli::apply_override(cfg, s);
    if (!out_override.empty()) cfg["output"]["dir"] = out_override;
    if (threads_override >= 0) cfg["threads"] = threads_override;
  } catch (const json::parse_error& e) {
    cli::log(cli::LogLevel::Error, std::string("config parse error: ") + e.what());
    return 1;
  } catch (const cli::ConfigError& e) {
    cli::log(cli::LogLevel::Error, e.what());
    return 1;
  }

  try {
    const std::string hash = cli::config_hash(cfg);
    const fs::path outdir =
        cfg.value("output", json::object()).value("dir", std::string("."));
    std::error_code ec;
    fs::create_directories(outdir, ec);
    {
      // Fail fast on an unwritable output directory.
      const fs::path probe = outdir / ".dirac_green_probe";
      std::ofstream p(probe);
      if (!p) {
        throw cli::ConfigError("output directory not writable: " +
                               outdir.string());
      }
      p.close();
      fs::remove(probe, ec);
    }
    const int threads = cfg.value("threads", 0);

    if (command == "green") return cmd_green(cfg, outdir, hash);
    if (command == "scan") return cmd_scan(cfg, outdir, hash, threads);
    if (command == "density") return cmd_density(cfg, outdir, hash, threads);
    if (command == "verify") return cmd_verify(cfg, outdir, hash, threads);
    if (command == "eigs") return cmd_eigs(cfg, outdir, hash);
    return 1;
  } catch (const cli::ConfigError& e) {
    cli::log(cli::LogLevel::Error, e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    cli::log(cli::LogLevel::Error, e.what());
    return 1;
  } catch (const std::exception& e) {
    cli::log(cli::LogLevel::Error, e.what());
    return 2;
  }
}
