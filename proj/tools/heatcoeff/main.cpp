// heatcoeff: command-line front end.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure. Errors are written to
// stderr as {"error": kind, "message": text, "exit_code": n}.

#include "commands.hpp"

#include "heatcoeff/errors.hpp"
#include "heatcoeff/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using heatcoeff::cli::json;

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
  return code;
}

void emit(const heatcoeff::cli::CommandOutput& out, const std::string& format, const std::string& path) {
  const std::string text = format == "csv" ? out.csv : out.doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw heatcoeff::ValidationError("cannot write \"" + path + "\"");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  namespace hc = heatcoeff;
  CLI::App app{"Heat-trace coefficients of Laplace type operators"};
  app.require_subcommand(1);

  std::string output, format = "json";
  hc::cli::Overrides ov;
  int threads = 0;
  unsigned long long seed = 1;
  app.add_option("--output", output, "Write the result to this file instead of stdout");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  auto* cutoff_opt = app.add_option("--cutoff", "Oracle cutoff M (modes -M..M)");
  auto* cluster_opt = app.add_option("--cluster-tol", "Relative eigenvalue clustering tolerance");
  auto* gap_opt = app.add_option("--gap-tol", "Relative gap below which arguments count as confluent");
  app.add_option("--threads", threads, "Worker threads (default: HEATCOEFF_THREADS, then all cores)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed of the self-test generator");

  double alpha = 1.0;
  int k = 0;
  std::vector<double> rs;
  auto* ifun = app.add_subcommand("ifun", "Universal function I_{alpha,k}(r_0, ..., r_k)");
  ifun->add_option("--alpha", alpha, "Exponent alpha")->required();
  ifun->add_option("--k", k, "Simplex dimension k")->required();
  ifun->add_option("--rs", rs, "Comma-separated arguments")->required()->delimiter(',');

  std::string config;
  auto add_config_command = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto* r2 = add_config_command("r2", "Second heat coefficient density");
  auto* verify = add_config_command("a2-verify", "Spectral oracle fit against the closed form");
  auto* nct2 = add_config_command("nct2", "Density of the conformally perturbed noncommutative two-torus");
  auto* nct4 = add_config_command("nct4", "Density of the conformally perturbed noncommutative four-torus");

  double r0 = 1.0, y1 = 1.0, y2 = 1.0;
  auto* modular = app.add_subcommand("modular", "Modular curvature functions");
  modular->add_option("--r0", r0, "Base eigenvalue");
  modular->add_option("--y1", y1, "First modular ratio")->required();
  auto* y2_opt = modular->add_option("--y2", y2, "Second modular ratio");

  auto* selftest = app.add_subcommand("selftest", "Invariant battery");

  for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("validation", e.what(), 2);
  }

  try {
    if (*cutoff_opt) ov.cutoff = cutoff_opt->as<int>();
    if (*cluster_opt) ov.cluster_tol = cluster_opt->as<double>();
    if (*gap_opt) ov.gap_tol = gap_opt->as<double>();
    if (*seed_opt) ov.seed = seed;
    if (threads < 0) throw hc::ValidationError("--threads must be positive");
    hc::set_default_threads(hc::resolve_threads(threads));

    hc::cli::CommandOutput out;
    int code = 0;
    if (*ifun) {
      out = hc::cli::cmd_ifun(alpha, k, rs, ov);
    } else if (*modular) {
      out = hc::cli::cmd_modular(r0, y1, *y2_opt ? std::optional<double>(y2) : std::nullopt);
    } else if (*selftest) {
      out = hc::cli::cmd_selftest(seed);
      if (!out.doc.at("passed").get<bool>()) code = 3;
    } else {
      const json cfg = hc::cli::load_config(config);
      if (*r2) out = hc::cli::cmd_r2(cfg, ov);
      else if (*verify) out = hc::cli::cmd_a2_verify(cfg, ov);
      else if (*nct2) out = hc::cli::cmd_nct2(cfg, ov);
      else if (*nct4) out = hc::cli::cmd_nct4(cfg, ov);
    }
    emit(out, format, output);
    if (code != 0) return report_error("selftest", "one or more self-test checks failed", code);
    return 0;
  } catch (const hc::Error& e) {
    return report_error(e.kind(), e.what(), e.is_numeric() ? 3 : 2);
  } catch (const json::exception& e) {
    return report_error("validation", std::string("config: ") + e.what(), 2);
  } catch (const std::bad_alloc&) {
    return report_error("size", "out of memory", 3);
  } catch (const std::exception& e) {
    return report_error("numerical", e.what(), 3);
  }
}
