// acs_lj: command-line front end.
//
//   acs_lj check <source> --point v1,v2,... [--json] [--tol-alg X] [--tol-identity X]
//   acs_lj verify-derivation <source> --point ... [--json]
//   acs_lj scan <source> --grid a:b:n,... --out <csv>
//   acs_lj gallery list | show <name>
//   acs_lj selftest --dims 2,4 --samples N --degree D --seed S [--json] [--out file]
//
// <source> is a structure file or gallery:<name>.
// Exit codes: 0 consistent, 2 invalid-acs, 3 ledger-anomaly, 4 selftest
// invariant failure, 1 operational error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acs/harness.hpp"
#include "acs/selftest.hpp"

namespace {

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  for (double d : acs::parse_point(text)) {
    if (d < 2 || d != static_cast<double>(static_cast<std::size_t>(d)) || static_cast<std::size_t>(d) % 2 != 0) {
      throw std::invalid_argument("dimensions must be even positive integers, got '" + text + "'");
    }
    dims.push_back(static_cast<std::size_t>(d));
  }
  return dims;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost complex structure obstruction harness"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string source, point_text, grid_text, out_path, gallery_name;
  bool json = false;
  acs::Tolerances tol;

  auto add_point_opts = [&](CLI::App* sub) {
    sub->add_option("source", source, "structure file or gallery:<name>")->required();
    sub->add_option("--point", point_text, "comma-separated coordinates")->required();
    sub->add_flag("--json", json, "JSON output");
    sub->add_option("--tol-alg", tol.alg, "tolerance for J^2 = -1")->check(CLI::PositiveNumber);
    sub->add_option("--tol-identity", tol.identity, "relative tolerance for the ledger total")
        ->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "full report at one point");
  add_point_opts(check);
  auto* verify = app.add_subcommand("verify-derivation", "term-by-term ledger at one point");
  add_point_opts(verify);

  auto* scan = app.add_subcommand("scan", "evaluate over a grid, write CSV");
  scan->add_option("source", source, "structure file or gallery:<name>")->required();
  scan->add_option("--grid", grid_text, "min:max:count per axis, comma-separated")->required();
  scan->add_option("--out", out_path, "CSV output path")->required();

  auto* gal = app.add_subcommand("gallery", "built-in structures");
  gal->require_subcommand(1);
  auto* gal_list = gal->add_subcommand("list", "list names");
  auto* gal_show = gal->add_subcommand("show", "print as a structure file");
  gal_show->add_option("name", gallery_name)->required();

  acs::SelftestOptions st;
  std::string dims_text = "2,4,6";
  auto* self = app.add_subcommand("selftest", "randomized invariant suite");
  self->add_option("--dims", dims_text, "even dimensions, comma-separated");
  self->add_option("--samples", st.samples, "samples per dimension");
  self->add_option("--degree", st.degree, "polynomial degree of the random fields")->check(CLI::NonNegativeNumber);
  self->add_option("--seed", st.seed, "RNG seed");
  self->add_flag("--json", json, "JSON output");
  self->add_option("--out", out_path, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return acs::exit_code::operational_error;
  }

  const acs::Format format = json ? acs::Format::json : acs::Format::text;
  try {
    if (check->parsed() || verify->parsed()) {
      const auto s = acs::resolve_structure(source);
      const auto point = acs::parse_point(point_text);
      const auto r = check->parsed() ? acs::run_check(s, point, tol, format)
                                     : acs::run_verify_derivation(s, point, tol, format);
      std::cout << r.output;
      return r.exit_code;
    }
    if (scan->parsed()) {
      const auto s = acs::resolve_structure(source);
      const auto summary = acs::run_scan(s, acs::parse_grid(grid_text), out_path);
      std::cout << acs::summary_text(summary);
      return 0;
    }
    if (gal_list->parsed()) {
      for (const auto& n : acs::gallery_names()) std::cout << n << '\n';
      return 0;
    }
    if (gal_show->parsed()) {
      std::cout << acs::write_structure(acs::gallery(gallery_name));
      return 0;
    }
    if (self->parsed()) {
      st.dims = parse_dims(dims_text);
      const auto rep = acs::run_selftest(st);
      const std::string text = json ? acs::to_json(rep).dump(2) + '\n' : acs::to_text(rep);
      std::cout << text;
      if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
      }
      return rep.all_hard_passed() && rep.all_residuals_finite() ? 0 : acs::exit_code::selftest_failure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return acs::exit_code::operational_error;
  }
  return acs::exit_code::operational_error;
}
