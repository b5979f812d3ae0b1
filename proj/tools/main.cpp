// pjm: spectral data, heights and inversion for periodic Jacobi matrices.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace pjm::cli;
  CLI::App app{"Height coordinates of N-periodic Jacobi matrices"};
  app.require_subcommand(1);
  Options opts;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("-i,--input", opts.input, "JSON input file, - for stdin")->capture_default_str();
  };

  auto* forward = app.add_subcommand("forward", "band edges, critical points, Dirichlet data and heights");
  add_input(forward);
  forward->add_option("--jacobian-csv", opts.jacobian_csv, "write the height Jacobian as CSV");
  forward->add_flag("--fd-jacobian", opts.fd_jacobian, "central differences instead of the analytic Jacobian");

  auto* inverse = app.add_subcommand("inverse", "coefficients from a height vector");
  add_input(inverse);
  inverse->add_option("--n", opts.n, "period (default: inferred from the input)");
  inverse->add_option("--tol", opts.tol, "residual tolerance")->capture_default_str();
  inverse->add_flag("--fd-jacobian", opts.fd_jacobian, "Newton with a finite-difference Jacobian");

  auto* check = app.add_subcommand("check", "invariant report");
  add_input(check);
  check->add_flag("--inject-edge-error", opts.inject_edge_error, "perturb one band edge (testing)");

  auto* random = app.add_subcommand("random", "random coefficient point");
  random->add_option("--n", opts.n, "period")->required();
  random->add_option("--scale", opts.scale, "entries drawn from [-scale, scale]")->capture_default_str();
  random->add_option("--seed", opts.seed, "generator seed")->capture_default_str();

  auto* quasi = app.add_subcommand("quasimomentum", "CSV of lambda, Re k, Im k");
  add_input(quasi);
  quasi->add_option("--grid", opts.grid, "points per band and per open gap")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return domain_error;
  }

  return guarded(
      [&] {
        if (*forward) return cmd_forward(opts, std::cout);
        if (*inverse) return cmd_inverse(opts, std::cout);
        if (*check) return cmd_check(opts, std::cout);
        if (*random) return cmd_random(opts, std::cout);
        return cmd_quasimomentum(opts, std::cout);
      },
      std::cerr);
}
