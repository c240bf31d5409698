// jtool: classify, decompose and verify operators in a J-space.

#include "jform/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int finish(const jform::cli::CommandResult& res, const std::string& output) {
  try {
    jform::cli::write_output(output, jform::cli::render(res));
  } catch (const jform::IoError& e) {
    std::cerr << "jtool: " << e.what() << "\n";
    return jform::cli::kExitIo;
  }
  if (!res.diagnostic.empty()) std::cerr << "jtool: " << res.diagnostic << "\n";
  return res.exit_code;
}

template <typename Args, typename Cmd>
int dispatch(const Args& args, const std::string& output, Cmd cmd) {
  std::string text;
  try {
    text = jform::cli::read_input(args.input);
  } catch (const jform::IoError& e) {
    std::cerr << "jtool: " << e.what() << "\n";
    return jform::cli::kExitIo;
  }
  return finish(cmd(text, args), output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operators in a space with a conjugation: classification, decompositions, audits"};
  app.require_subcommand(1);
  std::string output = "-";

  jform::cli::ClassifyArgs classify;
  auto* c = app.add_subcommand("classify", "Structural flags and deviations of an operator");
  c->add_option("input", classify.input, "Matrix file ('-' for stdin)")->required();
  c->add_option("--tol", classify.tol, "Classification tolerance")->check(CLI::PositiveNumber);
  c->add_option("-o,--output", output, "Report path ('-' for stdout)");

  jform::cli::DecomposeArgs decompose;
  auto* d = app.add_subcommand("decompose", "J-polar and exponential decompositions");
  d->add_option("--kind", decompose.kind, "Decomposition kind")
      ->check(CLI::IsMember(jform::cli::decompose_kinds()))
      ->required();
  d->add_option("input", decompose.input, "Matrix file ('-' for stdin)")->required();
  d->add_option("--phi", decompose.phi, "Branch ray angle in radians, or 'auto'");
  d->add_option("--tol-input", decompose.tol.input, "Input class tolerance")->check(CLI::PositiveNumber);
  d->add_option("--tol-locus", decompose.tol.locus, "Joint spectrum locus tolerance")->check(CLI::PositiveNumber);
  d->add_option("--tol-output", decompose.tol.output, "Residual tolerance")->check(CLI::PositiveNumber);
  d->add_option("-o,--output", output, "Report path ('-' for stdout)");

  jform::cli::VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Property audits with a fixed seed");
  v->add_option("input", verify.input, "Matrix file ('-' for stdin)")->required();
  v->add_option("--suite", verify.suite, "Audit suite")
      ->check(CLI::IsMember({"all", "eigen", "nullcone", "norm", "oracle"}));
  v->add_option("--seed", verify.seed, "Random seed");
  v->add_option("--samples", verify.samples, "Random samples per check")->check(CLI::PositiveNumber);
  v->add_option("-o,--output", output, "Report path ('-' for stdout)");

  jform::cli::MatrepArgs matrep;
  auto* m = app.add_subcommand("matrep", "Window consistency of a banded semi-infinite matrix");
  m->add_option("input", matrep.input, "Banded matrix file ('-' for stdin)")->required();
  m->add_option("--windows", matrep.windows, "Window sizes");
  m->add_option("-o,--output", output, "Report path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : jform::cli::kExitViolation;
  }

  if (*c) return dispatch(classify, output, jform::cli::cmd_classify);
  if (*d) return dispatch(decompose, output, jform::cli::cmd_decompose);
  if (*v) return dispatch(verify, output, jform::cli::cmd_verify);
  return dispatch(matrep, output, jform::cli::cmd_matrep);
}
