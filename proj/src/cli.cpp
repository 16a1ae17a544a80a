#include "trisep/cli.hpp"

#include "trisep/decompose.hpp"
#include "trisep/errors.hpp"
#include "trisep/io.hpp"
#include "trisep/kernel_search.hpp"
#include "trisep/ppt_support.hpp"
#include "trisep/statezoo.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <ostream>

namespace trisep {

namespace {

constexpr double kDefaultVerifyTol = 1e-8;

// TRISEP_TOL replaces the default verification/reconstruction tolerance and
// TRISEP_PPT_TOL the default PPT tolerance; explicit --tol always wins.
double env_tolerance(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0)) {
    throw ArgumentError(std::string(name) + " must be a positive number, got '" + raw + "'");
  }
  return v;
}

StateFile load_state(const std::string& path) { return parse_state(read_text_file(path), path); }

void write_or_print(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (path) {
    write_text_file(*path, text);
  } else {
    out << text;
  }
}

void print_ppt(const PptReport& report, std::ostream& out) {
  const auto& subsets = nontrivial_subsets();
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    out << "t_" << subsets[i].label() << "\tmin_eig " << format_number(report.min_eigs[i]) << "\n";
  }
  out << "rho\tmin_eig " << format_number(report.plain_min_eig) << "\n";
  out << "tol " << format_number(report.tol) << "\n";
  out << (report.ppt ? "PPT" : "NPT") << "\n";
}

int cmd_gen(const std::string& kind, const std::string& dims, int rank, std::uint64_t seed,
            const std::optional<std::string>& output, std::ostream& out) {
  GenSpec spec;
  spec.kind = parse_gen_kind(kind);
  spec.dims = parse_dims(dims);
  spec.rank = rank;
  spec.seed = seed;
  StateFile file{generate(spec), {}};
  file.meta.seed = seed;
  file.meta.kind = gen_kind_name(spec.kind);
  file.meta.normalized = file.rho.normalized;
  write_or_print(output, state_to_json(file), out);
  return kExitOk;
}

int cmd_ppt(const std::string& path, std::optional<double> tol, std::ostream& out) {
  const StateFile file = load_state(path);
  const PptReport report = ppt_check(file.rho, tol ? *tol : env_tolerance("TRISEP_PPT_TOL", kDefaultPptTol));
  print_ppt(report, out);
  return report.ppt ? kExitOk : kExitNegative;
}

int cmd_canon(const std::string& path, const std::optional<std::string>& output, std::ostream& out) {
  const StateFile file = load_state(path);
  CanonicalOptions opts;
  opts.ppt_tol = env_tolerance("TRISEP_PPT_TOL", kDefaultPptTol);
  const CanonicalExtraction ex = extract_canonical(file.rho, default_pivot(), opts);
  write_or_print(output, canonical_to_json(ex), out);
  if (output) {
    out << "canonical form N=" << ex.form.n() << " max block residual " << format_number(ex.residuals.max_block())
        << "\n";
  }
  return kExitOk;
}

int cmd_decompose(const std::string& path, const std::optional<std::string>& output, std::uint64_t seed,
                  std::ostream& out) {
  const StateFile file = load_state(path);
  CertifyOptions opts;
  opts.seed = seed;
  opts.ppt_tol = env_tolerance("TRISEP_PPT_TOL", kDefaultPptTol);
  opts.reconstruction_tol = env_tolerance("TRISEP_TOL", kDefaultVerifyTol);
  const SeparabilityCertificate cert = certify_rank_n_separability(file.rho, opts);
  write_or_print(output, certificate_to_json(certificate_from(cert)), out);
  if (output) {
    out << "verified: " << cert.decomposition.terms.size() << " product terms, reconstruction residual "
        << format_number(cert.reconstruction_residual) << "\n";
    for (const std::string& line : cert.pruned) out << "pruned " << line << "\n";
  }
  return cert.verified() ? kExitOk : kExitRefused;
}

int cmd_kernel_vector(const std::string& path, const std::string& strategy, std::uint64_t seed,
                      std::optional<double> tol, std::ostream& out) {
  const StateFile file = load_state(path);
  KernelSearchOptions opts;
  opts.strategy = parse_strategy(strategy);
  opts.seed = seed;
  opts.tol = tol ? *tol : env_tolerance("TRISEP_TOL", kDefaultVerifyTol);
  out << kernel_vector_to_json(find_product_kernel_vector(file.rho, opts));
  return kExitOk;
}

int cmd_verify(const std::string& state_path, const std::string& cert_path, std::optional<double> tol,
               std::ostream& out) {
  const StateFile file = load_state(state_path);
  const CertificateFile cert = parse_certificate(read_text_file(cert_path), cert_path);
  const double t = tol ? *tol : env_tolerance("TRISEP_TOL", kDefaultVerifyTol);
  if (!(cert.decomposition.dims == file.rho.dims)) {
    out << "dims mismatch: state " << to_string(file.rho.dims) << ", certificate "
        << to_string(cert.decomposition.dims) << "\nFAILED\n";
    return kExitNegative;
  }
  for (std::size_t i = 0; i < cert.decomposition.terms.size(); ++i) {
    const double w = cert.decomposition.terms[i].weight;
    if (!(w > 0.0) || !std::isfinite(w)) {
      out << "term " << i << " has non-positive weight " << format_number(w) << "\nFAILED\n";
      return kExitNegative;
    }
  }
  if (cert.decomposition.terms.empty()) {
    out << "certificate has no terms\nFAILED\n";
    return kExitNegative;
  }
  const VerificationReport report = verify_decomposition(file.rho, cert.decomposition, t);
  const DensityOperator rebuilt(file.rho.dims, cert.decomposition.reconstruct(), false);
  const PptReport closure = ppt_check(rebuilt, env_tolerance("TRISEP_PPT_TOL", kDefaultPptTol));
  out << "terms " << cert.decomposition.terms.size() << "\n";
  out << "residual " << format_number(report.residual) << "\n";
  out << "relative " << format_number(report.relative) << "\n";
  out << "marginals " << format_number(report.marginal_residuals[0]) << " "
      << format_number(report.marginal_residuals[1]) << " " << format_number(report.marginal_residuals[2]) << "\n";
  out << "reconstruction_min_pt_eig " << format_number(closure.worst()) << "\n";
  out << "tol " << format_number(t) << "\n";
  const bool ok = report.passed && closure.ppt;
  out << (ok ? "VERIFIED" : "FAILED") << "\n";
  return ok ? kExitOk : kExitNegative;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separability certificates for PPT states on C^2 x C^3 x C^N", "trisep"};
  app.require_subcommand(1);

  std::string kind, dims_text, path, cert_path, strategy = "auto";
  int rank = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  std::optional<double> tol;

  CLI::App* gen = app.add_subcommand("gen", "generate a seeded test state");
  gen->add_option("kind", kind, "canonical | separable | npt | product_projector_sum")->required();
  gen->add_option("--dims", dims_text, "local dimensions, e.g. 2x3x4")->required();
  gen->add_option("--rank", rank, "number of terms (separable kinds); defaults to N");
  gen->add_option("--seed", seed, "64-bit seed");
  gen->add_option("-o,--output", output, "output file (stdout when omitted)");

  CLI::App* ppt = app.add_subcommand("ppt", "check all six partial transposes");
  ppt->add_option("state", path)->required();
  ppt->add_option("--tol", tol, "eigenvalue tolerance");

  CLI::App* canon = app.add_subcommand("canon", "extract the canonical form at the default pivot");
  canon->add_option("state", path)->required();
  canon->add_option("-o,--output", output, "output file (stdout when omitted)");

  CLI::App* decompose = app.add_subcommand("decompose", "certify separability of a rank-N PPT state");
  decompose->add_option("state", path)->required();
  decompose->add_option("-o,--output", output, "certificate file (stdout when omitted)");
  decompose->add_option("--seed", seed, "seed for the pivot search and joint diagonalization");

  CLI::App* kernel = app.add_subcommand("kernel-vector", "find a product vector in the kernel");
  kernel->add_option("state", path)->required();
  kernel->add_option("--strategy", strategy,
                     "auto | local-support | underdetermined | alice-sweep | charlie-sweep | random-bob | generic");
  kernel->add_option("--seed", seed, "64-bit seed");
  kernel->add_option("--tol", tol, "residual tolerance relative to ||rho||_F");

  CLI::App* verify = app.add_subcommand("verify", "recompute a certificate's residuals from the files alone");
  verify->add_option("state", path)->required();
  verify->add_option("certificate", cert_path)->required();
  verify->add_option("--tol", tol, "reconstruction tolerance relative to ||rho||_F");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) return cmd_gen(kind, dims_text, rank, seed, output, out);
    if (*ppt) return cmd_ppt(path, tol, out);
    if (*canon) return cmd_canon(path, output, out);
    if (*decompose) return cmd_decompose(path, output, seed, out);
    if (*kernel) return cmd_kernel_vector(path, strategy, seed, tol, out);
    if (*verify) return cmd_verify(path, cert_path, tol, out);
  } catch (const FormatError& e) {
    err << e.what() << "\n";
    return kExitFormat;
  } catch (const Error& e) {
    err << "refused: " << e.name() << ": " << e.what() << "\n";
    return kExitRefused;
  }
  return kExitRefused;
}

}  // namespace trisep
