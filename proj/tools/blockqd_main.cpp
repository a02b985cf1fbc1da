// blockqd: eigenvalue pre-processing for banded block Hessenberg matrices
// through the generalized block qd sweep, plus the verification suites for
// the quasi-determinant / moment / lattice machinery behind it.

#include <algorithm>
#include <chrono>
#include <complex>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blockqd/eig.hpp"
#include "blockqd/errors.hpp"
#include "blockqd/lattice.hpp"
#include "blockqd/moments.hpp"
#include "blockqd/problem_io.hpp"
#include "blockqd/qdalgo.hpp"
#include "blockqd/verify.hpp"

#include <json.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitBreakdown = 3;
constexpr int kExitInput = 4;

struct RunOptions {
  std::string input;
  std::string trace_out;
  std::string eigs_out;
  double tol = 1e-12;
  std::size_t max_sweeps = 1000;
  double rcond_floor = 1e-12;
};

std::vector<blockqd::SpectrumRow> certified_rows(
    const blockqd::Spectrum& spectrum, const blockqd::Matrix& j0) {
  std::vector<blockqd::SpectrumRow> rows;
  rows.reserve(spectrum.values.size());
  for (const auto& v : spectrum.values)
    rows.push_back({v.lambda.real(), v.lambda.imag(),
                    blockqd::rank_deficiency_proxy(j0, v.lambda)});
  return rows;
}

int cmd_run(const RunOptions& opt) {
  const blockqd::ProblemFile pf = blockqd::load_problem(opt.input);
  blockqd::HungryState state = blockqd::to_state(pf);
  const blockqd::Matrix j0 = blockqd::assemble(state.toda).flatten();

  blockqd::RunResult result =
      blockqd::run(std::move(state), opt.tol, opt.max_sweeps, opt.rcond_floor);

  if (!opt.trace_out.empty())
    blockqd::write_text_atomic(
        opt.trace_out, blockqd::trace_csv(result.trace, pf.theta, pf.n));

  if (result.status == blockqd::ConvergenceStatus::Breakdown) {
    const auto& b = *result.breakdown;
    std::fprintf(stderr,
                 "breakdown: pivot q_%zu in layer %zu singular (rcond %.3e) "
                 "after %zu sweeps; perturb the input and retry\n",
                 b.pivot_index, b.layer, b.rcond, result.state.sweeps);
    return kExitBreakdown;
  }

  // on NotConverged this reports the spectrum of the q blocks as they stand
  const blockqd::Spectrum spectrum =
      blockqd::extract_spectrum(result.state, opt.tol);
  if (!opt.eigs_out.empty())
    blockqd::write_text_atomic(
        opt.eigs_out, blockqd::spectrum_json(certified_rows(spectrum, j0)));

  if (result.status == blockqd::ConvergenceStatus::Converged) {
    std::printf("converged after %zu sweeps (max ||e||_F = %.3e < %.3e)\n",
                result.state.sweeps, result.final_max_e, opt.tol);
    return kExitOk;
  }
  std::fprintf(stderr,
               "not converged after %zu sweeps (max ||e||_F = %.3e, tol "
               "%.3e); raise --max-sweeps\n",
               result.state.sweeps, result.final_max_e, opt.tol);
  return kExitNotConverged;
}

int cmd_build_j(const std::string& input, const std::string& out) {
  const blockqd::ProblemFile pf = blockqd::load_problem(input);
  const blockqd::Matrix j =
      blockqd::assemble(blockqd::to_state(pf).toda).flatten();
  const std::string csv = blockqd::matrix_csv(j);
  if (out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    blockqd::write_text_atomic(out, csv);
    std::printf("wrote %zux%zu matrix to %s\n", j.rows(), j.cols(),
                out.c_str());
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::size_t trials,
               std::uint64_t seed) {
  std::vector<blockqd::IdentityCheck> checks;
  auto append = [&checks](std::vector<blockqd::IdentityCheck> more) {
    checks.insert(checks.end(), more.begin(), more.end());
  };
  if (suite == "quasidet" || suite == "all")
    append(blockqd::verify_quasidet(trials, seed));
  if (suite == "moments" || suite == "all")
    append(blockqd::verify_moments(trials, seed));
  if (suite == "lattice" || suite == "all")
    append(blockqd::verify_lattice(trials, seed));

  bool all_pass = true;
  for (const auto& c : checks) {
    std::printf("%-28s max_residual %.3e  tol %.1e  trials %zu  %s\n",
                c.name.c_str(), c.max_residual, c.tolerance, c.trials,
                c.pass() ? "PASS" : "FAIL");
    all_pass = all_pass && c.pass();
  }
  if (!all_pass) {
    std::fprintf(stderr, "verify: tolerance violated (seed %llu)\n",
                 static_cast<unsigned long long>(seed));
    return 1;
  }
  return kExitOk;
}

int cmd_moments_demo(const std::string& input, std::size_t n,
                     std::size_t alpha_max, const std::string& out,
                     double rcond_floor) {
  const blockqd::MeasureFile mf = blockqd::load_measure(input);
  const blockqd::MomentTable table(mf.measure, mf.theta);

  nlohmann::json doc;
  doc["p"] = table.block_order();
  doc["theta"] = table.theta();
  doc["n"] = n;

  auto block_json = [](const blockqd::Matrix& b) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < b.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
      rows.push_back(row);
    }
    return rows;
  };

  std::size_t fail_n = 0;
  long fail_alpha = 0;
  try {
    // H table: degrees 0..n-1 across levels 0..alpha_max
    nlohmann::json htab = nlohmann::json::array();
    for (std::size_t d = 0; d < n; ++d) {
      nlohmann::json per_alpha = nlohmann::json::array();
      for (std::size_t a = 0; a <= alpha_max; ++a) {
        fail_n = d;
        fail_alpha = static_cast<long>(a);
        per_alpha.push_back(block_json(blockqd::normalization_h(
            d, static_cast<long>(a), table, rcond_floor)));
      }
      htab.push_back(per_alpha);
    }
    doc["h"] = htab;

    // lattice coefficient tables at each level
    nlohmann::json qtab = nlohmann::json::array(),
                   etab = nlohmann::json::array(),
                   wtab = nlohmann::json::array(),
                   etab2 = nlohmann::json::array();
    for (std::size_t a = 0; a <= alpha_max; ++a) {
      nlohmann::json qrow = nlohmann::json::array(),
                     erow = nlohmann::json::array(),
                     wrow = nlohmann::json::array(),
                     epsrow = nlohmann::json::array();
      for (std::size_t m = 1; m <= n; ++m) {
        fail_n = m;
        fail_alpha = static_cast<long>(a);
        const long al = static_cast<long>(a);
        qrow.push_back(
            block_json(blockqd::q_coefficient(m, al, table, rcond_floor)));
        wrow.push_back(
            block_json(blockqd::omega_coefficient(m, al, table, rcond_floor)));
        if (m < n) {
          erow.push_back(
              block_json(blockqd::e_coefficient(m, al, table, rcond_floor)));
          epsrow.push_back(block_json(
              blockqd::epsilon_coefficient(m, al, table, rcond_floor)));
        }
      }
      qtab.push_back(qrow);
      etab.push_back(erow);
      wtab.push_back(wrow);
      etab2.push_back(epsrow);
    }
    doc["q"] = qtab;
    doc["e"] = etab;
    doc["omega"] = wtab;
    doc["epsilon"] = etab2;

    // assembled J at level 0 and its spectrum
    fail_n = n;
    fail_alpha = 0;
    const blockqd::TodaIIState s =
        blockqd::toda2_from_measure(table, n, 0, rcond_floor);
    const blockqd::Matrix j = blockqd::assemble(s).flatten();
    nlohmann::json jrows = nlohmann::json::array();
    for (std::size_t r = 0; r < j.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < j.cols(); ++c) row.push_back(j(r, c));
      jrows.push_back(row);
    }
    doc["j"] = jrows;

    std::vector<std::complex<double>> eigs = blockqd::dense_eigenvalues(j);
    std::sort(eigs.begin(), eigs.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
                return a.imag() < b.imag();
              });
    nlohmann::json spec = nlohmann::json::array();
    for (const auto& v : eigs)
      spec.push_back(nlohmann::json::array({v.real(), v.imag()}));
    doc["spectrum"] = spec;

    const std::size_t top = n >= 1 ? n - 1 : 0;
    const auto pfam =
        blockqd::build_family(blockqd::FamilyKind::P, top, 0, table,
                              rcond_floor);
    const auto qfam =
        blockqd::build_family(blockqd::FamilyKind::Q, top, 0, table,
                              rcond_floor);
    const double residual =
        blockqd::biorthogonality_residual(pfam, qfam, table, rcond_floor);
    doc["biorthogonality_residual"] = residual;
    std::printf("biorthogonality residual (degrees <= %zu): %.3e\n", top,
                residual);
  } catch (const blockqd::SingularMinorError& err) {
    std::fprintf(stderr,
                 "moment condition violated near (n=%zu, alpha=%ld): %s\n",
                 fail_n, fail_alpha, err.what());
    return kExitInput;
  }

  if (!out.empty()) {
    blockqd::write_text_atomic(out, doc.dump(2) + "\n");
    std::printf("wrote tables to %s\n", out.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "generalized block qd sweep for banded block Hessenberg eigenvalue "
      "pre-processing"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand(
      "run", "iterate a problem to block upper triangular form");
  run->add_option("input", run_opt.input, "problem JSON file")->required();
  run->add_option("--tol", run_opt.tol,
                  "convergence threshold on max ||e||_F");
  run->add_option("--max-sweeps", run_opt.max_sweeps, "sweep budget");
  run->add_option("--rcond-floor", run_opt.rcond_floor,
                  "pivot conditioning floor");
  run->add_option("--trace-out", run_opt.trace_out, "per-sweep norm CSV");
  run->add_option("--eigs-out", run_opt.eigs_out, "eigenvalue report JSON");

  std::string bj_input, bj_out;
  CLI::App* bj = app.add_subcommand(
      "build-j", "assemble the dense matrix of a problem as CSV");
  bj->add_option("input", bj_input, "problem JSON file")->required();
  bj->add_option("--out", bj_out, "output CSV path (stdout if omitted)");

  std::string vf_suite = "all";
  std::size_t vf_trials = 200;
  std::uint64_t vf_seed = 0;
  CLI::App* vf =
      app.add_subcommand("verify", "randomized identity suites");
  vf->add_option("--suite", vf_suite, "quasidet|moments|lattice|all")
      ->check(CLI::IsMember({"quasidet", "moments", "lattice", "all"}));
  vf->add_option("--trials", vf_trials, "trial count per suite");
  vf->add_option("--seed", vf_seed, "RNG seed");

  std::string md_input, md_out;
  std::size_t md_n = 2, md_alpha_max = 2;
  double md_rcond = 1e-12;
  CLI::App* md = app.add_subcommand(
      "moments-demo",
      "derive H / coefficient tables and the assembled matrix from a "
      "discrete measure");
  md->add_option("measure", md_input, "measure JSON file")->required();
  md->add_option("--n", md_n, "blocks per side of the assembled matrix");
  md->add_option("--alpha-max", md_alpha_max, "highest level tabulated");
  md->add_option("--out", md_out, "output JSON path");
  md->add_option("--rcond-floor", md_rcond, "conditioning floor");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (bj->parsed()) return cmd_build_j(bj_input, bj_out);
    if (vf->parsed()) return cmd_verify(vf_suite, vf_trials, vf_seed);
    if (md->parsed())
      return cmd_moments_demo(md_input, md_n, md_alpha_max, md_out, md_rcond);
  } catch (const blockqd::InputError& err) {
    const char* kind = err.kind() == blockqd::InputError::Kind::Parse
                           ? "parse error"
                           : err.kind() == blockqd::InputError::Kind::Dimension
                                 ? "dimension mismatch"
                                 : "i/o failure";
    std::fprintf(stderr, "%s: %s\n", kind, err.what());
    return kExitInput;
  } catch (const blockqd::BreakdownError& err) {
    std::fprintf(stderr, "breakdown: %s\n", err.what());
    return kExitBreakdown;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return kExitOk;
}
