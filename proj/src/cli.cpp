#include "sdc/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdc/diagonalize.hpp"
#include "sdc/instance_factory.hpp"
#include "sdc/io.hpp"
#include "sdc/report.hpp"
#include "sdc/verifier.hpp"

namespace sdc::io {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void add_tolerance_flags(CLI::App& cmd, Tolerances<double>& tol) {
  cmd.add_option("--tol-sym", tol.sym, "symmetry tolerance")->capture_default_str();
  cmd.add_option("--tol-eig", tol.eig_cluster, "eigenvalue clustering tolerance")->capture_default_str();
  cmd.add_option("--tol-rank", tol.rank, "relative rank threshold")->capture_default_str();
  cmd.add_option("--tol-residual", tol.residual, "accepted off-diagonal residual")->capture_default_str();
}

// Every unreadable or malformed file and every dimension clash gets its own line.
std::optional<MatrixCollection<double>> load_collection(const std::vector<std::string>& files,
                                                        const Tolerances<double>& tol, std::ostream& err) {
  std::vector<Matrix<double>> matrices;
  std::vector<std::string> names;
  bool ok = true;
  for (const auto& f : files) {
    try {
      matrices.push_back(parse_matrix_file(f, tol));
      names.push_back(f);
    } catch (const ParseError& e) {
      err << "error: " << e.what() << '\n';
      ok = false;
    }
  }
  for (std::size_t i = 1; i < matrices.size(); ++i) {
    if (matrices[i].rows() != matrices[0].rows()) {
      err << "error: " << names[i] << ": dimension " << matrices[i].rows() << " differs from " << names[0] << " ("
          << matrices[0].rows() << ")\n";
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return MatrixCollection<double>(std::move(matrices), tol);
}

struct Solved {
  Diagnosis<double> diagnosis;
  Timings timings;
};

std::optional<Solved> solve(const std::vector<std::string>& files, const Tolerances<double>& tol,
                            std::ostream& err) {
  auto start = Clock::now();
  auto c = load_collection(files, tol, err);
  if (!c) return std::nullopt;
  Timings timings{{"parse_ms", elapsed_ms(start)}};
  start = Clock::now();
  auto diagnosis = diagonalize(*c);
  timings["solve_ms"] = elapsed_ms(start);
  return Solved{std::move(diagnosis), std::move(timings)};
}

int status_code(const Diagnosis<double>& d) { return d.result.is_sdc() ? exit_sdc : exit_not_sdc; }

int cmd_check(const std::vector<std::string>& files, const Tolerances<double>& tol, std::ostream& out,
              std::ostream& err) {
  auto solved = solve(files, tol, err);
  if (!solved) return exit_error;
  out << check_report(solved->diagnosis).dump(2) << '\n';
  return status_code(solved->diagnosis);
}

int cmd_diagonalize(const std::vector<std::string>& files, const std::string& out_path,
                    const Tolerances<double>& tol, std::ostream& out, std::ostream& err) {
  auto solved = solve(files, tol, err);
  if (!solved) return exit_error;
  const std::string text = run_report(solved->diagnosis, tol, solved->timings).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(out_path);
    if (!(file << text)) {
      err << "error: " << out_path << ": cannot write report\n";
      return exit_error;
    }
  }
  return status_code(solved->diagnosis);
}

int cmd_verify(const std::vector<std::string>& files, const std::string& p_file, const Tolerances<double>& tol,
               std::ostream& out, std::ostream& err) {
  auto c = load_collection(files, tol, err);
  std::optional<Matrix<double>> p;
  try {
    p = parse_matrix_file(p_file, tol, false);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  }
  if (!c || !p) return exit_error;
  if (p->rows() != c->dimension()) {
    err << "error: " << p_file << ": dimension " << p->rows() << " differs from the collection (" << c->dimension()
        << ")\n";
    return exit_error;
  }
  const auto report = verify_congruence(*c, *p, tol);
  out << to_json(report).dump(2) << '\n';
  return report.passed ? exit_sdc : exit_not_sdc;
}

struct GenOptions {
  Index n = 3;
  std::size_t m = 2;
  std::uint64_t seed = 1;
  bool singular = false;
  std::string negative;
  std::string out_dir;
};

int cmd_gen(const GenOptions& g, const Tolerances<double>& tol, std::ostream& out, std::ostream& err) {
  std::vector<Matrix<double>> members;
  std::optional<Matrix<double>> truth;
  if (g.negative == "defective") {
    if (g.m != 2) {
      err << "error: --negative defective produces pairs; use --m 2\n";
      return exit_error;
    }
    members = gen_defective_pair<double>(g.n, g.seed, tol).matrices();
  } else if (g.negative == "noncommuting") {
    members = gen_symmetry_violation<double>(g.n, g.m, g.seed, tol).matrices();
  } else {
    GenSpec spec{.n = g.n, .m = g.m, .seed = g.seed};
    if (g.singular) spec.singular_ranks = random_rank_caps(g.n, g.m, g.seed);
    auto inst = gen_sdc<double>(spec, tol);
    members = inst.collection.matrices();
    truth = inst.ground_truth_P;
  }

  fs::create_directories(g.out_dir);
  Json files = Json::array();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const fs::path path = fs::path(g.out_dir) / ("C" + std::to_string(i + 1) + ".txt");
    write_matrix_file(path, members[i], "seed " + std::to_string(g.seed));
    files.push_back(path.string());
  }
  Json truth_file = nullptr;
  if (truth) {
    const fs::path path = fs::path(g.out_dir) / "P.txt";
    write_matrix_file(path, *truth, "ground-truth congruence");
    truth_file = path.string();
  }
  out << Json{{"kind", g.negative.empty() ? "sdc" : g.negative}, {"files", files}, {"P", truth_file}}.dump(2)
      << '\n';
  return exit_sdc;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simultaneous diagonalization of real symmetric matrices by congruence", "sdc"};
  app.require_subcommand(1);

  Tolerances<double> tol;
  std::vector<std::string> files;
  std::string out_path;
  std::string p_file;
  GenOptions gen;

  auto* check = app.add_subcommand("check", "print SDC status and certificate");
  check->add_option("files", files, "matrix files, one per matrix")->required();
  add_tolerance_flags(*check, tol);

  auto* diag = app.add_subcommand("diagonalize", "print the full report");
  diag->add_option("files", files, "matrix files, one per matrix")->required();
  diag->add_option("--out", out_path, "write the report here instead of standard output");
  add_tolerance_flags(*diag, tol);

  auto* verify = app.add_subcommand("verify", "check a candidate congruence matrix");
  verify->add_option("files", files, "matrix files, one per matrix")->required();
  verify->add_option("--p", p_file, "congruence matrix file")->required();
  add_tolerance_flags(*verify, tol);

  auto* generate = app.add_subcommand("gen", "write a seeded test collection");
  generate->add_option("--n", gen.n, "dimension")->required()->check(CLI::PositiveNumber);
  generate->add_option("--m", gen.m, "number of matrices")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "generator seed")->required();
  generate->add_flag("--singular", gen.singular, "make every member singular");
  generate->add_option("--negative", gen.negative, "non-SDC family")
      ->check(CLI::IsMember({"defective", "noncommuting"}));
  generate->add_option("--out-dir", gen.out_dir, "output directory")->required();
  add_tolerance_flags(*generate, tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }

  try {
    tol.validate();
    if (check->parsed()) return cmd_check(files, tol, out, err);
    if (diag->parsed()) return cmd_diagonalize(files, out_path, tol, out, err);
    if (verify->parsed()) return cmd_verify(files, p_file, tol, out, err);
    if (gen.singular && !gen.negative.empty()) {
      err << "error: --singular and --negative are exclusive\n";
      return exit_error;
    }
    return cmd_gen(gen, tol, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

}  // namespace sdc::io
