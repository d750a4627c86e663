#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vame/config.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "vame_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = work_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out << content;
}

CliResult run_cli(const std::string& args, const std::string& tag) {
  const fs::path out_file = work_root() / (tag + ".stdout");
  const fs::path err_file = work_root() / (tag + ".stderr");
  const std::string cmd = std::string(VAMECLI_PATH) + " " + args + " > \"" +
                          out_file.string() + "\" 2> \"" + err_file.string() + "\"";
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::size_t count_fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

/// Constant-anchor run on the halving resolvent; alpha = 0 via constant f.
std::string base_config(const std::string& preset, const std::string& extra_schedule,
                        const std::string& extra_run, const fs::path& out_dir) {
  std::ostringstream os;
  os << "[operator]\nkind = scaled_identity\ndim = 1\nc = 1\n";
  os << "[contraction]\nkind = constant\nu = 0\n";
  os << "[schedule]\npreset = " << preset << "\n" << extra_schedule;
  os << "[run]\nscheme = vame\nx0 = 1\n" << extra_run;
  os << "output_dir = " << out_dir.string() << "\n";
  return os.str();
}

}  // namespace

TEST_CASE("cli run writes the trace and the resolved config") {
  const fs::path dir = fresh_dir("run_out");
  const fs::path cfg = work_root() / "run.ini";
  write_file(cfg, base_config("example1", "lambda = 1\n", "horizon = 12\nk_max = 3\n", dir));

  const CliResult r = run_cli("run -c \"" + cfg.string() + "\"", "run");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("ran example1") != std::string::npos);
  CHECK(r.out.find("wrote") != std::string::npos);

  const auto lines = nonempty_lines(slurp(dir / "trace.csv"));
  REQUIRE(lines.size() == 14);  // header + rows n = 0..12
  CHECK(lines[0] == "n,alpha_n,lambda_n,err_norm,succ_residual,scheme_residual,kz");
  for (const auto& line : lines) CHECK(count_fields(line) == 7);

  const vame::ExperimentConfig resolved =
      vame::parse_config_file((dir / "config.resolved.ini").string());
  CHECK(resolved.horizon == 12);
  CHECK(resolved.preset == "example1");
  CHECK(resolved.output_dir == dir.string());
}

TEST_CASE("cli rejects bad configs and bad invocations") {
  const fs::path dir = fresh_dir("bad_out");
  const fs::path bad = work_root() / "bad.ini";
  write_file(bad, base_config("example1", "lambda = 0\n", "horizon = 10\n", dir));
  const CliResult r = run_cli("run -c \"" + bad.string() + "\"", "bad_lambda");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("config error") != std::string::npos);
  CHECK(r.err.find("lambda must be positive") != std::string::npos);

  CHECK(run_cli("run -c /nonexistent/nope.ini", "bad_path").exit_code == 2);
  CHECK(run_cli("", "no_subcommand").exit_code == 2);

  // The generic preset needs a usable mining horizon for its moduli.
  const fs::path unminable = work_root() / "unminable.ini";
  write_file(unminable, base_config("generic", "brute_horizon = 0\n", "horizon = 10\n",
                                    fresh_dir("unminable_out")));
  const CliResult g = run_cli("certify -c \"" + unminable.string() + "\"", "unminable");
  CHECK(g.exit_code == 2);
  CHECK(g.err.find("missing step/error moduli") != std::string::npos);
}

TEST_CASE("cli certify writes one CSV per certificate") {
  const fs::path dir = fresh_dir("certify_out");
  const fs::path cfg = work_root() / "certify.ini";
  write_file(cfg, base_config("example1", "lambda = 1\n", "horizon = 100\nk_max = 3\n", dir));

  const CliResult r = run_cli("certify -c \"" + cfg.string() + "\"", "certify");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("wrote 4 certificates") != std::string::npos);

  // Constant anchor at 0 from x0 = 1 gives slack 1, so phi0(k) = 4(k+1) - 2.
  const auto phi0 = nonempty_lines(slurp(dir / "phi0.csv"));
  REQUIRE(phi0.size() == 5);
  CHECK(phi0[0] == "k,modulus_value,bound");
  CHECK(phi0[1] == "0,2,1");
  CHECK(phi0[4] == "3,14,0.25");
  CHECK(fs::exists(dir / "phi_star.csv"));
  CHECK(fs::exists(dir / "psi_star.csv"));
  CHECK(fs::exists(dir / "psi0.csv"));

  const std::string manifest = slurp(dir / "certificates.txt");
  CHECK(manifest.find("phi0 [successive]") != std::string::npos);
  CHECK(manifest.find("preconditions: H1an H2an H1ln") != std::string::npos);

  // k_max can be overridden from the command line.
  const fs::path dir2 = fresh_dir("certify_kmax");
  const CliResult r2 = run_cli("certify -c \"" + cfg.string() + "\" -o \"" + dir2.string() +
                                   "\" --k-max 1",
                               "certify_kmax");
  CHECK(r2.exit_code == 0);
  CHECK(nonempty_lines(slurp(dir2 / "phi0.csv")).size() == 3);
}

TEST_CASE("cli certify emits the drifting-step closed forms") {
  const fs::path dir = fresh_dir("certify2_out");
  const fs::path cfg = work_root() / "certify2.ini";
  write_file(cfg, base_config("example2", "e_star_norm = 0\n", "horizon = 100\nk_max = 2\n",
                              dir));

  const CliResult r = run_cli("certify -c \"" + cfg.string() + "\"", "certify2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("wrote 5 certificates") != std::string::npos);

  // Slack 1 at alpha = 0: theta0(k) = 36(k+1) - 2, valid for every frozen m.
  const auto theta0 = nonempty_lines(slurp(dir / "theta0.csv"));
  REQUIRE(theta0.size() == 4);
  CHECK(theta0[1] == "0,34,1");
  CHECK(theta0[3] == "2,106,0.33333333333333331");
}

TEST_CASE("cli verify grades certificates against the trace") {
  const fs::path cfg_dir = fresh_dir("verify_cfg");

  SUBCASE("a sound configuration verifies with exit 0") {
    const fs::path dir = fresh_dir("verify_ok");
    const fs::path cfg = cfg_dir / "ok.ini";
    write_file(cfg, base_config("example2", "e_star_norm = 0\n",
                                "horizon = 2000\nk_max = 8\n", dir));
    const CliResult r = run_cli("verify -c \"" + cfg.string() + "\"", "verify_ok");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("phi0 [successive]") != std::string::npos);
    CHECK(r.out.find("0 fail") != std::string::npos);
    CHECK(r.out.find("empirical(successive)") != std::string::npos);
    CHECK(r.out.find("legend:") != std::string::npos);
    CHECK(fs::exists(dir / "report_phi0.csv"));
    CHECK(fs::exists(dir / "report_theta0.csv"));

    // The merged-table subcommand reads those CSVs back.
    const CliResult merged =
        run_cli("report -d \"" + dir.string() + "\"", "report_ok");
    CHECK(merged.exit_code == 0);
    CHECK(merged.out.find("phi0") != std::string::npos);
    CHECK(merged.out.find("theta0") != std::string::npos);
    CHECK(merged.out.find("(~)") != std::string::npos);  // phi_star sits beyond horizon
    CHECK(merged.out.find("legend:") != std::string::npos);
  }

  SUBCASE("deflated moduli are caught and exit 1") {
    const fs::path dir = fresh_dir("verify_shrunk");
    const fs::path cfg = cfg_dir / "shrunk.ini";
    write_file(cfg, base_config("example1", "lambda = 1\n",
                                "horizon = 1000\nk_max = 6\n"
                                "negative_control = shrink_moduli\n",
                                dir));
    const CliResult r = run_cli("verify -c \"" + cfg.string() + "\"", "verify_shrunk");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("_shrunken") != std::string::npos);
    CHECK(r.out.find(" fail") != std::string::npos);

    const CliResult merged =
        run_cli("report -d \"" + dir.string() + "\"", "report_shrunk");
    CHECK(merged.exit_code == 1);
    CHECK(merged.out.find("(!)") != std::string::npos);
  }

  SUBCASE("nonsummable errors are refused as precondition violations") {
    const fs::path dir = fresh_dir("verify_nonsummable");
    const fs::path cfg = cfg_dir / "nonsummable.ini";
    write_file(cfg, base_config("example2", "e_star_norm = 1\n",
                                "horizon = 500\nk_max = 4\n"
                                "negative_control = nonsummable_errors\n",
                                dir));
    const CliResult r =
        run_cli("verify -c \"" + cfg.string() + "\"", "verify_nonsummable");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("precondition-violation") != std::string::npos);
    CHECK(r.out.find("[H1en]") != std::string::npos);
  }
}

TEST_CASE("cli report handles edge inputs") {
  const fs::path empty = fresh_dir("report_empty");
  const CliResult none = run_cli("report -d \"" + empty.string() + "\"", "report_empty");
  CHECK(none.exit_code == 0);
  CHECK(none.out.find("no report CSVs found") != std::string::npos);

  const fs::path bogus = fresh_dir("report_bogus");
  write_file(bogus / "report_bogus.csv", "a,b,c\n1,2,3\n");
  const CliResult bad = run_cli("report -d \"" + bogus.string() + "\"", "report_bad");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("unexpected header") != std::string::npos);

  CHECK(run_cli("report -d /nonexistent/reports", "report_missing").exit_code == 2);
}

TEST_CASE("cli runs are deterministic in config plus seed") {
  const fs::path dir_a = fresh_dir("det_a");
  const fs::path dir_b = fresh_dir("det_b");
  const fs::path dir_c = fresh_dir("det_c");
  const fs::path cfg = work_root() / "det.ini";
  // Two dimensions so distinct seeds pick visibly different error directions.
  write_file(cfg,
             "[operator]\nkind = scaled_identity\ndim = 2\nc = 1\n"
             "[contraction]\nkind = constant\nu = 0\n"
             "[schedule]\npreset = example2\ne_star_norm = 1\n"
             "[run]\nscheme = vame\nx0 = 1\nhorizon = 300\nk_max = 4\nseed = 3\n"
             "output_dir = " +
                 fresh_dir("det_base").string() + "\n");

  REQUIRE(run_cli("run -c \"" + cfg.string() + "\" -o \"" + dir_a.string() + "\"", "det_a")
              .exit_code == 0);
  REQUIRE(run_cli("run -c \"" + cfg.string() + "\" -o \"" + dir_b.string() + "\"", "det_b")
              .exit_code == 0);
  CHECK(slurp(dir_a / "trace.csv") == slurp(dir_b / "trace.csv"));

  // A different seed turns the error direction and changes the trace.
  REQUIRE(run_cli("run -c \"" + cfg.string() + "\" -o \"" + dir_c.string() + "\" --seed 9",
                  "det_c")
              .exit_code == 0);
  CHECK(slurp(dir_a / "trace.csv") != slurp(dir_c / "trace.csv"));
  const vame::ExperimentConfig resolved =
      vame::parse_config_file((dir_c / "config.resolved.ini").string());
  CHECK(resolved.seed == 9);
}
