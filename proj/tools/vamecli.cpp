#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vame/experiment.hpp"
#include "vame/schedules.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonOptions {
  std::string config_path;
  std::string output_dir_override;
  std::optional<unsigned> seed_override;
  vame::Nat k_max_override = 0;
  bool has_k_max_override = false;
};

vame::ExperimentConfig load_config(const CommonOptions& opts) {
  vame::ExperimentConfig cfg = vame::parse_config_file(opts.config_path);
  if (!opts.output_dir_override.empty()) cfg.output_dir = opts.output_dir_override;
  if (opts.seed_override) cfg.seed = *opts.seed_override;
  if (opts.has_k_max_override) cfg.k_max = opts.k_max_override;
  return cfg;
}

fs::path prepare_output_dir(const vame::ExperimentConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vame::ConfigError("cannot open '" + path.string() + "' for writing");
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vame::ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_run(const CommonOptions& opts) {
  const vame::ExperimentConfig cfg = load_config(opts);
  const fs::path dir = prepare_output_dir(cfg);
  const vame::IterationTrace trace = vame::run_experiment(cfg);

  std::ostringstream csv;
  vame::write_trace_csv(trace, csv);
  write_file(dir / "trace.csv", csv.str());
  write_file(dir / "config.resolved.ini", vame::serialize_config(cfg));

  const std::size_t last = trace.successive.size() - 1;
  std::cout.precision(9);
  std::cout << "ran " << trace.sched.label << " on " << trace.op.label() << " for "
            << trace.horizon() << " steps: final successive residual "
            << trace.successive[last] << ", final scheme residual " << trace.scheme[last]
            << "\nwrote " << (dir / "trace.csv").string() << '\n';
  return kExitOk;
}

int cmd_certify(const CommonOptions& opts) {
  const vame::ExperimentConfig cfg = load_config(opts);
  const fs::path dir = prepare_output_dir(cfg);
  const vame::BuiltExperiment built = vame::build_experiment(cfg);
  const std::vector<vame::RateCertificate> certs = vame::build_certificates(cfg, built);

  std::ostringstream manifest;
  for (const auto& cert : certs) {
    std::ostringstream csv;
    vame::write_certificate_csv(cert, cfg.k_max, csv);
    write_file(dir / (cert.name + ".csv"), csv.str());
    manifest << cert.name << " [" << vame::residual_kind_name(cert.kind);
    if (cert.kind == vame::ResidualKind::kFixedM) manifest << " m=" << cert.fixed_index;
    manifest << "]\n  " << cert.provenance << "\n  preconditions:";
    for (const auto& tag : cert.preconditions) manifest << ' ' << tag;
    manifest << "\n";
  }
  write_file(dir / "certificates.txt", manifest.str());
  std::cout << "wrote " << certs.size() << " certificates to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_verify(const CommonOptions& opts) {
  const vame::ExperimentConfig cfg = load_config(opts);
  const fs::path dir = prepare_output_dir(cfg);
  const vame::BuiltExperiment built = vame::build_experiment(cfg);
  const std::vector<vame::RateCertificate> certs = vame::build_certificates(cfg, built);
  const vame::IterationTrace trace = vame::run_experiment(cfg, built);

  std::vector<vame::VerificationReport> reports;
  bool any_fail = false;
  for (const auto& cert : certs) {
    try {
      vame::VerificationReport report = vame::certify(trace, cert, cfg.k_max);
      std::ostringstream csv;
      vame::write_report_csv(report, csv);
      write_file(dir / ("report_" + cert.name + ".csv"), csv.str());
      std::cout << vame::render_report_summary(report) << '\n';
      if (!report.all_pass()) any_fail = true;
      reports.push_back(std::move(report));
    } catch (const vame::PreconditionViolation& violation) {
      std::cout << cert.name << ": precondition-violation [" << violation.hypothesis()
                << "] " << violation.what() << '\n';
      any_fail = true;
    }
  }
  if (!reports.empty()) {
    std::cout << '\n' << vame::compare_certificates(reports);
  }
  return any_fail ? kExitVerificationFailed : kExitOk;
}

int cmd_report(const std::string& dir_arg) {
  const fs::path dir(dir_arg);
  if (!fs::is_directory(dir)) {
    throw vame::ConfigError("report: '" + dir_arg + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("report_", 0) == 0 &&
        entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cout << "no report CSVs found in " << dir.string() << '\n';
    return kExitOk;
  }

  struct ParsedRow {
    std::string k, certified, empirical, status;
  };
  std::map<std::string, std::vector<ParsedRow>> tables;
  std::vector<std::string> order;
  bool any_fail = false;
  for (const auto& file : files) {
    std::string stem = file.stem().string().substr(std::string("report_").size());
    std::istringstream in(slurp(file));
    std::string line;
    std::getline(in, line);  // header
    if (line != "k,certified,empirical,max_residual,status") {
      throw vame::ConfigError("report: unexpected header in '" + file.string() + "'");
    }
    std::vector<ParsedRow> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ParsedRow row;
      std::istringstream cells(line);
      std::string max_residual;
      if (!std::getline(cells, row.k, ',') || !std::getline(cells, row.certified, ',') ||
          !std::getline(cells, row.empirical, ',') ||
          !std::getline(cells, max_residual, ',') || !std::getline(cells, row.status)) {
        throw vame::ConfigError("report: malformed row in '" + file.string() + "'");
      }
      if (row.status == "fail") any_fail = true;
      rows.push_back(std::move(row));
    }
    tables.emplace(stem, std::move(rows));
    order.push_back(std::move(stem));
  }

  std::size_t k_rows = 0;
  for (const auto& name : order) k_rows = std::max(k_rows, tables[name].size());
  std::cout << "k";
  for (const auto& name : order) std::cout << '\t' << name;
  std::cout << '\n';
  for (std::size_t i = 0; i < k_rows; ++i) {
    bool printed_k = false;
    std::ostringstream line;
    for (const auto& name : order) {
      const auto& rows = tables[name];
      if (!printed_k) {
        line << (i < rows.size() ? rows[i].k : std::to_string(i));
        printed_k = true;
      }
      line << '\t';
      if (i < rows.size()) {
        const auto& row = rows[i];
        line << (row.certified == std::to_string(vame::kNatCeiling) ? "sat" : row.certified);
        if (row.status == "fail") line << "(!)";
        if (row.status == "horizon-skipped") line << "(~)";
      } else {
        line << '-';
      }
    }
    std::cout << line.str() << '\n';
  }
  std::cout << "legend: (!) failed, (~) certified index beyond horizon, sat = saturated\n";
  return any_fail ? kExitVerificationFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Asymptotic-regularity rate certificates and trajectory verification for "
      "resolvent-based viscosity iterations"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string report_dir;

  const auto add_common = [&opts](CLI::App* cmd, bool with_kmax) {
    cmd->add_option("-c,--config", opts.config_path, "experiment config (INI)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output-dir", opts.output_dir_override,
                    "override the config's output directory");
    cmd->add_option_function<unsigned>(
        "--seed", [&opts](unsigned v) { opts.seed_override = v; },
        "override the config's seed");
    if (with_kmax) {
      cmd->add_option_function<vame::Nat>(
          "--k-max",
          [&opts](vame::Nat v) {
            opts.k_max_override = v;
            opts.has_k_max_override = true;
          },
          "override the config's k_max");
    }
  };

  CLI::App* run = app.add_subcommand("run", "run the iteration and write the trace CSV");
  add_common(run, false);
  CLI::App* certify =
      app.add_subcommand("certify", "construct rate certificates and write their CSVs");
  add_common(certify, true);
  CLI::App* verify = app.add_subcommand(
      "verify", "run, certify, and compare certified against empirical indices");
  add_common(verify, true);
  CLI::App* report = app.add_subcommand("report", "merge report CSVs into a summary table");
  report->add_option("-d,--dir", report_dir, "directory holding report_*.csv files")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(opts);
    if (certify->parsed()) return cmd_certify(opts);
    if (verify->parsed()) return cmd_verify(opts);
    if (report->parsed()) return cmd_report(report_dir);
    std::cerr << "no subcommand selected\n";
    return kExitConfigError;
  } catch (const vame::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const vame::PreconditionViolation& e) {
    std::cerr << "verification error: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericError;
  }
}
